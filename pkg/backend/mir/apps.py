from django.apps import AppConfig


class MirConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mir'
    verbose_name = 'Mutual information reduction'
