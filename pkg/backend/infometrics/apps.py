from django.apps import AppConfig


class InfometricsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'infometrics'
