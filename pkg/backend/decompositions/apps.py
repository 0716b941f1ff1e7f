from django.apps import AppConfig


class DecompositionsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'decompositions'
