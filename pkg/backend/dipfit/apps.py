from django.apps import AppConfig


class DipfitConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'dipfit'
    verbose_name = 'Dipole fitting'
