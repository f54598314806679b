from django.apps import AppConfig


class PhasemapsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "phasemaps"
