from django.apps import AppConfig


class FrontsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "fronts"
    verbose_name = "Dispersion, phase and field decomposition"
