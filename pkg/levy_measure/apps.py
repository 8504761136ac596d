from django.apps import AppConfig


class LevyMeasureConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "levy_measure"
    verbose_name = "Levy densities"
