from django.apps import AppConfig


class IndexLabConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "index_lab"
    verbose_name = "Sobolev index estimation"
