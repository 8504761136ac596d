from django.apps import AppConfig


class SymbolCoreConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "symbol_core"
    verbose_name = "Levy symbols"
