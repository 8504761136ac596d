from django.apps import AppConfig


class SpectralSolverConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "spectral_solver"
    verbose_name = "Fourier-spectral PIDE solver"
