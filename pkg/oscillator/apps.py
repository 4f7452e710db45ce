from django.apps import AppConfig


class OscillatorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'oscillator'
    verbose_name = 'Dirac oscillator closed forms'
