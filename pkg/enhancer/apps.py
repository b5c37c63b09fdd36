from django.apps import AppConfig


class EnhancerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'enhancer'
    verbose_name = 'TDCGAN speech enhancement'
