from django.apps import AppConfig


class RamseySearchConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ramsey_search'
    verbose_name = 'Ramsey critical coloring search'
