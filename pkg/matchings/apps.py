from django.apps import AppConfig


# This class is used to configure the matchings app
class MatchingsConfig(AppConfig):
    # The name of the app
    name = 'matchings'
    verbose_name = 'Hypergraph matchings'
