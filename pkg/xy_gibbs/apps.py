from django.apps import AppConfig


class XYGibbsConfig(AppConfig):
    name = 'xy_gibbs'
    verbose_name = 'XY chain Gibbs-state preparation'
