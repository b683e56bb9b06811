from django.apps import AppConfig


class TPhaseCoreConfig(AppConfig):
    """T-product phase analysis library and its management commands"""
    name = 'tphase_core'
    verbose_name = 'T-phase analysis'
