"""
Numerical settings for tphase_core.

Values come from the ``TPHASE`` dict in the Django settings module, on top of
``DEFAULTS``. Access them as attributes::

    from tphase_core.conf import tphase_settings
    tphase_settings.PD_TOL
"""

from django.conf import settings
from django.core.signals import setting_changed

DEFAULTS = {
    # positive-definiteness: lambda_min > PD_TOL * ||M||_2
    'PD_TOL': 1e-10,
    # |phi| <= PHASE_ZERO_TOL counts as a zero phase
    'PHASE_ZERO_TOL': 1e-10,
    # singular values below RANK_TOL * sigma_max count as zero
    'RANK_TOL': 1e-9,
    # Fourier slices with condition number above 1 / INVERSE_TOL are singular
    'INVERSE_TOL': 1e-12,
    'BLOCK_CIRCULANT_TOL': 1e-10,
    # spread of a phase vector must stay below pi - BRANCH_TOL
    'BRANCH_TOL': 1e-12,
    'MAJORIZATION_TOL': 1e-9,
    'HERMITIAN_TOL': 1e-10,
    'THETA_GRID_POINTS': 720,
    'EIG_COND_LIMIT': 1e6,
    'CONTOUR_NODES': 512,
    'QUADRATURE_NODES': 128,
    'QUADRATURE_MAX_NODES': 16384,
    'QUADRATURE_TAIL_TOL': 1e-12,
    'QUADRATURE_RTOL': 1e-6,
    'FREQ_POINTS': 400,
    'FREQ_MIN': 1e-3,
    'FREQ_MAX': 1e3,
    'STABILITY_MARGIN': 1e-9,
    'WELL_POSED_TOL': 1e-9,
    'POLE_COND_LIMIT': 1e12,
    'COMPETITOR_SAMPLES': 1000,
    # theta grid used when screening random competitors
    'COMPETITOR_GRID_POINTS': 90,
}


class TPhaseSettings:
    """Attribute access to TPHASE settings with defaults"""

    def __init__(self, defaults=None):
        self.defaults = defaults or DEFAULTS
        self._cached = set()
        self._overrides = None

    @property
    def overrides(self):
        if self._overrides is None:
            if settings.configured:
                self._overrides = getattr(settings, 'TPHASE', {}) or {}
            else:
                self._overrides = {}
        return self._overrides

    def __getattr__(self, name):
        if name not in self.defaults:
            raise AttributeError(f"Invalid tphase setting: '{name}'")
        value = self.overrides.get(name, self.defaults[name])
        self._cached.add(name)
        setattr(self, name, value)
        return value

    def as_dict(self):
        return {name: getattr(self, name) for name in self.defaults}

    def reload(self):
        for name in self._cached:
            delattr(self, name)
        self._cached.clear()
        self._overrides = None


tphase_settings = TPhaseSettings(DEFAULTS)


def reload_tphase_settings(*args, **kwargs):
    if kwargs.get('setting') == 'TPHASE':
        tphase_settings.reload()


setting_changed.connect(reload_tphase_settings)


def resolve(value, name):
    """Return ``value`` unless it is None, else the configured setting"""
    return getattr(tphase_settings, name) if value is None else value
