import io

import numpy as np
import pytest
from django.core.management import call_command

from tphase_core.management.commands.populate_examples import half_phase_example, lti_example


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def half_phase_tensor():
    """Fourier slices diag(e^{0.6i}, e^{0.2i}), diag(e^{0.4i}, e^{0.1i}), diag(e^{0.3i}, e^{0.05i})"""
    return half_phase_example()


@pytest.fixture
def rational_system():
    return lti_example()


@pytest.fixture
def sample_dir(tmp_path):
    call_command('populate_examples', directory=str(tmp_path), stdout=io.StringIO())
    return tmp_path
