import pytest
from hypothesis import settings

from fano_eit.presets import PRESETS, paper_preset
from fano_eit.susceptibility import compute_spectrum

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def presets():
    return {name: paper_preset(name) for name in PRESETS}


@pytest.fixture(scope="session")
def spectra(presets):
    return {name: compute_spectrum(*presets[name]) for name in PRESETS}


@pytest.fixture
def fig2(presets):
    return presets["fig2"]
