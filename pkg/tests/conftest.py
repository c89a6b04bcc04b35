import numpy as np
import pytest

from risloc import ArraySpec, SceneConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ris8():
    return ArraySpec(8)


@pytest.fixture
def pr4():
    return ArraySpec(4)


def make_scene(k=2, **overrides):
    """Small deterministic scene used across the unit tests."""
    base = dict(
        target_aoas_ris=[10.0, 35.0][:k],
        target_aoas_pr=[-45.0, 25.0][:k],
        aoa_ap_ris=-10.0,
        aoa_ris_pr=-40.0,
        aod_ris_pr=20.0,
        aoa_ap_pr=55.0,
        gain_targets=[0.05 + 0j] * k,
        gain_ap_ris=0.1 + 0j,
        gain_ris_pr=1.0 + 0j,
        gain_ap_pr=0.01 + 0j,
        gain_targets_pr=[0.05 + 0j] * k,
    )
    base.update(overrides)
    return SceneConfig(**base)


@pytest.fixture
def scene():
    return make_scene()
