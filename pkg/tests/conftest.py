import numpy as np
import pytest

from risdecoy import SceneConfig, SolverParams, build_basis, dbm_to_watts, solve_p3

deg = np.deg2rad


def reference_scene(**overrides) -> SceneConfig:
    """The 20 GHz / N=16 / M=32 reference scene used across the suite."""
    kw = dict(
        carrier_hz=20e9,
        n_radar=16,
        m_ris=32,
        p_ris=(48.0, 17.0),
        t_pilots=50,
        power_tx=dbm_to_watts(20.0),
        noise_power=dbm_to_watts(-80.0),
        theta_fake=deg(-48.0),
        window_half_width=deg(3.0),
        window_count=10,
        rng_seed=1,
        theta_true_pinned=deg(20.0),
    )
    kw.update(overrides)
    return SceneConfig(**kw)


@pytest.fixture(scope="session")
def scene():
    return reference_scene()


@pytest.fixture(scope="session")
def basis(scene):
    return build_basis(scene.window, scene.theta_fake, scene.theta_true,
                       scene.m_ris)


@pytest.fixture(scope="session")
def solution(basis):
    return solve_p3(basis, SolverParams())
