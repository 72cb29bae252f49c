import numpy as np
import pytest

from risdecoy import (Convention, NullingWindow, beta, beta_bar,
                      beta_bar_sweep, build_basis, kernel_vector, steering,
                      uniform_profile, validate_profile)

deg = np.deg2rad


def random_profile(rng, M):
    return np.exp(1j * rng.uniform(-np.pi, np.pi, M))


def test_kernel_vector_cancellation():
    for theta in (0.0, 0.4, -1.1):
        assert np.allclose(kernel_vector(theta, theta, 12), np.ones(12))


def test_kernel_vector_specular():
    theta = deg(25.0)
    got = kernel_vector(theta + np.pi, theta, 8)
    want = np.exp(2j * np.pi * np.arange(8) * np.sin(theta))
    assert np.allclose(got, want, atol=1e-12)


def test_kernel_vector_reference_phase():
    ups = kernel_vector(deg(-48.0), deg(20.0), 32)
    want = np.pi * (np.sin(deg(20.0)) - np.sin(deg(-48.0)))
    assert np.angle(ups[1]) == pytest.approx(np.angle(np.exp(1j * want)))
    assert want / np.pi == pytest.approx(1.0852, abs=5e-5)


def test_beta_basic():
    M = 32
    assert beta(0.7, 0.7, uniform_profile(M)) == pytest.approx(M + 0j)
    rng = np.random.default_rng(3)
    for _ in range(20):
        out_a, in_a = rng.uniform(-1.2, 1.2, 2)
        omega = random_profile(rng, M)
        assert abs(beta(out_a, in_a, omega)) <= M + 1e-9


def test_beta_phase_alignment_maximizes():
    rng = np.random.default_rng(4)
    out_a, in_a, M = 0.3, -0.9, 24
    ups = kernel_vector(out_a, in_a, M)
    omega = np.exp(1j * np.angle(ups))
    assert abs(beta(out_a, in_a, omega)) == pytest.approx(M, abs=1e-9)


def test_beta_matrix_form_agreement():
    # Hadamard form v(out,in)^H omega equals the diagonal quadratic form
    # alpha^H(in) diag(omega) alpha(out)
    rng = np.random.default_rng(5)
    M = 16
    for _ in range(100):
        out_a, in_a = rng.uniform(-1.3, 1.3, 2)
        omega = random_profile(rng, M)
        had = beta(out_a, in_a, omega)
        mat = steering(M, in_a).conj() @ np.diag(omega) @ steering(M, out_a)
        assert abs(had - mat) < 1e-10


def test_beta_dimension_mismatch():
    with pytest.raises(ValueError):
        validate_profile(np.ones((2, 2)))


def test_beta_bar_conventions():
    M = 32
    ones = uniform_profile(M)
    assert beta_bar(0.0, ones, Convention.SPECULAR_PLUS_PI) == pytest.approx(M + 0j)
    with pytest.raises(ValueError):
        beta_bar(0.1, ones, Convention.FIXED_INCIDENCE)
    tt = deg(20.0)
    val = beta_bar(deg(-48.0), ones, Convention.FIXED_INCIDENCE, theta_true=tt)
    assert val == pytest.approx(beta(deg(-48.0), tt, ones))


def test_beta_bar_sweep_matches_scalar():
    rng = np.random.default_rng(6)
    M = 20
    omega = random_profile(rng, M)
    thetas = rng.uniform(-1.3, 1.3, 15)
    tt = 0.3
    for conv in Convention:
        sweep = beta_bar_sweep(thetas, omega, conv, theta_true=tt)
        for th, val in zip(thetas, sweep):
            assert val == pytest.approx(beta_bar(th, omega, conv, theta_true=tt),
                                        abs=1e-10)


def test_nulling_window():
    win = NullingWindow(deg(20.0), deg(3.0), 10)
    angles = win.angles
    assert angles.size == 10
    assert angles[0] == pytest.approx(deg(17.0))
    assert angles[-1] == pytest.approx(deg(23.0))
    assert np.unique(angles).size == 10
    assert win.contains(deg(19.0))
    assert not win.contains(deg(-48.0))
    with pytest.raises(ValueError):
        NullingWindow(deg(89.0), deg(3.0), 4)


def test_basis_rank_one_projector():
    # K = 1 at the incidence angle: the kernel is all-ones and
    # P_S = I - (1/M) * ones @ ones^H
    M = 16
    tt = 0.0
    win = NullingWindow(tt, deg(0.5), 1)
    bas = build_basis(win, deg(40.0), tt, M)
    want = np.eye(M) - np.ones((M, M)) / M
    assert np.allclose(bas.projector, want, atol=1e-12)


def test_basis_reference_eigenstructure(basis):
    # eigendecomposition oracle: 10 zeros and 22 ones
    assert np.linalg.matrix_rank(basis.V) == 10
    eig = np.sort(np.linalg.eigvalsh(basis.projector))
    assert np.allclose(eig[:10], 0.0, atol=1e-9)
    assert np.allclose(eig[10:], 1.0, atol=1e-9)


def test_basis_projected_decoy_norm(basis):
    M = basis.M
    assert np.linalg.norm(basis.project(basis.w)) <= np.sqrt(M) + 1e-12


def test_projector_algebra_random_bases():
    rng = np.random.default_rng(7)
    for _ in range(100):
        M = int(rng.integers(12, 48))
        K = int(rng.integers(1, min(M // 2, 8) + 1))
        tt = rng.uniform(-0.9, 0.9)
        hw = rng.uniform(deg(1.0), deg(6.0))
        if abs(tt) + hw >= np.pi / 2 - 0.05:
            continue
        tf = tt + (hw + rng.uniform(0.3, 1.0)) * (1 if tt < 0 else -1)
        win = NullingWindow(tt, hw, K)
        try:
            bas = build_basis(win, tf, tt, M)
        except ValueError:
            continue
        P = bas.projector
        assert np.linalg.norm(P @ P - P) < 1e-9
        assert np.linalg.norm(P - P.conj().T) < 1e-9
        assert np.linalg.norm(P @ bas.V) < 1e-9
        x = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        assert np.linalg.norm(bas.V.conj().T @ bas.project(x)) <= 1e-9 * np.linalg.norm(x)


def test_basis_preconditions():
    tt = deg(20.0)
    win = NullingWindow(tt, deg(3.0), 10)
    with pytest.raises(ValueError, match="M >= 2K"):
        build_basis(win, deg(-48.0), tt, 16)
    with pytest.raises(ValueError, match="window"):
        build_basis(win, deg(21.0), tt, 32)


def test_basis_aliasing_detection():
    # degenerate half-width drives duplicate sines (machine-level collapse)
    tt = 0.2
    win = NullingWindow(tt, 1e-17, 4)
    with pytest.raises(ValueError):
        build_basis(win, 1.0, tt, 32)


def test_empty_basis_for_decoy_only():
    bas = build_basis(None, 0.5, 0.1, 12)
    assert bas.K == 0
    assert np.allclose(bas.projector, np.eye(12))
