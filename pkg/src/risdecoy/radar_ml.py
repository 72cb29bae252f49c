"""The adversary's grid ML estimator and the Monte-Carlo spoofing harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import SceneConfig, deceptive_mean, default_pilots, observe

DEFAULT_GRID_STEP_DEG = 0.1
CLASSIFY_TOL = np.deg2rad(1.0)


def steering_matrix(thetas, N: int) -> np.ndarray:
    """N x G matrix of steering vectors for the hypothesis grid."""
    thetas = np.asarray(thetas, float)
    return np.exp(1j * np.pi * np.arange(N)[:, None] * np.sin(thetas)[None, :])


def sample_covariance(Y: np.ndarray) -> np.ndarray:
    """Sample spatial covariance (1/T) Y Y^H."""
    Y = np.asarray(Y, np.complex128)
    if Y.ndim != 2 or Y.shape[1] < 1:
        raise ValueError("observation must be N x T with T >= 1")
    return Y @ Y.conj().T / Y.shape[1]


@dataclass(frozen=True)
class MlSpectrum:
    thetas: np.ndarray
    values: np.ndarray
    peak_theta: float
    peak_value: float


def ml_spectrum(R: np.ndarray, thetas, N: int) -> MlSpectrum:
    """Evaluate |a^H(theta) R a(theta)|^2 on the grid; argmax breaks ties low."""
    thetas = np.asarray(thetas, float)
    if thetas.size == 0:
        raise ValueError("empty hypothesis grid")
    A = steering_matrix(thetas, N)
    values = _kernels.spectrum_batch(R[None, :, :], A)[0]
    idx = int(np.argmax(values))
    return MlSpectrum(thetas=thetas, values=values,
                      peak_theta=float(thetas[idx]), peak_value=float(values[idx]))


def classify_estimate(theta_est: float, theta_true: float, theta_fake: float,
                      tol: float = CLASSIFY_TOL) -> str:
    """Decoyed / revealed / elsewhere by proximity within ``tol``."""
    d_fake = abs(theta_est - theta_fake)
    d_true = abs(theta_est - theta_true)
    if d_fake <= tol and (d_fake <= d_true or d_true > tol):
        return "decoyed"
    if d_true <= tol:
        return "revealed"
    return "elsewhere"


@dataclass(frozen=True)
class TrialSummary:
    n_trials: int
    decoyed_rate: float
    revealed_rate: float
    elsewhere_rate: float
    rmse_to_fake: float
    estimates: np.ndarray


def run_trials(config: SceneConfig, omega: np.ndarray, n_trials: int,
               thetas=None, tol: float = CLASSIFY_TOL,
               chunk: int = 100) -> TrialSummary:
    """Monte-Carlo ML trials under the spoofed scene.

    Each trial draws fresh noise from a counter-seeded stream
    ``default_rng((rng_seed, trial))`` so runs are reproducible and trivially
    parallelizable; rates always sum to one.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    if thetas is None:
        thetas = np.deg2rad(np.arange(-89.0, 89.0 + 1e-9, DEFAULT_GRID_STEP_DEG))
    thetas = np.asarray(thetas, float)
    A = steering_matrix(thetas, config.n_radar)
    mu = deceptive_mean(config, omega)
    pilots = default_pilots(config.t_pilots)
    N, T = config.n_radar, config.t_pilots
    estimates = np.empty(n_trials)
    counts = {"decoyed": 0, "revealed": 0, "elsewhere": 0}
    for c0 in range(0, n_trials, chunk):
        c1 = min(c0 + chunk, n_trials)
        R_stack = np.empty((c1 - c0, N, N), np.complex128)
        for i, trial in enumerate(range(c0, c1)):
            rng = np.random.default_rng((config.rng_seed, trial))
            Y = observe(mu, pilots, config.noise_power, rng)
            R_stack[i] = Y @ Y.conj().T / T
        idx, _ = _kernels.spectrum_argmax_batch(R_stack, A)
        for i, trial in enumerate(range(c0, c1)):
            est = float(thetas[idx[i]])
            estimates[trial] = est
            counts[classify_estimate(est, config.theta_true, config.theta_fake, tol)] += 1
    rmse = float(np.sqrt(np.mean((estimates - config.theta_fake) ** 2)))
    return TrialSummary(n_trials=n_trials,
                        decoyed_rate=counts["decoyed"] / n_trials,
                        revealed_rate=counts["revealed"] / n_trials,
                        elsewhere_rate=counts["elsewhere"] / n_trials,
                        rmse_to_fake=rmse, estimates=estimates)
