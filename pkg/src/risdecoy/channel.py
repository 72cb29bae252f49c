"""Cascaded radar--RIS--radar channel, precoding, and observation synthesis.

``attenuation`` returns the round-trip power attenuation (lambda/(4 pi r))^2;
the complex channel gain carries its square root.  With the Section-of-record
parameters this keeps the post-integration SNR in a regime where grid ML
estimation is meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import atan2_angle, steering
from .ris_kernel import Convention, NullingWindow, beta, validate_profile

SPEED_OF_LIGHT = 299792458.0


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts * 1e3)


def wavelength(carrier_hz: float) -> float:
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return SPEED_OF_LIGHT / carrier_hz


def attenuation(p_ris, carrier_hz: float) -> float:
    """Round-trip power attenuation (lambda / (4 pi ||p||))^2."""
    p = np.asarray(p_ris, float)
    r = float(np.linalg.norm(p))
    if r == 0.0:
        raise ValueError("RIS cannot sit at the radar origin")
    lam = wavelength(carrier_hz)
    return (lam / (4.0 * np.pi * r)) ** 2


@dataclass(frozen=True)
class SceneConfig:
    """Full physical scenario for one experiment run.

    Powers are stored in watts; use ``from_dbm`` (or the scenario loader) to
    convert boundary units.  ``theta_true`` may be pinned explicitly,
    otherwise it is derived from the RIS position.
    """

    carrier_hz: float
    n_radar: int
    m_ris: int
    p_ris: tuple[float, float]
    t_pilots: int
    power_tx: float
    noise_power: float
    theta_fake: float
    window_half_width: float
    window_count: int
    rng_seed: int = 0
    theta_true_pinned: float | None = None

    def __post_init__(self):
        if self.power_tx <= 0 or self.noise_power < 0:
            raise ValueError("powers must be positive (noise may be zero only in tests)")
        if self.n_radar < 2:
            raise ValueError("need at least 2 radar antennas")
        if self.m_ris < 1:
            raise ValueError("need at least 1 RIS element")
        if self.t_pilots < 1:
            raise ValueError("need at least one pilot")
        if self.carrier_hz <= 0:
            raise ValueError("carrier frequency must be positive")

    @classmethod
    def from_dbm(cls, power_tx_dbm: float, noise_dbm: float, **kw) -> "SceneConfig":
        return cls(power_tx=dbm_to_watts(power_tx_dbm),
                   noise_power=dbm_to_watts(noise_dbm), **kw)

    @property
    def theta_true(self) -> float:
        if self.theta_true_pinned is not None:
            return self.theta_true_pinned
        return atan2_angle(self.p_ris)

    @property
    def theta_true_derived(self) -> float:
        return atan2_angle(self.p_ris)

    @property
    def window(self) -> NullingWindow:
        return NullingWindow(center=self.theta_true,
                             half_width=self.window_half_width,
                             count=self.window_count)

    @property
    def attenuation(self) -> float:
        return attenuation(self.p_ris, self.carrier_hz)

    @property
    def amplitude_gain(self) -> float:
        """Complex-gain magnitude of the cascaded channel, sqrt of the power attenuation."""
        return float(np.sqrt(self.attenuation))

    def with_noise(self, noise_power: float) -> "SceneConfig":
        return replace(self, noise_power=noise_power)


def mrt_precoder(theta: float, N: int) -> np.ndarray:
    """Maximum-ratio transmit vector, steering(N, theta)/sqrt(N)."""
    return steering(N, theta) / np.sqrt(N)


@dataclass(frozen=True)
class CascadedChannel:
    """Rank-one round-trip channel a * alpha_N(theta) beta alpha_N(theta)^H."""

    H: np.ndarray
    amplitude: float
    theta_true: float
    beta_value: complex


def cascaded_channel(config: SceneConfig, omega: np.ndarray,
                     convention: Convention = Convention.FIXED_INCIDENCE) -> CascadedChannel:
    """Assemble the end-to-end channel matrix for the physical scene."""
    omega = validate_profile(omega)
    if omega.size != config.m_ris:
        raise ValueError(f"profile has {omega.size} entries, scene expects {config.m_ris}")
    tt = config.theta_true
    if convention is Convention.SPECULAR_PLUS_PI:
        b = beta(tt + np.pi, tt, omega)
    else:
        b = beta(tt, tt, omega)
    a = steering(config.n_radar, tt)
    H = config.amplitude_gain * b * np.outer(a, a.conj())
    return CascadedChannel(H=H, amplitude=config.amplitude_gain, theta_true=tt,
                           beta_value=b)


def deceptive_mean(config: SceneConfig, omega: np.ndarray) -> np.ndarray:
    """Mean per-pilot observation under the spoofed scene.

    The radar illuminates the true direction (MRT at theta_true); the RIS
    re-radiation paints two apparent plane-wave returns: the residual at the
    true angle with gain beta(theta_true, theta_true) and the decoy at
    theta_fake with gain beta(theta_fake, theta_true).
    """
    omega = validate_profile(omega)
    tt, tf = config.theta_true, config.theta_fake
    N = config.n_radar
    v_true = np.sqrt(N)  # alpha^H(tt) f_mrt(tt)
    b_true = beta(tt, tt, omega)
    b_fake = beta(tf, tt, omega)
    mu = (np.sqrt(config.power_tx) * config.amplitude_gain * v_true
          * (b_true * steering(N, tt) + b_fake * steering(N, tf)))
    return mu


@dataclass(frozen=True)
class Observation:
    """Noisy N x T baseband observation with its generating context."""

    Y: np.ndarray
    config: SceneConfig
    seed: tuple | int | None = field(default=None)


def observe(mean_per_pilot: np.ndarray, pilots: np.ndarray, noise_power: float,
            rng: np.random.Generator) -> np.ndarray:
    """Stack the mean over pilots and add circularly-symmetric Gaussian noise."""
    N = mean_per_pilot.size
    T = pilots.size
    Y = mean_per_pilot[:, None] * pilots[None, :]
    if noise_power > 0:
        scale = np.sqrt(noise_power / 2.0)
        Y = Y + scale * (rng.standard_normal((N, T)) + 1j * rng.standard_normal((N, T)))
    return Y


def default_pilots(T: int) -> np.ndarray:
    """Constant unit pilots; satisfy the (1/T)||s||^2 = 1 normalization."""
    return np.ones(T, np.complex128)


def synthesize_observation(config: SceneConfig, channel: CascadedChannel,
                           pilots: np.ndarray, rng: np.random.Generator,
                           seed=None) -> Observation:
    """Physical-model observation Y = sqrt(P) H f s^T + noise."""
    pilots = np.asarray(pilots, np.complex128)
    norm = np.linalg.norm(pilots) ** 2 / pilots.size
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("pilots must satisfy (1/T)||s||^2 = 1; rescale explicitly")
    f_tx = mrt_precoder(channel.theta_true, config.n_radar)
    mu = np.sqrt(config.power_tx) * (channel.H @ f_tx)
    Y = observe(mu, pilots, config.noise_power, rng)
    return Observation(Y=Y, config=config, seed=seed)
