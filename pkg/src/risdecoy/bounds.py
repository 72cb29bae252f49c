"""Fisher information, CRB, and PEB evaluation, angular and positional.

Two FI routes are kept deliberately separate: ``fi_exact`` differentiates the
full composite gain (analytic steering derivatives, central difference for
the kernel term) while ``fi_closed`` evaluates the flat-kernel closed form
with kappa(theta) = pi^2 cos^2(theta) N^2 (N-1)^2.  The closed form is used
by the deception criteria; the exact form is the ground truth they are
checked against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import SceneConfig, wavelength
from .geometry import HALF_PI
from .ris_kernel import Convention, beta_bar_sweep, validate_profile

FD_STEP = 1e-5


class Variant(enum.Enum):
    EXACT = "exact"
    CLOSED_FORM = "closed_form"


def kappa(theta, N: int):
    """Array/illumination factor pi^2 cos^2(theta) N^2 (N-1)^2."""
    return np.pi ** 2 * np.cos(theta) ** 2 * N ** 2 * (N - 1) ** 2


def _fi_many(thetas, omega, config: SceneConfig, convention: Convention,
             variant: Variant, amplitude=None):
    """Vectorized FI over angles; ``amplitude`` overrides the scene gain."""
    omega = validate_profile(omega)
    thetas = np.atleast_1d(np.asarray(thetas, float))
    if config.noise_power <= 0:
        raise ValueError("FI needs positive noise power")
    amp = config.amplitude_gain if amplitude is None else amplitude
    tt = config.theta_true
    scale = 2.0 * config.power_tx * config.t_pilots / config.noise_power
    b = beta_bar_sweep(thetas, omega, convention, theta_true=tt)
    if variant is Variant.CLOSED_FORM:
        return scale * amp ** 2 * np.abs(b) ** 2 * kappa(thetas, config.n_radar)
    N = config.n_radar
    h = FD_STEP
    db = (beta_bar_sweep(thetas + h, omega, convention, theta_true=tt)
          - beta_bar_sweep(thetas - h, omega, convention, theta_true=tt)) / (2 * h)
    n = np.arange(N)[:, None]
    al = np.exp(1j * np.pi * n * np.sin(thetas)[None, :])
    dal = 1j * np.pi * n * np.cos(thetas)[None, :] * al
    # MRT matched at each evaluated angle: v = sqrt(N), dv = (dalpha)^H alpha / sqrt(N)
    v = np.sqrt(N)
    dv = np.sum(dal.conj() * al, axis=0) / np.sqrt(N)
    dg = amp * (db[None, :] * al * v + b[None, :] * (dal * v + al * dv[None, :]))
    return scale * np.sum(np.abs(dg) ** 2, axis=0)


def fi_exact(theta: float, omega, config: SceneConfig,
             convention: Convention = Convention.FIXED_INCIDENCE) -> float:
    """FI from the full derivative of the composite gain (no flat-kernel step)."""
    return float(_fi_many(theta, omega, config, convention, Variant.EXACT)[0])


def fi_closed(theta: float, omega, config: SceneConfig,
              convention: Convention = Convention.FIXED_INCIDENCE) -> float:
    """Flat-kernel closed-form FI, 2PT a^2 |beta_bar|^2 kappa / sigma^2."""
    if abs(abs(theta) - HALF_PI) < 1e-12:
        raise ValueError("closed form undefined at +-pi/2 (cos(theta) = 0)")
    return float(_fi_many(theta, omega, config, convention, Variant.CLOSED_FORM)[0])


def crb(theta: float, omega, config: SceneConfig,
        variant: Variant = Variant.CLOSED_FORM,
        convention: Convention = Convention.FIXED_INCIDENCE) -> float:
    """Inverse FI; +inf where the information vanishes."""
    fi = (fi_closed if variant is Variant.CLOSED_FORM else fi_exact)(
        theta, omega, config, convention)
    return float(1.0 / fi) if fi > 0 else np.inf


def peb(theta: float, omega, config: SceneConfig,
        variant: Variant = Variant.CLOSED_FORM,
        convention: Convention = Convention.FIXED_INCIDENCE) -> float:
    return float(np.sqrt(crb(theta, omega, config, variant, convention)))


@dataclass(frozen=True)
class BoundReport:
    """FI/CRB/PEB evaluated on an angle grid, exact and closed-form."""

    thetas: np.ndarray
    fi_exact: np.ndarray
    fi_closed: np.ndarray
    crb_exact: np.ndarray
    crb_closed: np.ndarray
    peb_exact: np.ndarray
    peb_closed: np.ndarray
    kappa: np.ndarray


def bound_sweep(thetas, omega, config: SceneConfig,
                convention: Convention = Convention.FIXED_INCIDENCE) -> BoundReport:
    thetas = np.asarray(thetas, float)
    fe = _fi_many(thetas, omega, config, convention, Variant.EXACT)
    fc = _fi_many(thetas, omega, config, convention, Variant.CLOSED_FORM)
    with np.errstate(divide="ignore"):
        ce = np.where(fe > 0, 1.0 / fe, np.inf)
        cc = np.where(fc > 0, 1.0 / fc, np.inf)
    return BoundReport(thetas=thetas, fi_exact=fe, fi_closed=fc,
                       crb_exact=ce, crb_closed=cc,
                       peb_exact=np.sqrt(ce), peb_closed=np.sqrt(cc),
                       kappa=kappa(thetas, config.n_radar))


@dataclass(frozen=True)
class PositionGrid:
    """Cartesian PEB maps.

    ``peb_position`` is the footnote mapping: angular FI with the cell-range
    attenuation, pushed through the Jacobian of theta(xy) and pseudo-inverted
    (the position FIM of an angle-only measurement is rank one), giving
    r/sqrt(J(theta; a(r))).  ``peb_angular`` paints the range-pinned angular
    PEB per cell angle; it carries the angular-migration structure that the
    position map's range growth otherwise drowns.
    """

    x: np.ndarray
    y: np.ndarray
    peb_position: np.ndarray
    peb_angular: np.ndarray

    @property
    def extent(self):
        return (self.x[0], self.x[-1], self.y[0], self.y[-1])


def position_peb_map(x_range, y_range, shape, omega, config: SceneConfig,
                     variant: Variant = Variant.CLOSED_FORM,
                     convention: Convention = Convention.FIXED_INCIDENCE) -> PositionGrid:
    """Evaluate both PEB maps on an (nx, ny) Cartesian grid."""
    nx, ny = shape
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.linspace(y_range[0], y_range[1], ny)
    XX, YY = np.meshgrid(xs, ys, indexing="ij")
    RR = np.hypot(XX, YY)
    TH = np.arctan2(YY, XX)
    flat_th = TH.ravel()
    fi_pinned = _fi_many(flat_th, omega, config, convention, variant)
    # the angle measurement carries no information at the domain edge
    fi_pinned = np.where(np.abs(np.cos(flat_th)) < 1e-12, 0.0, fi_pinned)
    lam = wavelength(config.carrier_hz)
    with np.errstate(divide="ignore", invalid="ignore"):
        amp_cell = np.where(RR.ravel() > 0, lam / (4 * np.pi * RR.ravel()), np.inf)
        fi_cell = fi_pinned * (amp_cell / config.amplitude_gain) ** 2
        peb_ang = np.where(fi_pinned > 0, 1.0 / np.sqrt(fi_pinned), np.inf)
        peb_pos = np.where((fi_cell > 0) & np.isfinite(fi_cell) & (RR.ravel() > 0),
                           RR.ravel() / np.sqrt(fi_cell), np.inf)
    return PositionGrid(x=xs, y=ys,
                        peb_position=peb_pos.reshape(RR.shape),
                        peb_angular=peb_ang.reshape(RR.shape))
