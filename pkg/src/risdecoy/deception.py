"""Deception quantification: leakage, rho criteria, placement score, shortlist.

All criteria are evaluated under the fixed-incidence kernel convention and the
closed-form FI, which makes the CRB-ratio and kernel-ratio forms of the
point-wise criterion algebraically identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import Variant, kappa, _fi_many
from .channel import SceneConfig
from .ris_kernel import (Convention, KernelBasis, NullingWindow, beta_bar,
                         beta_bar_sweep, build_basis, kernel_vector)
from .solver import SolverParams, solve_p3


def leakage_worst(omega, window: NullingWindow, theta_true: float,
                  convention: Convention = Convention.FIXED_INCIDENCE,
                  oversample: int | None = None) -> float:
    """Worst |beta_bar| over the window's K angles.

    ``oversample`` evaluates a denser in-window grid instead (robustness
    reporting only; the guarantee math always uses the discrete K angles).
    """
    if window is None or window.count == 0:
        raise ValueError("empty nulling window")
    angles = window.angles
    if oversample is not None and oversample > 1:
        angles = np.linspace(window.center - window.half_width,
                             window.center + window.half_width,
                             window.count * oversample)
    return float(np.abs(beta_bar_sweep(angles, omega, convention,
                                       theta_true=theta_true)).max())


def kappa_min(window: NullingWindow, N: int) -> float:
    return float(kappa(window.angles, N).min())


def rho_pointwise_ok(omega, theta_true: float, theta_fake: float, rho: float,
                     config: SceneConfig,
                     convention: Convention = Convention.FIXED_INCIDENCE):
    """Point-wise criterion |b(tt)/b(tf)| <= sqrt(kappa_f/(rho kappa_t)).

    Returns (verdict, margin) with margin = threshold - ratio; a vanishing
    decoy response fails automatically with -inf margin.
    """
    if rho <= 1:
        raise ValueError("deception level rho must exceed 1")
    bt = abs(beta_bar(theta_true, omega, convention, theta_true=theta_true))
    bf = abs(beta_bar(theta_fake, omega, convention, theta_true=theta_true))
    N = config.n_radar
    threshold = float(np.sqrt(kappa(theta_fake, N) / (rho * kappa(theta_true, N))))
    if bf == 0.0:
        return False, -np.inf
    margin = threshold - bt / bf
    return bool(margin >= 0.0), float(margin)


def rho_band_ok(omega, window: NullingWindow, theta_fake: float, rho: float,
                config: SceneConfig,
                convention: Convention = Convention.FIXED_INCIDENCE):
    """Band-robust criterion with the worst-case leakage and kappa_min.

    A True verdict guarantees CRB(theta) >= rho * CRB(theta_fake) for every
    window angle (closed-form CRBs).
    """
    if rho <= 1:
        raise ValueError("deception level rho must exceed 1")
    tt = window.center
    lk = leakage_worst(omega, window, tt, convention)
    bf = abs(beta_bar(theta_fake, omega, convention, theta_true=tt))
    N = config.n_radar
    threshold = float(np.sqrt(kappa(theta_fake, N) / (rho * kappa_min(window, N))))
    if bf == 0.0:
        return False, -np.inf
    margin = threshold - lk / bf
    return bool(margin >= 0.0), float(margin)


def certified_rho(omega, window: NullingWindow, theta_fake: float,
                  config: SceneConfig, leakage_cap: float | None = None,
                  convention: Convention = Convention.FIXED_INCIDENCE) -> float:
    """Largest rho the band criterion certifies at the given leakage level.

    With ``leakage_cap`` None the achieved worst-case leakage is used;
    passing a cap evaluates the certification at that design level instead.
    """
    tt = window.center
    lk = leakage_cap if leakage_cap is not None else leakage_worst(
        omega, window, tt, convention)
    bf = abs(beta_bar(theta_fake, omega, convention, theta_true=tt))
    if lk == 0.0:
        return np.inf
    N = config.n_radar
    return float(kappa(theta_fake, N) * bf ** 2 / (kappa_min(window, N) * lk ** 2))


def eta(theta: float, basis: KernelBasis) -> float:
    """Projected decoy strength ||P_S v(theta, theta_true)|| / sqrt(M)."""
    w = kernel_vector(theta, basis.theta_true, basis.M)
    return float(np.linalg.norm(basis.project(w)) / np.sqrt(basis.M))


def phi_score(theta: float, basis: KernelBasis, N: int) -> float:
    """Placement score eta(theta) * sqrt(kappa(theta))."""
    return float(eta(theta, basis) * np.sqrt(kappa(theta, N)))


def rho_upper_bound(theta: float, leakage_cap: float, basis: KernelBasis,
                    N: int) -> float:
    """Configuration-independent bound M^2 Phi^2 / (kappa_min L^2)."""
    if leakage_cap <= 0:
        raise ValueError("leakage cap must be positive")
    if basis.window is None:
        raise ValueError("bound needs a nulling window")
    km = kappa_min(basis.window, N)
    return float(basis.M ** 2 * phi_score(theta, basis, N) ** 2 / (km * leakage_cap ** 2))


def rho_ub_sweep(thetas, basis: KernelBasis, N: int, leakage_caps) -> np.ndarray:
    """rho_UB over a grid for several caps; rows follow the cap order."""
    thetas = np.asarray(thetas, float)
    M = basis.M
    m = np.arange(M)
    # kernel vectors for all angles at once: columns v(theta, theta_true)
    E = np.exp(1j * np.pi * np.outer(m, np.sin(basis.theta_true) - np.sin(thetas)))
    P = E - basis.U @ (basis.U.conj().T @ E)
    etas = np.linalg.norm(P, axis=0) / np.sqrt(M)
    km = kappa_min(basis.window, N)
    base = M ** 2 * etas ** 2 * kappa(thetas, N) / km
    caps = np.asarray(list(leakage_caps), float)
    return base[None, :] / caps[:, None] ** 2


@dataclass(frozen=True)
class DecoyScore:
    theta: float
    eta: float
    phi: float
    rho_ub: float
    realized_rho: float | None = None
    leakage: float | None = None
    decoy_gain: float | None = None
    converged: bool | None = None


@dataclass(frozen=True)
class DeceptionReport:
    """Deception summary for one solved profile."""

    leakage_worst: float
    decoy_mag: float
    leakage_ratio: float
    realized_rho: float
    certified_rho: float
    kappa_min: float
    thresholds: dict


def deception_report(omega, basis: KernelBasis, config: SceneConfig,
                     rho_levels=(2.0, 5.0, 10.0)) -> DeceptionReport:
    tt, tf = basis.theta_true, basis.theta_fake
    window = basis.window
    lk = leakage_worst(omega, window, tt)
    bf = abs(beta_bar(tf, omega, Convention.FIXED_INCIDENCE, theta_true=tt))
    bt = abs(beta_bar(tt, omega, Convention.FIXED_INCIDENCE, theta_true=tt))
    N = config.n_radar
    km = kappa_min(window, N)
    ratio = lk / bf if bf > 0 else np.inf
    realized = (kappa(tf, N) * bf ** 2) / (kappa(tt, N) * bt ** 2) if bt > 0 else np.inf
    thresholds = {rho: float(np.sqrt(kappa(tf, N) / (rho * km))) for rho in rho_levels}
    return DeceptionReport(leakage_worst=lk, decoy_mag=bf, leakage_ratio=ratio,
                           realized_rho=realized,
                           certified_rho=certified_rho(omega, window, tf, config),
                           kappa_min=km, thresholds=thresholds)


def shortlist_decoys(thetas, config: SceneConfig, leakage_cap: float, top_n: int,
                     solver_params: SolverParams = SolverParams()):
    """Rank candidate decoy angles by rho_UB, then solve the leaders.

    Candidates inside the nulling window are dropped.  For the ``top_n``
    best-ranked candidates the design problem is solved and the realized
    rho = CRB(theta_true)/CRB(theta_fake) (closed form) recorded; the
    returned list is sorted by rho_UB with realized values filled in where
    solved.  Final selection by realized rho is the caller's move, as the
    rho_UB winner need not realize the best deception.
    """
    window = config.window
    tt = config.theta_true
    thetas = np.asarray(thetas, float)
    keep = ~np.array([window.contains(t) for t in thetas])
    thetas = thetas[keep]
    if thetas.size == 0:
        raise ValueError("no admissible decoy candidates outside the window")
    basis0 = build_basis(window, float(thetas[0]), tt, config.m_ris)
    rub = rho_ub_sweep(thetas, basis0, config.n_radar, [leakage_cap])[0]
    order = np.argsort(rub)[::-1]
    scores = []
    for rank, idx in enumerate(order):
        th = float(thetas[idx])
        sc = DecoyScore(theta=th, eta=eta(th, basis0),
                        phi=phi_score(th, basis0, config.n_radar),
                        rho_ub=float(rub[idx]))
        if rank < top_n:
            basis = KernelBasis(w=kernel_vector(th, tt, config.m_ris),
                                V=basis0.V, theta_fake=th, theta_true=tt,
                                window=window, U=basis0.U,
                                singular_values=basis0.singular_values)
            sol = solve_p3(basis, solver_params)
            bt = abs(beta_bar(tt, sol.profile, Convention.FIXED_INCIDENCE,
                              theta_true=tt))
            bf = sol.decoy_gain
            realized = ((kappa(th, config.n_radar) * bf ** 2)
                        / (kappa(tt, config.n_radar) * bt ** 2)) if bt > 0 else np.inf
            sc = DecoyScore(theta=th, eta=sc.eta, phi=sc.phi, rho_ub=sc.rho_ub,
                            realized_rho=float(realized),
                            leakage=leakage_worst(sol.profile, window, tt),
                            decoy_gain=sol.decoy_gain, converged=sol.converged)
        scores.append(sc)
    return scores
