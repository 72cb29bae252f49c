"""Relaxed alternating projections for the decoy design, plus objectives.

Stage one is the alternating-projection loop between the nulling subspace and
the unit-modulus set with a relaxation pull toward the decoy kernel.  That
loop alone stalls near -30 dB window leakage on clustered windows (its phase
normalization re-injects span components, and the exact intersection of the
two sets is generally empty there), so when it misses the tolerance a
deterministic Levenberg-Marquardt refinement takes over: it drives the
physical window leakage below the tolerance, annihilates the decoy coupling
through the span of the nulling kernels (which keeps the projected-gain bound
|w^H omega| <= M eta valid), and then climbs the decoy gain through a
penalty-weight ladder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ris_kernel import KernelBasis, NullingWindow, beta_bar_sweep, Convention

_LADDER = (30.0, 100.0, 300.0, 1e3, 3e3, 1e4)
_NULL_WEIGHT = 1e4
_CROSS_TOL = 1e-4


def phase_project(x: np.ndarray) -> np.ndarray:
    """Element-wise phase normalization; zero entries map to 1 + 0j."""
    x = np.asarray(x, np.complex128)
    out = np.ones_like(x)
    nz = np.abs(x) > 0.0
    out[nz] = x[nz] / np.abs(x[nz])
    return out


@dataclass(frozen=True)
class SolverParams:
    """Knobs for the design solve; defaults follow the library conventions.

    ``eps_null`` is the stopping threshold on ||V^H x||^2; when None it is
    scaled as 1e-6 * M^2 at solve time so the per-angle leakage target stays
    dimensionless in M.
    """

    gamma: float = 0.5
    i_max: int = 500
    eps_null: float | None = None
    eps_reg: float = 1e-9
    refine: bool = True
    n_restarts: int = 6
    seed: int = 20177

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.i_max < 1:
            raise ValueError("i_max must be positive")
        if self.eps_null is not None and self.eps_null <= 0:
            raise ValueError("eps_null must be positive")
        if self.eps_reg <= 0:
            raise ValueError("eps_reg must be positive")

    def resolved_eps_null(self, M: int) -> float:
        return 1e-6 * M * M if self.eps_null is None else self.eps_null


@dataclass(frozen=True)
class SolveResult:
    profile: np.ndarray
    iterations: int
    residual: float
    decoy_gain: float
    converged: bool
    refined: bool
    trace_residual: np.ndarray = field(repr=False)
    trace_gain: np.ndarray = field(repr=False)
    trace_projected_residual: np.ndarray = field(repr=False)


def _lm(phi, fun_jac, max_steps):
    """Damped Gauss-Newton on a real residual function of the phases."""
    f, J = fun_jac(phi)
    cost = f @ f
    lam = 1e-4
    for _ in range(max_steps):
        JJt = J @ J.T
        eye = np.eye(J.shape[0])
        moved = False
        for _ in range(60):
            try:
                y = np.linalg.solve(JJt + lam * eye, f)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            cand = phi - J.T @ y
            fn, Jn = fun_jac(cand)
            cn = fn @ fn
            if cn < cost * (1.0 - 1e-14):
                phi, f, J, cost = cand, fn, Jn, cn
                lam = max(lam * 0.3, 1e-14)
                moved = True
                break
            lam *= 10.0
        if not moved:
            break
    return phi, cost


def _refine(basis: KernelBasis, x_pocs: np.ndarray, eps_null: float,
            params: SolverParams):
    """LM refinement: physical nulls + cross annihilation + gain ladder."""
    M, K = basis.M, basis.K
    w, U, s = basis.w, basis.U, basis.singular_values
    Vh = basis.V.conj().T
    Uh = U.conj().T
    qw = U @ (Uh @ w)                      # component of w inside span(V)
    nq = float(np.linalg.norm(qw))
    sn = (s / s[0])[:, None]
    if nq > 1e-12 * np.sqrt(M):
        base = np.vstack([sn * Uh, (qw / nq).conj()[None, :]])
    else:
        base = sn * Uh

    def vres(phi):
        return float(np.linalg.norm(Vh @ np.exp(1j * phi)) ** 2)

    def ncross(phi):
        if nq == 0.0:
            return 0.0
        return float(abs(np.vdot(qw, np.exp(1j * phi))) / nq)

    def null_fj(phi):
        x = np.exp(1j * phi)
        r = base @ x
        J = 1j * (base * x[None, :])
        return np.concatenate([r.real, r.imag]), np.vstack([J.real, J.imag])

    def pen_fj(weight):
        def fj(phi):
            x = np.exp(1j * phi)
            r = base @ x
            G = np.vdot(w, x)
            tail = np.sqrt(max(M * M - abs(G) ** 2, 1e-12))
            J = 1j * (base * x[None, :])
            dG2 = 2.0 * np.real(np.conj(G) * 1j * np.conj(w) * x)
            dtail = -dG2 / (2.0 * tail)
            return (np.concatenate([weight * r.real, weight * r.imag, [tail]]),
                    np.vstack([weight * J.real, weight * J.imag, dtail[None, :]]))
        return fj

    rng = np.random.default_rng(params.seed)
    seeds = [np.angle(x_pocs), np.angle(w)]
    seeds += [rng.uniform(-np.pi, np.pi, M) for _ in range(params.n_restarts)]
    best_phi, best_gain = None, -1.0
    for si, phi0 in enumerate(seeds):
        phi, _ = _lm(phi0, null_fj, 300)
        if vres(phi) > eps_null * 0.5 or ncross(phi) > 30 * _CROSS_TOL:
            continue
        feasible = phi.copy()
        for weight in _LADDER:
            phi, _ = _lm(phi, pen_fj(weight), 120)
        phi, _ = _lm(phi, null_fj, 120)
        if not (vres(phi) <= eps_null and ncross(phi) <= _CROSS_TOL):
            phi, _ = _lm(feasible, null_fj, 200)
        if vres(phi) <= eps_null and ncross(phi) <= 30 * _CROSS_TOL:
            gain = abs(np.vdot(w, np.exp(1j * phi)))
            if gain > best_gain:
                best_phi, best_gain = phi, gain
        if best_phi is not None and si >= 2:
            break
    if best_phi is None:
        return None
    return np.exp(1j * best_phi)


def solve_p3(basis: KernelBasis, params: SolverParams = SolverParams()) -> SolveResult:
    """Design the unit-modulus profile: null the window, maximize decoy gain."""
    M = basis.M
    eps_null = params.resolved_eps_null(M)
    if basis.K == 0:
        x = phase_project(basis.w)
        e = np.empty(0)
        return SolveResult(profile=x, iterations=0, residual=0.0,
                           decoy_gain=float(abs(np.vdot(basis.w, x))),
                           converged=True, refined=False,
                           trace_residual=e, trace_gain=e,
                           trace_projected_residual=e)
    Vh = basis.V.conj().T
    x, iters, res, tr_proj, tr_res, tr_gain, conv = _kernels.pocs_loop(
        basis.w, basis.U, Vh, params.gamma, params.i_max, eps_null)
    refined = False
    if not conv and params.refine:
        xr = _refine(basis, x, eps_null, params)
        if xr is not None:
            x = xr
            res = basis.residual(x)
            conv = res <= eps_null
            refined = True
    return SolveResult(profile=x, iterations=int(iters), residual=float(res),
                       decoy_gain=float(abs(np.vdot(basis.w, x))),
                       converged=bool(conv), refined=refined,
                       trace_residual=np.asarray(tr_res),
                       trace_gain=np.asarray(tr_gain),
                       trace_projected_residual=np.asarray(tr_proj))


def objective_p2(omega: np.ndarray, basis: KernelBasis,
                 params: SolverParams = SolverParams()) -> float:
    """Kernel-power ratio |w^H omega|^2 / (eps + sum_k |v_k^H omega|^2)."""
    omega = np.asarray(omega, np.complex128)
    num = abs(np.vdot(basis.w, omega)) ** 2
    den = params.eps_reg + float(np.linalg.norm(basis.V.conj().T @ omega) ** 2)
    return float(num / den)


def objective_p1(omega: np.ndarray, theta_fake: float, window: NullingWindow,
                 config, params: SolverParams = SolverParams()) -> float:
    """FI ratio J(theta_fake)/(eps + sum_k J(theta_k)), closed-form FI."""
    from .bounds import _fi_many, Variant
    fi_f = _fi_many(theta_fake, omega, config, Convention.FIXED_INCIDENCE,
                    Variant.CLOSED_FORM)[0]
    fi_k = _fi_many(window.angles, omega, config, Convention.FIXED_INCIDENCE,
                    Variant.CLOSED_FORM)
    return float(fi_f / (params.eps_reg + fi_k.sum()))
