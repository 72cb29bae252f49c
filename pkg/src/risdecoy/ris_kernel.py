"""RIS reflection kernels, phase profiles, and the nulling basis.

The scalar reflection response toward ``out_angle`` for illumination from
``in_angle`` is computed as ``beta = kernel_vector(out, in)^H omega``; kernel
vectors follow the element-wise form with entry m equal to
``exp(j*pi*m*(sin(in) - sin(out)))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import steering

COND_LIMIT = 1e12


class Convention(enum.Enum):
    """Which outgoing-angle convention a swept kernel evaluation uses.

    SPECULAR_PLUS_PI sweeps both arguments: beta(theta + pi, theta).
    FIXED_INCIDENCE pins the illumination at the true angle and sweeps the
    outgoing angle: beta(theta, theta_true).  The nulling basis and the decoy
    vector are built under FIXED_INCIDENCE, so experiments default to it.
    """

    SPECULAR_PLUS_PI = "specular_plus_pi"
    FIXED_INCIDENCE = "fixed_incidence"


def uniform_profile(M: int) -> np.ndarray:
    """All-ones phase profile (no phase control)."""
    return np.ones(M, np.complex128)


def validate_profile(omega: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Check unit modulus and return the profile as complex128."""
    omega = np.asarray(omega, np.complex128)
    if omega.ndim != 1:
        raise ValueError("profile must be a vector")
    err = np.abs(np.abs(omega) - 1.0).max()
    if err > tol:
        raise ValueError(f"profile entries must have unit modulus (max dev {err:.2e})")
    return omega


def kernel_vector(out_angle: float, in_angle: float, M: int) -> np.ndarray:
    """Per-element kernel vector; entry m = exp(j*pi*m*(sin in - sin out))."""
    if M < 1:
        raise ValueError(f"element count must be positive, got {M}")
    m = np.arange(M)
    return np.exp(1j * np.pi * m * (np.sin(in_angle) - np.sin(out_angle)))


def beta(out_angle: float, in_angle: float, omega: np.ndarray) -> complex:
    """Scalar reflection response kernel_vector^H @ omega."""
    omega = np.asarray(omega, np.complex128)
    ups = kernel_vector(out_angle, in_angle, omega.size)
    return complex(np.vdot(ups, omega))


def beta_bar(theta: float, omega: np.ndarray, convention: Convention,
             theta_true: float | None = None) -> complex:
    """Monostatic kernel response at hypothesis angle theta."""
    if convention is Convention.SPECULAR_PLUS_PI:
        return beta(theta + np.pi, theta, omega)
    if theta_true is None:
        raise ValueError("FIXED_INCIDENCE requires theta_true")
    return beta(theta, theta_true, omega)


def beta_bar_sweep(thetas: np.ndarray, omega: np.ndarray, convention: Convention,
                   theta_true: float | None = None) -> np.ndarray:
    """Vectorized ``beta_bar`` over a grid of angles."""
    omega = np.asarray(omega, np.complex128)
    thetas = np.asarray(thetas, float)
    m = np.arange(omega.size)
    if convention is Convention.SPECULAR_PLUS_PI:
        s_in, s_out = np.sin(thetas), np.sin(thetas + np.pi)
    else:
        if theta_true is None:
            raise ValueError("FIXED_INCIDENCE requires theta_true")
        s_in, s_out = np.full_like(thetas, np.sin(theta_true)), np.sin(thetas)
    E = np.exp(-1j * np.pi * np.outer(s_in - s_out, m))
    return E @ omega


@dataclass(frozen=True)
class NullingWindow:
    """K angles spread uniformly (endpoints included) over center +- half_width."""

    center: float
    half_width: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("window needs at least one angle")
        if self.half_width <= 0:
            raise ValueError("half width must be positive")
        if abs(self.center) + self.half_width >= np.pi / 2:
            raise ValueError("window must stay inside (-pi/2, pi/2)")

    @property
    def angles(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.center])
        return np.linspace(self.center - self.half_width,
                           self.center + self.half_width, self.count)

    def contains(self, theta: float) -> bool:
        return abs(theta - self.center) <= self.half_width


@dataclass(frozen=True)
class KernelBasis:
    """Decoy kernel, nulling kernels, and the cached null-space projector.

    ``U`` is an orthonormal basis of span(V) obtained from the SVD; it backs
    both the cached dense projector and the O(M*K) projector application used
    by the solver.  The Gram-inverse form of the projector is numerically
    useless at the conditioning of closely spaced windows, the SVD route is
    exact regardless.
    """

    w: np.ndarray
    V: np.ndarray
    theta_fake: float
    theta_true: float
    window: NullingWindow | None
    U: np.ndarray = field(repr=False)
    singular_values: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return self.w.size

    @property
    def K(self) -> int:
        return self.V.shape[1]

    @property
    def projector(self) -> np.ndarray:
        """Dense M x M orthogonal projector onto the null space of V^H."""
        return np.eye(self.M) - self.U @ self.U.conj().T

    def project(self, x: np.ndarray) -> np.ndarray:
        """Apply the null-space projector in O(M*K)."""
        return x - self.U @ (self.U.conj().T @ x)

    def residual(self, omega: np.ndarray) -> float:
        """Nulling residual ||V^H omega||^2."""
        return float(np.linalg.norm(self.V.conj().T @ omega) ** 2)

    def eta(self) -> float:
        """Normalized projected decoy strength ||P_S w|| / sqrt(M)."""
        return float(np.linalg.norm(self.project(self.w)) / np.sqrt(self.M))


def build_basis(window: NullingWindow | None, theta_fake: float, theta_true: float,
                M: int) -> KernelBasis:
    """Assemble the decoy vector, nulling matrix, and projector factorization.

    Raises ValueError when the feasibility preconditions fail: M < 2K, the
    decoy angle inside the window, duplicated window angles, or a numerically
    rank-deficient V (singular-value ratio beyond COND_LIMIT, which signals
    aliased concealment samples).
    """
    w = kernel_vector(theta_fake, theta_true, M)
    if window is None:
        return KernelBasis(w=w, V=np.zeros((M, 0), np.complex128),
                           theta_fake=theta_fake, theta_true=theta_true,
                           window=None, U=np.zeros((M, 0), np.complex128),
                           singular_values=np.zeros(0))
    K = window.count
    if M < 2 * K:
        raise ValueError(f"need M >= 2K for a feasible design, got M={M}, K={K}")
    if window.contains(theta_fake):
        raise ValueError("decoy angle lies inside the nulling window "
                         "(w in span(V) is infeasible)")
    angles = window.angles
    sines = np.sin(angles)
    if np.unique(sines).size != K:
        raise ValueError("nulling angles are aliased (duplicate sin values)")
    V = np.column_stack([kernel_vector(t, theta_true, M) for t in angles])
    U, s, _ = np.linalg.svd(V, full_matrices=False)
    if s[-1] <= 0 or s[0] / s[-1] > COND_LIMIT:
        raise ValueError("nulling matrix is numerically rank deficient; "
                         "window angles are too closely aliased")
    return KernelBasis(w=w, V=V, theta_fake=theta_fake, theta_true=theta_true,
                       window=window, U=U, singular_values=s)
