"""Nystrom discretization of K_n restricted to J^c, determinants, resolvents.

The gap probability is det(I - K_n chi_{J^c}).  The operator lives on
the complement of the window J, truncated at +-L where the Gaussian
weight is dead.  One Gauss-Legendre panel per component of J^c is
spectrally convergent for this kernel (entire numerator functions over
a Gaussian), so panels map one-to-one onto components.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain import IntervalSet
from .errors import IllConditionedError
from .hermite import cd_kernel_matrix, cd_kernel_deriv_x_matrix, phi_pair, phi_pair_deriv
from .numerics import build_panels, default_truncation

__all__ = [
    "NystromSystem",
    "build",
    "fredholm_det",
    "log_fredholm_det",
    "resolve",
    "ResolventSolution",
    "resolvent_matrix",
    "kernel_pair_solutions",
]

_DET_FLOOR = 1e-12


@dataclass(frozen=True)
class NystromSystem:
    """Immutable discretization of K_n on J^c cut to (-L, L).

    ``x``/``w`` are the composite quadrature nodes and weights, ``Kmat``
    the raw kernel values K_n(x_i, x_j), ``sym`` the symmetrized
    sqrt(w_i) K_ij sqrt(w_j) whose spectrum sits in [0, 1).
    """

    n: int
    J: IntervalSet
    L: float
    points_per_panel: int
    x: np.ndarray
    w: np.ndarray
    Kmat: np.ndarray
    sym: np.ndarray

    @property
    def size(self) -> int:
        return self.x.size


@lru_cache(maxsize=128)
def build(n: int, J: IntervalSet, points_per_panel: int = 48,
          L: float | None = None) -> NystromSystem:
    """Discretize K_n chi_{J^c} on one panel per complement component."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"matrix size must be a positive integer, got {n!r}")
    if L is None:
        L = default_truncation(n, J)
    scheme = build_panels(J.complement(), L, points_per_panel)
    x, w = scheme.x, scheme.w
    if x.size:
        Kmat = cd_kernel_matrix(n, x, x)
        rw = np.sqrt(w)
        sym = rw[:, None] * Kmat * rw[None, :]
        sym = 0.5 * (sym + sym.T)
    else:
        Kmat = np.empty((0, 0))
        sym = Kmat
    for arr in (x, w, Kmat, sym):
        arr.setflags(write=False)
    return NystromSystem(n, J, float(L), points_per_panel, x, w, Kmat, sym)


def log_fredholm_det(sys: NystromSystem) -> float:
    """ln det(I - K) through whichever factorization stays accurate.

    Straight LU loses digits once an eigenvalue of K approaches 1, so
    deep in the gap regime the determinant is reassembled from the
    symmetric spectrum as sum log(1 - lambda_i).
    """
    if sys.size == 0:
        return 0.0
    lam = np.linalg.eigvalsh(sys.sym)
    if lam.max() >= 1.0:
        raise IllConditionedError(
            "discretized operator reached the singular limit", determinant=0.0)
    if lam.max() > 0.5:
        return float(np.sum(np.log1p(-lam)))
    sign, logdet = np.linalg.slogdet(np.eye(sys.size) - sys.sym)
    if sign <= 0:
        raise IllConditionedError(
            "determinant lost positivity in factorization", determinant=0.0)
    return float(logdet)


def fredholm_det(sys: NystromSystem) -> float:
    """det(I - K_n chi_{J^c}) = P(all n eigenvalues in J)."""
    import math
    return math.exp(log_fredholm_det(sys))


@dataclass
class ResolventSolution:
    """Solution f of (I - K)f = g with its Nystrom interpolant.

    ``values`` holds f at the quadrature nodes.  Off-node evaluation
    re-applies the equation: f(x) = g(x) + sum_j w_j K(x, x_j) f_j,
    which inherits quadrature accuracy everywhere, endpoints included.
    """

    sys: NystromSystem
    g: object
    values: np.ndarray
    g_deriv: object = None

    def __call__(self, x):
        pts = np.atleast_1d(np.asarray(x, dtype=float))
        base = np.asarray(self.g(pts), dtype=float)
        if self.sys.size:
            Krow = cd_kernel_matrix(self.sys.n, pts, self.sys.x)
            base = base + Krow @ (self.sys.w * self.values)
        return float(base[0]) if np.isscalar(x) else base

    def deriv(self, x):
        """f'(x) from the differentiated interpolant (needs g_deriv)."""
        if self.g_deriv is None:
            raise ValueError("no derivative available for the right-hand side")
        pts = np.atleast_1d(np.asarray(x, dtype=float))
        base = np.asarray(self.g_deriv(pts), dtype=float)
        if self.sys.size:
            dKrow = cd_kernel_deriv_x_matrix(self.sys.n, pts, self.sys.x)
            base = base + dKrow @ (self.sys.w * self.values)
        return float(base[0]) if np.isscalar(x) else base


def resolve(sys: NystromSystem, g, g_deriv=None) -> ResolventSolution:
    """Solve (I - K)f = g on the nodes; g must be vectorized."""
    det = fredholm_det(sys)
    if det <= _DET_FLOOR:
        raise IllConditionedError(
            f"resolvent solve rejected at determinant {det:.3e}",
            determinant=det)
    if sys.size == 0:
        values = np.empty(0)
    else:
        M = np.eye(sys.size) - sys.Kmat * sys.w[None, :]
        values = np.linalg.solve(M, np.asarray(g(sys.x), dtype=float))
    return ResolventSolution(sys, g, values, g_deriv)


def resolvent_matrix(sys: NystromSystem) -> np.ndarray:
    """Grid matrix of R = K(I - K)^{-1}, for the operator-identity check."""
    if sys.size == 0:
        return np.empty((0, 0))
    A = sys.Kmat * sys.w[None, :]
    return np.linalg.solve(np.eye(sys.size) - A, A)


def kernel_pair_solutions(sys: NystromSystem):
    """Resolvent images of the kernel numerator pair (phi, psi).

    Returns (q, p) with q = (I-K)^{-1} phi and p = (I-K)^{-1} psi, both
    carrying derivative interpolants.
    """
    n = sys.n
    q = resolve(sys, lambda t: phi_pair(n, t)[0],
                g_deriv=lambda t: phi_pair_deriv(n, t)[0])
    p = resolve(sys, lambda t: phi_pair(n, t)[1],
                g_deriv=lambda t: phi_pair_deriv(n, t)[1])
    return q, p
