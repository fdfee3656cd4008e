"""Tau-functions as Gram determinants of the deformed Gaussian weight.

tau_n^J(t) is the n-fold symmetrized integral of the squared Vandermonde
against rho_t(x) = exp(-x^2 + t1 x + t2 x^2 + t3 x^3) over J^n.  By the
Andreief identity it collapses to an n x n determinant.  Assembling that
determinant in the orthonormal Hermite-function basis instead of
monomials keeps it conditioned to n = 8 and beyond: over the full line
at t = 0 the matrix is the identity.  The basis change scales the
determinant by the exact constant

    C(n) = pi^{n/2} 2^{-n(n-1)/2} prod_{j<n} j!

which is applied analytically, so the full-line value is reproduced to
rounding.  Ratios Q_n = tau_{n+1}/tau_n and P_n = tau_{n-1}/tau_n are
formed from log-determinant differences throughout, which survives the
deep-gap underflow regime unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain import IntervalSet
from .errors import IllConditionedError, InvalidStepError
from .hermite import HermiteBasis
from .numerics import build_panels, default_truncation, validate_deformation

__all__ = [
    "TauTable",
    "tau_hankel",
    "log_tau_hankel",
    "tau_closed_form",
    "log_tau_closed_form",
    "tau_ratios",
    "build_tau_table",
    "time_derivative",
]

_ZERO_T = (0.0, 0.0, 0.0)


def tau_closed_form(n: int) -> float:
    """pi^{n/2} 2^{-n(n-1)/2} prod_{j=1}^{n-1} j!"""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"size must be a positive integer, got {n!r}")
    prod = 1
    for j in range(1, n):
        prod *= math.factorial(j)
    return math.pi ** (n / 2.0) * 2.0 ** (-n * (n - 1) / 2.0) * prod


def log_tau_closed_form(n: int) -> float:
    if n == 0:
        return 0.0
    lg = sum(math.lgamma(j + 1) for j in range(1, n))
    return (n / 2.0) * math.log(math.pi) \
        - (n * (n - 1) / 2.0) * math.log(2.0) + lg


def _weight_window(n: int, J: IntervalSet, t) -> float:
    t1, t2, _ = t
    margin = 1.0 - t2
    L = default_truncation(max(n, 1), J)
    return (L + abs(t1)) / math.sqrt(min(margin, 1.0))


@lru_cache(maxsize=8192)
def _log_gram_det(n: int, J: IntervalSet, t: tuple, points_per_panel: int) -> float:
    """ln det of G_ij = int_J phi_i phi_j exp(t1 x + t2 x^2 + t3 x^3) dx."""
    t1, t2, t3 = t
    L = _weight_window(n, J, t)
    scheme = build_panels(J, L, points_per_panel)
    x, w = scheme.x, scheme.w
    if x.size == 0:
        raise ValueError("tau-function of an empty window vanishes for n >= 1")
    tab = HermiteBasis(n - 1).table(x)
    boost = w * np.exp(t1 * x + t2 * x * x + t3 * x ** 3)
    G = (tab * boost[None, :]) @ tab.T
    sign, logdet = np.linalg.slogdet(G)
    if sign <= 0:
        raise IllConditionedError(
            "Gram matrix lost positive definiteness", determinant=0.0)
    return float(logdet)


def log_tau_hankel(n: int, J: IntervalSet, t=_ZERO_T,
                   points_per_panel: int = 48) -> float:
    """ln tau_n^J(t); n = 0 gives 0 under the tau_0 = 1 convention."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"size must be a nonnegative integer, got {n!r}")
    t = validate_deformation(t, J)
    if n == 0:
        return 0.0
    return log_tau_closed_form(n) + _log_gram_det(n, J, t, points_per_panel)


def tau_hankel(n: int, J: IntervalSet, t=_ZERO_T,
               points_per_panel: int = 48) -> float:
    return math.exp(log_tau_hankel(n, J, t, points_per_panel))


def tau_ratios(n: int, J: IntervalSet, t=_ZERO_T,
               points_per_panel: int = 48) -> tuple[float, float]:
    """(Q_n, P_n) = (tau_{n+1}/tau_n, tau_{n-1}/tau_n), log-assembled."""
    if n < 0:
        raise ValueError("size must be nonnegative")
    if n == 0:
        lt1 = log_tau_hankel(1, J, t, points_per_panel)
        return math.exp(lt1), 0.0
    lt_prev = log_tau_hankel(n - 1, J, t, points_per_panel)
    lt = log_tau_hankel(n, J, t, points_per_panel)
    lt_next = log_tau_hankel(n + 1, J, t, points_per_panel)
    return math.exp(lt_next - lt), math.exp(lt_prev - lt)


@dataclass(frozen=True)
class TauTable:
    """Values and ratios over a contiguous size range at one (J, t).

    Q maps n to tau_{n+1}/tau_n for n in [n_min, n_max - 1]; P maps n to
    tau_{n-1}/tau_n for n in [max(n_min, 1), n_max], built as exact
    reciprocals P_{n+1} = 1/Q_n.
    """

    n_min: int
    n_max: int
    J: IntervalSet
    t: tuple
    log_values: dict
    Q: dict
    P: dict

    def tau(self, n: int) -> float:
        return math.exp(self.log_values[n])


def build_tau_table(n_max: int, J: IntervalSet, t=_ZERO_T, n_min: int = 0,
                    points_per_panel: int = 48) -> TauTable:
    if not 0 <= n_min <= n_max:
        raise ValueError("need 0 <= n_min <= n_max")
    t = validate_deformation(t, J)
    logs = {n: log_tau_hankel(n, J, t, points_per_panel)
            for n in range(n_min, n_max + 1)}
    Q = {n: math.exp(logs[n + 1] - logs[n]) for n in range(n_min, n_max)}
    P = {n + 1: 1.0 / Q[n] for n in range(n_min, n_max)}
    return TauTable(n_min, n_max, J, t, logs, Q, P)


_FIRST_ORDER = {"t1", "t2"}
_SECOND_ORDER = {"t1t1", "t1t2"}


def _target_value(target: str, n: int, J: IntervalSet, t,
                  points_per_panel: int) -> float:
    if target == "log_tau":
        return log_tau_hankel(n, J, t, points_per_panel)
    if target == "Q":
        return tau_ratios(n, J, t, points_per_panel)[0]
    if target == "P":
        return tau_ratios(n, J, t, points_per_panel)[1]
    raise ValueError(f"unknown derivative target {target!r}")


def time_derivative(n: int, J: IntervalSet, which: str,
                    target: str = "log_tau", h: float | None = None,
                    points_per_panel: int = 48) -> float:
    """Richardson central difference in the deformation times at t = 0.

    which selects d/dt1, d/dt2, d^2/dt1^2, or the mixed d^2/dt1 dt2;
    target selects ln tau_n, Q_n, or P_n as the differentiated quantity.
    """
    if which not in _FIRST_ORDER | _SECOND_ORDER:
        raise ValueError(f"unknown derivative {which!r}")
    if h is None:
        h = 1e-3 if which in _FIRST_ORDER else 1e-2
    if not 1e-6 <= h <= 1e-1:
        raise InvalidStepError(f"time step {h} outside [1e-6, 1e-1]")

    def F(t1: float, t2: float) -> float:
        return _target_value(target, n, J, (t1, t2, 0.0), points_per_panel)

    def diff(s: float) -> float:
        if which == "t1":
            return (F(s, 0.0) - F(-s, 0.0)) / (2.0 * s)
        if which == "t2":
            return (F(0.0, s) - F(0.0, -s)) / (2.0 * s)
        if which == "t1t1":
            return (F(s, 0.0) - 2.0 * F(0.0, 0.0) + F(-s, 0.0)) / (s * s)
        return (F(s, s) - F(s, -s) - F(-s, s) + F(-s, -s)) / (4.0 * s * s)

    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0
