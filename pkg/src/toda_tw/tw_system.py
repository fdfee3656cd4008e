"""Endpoint resolvent quantities and their coupled differential system.

For q = (I-K)^{-1}phi and p = (I-K)^{-1}psi on the complement of J, the
endpoint values q_k, p_k together with the inner products

    u = (q, phi chi),  v = (q, psi chi),  w = (p, psi chi)

close under differentiation in the endpoints a_k.  Every endpoint
derivative below carries the orientation sign s_k from the domain
module: +1 where an interval of J opens, -1 where it closes.  The
combinations Qtilde = sqrt(n/2) - u and Ptilde = w + sqrt(n/2) obey the
first integral  sum_k s_k q_k p_k = 2 Qtilde Ptilde - n.

check_universal covers the potential-independent equations (endpoint
derivatives of q_j, u, v, w), check_gaussian the weight-specific ones,
both by central differences with one Richardson level against the
analytic right-hand sides.  integrate_tw_flow closes the single-edge
case J = (-inf, a) into a 6-dimensional ODE and carries ln det along.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .domain import IntervalSet, signed_endpoints
from .errors import InvalidStepError, StiffnessError
from .fredholm import build, kernel_pair_solutions, log_fredholm_det
from .hermite import phi_pair
from .numerics import default_truncation

__all__ = [
    "TWState",
    "compute_tw_state",
    "check_universal",
    "check_gaussian",
    "integrate_tw_flow",
    "FlowTrajectory",
]


@dataclass(frozen=True)
class TWState:
    """Endpoint data of the resolvent at a fixed (n, J).

    Arrays are indexed by the ascending finite endpoints of J.  Roff
    holds R(a_j, a_k) for j != k with zeros on the diagonal; Rdiag holds
    R(a_k, a_k).  v_cross is the second computation of v, from
    (p, phi chi), kept for the symmetry diagnostic.
    """

    n: int
    J: IntervalSet
    a: np.ndarray
    signs: np.ndarray
    q: np.ndarray
    p: np.ndarray
    Roff: np.ndarray
    Rdiag: np.ndarray
    u: float
    v: float
    w: float
    v_cross: float
    log_det: float

    @property
    def qtilde(self) -> float:
        return math.sqrt(self.n / 2.0) - self.u

    @property
    def ptilde(self) -> float:
        return self.w + math.sqrt(self.n / 2.0)

    def first_integral_residual(self) -> float:
        lhs = float(np.sum(self.signs * self.q * self.p))
        return abs(lhs - (2.0 * self.qtilde * self.ptilde - self.n))


@lru_cache(maxsize=2048)
def _compute(n: int, J: IntervalSet, points_per_panel: int, L: float) -> TWState:
    eps = signed_endpoints(J)
    if not eps:
        raise ValueError("J must have at least one finite endpoint")
    sys = build(n, J, points_per_panel, L)
    qsol, psol = kernel_pair_solutions(sys)
    a = np.array([e.value for e in eps])
    signs = np.array([float(e.sign) for e in eps])
    q = np.atleast_1d(qsol(a))
    p = np.atleast_1d(psol(a))
    dq = np.atleast_1d(qsol.deriv(a))
    dp = np.atleast_1d(psol.deriv(a))

    fvals, gvals = phi_pair(n, sys.x) if sys.size else (np.empty(0), np.empty(0))
    u = float(np.sum(sys.w * fvals * qsol.values))
    v = float(np.sum(sys.w * gvals * qsol.values))
    v_cross = float(np.sum(sys.w * fvals * psol.values))
    w = float(np.sum(sys.w * gvals * psol.values))

    m = a.size
    Roff = np.zeros((m, m))
    for j in range(m):
        for k in range(m):
            if j != k:
                Roff[j, k] = (q[j] * p[k] - p[j] * q[k]) / (a[j] - a[k])
    Rdiag = p * dq - q * dp

    for arr in (a, signs, q, p, Roff, Rdiag):
        arr.setflags(write=False)
    return TWState(n, J, a, signs, q, p, Roff, Rdiag, u, v, w, v_cross,
                   log_fredholm_det(sys))


def compute_tw_state(n: int, J: IntervalSet, points_per_panel: int = 48,
                     L: float | None = None) -> TWState:
    """Resolvent endpoint data by Nystrom solve plus interpolation.

    R(a_j, a_k) off the diagonal comes from the divided difference of
    (q, p); the diagonal from the spatial derivative p q' - q p' of the
    interpolants, which agrees with the endpoint-derivative definition
    because the domain-variation term cancels between the two products.
    """
    if L is None:
        L = default_truncation(n, J)
    return _compute(n, J, points_per_panel, float(L))


def _validate_step(J: IntervalSet, h: float) -> None:
    if not 0.0 < h:
        raise InvalidStepError(f"step must be positive, got {h}")
    gap = J.min_endpoint_gap()
    if h > gap / 4.0:
        raise InvalidStepError(
            f"step {h} too large for endpoint separation {gap}")


def _richardson(coarse: float, fine: float) -> float:
    return (4.0 * fine - coarse) / 3.0


def _endpoint_fd(n: int, J: IntervalSet, k_index: int, h: float,
                 extract, points_per_panel: int, L: float) -> float:
    """Richardson central difference of extract(state) in endpoint k.

    The truncation window is pinned to the base configuration so the
    quadrature mesh deforms smoothly with the endpoint.
    """
    def diff(step: float) -> float:
        plus = compute_tw_state(n, J.with_endpoint_moved(k_index, +step),
                                points_per_panel, L)
        minus = compute_tw_state(n, J.with_endpoint_moved(k_index, -step),
                                 points_per_panel, L)
        return (extract(plus) - extract(minus)) / (2.0 * step)

    return _richardson(diff(h), diff(h / 2.0))


def _translation_fd(n: int, J: IntervalSet, h: float, extract,
                    points_per_panel: int, L: float) -> float:
    """Richardson central difference along the all-endpoints direction."""
    def diff(step: float) -> float:
        plus = compute_tw_state(n, J.shifted(+step), points_per_panel, L)
        minus = compute_tw_state(n, J.shifted(-step), points_per_panel, L)
        return (extract(plus) - extract(minus)) / (2.0 * step)

    return _richardson(diff(h), diff(h / 2.0))


def check_universal(state: TWState, h: float = 1e-3,
                    points_per_panel: int = 48) -> dict[str, float]:
    """Residuals of the potential-independent endpoint equations.

    Keys: dq_offdiag (dq_j/da_k = s_k R_jk q_k for j != k), dp_offdiag
    (same with p), du, dv, dw (du/da_k = s_k q_k^2 and companions).
    Each residual is the max absolute mismatch between the Richardson
    finite difference and the analytic side.
    """
    n, J = state.n, state.J
    _validate_step(J, h)
    L = default_truncation(n, J)
    m = state.a.size
    s = state.signs
    res = {"dq_offdiag": 0.0, "dp_offdiag": 0.0}
    for k in range(m):
        du = _endpoint_fd(n, J, k + 1, h, lambda st: st.u, points_per_panel, L)
        dv = _endpoint_fd(n, J, k + 1, h, lambda st: st.v, points_per_panel, L)
        dw = _endpoint_fd(n, J, k + 1, h, lambda st: st.w, points_per_panel, L)
        res["du"] = max(res.get("du", 0.0), abs(du - s[k] * state.q[k] ** 2))
        res["dv"] = max(res.get("dv", 0.0),
                        abs(dv - s[k] * state.q[k] * state.p[k]))
        res["dw"] = max(res.get("dw", 0.0), abs(dw - s[k] * state.p[k] ** 2))
        for j in range(m):
            if j == k:
                continue
            dq = _endpoint_fd(n, J, k + 1, h,
                              lambda st, j=j: float(st.q[j]),
                              points_per_panel, L)
            dp = _endpoint_fd(n, J, k + 1, h,
                              lambda st, j=j: float(st.p[j]),
                              points_per_panel, L)
            res["dq_offdiag"] = max(
                res["dq_offdiag"],
                abs(dq - s[k] * state.Roff[j, k] * state.q[k]))
            res["dp_offdiag"] = max(
                res["dp_offdiag"],
                abs(dp - s[k] * state.Roff[j, k] * state.p[k]))
    return res


def check_gaussian(state: TWState, h: float = 1e-3,
                   points_per_panel: int = 48) -> dict[str, float]:
    """Residuals of the weight-specific endpoint equations.

    Keys: dq_diag and dp_diag (total endpoint derivatives of q_j, p_j),
    R_algebraic (the closed expression for R(a_j, a_j)), dR_diag (its
    endpoint derivative), dq_summed and dp_summed (translation-direction
    derivatives), first_integral (sum s_k q_k p_k - (2 Qtilde Ptilde - n)).
    """
    n, J = state.n, state.J
    _validate_step(J, h)
    L = default_truncation(n, J)
    root2n = math.sqrt(2.0 * n)
    cu = root2n - 2.0 * state.u
    cw = root2n + 2.0 * state.w
    m = state.a.size
    s, a, q, p = state.signs, state.a, state.q, state.p
    res: dict[str, float] = {}

    for j in range(m):
        cross_q = sum(s[k] * state.Roff[j, k] * q[k] for k in range(m) if k != j)
        cross_p = sum(s[k] * state.Roff[j, k] * p[k] for k in range(m) if k != j)
        cross_r = sum(s[k] * state.Roff[j, k] ** 2 for k in range(m) if k != j)
        cross_w = sum(s[k] * state.Roff[j, k] * (q[j] * p[k] - p[j] * q[k])
                      for k in range(m) if k != j)

        dq = _endpoint_fd(n, J, j + 1, h, lambda st, j=j: float(st.q[j]),
                          points_per_panel, L)
        dp = _endpoint_fd(n, J, j + 1, h, lambda st, j=j: float(st.p[j]),
                          points_per_panel, L)
        dr = _endpoint_fd(n, J, j + 1, h, lambda st, j=j: float(st.Rdiag[j]),
                          points_per_panel, L)
        res["dq_diag"] = max(res.get("dq_diag", 0.0),
                             abs(dq - (-a[j] * q[j] + cu * p[j] - cross_q)))
        res["dp_diag"] = max(res.get("dp_diag", 0.0),
                             abs(dp - (a[j] * p[j] - cw * q[j] - cross_p)))
        res["R_algebraic"] = max(
            res.get("R_algebraic", 0.0),
            abs(state.Rdiag[j] - (-2.0 * a[j] * q[j] * p[j] + cu * p[j] ** 2
                                  + cw * q[j] ** 2 + cross_w)))
        res["dR_diag"] = max(res.get("dR_diag", 0.0),
                             abs(dr - (-2.0 * q[j] * p[j] - cross_r)))

        sq = _translation_fd(n, J, h, lambda st, j=j: float(st.q[j]),
                             points_per_panel, L)
        sp = _translation_fd(n, J, h, lambda st, j=j: float(st.p[j]),
                             points_per_panel, L)
        res["dq_summed"] = max(res.get("dq_summed", 0.0),
                               abs(sq - (-a[j] * q[j] + cu * p[j])))
        res["dp_summed"] = max(res.get("dp_summed", 0.0),
                               abs(sp - (a[j] * p[j] - cw * q[j])))

    res["first_integral"] = state.first_integral_residual()
    return res


@dataclass(frozen=True)
class FlowTrajectory:
    """Sampled solution of the single-edge system, largest a first."""

    n: int
    a: np.ndarray
    q: np.ndarray
    p: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    log_det: np.ndarray
    dense: object

    def at(self, a: float) -> dict[str, float]:
        """Interpolated state at one edge position inside the a-range."""
        y = self.dense(a)
        return {"a": float(a), "q": float(y[0]), "p": float(y[1]),
                "u": float(y[2]), "v": float(y[3]), "w": float(y[4]),
                "log_det": float(y[5]), "det": math.exp(float(y[5]))}

    def first_integral_residual(self) -> float:
        root = math.sqrt(self.n / 2.0)
        qt = root - self.u
        pt = self.w + root
        return float(np.max(np.abs(-self.q * self.p
                                   - (2.0 * qt * pt - self.n))))


def integrate_tw_flow(n: int, a_start: float | None = None,
                      a_end: float = -3.0, steps: int = 121,
                      rtol: float = 1e-11) -> FlowTrajectory:
    """Integrate the J = (-inf, a) system downward from the clean regime.

    The edge starts far right of the spectrum, where q, p are the bare
    kernel functions and u = v = w = 0 up to truncation-level error, and
    moves left.  ln det accumulates alongside: its slope in a is
    R(a, a), the single-endpoint boundary value of the resolvent.
    """
    edge = math.sqrt(2.0 * n)
    if a_start is None:
        a_start = edge + 6.0
    if a_start < edge + 6.0:
        raise ValueError(f"start must sit at or beyond {edge + 6.0}")
    if a_end >= a_start:
        raise ValueError("flow runs downward: need a_end < a_start")
    if steps < 2:
        raise ValueError("need at least two output samples")
    root2n = math.sqrt(2.0 * n)

    def rhs(a, y):
        q, p, u, v, w, _ = y
        cu = root2n - 2.0 * u
        cw = root2n + 2.0 * w
        rdiag = -2.0 * a * q * p + cu * p * p + cw * q * q
        return [-a * q + cu * p,
                a * p - cw * q,
                -q * q,
                -q * p,
                -p * p,
                rdiag]

    f0, g0 = phi_pair(n, a_start)
    y0 = [f0, g0, 0.0, 0.0, 0.0, 0.0]
    grid = np.linspace(a_start, a_end, steps)
    sol = solve_ivp(rhs, (a_start, a_end), y0, method="RK45", t_eval=grid,
                    dense_output=True, rtol=rtol, atol=1e-14)
    if not sol.success:
        last = float(sol.t[-1]) if sol.t.size else a_start
        raise StiffnessError(
            f"step control failed near a = {last:.6g}", last_a=last)
    q, p, u, v, w, ld = sol.y
    return FlowTrajectory(n, grid, q, p, u, v, w, ld, sol.sol)
