"""Exact solver for the per-row hierarchy-constrained convex program.

One row couples a main contrast w with its vector z of interaction
contrasts through

    minimize   1/2 (w - (b+ - b-))^2 + 1/2 ||z - theta||^2
               + lam (b+ + b-) + lam ||theta||_1
    subject to ||theta||_1 <= b+ + b-,   b+ >= 0,  b- >= 0.

The solution is piecewise linear in lam and falls into four structural
cases separated by knot values; all knots and the Case I(ii) dual value
alpha are roots of piecewise-linear functions of the sorted |z|, so
everything here is computed by exact breakpoint scans, never by iterative
root finding. Each solve returns the primal solution together with a dual
certificate whose eight Karush-Kuhn-Tucker residual lines are checkable to
near machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BIG_MAIN = "big_main"
MODERATE = "moderate"
BIG_INTERACTION = "big_interaction"


def soft_threshold(x, t):
    """Sign-preserving shrinkage of x by t >= 0."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


class _RowScan:
    """Sorted magnitudes of z with prefix sums, for exact segment scans."""

    __slots__ = ("asc", "csum", "uniq", "l1", "zinf")

    def __init__(self, z):
        az = np.abs(np.asarray(z, dtype=np.float64).ravel())
        self.asc = np.sort(az)
        desc = self.asc[::-1]
        self.csum = np.concatenate(([0.0], np.cumsum(desc)))
        self.l1 = float(self.csum[-1])
        self.zinf = float(desc[0]) if az.size else 0.0
        self.uniq = np.unique(az)

    def count_above(self, t: float) -> int:
        return int(self.asc.size - np.searchsorted(self.asc, t, side="right"))

    def active_sum(self, m: int) -> float:
        return float(self.csum[m])

    def l1_soft(self, t: float) -> float:
        """||soft_threshold(z, t)||_1 evaluated exactly."""
        m = self.count_above(t)
        return float(self.csum[m] - m * t)


@dataclass(frozen=True)
class Knots:
    """Regime and transition values of one row.

    lam1/lam2 bound the interval where the solution is Case I(i); they are
    finite iff ||z||_inf <= |w|. lam3 is the Case II boundary, finite iff
    ||z||_1 >= |w| > 0 (+inf otherwise, including the whole w = 0 line so
    that the dispatch below stays total). lam4 = (|w| + ||z||_inf)/2 is
    where a big-interaction row becomes all zero.
    """

    lam1: float
    lam2: float
    lam3: float
    lam4: float
    regime: str


def _crossing_f1(scan: _RowScan, W: float) -> float:
    # smallest lam with ||S(z, lam)||_1 + lam <= W; needs zinf <= W < l1
    prev = 0.0
    for u in scan.uniq:
        if u <= 0.0:
            continue
        if scan.l1_soft(u) + u <= W:
            m = scan.count_above(prev)
            return (scan.active_sum(m) - W) / (m - 1)
        prev = u
    raise AssertionError("no crossing found; preconditions violated")


def _crossing_f2(scan: _RowScan, W: float) -> float:
    # largest lam with ||S(z, 2 lam)||_1 >= W; needs 0 < W <= l1
    prev = 0.0
    for u in scan.uniq:
        if u <= 0.0:
            continue
        if scan.l1_soft(u) < W:
            m = scan.count_above(prev)
            return (scan.active_sum(m) - W) / m / 2.0
        prev = u
    raise AssertionError("no crossing found; preconditions violated")


def compute_knots(w: float, z) -> Knots:
    """Classify the row and locate its structural transition values."""
    scan = _RowScan(z)
    W = abs(float(w))
    if W < scan.zinf:
        regime = BIG_INTERACTION
    elif scan.l1 < W:
        regime = BIG_MAIN
    else:
        regime = MODERATE
    lam4 = 0.5 * (W + scan.zinf)
    if scan.zinf <= W:
        lam2 = W
        lam1 = 0.0 if scan.l1 <= W else _crossing_f1(scan, W)
    else:
        lam1 = math.inf
        lam2 = math.inf
    if W == 0.0 or scan.l1 < W:
        lam3 = math.inf
    else:
        lam3 = _crossing_f2(scan, W)
    return Knots(lam1, lam2, lam3, lam4, regime)


def solve_alpha(w: float, z, lam: float) -> float:
    """Exact root of f(a) = ||S(z, lam + a)||_1 - |w| + lam - a on the
    interval (max(0, lam - |w|), lam], the dual value of the hierarchy
    constraint in Case I(ii).

    Found by scanning the breakpoints of t -> ||S(z, t)||_1 - t, which is
    strictly decreasing, so the root is unique whenever it exists.
    """
    scan = _RowScan(z)
    W = abs(float(w))
    lam = float(lam)
    tau = W - 2.0 * lam
    if scan.l1 < tau:
        raise ValueError("lambda outside the admissible range for this case")
    prev = 0.0
    t_star = None
    for u in scan.uniq:
        if u <= 0.0:
            continue
        if scan.l1_soft(u) - u <= tau:
            m = scan.count_above(prev)
            t_star = (scan.active_sum(m) - tau) / (m + 1)
            break
        prev = u
    if t_star is None:
        # beyond the largest magnitude the map is t -> -t
        t_star = -tau
    alpha = t_star - lam
    lo = max(0.0, lam - W)
    slack = 1e-9 * max(1.0, lam, W)
    if alpha < lo - slack or alpha > lam + slack:
        raise ValueError("lambda outside the admissible range for this case")
    return float(min(max(alpha, lo), lam))


@dataclass(frozen=True)
class RowSolution:
    """Primal solution of one row at one penalty value."""

    beta_plus: float
    beta_minus: float
    theta: np.ndarray
    case_label: str

    @property
    def beta(self) -> float:
        return self.beta_plus - self.beta_minus

    @property
    def is_zero(self) -> bool:
        return (
            self.beta_plus == 0.0
            and self.beta_minus == 0.0
            and not np.any(self.theta)
        )


@dataclass(frozen=True)
class KktCertificate:
    """Dual multipliers and the eight named stationarity/feasibility
    residual lines; `max_residual` is their max absolute value."""

    alpha: float
    gamma_plus: float
    gamma_minus: float
    subgradient: np.ndarray
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def row_objective(w: float, z, lam: float, beta_plus: float, beta_minus: float, theta) -> float:
    z = np.asarray(z, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    fit_main = 0.5 * (w - (beta_plus - beta_minus)) ** 2
    fit_int = 0.5 * float(((z - theta) ** 2).sum())
    return fit_main + fit_int + lam * (beta_plus + beta_minus) + lam * float(
        np.abs(theta).sum()
    )


def kkt_residual_lines(
    w: float, z, lam: float, solution: RowSolution, certificate: KktCertificate
) -> dict:
    """Evaluate all eight optimality lines for a (solution, certificate)
    pair; every entry of the returned dict should be ~0 at an optimum."""
    z = np.asarray(z, dtype=np.float64)
    bp, bm, theta = solution.beta_plus, solution.beta_minus, solution.theta
    alpha = certificate.alpha
    gp, gm = certificate.gamma_plus, certificate.gamma_minus
    s = certificate.subgradient
    diff = bp - bm - w
    l1_theta = float(np.abs(theta).sum())
    t_eff = lam + alpha
    stat_theta = theta - z + t_eff * s
    return {
        "stationarity_beta_plus": abs(diff + lam - gp - alpha),
        "stationarity_beta_minus": abs(-diff + lam - gm - alpha),
        "stationarity_theta": float(np.max(np.abs(stat_theta))) if z.size else 0.0,
        "complementarity_gamma_plus": abs(gp * bp),
        "complementarity_gamma_minus": abs(gm * bm),
        "complementarity_alpha": abs(alpha * (l1_theta - bp - bm)),
        "primal_feasibility": max(l1_theta - bp - bm, -bp, -bm, 0.0),
        "dual_feasibility": max(
            -gp,
            -gm,
            -alpha,
            (float(np.max(np.abs(s))) - 1.0) if z.size else 0.0,
            0.0,
        ),
    }


def kkt_residuals(
    w: float, z, lam: float, solution: RowSolution, certificate: KktCertificate
) -> float:
    return max(kkt_residual_lines(w, z, lam, solution, certificate).values())


def _subgradient(z: np.ndarray, theta: np.ndarray, t_eff: float) -> np.ndarray:
    # exact sign on active coordinates, z/t on the rest (keeps |s| <= 1)
    if t_eff > 0.0:
        s = z / t_eff
    else:
        s = np.zeros_like(z)
    active = theta != 0.0
    s[active] = np.sign(z[active])
    return s


def solve_row(w: float, z, lam: float) -> tuple[RowSolution, KktCertificate]:
    """Closed-form solution of one row's program at penalty lam >= 0.

    Dispatches on the regime and knots: Case III (everything zero), Case
    I(i) (main effect alone, untied), Case I(ii) (hierarchy constraint
    tight, alpha > 0), Case II (both signed mains positive, carrying an
    interaction bundle larger than the main contrast).
    """
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    z = np.asarray(z, dtype=np.float64).ravel()
    w = float(w)
    lam = float(lam)
    W = abs(w)
    knots = compute_knots(w, z)
    zinf = float(np.max(np.abs(z))) if z.size else 0.0

    zero_from = knots.lam4 if knots.regime == BIG_INTERACTION else W
    if lam >= zero_from:
        case = "III"
        alpha = max(0.0, zinf - lam)
        bp = bm = 0.0
        theta = np.zeros_like(z)
        gp = max(0.0, lam - W - alpha)
        gm = lam + W - alpha
    elif knots.regime != BIG_INTERACTION and lam >= knots.lam1:
        case = "I(i)"
        alpha = 0.0
        bp = W - lam
        bm = 0.0
        theta = soft_threshold(z, lam)
        gp = 0.0
        gm = 2.0 * lam
    elif knots.regime == BIG_MAIN or lam >= knots.lam3:
        case = "I(ii)"
        alpha = solve_alpha(w, z, lam)
        bp = max(0.0, W - lam + alpha)
        bm = 0.0
        theta = soft_threshold(z, lam + alpha)
        gp = 0.0
        gm = max(0.0, 2.0 * (lam - alpha))
    else:
        case = "II"
        alpha = lam
        theta = soft_threshold(z, 2.0 * lam)
        l1_theta = float(np.abs(theta).sum())
        bp = 0.5 * (l1_theta + W)
        bm = max(0.0, 0.5 * (l1_theta - W))
        gp = 0.0
        gm = 0.0

    s = _subgradient(z, theta, lam + alpha)
    if w < 0.0:
        bp, bm = bm, bp
        gp, gm = gm, gp
    solution = RowSolution(bp, bm, theta, case)
    certificate = KktCertificate(alpha, gp, gm, s, {})
    lines = kkt_residual_lines(w, z, lam, solution, certificate)
    certificate = KktCertificate(alpha, gp, gm, s, lines)
    return solution, certificate


def solve_path(w: float, z, lambdas) -> list[tuple[float, RowSolution, KktCertificate]]:
    """Solve one row over a penalty grid (any order); returns
    (lam, solution, certificate) triples in the given order."""
    out = []
    for lam in np.asarray(lambdas, dtype=np.float64).ravel():
        solution, certificate = solve_row(w, z, float(lam))
        out.append((float(lam), solution, certificate))
    return out
