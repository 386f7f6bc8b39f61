"""Brute-force verification oracles for the row solver and its statistics.

Everything here minimizes the row objective directly, sharing only the
objective definition with the closed-form solver, never its solution
formulas. The key reduction: at any optimum theta = soft_threshold(z, t)
for some effective threshold t in [lam, 2 lam], and for fixed theta the
best (b+, b-) pair is determined by s = max(||theta||_1, max(0, |w| - lam))
and d = clamp(w, -s, s) via b+ = (s + d)/2, b- = (s - d)/2. The objective
restricted to t is piecewise quadratic with breakpoints at the sorted |z|,
so enumerating segment minimizers, breakpoints, piece-switch points, and an
optional dense alpha grid finds the global minimum exactly. An alternating
exact block-minimization pass can then only improve the objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .solver import RowSolution, row_objective, soft_threshold


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


class _RowOracle:
    """Exact evaluation of the t-restricted objective for one row."""

    def __init__(self, w: float, z, lam: float):
        self.w = float(w)
        self.lam = float(lam)
        self.z = np.asarray(z, dtype=np.float64).ravel()
        az = np.abs(self.z)
        self.asc = np.sort(az)
        desc = self.asc[::-1]
        self.csum = np.concatenate(([0.0], np.cumsum(desc)))
        self.sqsum = np.concatenate(([0.0], np.cumsum(desc**2)))
        self.total_sq = float(self.sqsum[-1])
        self.W = abs(self.w)
        self.floor = max(0.0, self.W - self.lam)  # lower bound on b+ + b-

    def objective_at(self, t: np.ndarray) -> np.ndarray:
        """Row objective minimized over everything except t = lam + alpha."""
        t = np.asarray(t, dtype=np.float64)
        m = self.asc.size - np.searchsorted(self.asc, t.ravel(), side="right")
        m = m.reshape(t.shape)
        active_sum = self.csum[m]
        l1 = active_sum - m * t
        fit_int = 0.5 * ((self.total_sq - self.sqsum[m]) + m * t * t)
        s = np.maximum(l1, self.floor)
        d = np.minimum(self.W, s)
        return (
            0.5 * (self.W - d) ** 2
            + fit_int
            + self.lam * s
            + self.lam * l1
        )

    def candidates(self) -> np.ndarray:
        """Every point where the t-restricted objective can attain its
        minimum on [lam, 2 lam]: endpoints, breakpoints, per-segment
        quadratic vertices, and the piece-switch points of s and d."""
        lam, W = self.lam, self.W
        lo, hi = lam, 2.0 * lam
        pts = [lo, hi]
        pts.extend(v for v in self.asc if lo < v < hi)
        counts = np.arange(self.asc.size + 1)
        sums = self.csum[counts]
        # vertex of 1/2 (W - (A - m t))^2 + 1/2 m t^2 + ... per segment
        verts = (2.0 * lam + sums - W) / (counts + 1)
        pts.extend(verts.tolist())
        # switch points where ||theta||_1 crosses the floor or |w|
        nz = counts[1:]
        for level in (self.floor, W):
            pts.extend(((self.csum[nz] - level) / nz).tolist())
        arr = np.clip(np.asarray(pts, dtype=np.float64), lo, hi)
        return np.unique(arr)

    def solution_from_t(self, t: float) -> tuple[float, float, np.ndarray]:
        theta = soft_threshold(self.z, t)
        s = max(float(np.abs(theta).sum()), self.floor)
        d = _clamp(self.w, -s, s)
        return 0.5 * (s + d), 0.5 * (s - d), theta

    def budget_threshold(self, budget: float) -> float:
        """Smallest extra shrinkage mu >= 0 with ||S(z, lam+mu)||_1 <= budget."""
        if self.csum[self.asc.size] == 0.0:
            return 0.0
        t0 = self.lam
        m = self.asc.size - int(np.searchsorted(self.asc, t0, side="right"))
        if self.csum[m] - m * t0 <= budget:
            return 0.0
        # walk breakpoints above lam until the l1 norm drops to the budget
        uniq = np.unique(self.asc[self.asc > t0])
        prev = t0
        for u in uniq:
            m = self.asc.size - int(np.searchsorted(self.asc, u, side="right"))
            if self.csum[m] - m * u <= budget:
                m_seg = self.asc.size - int(
                    np.searchsorted(self.asc, prev, side="right")
                )
                return (self.csum[m_seg] - budget) / m_seg - t0
            prev = u
        raise AssertionError("budget threshold not found")

    def refine(
        self, bp: float, bm: float, theta: np.ndarray, rounds: int = 3
    ) -> tuple[float, float, np.ndarray]:
        """Alternating exact block minimization; never increases the objective."""
        best = (bp, bm, theta)
        best_obj = row_objective(self.w, self.z, self.lam, bp, bm, theta)
        for _ in range(rounds):
            bp, bm, theta = best
            s = max(float(np.abs(theta).sum()), self.floor)
            d = _clamp(self.w, -s, s)
            bp, bm = 0.5 * (s + d), 0.5 * (s - d)
            mu = self.budget_threshold(bp + bm)
            theta = soft_threshold(self.z, self.lam + mu)
            obj = row_objective(self.w, self.z, self.lam, bp, bm, theta)
            if obj < best_obj:
                best, best_obj = (bp, bm, theta), obj
            else:
                break
        return best


def _pattern_label(bp: float, bm: float, theta: np.ndarray) -> str:
    scale = max(1.0, bp, bm, float(np.abs(theta).max()) if theta.size else 0.0)
    tol = 1e-9 * scale
    l1 = float(np.abs(theta).sum())
    if bp <= tol and bm <= tol and l1 <= tol:
        return "III"
    if bp > tol and bm > tol:
        return "II"
    if abs(l1 - (bp + bm)) <= tol:
        return "I(ii)"
    return "I(i)"


def oracle_solve_row(
    w: float, z, lam: float, alpha_step: float | None = None
) -> tuple[RowSolution, float]:
    """Global minimizer of one row's objective by direct search.

    alpha_step adds a dense grid over t = lam + alpha (default resolution
    1e-5 * lam) on top of the exact candidate set; pass 0 to disable it.
    Returns the solution and its objective value.
    """
    oracle = _RowOracle(w, z, lam)
    cands = oracle.candidates()
    if alpha_step is None:
        alpha_step = 1e-5 * oracle.lam
    if alpha_step and alpha_step > 0.0 and oracle.lam > 0.0:
        dense = np.arange(oracle.lam, 2.0 * oracle.lam, alpha_step)
        cands = np.unique(np.concatenate([cands, dense]))
    if cands.size == 0:
        cands = np.asarray([oracle.lam])
    values = oracle.objective_at(cands)
    t_best = float(cands[int(np.argmin(values))])
    bp, bm, theta = oracle.solution_from_t(t_best)
    bp, bm, theta = oracle.refine(bp, bm, theta)
    obj = row_objective(w, z, lam, bp, bm, theta)
    solution = RowSolution(bp, bm, theta, _pattern_label(bp, bm, theta))
    return solution, obj


def oracle_entry_points(
    w: float, z, grid_resolution: float = 1e-3, lam_top: float | None = None
) -> tuple[float, np.ndarray, np.ndarray]:
    """Entry points detected by sweeping a descending penalty grid.

    The grid covers (0, max(|w|, ||z||_inf) + 1] at the given resolution.
    For each grid value the t-restricted objective is minimized exactly
    (vectorized across the whole grid), and an effect's entry is the
    largest grid value at which it is nonzero (0.0 if it never is).
    Returns (main entry, per-interaction entries, the grid).
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    az = np.abs(z)
    W = abs(float(w))
    zinf = float(az.max()) if az.size else 0.0
    if lam_top is None:
        lam_top = max(W, zinf) + 1.0
    lams = np.arange(lam_top, 0.0, -grid_resolution)
    n = lams.size

    asc = np.sort(az)
    desc = asc[::-1]
    csum = np.concatenate(([0.0], np.cumsum(desc)))
    sqsum = np.concatenate(([0.0], np.cumsum(desc**2)))
    total_sq = float(sqsum[-1])
    m_all = asc.size

    lo = lams
    hi = 2.0 * lams
    floor = np.maximum(0.0, W - lams)

    cols = [lo, hi]
    counts = np.arange(m_all + 1, dtype=np.float64)
    sums = csum[: m_all + 1]
    for i in range(m_all + 1):
        cols.append((2.0 * lams + sums[i] - W) / (counts[i] + 1.0))
    for i in range(1, m_all + 1):
        cols.append((sums[i] - floor) / counts[i])
        cols.append(np.full(n, (sums[i] - W) / counts[i]))
    for v in asc:
        cols.append(np.full(n, float(v)))
    T = np.clip(np.stack(cols, axis=1), lo[:, None], hi[:, None])

    m = m_all - np.searchsorted(asc, T.ravel(), side="right").reshape(T.shape)
    A = csum[m]
    l1 = A - m * T
    fit_int = 0.5 * ((total_sq - sqsum[m]) + m * T * T)
    s = np.maximum(l1, floor[:, None])
    d = np.minimum(W, s)
    obj = 0.5 * (W - d) ** 2 + fit_int + lams[:, None] * s + lams[:, None] * l1

    best = np.argmin(obj, axis=1)
    t_hat = np.take_along_axis(T, best[:, None], axis=1).ravel()
    s_hat = np.take_along_axis(s, best[:, None], axis=1).ravel()

    beta_on = s_hat > 0.0
    nu = float(lams[beta_on].max()) if beta_on.any() else 0.0
    theta_on = az[None, :] > t_hat[:, None]
    nu_vec = np.where(
        theta_on.any(axis=0),
        lams[np.argmax(theta_on, axis=0)] if n else 0.0,
        0.0,
    )
    return nu, np.asarray(nu_vec, dtype=np.float64), lams


def uniqueness_probe(
    w: float,
    z,
    lam: float,
    solution: RowSolution,
    trials: int = 50,
    seed: int = 0,
) -> tuple[bool, dict | None]:
    """Check that feasible random perturbations never beat the solution.

    Perturbs (b+, b-, theta) along random directions with radii up to 1e-3,
    projects back to the feasible set, and requires the objective not to
    drop; beyond distance 1e-6 it must strictly increase. Returns
    (passed, witness), the witness describing the first violating point.
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    rng = np.random.default_rng([seed, 977])
    bp0, bm0 = solution.beta_plus, solution.beta_minus
    theta0 = np.asarray(solution.theta, dtype=np.float64)
    obj0 = row_objective(w, z, lam, bp0, bm0, theta0)
    for trial in range(trials):
        direction = rng.standard_normal(z.size + 2)
        direction /= max(float(np.linalg.norm(direction)), 1e-12)
        radius = 1e-3 * 10.0 ** rng.uniform(-2.0, 0.0)
        bp = max(0.0, bp0 + radius * direction[0])
        bm = max(0.0, bm0 + radius * direction[1])
        theta = theta0 + radius * direction[2:]
        l1 = float(np.abs(theta).sum())
        budget = bp + bm
        if l1 > budget:
            theta = theta * (budget / l1 if l1 > 0.0 else 0.0)
        dist = max(
            abs(bp - bp0),
            abs(bm - bm0),
            float(np.max(np.abs(theta - theta0))) if z.size else 0.0,
        )
        gap = row_objective(w, z, lam, bp, bm, theta) - obj0
        if gap < -1e-12 * max(1.0, abs(obj0)) or (dist > 1e-6 and gap <= 0.0):
            return False, {
                "trial": trial,
                "distance": dist,
                "objective_gap": gap,
                "beta_plus": bp,
                "beta_minus": bm,
            }
    return True, None


@dataclass
class OracleReport:
    """Aggregate result of a randomized closed-form vs brute-force check."""

    instances: int
    seed: int
    grid_resolution: float
    max_entry_gap: float = 0.0
    max_coordinate_gap: float = 0.0
    max_objective_gap: float = 0.0
    max_kkt_residual: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "seed": self.seed,
            "grid_resolution": self.grid_resolution,
            "max_entry_gap": self.max_entry_gap,
            "max_coordinate_gap": self.max_coordinate_gap,
            "max_objective_gap": self.max_objective_gap,
            "max_kkt_residual": self.max_kkt_residual,
            "failures": self.failures,
            "passed": self.passed,
        }


def run_oracle_check(
    instances: int = 1000,
    seed: int = 0,
    grid_resolution: float = 1e-3,
    entry_tolerance: float = 1e-3,
    kkt_tolerance: float = 1e-10,
    objective_tolerance: float = 1e-9,
) -> OracleReport:
    """Random rows (1 to 10 interactions, contrasts ~ N(0, 2)): solve each
    by the closed form and by brute force, compare coordinates, objective,
    KKT residual, and grid-detected entry points against the formulas."""
    from .solver import solve_row
    from .stats import lambda_hat_interactions, lambda_hat_main

    report = OracleReport(instances, seed, grid_resolution)
    for i in range(instances):
        rng = np.random.default_rng([seed, i])
        m = int(rng.integers(1, 11))
        w = float(rng.standard_normal() * 2.0)
        z = rng.standard_normal(m) * 2.0
        scale = max(abs(w), float(np.max(np.abs(z))))
        lam = float(rng.uniform(0.01, 1.0) * (scale + 0.5))

        solution, certificate = solve_row(w, z, lam)
        kkt = certificate.max_residual
        oracle_sol, oracle_obj = oracle_solve_row(w, z, lam)
        closed_obj = row_objective(
            w, z, lam, solution.beta_plus, solution.beta_minus, solution.theta
        )
        coord_gap = max(
            abs(solution.beta_plus - oracle_sol.beta_plus),
            abs(solution.beta_minus - oracle_sol.beta_minus),
            float(np.max(np.abs(solution.theta - oracle_sol.theta))),
        )
        obj_gap = closed_obj - oracle_obj

        nu_hat = lambda_hat_main(w, z)
        nu_vec_hat = lambda_hat_interactions(w, z)
        nu_obs, nu_vec_obs, _ = oracle_entry_points(w, z, grid_resolution)
        entry_gap = max(
            abs(nu_hat - nu_obs), float(np.max(np.abs(nu_vec_hat - nu_vec_obs)))
        )

        report.max_entry_gap = max(report.max_entry_gap, entry_gap)
        report.max_coordinate_gap = max(report.max_coordinate_gap, coord_gap)
        report.max_objective_gap = max(report.max_objective_gap, obj_gap)
        report.max_kkt_residual = max(report.max_kkt_residual, kkt)
        if (
            entry_gap > entry_tolerance
            or kkt > kkt_tolerance
            or obj_gap > objective_tolerance
        ):
            report.failures.append(
                {
                    "instance": i,
                    "w": w,
                    "z": z.tolist(),
                    "lam": lam,
                    "entry_gap": entry_gap,
                    "kkt_residual": kkt,
                    "objective_gap": obj_gap,
                }
            )
    return report
