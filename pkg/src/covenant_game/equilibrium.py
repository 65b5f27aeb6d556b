"""Disclosure subgame: break-even face values and the withholding threshold."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .model import (
    DerivedConstants,
    ErrorDensity,
    InfeasibleError,
    ModelParams,
    SolverError,
    derived_constants,
    manager_payoff_default_rule,
    manager_payoff_perfect_rule,
    require_valid,
)

GRID_POINTS = 2048
BISECTION_TOL = 1e-12


@dataclass
class EquilibriumSolution:
    d1: float
    d0: float
    x_star: float
    corner: str  # "interior" or "full_disclosure"
    unique: bool
    residual_j: float
    residual_delta: float | None
    roots: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class ThresholdSolution:
    x_star: float
    corner: str
    unique: bool
    roots: list[float]


def _feasible(params: ModelParams, d: float, name: str) -> float:
    if not (params.restructure_value < d <= params.payout):
        raise InfeasibleError(
            f"{name}={d:.6g} outside (y, Y] = ({params.restructure_value:g}, {params.payout:g}]"
        )
    return d


def solve_d1(params: ModelParams) -> float:
    """Face value that breaks the lender even under the perfect rule."""
    p = params
    d1 = (p.setup_cost - 0.5 * (1.0 - p.gamma_b) * p.restructure_value) / (
        0.5 * (p.gamma_g + p.gamma_b)
    )
    return _feasible(p, d1, "D1")


def nondisclosure_premium(
    params: ModelParams, density: ErrorDensity, x_star: float, consts: DerivedConstants | None = None
) -> float:
    """Lender's expected payoff on silence, net of the error-free baseline.

    Equals ``E[v | m = silence] - (gamma_g + gamma_b)/2 * D0 - (1 - gamma_b) y / 2``;
    negative because undue optimism costs the lender more than a false alarm pays.
    """
    k = consts or derived_constants(params, density)
    p = params.info_prob
    weight = 1.0 - p + p * density.cdf(x_star)
    return (p * k.c1 * density.partial_x_moment(-1.0, x_star) + (1.0 - p) * k.c) / weight


def solve_d0(
    params: ModelParams, density: ErrorDensity, x_star: float, consts: DerivedConstants | None = None
) -> float:
    """Face value that breaks the lender even on silence, given the threshold."""
    if not -1.0 <= x_star <= 0.0:
        raise ValueError(f"x_star={x_star!r} outside [-1, 0]")
    p = params
    base = p.setup_cost - 0.5 * (1.0 - p.gamma_b) * p.restructure_value
    d0 = (base - nondisclosure_premium(p, density, x_star, consts)) / (0.5 * (p.gamma_g + p.gamma_b))
    return _feasible(p, d0, "D0")


def delta(params: ModelParams, d0: float, d1: float, x):
    """Manager's gain from disclosing error ``x`` over withholding it."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -1.0) or np.any(xa > 1.0):
        raise ValueError(f"x outside [-1, 1]: {x!r}")
    p = params
    repricing = 0.5 * (p.gamma_g + p.gamma_b) * (d0 - d1)
    shade = p.tau * (1.0 - p.kappa)
    slope = np.where(
        xa <= 0.0,
        p.private_benefit + shade * p.l_b,
        p.private_benefit - shade * p.l_g,
    )
    val = repricing + 0.5 * xa * slope
    return float(val) if np.ndim(x) == 0 else val


def threshold_residual(
    params: ModelParams, density: ErrorDensity, x_star, consts: DerivedConstants | None = None
):
    """Indifference residual ``J(x*)``; the threshold is its root on ``[-1, 0]``.

    ``J(x*)`` is the marginal type's disclosure gain scaled by the positive
    weight ``1 - p + p F(x*)`` after the silence face value is substituted in.
    """
    k = consts or derived_constants(params, density)
    p = params.info_prob
    xs = np.asarray(x_star, dtype=float)
    val = (
        p * k.c1 * density.integral_cdf(xs)
        + p * (k.c2 - k.c1) * xs * density.cdf(xs)
        + (1.0 - p) * (k.c2 * xs - k.c)
    )
    return float(val) if np.ndim(x_star) == 0 else val


def bisect(f, lo: float, hi: float, tol: float = BISECTION_TOL, f_lo: float | None = None) -> float:
    """Bisection on a sign-changing bracket until its width falls below ``tol``."""
    f_lo = f(lo) if f_lo is None else f_lo
    neg_lo = f_lo < 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == neg_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_threshold(
    params: ModelParams,
    density: ErrorDensity,
    grid_points: int = GRID_POINTS,
    tol: float = BISECTION_TOL,
) -> ThresholdSolution:
    k = derived_constants(params, density)
    J = lambda x: threshold_residual(params, density, x, k)  # noqa: E731
    grid = np.linspace(-1.0, 0.0, grid_points)
    values = np.asarray(J(grid))
    if values[-1] <= 0.0:
        raise SolverError(
            f"J(0)={values[-1]:.6g} <= 0: indifference residual has the wrong sign at zero"
        )
    increasing = bool(np.all(np.diff(values) > 0))

    signs = np.sign(values)
    roots: list[float] = [float(grid[i]) for i in np.flatnonzero(signs[1:] == 0) + 1]
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        roots.append(bisect(J, float(grid[i]), float(grid[i + 1]), tol, f_lo=float(values[i])))
    roots.sort()

    if values[0] >= 0.0:
        return ThresholdSolution(-1.0, "full_disclosure", increasing and not roots, roots)
    return ThresholdSolution(max(roots), "interior", increasing and len(roots) == 1, roots)


def solve_equilibrium(
    params: ModelParams, density: ErrorDensity, check: bool = True
) -> EquilibriumSolution:
    """Threshold, then both face values.

    ``J`` already has the silence face value substituted out, so the
    threshold is found first and ``D0`` recovered from it afterwards.
    ``check=False`` skips parameter validation; the full-disclosure corner
    is only reachable with ``L_G <= L_B``.
    """
    if check:
        require_valid(params)
    d1 = solve_d1(params)
    k = derived_constants(params, density)
    th = solve_threshold(params, density)
    d0 = solve_d0(params, density, th.x_star, k)
    res_j = abs(threshold_residual(params, density, th.x_star, k))
    res_delta = abs(delta(params, d0, d1, th.x_star)) if th.corner == "interior" else None
    return EquilibriumSolution(
        d1=d1,
        d0=d0,
        x_star=th.x_star,
        corner=th.corner,
        unique=th.unique,
        residual_j=res_j,
        residual_delta=res_delta,
        roots=th.roots,
    )


@dataclass
class BestResponseReport:
    grid_size: int
    checked: int
    violations: int
    max_violation: float
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)


def verify_best_response(
    params: ModelParams,
    density: ErrorDensity,
    eq: EquilibriumSolution,
    grid_size: int = 10001,
    exclusion: float = 1e-6,
) -> BestResponseReport:
    """Brute-force check that the threshold rule is each type's best response.

    Payoffs come straight from the date-2 payoff cells at the solved face
    values, independently of :func:`delta`.
    """
    disclose = manager_payoff_perfect_rule(params, eq.d1)
    checked = violations = 0
    worst = 0.0
    for x in np.linspace(-1.0, 1.0, grid_size):
        if abs(x - eq.x_star) <= exclusion:
            continue
        checked += 1
        gain = disclose - manager_payoff_default_rule(params, eq.d0, float(x))
        if (gain > 0) != (x > eq.x_star):
            violations += 1
            worst = max(worst, abs(gain))
    return BestResponseReport(grid_size, checked, violations, worst, violations == 0)
