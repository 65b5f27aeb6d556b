"""Information-acquisition effort: first-best and equilibrium levels.

Effort cost is quadratic, ``c(p) = cost_scale * p**2 / 2``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .equilibrium import EquilibriumSolution, bisect, solve_equilibrium
from .model import (
    ErrorDensity,
    ModelParams,
    SolverError,
    derived_constants,
    manager_payoff_default_rule,
    manager_payoff_perfect_rule,
)

EDGE = 1e-6
EFFORT_TOL = 1e-10
IDENTITY_TOL = 1e-9
SCAN_POINTS = 33


def cost(params: ModelParams, p: float) -> float:
    return 0.5 * params.cost_scale * p * p


def marginal_cost(params: ModelParams, p):
    return params.cost_scale * p


def first_best_surplus(params: ModelParams) -> float:
    """Total surplus when the state is contracted on without error."""
    p = params
    return 0.5 * (p.gamma_g * p.payout + p.private_benefit) + 0.5 * (
        p.gamma_b * p.payout + (1.0 - p.gamma_b) * p.restructure_value
    )


def renegotiation_loss(params: ModelParams, density: ErrorDensity) -> float:
    """Expected surplus burned by renegotiating around an uncorrected error."""
    return 0.5 * params.kappa * (params.l_g + params.l_b) * density.partial_x_moment(0.0, 1.0)


def first_best_effort(params: ModelParams, density: ErrorDensity) -> float:
    p_fb = renegotiation_loss(params, density) / params.cost_scale
    if not 0.0 < p_fb < 1.0:
        raise SolverError(f"non-interior first-best effort p_fb={p_fb:.6g}; raise cost_scale")
    return p_fb


@dataclass
class ExpectedUtilities:
    u_uninformed: float
    u_withhold_avg: float
    u_disclose: float
    u_uninformed_direct: float
    lender_uninformed: float

    def as_dict(self) -> dict:
        return asdict(self)


def expected_utilities(
    params: ModelParams, density: ErrorDensity, eq: EquilibriumSolution
) -> ExpectedUtilities:
    """Manager's expected payoff by information event at a solved subgame.

    ``u_withhold_avg`` is the integral of the withholding payoff over the
    withheld region (unnormalised).  The uninformed payoff is computed twice,
    via the surplus decomposition and by direct integration of table payoffs,
    and the two must agree.
    """
    p = params
    k = derived_constants(p, density)
    w_fb = first_best_surplus(p)
    withhold = lambda x: manager_payoff_default_rule(p, eq.d0, x)  # noqa: E731

    lender_unin = 0.5 * (p.gamma_g + p.gamma_b) * eq.d0 + 0.5 * (1.0 - p.gamma_b) * p.restructure_value + k.c
    u_unin = w_fb - renegotiation_loss(p, density) - lender_unin
    u_direct = density.integrate(withhold, -1.0, 1.0)
    if abs(u_unin - u_direct) > IDENTITY_TOL:
        raise SolverError(
            f"uninformed payoff mismatch: decomposition {u_unin:.12g} vs direct {u_direct:.12g}"
        )
    return ExpectedUtilities(
        u_uninformed=u_unin,
        u_withhold_avg=density.integrate(withhold, -1.0, eq.x_star),
        u_disclose=w_fb - p.setup_cost,
        u_uninformed_direct=u_direct,
        lender_uninformed=lender_unin,
    )


def manager_expected_payoff(
    params: ModelParams, density: ErrorDensity, eq: EquilibriumSolution, utils: ExpectedUtilities | None = None
) -> float:
    """Gross of effort cost, at the effort level ``params.info_prob``."""
    u = utils or expected_utilities(params, density, eq)
    p = params.info_prob
    informed = u.u_withhold_avg + (1.0 - density.cdf(eq.x_star)) * u.u_disclose
    return (1.0 - p) * u.u_uninformed + p * informed


def marginal_benefit(params: ModelParams, density: ErrorDensity, p: float) -> float:
    """Private value of becoming informed when the lender expects effort ``p``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"effort p={p!r} outside (0, 1)")
    prm = params.with_(info_prob=p)
    eq = solve_equilibrium(prm, density)
    u = expected_utilities(prm, density, eq)
    return u.u_withhold_avg + (1.0 - density.cdf(eq.x_star)) * u.u_disclose - u.u_uninformed


@dataclass
class EffortSolution:
    p_fb: float
    p_star: float
    w_fb: float
    foc_residual_fb: float
    foc_residual_star: float
    over_investment: bool
    unique: bool = True
    crossings: list[float] = field(default_factory=list)
    mb_trace: list[tuple[float, float]] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["mb_trace"] = [list(t) for t in self.mb_trace]
        return d


def solve_effort(
    params: ModelParams,
    density: ErrorDensity,
    trace_points: int = 11,
    scan_points: int = SCAN_POINTS,
    tol: float = EFFORT_TOL,
) -> EffortSolution:
    """First-best effort and the manager's equilibrium effort.

    The gap ``c'(p) - MB(p)`` is scanned on ``(EDGE, 1 - EDGE)`` and every
    sign change refined by bisection.  When the marginal benefit crosses
    marginal cost more than once, the lowest crossing where ``c'`` overtakes
    ``MB`` is returned and ``unique`` is cleared.
    """
    p_fb = first_best_effort(params, density)
    gap = lambda q: marginal_cost(params, q) - marginal_benefit(params, density, q)  # noqa: E731

    grid = np.linspace(EDGE, 1.0 - EDGE, scan_points)
    gaps = np.array([gap(float(q)) for q in grid])
    if gaps[0] > 0:
        raise SolverError(f"no interior crossing: c'(p) > MB(p) already at p={grid[0]:g}")
    crossings, upward = [], []
    for i in np.flatnonzero(np.sign(gaps[:-1]) != np.sign(gaps[1:])):
        if gaps[i] == 0.0:
            q = float(grid[i])
        else:
            q = bisect(gap, float(grid[i]), float(grid[i + 1]), tol, f_lo=float(gaps[i]))
        crossings.append(q)
        if gaps[i] <= 0 < gaps[i + 1]:
            upward.append(q)
    if not upward:
        raise SolverError(
            f"no interior crossing: c'(p) < MB(p) on all of ({grid[0]:g}, {grid[-1]:g}); "
            "cost not convex enough"
        )
    p_star = upward[0]

    trace = [
        (float(q), marginal_benefit(params, density, float(q)))
        for q in np.linspace(grid[0], grid[-1], trace_points)
    ] if trace_points else []
    res_fb = abs(marginal_cost(params, p_fb) - renegotiation_loss(params, density))
    return EffortSolution(
        p_fb=p_fb,
        p_star=p_star,
        w_fb=first_best_surplus(params),
        foc_residual_fb=res_fb,
        foc_residual_star=abs(gap(p_star)),
        over_investment=p_star > p_fb,
        unique=len(crossings) == 1,
        crossings=crossings,
        mb_trace=trace,
    )


def grid_best_response(
    params: ModelParams,
    density: ErrorDensity,
    eq: EquilibriumSolution,
    grid_size: int = 10_000,
) -> tuple[float, float]:
    """Effort maximising the manager's net payoff on a grid, lender beliefs held fixed.

    ``eq`` is the subgame solved at the lender's conjectured effort.  Payoffs
    are integrated directly from the table cells, so the result is an
    independent check on the first-order condition.  Returns
    ``(argmax, grid_step)``.
    """
    prm = params
    withhold = lambda x: manager_payoff_default_rule(prm, eq.d0, x)  # noqa: E731
    disclose = manager_payoff_perfect_rule(prm, eq.d1)
    uninformed = density.integrate(withhold, -1.0, 1.0)
    informed = density.integrate(withhold, -1.0, eq.x_star) + density.integrate(
        lambda x: disclose, eq.x_star, 1.0
    )
    grid = np.linspace(0.0, 1.0, grid_size)
    payoff = (1.0 - grid) * uninformed + grid * informed - 0.5 * prm.cost_scale * grid**2
    return float(grid[int(np.argmax(payoff))]), float(grid[1] - grid[0])
