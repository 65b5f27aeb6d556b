"""Path simulation of the full game at a solved equilibrium.

Paths are grouped in fixed-size blocks; block ``b`` draws from its own
Philox stream keyed on ``(seed, b)``, and block sums are reduced in block
order, so the report does not depend on how blocks are spread over workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .equilibrium import EquilibriumSolution
from .model import ErrorDensity, ModelParams, payoff_cell

BLOCK_SIZE = 1 << 16
# per-block accumulator layout: (count, sum, sum of squares) for each statistic
_STATS = ("lender_nondisclosure", "lender_disclosure", "manager", "reneg")


@dataclass
class Estimate:
    mean: float
    se: float
    count: int

    def z(self, target: float) -> float:
        if self.se > 0:
            return (self.mean - target) / self.se
        return 0.0 if self.mean == target else float("inf")


@dataclass
class SimulationReport:
    n: int
    seed: int
    lender_mean_nondisclosure: Estimate
    lender_mean_disclosure: Estimate
    manager_mean: Estimate
    reneg_freq: Estimate

    def as_dict(self) -> dict:
        return asdict(self)


def _cells(params: ModelParams, face_value: float):
    gg = payoff_cell(params, face_value, "G", "g")
    gb = payoff_cell(params, face_value, "G", "b")
    bb = payoff_cell(params, face_value, "B", "b")
    bg = payoff_cell(params, face_value, "B", "g")
    return gg, gb, bb, bg


def _simulate_block(args) -> np.ndarray:
    params, density, d0, d1, x_star, seed, block, size = args
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    informed = rng.random(size) < params.info_prob
    x = density.sample(rng, size)
    good = rng.random(size) < 0.5
    flip = rng.random(size)

    disclosed = informed & (x > x_star)
    # default rule: false alarm flips G to b w.p. x; undue optimism flips B to g w.p. -x
    err = np.where(disclosed, 0.0, x)
    good_signal = np.where(good, ~(flip < np.maximum(err, 0.0)), flip < np.maximum(-err, 0.0))
    reneg = good != good_signal

    u = np.empty(size)
    v = np.empty(size)
    for face, mask in ((d1, disclosed), (d0, ~disclosed)):
        gg, gb, bb, bg = _cells(params, face)
        for cell, hit in (
            (gg, good & good_signal),
            (gb, good & ~good_signal),
            (bb, ~good & ~good_signal),
            (bg, ~good & good_signal),
        ):
            sel = mask & hit
            u[sel] = cell.manager
            v[sel] = cell.lender

    out = np.zeros((len(_STATS), 3))
    for row, vals in enumerate((v[~disclosed], v[disclosed], u, reneg.astype(float))):
        out[row] = (vals.size, vals.sum(), np.dot(vals, vals))
    return out


def _estimate(acc: np.ndarray) -> Estimate:
    count, total, sq = acc
    n = int(count)
    if n == 0:
        return Estimate(float("nan"), float("nan"), 0)
    mean = total / n
    var = max(sq - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    return Estimate(float(mean), float(np.sqrt(var / n)), n)


def simulate(
    params: ModelParams,
    density: ErrorDensity,
    eq: EquilibriumSolution,
    n: int,
    seed: int,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> SimulationReport:
    if n < 1:
        raise ValueError("n must be at least 1")
    blocks = [
        (params, density, eq.d0, eq.d1, eq.x_star, seed, b, min(block_size, n - b * block_size))
        for b in range((n + block_size - 1) // block_size)
    ]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_block, blocks))
    else:
        parts = [_simulate_block(b) for b in blocks]
    acc = np.zeros((len(_STATS), 3))
    for part in parts:
        acc += part
    est = [_estimate(row) for row in acc]
    return SimulationReport(n, seed, *est)


def analytic_reneg_freq(params: ModelParams, density: ErrorDensity, eq: EquilibriumSolution) -> float:
    """Probability that the control holder's preferred action is inefficient."""
    p = params.info_prob
    m = density.partial_x_moment
    withheld = -m(-1.0, eq.x_star)
    uninformed = -m(-1.0, 0.0) + m(0.0, 1.0)
    return 0.5 * p * withheld + 0.5 * (1.0 - p) * uninformed
