import numpy as np
import pytest

from covenant_game.effort import expected_utilities, manager_expected_payoff
from covenant_game.equilibrium import solve_equilibrium
from covenant_game.model import payoff_cell
from covenant_game.montecarlo import Estimate, analytic_reneg_freq, simulate


@pytest.fixture(scope="module")
def bench_run():
    from covenant_game.model import BENCHMARK, ErrorDensity

    dens = ErrorDensity.uniform()
    eq = solve_equilibrium(BENCHMARK, dens)
    return BENCHMARK, dens, eq, simulate(BENCHMARK, dens, eq, n=300_000, seed=11)


def test_break_even_both_messages(bench_run):
    params, _, _, rep = bench_run
    assert abs(rep.lender_mean_nondisclosure.z(params.setup_cost)) < 3
    assert abs(rep.lender_mean_disclosure.z(params.setup_cost)) < 3
    assert rep.lender_mean_nondisclosure.count + rep.lender_mean_disclosure.count == rep.n


def test_manager_and_renegotiation_means(bench_run):
    params, dens, eq, rep = bench_run
    manager = manager_expected_payoff(params, dens, eq, expected_utilities(params, dens, eq))
    assert abs(rep.manager_mean.z(manager)) < 3
    assert abs(rep.reneg_freq.z(analytic_reneg_freq(params, dens, eq))) < 3


def test_disclosure_share(bench_run):
    params, dens, eq, rep = bench_run
    share = params.info_prob * (1 - dens.cdf(eq.x_star))
    observed = rep.lender_mean_disclosure.count / rep.n
    assert observed == pytest.approx(share, abs=4 * np.sqrt(share * (1 - share) / rep.n))


def test_deterministic_across_workers(bench, uniform):
    eq = solve_equilibrium(bench, uniform)
    one = simulate(bench, uniform, eq, n=150_000, seed=5, block_size=20_000)
    three = simulate(bench, uniform, eq, n=150_000, seed=5, workers=3, block_size=20_000)
    again = simulate(bench, uniform, eq, n=150_000, seed=5, block_size=20_000)
    assert one == three == again
    assert simulate(bench, uniform, eq, n=150_000, seed=6, block_size=20_000) != one


@pytest.mark.parametrize("density", ["triangular", "tabulated"])
def test_other_densities_break_even(bench, density, request):
    dens = request.getfixturevalue(density)
    eq = solve_equilibrium(bench, dens)
    rep = simulate(bench, dens, eq, n=200_000, seed=2)
    assert abs(rep.lender_mean_nondisclosure.z(bench.setup_cost)) < 3
    assert abs(rep.lender_mean_disclosure.z(bench.setup_cost)) < 3


def test_near_total_deadweight_loss(bench, uniform):
    p = bench.with_(kappa=0.999)
    eq = solve_equilibrium(p, uniform)
    rep = simulate(p, uniform, eq, n=100_000, seed=4)
    assert abs(rep.lender_mean_nondisclosure.z(p.setup_cost)) < 3
    # renegotiated rows keep the efficient action but burn almost all of L
    gb = payoff_cell(p, eq.d0, "G", "b")
    assert gb.social == pytest.approx(p.gamma_g * p.payout + p.private_benefit - 0.999 * p.l_g)
    assert gb.manager + gb.lender == pytest.approx(gb.social)


def test_small_and_invalid_n(bench, uniform):
    eq = solve_equilibrium(bench, uniform)
    rep = simulate(bench, uniform, eq, n=1, seed=0)
    assert rep.manager_mean.count == 1 and rep.manager_mean.se == 0.0
    with pytest.raises(ValueError):
        simulate(bench, uniform, eq, n=0, seed=0)


def test_estimate_z():
    assert Estimate(3.1, 0.05, 100).z(3.0) == pytest.approx(2.0)
    assert Estimate(3.0, 0.0, 1).z(3.0) == 0.0
