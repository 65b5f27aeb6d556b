import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from covenant_game.quadrature import QuadratureError, adaptive_simpson, integrate_piecewise


def test_exact_on_cubics():
    f = lambda x: 3 * x**3 - x**2 + 2 * x - 5  # noqa: E731
    exact = 3 / 4 * (16 - 1) - (8 + 1) / 3 + (4 - 1) - 5 * 3
    assert adaptive_simpson(f, -1.0, 2.0) == pytest.approx(exact, abs=1e-13)


def test_reversed_and_empty_intervals():
    assert adaptive_simpson(math.sin, 1.0, 1.0) == 0.0
    assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1.0), abs=1e-11)
    assert integrate_piecewise(math.exp, 1.0, 0.0, (0.5,)) == pytest.approx(-(math.e - 1.0), abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(-3.0, 0.0),
    width=st.floats(0.01, 4.0),
    freq=st.floats(0.1, 5.0),
)
def test_matches_scipy_on_smooth_integrands(a, width, freq):
    f = lambda x: math.exp(-x * x) * math.cos(freq * x)  # noqa: E731
    want, _ = integrate.quad(f, a, a + width, epsabs=1e-13, epsrel=1e-13)
    assert adaptive_simpson(f, a, a + width, tol=1e-11) == pytest.approx(want, abs=1e-10)


def test_breakpoints_handle_kinks():
    f = lambda x: abs(x - 0.3) * (1.0 - abs(x))  # noqa: E731
    want, _ = integrate.quad(f, -1.0, 1.0, points=[0.0, 0.3], epsabs=1e-14)
    got = integrate_piecewise(f, -1.0, 1.0, breakpoints=(0.0, 0.3, 5.0))
    assert got == pytest.approx(want, abs=1e-12)


def test_depth_cap_raises():
    with pytest.raises(QuadratureError, match="did not converge"):
        adaptive_simpson(lambda x: abs(x - 1.0 / 3.0) ** 0.1, 0.0, 1.0, tol=1e-15, max_depth=4)
