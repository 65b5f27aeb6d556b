"""Adaptive Simpson quadrature.

Integrands in this package are low-order polynomials times a piecewise
linear density, so a plain adaptive Simpson rule split at the density's
breakpoints converges in a handful of evaluations.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence


class QuadratureError(RuntimeError):
    """Raised when the subdivision depth cap is hit before convergence."""


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Raises:
        QuadratureError: if an interval still fails the error test at
            ``max_depth`` levels of bisection.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = left + right - s
        if abs(err) <= 15.0 * eps:
            total += left + right + err / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson did not converge on [{lo:.6g}, {hi:.6g}] "
                f"after {max_depth} subdivisions"
            )
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    return total


def integrate_piecewise(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Adaptive Simpson over ``[a, b]``, restarted at every interior breakpoint."""
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    cuts = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
    pieces = len(cuts) - 1
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += adaptive_simpson(f, lo, hi, tol / pieces, max_depth)
    return sign * total
