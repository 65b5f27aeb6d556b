"""Comparative statics of the withholding threshold."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .equilibrium import solve_threshold
from .model import (
    ErrorDensity,
    ModelParams,
    SolverError,
    derived_constants,
    validate_params,
)

# parameters the threshold is differentiated against, in table order
STATIC_PARAMS = (
    "gamma_g",
    "gamma_b",
    "restructure_value",
    "private_benefit",
    "tau",
    "kappa",
    "info_prob",
)
LABELS = {
    "gamma_g": "γ_G",
    "gamma_b": "γ_B",
    "restructure_value": "y",
    "private_benefit": "X",
    "tau": "τ",
    "kappa": "κ",
    "info_prob": "p",
}
CONSTANT_PARAMS = STATIC_PARAMS[:-1]
AMBIGUOUS = "ambiguous"

# Reference sign tables, cell for cell.
REFERENCE_CONSTANT_SIGNS = {
    #                     C1   C2   C3
    "gamma_g":           ("0", "0", "-"),
    "gamma_b":           ("-", "-", "0"),
    "restructure_value": ("+", "+", "+"),
    "private_benefit":   ("0", "+", "+"),
    "tau":               ("+", "+", "-"),
    "kappa":             ("+", "-", "-"),
}
REFERENCE_UNIFORM_SIGNS = {
    "gamma_g": "-",
    "gamma_b": "+",
    "restructure_value": "-",
    "private_benefit": "+",
    "tau": "-",
    "kappa": "-",
    "info_prob": "-",
}
REFERENCE_GENERAL_SIGNS = {
    "gamma_g": "-",
    "gamma_b": AMBIGUOUS,
    "restructure_value": AMBIGUOUS,
    "private_benefit": AMBIGUOUS,
    "tau": AMBIGUOUS,
    "kappa": "-",
    "info_prob": "-",
}
SMALL_KAPPA = 0.05


def closed_form_threshold_uniform(params: ModelParams) -> float:
    """Root of the indifference residual in ``[-1, 0]`` for uniform errors.

    With uniform errors ``4 J(x) = -a x**2 - 2 b x + c0`` where
    ``a = (C1 - 2 C2) p``, ``b = C2 (p - 2)`` and ``c0 = p C1 - 4 (1 - p) C``.
    The root ``-(b + sqrt(b**2 + a c0)) / a`` is evaluated in the rationalized
    form ``c0 / (b - sqrt(b**2 + a c0))``, which avoids cancellation for small
    ``p`` and stays finite when ``a`` vanishes.

    Raises:
        SolverError: negative discriminant, or a root outside ``[-1, 0]``
            (the corner regime; use :func:`solve_threshold` there).
    """
    k = derived_constants(params, ErrorDensity.uniform())
    p = params.info_prob
    a = (k.c1 - 2.0 * k.c2) * p
    b = k.c2 * (p - 2.0)
    c0 = p * k.c1 - 4.0 * (1.0 - p) * k.c
    disc = b * b + a * c0
    if disc < 0:
        raise SolverError(f"negative discriminant {disc:.6g} in closed-form threshold")
    x = c0 / (b - math.sqrt(disc))
    if not -1.0 <= x <= 0.0:
        raise SolverError(f"closed-form threshold {x:.6g} outside [-1, 0]; corner regime")
    return x


def _interior_threshold(params: ModelParams, density: ErrorDensity) -> float:
    report = validate_params(params)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures())
        raise SolverError(f"perturbed parameters invalid ({names})")
    th = solve_threshold(params, density, tol=0.0)
    if th.corner != "interior":
        raise SolverError("perturbed point sits in the full-disclosure corner")
    return th.x_star


def dxstar_dparam(
    params: ModelParams,
    density: ErrorDensity,
    which: str,
    h: float | None = None,
    richardson: bool = True,
) -> float:
    """Central-difference derivative of the threshold in one parameter.

    The default step is ``1e-5 * max(|value|, 1)``; with ``richardson`` the
    estimates at ``h`` and ``h/2`` are combined to cancel the ``h**2`` term.
    """
    if which not in STATIC_PARAMS:
        raise ValueError(f"cannot differentiate with respect to {which!r}")
    base = getattr(params, which)
    step = h if h is not None else 1e-5 * max(abs(base), 1.0)

    def central(s: float) -> float:
        up = _interior_threshold(params.with_(**{which: base + s}), density)
        down = _interior_threshold(params.with_(**{which: base - s}), density)
        return (up - down) / (2.0 * s)

    coarse = central(step)
    if not richardson:
        return coarse
    return (4.0 * central(0.5 * step) - coarse) / 3.0


def constant_partials(params: ModelParams) -> dict[str, tuple[float, float, float]]:
    """Hand-differentiated ``(dC1, dC2, dC3)`` with respect to each primitive."""
    p = params
    y, gb, gg, t, k = p.restructure_value, p.gamma_b, p.gamma_g, p.tau, p.kappa
    lb, lg = p.l_b, p.l_g
    a = (1.0 - t) * (1.0 - k)
    s = t * (1.0 - k)
    return {
        "gamma_g": (0.0, 0.0, -0.5 * y * (1.0 - a)),
        "gamma_b": (-0.5 * y * (1.0 - a), -0.5 * s * y, 0.0),
        "restructure_value": (
            0.5 * (1.0 - gb) * (1.0 - a),
            0.5 * s * (1.0 - gb),
            0.5 * (1.0 - gg) * (1.0 - a),
        ),
        "private_benefit": (0.5 * a, 0.5 * (1.0 - s), 0.5 * a),
        "tau": (0.5 * (1.0 - k) * lb, 0.5 * (1.0 - k) * lb, -0.5 * (1.0 - k) * lg),
        "kappa": (0.5 * (1.0 - t) * lb, -0.5 * t * lb, -0.5 * (1.0 - t) * lg),
    }


def sign_of(value: float, tol: float = 1e-14) -> str:
    if value > tol:
        return "+"
    if value < -tol:
        return "-"
    return "0"


@dataclass
class SignTable:
    target: str  # C1, C2, C3, x_star_general, x_star_uniform
    rows: dict[str, str]
    expected: dict[str, str]
    values: dict[str, float | None] = field(default_factory=dict)

    def mismatches(self) -> list[str]:
        return [
            name
            for name, want in self.expected.items()
            if want != AMBIGUOUS and self.rows.get(name) != want
        ]

    @property
    def passed(self) -> bool:
        return not self.mismatches()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["mismatches"] = self.mismatches()
        d["passed"] = self.passed
        return d


def constant_sign_tables(params: ModelParams) -> list[SignTable]:
    partials = constant_partials(params)
    tables = []
    for col, target in enumerate(("C1", "C2", "C3")):
        values = {name: partials[name][col] for name in CONSTANT_PARAMS}
        tables.append(
            SignTable(
                target=target,
                rows={name: sign_of(v) for name, v in values.items()},
                expected={name: REFERENCE_CONSTANT_SIGNS[name][col] for name in CONSTANT_PARAMS},
                values=values,
            )
        )
    return tables


def threshold_sign_table(
    params: ModelParams, density: ErrorDensity, target: str, expected: dict[str, str]
) -> SignTable:
    rows: dict[str, str] = {}
    values: dict[str, float | None] = {}
    for name in STATIC_PARAMS:
        if expected[name] == AMBIGUOUS:
            rows[name], values[name] = AMBIGUOUS, None
            continue
        d = dxstar_dparam(params, density, name)
        rows[name], values[name] = sign_of(d, 1e-10), d
    return SignTable(target=target, rows=rows, expected=dict(expected), values=values)


def sign_tables(
    params: ModelParams,
    density: ErrorDensity | None = None,
    kappa_max: float = SMALL_KAPPA,
) -> list[SignTable]:
    """Signs for the three constants and the threshold, against the references.

    The uniform table tests every parameter; the general table (default
    triangular density) tests only its unambiguous cells.
    """
    if params.kappa > kappa_max:
        raise ValueError(f"kappa={params.kappa:g} above the small-kappa check regime ({kappa_max:g})")
    general = density or ErrorDensity.triangular()
    for dens in (ErrorDensity.uniform(), general):
        th = solve_threshold(params, dens)
        if th.corner != "interior" or not th.unique:
            raise SolverError(f"{dens.kind}: threshold not interior and unique at the base point")
    return constant_sign_tables(params) + [
        threshold_sign_table(params, ErrorDensity.uniform(), "x_star_uniform", REFERENCE_UNIFORM_SIGNS),
        threshold_sign_table(params, general, "x_star_general", REFERENCE_GENERAL_SIGNS),
    ]


def kappa_limit_derivatives(params: ModelParams) -> dict[str, float]:
    """Closed-form limits of the uniform-threshold derivatives as ``kappa -> 0``."""
    gg, gb, y, X, t, p = (
        params.gamma_g,
        params.gamma_b,
        params.restructure_value,
        params.private_benefit,
        params.tau,
        params.info_prob,
    )
    core = t * y * (gb - 1.0) + (t - 1.0) * X
    pre = 1.0 / (2.0 * core)
    root = math.sqrt((p - 1.0) * core * (t * y * ((p - 2.0) * gb - p * gg + 2.0) - 2.0 * (t - 1.0) * X))
    return {
        "tau": pre * (p - 1.0) * X * y * (gb - gg) / root,
        "gamma_b": pre * -(p - 1.0) * t * y * (t * y * (gg - 1.0) + (t - 1.0) * X) / root,
        "private_benefit": pre * (p - 1.0) * (t - 1.0) * t * y * (gb - gg) / root,
        "restructure_value": pre * -(p - 1.0) * (t - 1.0) * t * X * (gb - gg) / root,
    }
