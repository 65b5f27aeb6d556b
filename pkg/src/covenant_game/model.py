"""Model primitives: parameters, the error-degree density, date-2 payoffs.

The measurement error of the default rule is a signed degree ``x`` on
``[-1, 1]``.  ``x > 0`` is a false alarm (the signal reads bad in the good
state with probability ``x``); ``x < 0`` is undue optimism (the signal reads
good in the bad state with probability ``-x``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .quadrature import integrate_piecewise

QUAD_TOL = 1e-10


class InvalidParamsError(ValueError):
    """Raised by solvers handed parameters that fail validation."""


class InfeasibleError(ValueError):
    """A break-even face value falls outside ``(y, Y]``."""


class SolverError(RuntimeError):
    """A numerical solve could not produce a trustworthy answer."""


@dataclass(frozen=True)
class ModelParams:
    gamma_g: float
    gamma_b: float
    payout: float
    restructure_value: float
    private_benefit: float
    setup_cost: float
    tau: float
    kappa: float
    info_prob: float
    cost_scale: float

    @property
    def l_b(self) -> float:
        """Loss from continuing in the bad state."""
        return (1.0 - self.gamma_b) * self.restructure_value - self.private_benefit

    @property
    def l_g(self) -> float:
        """Loss from restructuring in the good state."""
        return self.private_benefit - (1.0 - self.gamma_g) * self.restructure_value

    def with_(self, **changes: float) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


BENCHMARK = ModelParams(
    gamma_g=0.8,
    gamma_b=0.2,
    payout=10.0,
    restructure_value=2.0,
    private_benefit=1.2,
    setup_cost=3.0,
    tau=0.5,
    kappa=0.05,
    info_prob=0.5,
    cost_scale=0.5,
)


# ---------------------------------------------------------------------------
# Error density
# ---------------------------------------------------------------------------

DENSITY_KINDS = ("uniform", "triangular", "tabulated")
_EDGE = 1e-12


def _as_out(x, value):
    return float(value) if np.ndim(x) == 0 else value


def _check_range(*args) -> None:
    for a in args:
        arr = np.asarray(a, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < -1.0 - _EDGE) or np.any(arr > 1.0 + _EDGE):
            raise ValueError(f"error degree outside [-1, 1]: {a!r}")


@dataclass(frozen=True)
class ErrorDensity:
    """Symmetric density of the error degree on ``[-1, 1]``.

    ``uniform`` and ``triangular`` (peak at zero, ``f(x) = 1 - |x|``) are
    answered in closed form.  ``tabulated`` interpolates linearly between
    ``(x, density)`` knots, is rescaled to unit mass on construction, and
    answers every query by adaptive quadrature.
    """

    kind: str = "uniform"
    table: tuple[tuple[float, float], ...] | None = None
    _knots_x: np.ndarray | None = field(default=None, repr=False, compare=False)
    _knots_f: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in DENSITY_KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}; expected one of {DENSITY_KINDS}")
        if self.kind != "tabulated":
            if self.table is not None:
                raise ValueError(f"{self.kind} density takes no table")
            return
        if not self.table or len(self.table) < 2:
            raise ValueError("tabulated density needs at least two knots")
        xs = np.array([float(k[0]) for k in self.table])
        fs = np.array([float(k[1]) for k in self.table])
        if np.any(np.diff(xs) <= 0):
            raise ValueError("tabulated knots must be strictly increasing in x")
        if abs(xs[0] + 1.0) > _EDGE or abs(xs[-1] - 1.0) > _EDGE:
            raise ValueError("tabulated knots must span exactly [-1, 1]")
        if np.any(fs < 0) or not np.all(np.isfinite(fs)):
            raise ValueError("tabulated density values must be finite and non-negative")
        probe = np.union1d(xs, -xs)
        if np.max(np.abs(np.interp(probe, xs, fs) - np.interp(-probe, xs, fs))) > 1e-9:
            raise ValueError("tabulated density is not symmetric about zero")
        # piecewise linear, so the trapezoid sum is the exact mass
        mass = float(np.sum(0.5 * (fs[1:] + fs[:-1]) * np.diff(xs)))
        if mass <= 0:
            raise ValueError("tabulated density has zero mass")
        object.__setattr__(self, "_knots_x", xs)
        object.__setattr__(self, "_knots_f", fs / mass)

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform(cls) -> "ErrorDensity":
        return cls("uniform")

    @classmethod
    def triangular(cls) -> "ErrorDensity":
        return cls("triangular")

    @classmethod
    def tabulated(cls, knots: Sequence[tuple[float, float]]) -> "ErrorDensity":
        return cls("tabulated", tuple((float(a), float(b)) for a, b in knots))

    def describe(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.table is not None:
            out["table"] = [list(k) for k in self.table]
        return out

    @property
    def breakpoints(self) -> tuple[float, ...]:
        if self.kind == "tabulated":
            return tuple(float(v) for v in self._knots_x[1:-1]) + (0.0,)
        return (0.0,)

    # -- queries ------------------------------------------------------------

    def pdf(self, x):
        _check_range(x)
        xa = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            val = np.full_like(xa, 0.5)
        elif self.kind == "triangular":
            val = 1.0 - np.abs(xa)
        else:
            val = np.interp(xa, self._knots_x, self._knots_f)
        return _as_out(x, val)

    def cdf(self, x):
        _check_range(x)
        xa = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        if self.kind == "uniform":
            val = 0.5 * (xa + 1.0)
        elif self.kind == "triangular":
            val = np.where(xa <= 0, 0.5 * (1.0 + xa) ** 2, 1.0 - 0.5 * (1.0 - xa) ** 2)
        else:
            val = np.vectorize(self._quad_cdf, otypes=[float])(xa)
        return _as_out(x, val)

    def integral_cdf(self, t):
        """``∫_{-1}^{t} F(x) dx``."""
        _check_range(t)
        ta = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
        if self.kind == "uniform":
            val = 0.25 * (1.0 + ta) ** 2
        elif self.kind == "triangular":
            val = np.where(ta <= 0, (1.0 + ta) ** 3 / 6.0, ta + (1.0 - ta) ** 3 / 6.0)
        else:
            # integration by parts with F(-1) = 0
            val = ta * self.cdf(ta) - self.partial_x_moment(-1.0, ta)
        return _as_out(t, val)

    def partial_x_moment(self, a, b):
        """``∫_a^b x f(x) dx``."""
        _check_range(a, b)
        aa = np.clip(np.asarray(a, dtype=float), -1.0, 1.0)
        ba = np.clip(np.asarray(b, dtype=float), -1.0, 1.0)
        if np.any(aa > ba):
            raise ValueError(f"partial_x_moment needs a <= b, got a={a!r}, b={b!r}")
        if self.kind == "uniform":
            val = 0.25 * (ba**2 - aa**2)
        elif self.kind == "triangular":
            g = lambda z: 0.5 * z**2 - np.abs(z) ** 3 / 3.0  # noqa: E731
            val = g(ba) - g(aa)
        else:
            val = np.vectorize(self._quad_x_moment, otypes=[float])(aa, ba)
        out = b if np.ndim(b) else a
        return _as_out(out, val)

    def integrate(self, g, a: float, b: float, tol: float = QUAD_TOL) -> float:
        """``∫_a^b g(x) f(x) dx`` by adaptive Simpson, split at the density's kinks."""
        _check_range(a, b)
        return integrate_piecewise(
            lambda x: g(x) * self._pdf_scalar(x), a, b, self.breakpoints, tol=tol
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(-1.0, 1.0, size)
        if self.kind == "triangular":
            return rng.random(size) - rng.random(size)
        return np.interp(rng.random(size), *self._inverse_cdf_table())

    # -- tabulated internals ------------------------------------------------

    def _pdf_scalar(self, x: float) -> float:
        if self.kind == "uniform":
            return 0.5
        if self.kind == "triangular":
            return 1.0 - abs(x)
        return float(np.interp(x, self._knots_x, self._knots_f))

    def _quad_cdf(self, x: float) -> float:
        return integrate_piecewise(self._pdf_scalar, -1.0, x, self.breakpoints, tol=QUAD_TOL)

    def _quad_x_moment(self, a: float, b: float) -> float:
        return integrate_piecewise(
            lambda z: z * self._pdf_scalar(z), a, b, self.breakpoints, tol=QUAD_TOL
        )

    def _inverse_cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        grid = np.linspace(-1.0, 1.0, 4097)
        grid = np.union1d(grid, self._knots_x)
        cdf = self.cdf(grid)
        keep = np.concatenate(([True], np.diff(cdf) > 0))
        return cdf[keep], grid[keep]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[Check]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [asdict(c) for c in self.checks],
            "diagnostics": list(self.diagnostics),
        }


def lender_share(params: ModelParams, state: str, action: int, face_value: float) -> float:
    """Lender's expected share in ``state`` under ``action`` when ``D > y``."""
    g = params.gamma_g if state == "G" else params.gamma_b
    return g * face_value + (1 - action) * (1.0 - g) * params.restructure_value


def manager_share(params: ModelParams, state: str, action: int, face_value: float) -> float:
    g = params.gamma_g if state == "G" else params.gamma_b
    return g * (params.payout - face_value) + action * params.private_benefit


def validate_params(params: ModelParams) -> ValidationReport:
    """Run every parameter check and collect the results; never raises."""
    p = params
    checks: list[Check] = []
    values = [getattr(p, n) for n in ModelParams.field_names()]
    finite = all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)
    checks.append(Check("finite", finite, "all fields finite" if finite else "non-finite field"))
    if not finite:
        return ValidationReport(checks)

    def add(name: str, ok: bool, detail: str) -> None:
        checks.append(Check(name, bool(ok), detail))

    add("gamma_range", 0.0 <= p.gamma_b < p.gamma_g < 1.0,
        f"need 0 <= gamma_b < gamma_g < 1 (gamma_b={p.gamma_b:g}, gamma_g={p.gamma_g:g})")
    add("cash_flow_order", 0.0 < p.restructure_value < p.payout,
        f"need 0 < y < Y (y={p.restructure_value:g}, Y={p.payout:g})")
    add("private_benefit_positive", p.private_benefit > 0, f"X={p.private_benefit:g}")
    add("setup_cost_positive", p.setup_cost > 0, f"K={p.setup_cost:g}")
    add("tau_range", 0.0 <= p.tau <= 1.0, f"tau={p.tau:g} must lie in [0, 1]")
    add("kappa_range", 0.0 < p.kappa < 1.0, f"kappa={p.kappa:g} must lie in (0, 1)")
    add("info_prob_range", 0.0 < p.info_prob < 1.0, f"p={p.info_prob:g} must lie in (0, 1)")
    add("cost_scale_positive", p.cost_scale > 0, f"cost_scale={p.cost_scale:g}")

    lb, lg = p.l_b, p.l_g
    add("assumption_1", lb > 0 and lg > 0 and lg > lb,
        f"Assumption 1 needs L_B > 0, L_G > 0, L_G > L_B (L_B={lb:.6g}, L_G={lg:.6g})")
    add("assumption_2", p.setup_cost > p.restructure_value,
        f"Assumption 2 needs K > y (K={p.setup_cost:g}, y={p.restructure_value:g})")

    denom = 0.5 * (p.gamma_g + p.gamma_b)
    d1 = (p.setup_cost - 0.5 * (1.0 - p.gamma_b) * p.restructure_value) / denom if denom > 0 else math.inf
    add("d1_feasible", p.restructure_value < d1 <= p.payout,
        f"disclosure face value D1={d1:.6g} must lie in (y, Y]")

    # manager prefers continuation and lender restructuring for any D in [K, Y]
    lemma_ok = True
    if p.setup_cost <= p.payout:
        for d in (p.setup_cost, p.payout):
            for s in ("G", "B"):
                dm = manager_share(p, s, 1, d) - manager_share(p, s, 0, d)
                dl = lender_share(p, s, 0, d) - lender_share(p, s, 1, d)
                lemma_ok &= dm > 0 and dl > 0
    else:
        lemma_ok = False
    add("lemma_1", lemma_ok,
        "manager prefers continuation and lender prefers restructuring for D in [K, Y]")
    add("no_information_continuation", 0.5 * lg - 0.5 * lb > 0,
        f"continuation optimal absent information: L_G/2 - L_B/2 = {0.5 * (lg - lb):.6g}")

    diagnostics = []
    if lb > 0 and lg > 0:
        cutoff = lb / lg
        if cutoff < 1.0:
            diagnostics.append(
                f"on r=b, lender control is ex-post inefficient for false-alarm degree "
                f"x > L_B/L_G = {cutoff:.6g}; renegotiation restores the efficient action"
            )
    return ValidationReport(checks, diagnostics)


def require_valid(params: ModelParams) -> None:
    report = validate_params(params)
    if not report.ok:
        msgs = "; ".join(f"{c.name}: {c.detail}" for c in report.failures())
        raise InvalidParamsError(f"invalid parameters: {msgs}")


# ---------------------------------------------------------------------------
# Date-2 payoffs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PayoffCell:
    state: str
    signal: str
    manager: float
    lender: float
    social: float


REGIMES = ("false_alarm", "undue_optimism")
_ROWS = {
    "false_alarm": (("G", "g"), ("G", "b"), ("B", "b")),
    "undue_optimism": (("G", "g"), ("B", "g"), ("B", "b")),
}


def payoff_cell(params: ModelParams, face_value: float, state: str, signal: str) -> PayoffCell:
    """Post-renegotiation payoffs when ``state`` is realised and ``signal`` read.

    The social column is evaluated from its own expression, not as a sum,
    so ``manager + lender == social`` is a real check.
    """
    p, d = params, face_value
    Y, y, X, k, t = p.payout, p.restructure_value, p.private_benefit, p.kappa, p.tau
    if state == "G":
        g = p.gamma_g
        if signal == "g":
            return PayoffCell("G", "g", g * (Y - d) + X, g * d, g * Y + X)
        lg = p.l_g
        return PayoffCell(
            "G", "b",
            g * (Y - d) + t * (1 - k) * lg,
            g * d + (1 - g) * y + (1 - t) * (1 - k) * lg,
            g * Y + X - k * lg,
        )
    if state == "B":
        g = p.gamma_b
        if signal == "b":
            return PayoffCell("B", "b", g * (Y - d), g * d + (1 - g) * y, g * Y + (1 - g) * y)
        lb = p.l_b
        return PayoffCell(
            "B", "g",
            g * (Y - d) + X + t * (1 - k) * lb,
            g * d + (1 - t) * (1 - k) * lb,
            g * Y + X + (1 - k) * lb,
        )
    raise ValueError(f"unknown state {state!r}")


def payoff_table(params: ModelParams, face_value: float, regime: str) -> list[PayoffCell]:
    """The three reachable (state, signal) rows under an error regime."""
    if regime not in _ROWS:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if not (params.restructure_value < face_value <= params.payout):
        raise InfeasibleError(
            f"face value {face_value:.6g} outside (y, Y] = "
            f"({params.restructure_value:g}, {params.payout:g}]"
        )
    return [payoff_cell(params, face_value, s, r) for s, r in _ROWS[regime]]


def manager_payoff_default_rule(params: ModelParams, face_value: float, x: float) -> float:
    """Manager's expected date-2 payoff when contracting on the default rule with error ``x``."""
    c = lambda s, r: payoff_cell(params, face_value, s, r).manager  # noqa: E731
    if x <= 0:
        return 0.5 * c("G", "g") + 0.5 * ((-x) * c("B", "g") + (1 + x) * c("B", "b"))
    return 0.5 * ((1 - x) * c("G", "g") + x * c("G", "b")) + 0.5 * c("B", "b")


def lender_payoff_default_rule(params: ModelParams, face_value: float, x: float) -> float:
    c = lambda s, r: payoff_cell(params, face_value, s, r).lender  # noqa: E731
    if x <= 0:
        return 0.5 * c("G", "g") + 0.5 * ((-x) * c("B", "g") + (1 + x) * c("B", "b"))
    return 0.5 * ((1 - x) * c("G", "g") + x * c("G", "b")) + 0.5 * c("B", "b")


def manager_payoff_perfect_rule(params: ModelParams, face_value: float) -> float:
    c = lambda s, r: payoff_cell(params, face_value, s, r).manager  # noqa: E731
    return 0.5 * c("G", "g") + 0.5 * c("B", "b")


# ---------------------------------------------------------------------------
# Derived constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivedConstants:
    l_b: float
    l_g: float
    c1: float
    c2: float
    c3: float
    c: float


def derived_constants(params: ModelParams, density: ErrorDensity) -> DerivedConstants:
    p = params
    lb, lg = p.l_b, p.l_g
    shared = (1.0 - p.tau) * (1.0 - p.kappa)
    y = p.restructure_value
    c1 = 0.5 * ((1.0 - p.gamma_b) * y - shared * lb)
    c2 = 0.5 * (p.private_benefit + p.tau * (1.0 - p.kappa) * lb)
    c3 = 0.5 * ((1.0 - p.gamma_g) * y + shared * lg)
    c = (c3 - c1) * density.partial_x_moment(0.0, 1.0)
    return DerivedConstants(lb, lg, c1, c2, c3, c)
