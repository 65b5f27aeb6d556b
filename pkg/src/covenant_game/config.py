"""Run configuration: flat ``key = value`` files with optional ``[section]`` headers.

Example::

    # benchmark with a kappa sweep
    gamma_g = 0.8
    kappa = 0.05

    [density]
    kind = uniform

    sweep.kappa = 0.01, 0.1, 10
    simulate.n = 1000000
    simulate.seed = 7
    output.format = csv

A ``[section]`` header prefixes the keys that follow it, so ``kind`` under
``[density]`` is ``density.kind``.  Unset model parameters take the
benchmark values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import BENCHMARK, DENSITY_KINDS, ErrorDensity, ModelParams

PARAM_FIELDS = ModelParams.field_names()
OUTPUT_FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass
class RunConfig:
    params: ModelParams = BENCHMARK
    density: ErrorDensity = field(default_factory=ErrorDensity.uniform)
    sweep: list[SweepAxis] = field(default_factory=list)
    simulate: tuple[int, int] | None = None
    output_path: str | None = None
    output_format: str = "json"


class _Builder:
    def __init__(self) -> None:
        self.params: dict[str, float] = {}
        self.density_kind = "uniform"
        self.density_table: list[tuple[float, float]] | None = None
        self.sweep: dict[str, SweepAxis] = {}
        self.sim_n: int | None = None
        self.sim_seed: int | None = None
        self.output_path: str | None = None
        self.output_format = "json"

    def set(self, key: str, raw: str, where: str) -> None:
        def fail(msg: str) -> ConfigError:
            return ConfigError(f"{where}: {msg}")

        value = raw.strip()
        if key in PARAM_FIELDS:
            self.params[key] = _float(value, fail, key)
        elif key == "density.kind":
            if value not in DENSITY_KINDS:
                raise fail(f"density.kind must be one of {', '.join(DENSITY_KINDS)}, got {value!r}")
            self.density_kind = value
        elif key == "density.table":
            knots = []
            for item in value.split(","):
                parts = item.split(":")
                if len(parts) != 2:
                    raise fail(f"density.table entries are x:density pairs, got {item.strip()!r}")
                knots.append((_float(parts[0], fail, key), _float(parts[1], fail, key)))
            self.density_table = knots
        elif key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in PARAM_FIELDS:
                raise fail(f"sweep parameter {name!r} is not a model parameter")
            parts = [s.strip() for s in value.split(",")]
            if len(parts) != 3:
                raise fail(f"{key} needs 'start, stop, steps'")
            steps = _int(parts[2], fail, key)
            if steps < 2:
                raise fail(f"{key} needs steps >= 2")
            self.sweep[name] = SweepAxis(name, _float(parts[0], fail, key), _float(parts[1], fail, key), steps)
        elif key == "simulate.n":
            self.sim_n = _int(value, fail, key)
            if self.sim_n < 1:
                raise fail("simulate.n must be >= 1")
        elif key == "simulate.seed":
            self.sim_seed = _int(value, fail, key)
        elif key == "output.path":
            self.output_path = value or None
        elif key == "output.format":
            if value not in OUTPUT_FORMATS:
                raise fail(f"output.format must be json or csv, got {value!r}")
            self.output_format = value
        else:
            raise fail(f"unknown key {key!r}")

    def build(self) -> RunConfig:
        try:
            if self.density_kind == "tabulated":
                if self.density_table is None:
                    raise ConfigError("density.kind = tabulated needs density.table")
                density = ErrorDensity.tabulated(self.density_table)
            else:
                density = ErrorDensity(self.density_kind)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"density: {exc}") from exc
        simulate = None
        if self.sim_n is not None or self.sim_seed is not None:
            simulate = (self.sim_n or 1_000_000, self.sim_seed or 0)
        return RunConfig(
            params=replace(BENCHMARK, **self.params),
            density=density,
            sweep=list(self.sweep.values()),
            simulate=simulate,
            output_path=self.output_path,
            output_format=self.output_format,
        )


def _float(text: str, fail, key: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise fail(f"{key}: expected a number, got {text.strip()!r}") from None


def _int(text: str, fail, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise fail(f"{key}: expected an integer, got {text.strip()!r}") from None


def load_config(
    text: str | None = None,
    source: str = "<config>",
    overrides: list[str] | None = None,
) -> RunConfig:
    """Parse config text, then apply ``key=value`` overrides in order."""
    b = _Builder()
    section = ""
    for lineno, line in enumerate((text or "").splitlines(), start=1):
        where = f"{source}:{lineno}"
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if not section:
                raise ConfigError(f"{where}: empty section header")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected 'key = value', got {stripped!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if section:
            key = f"{section}.{key}"
        b.set(key, value, where)
    for i, item in enumerate(overrides or [], start=1):
        if "=" not in item:
            raise ConfigError(f"--set #{i}: expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        b.set(key.strip(), value, f"--set #{i}")
    return b.build()
