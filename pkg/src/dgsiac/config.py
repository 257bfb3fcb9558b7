"""Run configuration: TOML loading, validation, and dotted-key overrides.

A configuration names a benchmark case and optionally overrides its mesh,
degree, CFL number, final time, shock-filter block, and output block.
Values resolve in three layers: case defaults, then the file, then
``--override`` key=value pairs (dotted keys address nested sections and
values are parsed as TOML literals).
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python < 3.11
    import tomli as tomllib

from .cases import CASE_BUILDERS, TestCase, get_case
from .kernel import DeltaKernelError, support_width


class ConfigError(Exception):
    """Raised for unreadable, unknown, or out-of-range configuration."""


_FILTER_KEYS = {"enabled", "m", "k", "n_d", "epsilon", "sigma_min",
                "sigma_max", "mode", "indicator", "lambda_formula"}
_OUTPUT_KEYS = {"directory", "snapshot_interval", "slices", "write_vtk",
                "slice_samples"}
_TOP_KEYS = {"case", "n", "n_elem_x", "n_elem_y", "cfl", "final_time",
             "admissibility", "filter", "output"}


@dataclass
class FilterConfig:
    """Shock-capturing filter block of a run configuration."""

    enabled: bool = False
    m: int = 1
    k: int = 5
    n_d: Optional[float] = None
    epsilon: Optional[float] = None
    sigma_min: float = -9.0
    sigma_max: float = -6.0
    mode: str = "adaptive"
    indicator: str = "density"
    lambda_formula: str = "ramp"

    def resolve_epsilon(self, n: int) -> float:
        """Kernel half-width: explicit value or scaled to the grid spacing."""
        if self.epsilon is not None:
            return float(self.epsilon)
        return support_width(n, self.n_d)


@dataclass
class OutputConfig:
    """Snapshot/slice output block of a run configuration."""

    directory: str = "output"
    snapshot_interval: float = 0.0
    slices: list = field(default_factory=list)
    write_vtk: bool = False
    slice_samples: int = 512


@dataclass
class RunConfig:
    """Fully resolved parameters of one solver run."""

    case: str
    n: int
    n_elem_x: int
    n_elem_y: int
    cfl: float
    final_time: float
    admissibility: str = "strict"
    filter: FilterConfig = field(default_factory=FilterConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "RunConfig":
        if self.case not in CASE_BUILDERS:
            raise ConfigError(f"unknown case {self.case!r}; available: "
                              f"{sorted(CASE_BUILDERS)}")
        if self.admissibility not in ("strict", "post-step"):
            raise ConfigError(
                f"admissibility={self.admissibility!r} not one of "
                "'strict', 'post-step'")
        if not isinstance(self.n, int) or not 1 <= self.n <= 15:
            raise ConfigError(f"polynomial degree n={self.n!r} outside [1, 15]")
        for label, value in (("n_elem_x", self.n_elem_x),
                             ("n_elem_y", self.n_elem_y)):
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{label}={value!r} must be a positive int")
        if not (isinstance(self.cfl, (int, float)) and
                math.isfinite(self.cfl) and self.cfl > 0):
            raise ConfigError(f"cfl={self.cfl!r} must be positive and finite")
        if not (isinstance(self.final_time, (int, float)) and
                math.isfinite(self.final_time) and self.final_time >= 0):
            raise ConfigError(f"final_time={self.final_time!r} must be >= 0")
        f = self.filter
        if not isinstance(f.enabled, bool):
            raise ConfigError("filter.enabled must be a boolean")
        if f.enabled:
            if not isinstance(f.m, int) or f.m < 1:
                raise ConfigError(f"filter.m={f.m!r} must be an int >= 1")
            if not isinstance(f.k, int) or f.k < 0:
                raise ConfigError(f"filter.k={f.k!r} must be an int >= 0")
            if (f.n_d is None) == (f.epsilon is None):
                raise ConfigError(
                    "set exactly one of filter.n_d or filter.epsilon")
            if f.epsilon is not None and not 0.0 < f.epsilon <= 2.0:
                raise ConfigError(
                    f"filter.epsilon={f.epsilon!r} outside (0, 2]")
            if f.n_d is not None:
                if f.n_d <= 0:
                    raise ConfigError(f"filter.n_d={f.n_d!r} must be > 0")
                try:
                    eps = support_width(self.n, f.n_d)
                except DeltaKernelError as exc:
                    raise ConfigError(
                        f"filter.n_d={f.n_d!r} gives no valid half-width "
                        f"at degree {self.n}: {exc}") from None
                if not 0.0 < eps <= 2.0:
                    raise ConfigError(
                        f"filter.n_d={f.n_d!r} gives half-width {eps:.4g} "
                        f"outside (0, 2] at degree {self.n}")
            if f.sigma_min > f.sigma_max:
                raise ConfigError(
                    f"filter.sigma_min={f.sigma_min!r} exceeds "
                    f"sigma_max={f.sigma_max!r}")
            if f.mode not in ("adaptive", "always-on"):
                raise ConfigError(f"filter.mode={f.mode!r} not one of "
                                  "'adaptive', 'always-on'")
            if f.indicator not in ("density", "pressure"):
                raise ConfigError(
                    f"filter.indicator={f.indicator!r} not one of "
                    "'density', 'pressure'")
            if f.lambda_formula not in ("ramp", "printed"):
                raise ConfigError(
                    f"filter.lambda_formula={f.lambda_formula!r} not one of "
                    "'ramp', 'printed'")
        o = self.output
        if not isinstance(o.slice_samples, int) or o.slice_samples < 2:
            raise ConfigError("output.slice_samples must be an int >= 2")
        if not (isinstance(o.snapshot_interval, (int, float)) and
                o.snapshot_interval >= 0):
            raise ConfigError("output.snapshot_interval must be >= 0")
        for sl in o.slices:
            if not isinstance(sl, dict) or "kind" not in sl:
                raise ConfigError(f"malformed slice definition {sl!r}")
            if sl["kind"] == "diagonal":
                extra = set(sl) - {"kind", "name"}
            elif sl["kind"] == "horizontal":
                if "y" not in sl:
                    raise ConfigError(
                        f"horizontal slice needs a 'y' value: {sl!r}")
                extra = set(sl) - {"kind", "y", "name"}
            else:
                raise ConfigError(f"unknown slice kind {sl['kind']!r}")
            if extra:
                raise ConfigError(f"unknown slice keys {sorted(extra)}")
        return self

    def test_case(self) -> TestCase:
        return get_case(self.case)


def _coerce_number(value):
    """TOML ints arriving where floats are expected become floats."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return float(value)
    return value


def config_from_dict(data: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed TOML mapping."""
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a table")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    if "case" not in data:
        raise ConfigError("configuration must name a case")
    case_name = data["case"]
    if case_name not in CASE_BUILDERS:
        raise ConfigError(f"unknown case {case_name!r}; available: "
                          f"{sorted(CASE_BUILDERS)}")
    case = get_case(case_name)

    merged = copy.deepcopy(case.defaults)
    merged.setdefault("filter", {})
    merged["final_time"] = case.final_time
    for key in ("n", "n_elem_x", "n_elem_y", "cfl", "final_time",
                "admissibility"):
        if key in data:
            merged[key] = data[key]
    filt = dict(data.get("filter", {}))
    unknown = set(filt) - _FILTER_KEYS
    if unknown:
        raise ConfigError(f"unknown filter keys {sorted(unknown)}")
    base_filter = merged["filter"]
    # An explicit half-width in the file supersedes a default grid-scaled
    # width (and vice versa), so drop the competing default.
    if "epsilon" in filt and "epsilon" not in base_filter:
        base_filter.pop("n_d", None)
    if "n_d" in filt and "n_d" not in base_filter:
        base_filter.pop("epsilon", None)
    base_filter.update(filt)
    if base_filter and "enabled" not in base_filter:
        base_filter["enabled"] = True

    out = dict(data.get("output", {}))
    unknown = set(out) - _OUTPUT_KEYS
    if unknown:
        raise ConfigError(f"unknown output keys {sorted(unknown)}")

    try:
        filter_cfg = FilterConfig(**{k: _coerce_number(v) if k not in
                                     ("m", "k", "enabled", "mode",
                                      "indicator", "lambda_formula") else v
                                     for k, v in base_filter.items()})
        output_cfg = OutputConfig(**out)
        cfg = RunConfig(
            case=case_name,
            n=merged.get("n", 3),
            n_elem_x=merged.get("n_elem_x", 4),
            n_elem_y=merged.get("n_elem_y", 4),
            cfl=float(merged.get("cfl", 0.1)),
            final_time=float(merged["final_time"]),
            admissibility=merged.get("admissibility", "strict"),
            filter=filter_cfg,
            output=output_cfg,
        )
    except TypeError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    return cfg.validate()


def parse_override(text: str):
    """Split one ``key=value`` override; the value is a TOML literal.

    Values that fail to parse as TOML (e.g. bare words) are kept as
    strings, so ``case=explosion`` works without quoting.
    """
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    raw = raw.strip()
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def apply_overrides(data: dict, overrides: Sequence[str]) -> dict:
    """Apply dotted-key overrides onto a parsed configuration mapping."""
    for text in overrides:
        key, value = parse_override(text)
        parts = key.split(".")
        node = data
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(
                    f"override {key!r} descends through a non-table value")
        node[parts[-1]] = value
    return data


def load_config(path, overrides: Sequence[str] = ()) -> RunConfig:
    """Read a TOML file, apply overrides, and return a validated RunConfig."""
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from None
    apply_overrides(data, overrides)
    return config_from_dict(data)
