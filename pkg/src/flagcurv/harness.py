"""Verification runner: suite configuration, check registry and JSON reports."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

REPORT_VERSION = 1
MODULES = ("quat", "qmat", "grassmann", "forms", "liealg", "lorentz")
SEED_ENV = "FLAGCURV_SEED"


class ConfigError(ValueError):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if seed < 0:
        raise ConfigError(f"{SEED_ENV} must be non-negative")
    return seed


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = field(default_factory=default_seed)
    trials: int = 100
    k_max: int = 2
    n_max: int = 3
    N_max: int = 5
    fd_step: float = 1e-3
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if min(self.k_max, self.n_max, self.N_max) < 1:
            raise ConfigError("k_max, n_max and N_max must be positive")
        if self.N_max > 8:
            raise ConfigError(f"N_max = {self.N_max} exceeds the desk-scale bound 8")
        if self.k_max > self.n_max:
            raise ConfigError("k_max must not exceed n_max")
        if not 1e-6 <= self.fd_step <= 1e-2:
            raise ConfigError(f"fd_step {self.fd_step} outside [1e-6, 1e-2]")
        for name, tol in self.tolerances.items():
            if not (isinstance(tol, (int, float)) and tol >= 0):
                raise ConfigError(f"tolerance for {name} must be a non-negative number")

    def kn_pairs(self, candidates) -> list[tuple[int, int]]:
        return [(k, n) for k, n in candidates if k <= self.k_max and n <= self.n_max and k + n <= self.N_max]

    def tolerance(self, check: Check) -> float:
        return float(self.tolerances.get(check.name, check.tolerance))

    @classmethod
    def from_dict(cls, data: dict) -> SuiteConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> SuiteConfig:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def override(self, **changes) -> SuiteConfig:
        changes = {k: v for k, v in changes.items() if v is not None}
        if "tolerances" in changes:
            changes["tolerances"] = {**self.tolerances, **changes["tolerances"]}
        return replace(self, **changes)


@dataclass
class CheckResult:
    name: str
    module: str
    status: str
    max_residual: float
    tolerance: float
    trials: int
    seed: int
    duration_ms: float | None = None


@dataclass(frozen=True)
class Check:
    name: str
    module: str
    tolerance: float
    fn: Callable[[SuiteConfig], tuple[float, int]]
    doc: str = ""


REGISTRY: dict[str, Check] = {}


def check(name: str, tolerance: float):
    """Register ``fn(config) -> (max_residual, trials)`` under ``module.check``."""
    module = name.split(".", 1)[0]
    if module not in MODULES:
        raise ValueError(f"unknown module in check name {name!r}")

    def deco(fn):
        if name in REGISTRY:
            raise ValueError(f"duplicate check {name!r}")
        REGISTRY[name] = Check(name, module, tolerance, fn, (fn.__doc__ or "").strip())
        return fn

    return deco


def _load_checks() -> None:
    from . import checks  # noqa: F401  (registers on import)


def registered(module_filter: str = "all") -> list[Check]:
    _load_checks()
    if module_filter != "all" and module_filter not in MODULES:
        raise ConfigError(f"unknown module {module_filter!r}; choose from {', '.join(MODULES)} or all")
    return sorted((c for c in REGISTRY.values() if module_filter in ("all", c.module)), key=lambda c: c.name)


def run_check(c: Check, config: SuiteConfig, timing: bool = False) -> CheckResult:
    tol = config.tolerance(c)
    start = time.perf_counter()
    try:
        residual, trials = c.fn(config)
        residual = float(residual)
        status = "pass" if residual <= tol else "fail"
    except Exception:  # noqa: BLE001  (a crashing check is reported, not raised)
        residual, trials, status = math.inf, 0, "error"
    elapsed = (time.perf_counter() - start) * 1e3
    return CheckResult(c.name, c.module, status, residual, tol, trials, config.seed, elapsed if timing else None)


def run_suite(module_filter: str, config: SuiteConfig, jobs: int = 1, timing: bool = False) -> list[CheckResult]:
    checks = registered(module_filter)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: run_check(c, config, timing), checks))
    else:
        results = [run_check(c, config, timing) for c in checks]
    return sorted(results, key=lambda r: r.name)


def summarize(results: list[CheckResult]) -> dict:
    n_pass = sum(r.status == "pass" for r in results)
    return {"pass": n_pass, "fail": len(results) - n_pass}


def _json_float(x: float):
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return x


def report_dict(results: list[CheckResult], config: SuiteConfig | None = None) -> dict:
    checks = []
    for r in results:
        d = asdict(r)
        d["max_residual"] = _json_float(d["max_residual"])
        checks.append(d)
    return {
        "version": REPORT_VERSION,
        "config": asdict(config) if config is not None else {},
        "checks": checks,
        "summary": summarize(results),
    }


def dumps_report(results: list[CheckResult], config: SuiteConfig | None = None) -> str:
    return json.dumps(report_dict(results, config), indent=2, sort_keys=True) + "\n"


def emit_report(results: list[CheckResult], path: str | Path, config: SuiteConfig | None = None) -> int:
    """Write the JSON report; returns the exit code (0 iff nothing failed)."""
    path = Path(path)
    try:
        path.write_text(dumps_report(results, config))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return exit_code(results)


def exit_code(results: list[CheckResult]) -> int:
    return 0 if summarize(results)["fail"] == 0 else 1


def parse_report(text: str) -> tuple[dict, list[CheckResult]]:
    data = json.loads(text)
    if data.get("version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {data.get('version')!r}")
    out = []
    for d in data["checks"]:
        d = dict(d)
        if isinstance(d["max_residual"], str):
            d["max_residual"] = float(d["max_residual"])
        out.append(CheckResult(**d))
    return data, out
