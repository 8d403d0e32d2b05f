"""Data-generating processes and the Monte Carlo rejection-rate harness."""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .bootstrap import BootstrapConfig, run_bootstrap_test
from .exceptions import ConfigError, LassorootError
from .knot_tests import (
    LagRule,
    LimitSimConfig,
    LimitTable,
    TestConfig,
    ensure_table,
    tau_statistic,
)
from .prng import SeedStream
from .series import Detrend, Series

__all__ = [
    "VolatilitySpec",
    "DgpSpec",
    "TestSpec",
    "McDesign",
    "McCellResult",
    "McReport",
    "volatility_path",
    "generate",
    "run_mc",
    "parse_design",
]


@dataclass(frozen=True)
class VolatilitySpec:
    """Smooth logistic transition between two variance regimes."""

    s1_sq: float = 1.0
    s2_sq: float = 1.0
    kappa: float = 0.5
    gamma_mode: str | float = "local"  # "local" -> 25 / T
    constant: bool = False

    def __post_init__(self):
        if self.s1_sq <= 0 or self.s2_sq <= 0:
            raise ConfigError("regime variances must be positive")
        if not 0 < self.kappa < 1:
            raise ConfigError("kappa must be in (0, 1)")


def volatility_path(spec: VolatilitySpec, T: int) -> np.ndarray:
    """Unconditional volatility sigma_t (standard deviations), t = 0..T."""
    t = np.arange(T + 1, dtype=float)
    if spec.constant:
        return np.full(T + 1, np.sqrt(spec.s1_sq))
    gamma = 25.0 / T if spec.gamma_mode == "local" else float(spec.gamma_mode)
    S = 1.0 / (1.0 + np.exp(-gamma * (t - np.floor(spec.kappa * T))))
    return np.sqrt(spec.s1_sq + (spec.s2_sq - spec.s1_sq) * S)


@dataclass(frozen=True)
class DgpSpec:
    """Local-to-unity AR(1) with ARMA(1,1) errors and time-varying volatility."""

    T: int
    c: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    vol: VolatilitySpec = field(default_factory=lambda: VolatilitySpec(constant=True))
    burn_in: int = 0

    def __post_init__(self):
        if self.T < 10:
            raise ConfigError("T must be at least 10")
        if self.c > 0:
            raise ConfigError("non-centrality c must be <= 0")
        if not (-1 < self.phi < 1 and -1 < self.theta < 1):
            raise ConfigError("phi and theta must be in (-1, 1)")

    @property
    def rho(self) -> float:
        return 1.0 + self.c / self.T


def generate(spec: DgpSpec, stream: SeedStream) -> Series:
    """Simulate y_0, ..., y_T with y_0 = 0 and zero pre-sample error terms."""
    T = spec.T
    n = T + 1 + spec.burn_in
    eps = stream.standard_normal(n)
    sigma = volatility_path(spec.vol, T)
    if spec.burn_in:
        sigma = np.concatenate((np.full(spec.burn_in, sigma[0]), sigma))
    m = sigma * eps
    m[1:] += spec.theta * eps[:-1]  # lagged innovation enters unscaled
    v = lfilter([1.0], [1.0, -spec.phi], m)
    if spec.burn_in:
        v = v[spec.burn_in :]
    y = np.empty(T + 1)
    y[0] = 0.0
    y[1:] = lfilter([1.0], [1.0, -spec.rho], v[1:])
    return Series(y)


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # not a pytest class
    """One test column of the rejection-rate table."""

    name: str
    method: str  # "asymptotic" | "bootstrap"
    q: int | str = "auto"  # bootstrap recolouring lag, "auto" -> q = p

    def __post_init__(self):
        if self.method not in ("asymptotic", "bootstrap"):
            raise ConfigError(f"unknown test method {self.method!r}")


@dataclass(frozen=True)
class McDesign:
    cells: tuple[DgpSpec, ...]
    tests: tuple[TestSpec, ...]
    detrend: Detrend = Detrend.CONSTANT
    lag: LagRule = field(default_factory=lambda: LagRule("rsmaic", 4))
    reps: int = 1000
    B: int = 199
    level: float = 0.05
    seed: int = 0
    multiplier: str = "gaussian"
    size_adjust: bool = True

    def __post_init__(self):
        object.__setattr__(self, "detrend", Detrend.from_string(self.detrend))
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if not 0 < self.level < 1:
            raise ConfigError("level must be in (0, 1)")


@dataclass(frozen=True)
class McCellResult:
    dgp: DgpSpec
    rates: dict  # test name -> rejection rate
    std_errors: dict  # test name -> Monte Carlo standard error
    n_failed: dict  # test name -> failed replicates


@dataclass(frozen=True)
class McReport:
    design: McDesign
    cells: tuple[McCellResult, ...]

    def to_csv(self) -> str:
        names = [t.name for t in self.design.tests]
        header = ["T", "c", "phi", "theta", "s2_sq", "kappa"]
        for name in names:
            header += [name, f"{name}_se", f"{name}_failed"]
        rows = [",".join(header)]
        for cell in self.cells:
            d = cell.dgp
            row = [str(d.T), str(d.c), str(d.phi), str(d.theta),
                   str(d.vol.s1_sq if d.vol.constant else d.vol.s2_sq),
                   str(d.vol.kappa)]
            for name in names:
                row += [f"{cell.rates[name]:.6f}", f"{cell.std_errors[name]:.6f}",
                        str(cell.n_failed[name])]
            rows.append(",".join(row))
        return "\n".join(rows) + "\n"

    def to_markdown(self) -> str:
        names = [t.name for t in self.design.tests]
        header = ["T", "c", "phi", "theta"] + names
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join(["---"] * len(header)) + "|"]
        for cell in self.cells:
            d = cell.dgp
            row = [str(d.T), str(d.c), str(d.phi), str(d.theta)]
            row += [f"{cell.rates[n]:.3f} ({cell.std_errors[n]:.3f})" for n in names]
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"


def _bootstrap_seed(master: int, cell: int, rep: int) -> int:
    key = SeedStream(master, (cell, rep, 0xB0)).key()
    return int(key[0] % np.uint64(2**62))


def _cell_statistics(design: McDesign, dgp: DgpSpec, cell_index: int, cfg: TestConfig):
    """Knot statistics for every Monte Carlo replicate of one grid cell."""
    stats = np.full(design.reps, np.nan)
    failures = 0
    for r in range(design.reps):
        stream = SeedStream(design.seed, (cell_index, r))
        y = generate(dgp, stream)
        try:
            stats[r] = tau_statistic(y, cfg).statistic
        except LassorootError:
            failures += 1
    return stats, failures


def _run_cell(
    design: McDesign,
    dgp: DgpSpec,
    cell_index: int,
    table: LimitTable | None,
) -> McCellResult:
    cfg = TestConfig(detrend=design.detrend, lag=design.lag)
    rates, ses, failed = {}, {}, {}

    asy_tests = [t for t in design.tests if t.method == "asymptotic"]
    if asy_tests:
        stats, n_fail = _cell_statistics(design, dgp, cell_index, cfg)
        valid = np.isfinite(stats)
        adjusting = design.size_adjust and dgp.c < 0
        if adjusting:
            null_stats, _ = _cell_statistics(
                design, replace(dgp, c=0.0), cell_index, cfg
            )
            cv = float(np.quantile(null_stats[np.isfinite(null_stats)], 1.0 - design.level))
        else:
            if table is None:
                raise ConfigError("asymptotic tests need a limit quantile table")
            cv = table.quantile(1.0 - design.level)
        rej = stats[valid] >= cv
        for t in asy_tests:
            rate = float(rej.mean()) if rej.size else float("nan")
            rates[t.name] = rate
            ses[t.name] = float(np.sqrt(rate * (1.0 - rate) / max(rej.size, 1)))
            failed[t.name] = n_fail

    for t in design.tests:
        if t.method != "bootstrap":
            continue
        hits = 0
        used = 0
        n_fail = 0
        for r in range(design.reps):
            stream = SeedStream(design.seed, (cell_index, r))
            y = generate(dgp, stream)
            bs_cfg = BootstrapConfig(
                B=design.B,
                q=t.q,
                multiplier=design.multiplier,
                seed=_bootstrap_seed(design.seed, cell_index, r),
                level=design.level,
            )
            try:
                result = run_bootstrap_test(y, cfg, bs_cfg)
            except LassorootError:
                n_fail += 1
                continue
            used += 1
            hits += int(result.reject)
        rate = hits / used if used else float("nan")
        rates[t.name] = rate
        ses[t.name] = float(np.sqrt(rate * (1.0 - rate) / max(used, 1)))
        failed[t.name] = n_fail

    return McCellResult(dgp, rates, ses, failed)


def _cell_digest(design: McDesign, dgp: DgpSpec, cell_index: int) -> str:
    ident = repr((dgp, cell_index, design.tests, design.detrend.value, design.lag,
                  design.reps, design.B, design.level, design.seed,
                  design.multiplier, design.size_adjust))
    return hashlib.sha256(ident.encode()).hexdigest()[:16]


def run_mc(
    design: McDesign,
    table: LimitTable | None = None,
    cache_dir: str | Path | None = None,
) -> McReport:
    """Rejection-rate table over the design grid, resumable per grid cell.

    `table` supplies asymptotic critical values; when omitted and needed it
    is simulated (and cached in `cache_dir` when given).
    """
    needs_table = any(t.method == "asymptotic" for t in design.tests) and (
        not design.size_adjust or any(d.c == 0 for d in design.cells)
    )
    if table is None and needs_table:
        table = ensure_table(
            LimitSimConfig(steps=2000, reps=50_000, detrend=design.detrend, seed=97),
            cache_dir,
        )
    cache = Path(cache_dir) if cache_dir is not None else None
    results = []
    for g, dgp in enumerate(design.cells):
        cell_path = None
        if cache is not None:
            cache.mkdir(parents=True, exist_ok=True)
            cell_path = cache / f"mc_cell_{_cell_digest(design, dgp, g)}.json"
            if cell_path.exists():
                payload = json.loads(cell_path.read_text())
                results.append(
                    McCellResult(dgp, payload["rates"], payload["se"], payload["failed"])
                )
                continue
        cell = _run_cell(design, dgp, g, table)
        if cell_path is not None:
            cell_path.write_text(json.dumps(
                {"rates": cell.rates, "se": cell.std_errors, "failed": cell.n_failed}
            ))
        results.append(cell)
    return McReport(design, tuple(results))


# --- design files ------------------------------------------------------------

_TEST_SUITE = {
    "tau_asy": TestSpec("tau_asy", "asymptotic"),
    "tau_boot": TestSpec("tau_boot", "bootstrap", "auto"),
    "tau_boot_q0": TestSpec("tau_boot_q0", "bootstrap", 0),
}


def _parse_scalar(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("auto", "local"):
        return low
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_design(path: str | Path) -> McDesign:
    """Read a flat `key = value` design file (comma-separated grid values)."""
    entries: dict[str, list] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = [_parse_scalar(v) for v in value.split(",")]

    _MISSING = object()

    def one(key, default=_MISSING):
        if key not in entries:
            if default is _MISSING:
                raise ConfigError(f"{path}: missing required key {key!r}")
            return default
        vals = entries.pop(key)
        if len(vals) != 1:
            raise ConfigError(f"{path}: key {key!r} must be scalar")
        return vals[0]

    def many(key, default):
        return entries.pop(key, list(default))

    reps = int(one("mc.reps", 1000))
    B = int(one("mc.B", 199))
    level = float(one("mc.level", 0.05))
    seed = int(one("mc.seed", 0))
    size_adjust = bool(one("mc.size_adjust", True))
    detrend = str(one("test.detrend", "constant"))
    lag_method = str(one("test.lag", "rsmaic"))
    kmax = one("test.kmax", "auto")
    multiplier = str(one("test.multiplier", "gaussian"))
    suite = [str(s) for s in many("test.suite", ["tau_asy", "tau_boot"])]
    q_default = one("test.q", "auto")

    tests = []
    for name in suite:
        if name not in _TEST_SUITE:
            raise ConfigError(
                f"{path}: unknown test {name!r}; choose from {sorted(_TEST_SUITE)}"
            )
        spec = _TEST_SUITE[name]
        if spec.method == "bootstrap" and name == "tau_boot":
            spec = TestSpec(name, "bootstrap", q_default)
        tests.append(spec)

    lag = LagRule(
        method=lag_method,
        k_max=None if kmax == "auto" else int(kmax),
        fixed=0 if kmax == "auto" else int(kmax),
    )

    Ts = [int(v) for v in many("dgp.T", [100])]
    cs = [float(v) for v in many("dgp.c", [0.0])]
    phis = [float(v) for v in many("dgp.phi", [0.0])]
    thetas = [float(v) for v in many("dgp.theta", [0.0])]
    s1 = float(one("dgp.vol.s1_sq", 1.0))
    s2s = [float(v) for v in many("dgp.vol.s2_sq", [s1])]
    kappa = float(one("dgp.vol.kappa", 0.5))
    gamma_mode = one("dgp.vol.gamma", "local")
    constant = bool(one("dgp.vol.constant", s1 == s2s[0] and len(s2s) == 1))
    burn_in = int(one("dgp.burn_in", 0))

    unknown = [k for k in entries if not k.startswith(("dgp.", "mc.", "test."))]
    if entries:
        raise ConfigError(f"{path}: unrecognised keys {sorted(entries)}")
    del unknown

    cells = []
    for T, c, phi, theta, s2 in itertools.product(Ts, cs, phis, thetas, s2s):
        vol = VolatilitySpec(s1, s2, kappa, gamma_mode, constant and s1 == s2)
        cells.append(DgpSpec(T, c, phi, theta, vol, burn_in))

    return McDesign(
        cells=tuple(cells),
        tests=tuple(tests),
        detrend=detrend,
        lag=lag,
        reps=reps,
        B=B,
        level=level,
        seed=seed,
        multiplier=multiplier,
        size_adjust=size_adjust,
    )
