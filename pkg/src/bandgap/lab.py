"""Test-signal synthesis, noise injection, the brute-force oracle, and experiments.

Two signal families cover exactness and realism: `sinc_mixture` builds
finite combinations of shifted low-pass kernels (band-limited by
construction, so ground truth at any index is a closed form), while
`lowpassed_noise` low-pass filters seeded white noise over a padded window
(band-limited up to truncation tails, closer to a Monte-Carlo sequence).

`oracle_recover` re-solves the recovery problem by a completely different
route: it parameterizes a real band-limited sequence by cosine/sine
spectral samples on a uniform frequency grid over [0, omega], forms the
quadratic objective of the truncated-input problem

    sum_{t in D, |t| <= W} (x_bl(t) - x(t))^2
      + sum_{|t| > W} x_bl(t)^2  +  rho * ||x_bl||^2,

with both infinite sums evaluated through the Parseval identity by
trapezoidal quadrature on the grid, and solves the resulting normal
equations.  The normal matrix is diagonal plus a rank-|M| correction, so
the solve goes through the Woodbury identity, which keeps very fine grids
affordable; grids this fine are what the refinement gate (output change
<= 1e-8 under grid doubling) requires.  Nothing from the operator or
solver modules is used on this path.

`run_experiment` sweeps window size, noise level, ridge weight, or gap
size over seeded Monte-Carlo trials and aggregates error metrics; reports
serialize to JSON and flat CSV.  Identical seeds give identical rows (the
wall-clock fields are the only nondeterministic part of a report).
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ExperimentError, GeometryError, OracleConditioningError, ParameterError
from .kernel import BandLimit, kernel_profile
from .masks import IndexWindow, ObservationMask, make_mask, parse_missing_spec
from .recovery import RecoveryProblem, RecoverySolution, default_rho, recover
from .series import Series

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"

ORACLE_MAX_HALF_WIDTH = 64
ORACLE_MIN_GRID_FACTOR = 4
ORACLE_DEFAULT_GRID = 50_000
ORACLE_CONDITION_LIMIT = 1e12


# ---------------------------------------------------------------------------
# signal synthesis
# ---------------------------------------------------------------------------

@dataclass
class SignalSpec:
    """Recipe for a synthetic 1D test signal.

    kind: "sinc_mixture" (centers/amplitudes) or "lowpassed_noise"
        (seed, pad).  `band` is the synthesis cutoff; keep it at or below
        the recovery cutoff when exact-recovery checks are intended.
    """

    kind: str
    band: BandLimit
    window: IndexWindow
    centers: tuple[int, ...] = ()
    amplitudes: tuple[float, ...] = ()
    seed: int | None = None
    pad: int = 256

    def __post_init__(self):
        if self.kind not in ("sinc_mixture", "lowpassed_noise"):
            raise ParameterError(f"unknown signal kind {self.kind!r}")
        if self.band.ndim != 1 or self.window.ndim != 1:
            raise ParameterError("signal synthesis is 1D")
        if self.kind == "sinc_mixture":
            if len(self.centers) == 0 or len(self.centers) != len(self.amplitudes):
                raise ParameterError("sinc_mixture needs matching nonempty centers/amplitudes")
        else:
            if self.seed is None:
                raise ParameterError("lowpassed_noise needs a seed")
            if self.pad < 0:
                raise ParameterError("pad must be nonnegative")


def sinc_mixture_values(band: BandLimit, centers, amplitudes, ts: np.ndarray) -> np.ndarray:
    """Closed-form mixture sum at arbitrary integer indices."""
    (w,) = band.axes
    out = np.zeros(len(ts), dtype=np.float64)
    for c, a in zip(centers, amplitudes):
        out += float(a) * kernel_profile(w, np.asarray(ts) - int(c))
    return out


def gen_bandlimited(spec: SignalSpec) -> Series:
    """Synthesize a band-limited series on the spec's window (deterministic per seed)."""
    window = spec.window
    ts = np.arange(window.lo, window.hi + 1)
    if spec.kind == "sinc_mixture":
        return Series(window=window, values=sinc_mixture_values(spec.band, spec.centers, spec.amplitudes, ts))
    rng = np.random.default_rng(spec.seed)
    (w,) = spec.band.axes
    src = np.arange(window.lo - spec.pad, window.hi + spec.pad + 1)
    noise = rng.standard_normal(len(src))
    lags = ts[:, None] - src[None, :]
    return Series(window=window, values=kernel_profile(w, lags) @ noise)


@dataclass(frozen=True, eq=False)
class NoisySeries:
    """A perturbed series plus the exact norm of the injected perturbation."""

    series: Series
    eta_norm: float
    sigma: float
    seed: int | None


def add_noise(series: Series, sigma: float, seed: int | None, mask: ObservationMask | None = None) -> NoisySeries:
    """Add seeded N(0, sigma^2) perturbations to the observed entries.

    With a mask, only observed entries are perturbed and eta_norm counts
    exactly those; without one, every window entry is treated as observed.
    """
    if sigma < 0:
        raise ParameterError("sigma must be nonnegative")
    if mask is not None and mask.window != series.window:
        raise GeometryError("mask and series windows differ")
    if sigma == 0:
        return NoisySeries(series=series, eta_norm=0.0, sigma=0.0, seed=seed)
    rng = np.random.default_rng(seed)
    eta = sigma * rng.standard_normal(series.window.shape)
    if mask is not None:
        for t in mask.missing:
            eta[series.window.offset_of(t)] = 0.0
    noisy = Series(window=series.window, values=series.values + eta)
    return NoisySeries(series=noisy, eta_norm=float(np.linalg.norm(eta)), sigma=sigma, seed=seed)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _oracle_inputs(problem: RecoveryProblem, grid: int):
    window = problem.mask.window
    if window.ndim != 1:
        raise GeometryError("the oracle handles 1D problems only")
    if max(abs(window.lo), abs(window.hi)) > ORACLE_MAX_HALF_WIDTH:
        raise GeometryError(
            f"oracle is restricted to windows within +-{ORACLE_MAX_HALF_WIDTH}"
        )
    if problem.mask.n_missing == 0:
        raise GeometryError("missing set is empty; nothing to recover")
    if grid < ORACLE_MIN_GRID_FACTOR * window.size:
        raise ParameterError(
            f"grid must be at least {ORACLE_MIN_GRID_FACTOR} * window size "
            f"= {ORACLE_MIN_GRID_FACTOR * window.size}"
        )
    if problem.series.window != window:
        raise GeometryError("series and mask are defined on different windows")
    rho = problem.rho if problem.rho is not None else default_rho(problem.mask.n_missing)
    if rho < 0:
        raise ParameterError("rho must be nonnegative")
    return window, float(rho)


def oracle_recover(problem: RecoveryProblem, grid: int = ORACLE_DEFAULT_GRID) -> RecoverySolution:
    """Brute-force quadratic minimization over frequency-sampled band-limited sequences.

    Parameters
    ----------
    problem : RecoveryProblem
        Same inputs as `recover`; window half-width at most 64.
    grid : int
        Number of frequency samples on [0, omega]; at least 4x the window
        size.  Accuracy improves as O(1/grid^2); check
        `oracle_grid_sensitivity` before trusting a new configuration.

    Returns
    -------
    RecoverySolution with values only (no operator/solver diagnostics --
    this code path must not touch those modules).
    """
    window, rho = _oracle_inputs(problem, grid)
    (w,) = problem.omega.axes

    missing = np.array(problem.mask.missing, dtype=np.int64)
    ts = np.arange(window.lo, window.hi + 1)
    observed_sel = ~np.isin(ts, missing)
    obs_t = ts[observed_sel]
    obs_x = problem.series.values[observed_sel]

    # Trapezoid rule on [0, w]; q is the diagonal of the Parseval form for
    # both the cosine and the sine coefficient blocks.
    omega_grid = np.linspace(0.0, w, int(grid))
    weights = np.full(int(grid), omega_grid[1] - omega_grid[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    q = weights / np.pi

    # Basis rows at the missing indices: (q_j cos(omega_j t), q_j sin(omega_j t)).
    cos_m = q[None, :] * np.cos(np.outer(missing, omega_grid))
    sin_m = q[None, :] * np.sin(np.outer(missing, omega_grid))

    # r = B_D^T x_d, accumulated one observed sample at a time to bound memory.
    r_cos = np.zeros(int(grid))
    r_sin = np.zeros(int(grid))
    for t, xt in zip(obs_t, obs_x):
        r_cos += xt * q * np.cos(omega_grid * t)
        r_sin += xt * q * np.sin(omega_grid * t)

    # Normal matrix (1+rho) Q - B_M^T B_M: diagonal minus rank-|M|; solve by
    # the Woodbury identity through the small capacitance matrix S.
    d0 = (1.0 + rho) * q
    alpha_cos = r_cos / d0
    alpha_sin = r_sin / d0
    beta = cos_m @ alpha_cos + sin_m @ alpha_sin
    capacitance = (
        np.eye(len(missing))
        - (cos_m / d0[None, :]) @ cos_m.T
        - (sin_m / d0[None, :]) @ sin_m.T
    )
    if np.linalg.cond(capacitance) > ORACLE_CONDITION_LIMIT:
        raise OracleConditioningError(
            "oracle normal equations are too ill-conditioned at this rho/gap size; "
            "shrink the instance or increase rho"
        )
    gamma = np.linalg.solve(capacitance, beta)
    coef_cos = alpha_cos + (cos_m / d0[None, :]).T @ gamma
    coef_sin = alpha_sin + (sin_m / d0[None, :]).T @ gamma

    recovered = cos_m @ coef_cos + sin_m @ coef_sin
    values = {t: float(v) for t, v in zip(problem.mask.missing, recovered)}
    return RecoverySolution(values=values, operator_diagnostics=None, solve_report=None)


def oracle_grid_sensitivity(problem: RecoveryProblem, grid: int = ORACLE_DEFAULT_GRID) -> float:
    """Max output change under grid doubling; must be <= 1e-8 to trust the oracle."""
    coarse = oracle_recover(problem, grid).vector()
    fine = oracle_recover(problem, 2 * grid).vector()
    return float(np.max(np.abs(coarse - fine)))


# ---------------------------------------------------------------------------
# experiment harness
# ---------------------------------------------------------------------------

SWEEPS = ("window", "noise", "rho", "gap")


@dataclass
class ExperimentConfig:
    """One sweep over a single parameter, repeated over seeded trials.

    sweep: "window" (half-width), "noise" (sigma), "rho", or "gap" (|M|).
    values: strictly increasing sweep values.
    seeds: one seed per trial (a plain `seed` in JSON is expanded to
        seed, seed+1, ...).  omega and synth_band are radians here; the
        JSON form uses fractions of pi.
    """

    sweep: str
    values: tuple
    seeds: tuple[int, ...]
    omega: float
    synth_band: float
    missing: str = "1..5"
    window: int = 250
    rho: float | None = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise ParameterError(f"unknown sweep {self.sweep!r}; expected one of {SWEEPS}")
        if len(self.values) == 0:
            raise ParameterError("sweep values must be nonempty")
        if list(self.values) != sorted(set(self.values)):
            raise ParameterError("sweep values must be strictly increasing")
        if len(self.seeds) < 1:
            raise ParameterError("at least one trial seed is required")

    @property
    def trials(self) -> int:
        return len(self.seeds)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ExperimentConfig":
        """Build from the CLI JSON form (omega/synth_band as fractions of pi)."""
        try:
            sweep = doc["sweep"]
            values = tuple(doc["values"])
            if "seeds" in doc:
                seeds = tuple(int(s) for s in doc["seeds"])
            else:
                base = int(doc.get("seed", 0))
                seeds = tuple(base + i for i in range(int(doc.get("trials", 1))))
            return cls(
                sweep=sweep,
                values=values,
                seeds=seeds,
                omega=float(doc["omega"]) * np.pi,
                synth_band=float(doc["synth_band"]) * np.pi,
                missing=str(doc.get("missing", "1..5")),
                window=int(doc.get("window", 250)),
                rho=None if doc.get("rho", 0.0) is None else float(doc.get("rho", 0.0)),
                sigma=float(doc.get("sigma", 0.0)),
            )
        except KeyError as exc:
            raise ParameterError(f"experiment config is missing field {exc}") from exc

    def echo(self) -> dict:
        doc = asdict(self)
        doc["values"] = list(self.values)
        doc["seeds"] = list(self.seeds)
        doc["omega_pi_fraction"] = self.omega / np.pi
        doc["synth_band_pi_fraction"] = self.synth_band / np.pi
        return doc


def _trial_signal(band: BandLimit, window: IndexWindow, seed: int) -> tuple[SignalSpec, np.ndarray]:
    """Seeded mixture with centers near the origin so truth is window-independent."""
    rng = np.random.default_rng(seed)
    n_pulses = int(rng.integers(2, 5))
    centers = tuple(int(c) for c in rng.integers(-20, 21, size=n_pulses))
    amplitudes = tuple(float(a) for a in rng.uniform(-1.0, 1.0, size=n_pulses))
    spec = SignalSpec(kind="sinc_mixture", band=band, window=window,
                      centers=centers, amplitudes=amplitudes)
    return spec, np.array(centers)


def _run_trial(config: ExperimentConfig, value, seed: int) -> dict:
    from . import operators, solvers  # harness-only; the oracle path stays clear of these

    t0 = time.perf_counter()
    synth_band = BandLimit(config.synth_band)
    omega = BandLimit(config.omega)

    half_width = int(value) if config.sweep == "window" else config.window
    window = IndexWindow(-half_width, half_width)
    missing = parse_missing_spec(config.missing)
    if config.sweep == "gap":
        missing = list(range(1, int(value) + 1))
    mask = make_mask(window, missing)
    rho = value if config.sweep == "rho" else config.rho

    spec, _ = _trial_signal(synth_band, window, seed)
    series = gen_bandlimited(spec)
    truth = sinc_mixture_values(synth_band, spec.centers, spec.amplitudes,
                                np.array([t for t in mask.missing]))

    sigma = float(value) if config.sweep == "noise" else config.sigma
    row = {
        "sweep": config.sweep,
        "value": value,
        "seed": seed,
        "sigma": sigma,
        "status": "ok",
    }

    clean = recover(RecoveryProblem(series=series, mask=mask, omega=omega, rho=rho))
    y_clean = clean.vector()
    report = clean.solve_report
    diag = clean.operator_diagnostics
    row["rho"] = report.rho
    row["spectral_norm"] = diag.spectral_norm
    row["min_eig_I_minus_A"] = diag.min_eig_I_minus_A
    row["sol_norm"] = float(np.linalg.norm(y_clean))

    if sigma > 0:
        noisy = add_noise(series, sigma, seed + 1_000_003, mask=mask)
        noisy_sol = recover(
            RecoveryProblem(series=noisy.series, mask=mask, omega=omega, rho=rho)
        )
        op = operators.assemble_operator(mask, omega)
        bound = solvers.error_bound(op, report.rho, noisy.eta_norm)
        deviation = float(np.linalg.norm(noisy_sol.vector() - y_clean))
        row["eta_norm"] = noisy.eta_norm
        row["perturbation"] = deviation
        row["perturbation_bound"] = bound
        row["bound_violation"] = int(deviation > bound * (1.0 + 1e-9))
        y_final = noisy_sol.vector()
    else:
        row["eta_norm"] = 0.0
        row["perturbation"] = 0.0
        row["perturbation_bound"] = 0.0
        row["bound_violation"] = 0
        y_final = y_clean

    err = np.abs(y_final - truth)
    row["max_abs_error"] = float(np.max(err))
    row["rms_error"] = float(np.sqrt(np.mean(err**2)))
    row["wall_ms"] = (time.perf_counter() - t0) * 1e3
    return row


def run_experiment(config: ExperimentConfig) -> dict:
    """Run the sweep; per-trial failures are recorded and skipped, all-failed raises."""
    t0 = time.perf_counter()
    rows, failures = [], []
    for value in config.values:
        for seed in config.seeds:
            try:
                rows.append(_run_trial(config, value, seed))
            except Exception as exc:  # noqa: BLE001 - record and continue
                failures.append({"sweep": config.sweep, "value": value, "seed": seed,
                                 "status": "failed", "error": f"{type(exc).__name__}: {exc}"})
    if not rows:
        raise ExperimentError("every trial failed; see report failures")

    aggregates = []
    for value in config.values:
        group = [r for r in rows if r["value"] == value]
        if not group:
            continue
        aggregates.append({
            "value": value,
            "trials": len(group),
            "mean_max_abs_error": float(np.mean([r["max_abs_error"] for r in group])),
            "max_max_abs_error": float(np.max([r["max_abs_error"] for r in group])),
            "mean_rms_error": float(np.mean([r["rms_error"] for r in group])),
            "bound_violation_count": int(np.sum([r["bound_violation"] for r in group])),
            "min_eig_I_minus_A": float(np.min([r["min_eig_I_minus_A"] for r in group])),
            "mean_sol_norm": float(np.mean([r["sol_norm"] for r in group])),
        })

    return {
        "config": config.echo(),
        "generator": RNG_ALGORITHM,
        "rows": rows,
        "failures": failures,
        "aggregates": aggregates,
        "wall_seconds": time.perf_counter() - t0,
    }


_CSV_FIELDS = [
    "sweep", "value", "seed", "sigma", "status", "rho", "spectral_norm",
    "min_eig_I_minus_A", "sol_norm", "eta_norm", "perturbation",
    "perturbation_bound", "bound_violation", "max_abs_error", "rms_error", "wall_ms",
]


def write_report_json(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")


def write_report_csv(report: dict, path) -> None:
    """Flat per-trial rows; the config echo rides along in comment lines."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# generator={report['generator']}\n")
        f.write(f"# config={json.dumps(report['config'])}\n")
        writer = csv.DictWriter(f, fieldnames=_CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in report["rows"]:
            writer.writerow(row)
