"""Short-horizon forecasting as interpolation against a dummy long-horizon forecast.

Extrapolating a band-limited approximation of past data is numerically
fragile, because the smallest eigenvalue of I - A shrinks rapidly as the
prediction range grows.  Instead, pick a gap length m larger than the
horizon actually wanted, place an arbitrary square-summable "dummy"
sequence beyond the gap, and recover the gap {1..m} as an interior
interpolation between the observed past {-q..0} and the dummy {m+1..N}.
Only the first few recovered values are accepted as the forecast; their
dependence on the dummy weakens as m grows, which `dummy_sensitivity`
measures empirically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ParameterError
from .kernel import BandLimit
from .masks import IndexWindow, make_mask
from .recovery import RecoveryProblem, RecoverySolution, recover
from .series import Series
from .solvers import SolverConfig


@dataclass
class ForecastSpec:
    """Forecast inputs.

    past: observed samples on {-q..0} (q at least 1).
    horizon: number of accepted forecast values (m~ in the algorithm).
    gap: length m of the recovered range {1..m}; must exceed the horizon.
    dummy: samples on {gap+1..n}; None means the zero dummy (which adds no
        information and is the canonical default).
    n: outer truncation bound; required when dummy is None, otherwise taken
        from the dummy's window.
    rho: ridge weight; 0 is sound here because the gap set is finite, and a
        conditioning warning from the solver signals when a small positive
        value would help.
    """

    past: Series
    horizon: int
    gap: int
    omega: BandLimit
    dummy: Series | None = None
    n: int | None = None
    rho: float = 0.0
    solver: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True, eq=False)
class ForecastResult:
    """Accepted forecast on {1..horizon}; full_gap holds all of {1..gap}."""

    values: np.ndarray
    full_gap: np.ndarray
    solution: RecoverySolution
    horizon: int
    gap: int


def _validate_spec(spec: ForecastSpec) -> tuple[int, int]:
    if spec.horizon < 1:
        raise ParameterError("forecast horizon must be at least 1")
    if spec.gap <= spec.horizon:
        raise ParameterError(
            f"gap length ({spec.gap}) must exceed the accepted horizon ({spec.horizon})"
        )
    if spec.past.ndim != 1 or spec.omega.ndim != 1:
        raise GeometryError("forecasting is a 1D operation")
    if spec.past.window.hi != 0 or spec.past.window.lo > -1:
        raise GeometryError(
            f"past series must live on {{-q..0}} with q >= 1, got "
            f"[{spec.past.window.lo}, {spec.past.window.hi}]"
        )
    if spec.dummy is not None:
        lo, hi = spec.dummy.window.lo, spec.dummy.window.hi
        if lo != spec.gap + 1:
            raise GeometryError(f"dummy must start at gap+1 = {spec.gap + 1}, got {lo}")
        if spec.n is not None and spec.n != hi:
            raise ParameterError(f"n = {spec.n} contradicts the dummy window end {hi}")
        n = hi
    else:
        if spec.n is None:
            raise ParameterError("either a dummy series or the truncation bound n is required")
        n = spec.n
    if n <= spec.gap:
        raise ParameterError(f"truncation bound n ({n}) must exceed the gap length ({spec.gap})")
    return -int(spec.past.window.lo), int(n)


def forecast(spec: ForecastSpec) -> ForecastResult:
    """Run the dummy-interpolation forecast; accepts the first `horizon` values."""
    q, n = _validate_spec(spec)
    window = IndexWindow(-q, n)
    values = np.zeros(window.size)
    values[: q + 1] = spec.past.values
    if spec.dummy is not None:
        values[q + 1 + spec.gap :] = spec.dummy.values
    mask = make_mask(window, range(1, spec.gap + 1))
    problem = RecoveryProblem(
        series=Series(window=window, values=values),
        mask=mask,
        omega=spec.omega,
        rho=spec.rho,
        solver=spec.solver,
    )
    solution = recover(problem)
    full_gap = solution.vector()
    return ForecastResult(
        values=full_gap[: spec.horizon],
        full_gap=full_gap,
        solution=solution,
        horizon=spec.horizon,
        gap=spec.gap,
    )


@dataclass(frozen=True)
class SensitivityReport:
    """Max pairwise forecast distance per gap length, and whether it decays."""

    gaps: tuple[int, ...]
    distances: tuple[float, ...]
    non_increasing: bool
    violations: tuple[int, ...]  # positions where a step increased


def dummy_sensitivity(
    past: Series,
    horizon: int,
    dummies: list[Series],
    gaps: list[int],
    omega: BandLimit,
    rho: float = 0.0,
    solver: SolverConfig | None = None,
) -> SensitivityReport:
    """Measure how much the accepted forecast depends on the dummy choice.

    Each dummy is given on the full future window {1..n} and is restricted
    to {m+1..n} for each gap length m, so a dummy keeps its values at fixed
    times while the gap grows.  For each gap the report records the maximum
    pairwise distance between the accepted forecasts across dummies; the
    theory predicts the sequence fades as the gap grows, so a single
    increasing step is flagged, not an error.
    """
    if len(dummies) < 2:
        raise ParameterError("at least two dummies are required")
    if list(gaps) != sorted(set(int(g) for g in gaps)):
        raise ParameterError("gap lengths must be strictly increasing")
    windows = {d.window for d in dummies}
    if len(windows) != 1:
        raise GeometryError("all dummies must share one window")
    dummy_window = dummies[0].window
    if dummy_window.ndim != 1 or dummy_window.lo != 1:
        raise GeometryError("dummies must be defined on {1..n}")
    n = dummy_window.hi
    if gaps[-1] >= n:
        raise GeometryError(f"largest gap {gaps[-1]} leaves no dummy range before n = {n}")

    solver = solver or SolverConfig()
    distances = []
    for m in gaps:
        tail = IndexWindow(m + 1, n)
        forecasts = []
        for dummy in dummies:
            spec = ForecastSpec(
                past=past,
                horizon=horizon,
                gap=int(m),
                omega=omega,
                dummy=dummy.restricted(tail),
                rho=rho,
                solver=solver,
            )
            forecasts.append(forecast(spec).values)
        worst = 0.0
        for i in range(len(forecasts)):
            for j in range(i + 1, len(forecasts)):
                worst = max(worst, float(np.linalg.norm(forecasts[i] - forecasts[j])))
        distances.append(worst)

    violations = tuple(
        k for k in range(1, len(distances)) if distances[k] > distances[k - 1]
    )
    return SensitivityReport(
        gaps=tuple(int(g) for g in gaps),
        distances=tuple(distances),
        non_increasing=not violations,
        violations=violations,
    )
