"""High-level recovery of missing samples from observed series.

Given a windowed series, a mask and a band limit, `recover` assembles the
gap operator and right-hand side, solves (1+rho)*y = A*y + a, and returns
the recovered values on the missing set together with spectral and solver
diagnostics.  Only the missing trace is ever computed; the in-sample
band-limited approximation on the observed set is never materialized.

`recover_single_value` is the closed form for a single gap,

    x_hat(s) = omega/(pi - omega) * sum_{m != s} x(m) * sinc(omega*(s - m)),

and `recover_2d` handles grids with the separable rectangular-band kernel,
collapsing exactly to the 1D path when the window is a single row or column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ParameterError
from .kernel import BandLimit, kernel_profile
from .masks import IndexWindow, ObservationMask, apply_mask, make_mask, observed_halfline_exists
from .operators import (
    GapOperator,
    OperatorDiagnostics,
    assemble_operator,
    assemble_rhs,
    diagnostics,
    with_rhs,
)
from .series import Series
from .solvers import SolveReport, SolverConfig, solve_direct, solve_neumann

# A tiny ridge buys stability once the gap set is large enough for the
# smallest eigenvalue of I - A to become tiny; small gaps are left exact.
SMALL_GAP_LIMIT = 32
DEFAULT_RHO_LARGE = 1e-4

HALFLINE_WARNING = (
    "observed set contains no half-line: missing samples touch every side of "
    "the window, so uniqueness of the underlying band-limited extension is "
    "not guaranteed (the finite system still has a unique solution)"
)


def default_rho(n_missing: int) -> float:
    return 0.0 if n_missing <= SMALL_GAP_LIMIT else DEFAULT_RHO_LARGE


@dataclass
class RecoveryProblem:
    """Inputs of one recovery: observed series, mask, band limit, ridge weight.

    `rho=None` selects the default policy (0 for small gap sets, a tiny
    ridge for large ones).  Missing entries of the series are ignored.
    """

    series: Series
    mask: ObservationMask
    omega: BandLimit
    rho: float | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True, eq=False)
class RecoverySolution:
    """Recovered values keyed by missing index, plus solve evidence.

    The brute-force lab oracle returns values only (diagnostics fields None).
    """

    values: dict
    operator_diagnostics: OperatorDiagnostics | None
    solve_report: SolveReport | None
    warnings: tuple[str, ...] = ()

    def vector(self) -> np.ndarray:
        return np.array(list(self.values.values()), dtype=np.float64)


def _resolve_rho(problem: RecoveryProblem) -> float:
    rho = problem.rho if problem.rho is not None else default_rho(problem.mask.n_missing)
    if rho < 0:
        raise ParameterError("rho must be nonnegative")
    return float(rho)


def _solve(op: GapOperator, rho: float, config: SolverConfig) -> SolveReport:
    if config.method == "neumann":
        return solve_neumann(op, rho, config)
    return solve_direct(op, rho, config)


def _recover_pipeline(problem: RecoveryProblem) -> RecoverySolution:
    mask, series, omega = problem.mask, problem.series, problem.omega
    if mask.n_missing == 0:
        raise GeometryError("missing set is empty; nothing to recover")
    if series.window != mask.window:
        raise GeometryError("series and mask are defined on different windows")
    if omega.ndim != mask.window.ndim:
        raise ParameterError("band limit dimensionality does not match the window")
    rho = _resolve_rho(problem)

    warnings = []
    if not observed_halfline_exists(mask):
        warnings.append(HALFLINE_WARNING)

    op = assemble_operator(mask, omega)
    diag = diagnostics(op)
    masked = apply_mask(series, mask)

    if not np.any(masked.values):
        # All observed samples are zero: the unique solution is exactly zero.
        report = SolveReport(
            y=np.zeros(mask.n_missing),
            residual=0.0,
            iterations=0,
            norm_bound=1.0 / (1.0 + rho - diag.spectral_norm),
            rho=rho,
            method=problem.solver.method,
        )
    else:
        rhs = assemble_rhs(series, mask, omega)
        report = _solve(with_rhs(op, rhs), rho, problem.solver)
    warnings.extend(report.warnings)

    values = {t: float(v) for t, v in zip(op.order, report.y)}
    return RecoverySolution(
        values=values,
        operator_diagnostics=diag,
        solve_report=report,
        warnings=tuple(warnings),
    )


def recover(problem: RecoveryProblem) -> RecoverySolution:
    """Recover the missing trace; dispatches on window dimensionality."""
    if problem.mask.window.ndim == 2:
        return recover_2d(problem)
    return _recover_pipeline(problem)


def recover_single_value(series: Series, s: int, omega: BandLimit) -> float:
    """Closed-form recovery of one missing sample from all other window samples."""
    if series.ndim != 1:
        raise GeometryError("single-value recovery is a 1D operation")
    if not series.window.contains(s):
        raise GeometryError(f"index {s} outside window [{series.window.lo}, {series.window.hi}]")
    (w,) = omega.axes
    ts = np.arange(series.window.lo, series.window.hi + 1)
    keep = ts != s
    weighted = kernel_profile(w, s - ts[keep]) @ series.values[keep]
    return float(np.pi / (np.pi - w) * weighted)


def _degenerate_axes(window: IndexWindow) -> list[int]:
    return [axis for axis, extent in enumerate(window.shape) if extent == 1]


def _collapse_to_1d(problem: RecoveryProblem, squeeze_axis: int) -> tuple[RecoveryProblem, int]:
    """Strip a single-sample axis; recovery along a one-row window is a 1D problem."""
    keep_axis = 1 - squeeze_axis
    window = problem.mask.window
    lo, hi = window.lo[keep_axis], window.hi[keep_axis]
    sub_window = IndexWindow(lo, hi)
    missing_1d = [t[keep_axis] for t in problem.mask.missing]
    values = problem.series.values.reshape(window.shape)
    sub_values = values[0, :] if squeeze_axis == 0 else values[:, 0]
    sub_problem = RecoveryProblem(
        series=Series(window=sub_window, values=sub_values),
        mask=make_mask(sub_window, missing_1d),
        omega=BandLimit(problem.omega.axes[keep_axis]),
        rho=problem.rho,
        solver=problem.solver,
    )
    return sub_problem, keep_axis


def recover_2d(problem: RecoveryProblem) -> RecoverySolution:
    """Recovery on an integer grid with the separable rectangular-band kernel.

    A window that is a single row or column carries no resolvable structure
    along the degenerate axis, so the problem is routed through the 1D
    pipeline on the other axis; keeping the tensor kernel instead would
    silently rescale everything by the degenerate axis' omega/pi.
    """
    if problem.mask.window.ndim != 2:
        raise GeometryError("recover_2d requires a 2D window")
    degenerate = _degenerate_axes(problem.mask.window)
    if degenerate and problem.mask.window.size > 1:
        squeeze_axis = degenerate[0]
        sub_problem, keep_axis = _collapse_to_1d(problem, squeeze_axis)
        solution = _recover_pipeline(sub_problem)
        fixed = problem.mask.window.lo[squeeze_axis]
        remap = {}
        for t1d, v in solution.values.items():
            key = (fixed, t1d) if squeeze_axis == 0 else (t1d, fixed)
            remap[key] = v
        values = {t: remap[t] for t in problem.mask.missing}
        return RecoverySolution(
            values=values,
            operator_diagnostics=solution.operator_diagnostics,
            solve_report=solution.solve_report,
            warnings=solution.warnings,
        )
    return _recover_pipeline(problem)
