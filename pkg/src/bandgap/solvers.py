"""Direct and iterative solvers for the recovery equation (1+rho)*y = A*y + a.

For finite missing sets the matrix (1+rho)*I - A is symmetric positive
definite (its eigenvalues are at least 1 + rho - ||A|| > 0), so the direct
path uses a Cholesky factorization, which certifies definiteness as a side
effect.  The iterative path realizes the geometric-series expansion of the
inverse: y_{k+1} = (A y_k + a) / (1+rho), a contraction with factor
q = ||A||/(1+rho) < 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import NonConvergenceError, ParameterError, SolverError
from .operators import GapOperator, diagnostics


@dataclass
class SolverConfig:
    """Solver knobs; `rho` here is only a default for callers that do not pass one."""

    rho: float = 0.0
    method: str = "direct"
    tol: float = 1e-12
    max_iter: int = 10_000
    condition_warn_threshold: float = 1e-8

    def __post_init__(self):
        if self.rho < 0:
            raise ParameterError("rho must be nonnegative")
        if self.method not in ("direct", "neumann"):
            raise ParameterError(f"unknown solver method {self.method!r}")
        if not (self.tol > 0):
            raise ParameterError("tol must be positive")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be at least 1")
        if self.condition_warn_threshold <= 0:
            raise ParameterError("condition_warn_threshold must be positive")


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Solution vector plus the evidence that it solves the system."""

    y: np.ndarray
    residual: float
    iterations: int
    norm_bound: float
    rho: float
    method: str
    warnings: tuple[str, ...] = field(default_factory=tuple)


def _validate(op: GapOperator, rho: float) -> np.ndarray:
    if rho < 0:
        raise ParameterError("rho must be nonnegative")
    if op.rhs is None:
        raise SolverError("operator has no right-hand side attached")
    if not np.all(np.isfinite(op.matrix)) or not np.all(np.isfinite(op.rhs)):
        raise SolverError("non-finite entries in the system")
    return np.asarray(op.rhs, dtype=np.float64)


def _margin_and_warnings(op: GapOperator, rho: float, threshold: float) -> tuple[float, list[str]]:
    norm = diagnostics(op).spectral_norm
    margin = 1.0 + rho - norm
    if margin <= 0:
        raise SolverError(
            f"system is singular at this rho: 1 + rho - ||A|| = {margin:.3e} <= 0"
        )
    warnings = []
    if margin < threshold:
        warnings.append(
            f"ill-conditioned system: 1 + rho - ||A|| = {margin:.3e} below threshold {threshold:.1e}"
        )
    return margin, warnings


def _residual(op: GapOperator, rho: float, y: np.ndarray) -> float:
    return float(np.linalg.norm((1.0 + rho) * y - op.matrix @ y - op.rhs))


def solve_direct(op: GapOperator, rho: float, config: SolverConfig | None = None) -> SolveReport:
    """Solve ((1+rho)I - A) y = a by Cholesky factorization."""
    config = config or SolverConfig()
    a = _validate(op, rho)
    margin, warnings = _margin_and_warnings(op, rho, config.condition_warn_threshold)
    system = (1.0 + rho) * np.eye(op.size) - op.matrix
    try:
        factor = linalg.cho_factor(system)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"positive-definite factorization failed: {exc}") from exc
    y = linalg.cho_solve(factor, a)
    return SolveReport(
        y=y,
        residual=_residual(op, rho, y),
        iterations=0,
        norm_bound=1.0 / margin,
        rho=rho,
        method="direct",
        warnings=tuple(warnings),
    )


def solve_neumann(op: GapOperator, rho: float, config: SolverConfig | None = None) -> SolveReport:
    """Solve by the geometric fixed-point iteration y <- (A y + a)/(1+rho).

    Stops once the successive-iterate distance certifies, through the
    contraction factor q = ||A||/(1+rho), that the remaining error is below
    `tol`: the threshold on ||y_{k+1} - y_k|| is tol * min(1, (1-q)/q).  A
    plain threshold at `tol` would leave an error of up to tol*q/(1-q),
    which is orders of magnitude above tol when ||A|| is close to 1.
    """
    config = config or SolverConfig()
    a = _validate(op, rho)
    margin, warnings = _margin_and_warnings(op, rho, config.condition_warn_threshold)
    q = (1.0 + rho - margin) / (1.0 + rho)
    if not (q < 1.0):
        raise SolverError(f"contraction factor ||A||/(1+rho) = {q:.6f} is not below 1")
    threshold = config.tol * min(1.0, (1.0 - q) / q) if q > 0 else config.tol
    scale = 1.0 / (1.0 + rho)
    y = scale * a
    iterations = 0
    for _ in range(config.max_iter):
        y_next = scale * (op.matrix @ y + a)
        step = float(np.linalg.norm(y_next - y))
        y = y_next
        if step <= threshold:
            return SolveReport(
                y=y,
                residual=_residual(op, rho, y),
                iterations=iterations,
                norm_bound=1.0 / margin,
                rho=rho,
                method="neumann",
                warnings=tuple(warnings),
            )
        iterations += 1
    raise NonConvergenceError(
        f"no convergence after {config.max_iter} iterations (last step {step:.3e}, "
        f"threshold {threshold:.3e})",
        iterate=y,
        residual=_residual(op, rho, y),
        iterations=config.max_iter,
    )


def error_bound(op: GapOperator, rho: float, eta_norm: float) -> float:
    """Worst-case output perturbation for an input perturbation of norm eta_norm.

    Returns eta_norm / (1 + rho - ||A||); raises when 1 + rho <= ||A||,
    where no such bound is available.
    """
    if eta_norm < 0:
        raise ParameterError("perturbation norm must be nonnegative")
    if rho < 0:
        raise ParameterError("rho must be nonnegative")
    norm = diagnostics(op).spectral_norm
    margin = 1.0 + rho - norm
    if margin <= 0:
        raise SolverError("bound unavailable: 1 + rho <= ||A||")
    return eta_norm / margin
