"""AR coefficient estimation: Hermitian Toeplitz Yule-Walker solves (Levinson
recursion with a dense fallback) and the spatial / single-antenna estimators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acov import AcovEstimate, HermitianToeplitz, acov_sequence, build_toeplitz

CONDITION_LIMIT = 1e12
RESIDUAL_RTOL = 1e-8

TIME_BASED_PREFIX = "time-based-"


class IllConditionedError(np.linalg.LinAlgError):
    """Yule-Walker system too close to singular (or lag-0 estimate <= 0)."""

    def __init__(self, message: str, condition_number: float):
        super().__init__(f"{message} (condition estimate {condition_number:.3e})")
        self.condition_number = condition_number


@dataclass(frozen=True)
class ARCoeffEstimate:
    """Estimated AR coefficients, kept complex-valued.

    For real ground truth the imaginary parts carry no signal and vanish in
    mean; reporting extracts the real part and tracks ``imag_norm`` as a
    sanity metric.
    """

    coeffs: np.ndarray
    variant: str
    condition_number: float
    source_dims: tuple[int, int]

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def real_coeffs(self) -> np.ndarray:
        return self.coeffs.real.copy()

    @property
    def imag_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs.imag))


def _levinson(lags: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """Solve T x = b for the Hermitian Toeplitz T with first row ``lags``.

    Classic O(p^2) Levinson recursion carrying the auxiliary vector v that
    solves the bordered column system; returns None on breakdown (prediction
    error loses positivity), leaving the dense path to decide.
    """
    p = len(rhs)
    r0 = lags[0].real
    tiny = 1e-14 * max(abs(r0), 1.0)
    if r0 <= tiny:
        return None
    x = np.array([rhs[0] / r0], dtype=complex)
    if p == 1:
        return x
    v = np.array([lags[1] / r0], dtype=complex)
    for m in range(1, p):
        u_conj = np.conj(lags[m:0:-1])  # conj of [r(m), ..., r(1)]
        denom = r0 - np.dot(u_conj, v)
        if not np.isfinite(denom) or denom.real <= tiny or abs(denom) <= tiny:
            return None
        x_last = (rhs[m] - np.dot(u_conj, x)) / denom
        x = np.concatenate([x - x_last * v, [x_last]])
        if m < p - 1:
            kappa = (lags[m + 1] - np.dot(lags[1 : m + 1], v)) / np.conj(denom)
            v = np.concatenate([[kappa], v - kappa * np.conj(v[::-1])])
    return x


def _solve_with_condition(matrix: HermitianToeplitz, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    rhs = np.asarray(rhs, dtype=complex).reshape(-1)
    if len(rhs) != matrix.dim:
        raise ValueError(f"rhs length {len(rhs)} != matrix dim {matrix.dim}")
    dense = matrix.dense()
    eigs = np.abs(np.linalg.eigvalsh(dense))
    cond = float("inf") if eigs.min() == 0.0 else float(eigs.max() / eigs.min())
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedError("Yule-Walker system is numerically singular", cond)

    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return np.zeros(matrix.dim, dtype=complex), cond

    solution = _levinson(matrix.lags, rhs)
    if solution is not None and np.linalg.norm(dense @ solution - rhs) <= RESIDUAL_RTOL * rhs_norm:
        return solution, cond
    # indefinite or marginal system: dense Hermitian solve
    solution = np.linalg.solve(dense, rhs)
    if np.linalg.norm(dense @ solution - rhs) > RESIDUAL_RTOL * rhs_norm:
        raise IllConditionedError("Yule-Walker solve failed the residual check", cond)
    return solution, cond


def solve_yule_walker(matrix: HermitianToeplitz, rhs) -> np.ndarray:
    """Solve R_p a = r_p; the solution satisfies ||R a - r|| <= 1e-8 ||r||.

    Raises IllConditionedError when the condition estimate (ratio of extreme
    eigenvalue moduli of the dense matrix) exceeds 1e12.
    """
    solution, _ = _solve_with_condition(matrix, np.asarray(rhs))
    return solution


def estimate_ar(
    obs,
    order: int,
    variant: str,
    innovation_variance: float,
    noise_variance: float,
) -> ARCoeffEstimate:
    """Spatially averaged Yule-Walker estimate from an N_r x T observation set.

    Pipeline: autocovariance sequence (lags 0..p) -> p x p Hermitian Toeplitz
    plus right-hand side (lags 1..p) -> solve.  A non-positive corrected
    lag-0 estimate is reported through the ill-conditioned error path rather
    than silently clamped.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    seq = acov_sequence(obs, order, variant, innovation_variance, noise_variance)
    return _estimate_from_sequence(seq, order, variant)


def _estimate_from_sequence(seq: AcovEstimate, order: int, variant: str) -> ARCoeffEstimate:
    lag0 = seq.values[0].real
    if lag0 <= 0.0:
        raise IllConditionedError(
            f"corrected lag-0 autocovariance is not positive ({lag0:.3e})", float("inf")
        )
    matrix = build_toeplitz(seq, order)
    coeffs, cond = _solve_with_condition(matrix, seq.values[1 : order + 1])
    return ARCoeffEstimate(
        coeffs=coeffs,
        variant=variant,
        condition_number=cond,
        source_dims=(seq.n_rx, seq.horizon),
    )


def estimate_ar_time_based(
    obs,
    order: int,
    variant: str,
    innovation_variance: float,
    noise_variance: float,
    antenna_index: int = 0,
) -> ARCoeffEstimate:
    """Single-antenna baseline: the same pipeline on one row (no spatial averaging)."""
    matrix = obs.matrix if hasattr(obs, "matrix") else np.asarray(obs)
    n_rx = matrix.shape[0]
    if not 0 <= antenna_index < n_rx:
        raise ValueError(f"antenna_index {antenna_index} out of range [0, {n_rx})")
    row = matrix[antenna_index : antenna_index + 1]
    est = estimate_ar(row, order, variant, innovation_variance, noise_variance)
    return ARCoeffEstimate(
        coeffs=est.coeffs,
        variant=TIME_BASED_PREFIX + variant,
        condition_number=est.condition_number,
        source_dims=est.source_dims,
    )
