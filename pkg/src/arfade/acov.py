"""Spatially averaged autocovariance estimators and Hermitian Toeplitz assembly.

Working on an N_r x T observation matrix, the estimators average lag products
over both time and antennas:

    r^(0)   = (1 / (sx2 * N_r * T)) * sum |hhat_n(t)|^2  -  sw2 / sx2
    r^b(k)  = (1 / (sx2 * N_r * T))       * sum hhat_n(t+k) conj(hhat_n(t))
    r^u(k)  = (1 / (sx2 * N_r * (T-|k|))) * sum hhat_n(t+k) conj(hhat_n(t))

with the sums over 0 <= t+k <= T-1.  The lag-0 value is shared by both
variants and noise-corrected; it may come out negative on unlucky draws and
is returned unchanged (downstream solvers deal with indefiniteness).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

BIASED = "biased"
UNBIASED = "unbiased"
_VARIANTS = (BIASED, UNBIASED)


def _obs_matrix(obs) -> np.ndarray:
    m = obs.matrix if hasattr(obs, "matrix") else np.asarray(obs)
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("observations must form a non-empty 2-D matrix")
    return m


@dataclass(frozen=True)
class AcovEstimate:
    """Estimated autocovariances r^(0..max_lag), normalized by sigma_x^2.

    Negative lags are implied by r^(-k) = conj(r^(k)).
    """

    values: np.ndarray
    variant: str
    n_rx: int
    horizon: int
    noise_corrected: bool = True

    @property
    def max_lag(self) -> int:
        return len(self.values) - 1


def acov_lag0(obs, innovation_variance: float, noise_variance: float) -> float:
    """Noise-corrected lag-0 estimate; identical for both variants."""
    if innovation_variance <= 0.0:
        raise ValueError("innovation variance must be > 0")
    if noise_variance < 0.0:
        raise ValueError("noise variance must be >= 0")
    m = _obs_matrix(obs)
    n_rx, horizon = m.shape
    power = float(np.sum(m.real**2 + m.imag**2))
    return power / (innovation_variance * n_rx * horizon) - noise_variance / innovation_variance


def _lag_sum(m: np.ndarray, lag: int) -> complex:
    """sum over n, t of hhat_n(t+lag) * conj(hhat_n(t)), 0 <= t+lag <= T-1."""
    horizon = m.shape[1]
    if lag > 0:
        prod = m[:, lag:] * np.conj(m[:, : horizon - lag])
    else:
        prod = m[:, : horizon + lag] * np.conj(m[:, -lag:])
    return complex(np.sum(prod))


def _check_lag(lag: int, horizon: int) -> None:
    if lag == 0:
        raise ValueError("lag 0 has its own noise-corrected estimator, use acov_lag0")
    if abs(lag) >= horizon:
        raise ValueError(f"|lag| = {abs(lag)} must be < horizon = {horizon}")


def acov_biased(obs, lag: int, innovation_variance: float) -> complex:
    """Biased estimate of r(lag): lag products divided by T.

    Its mean is (1 - |lag|/T) * r(lag).
    """
    if innovation_variance <= 0.0:
        raise ValueError("innovation variance must be > 0")
    m = _obs_matrix(obs)
    n_rx, horizon = m.shape
    _check_lag(lag, horizon)
    return _lag_sum(m, lag) / (innovation_variance * n_rx * horizon)


def acov_unbiased(obs, lag: int, innovation_variance: float) -> complex:
    """Unbiased estimate of r(lag): lag products divided by T - |lag|."""
    if innovation_variance <= 0.0:
        raise ValueError("innovation variance must be > 0")
    m = _obs_matrix(obs)
    n_rx, horizon = m.shape
    _check_lag(lag, horizon)
    return _lag_sum(m, lag) / (innovation_variance * n_rx * (horizon - abs(lag)))


def acov_sequence(
    obs,
    max_lag: int,
    variant: str,
    innovation_variance: float,
    noise_variance: float,
) -> AcovEstimate:
    """Bundle the corrected lag-0 value with per-lag estimates for 1..max_lag."""
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}, got {variant!r}")
    m = _obs_matrix(obs)
    n_rx, horizon = m.shape
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if max_lag >= horizon:
        raise ValueError(f"max_lag = {max_lag} must be < horizon = {horizon}")
    values = np.empty(max_lag + 1, dtype=complex)
    values[0] = acov_lag0(obs, innovation_variance, noise_variance)
    per_lag = acov_biased if variant == BIASED else acov_unbiased
    for k in range(1, max_lag + 1):
        values[k] = per_lag(obs, k, innovation_variance)
    return AcovEstimate(
        values=values, variant=variant, n_rx=n_rx, horizon=horizon, noise_corrected=True
    )


@dataclass(frozen=True)
class HermitianToeplitz:
    """Hermitian Toeplitz matrix defined by its lag sequence t(0..p-1):
    entry (i, j) = t(j - i) for j >= i and conj(t(i - j)) below the diagonal.
    """

    lags: np.ndarray

    def __post_init__(self) -> None:
        lags = np.asarray(self.lags, dtype=complex).reshape(-1)
        if lags.size == 0:
            raise ValueError("need at least the lag-0 value")
        if abs(lags[0].imag) > 1e-12 * max(1.0, abs(lags[0])):
            raise ValueError("lag-0 entry must be real")
        lags = lags.copy()
        lags[0] = lags[0].real
        object.__setattr__(self, "lags", lags)

    @property
    def dim(self) -> int:
        return len(self.lags)

    def dense(self) -> np.ndarray:
        # first column conj(lags), first row lags
        return toeplitz(np.conj(self.lags), self.lags)


def build_toeplitz(acov, dim: int) -> HermitianToeplitz:
    """Assemble the p x p covariance matrix from lags 0..p-1 of an estimate
    (or of an exact autocovariance sequence)."""
    values = acov.values if isinstance(acov, AcovEstimate) else np.asarray(acov)
    values = np.asarray(values, dtype=complex).reshape(-1)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if len(values) < dim:
        raise ValueError(f"need lags 0..{dim - 1}, got only {len(values)} values")
    return HermitianToeplitz(values[:dim])
