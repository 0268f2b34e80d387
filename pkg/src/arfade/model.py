"""AR(p) model core: stationarity checks, the analytic autocovariance, and the
companion-form state space used by the Kalman tracker.

Conventions used throughout the package:

* an AR(p) process h(t) = a1*h(t-1) + ... + ap*h(t-p) + x(t) with circular
  complex Gaussian innovations x(t) of variance sigma_x^2;
* autocovariances r(k) are *normalized*, i.e. computed for unit innovation
  variance.  The physical channel power is sigma_x^2 * r(0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Reject models whose largest pole modulus is within this margin of the unit
# circle: the stationary covariance solve is numerically meaningless there.
STATIONARITY_MARGIN = 1e-9


class NonStationaryError(ValueError):
    """Raised when an operation requires a stationary AR model and got none."""


def _pole_magnitudes(coeffs: np.ndarray) -> np.ndarray:
    """Moduli of the roots of z^p - a1*z^(p-1) - ... - ap.

    Computed as the eigenvalue moduli of the companion matrix, which avoids
    explicit polynomial deflation.
    """
    p = len(coeffs)
    if p == 0:
        return np.empty(0)
    c = np.zeros((p, p))
    c[0, :] = coeffs
    if p > 1:
        c[1:, :-1] = np.eye(p - 1)
    return np.abs(np.linalg.eigvals(c))


@dataclass(frozen=True)
class StationarityReport:
    """Outcome of a stationarity check: pole moduli and the verdict."""

    is_stationary: bool
    pole_magnitudes: np.ndarray

    @property
    def max_pole_magnitude(self) -> float:
        return float(self.pole_magnitudes.max()) if self.pole_magnitudes.size else 0.0


@dataclass(frozen=True)
class ARParams:
    """Parameters of a real-coefficient AR(p) model.

    The constructor rejects non-stationary coefficient vectors (largest pole
    modulus >= 1 - STATIONARITY_MARGIN).  Use :meth:`unchecked` to carry
    arbitrary coefficients, e.g. noisy estimates fed back into a simulator.
    """

    coeffs: np.ndarray
    innovation_variance: float = 1.0

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("AR coefficients must be finite")
        var = float(self.innovation_variance)
        if not np.isfinite(var) or var <= 0.0:
            raise ValueError(f"innovation variance must be positive, got {var}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "innovation_variance", var)
        report = check_stationarity(coeffs)
        if not report.is_stationary:
            raise NonStationaryError(
                f"non-stationary AR coefficients (max pole modulus "
                f"{report.max_pole_magnitude:.6g})"
            )

    @classmethod
    def unchecked(cls, coeffs, innovation_variance: float = 1.0) -> "ARParams":
        """Build without the stationarity check."""
        self = object.__new__(cls)
        object.__setattr__(self, "coeffs", np.asarray(coeffs, dtype=float).reshape(-1))
        object.__setattr__(self, "innovation_variance", float(innovation_variance))
        return self

    @property
    def order(self) -> int:
        return len(self.coeffs)


def check_stationarity(params) -> StationarityReport:
    """Report the pole moduli of an AR model and whether it is stationary.

    Accepts an :class:`ARParams` or a bare coefficient sequence.  An empty
    coefficient vector (white noise) is stationary by convention.
    """
    coeffs = params.coeffs if isinstance(params, ARParams) else np.asarray(params, dtype=float).reshape(-1)
    mags = _pole_magnitudes(coeffs)
    is_stat = bool(mags.size == 0 or mags.max() < 1.0 - STATIONARITY_MARGIN)
    return StationarityReport(is_stationary=is_stat, pole_magnitudes=mags)


def theoretical_acov(params: ARParams, max_lag: int) -> np.ndarray:
    """Normalized autocovariance sequence r(0..max_lag) of a stationary AR(p).

    Lags 0..p come from the stationary Yule-Walker linear system

        r(k) - sum_i a_i r(|k-i|) = [k == 0],   k = 0..p,

    lags beyond p from the recursion r(k) = sum_i a_i r(k-i).  The sequence is
    for unit innovation variance; multiply by sigma_x^2 for physical units.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    report = check_stationarity(params)
    if not report.is_stationary:
        raise NonStationaryError(
            f"autocovariance undefined: max pole modulus {report.max_pole_magnitude:.6g}"
        )
    a = params.coeffs
    p = len(a)
    if p == 0:
        out = np.zeros(max_lag + 1)
        out[0] = 1.0
        return out
    sys = np.eye(p + 1)
    for k in range(p + 1):
        for i in range(1, p + 1):
            sys[k, abs(k - i)] -= a[i - 1]
    rhs = np.zeros(p + 1)
    rhs[0] = 1.0
    r = list(np.linalg.solve(sys, rhs))
    for k in range(p + 1, max_lag + 1):
        r.append(float(np.dot(a, r[k - p : k][::-1])))
    return np.asarray(r[: max_lag + 1])


@dataclass(frozen=True)
class CompanionForm:
    """Companion-form state space of an AR(p): x(t) = F x(t-1) + noise.

    F has the coefficient vector as first row and ones on the sub-diagonal;
    the process noise covariance Q is sigma_x^2 at (0, 0) and zero elsewhere;
    the observation row selects the first state component.
    """

    transition: np.ndarray
    process_noise_cov: np.ndarray
    observation_row: np.ndarray

    @property
    def order(self) -> int:
        return self.transition.shape[0]


def companion_form(params: ARParams) -> CompanionForm:
    """Companion-form embedding of an AR(p) model; rejects p = 0."""
    p = params.order
    if p < 1:
        raise ValueError("companion form undefined for order 0 (white noise)")
    f = np.zeros((p, p))
    f[0, :] = params.coeffs
    if p > 1:
        f[1:, :-1] = np.eye(p - 1)
    q = np.zeros((p, p))
    q[0, 0] = params.innovation_variance
    e1 = np.zeros(p)
    e1[0] = 1.0
    return CompanionForm(transition=f, process_noise_cov=q, observation_row=e1)
