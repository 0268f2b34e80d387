"""Kalman-filter channel tracking in companion-form state space.

All antennas share the same transition model, process noise, and observation
noise, and their priors are iid, so a single p x p error covariance and gain
serves every antenna; only the state means are per-antenna (an N_r-fold cost
reduction that is exact under the iid model).

Two tracking drivers are provided:

* :func:`track_channel` runs the filter with one fixed coefficient vector
  (true coefficients = the genie bound, or a one-shot estimate);
* :func:`track_channel_reestimated` follows the growing-window protocol:
  at step t the transition uses coefficients re-estimated from the first t
  columns (needs t >= p+2); before the first usable estimate the filter is
  seeded with it.  The filter starts from the first *stationary* estimate
  (required for the stationary prior); later estimates are applied as-is,
  stationary or not, since the filter stays well-defined over a finite run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import toeplitz

from .acov import BIASED, UNBIASED
from .arest import ARCoeffEstimate, IllConditionedError, estimate_ar, estimate_ar_time_based
from .model import ARParams, CompanionForm, NonStationaryError, companion_form, theoretical_acov
from .simulate import ObservationSet, PilotSequence, derotate


class TrackingError(RuntimeError):
    """A tracking run could not be carried out (no usable coefficient estimate)."""


def _as_real_params(coeffs, innovation_variance: float) -> ARParams:
    """Coerce coefficients (vector, ARParams, or estimate) to a real ARParams.

    Raises NonStationaryError for non-stationary coefficients, which callers
    report as a tracking failure for the trial.
    """
    if isinstance(coeffs, ARParams):
        vec = coeffs.coeffs
    elif isinstance(coeffs, ARCoeffEstimate):
        vec = coeffs.real_coeffs
    else:
        vec = np.real(np.asarray(coeffs)).astype(float)
    return ARParams(vec, innovation_variance)


@dataclass(frozen=True)
class KalmanState:
    """Filter state: per-antenna means (p x N_r), shared covariance, model.

    ``psd_margin`` tracks the worst relative floor of the covariance spectrum
    seen so far (min eigenvalue / max eigenvalue, negative if the update ever
    produced an indefinite matrix).
    """

    mean: np.ndarray
    cov: np.ndarray
    model: CompanionForm
    noise_variance: float
    psd_margin: float = np.inf

    @property
    def order(self) -> int:
        return self.model.order

    @property
    def n_rx(self) -> int:
        return self.mean.shape[1]


def kalman_init(coeffs, innovation_variance: float, noise_variance: float, n_rx: int) -> KalmanState:
    """Zero state mean and the stationary prior sigma_x^2 * R_p as covariance.

    ``coeffs`` may be an ARParams, an ARCoeffEstimate (real parts are used),
    or a bare vector; it must be stationary or the stationary prior does not
    exist and NonStationaryError propagates.
    """
    if n_rx < 1:
        raise ValueError("n_rx must be >= 1")
    if noise_variance < 0.0:
        raise ValueError("noise variance must be >= 0")
    params = _as_real_params(coeffs, innovation_variance)
    if params.order < 1:
        raise ValueError("tracking needs order >= 1")
    model = companion_form(params)
    prior = innovation_variance * toeplitz(theoretical_acov(params, params.order - 1))
    return KalmanState(
        mean=np.zeros((params.order, n_rx), dtype=complex),
        cov=prior.astype(complex),
        model=model,
        noise_variance=noise_variance,
    )


def kalman_step(state: KalmanState, observation: np.ndarray) -> tuple[KalmanState, np.ndarray]:
    """One predict/update cycle against a length-N_r observation column.

    The update uses the Joseph form, which preserves positive
    semi-definiteness of the shared covariance.
    """
    obs = np.asarray(observation, dtype=complex).reshape(-1)
    if obs.shape[0] != state.n_rx:
        raise ValueError(f"observation length {obs.shape[0]} != n_rx {state.n_rx}")
    if not np.all(np.isfinite(obs)):
        raise ValueError("observation contains non-finite entries")
    p = state.order
    f = state.model.transition
    # predict
    mean = f @ state.mean
    cov = f @ state.cov @ f.T + state.model.process_noise_cov
    # update against the first state component, gain shared across antennas
    gain_den = cov[0, 0].real + state.noise_variance
    gain = cov[:, 0] / gain_den
    mean = mean + np.outer(gain, obs - mean[0, :])
    joseph = np.eye(p, dtype=complex)
    joseph[:, 0] -= gain
    cov = joseph @ cov @ joseph.conj().T + state.noise_variance * np.outer(gain, np.conj(gain))
    cov = 0.5 * (cov + cov.conj().T)
    eigs = np.linalg.eigvalsh(cov)
    margin = float(eigs[0] / max(eigs[-1], np.finfo(float).tiny))
    new_state = KalmanState(
        mean=mean,
        cov=cov,
        model=state.model,
        noise_variance=state.noise_variance,
        psd_margin=min(state.psd_margin, margin),
    )
    return new_state, mean[0, :].copy()


@dataclass(frozen=True)
class TrackResult:
    """Filtered channel estimates with optional per-instant NMSE."""

    estimates: np.ndarray
    per_instant_nmse: np.ndarray | None
    coeff_source: str
    psd_margin: float


def _finish(estimates: np.ndarray, truth, coeff_source: str, psd_margin: float) -> TrackResult:
    nmse_t = None
    if truth is not None:
        t_m = truth.matrix if hasattr(truth, "matrix") else np.asarray(truth)
        err = np.abs(estimates - t_m) ** 2
        ref = np.abs(t_m) ** 2
        nmse_t = err.sum(axis=0) / ref.sum(axis=0)
    return TrackResult(
        estimates=estimates,
        per_instant_nmse=nmse_t,
        coeff_source=coeff_source,
        psd_margin=psd_margin,
    )


def track_channel(
    received: np.ndarray,
    pilots: PilotSequence,
    coeffs,
    innovation_variance: float,
    noise_variance: float,
    truth=None,
    coeff_source: str = "genie",
) -> TrackResult:
    """Derotate the received matrix and run the filter with fixed coefficients."""
    obs = derotate(received, pilots, noise_variance)
    n_rx, horizon = obs.matrix.shape
    state = kalman_init(coeffs, innovation_variance, noise_variance, n_rx)
    estimates = np.empty((n_rx, horizon), dtype=complex)
    for t in range(horizon):
        state, estimates[:, t] = kalman_step(state, obs.matrix[:, t])
    return _finish(estimates, truth, coeff_source, state.psd_margin)


def _set_transition(state: KalmanState, coeffs_real: np.ndarray) -> KalmanState:
    model = companion_form(ARParams.unchecked(coeffs_real, state.model.process_noise_cov[0, 0]))
    return replace(state, model=model)


def track_channel_reestimated(
    received: np.ndarray,
    pilots: PilotSequence,
    order: int,
    variant: str,
    innovation_variance: float,
    noise_variance: float,
    truth=None,
    time_based: bool = False,
    antenna_index: int = 0,
    coeff_source: str | None = None,
) -> TrackResult:
    """Growing-window tracking: re-estimate coefficients from the first t
    columns at each step t.

    The filter is initialized from the first stationary estimate found while
    scanning t = p+2 .. T (instants before that point reuse it); from then on
    each step's estimate is applied as-is.  Raises TrackingError when the
    whole window yields no stationary estimate.
    """
    if variant not in (BIASED, UNBIASED):
        raise ValueError(f"variant must be biased/unbiased, got {variant!r}")
    obs = derotate(received, pilots, noise_variance)
    matrix = obs.matrix
    n_rx, horizon = matrix.shape

    def window_estimate(t: int) -> ARCoeffEstimate:
        window = ObservationSet(matrix[:, :t], noise_variance)
        if time_based:
            return estimate_ar_time_based(
                window, order, variant, innovation_variance, noise_variance, antenna_index
            )
        return estimate_ar(window, order, variant, innovation_variance, noise_variance)

    first_t = None
    current = None
    for t in range(order + 2, horizon + 1):
        try:
            state = kalman_init(window_estimate(t), innovation_variance, noise_variance, n_rx)
        except (IllConditionedError, NonStationaryError):
            continue
        first_t, current = t, state
        break
    if first_t is None:
        raise TrackingError("no stationary coefficient estimate in the whole window")

    state = current
    estimates = np.empty((n_rx, horizon), dtype=complex)
    for t in range(horizon):
        if t >= first_t:
            try:
                state = _set_transition(state, window_estimate(t).real_coeffs)
            except IllConditionedError:
                pass  # keep the previous step's coefficients
        state, estimates[:, t] = kalman_step(state, matrix[:, t])
    if coeff_source is None:
        coeff_source = ("time-based" if time_based else f"proposed-{variant}")
    return _finish(estimates, truth, coeff_source, state.psd_margin)


def ar_predict(history: np.ndarray, coeffs, steps: int) -> np.ndarray:
    """Iterate the zero-innovation recursion h(t) = sum_i a_i h(t-i).

    ``history`` holds at least p most recent estimates per antenna, most
    recent in the last column.  Returns an N_r x steps matrix of predictions.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if isinstance(coeffs, ARCoeffEstimate):
        a = coeffs.coeffs
    elif isinstance(coeffs, ARParams):
        a = coeffs.coeffs.astype(complex)
    else:
        a = np.asarray(coeffs, dtype=complex).reshape(-1)
    p = len(a)
    hist = np.atleast_2d(np.asarray(history, dtype=complex))
    if hist.shape[1] < p:
        raise ValueError(f"history depth {hist.shape[1]} < order {p}")
    buf = np.concatenate([hist[:, hist.shape[1] - p :], np.zeros((hist.shape[0], steps), dtype=complex)], axis=1)
    for m in range(steps):
        buf[:, p + m] = buf[:, m : p + m][:, ::-1] @ a
    return buf[:, p:]
