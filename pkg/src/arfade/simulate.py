"""Seeded generation of AR(p) SIMO channels, noisy observations, and
pilot-modulated received signals.

Every generator is a pure function of its inputs and a 64-bit seed.  Antenna
rows use independent child streams spawned from the master seed, so row n is
reproducible regardless of how many rows are requested and generation can be
parallelized across rows without changing the output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .model import ARParams, NonStationaryError, check_stationarity, theoretical_acov

PILOT_MODULUS_TOL = 1e-9


@dataclass(frozen=True)
class ChannelRealization:
    """True channel coefficients, one antenna per row, one time instant per column."""

    matrix: np.ndarray
    params: ARParams
    seed: int

    @property
    def n_rx(self) -> int:
        return self.matrix.shape[0]

    @property
    def horizon(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class ObservationSet:
    """Noisy channel observations H + W with W iid CN(0, noise_variance).

    ``noise_variance`` is generation metadata; estimators take the assumed
    noise variance explicitly.  It is None for derotated received signals
    whose noise level the caller did not supply.
    """

    matrix: np.ndarray
    noise_variance: float | None


@dataclass(frozen=True)
class PilotSequence:
    """Unit-modulus pilot symbols s(0..T-1); diag(s) is then unitary."""

    symbols: np.ndarray

    def __post_init__(self) -> None:
        symbols = np.asarray(self.symbols, dtype=complex).reshape(-1)
        if symbols.size == 0:
            raise ValueError("pilot sequence must be non-empty")
        if np.abs(np.abs(symbols) - 1.0).max() > PILOT_MODULUS_TOL:
            raise ValueError("pilot symbols must have unit modulus")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def identity(cls, horizon: int) -> "PilotSequence":
        return cls(np.ones(horizon, dtype=complex))

    @classmethod
    def constant_phase(cls, horizon: int, phase: float) -> "PilotSequence":
        return cls(np.full(horizon, np.exp(1j * phase)))

    @classmethod
    def qpsk(cls, horizon: int, seed: int) -> "PilotSequence":
        rng = np.random.default_rng(seed)
        sym = np.exp(1j * (np.pi / 4 + np.pi / 2 * rng.integers(0, 4, size=horizon)))
        return cls(sym)


def _complex_normal(rng: np.random.Generator, size, variance: float = 1.0) -> np.ndarray:
    """CN(0, variance) draws: real and imaginary parts iid N(0, variance/2)."""
    z = rng.standard_normal((*np.atleast_1d(size), 2))
    return np.sqrt(variance / 2.0) * (z[..., 0] + 1j * z[..., 1])


def _noise_matrix(shape, variance: float, seed: int) -> np.ndarray:
    """Observation noise used by both observe() and received_signal().

    A fixed draw order per (shape, seed) makes the two functions produce the
    same noise realization for the same seed.
    """
    if variance == 0.0:
        return np.zeros(shape, dtype=complex)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((*shape, 2))
    return np.sqrt(variance / 2.0) * (z[..., 0] + 1j * z[..., 1])


def default_burn_in(params: ARParams) -> int:
    """Burn-in length 10*p/(1 - max|pole|) for the transient-start fallback."""
    report = check_stationarity(params.coeffs)
    top = report.max_pole_magnitude
    if top >= 1.0:
        raise NonStationaryError("no finite default burn-in for max pole modulus >= 1")
    return int(np.ceil(10.0 * max(params.order, 1) / (1.0 - top)))


def generate_channel(
    params: ARParams,
    n_rx: int,
    horizon: int,
    seed: int,
    init: str = "stationary",
    burn_in: int | None = None,
) -> ChannelRealization:
    """Draw an N_r x T channel whose rows independently follow the AR(p) model.

    With ``init="stationary"`` (the default) the first p samples of each row
    are drawn from the exact stationary joint distribution, so even short
    windows are transient-free; this requires a stationary model.  With
    ``init="burnin"`` each row starts from zero and a burn-in stretch is
    discarded instead (the unchecked path).

    Identical arguments give a bit-identical matrix.
    """
    if n_rx < 1 or horizon < 1:
        raise ValueError("n_rx and horizon must be >= 1")
    if init not in ("stationary", "burnin"):
        raise ValueError(f"unknown init mode {init!r}")
    p = params.order
    var = params.innovation_variance
    a = params.coeffs
    children = np.random.SeedSequence(seed).spawn(n_rx)

    if p == 0:
        rows = [_complex_normal(np.random.default_rng(c), horizon, var) for c in children]
        return ChannelRealization(np.vstack(rows), params, seed)

    if init == "stationary":
        if not check_stationarity(a).is_stationary:
            raise NonStationaryError("stationary start requires a stationary model")
        m = min(p, horizon)
        # exact stationary joint law of the first m samples
        chol = np.linalg.cholesky(toeplitz(theoretical_acov(params, m - 1)))
        z = np.empty((n_rx, m), dtype=complex)
        x = np.empty((n_rx, horizon - m), dtype=complex)
        for n, child in enumerate(children):
            rng = np.random.default_rng(child)
            z[n] = _complex_normal(rng, m)
            x[n] = _complex_normal(rng, horizon - m, var)
        h = np.empty((n_rx, horizon), dtype=complex)
        h[:, :m] = np.sqrt(var) * (z @ chol.T)
        for t in range(m, horizon):
            acc = x[:, t - m].copy()
            for i in range(1, p + 1):
                acc += a[i - 1] * h[:, t - i]
            h[:, t] = acc
        return ChannelRealization(h, params, seed)

    # burn-in fallback: zero start, discard the leading transient
    steps = default_burn_in(params) if burn_in is None else int(burn_in)
    if steps < 0:
        raise ValueError("burn_in must be >= 0")
    total = steps + horizon
    h = np.zeros((n_rx, total + p), dtype=complex)
    x = np.empty((n_rx, total), dtype=complex)
    for n, child in enumerate(children):
        rng = np.random.default_rng(child)
        x[n] = _complex_normal(rng, total, var)
    for t in range(total):
        acc = x[:, t].copy()
        for i in range(1, p + 1):
            acc += a[i - 1] * h[:, p + t - i]
        h[:, p + t] = acc
    return ChannelRealization(h[:, p + steps :].copy(), params, seed)


def observe(channel: ChannelRealization, noise_variance: float, seed: int) -> ObservationSet:
    """Additive-noise observations H + W, W iid CN(0, noise_variance)."""
    if noise_variance < 0.0:
        raise ValueError("noise variance must be >= 0")
    if noise_variance == 0.0:
        return ObservationSet(channel.matrix.copy(), 0.0)
    w = _noise_matrix(channel.matrix.shape, noise_variance, seed)
    return ObservationSet(channel.matrix + w, noise_variance)


def received_signal(
    channel: ChannelRealization,
    pilots: PilotSequence,
    noise_variance: float,
    seed: int,
) -> np.ndarray:
    """Pilot-modulated received matrix: column t is h(t)*s(t) + w(t).

    With identity pilots and the same seed this coincides with observe().
    """
    if noise_variance < 0.0:
        raise ValueError("noise variance must be >= 0")
    if len(pilots) != channel.horizon:
        raise ValueError(
            f"pilot length {len(pilots)} != channel horizon {channel.horizon}"
        )
    w = _noise_matrix(channel.matrix.shape, noise_variance, seed)
    return channel.matrix * pilots.symbols[np.newaxis, :] + w


def derotate(
    received: np.ndarray,
    pilots: PilotSequence,
    noise_variance: float | None = None,
) -> ObservationSet:
    """Strip pilots from a received matrix: column t becomes y(t)*conj(s(t)).

    Because the pilots are unit-modulus, the derotated noise keeps the same
    circular Gaussian law, so the result is statistically an observe() output.
    """
    received = np.asarray(received, dtype=complex)
    if received.ndim != 2 or received.shape[1] != len(pilots):
        raise ValueError("received matrix columns must match pilot length")
    return ObservationSet(received * np.conj(pilots.symbols)[np.newaxis, :], noise_variance)


def channel_to_csv(channel: ChannelRealization, path) -> None:
    """Debug export: one row per antenna, re/im interleaved columns."""
    m = channel.matrix
    flat = np.empty((m.shape[0], 2 * m.shape[1]))
    flat[:, 0::2] = m.real
    flat[:, 1::2] = m.imag
    header = ",".join(f"re{t},im{t}" for t in range(m.shape[1]))
    np.savetxt(path, flat, delimiter=",", header=header, comments="")
