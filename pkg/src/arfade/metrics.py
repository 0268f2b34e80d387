"""Normalized mean square error metrics for coefficients and channel matrices."""

from __future__ import annotations

import numpy as np

from .arest import ARCoeffEstimate
from .model import ARParams


def _coeff_vector(estimate) -> np.ndarray:
    if isinstance(estimate, ARCoeffEstimate):
        # real ground truth: score the real part, imaginary error is tracked
        # separately as a sanity metric
        return estimate.real_coeffs
    return np.real(np.asarray(estimate)).astype(float)


def nmse_coeffs(estimate, truth: ARParams) -> tuple[np.ndarray, float]:
    """Per-coefficient and aggregate NMSE of a coefficient estimate.

    Per coefficient: |a_hat_i - a_i|^2 / a_i^2 (NaN where a_i = 0);
    aggregate: sum_i |a_hat_i - a_i|^2 / sum_i a_i^2.
    """
    a_hat = _coeff_vector(estimate)
    a = truth.coeffs
    if len(a_hat) != len(a):
        raise ValueError(f"order mismatch: estimate {len(a_hat)}, truth {len(a)}")
    sq = (a_hat - a) ** 2
    ref = a**2
    per_coeff = np.where(ref > 0.0, sq / np.where(ref > 0.0, ref, 1.0), np.nan)
    total_ref = ref.sum()
    if total_ref == 0.0:
        raise ValueError("aggregate NMSE undefined for an all-zero truth")
    return per_coeff, float(sq.sum() / total_ref)


def nmse_channel(estimates: np.ndarray, truth: np.ndarray) -> float:
    """||H_hat - H||_F^2 / ||H||_F^2."""
    est = np.asarray(estimates)
    t_m = truth.matrix if hasattr(truth, "matrix") else np.asarray(truth)
    if est.shape != t_m.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {t_m.shape}")
    ref = float(np.sum(np.abs(t_m) ** 2))
    if ref == 0.0:
        raise ValueError("NMSE undefined for a zero-norm truth")
    return float(np.sum(np.abs(est - t_m) ** 2) / ref)


def nmse_channel_per_instant(estimates: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Column-wise NMSE trajectory."""
    est = np.asarray(estimates)
    t_m = truth.matrix if hasattr(truth, "matrix") else np.asarray(truth)
    if est.shape != t_m.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {t_m.shape}")
    ref = np.sum(np.abs(t_m) ** 2, axis=0)
    if np.any(ref == 0.0):
        raise ValueError("NMSE undefined for a zero-norm truth column")
    return np.sum(np.abs(est - t_m) ** 2, axis=0) / ref
