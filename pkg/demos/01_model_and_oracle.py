"""Walk through the AR(p) model core: stationarity, the analytic
autocovariance, and the exact Yule-Walker round trip.

Run:  python demos/01_model_and_oracle.py
"""

import numpy as np

from arfade import (
    ARParams,
    build_toeplitz,
    check_stationarity,
    companion_form,
    solve_yule_walker,
    theoretical_acov,
)

# The AR(2) used throughout: its poles sit at 0.9 +- 0.3i, i.e. modulus
# sqrt(0.9) ~ 0.949, which mimics the slow fading of a Jakes-style channel.
jakes = ARParams([1.8, -0.9])
report = check_stationarity(jakes)
print("model a =", jakes.coeffs, " stationary:", report.is_stationary)
print("pole moduli:", report.pole_magnitudes)

# Normalized autocovariance (innovation variance 1).  r(0) ~ 51.35: a
# near-unit-root process carries far more power than its innovations.
r = theoretical_acov(jakes, 6)
print("\nnormalized autocovariance r(0..6):")
print(np.array2string(r, precision=4))
print("lag-1 correlation r(1)/r(0) =", r[1] / r[0], "(= a1/(1 - a2))")

# The round trip: exact autocovariances back through the Yule-Walker solve
# recover the coefficients to machine precision.
solved = solve_yule_walker(build_toeplitz(r, 2), r[1:3])
print("\nYule-Walker round trip:", solved.real, " error:", np.abs(solved.real - jakes.coeffs).max())

# Companion form used by the Kalman tracker.
form = companion_form(jakes)
print("\ncompanion transition F =\n", form.transition)
print("spectral radius:", np.abs(np.linalg.eigvals(form.transition)).max())
