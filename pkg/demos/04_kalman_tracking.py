"""Track a fading SIMO channel with the Kalman filter: the genie bound
(true coefficients) against filters driven by estimated coefficients.

Run:  python demos/04_kalman_tracking.py
"""

from arfade import (
    ARParams,
    PilotSequence,
    generate_channel,
    noise_variance_for_snr,
    received_signal,
    track_channel,
    track_channel_reestimated,
)

jakes = ARParams([1.8, -0.9])
n = 64
sw2 = noise_variance_for_snr(jakes, 0.0)

ch = generate_channel(jakes, n, n, seed=5)
pilots = PilotSequence.qpsk(n, seed=6)
y = received_signal(ch, pilots, sw2, seed=7)

genie = track_channel(y, pilots, jakes, 1.0, sw2, truth=ch)
unbiased = track_channel_reestimated(y, pilots, 2, "unbiased", 1.0, sw2, truth=ch)
timeb = track_channel_reestimated(y, pilots, 2, "unbiased", 1.0, sw2, truth=ch, time_based=True)

print("per-instant NMSE (raw observation would be ~ 1.0 at 0 dB):")
print(f"{'t':>4} {'genie':>9} {'unbiased':>9} {'time-based':>11}")
for t in (0, 2, 4, 8, 16, 32, 48, 63):
    print(
        f"{t:>4} {genie.per_instant_nmse[t]:>9.3f} "
        f"{unbiased.per_instant_nmse[t]:>9.3f} {timeb.per_instant_nmse[t]:>11.3f}"
    )
print("\ncovariance PSD margin over the genie run:", genie.psd_margin)

# The same comparison over a couple hundred paired trials is what the
# experiment presets automate:
#   arfade experiment --preset fig2 --seed 42 --out fig2.csv
