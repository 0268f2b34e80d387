"""arfade: AR(p) SIMO fading channels, spatially averaged Yule-Walker
coefficient estimation, and Kalman channel tracking."""

from .model import (
    ARParams,
    CompanionForm,
    NonStationaryError,
    StationarityReport,
    check_stationarity,
    companion_form,
    theoretical_acov,
)
from .simulate import (
    ChannelRealization,
    ObservationSet,
    PilotSequence,
    channel_to_csv,
    derotate,
    generate_channel,
    observe,
    received_signal,
)
from .acov import (
    BIASED,
    UNBIASED,
    AcovEstimate,
    HermitianToeplitz,
    acov_biased,
    acov_lag0,
    acov_sequence,
    acov_unbiased,
    build_toeplitz,
)
from .arest import (
    ARCoeffEstimate,
    IllConditionedError,
    estimate_ar,
    estimate_ar_time_based,
    solve_yule_walker,
)
from .tracking import (
    KalmanState,
    TrackingError,
    TrackResult,
    ar_predict,
    kalman_init,
    kalman_step,
    track_channel,
    track_channel_reestimated,
)
from .metrics import nmse_channel, nmse_channel_per_instant, nmse_coeffs
from .experiments import (
    ExperimentConfig,
    GridPoint,
    TrialRecord,
    load_config,
    noise_variance_for_snr,
    preset_config,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"

__all__ = [
    "ARParams", "CompanionForm", "NonStationaryError", "StationarityReport",
    "check_stationarity", "companion_form", "theoretical_acov",
    "ChannelRealization", "ObservationSet", "PilotSequence", "channel_to_csv",
    "derotate", "generate_channel", "observe", "received_signal",
    "BIASED", "UNBIASED", "AcovEstimate", "HermitianToeplitz",
    "acov_biased", "acov_lag0", "acov_sequence", "acov_unbiased", "build_toeplitz",
    "ARCoeffEstimate", "IllConditionedError", "estimate_ar",
    "estimate_ar_time_based", "solve_yule_walker",
    "KalmanState", "TrackingError", "TrackResult", "ar_predict",
    "kalman_init", "kalman_step", "track_channel", "track_channel_reestimated",
    "nmse_channel", "nmse_channel_per_instant", "nmse_coeffs",
    "ExperimentConfig", "GridPoint", "TrialRecord", "load_config",
    "noise_variance_for_snr", "preset_config", "run_experiment", "run_trial",
]
