from .capture import (
    CapturePoint,
    CaptureTrialResult,
    capture_trials,
    default_capture_grid,
    run_capture_sweep,
    run_capture_trial,
)
from .engine import DEFAULT_SEED, SweepResult, run_trials
from .mtor import MtorPoint, MtorTrialResult, default_mtor_grid, mtor_trials, run_mtor_sweep, run_mtor_trial

__all__ = [
    "CapturePoint", "CaptureTrialResult", "capture_trials", "default_capture_grid",
    "run_capture_sweep", "run_capture_trial", "DEFAULT_SEED", "SweepResult", "run_trials",
    "MtorPoint", "MtorTrialResult", "default_mtor_grid", "mtor_trials", "run_mtor_sweep",
    "run_mtor_trial",
]
