"""Short-time Fourier transform with a continuously adjustable,
gradient-optimizable window length."""

__version__ = "0.1.0"

from ._backend import active_backend
from .errors import (
    InvalidAlphaError,
    InvalidGridError,
    InvalidShiftError,
    InvalidThetaError,
    LengthMismatchError,
    MalformedHeaderError,
    NonFiniteInputError,
    NonFiniteLossError,
    NotPowerOfTwoError,
    NyquistViolationError,
    ShapeMismatchError,
    SpecgradError,
    UnsupportedFormatError,
)
from .fft import dft_direct, fft_batch, fft_radix2
from .optim import (
    GradCheckCase,
    GradCheckResult,
    OptimConfig,
    OptimTrace,
    TraceRecord,
    default_cases,
    finite_diff,
    gd_theta,
    gradcheck_report,
    one_sided_diff,
)
from .signals import (
    FreqLaw,
    LawKind,
    TimeSignal,
    frame_truth,
    generate,
    read_wav_pcm16_mono,
)
from .spectro import (
    FrequencyTrack,
    PipelineConfig,
    centroid_backward,
    centroid_estimate,
    estimate_track,
    mse_loss,
    power_spectrogram,
    power_spectrogram_backward,
    spectral_energy,
    theta_loss_and_grad,
    tracking_loss,
)
from .stft import (
    FrameGrid,
    StftOutput,
    Variant,
    backprop_theta,
    grid_covering,
    min_breakpoint_distance,
    overlap_frame_capacity,
    overlap_live_frames,
    overlap_placements,
    stft_fixed_overlap_forward,
    stft_fixed_overlap_grad_theta,
    stft_fixed_size_forward,
    stft_fixed_size_grad_theta,
)
from .window import (
    FrameWindow,
    WindowParams,
    frame_window,
    hann_continuous,
    hann_dtheta,
    hann_dx,
    is_power_of_two,
)
from .experiments import (
    ClassificationDataConfig,
    JointConfig,
    JointModel,
    SweepResult,
    TrackingDataConfig,
    joint_forward,
    joint_train,
    make_classification_dataset,
    make_tracking_dataset,
    run_tracking,
    sweep_loss,
)
