"""Head rotational kinematics from a wearable gyroscope array.

The pipeline averages the head-frame angular velocity of every sensor, picks a
low-pass cutoff per impact from the Gabor wavelet transform of the averaged
signal, filters it, and differentiates it with a five-point stencil.
"""

from .config import CoraParams, PipelineConfig, load_config, parse_config
from .errors import (
    DegenerateSignalError,
    HeadkinError,
    InvalidCutoffError,
    InvalidInputError,
    InvalidMountError,
    NoImpactFoundError,
    OutOfRangeError,
    RecordingParseError,
    SchemaError,
    UndefinedStatisticError,
)
from .filtering import (
    Branch,
    FilterDecision,
    FilterMode,
    butterworth_lowpass,
    cutoff_frequency,
    decide_cutoff,
    five_point_derivative,
)
from .fusion import ImpactLocation, ImpactRecord, SensorMount, SensorStreams
from .metrics import (
    BlandAltman,
    CoraBin,
    CoraRating,
    PairedPeaks,
    bland_altman,
    ccc,
    cora_bin,
    cora_score,
    nrmse,
    peak_metrics,
    pearson_r,
)
from .pipeline import HeadKinematics, reconstruct
from .synth import GroundTruth, SyntheticScenario, generate_ground_truth, hertz_contact_duration, synthesize_impact
from .timeseries import ImpactWindow, ScalarSeries, Vec3Series
from .wavelet import ScaleGrid, WaveletSpectrum, central_frequency, cwt, gabor, scalogram

__version__ = "0.1.0"
