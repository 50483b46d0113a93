"""Latitude-adaptive quality tooling for 360-degree equirectangular video.

The package covers the pipeline from spherical geometry to evaluation:
per-row latitude weights, log-linear quality/multiplier mapping with
mean-corrected latitude adaptation, vector-bank interpolation for latent
modulation, spherically weighted PSNR over raw YUV, BD-Rate curve
comparison, and an analytic banded rate-distortion simulator.
"""

from .banks import (
    BANK_ORDER,
    BadMagicError,
    BankFormatError,
    BankShapeError,
    NonFiniteError,
    TruncatedFileError,
    VectorBank,
    VectorBankSet,
    interpolate,
    load_bank_set,
    row_modulation_matrix,
    save_bank_set,
)
from .bdrate import CurveError, RdCurve, RdPoint, bd_psnr, bd_rate, load_curve, validate_curve
from .geometry import (
    LatitudeGrid,
    PoleError,
    area_stretch,
    chroma_weight_map,
    latitude_weights,
    row_latitudes,
    row_to_latitude,
    sphere_weight_map,
)
from .metrics import (
    PSNR_CAP_DB,
    FrameMetrics,
    SequenceReport,
    VideoSpec,
    YuvFrame,
    frame_metrics,
    probe_frame_count,
    psnr_plane,
    read_yuv_frames,
    render_report,
    sequence_metrics,
    weighted_mse,
    ws_psnr_plane,
    ws_psnr_yuv,
)
from .qpa import (
    DEFAULT_GOP_OFFSETS,
    GopSchedule,
    QpaConfig,
    QualityMap,
    QualityMapFormatError,
    adapted_q,
    build_quality_map,
    delta_q,
    gop_offset_schedule,
    lambda_at_latitude,
    lambda_from_q,
    load_quality_map,
    mean_delta_q,
    q_from_lambda,
    save_quality_map,
)
from .rdsim import (
    BandAllocation,
    InfeasibleRateError,
    RdModel,
    SimulationResult,
    SphereScore,
    adapted_allocation,
    adapted_lambda_for_total_rate,
    brute_force_optimal_allocation,
    distortion_at_rate,
    implied_lambda,
    rate_for_distortion,
    render_simulation_report,
    simulate_bd_gain,
    sphere_score,
    uniform_allocation,
    uniform_lambda_for_total_rate,
)

__version__ = "0.1.0"
