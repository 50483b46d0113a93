"""Latitude-adaptive quality parameters.

Implements the log-linear mapping between the Lagrange multiplier and the
integer quality parameter of a variable-rate neural codec, extends it to
real-valued quality parameters, and derives the latitude-dependent,
mean-corrected per-row quality map for ERP content. Lowering lambda in
proportion to cos(latitude) equalizes distortion on the sphere; the mean
correction keeps the latitude average of the adapted parameter at the base
value the entropy model was trained for.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import HALF_PI, PoleError, row_to_latitude

__all__ = [
    "QpaConfig",
    "QualityMap",
    "GopSchedule",
    "QualityMapFormatError",
    "DEFAULT_GOP_OFFSETS",
    "lambda_from_q",
    "q_from_lambda",
    "lambda_at_latitude",
    "delta_q",
    "mean_delta_q",
    "adapted_q",
    "build_quality_map",
    "gop_offset_schedule",
    "save_quality_map",
    "load_quality_map",
]

# Eight-frame low-delay refresh pattern: periodic quality boosts that
# counter temporal quality drift in P-frame-only coding.
DEFAULT_GOP_OFFSETS = (0.0, 8.0, 0.0, 4.0, 0.0, 4.0, 0.0, 4.0)


@dataclass(frozen=True)
class QpaConfig:
    """Lambda range and quality-parameter constants of the codec.

    Defaults match the published constants of the pretrained variable-rate
    model this toolkit targets: lambda in [1, 768] over 64 quality steps.
    """

    q0: float
    lambda_min: float = 1.0
    lambda_max: float = 768.0
    q_num: int = 64

    def __post_init__(self):
        if not isinstance(self.q_num, (int, np.integer)):
            raise TypeError(f"q_num must be an integer, got {type(self.q_num).__name__}")
        if self.q_num < 2:
            raise ValueError(f"q_num must be >= 2, got {self.q_num}")
        if not 0 < self.lambda_min < self.lambda_max:
            raise ValueError(
                f"need 0 < lambda_min < lambda_max, got "
                f"[{self.lambda_min}, {self.lambda_max}]"
            )
        if not 0 <= self.q0 <= self.q_num - 1:
            raise ValueError(f"q0 must lie in [0, {self.q_num - 1}], got {self.q0}")

    @property
    def log_lambda_span(self):
        return math.log(self.lambda_max) - math.log(self.lambda_min)


def lambda_from_q(q, config):
    """Lagrange multiplier for a (real-valued) quality parameter q.

    Log-linear in q: q = 0 maps to lambda_min and q = q_num - 1 to
    lambda_max. Defined for all real q; callers clamp where needed.
    """
    step = config.log_lambda_span / (config.q_num - 1)
    return math.exp(math.log(config.lambda_min) + q * step)


def q_from_lambda(lam, config):
    """Exact inverse of lambda_from_q."""
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return (config.q_num - 1) * (math.log(lam) - math.log(config.lambda_min)) / config.log_lambda_span


def lambda_at_latitude(lambda0, latitude):
    """Latitude-scaled multiplier lambda0 * cos(latitude).

    Scaling lambda by the sphere-to-plane area ratio makes the per-latitude
    distortion uniform on the sphere.
    """
    if lambda0 <= 0:
        raise ValueError(f"lambda0 must be positive, got {lambda0}")
    if not abs(latitude) < HALF_PI:
        raise PoleError(f"latitude {latitude} is at or beyond a pole (|lat| >= pi/2)")
    return lambda0 * math.cos(latitude)


def delta_q(latitude, config):
    """Change of the quality parameter at `latitude` relative to the equator.

    Always <= 0, with equality only at the equator.
    """
    if not abs(latitude) < HALF_PI:
        raise PoleError(f"latitude {latitude} is at or beyond a pole (|lat| >= pi/2)")
    return (config.q_num - 1) * math.log(math.cos(latitude)) / config.log_lambda_span


def mean_delta_q(config):
    """Mean of delta_q over latitudes uniform in [-pi/2, pi/2].

    Closed form from the integral of ln(cos) over a half period,
    -(q_num - 1) * ln(2) / (ln(lambda_max) - ln(lambda_min)).
    """
    return -(config.q_num - 1) * math.log(2.0) / config.log_lambda_span


def adapted_q(latitude, config):
    """Mean-corrected adaptive quality parameter at `latitude`.

    The correction subtracts the latitude mean of delta_q, so the average
    of the adapted parameter over the sphere equals config.q0.
    """
    return config.q0 + delta_q(latitude, config) - mean_delta_q(config)


@dataclass(frozen=True)
class QualityMap:
    """Per-row adapted quality parameters for an ERP plane."""

    rows: int
    q_tilde: np.ndarray
    config: QpaConfig
    clamped: bool = False

    def __post_init__(self):
        arr = np.asarray(self.q_tilde, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != self.rows:
            raise ValueError(
                f"q_tilde must have one value per row ({self.rows}), got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("q_tilde contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "q_tilde", arr)


def build_quality_map(rows, config, clamp=False):
    """Adapted quality parameter for every row of a `rows`-high plane.

    With `clamp` set, values are clipped to the trained range
    [0, q_num - 1]; unclamped values can leave that range near the poles
    and for base parameters near either end.
    """
    values = np.array(
        [adapted_q(row_to_latitude(r, rows), config) for r in range(rows)]
    )
    if clamp:
        values = np.clip(values, 0.0, float(config.q_num - 1))
    return QualityMap(rows=rows, q_tilde=values, config=config, clamped=bool(clamp))


@dataclass(frozen=True)
class GopSchedule:
    """Cyclic per-frame quality offsets, applied on top of the base parameter."""

    offsets: tuple = field(default=DEFAULT_GOP_OFFSETS)

    def __post_init__(self):
        offs = tuple(float(v) for v in self.offsets)
        if not offs:
            raise ValueError("offset pattern must not be empty")
        object.__setattr__(self, "offsets", offs)


def gop_offset_schedule(frame_index, schedule, q0, q_num):
    """Effective base quality parameter of frame `frame_index`.

    Offsets are additive quality boosts, cycled over the pattern length and
    clamped to the trained range [0, q_num - 1].
    """
    if frame_index < 0:
        raise ValueError(f"frame_index must be >= 0, got {frame_index}")
    off = schedule.offsets[frame_index % len(schedule.offsets)]
    return min(max(q0 + off, 0.0), float(q_num - 1))


class QualityMapFormatError(ValueError):
    """Malformed quality-map document."""


_QMAP_FORMAT = "qpa360-qmap/1"


def save_quality_map(qmap, path):
    """Write a QualityMap as a key/value text document.

    Floats are written with shortest round-trip precision, so a load
    reproduces the exact stored values.
    """
    cfg = qmap.config
    lines = [
        f"format = {_QMAP_FORMAT}",
        f"rows = {qmap.rows}",
        f"lambda_min = {cfg.lambda_min!r}",
        f"lambda_max = {cfg.lambda_max!r}",
        f"q_num = {cfg.q_num}",
        f"q0 = {cfg.q0!r}",
        f"clamp = {'true' if qmap.clamped else 'false'}",
        "q_tilde = " + " ".join(repr(v) for v in qmap.q_tilde.tolist()),
    ]
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")


def load_quality_map(path):
    """Read a quality-map document written by save_quality_map."""
    fields = {}
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise QualityMapFormatError(f"line {lineno}: expected 'key = value'")
            fields[key.strip()] = value.strip()

    required = {"format", "rows", "lambda_min", "lambda_max", "q_num", "q0", "clamp", "q_tilde"}
    missing = required - fields.keys()
    if missing:
        raise QualityMapFormatError(f"missing keys: {sorted(missing)}")
    unknown = fields.keys() - required
    if unknown:
        raise QualityMapFormatError(f"unknown keys: {sorted(unknown)}")
    if fields["format"] != _QMAP_FORMAT:
        raise QualityMapFormatError(f"unsupported format {fields['format']!r}")
    if fields["clamp"] not in ("true", "false"):
        raise QualityMapFormatError(f"clamp must be 'true' or 'false', got {fields['clamp']!r}")

    try:
        rows = int(fields["rows"])
        config = QpaConfig(
            q0=float(fields["q0"]),
            lambda_min=float(fields["lambda_min"]),
            lambda_max=float(fields["lambda_max"]),
            q_num=int(fields["q_num"]),
        )
        values = np.array([float(v) for v in fields["q_tilde"].split()])
    except ValueError as e:
        raise QualityMapFormatError(f"bad value in quality-map document: {e}") from e
    if values.shape[0] != rows:
        raise QualityMapFormatError(
            f"q_tilde has {values.shape[0]} values but rows = {rows}"
        )
    return QualityMap(rows=rows, q_tilde=values, config=config, clamped=fields["clamp"] == "true")
