"""PSNR and spherically weighted PSNR over raw planar YUV 4:2:0 video.

Weighted scores use per-pixel cos-latitude weights on the luma plane and
half-height ERP weights on the chroma planes; the combined score mixes the
three components 6:1:1. Sequences are read from headerless I420 files,
1 byte per sample at 8-bit and 2 bytes little-endian (LSB-aligned) at
10-bit. Sequence summaries average the per-frame dB values.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import chroma_weight_map, latitude_weights, sphere_weight_map

__all__ = [
    "PSNR_CAP_DB",
    "VideoSpec",
    "YuvFrame",
    "FrameMetrics",
    "SequenceReport",
    "weighted_mse",
    "psnr_plane",
    "ws_psnr_plane",
    "ws_psnr_yuv",
    "frame_metrics",
    "read_yuv_frames",
    "sequence_metrics",
    "render_report",
]

# Finite stand-in for infinite PSNR on identical planes.
PSNR_CAP_DB = 999.99

REPORT_COLUMNS = (
    "frame",
    "psnr_y",
    "psnr_u",
    "psnr_v",
    "wspsnr_y",
    "wspsnr_u",
    "wspsnr_v",
    "wspsnr_yuv",
)


@dataclass(frozen=True)
class VideoSpec:
    """Geometry of a raw 4:2:0 sequence."""

    width: int
    height: int
    bit_depth: int
    frame_count: int

    def __post_init__(self):
        if self.width < 2 or self.height < 2 or self.width % 2 or self.height % 2:
            raise ValueError(
                f"4:2:0 needs even, positive dimensions, got {self.width}x{self.height}"
            )
        if self.bit_depth not in (8, 10):
            raise ValueError(f"bit_depth must be 8 or 10, got {self.bit_depth}")
        if self.frame_count < 1:
            raise ValueError(f"frame_count must be >= 1, got {self.frame_count}")

    @property
    def max_value(self):
        return (1 << self.bit_depth) - 1

    @property
    def bytes_per_sample(self):
        return 1 if self.bit_depth == 8 else 2

    @property
    def dtype(self):
        return np.uint8 if self.bit_depth == 8 else np.dtype("<u2")

    @property
    def luma_shape(self):
        return (self.height, self.width)

    @property
    def chroma_shape(self):
        return (self.height // 2, self.width // 2)

    @property
    def frame_bytes(self):
        luma = self.width * self.height
        chroma = (self.width // 2) * (self.height // 2)
        return (luma + 2 * chroma) * self.bytes_per_sample


@dataclass(frozen=True)
class YuvFrame:
    """One decoded frame: full-resolution luma plus two half-resolution chroma planes."""

    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    spec: VideoSpec

    def __post_init__(self):
        if self.y.shape != self.spec.luma_shape:
            raise ValueError(f"luma shape {self.y.shape} != {self.spec.luma_shape}")
        for name, plane in (("u", self.u), ("v", self.v)):
            if plane.shape != self.spec.chroma_shape:
                raise ValueError(
                    f"{name} plane shape {plane.shape} != {self.spec.chroma_shape}"
                )
        if self.spec.bit_depth == 10:
            peak = max(int(self.y.max()), int(self.u.max()), int(self.v.max()))
            if peak > self.spec.max_value:
                raise ValueError(
                    f"sample value {peak} exceeds 10-bit range [0, {self.spec.max_value}]"
                )


def _check_same_shape(ref, test):
    if ref.shape != test.shape:
        raise ValueError(f"plane shapes differ: {ref.shape} vs {test.shape}")


def weighted_mse(ref_plane, test_plane, weight_grid):
    """Weighted mean of squared sample differences, normalized by the weight sum."""
    _check_same_shape(ref_plane, test_plane)
    if weight_grid.shape != ref_plane.shape:
        raise ValueError(
            f"weight grid shape {weight_grid.shape} does not match plane {ref_plane.shape}"
        )
    wsum = float(np.sum(weight_grid))
    if wsum <= 0:
        raise ValueError("weight grid must have positive total weight")
    return kernels.weighted_sse(ref_plane, test_plane, weight_grid) / wsum


def _mse_to_db(mse, max_value):
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(max_value * max_value / mse), PSNR_CAP_DB)


def psnr_plane(ref_plane, test_plane, max_value):
    """Plain (unweighted) PSNR of two planes, capped on identical input."""
    _check_same_shape(ref_plane, test_plane)
    mse = kernels.sse(ref_plane, test_plane) / ref_plane.size
    return _mse_to_db(mse, max_value)


def ws_psnr_plane(ref_plane, test_plane, weight_grid, max_value):
    """PSNR over the weighted MSE, capped at PSNR_CAP_DB on identical input."""
    return _mse_to_db(weighted_mse(ref_plane, test_plane, weight_grid), max_value)


def _row_weighted_psnr(ref_plane, test_plane, row_weights, max_value):
    # Grid-free path: ERP weights are constant across columns.
    _check_same_shape(ref_plane, test_plane)
    wsum = float(np.sum(row_weights)) * ref_plane.shape[1]
    mse = kernels.row_weighted_sse(ref_plane, test_plane, row_weights) / wsum
    return _mse_to_db(mse, max_value)


def ws_psnr_yuv(ref, test):
    """Combined spherical score (6 * Y + U + V) / 8 of two frames."""
    if ref.spec != test.spec:
        raise ValueError(f"frame specs differ: {ref.spec} vs {test.spec}")
    spec = ref.spec
    wy = latitude_weights(spec.height)
    wc = latitude_weights(spec.height // 2)
    y = _row_weighted_psnr(ref.y, test.y, wy, spec.max_value)
    u = _row_weighted_psnr(ref.u, test.u, wc, spec.max_value)
    v = _row_weighted_psnr(ref.v, test.v, wc, spec.max_value)
    return (6.0 * y + u + v) / 8.0


@dataclass(frozen=True)
class FrameMetrics:
    frame: int
    psnr_y: float
    psnr_u: float
    psnr_v: float
    wspsnr_y: float
    wspsnr_u: float
    wspsnr_v: float
    wspsnr_yuv: float

    def values(self):
        return (
            self.psnr_y,
            self.psnr_u,
            self.psnr_v,
            self.wspsnr_y,
            self.wspsnr_u,
            self.wspsnr_v,
            self.wspsnr_yuv,
        )


def frame_metrics(ref, test, frame_index=0):
    """Plain and weighted scores of one frame pair."""
    if ref.spec != test.spec:
        raise ValueError(f"frame specs differ: {ref.spec} vs {test.spec}")
    spec = ref.spec
    mx = spec.max_value
    wy = latitude_weights(spec.height)
    wc = latitude_weights(spec.height // 2)
    wspsnr_y = _row_weighted_psnr(ref.y, test.y, wy, mx)
    wspsnr_u = _row_weighted_psnr(ref.u, test.u, wc, mx)
    wspsnr_v = _row_weighted_psnr(ref.v, test.v, wc, mx)
    return FrameMetrics(
        frame=frame_index,
        psnr_y=psnr_plane(ref.y, test.y, mx),
        psnr_u=psnr_plane(ref.u, test.u, mx),
        psnr_v=psnr_plane(ref.v, test.v, mx),
        wspsnr_y=wspsnr_y,
        wspsnr_u=wspsnr_u,
        wspsnr_v=wspsnr_v,
        wspsnr_yuv=(6.0 * wspsnr_y + wspsnr_u + wspsnr_v) / 8.0,
    )


def _read_plane(f, shape, dtype, nbytes, path, frame_index, plane_name):
    raw = f.read(nbytes)
    if len(raw) != nbytes:
        raise ValueError(
            f"{path}: file ended inside frame {frame_index} ({plane_name} plane): "
            f"wanted {nbytes} bytes, got {len(raw)}"
        )
    return np.frombuffer(raw, dtype=dtype).reshape(shape)


def read_yuv_frames(path, spec, count=None):
    """Yield YuvFrame objects from a headerless I420 file.

    Reads `count` frames (default spec.frame_count); raises with the frame
    index when the file is too short.
    """
    n = spec.frame_count if count is None else count
    h, w = spec.luma_shape
    ch, cw = spec.chroma_shape
    bps = spec.bytes_per_sample
    with open(path, "rb") as f:
        for idx in range(n):
            y = _read_plane(f, (h, w), spec.dtype, h * w * bps, path, idx, "Y")
            u = _read_plane(f, (ch, cw), spec.dtype, ch * cw * bps, path, idx, "U")
            v = _read_plane(f, (ch, cw), spec.dtype, ch * cw * bps, path, idx, "V")
            yield YuvFrame(y=y, u=u, v=v, spec=spec)


def probe_frame_count(path, spec):
    """Number of complete frames the file can hold."""
    return os.path.getsize(path) // spec.frame_bytes


@dataclass(frozen=True)
class SequenceReport:
    """Per-frame metric rows plus their per-column dB averages."""

    spec: VideoSpec
    rows: tuple

    @property
    def averages(self):
        cols = np.array([row.values() for row in self.rows])
        return tuple(float(v) for v in cols.mean(axis=0))


def sequence_metrics(ref_path, test_path, spec):
    """Score `spec.frame_count` frames of two raw sequences against each other."""
    for path in (ref_path, test_path):
        have = probe_frame_count(path, spec)
        if have < spec.frame_count:
            raise ValueError(
                f"{path}: holds only {have} complete frames of "
                f"{spec.width}x{spec.height}@{spec.bit_depth}bit, need {spec.frame_count} "
                f"(short at frame {have})"
            )
    rows = []
    ref_frames = read_yuv_frames(ref_path, spec)
    test_frames = read_yuv_frames(test_path, spec)
    for idx, (ref, test) in enumerate(zip(ref_frames, test_frames)):
        rows.append(frame_metrics(ref, test, frame_index=idx))
    return SequenceReport(spec=spec, rows=tuple(rows))


def _fmt(value, precision):
    if precision == "full":
        return repr(float(value))
    return f"{value:.{precision}g}"


def render_report(report, precision=6):
    """Render a SequenceReport as CSV: one row per frame, then an 'average' row."""
    lines = [",".join(REPORT_COLUMNS)]
    for row in report.rows:
        lines.append(
            ",".join([str(row.frame)] + [_fmt(v, precision) for v in row.values()])
        )
    lines.append(",".join(["average"] + [_fmt(v, precision) for v in report.averages]))
    return "\n".join(lines) + "\n"
