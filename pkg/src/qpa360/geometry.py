"""Equirectangular plane geometry.

Maps vertical sample positions of an ERP plane (pixel rows or latent rows)
to latitudes, area-stretch factors, and spherical cos-latitude weights.
Latitudes use the sample-center convention (row + 0.5), so no sample ever
sits exactly on a pole.
"""

import math

import numpy as np

__all__ = [
    "PoleError",
    "LatitudeGrid",
    "row_to_latitude",
    "row_latitudes",
    "latitude_weights",
    "area_stretch",
    "sphere_weight_map",
    "chroma_weight_map",
]

HALF_PI = math.pi / 2.0


class PoleError(ValueError):
    """Latitude at or beyond +/- pi/2, where 1/cos(latitude) diverges."""


def _check_rows(rows):
    if not isinstance(rows, (int, np.integer)):
        raise TypeError(f"rows must be an integer, got {type(rows).__name__}")
    if rows < 1:
        raise ValueError(f"rows must be >= 1, got {rows}")


def row_to_latitude(row_index, rows):
    """Latitude in radians of the center of `row_index` on a `rows`-high ERP plane.

    Row 0 is the top row (highest latitude, near +pi/2); the result is
    always strictly inside (-pi/2, pi/2).
    """
    _check_rows(rows)
    if not 0 <= row_index < rows:
        raise ValueError(f"row_index {row_index} out of range for {rows} rows")
    return (0.5 * rows - row_index - 0.5) * math.pi / rows


def row_latitudes(rows):
    """Latitudes of all row centers, top row first, as a float64 array."""
    _check_rows(rows)
    return np.array([row_to_latitude(r, rows) for r in range(rows)])


def latitude_weights(rows):
    """Per-row spherical weights cos(latitude), one entry per row."""
    return np.array([math.cos(lat) for lat in row_latitudes(rows)])


def area_stretch(latitude):
    """Horizontal stretch factor 1/cos(latitude) of the ERP area element.

    Equals 1 at the equator and grows toward the poles.
    """
    if not abs(latitude) < HALF_PI:
        raise PoleError(f"latitude {latitude} is at or beyond a pole (|lat| >= pi/2)")
    return 1.0 / math.cos(latitude)


class LatitudeGrid:
    """Per-row latitudes and spherical weights of an ERP frame or latent plane.

    Latitudes decrease strictly from the top row to the bottom row and are
    symmetric about the equator for even row counts; weights are
    cos(latitude), all in (0, 1].
    """

    def __init__(self, rows):
        _check_rows(rows)
        self.rows = int(rows)
        self.latitudes = row_latitudes(rows)
        self.weights = np.array([math.cos(lat) for lat in self.latitudes])
        self.latitudes.flags.writeable = False
        self.weights.flags.writeable = False

    def __repr__(self):
        return f"LatitudeGrid(rows={self.rows})"


def sphere_weight_map(rows, cols):
    """Full (rows, cols) spherical weight grid for an ERP plane.

    The weight of every pixel in row r is cos(row_to_latitude(r, rows));
    weights do not vary across columns.
    """
    _check_rows(rows)
    _check_rows(cols)
    w = latitude_weights(rows)
    return np.repeat(w[:, None], cols, axis=1)


def chroma_weight_map(luma_rows, luma_cols):
    """Weight grid for the half-resolution chroma planes of a 4:2:0 frame.

    The chroma plane is treated as its own ERP grid of half height, so the
    weight at chroma row r is cos(row_to_latitude(r, luma_rows / 2)).
    Luma dimensions must be even.
    """
    _check_rows(luma_rows)
    _check_rows(luma_cols)
    if luma_rows % 2 or luma_cols % 2:
        raise ValueError(
            f"4:2:0 requires even luma dimensions, got {luma_rows}x{luma_cols}"
        )
    return sphere_weight_map(luma_rows // 2, luma_cols // 2)
