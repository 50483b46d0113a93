"""Acceptance gate: one test per core numeric guarantee.

Each test prints a single [PASS] line with its runtime; a failed assert
surfaces as a normal pytest failure. Run with -s to see the lines.
"""

import math
import time

import numpy as np
import pytest

from qpa360 import banks, bdrate, geometry, metrics, qpa, rdsim


def report(name, started, limit_s):
    elapsed = time.perf_counter() - started
    assert elapsed < limit_s, f"{name}: took {elapsed:.2f}s, limit {limit_s}s"
    print(f"[PASS] {name} ({elapsed:.3f}s)")


DEFAULTS = qpa.QpaConfig(q0=32.0)


def test_mean_correction_identity():
    started = time.perf_counter()
    closed = qpa.mean_delta_q(DEFAULTS)
    assert closed == pytest.approx(-63.0 * math.log(2.0) / math.log(768.0), rel=1e-14)

    mpmath = pytest.importorskip("mpmath")
    limit = math.pi / 2 * (1.0 - 1e-12)

    def integrand(p):
        return qpa.delta_q(min(max(float(p), -limit), limit), DEFAULTS)

    quadrature = float(mpmath.quad(integrand, [-mpmath.pi / 2, 0, mpmath.pi / 2])) / math.pi
    assert closed == pytest.approx(quadrature, abs=1e-6)
    report("mean correction: closed form vs quadrature", started, 1.0)


def test_cancellation_at_sixty_degrees():
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    for q0 in rng.uniform(0.0, 63.0, size=100):
        config = qpa.QpaConfig(q0=float(q0))
        assert qpa.adapted_q(math.pi / 3, config) == pytest.approx(float(q0), abs=1e-12)
    report("adapted quality fixed point at 60 degrees", started, 1.0)


def test_multiplier_consistency():
    started = time.perf_counter()
    rng = np.random.default_rng(102)
    lam_equator = qpa.lambda_from_q(qpa.adapted_q(0.0, DEFAULTS), DEFAULTS)
    for lat in rng.uniform(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6, size=1000):
        lam = qpa.lambda_from_q(qpa.adapted_q(float(lat), DEFAULTS), DEFAULTS)
        assert lam / lam_equator == pytest.approx(math.cos(lat), rel=1e-9)
    report("quality-to-multiplier chain follows cosine", started, 1.0)


def test_equalization_and_optimality():
    started = time.perf_counter()
    rng = np.random.default_rng(103)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        lats = rng.uniform(-1.35, 1.35, size=n)
        model = rdsim.RdModel(
            scale=float(rng.uniform(20, 400)), decay=float(rng.uniform(0.25, 2.5))
        )
        total = float(rng.uniform(4, 12)) * n

        lam0 = rdsim.adapted_lambda_for_total_rate(model, lats, total)
        adapted = rdsim.adapted_allocation(model, lam0, lats)
        products = adapted.distortions * np.cos(adapted.latitudes)
        assert np.abs(products / products[0] - 1.0).max() < 1e-12

        brute = rdsim.brute_force_optimal_allocation(model, lats, total)
        per_band = np.abs(brute.rates - adapted.rates) / total
        assert per_band.max() <= 1e-3
    report("cosine-law allocation equalizes and is optimal", started, 60.0)


def test_simulator_dominance_and_gain():
    started = time.perf_counter()
    model = rdsim.RdModel(scale=100.0, decay=1.0)
    result = rdsim.simulate_bd_gain(model, geometry.row_latitudes(64), [1.0, 2.0, 4.0, 8.0, 16.0])
    assert result.bd_rate_percent < 0.0
    rows = result.rows
    for i in range(0, len(rows), 2):
        adapted, uniform = rows[i], rows[i + 1]
        assert adapted.total_rate == pytest.approx(uniform.total_rate, rel=1e-8)
        assert adapted.weighted_distortion < uniform.weighted_distortion
    report("banded simulation: adapted dominates uniform", started, 60.0)


def test_vector_interpolation_properties():
    started = time.perf_counter()
    rng = np.random.default_rng(104)
    for _ in range(1000):
        q_num = int(rng.integers(2, 12))
        channels = int(rng.integers(1, 6))
        vectors = rng.standard_normal((q_num, channels)).astype(np.float32)
        bank = banks.VectorBank(vectors)
        v64 = vectors.astype(np.float64)

        knot = int(rng.integers(0, q_num))
        assert np.array_equal(banks.interpolate(bank, float(knot)), v64[knot])

        if q_num >= 2:
            lo = int(rng.integers(0, q_num - 1))
            mid = banks.interpolate(bank, lo + 0.5)
            assert np.allclose(mid, 0.5 * (v64[lo] + v64[lo + 1]), rtol=0, atol=1e-15)

        q_tilde = float(rng.uniform(0.0, q_num - 1))
        out = banks.interpolate(bank, q_tilde)
        lo, hi = int(np.floor(q_tilde)), int(np.ceil(q_tilde))
        assert np.all(out >= np.minimum(v64[lo], v64[hi]) - 1e-12)
        assert np.all(out <= np.maximum(v64[lo], v64[hi]) + 1e-12)

        eps = float(rng.uniform(1e-9, 1e-4))
        if q_tilde + eps <= q_num - 1:
            step = np.abs(np.diff(v64, axis=0)).max()
            drift = np.abs(banks.interpolate(bank, q_tilde + eps) - out).max()
            assert drift <= eps * step * (1 + 1e-9) + 1e-15

        a = rng.standard_normal(channels)
        b = rng.standard_normal(channels)
        linear = banks.VectorBank(np.outer(np.arange(q_num, dtype=np.float64), a) + b)
        got = banks.interpolate(linear, q_tilde)
        assert np.allclose(got, a * q_tilde + b, rtol=0, atol=1e-12)
    report("bank interpolation properties over randomized banks", started, 10.0)


def test_metrics_reductions_and_weighting():
    started = time.perf_counter()
    rng = np.random.default_rng(105)
    uniform = np.ones((32, 64))
    for _ in range(100):
        a = rng.integers(0, 256, size=(32, 64)).astype(np.uint8)
        b = rng.integers(0, 256, size=(32, 64)).astype(np.uint8)
        assert metrics.ws_psnr_plane(a, b, uniform, 255) == pytest.approx(
            metrics.psnr_plane(a, b, 255), abs=1e-9
        )

    ref = np.array([[0, 10]], dtype=np.uint8)
    test = np.array([[0, 0]], dtype=np.uint8)
    assert metrics.weighted_mse(ref, test, np.array([[1.0, 3.0]])) == 75.0

    spec = metrics.VideoSpec(width=4, height=4, bit_depth=8, frame_count=1)
    flat = metrics.YuvFrame(
        y=np.full((4, 4), 100, dtype=np.uint8),
        u=np.full((2, 2), 100, dtype=np.uint8),
        v=np.full((2, 2), 100, dtype=np.uint8),
        spec=spec,
    )
    scores = []
    for row in (0, 1):  # pole-adjacent row first, then nearer the equator
        y = flat.y.copy()
        y[row, 0] = 140
        scores.append(
            metrics.ws_psnr_yuv(flat, metrics.YuvFrame(y=y, u=flat.u, v=flat.v, spec=spec))
        )
    assert scores[0] > scores[1]
    report("weighted metrics: reduction, fixture, monotonicity", started, 10.0)


def test_bd_rate_fixtures():
    started = time.perf_counter()
    ref_points = [(100.0, 30.0), (200.0, 33.0), (400.0, 36.0), (800.0, 39.0)]
    ref = bdrate.validate_curve(ref_points)
    assert bdrate.bd_rate(ref, ref) == 0.0
    inflated = bdrate.validate_curve([(r * 1.10, q) for r, q in ref_points])
    assert bdrate.bd_rate(ref, inflated) == pytest.approx(10.0, abs=1e-4)
    saved = bdrate.validate_curve([(r * 0.90, q) for r, q in ref_points])
    assert bdrate.bd_rate(ref, saved) == pytest.approx(-10.0, abs=1e-6)
    report("rate-curve comparison fixtures", started, 1.0)


def test_round_trips(tmp_path):
    started = time.perf_counter()
    qmap_path = tmp_path / "map.txt"
    qmap = qpa.build_quality_map(37, DEFAULTS)
    qpa.save_quality_map(qmap, qmap_path)
    back = qpa.load_quality_map(qmap_path)
    assert np.array_equal(back.q_tilde, qmap.q_tilde)
    assert back.config == qmap.config

    rng = np.random.default_rng(106)
    p1, p2 = tmp_path / "a.vbs", tmp_path / "b.vbs"
    original = banks.VectorBankSet(
        encoder=banks.VectorBank(rng.standard_normal((64, 4)).astype(np.float32)),
        decoder=banks.VectorBank(rng.standard_normal((64, 4)).astype(np.float32)),
        reconstruction=banks.VectorBank(rng.standard_normal((64, 3)).astype(np.float32)),
        feature=banks.VectorBank(rng.standard_normal((64, 2)).astype(np.float32)),
    )
    banks.save_bank_set(original, p1)
    banks.save_bank_set(banks.load_bank_set(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
    report("quality-map and bank-container round trips", started, 1.0)
