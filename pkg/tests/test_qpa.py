import math

import numpy as np
import pytest

from qpa360 import geometry, qpa

# High-precision reference values (20 digits, independently evaluated).
SQRT_768 = 27.712812921102036696
LAMBDA_768_COS_PI_4 = 543.05800795126849874
MEAN_DQ_DEFAULT = -6.5727956677201384747
EQUATOR_Q_FROM_32 = 38.572795667720138475
TWO_ROW_Q_FROM_32 = 35.286397833860069237
ONE_ROW_Q_FROM_10 = 16.572795667720138475
LN2 = 0.69314718055994530942

DEFAULTS = qpa.QpaConfig(q0=32.0)


class TestConfig:
    def test_defaults(self):
        assert DEFAULTS.lambda_min == 1.0
        assert DEFAULTS.lambda_max == 768.0
        assert DEFAULTS.q_num == 64

    def test_rejects_bad_ranges(self):
        with pytest.raises(ValueError):
            qpa.QpaConfig(q0=1.0, lambda_min=2.0, lambda_max=1.0)
        with pytest.raises(ValueError):
            qpa.QpaConfig(q0=1.0, lambda_min=0.0)
        with pytest.raises(ValueError):
            qpa.QpaConfig(q0=1.0, q_num=1)
        with pytest.raises(ValueError):
            qpa.QpaConfig(q0=-0.5)
        with pytest.raises(ValueError):
            qpa.QpaConfig(q0=63.5)


class TestLambdaMapping:
    def test_endpoints(self):
        assert qpa.lambda_from_q(0.0, DEFAULTS) == 1.0
        assert qpa.lambda_from_q(63.0, DEFAULTS) == pytest.approx(768.0, rel=1e-12)

    def test_log_midpoint(self):
        assert qpa.lambda_from_q(31.5, DEFAULTS) == pytest.approx(SQRT_768, rel=1e-12)

    def test_inverse_endpoints(self):
        assert qpa.q_from_lambda(1.0, DEFAULTS) == 0.0
        assert qpa.q_from_lambda(768.0, DEFAULTS) == pytest.approx(63.0, rel=1e-12)
        assert qpa.q_from_lambda(27.7128, DEFAULTS) == pytest.approx(31.5, abs=1e-4)

    def test_round_trip_random(self):
        rng = np.random.default_rng(0)
        for q in rng.uniform(0.0, 63.0, size=10_000):
            back = qpa.q_from_lambda(qpa.lambda_from_q(q, DEFAULTS), DEFAULTS)
            assert back == pytest.approx(q, rel=1e-10, abs=1e-10)

    def test_monotone(self):
        qs = np.linspace(0.0, 63.0, 101)
        lams = [qpa.lambda_from_q(q, DEFAULTS) for q in qs]
        assert np.all(np.diff(lams) > 0)

    def test_nonpositive_lambda_rejected(self):
        with pytest.raises(ValueError):
            qpa.q_from_lambda(0.0, DEFAULTS)
        with pytest.raises(ValueError):
            qpa.q_from_lambda(-3.0, DEFAULTS)


class TestLambdaAtLatitude:
    def test_equator_identity(self):
        assert qpa.lambda_at_latitude(100.0, 0.0) == 100.0

    def test_sixty_degrees_halves(self):
        assert qpa.lambda_at_latitude(100.0, math.pi / 3) == pytest.approx(50.0, rel=1e-12)

    def test_forty_five_degrees(self):
        assert qpa.lambda_at_latitude(768.0, math.pi / 4) == pytest.approx(
            LAMBDA_768_COS_PI_4, rel=1e-12
        )

    def test_pole_rejected(self):
        with pytest.raises(geometry.PoleError):
            qpa.lambda_at_latitude(1.0, math.pi / 2)


class TestDeltaQ:
    def test_zero_at_equator(self):
        assert qpa.delta_q(0.0, DEFAULTS) == 0.0

    def test_sixty_degrees(self):
        assert qpa.delta_q(math.pi / 3, DEFAULTS) == pytest.approx(MEAN_DQ_DEFAULT, rel=1e-12)

    def test_near_pole_is_finite(self):
        value = qpa.delta_q(math.pi / 2 - 1e-9, DEFAULTS)
        assert value < -100.0
        assert math.isfinite(value)

    def test_decreasing_in_absolute_latitude(self):
        lats = np.linspace(0.0, 1.5, 40)
        vals = [qpa.delta_q(lat, DEFAULTS) for lat in lats]
        assert np.all(np.diff(vals) < 0)
        for lat in lats[1:]:
            assert qpa.delta_q(-lat, DEFAULTS) == qpa.delta_q(lat, DEFAULTS)


class TestMeanDeltaQ:
    def test_default_value(self):
        assert qpa.mean_delta_q(DEFAULTS) == pytest.approx(MEAN_DQ_DEFAULT, rel=1e-12)

    def test_unit_span_reduces_to_minus_ln2(self):
        config = qpa.QpaConfig(q0=0.5, lambda_min=1.0, lambda_max=math.e, q_num=2)
        assert qpa.mean_delta_q(config) == pytest.approx(-LN2, rel=1e-12)

    def test_vanishes_for_huge_span(self):
        spans = [1e6, 1e30, 1e300]
        values = [
            qpa.mean_delta_q(qpa.QpaConfig(q0=1.0, lambda_min=1.0, lambda_max=m, q_num=64))
            for m in spans
        ]
        assert all(v < 0 for v in values)
        assert values[0] < values[1] < values[2] < -1e-3

    def test_matches_adaptive_quadrature(self):
        mpmath = pytest.importorskip("mpmath")
        # The integrand diverges at the poles; clip just inside so the
        # quadrature only sees finite values (the clipped sliver
        # contributes ~1e-10 to the mean).
        limit = math.pi / 2 * (1.0 - 1e-12)

        def integrand(p):
            return qpa.delta_q(min(max(float(p), -limit), limit), DEFAULTS)

        integral = mpmath.quad(integrand, [-mpmath.pi / 2, 0, mpmath.pi / 2])
        assert qpa.mean_delta_q(DEFAULTS) == pytest.approx(float(integral) / math.pi, abs=1e-6)


class TestAdaptedQ:
    def test_cancellation_at_sixty_degrees(self):
        for q0 in (0.0, 13.25, 32.0, 63.0):
            config = qpa.QpaConfig(q0=q0)
            assert qpa.adapted_q(math.pi / 3, config) == pytest.approx(q0, abs=1e-12)

    def test_equator_value(self):
        assert qpa.adapted_q(0.0, DEFAULTS) == pytest.approx(EQUATOR_Q_FROM_32, rel=1e-12)

    def test_even_in_latitude(self):
        assert qpa.adapted_q(math.pi / 4, DEFAULTS) == qpa.adapted_q(-math.pi / 4, DEFAULTS)

    def test_multiplier_ratio_follows_cosine(self):
        rng = np.random.default_rng(5)
        lam_equator = qpa.lambda_from_q(qpa.adapted_q(0.0, DEFAULTS), DEFAULTS)
        for lat in rng.uniform(-1.55, 1.55, size=500):
            ratio = qpa.lambda_from_q(qpa.adapted_q(lat, DEFAULTS), DEFAULTS) / lam_equator
            assert ratio == pytest.approx(math.cos(lat), rel=1e-9)

    def test_latitude_mean_is_q0(self):
        mpmath = pytest.importorskip("mpmath")
        limit = math.pi / 2 * (1.0 - 1e-12)

        def integrand(p):
            return qpa.adapted_q(min(max(float(p), -limit), limit), DEFAULTS)

        integral = mpmath.quad(integrand, [-mpmath.pi / 2, 0, mpmath.pi / 2])
        assert float(integral) / math.pi == pytest.approx(32.0, abs=1e-6)


class TestQualityMap:
    def test_two_rows(self):
        qmap = qpa.build_quality_map(2, DEFAULTS)
        assert qmap.q_tilde.shape == (2,)
        assert qmap.q_tilde[0] == qmap.q_tilde[1]
        assert qmap.q_tilde[0] == pytest.approx(TWO_ROW_Q_FROM_32, rel=1e-12)

    def test_single_row(self):
        qmap = qpa.build_quality_map(1, qpa.QpaConfig(q0=10.0))
        assert qmap.q_tilde[0] == pytest.approx(ONE_ROW_Q_FROM_10, rel=1e-12)

    def test_clamped_high_base(self):
        qmap = qpa.build_quality_map(2, qpa.QpaConfig(q0=63.0), clamp=True)
        assert qmap.clamped
        assert np.all(qmap.q_tilde == 63.0)

    def test_unclamped_high_base_exceeds_range(self):
        qmap = qpa.build_quality_map(2, qpa.QpaConfig(q0=63.0))
        assert np.all(qmap.q_tilde > 63.0)

    def test_symmetry_even_rows(self):
        qmap = qpa.build_quality_map(64, DEFAULTS)
        assert np.array_equal(qmap.q_tilde, qmap.q_tilde[::-1])

    def test_max_at_center_rows(self):
        qmap = qpa.build_quality_map(64, DEFAULTS)
        top = np.argsort(qmap.q_tilde)[-2:]
        assert set(top.tolist()) == {31, 32}

    def test_composition_matches_scalar_path(self):
        qmap = qpa.build_quality_map(17, DEFAULTS)
        for r in range(17):
            lat = geometry.row_to_latitude(r, 17)
            assert qmap.q_tilde[r] == qpa.adapted_q(lat, DEFAULTS)


class TestGopSchedule:
    PATTERN = qpa.GopSchedule(qpa.DEFAULT_GOP_OFFSETS)

    def test_anchor_frame_unchanged(self):
        assert qpa.gop_offset_schedule(0, self.PATTERN, 32.0, 64) == 32.0

    def test_boost_frame(self):
        assert qpa.gop_offset_schedule(1, self.PATTERN, 32.0, 64) == 40.0

    def test_clamped_boost(self):
        assert qpa.gop_offset_schedule(9, self.PATTERN, 60.0, 64) == 63.0

    def test_cycles(self):
        for frame in range(32):
            expected = qpa.DEFAULT_GOP_OFFSETS[frame % 8] + 20.0
            assert qpa.gop_offset_schedule(frame, self.PATTERN, 20.0, 64) == expected

    def test_empty_pattern_rejected(self):
        with pytest.raises(ValueError):
            qpa.GopSchedule(())


class TestQualityMapFile:
    def test_round_trip_value_exact(self, tmp_path):
        path = tmp_path / "map.txt"
        qmap = qpa.build_quality_map(48, DEFAULTS, clamp=True)
        qpa.save_quality_map(qmap, path)
        back = qpa.load_quality_map(path)
        assert back.rows == 48
        assert back.clamped == qmap.clamped
        assert back.config == qmap.config
        assert np.array_equal(back.q_tilde, qmap.q_tilde)

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "map.txt"
        qpa.save_quality_map(qpa.build_quality_map(4, DEFAULTS), path)
        lines = [l for l in path.read_text().splitlines() if not l.startswith("q0")]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(qpa.QualityMapFormatError):
            qpa.load_quality_map(path)

    def test_wrong_count_rejected(self, tmp_path):
        path = tmp_path / "map.txt"
        qpa.save_quality_map(qpa.build_quality_map(4, DEFAULTS), path)
        text = path.read_text().replace("rows = 4", "rows = 5")
        path.write_text(text)
        with pytest.raises(qpa.QualityMapFormatError):
            qpa.load_quality_map(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "map.txt"
        path.write_text("format = other/9\n")
        with pytest.raises(qpa.QualityMapFormatError):
            qpa.load_quality_map(path)
