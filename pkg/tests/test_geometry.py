import math

import numpy as np
import pytest

from dbwsim import geometry
from dbwsim.errors import RangeError
from dbwsim.geometry import (MAX_WHEEL_ANGLE, ActuatorCalibration,
                             SteeringGeometry, angle_to_command,
                             angle_to_extension, angles_for_extensions,
                             command_to_angle, extension_image,
                             extension_to_angle, extensions_for_angles,
                             is_monotone, validate_stroke)

from _oracles import linkage_extension_ref

# The linkage-example fixture: exercised only at angles well inside its
# monotone region (its toggle point sits near +44 deg).
FIXTURE = SteeringGeometry(r1=100.0, x0=300.0, y0=-50.0, w=600.0, h=400.0,
                           install_len=390.0, ext_init=125.0)

# Frozen oracle outputs (tests/_oracles.py, evaluated before the build).
FIXTURE_L_AT_0 = -23.132267551043
FIXTURE_L_AT_P04 = -51.416887636429
FIXTURE_L_AT_M04 = 14.872983049162


def random_valid_geometry(rng) -> SteeringGeometry:
    """Rejection-sample geometries that are strictly monotone over the
    admissible range AND keep their linkage dead points clear of it (a
    dead point hiding between monotonicity samples folds the map)."""
    while True:
        geom = SteeringGeometry(
            r1=rng.uniform(60.0, 160.0),
            x0=rng.uniform(220.0, 420.0),
            y0=rng.uniform(-120.0, -10.0),
            w=rng.uniform(400.0, 700.0),
            h=rng.uniform(350.0, 650.0),
            install_len=390.0,
            ext_init=rng.uniform(100.0, 300.0),
        )
        if geometry.toggle_margin(geom) > 0.05 and is_monotone(geom):
            return geom


class TestForwardMap:
    def test_fixture_center_matches_oracle(self):
        assert angle_to_extension(0.0, FIXTURE) == pytest.approx(
            FIXTURE_L_AT_0, abs=1e-9)

    def test_fixture_off_center_matches_oracle(self):
        assert angle_to_extension(0.4, FIXTURE) == pytest.approx(
            FIXTURE_L_AT_P04, abs=1e-9)
        assert angle_to_extension(-0.4, FIXTURE) == pytest.approx(
            FIXTURE_L_AT_M04, abs=1e-9)

    def test_fixture_ordered_with_linkage_side(self):
        # Positive angle = left turn retracts this linkage.
        assert angle_to_extension(0.4, FIXTURE) < angle_to_extension(-0.4, FIXTURE)

    def test_alpha_offset_zeroes_theta(self):
        # Intermediate crank angle equals the kingpin offset exactly when
        # the wheel angle is zero: the map at 0 reduces to the beta chain.
        alpha0 = math.atan(FIXTURE.w / (2.0 * FIXTURE.h))
        beta = alpha0 - math.pi / 2.0
        x = FIXTURE.r1 * math.cos(beta)
        y = FIXTURE.r1 * math.sin(beta)
        expected = math.hypot(FIXTURE.x0 - x, FIXTURE.y0 - y) \
            - FIXTURE.install_len + FIXTURE.ext_init
        assert angle_to_extension(0.0, FIXTURE) == pytest.approx(expected, abs=1e-12)

    def test_out_of_range_angle_raises(self):
        with pytest.raises(RangeError):
            angle_to_extension(MAX_WHEEL_ANGLE + 0.01, SteeringGeometry())
        with pytest.raises(RangeError):
            angle_to_extension(-1.0, SteeringGeometry())

    def test_never_silently_clamps(self):
        geom = SteeringGeometry()
        with pytest.raises(RangeError):
            angle_to_extension(0.9, geom)

    def test_matches_oracle_on_random_draws(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            geom = SteeringGeometry(
                r1=rng.uniform(60.0, 160.0), x0=rng.uniform(220.0, 420.0),
                y0=rng.uniform(-120.0, -10.0), w=rng.uniform(400.0, 700.0),
                h=rng.uniform(350.0, 650.0), install_len=390.0,
                ext_init=rng.uniform(100.0, 300.0))
            theta = rng.uniform(-MAX_WHEEL_ANGLE, MAX_WHEEL_ANGLE)
            expected = linkage_extension_ref(theta, geom.r1, geom.x0, geom.y0,
                                             geom.w, geom.h, geom.install_len,
                                             geom.ext_init)
            assert angle_to_extension(theta, geom) == pytest.approx(
                expected, abs=1e-9)


class TestInverseMap:
    def test_round_trip_at_center(self):
        geom = SteeringGeometry()
        assert extension_to_angle(angle_to_extension(0.0, geom), geom) == \
            pytest.approx(0.0, abs=1e-6)

    def test_round_trip_sweep(self):
        geom = SteeringGeometry()
        thetas = np.linspace(-MAX_WHEEL_ANGLE, MAX_WHEEL_ANGLE, 100)
        exts = extensions_for_angles(thetas, geom)
        back = angles_for_extensions(exts, geom)
        assert np.max(np.abs(back - thetas)) < 1e-6

    def test_extension_below_image_raises(self):
        geom = SteeringGeometry()
        lo, hi = extension_image(geom)
        with pytest.raises(RangeError):
            extension_to_angle(lo - 1.0, geom)
        with pytest.raises(RangeError):
            extension_to_angle(hi + 1.0, geom)

    def test_monotone_default_geometry(self):
        assert is_monotone(SteeringGeometry())

    def test_validate_stroke_accepts_default(self):
        validate_stroke(SteeringGeometry(), ActuatorCalibration())

    def test_validate_stroke_rejects_overrun(self):
        bad = SteeringGeometry(ext_init=400.0)  # image pushed past 250 mm
        with pytest.raises(ValueError):
            validate_stroke(bad, ActuatorCalibration())


class TestGeometryType:
    def test_rejects_nonpositive_lengths(self):
        with pytest.raises(ValueError):
            SteeringGeometry(r1=0.0)
        with pytest.raises(ValueError):
            SteeringGeometry(h=-10.0)

    def test_rejects_positive_y0(self):
        with pytest.raises(ValueError):
            SteeringGeometry(y0=5.0)


class TestCommandTable:
    def test_anchor_points(self):
        assert angle_to_command(0.0) == 1900
        assert angle_to_command(math.radians(-45.0)) == 2500
        assert angle_to_command(math.radians(45.0)) == 1000

    def test_right_segment_midpoint(self):
        assert angle_to_command(math.radians(-22.5)) == 2200

    def test_segment_slopes_differ(self):
        # 600 counts over the right half, 900 over the left; one affine fit
        # would misplace the center.
        right_span = angle_to_command(math.radians(-45)) - angle_to_command(0.0)
        left_span = angle_to_command(0.0) - angle_to_command(math.radians(45))
        assert right_span == 600
        assert left_span == 900

    def test_inverse_anchors(self):
        assert command_to_angle(1900) == pytest.approx(0.0, abs=1e-12)
        assert command_to_angle(1000) == pytest.approx(math.radians(45.0))
        assert command_to_angle(2500) == pytest.approx(math.radians(-45.0))
        assert command_to_angle(2200) == pytest.approx(math.radians(-22.5))

    def test_round_trip_within_one_count(self):
        cal = ActuatorCalibration()
        # Worst quantization: half a count, in angle units per segment.
        count_right = math.radians(45.0) / 600.0
        count_left = math.radians(45.0) / 900.0
        for theta in np.linspace(-math.pi / 4, math.pi / 4, 721):
            back = command_to_angle(angle_to_command(theta, cal), cal)
            quantum = count_right if theta < 0 else count_left
            assert abs(back - theta) <= quantum

    def test_command_range_errors(self):
        with pytest.raises(RangeError):
            command_to_angle(999)
        with pytest.raises(RangeError):
            command_to_angle(2501)
        with pytest.raises(RangeError):
            angle_to_command(1.0)

    def test_all_admissible_angles_in_band(self):
        for theta in np.linspace(-math.pi / 4, math.pi / 4, 1001):
            assert 1000 <= angle_to_command(theta) <= 2500

    def test_calibration_ordering_enforced(self):
        with pytest.raises(ValueError):
            ActuatorCalibration(cmd_center=900)


class TestMonotonicityProperty:
    def test_thousand_point_check_on_random_geometries(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            geom = random_valid_geometry(rng)
            thetas = np.linspace(-MAX_WHEEL_ANGLE, MAX_WHEEL_ANGLE, 1000)
            diffs = np.diff(extensions_for_angles(thetas, geom))
            assert np.all(diffs > 0) or np.all(diffs < 0)
