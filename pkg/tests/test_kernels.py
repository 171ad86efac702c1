"""Cross-checks between the JIT loop kernels and their numpy twins."""

import math

import numpy as np
import pytest

from dbwsim import kernels

GEOM = (120.0, 320.0, -40.0, 500.0, 500.0, 390.0, 230.0)
LIMITS = (-math.pi / 4, math.pi / 4)


class TestPathsAgree:
    def test_linkage_forward(self):
        thetas = np.linspace(LIMITS[0], LIMITS[1], 5000)
        a = kernels.linkage_extension(thetas, *GEOM)
        b = kernels._linkage_extension_np(thetas, *GEOM)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_linkage_inverse(self):
        thetas = np.linspace(LIMITS[0], LIMITS[1], 2000)
        exts = kernels._linkage_extension_np(thetas, *GEOM)
        a = kernels.linkage_angle(exts, *GEOM, *LIMITS)
        b = kernels._linkage_angle_np(exts, *GEOM, *LIMITS)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_dubins_words(self):
        rng = np.random.default_rng(8)
        alpha = rng.uniform(0, 2 * math.pi, 5000)
        beta = rng.uniform(0, 2 * math.pi, 5000)
        d = rng.uniform(0, 8.0, 5000)
        a = kernels.dubins_words(alpha, beta, d)
        b = kernels._dubins_words_np(alpha, beta, d)
        finite_a = np.isfinite(a)
        assert np.array_equal(finite_a, np.isfinite(b))
        assert np.max(np.abs(a[finite_a] - b[finite_a])) < 1e-9


class TestWrap:
    def test_principal_range_untouched(self):
        for a in (0.0, 1.0, -3.0, math.pi, -math.pi + 1e-9):
            assert kernels.wrap_pi(a) == a

    def test_wraps_outside(self):
        assert kernels.wrap_pi(3 * math.pi) == pytest.approx(math.pi)
        assert kernels.wrap_pi(-math.pi) == pytest.approx(math.pi)
        assert kernels.wrap_pi(2 * math.pi) == pytest.approx(0.0, abs=1e-12)
        for a in np.linspace(-20.0, 20.0, 999):
            w = kernels.wrap_pi(float(a))
            assert -math.pi < w <= math.pi
            assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-12)
            assert math.sin(w) == pytest.approx(math.sin(a), abs=1e-12)
