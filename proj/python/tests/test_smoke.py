import math

import numpy as np
import pytest

import loclim


def test_classify_regimes():
    assert loclim.classify("1/3")["regime"] == "CLT"
    assert loclim.classify("1/10")["regime"] == "LP_LIMIT"
    assert loclim.classify("1/5")["regime"] == "BOUNDARY_LOG"
    r = loclim.classify("1/6", d=2)
    assert r["regime"] == "BOUNDARY_LOG"
    assert r["boundary_exact"]
    assert loclim.classify("1/2", k=["1/2"])["regime"] == "NONEXISTENT"


def test_constants():
    d1 = loclim.constant("Dtilde1", "1/5")["value"]
    assert d1 == pytest.approx(3 / (2 * 0.2 * math.sqrt(2 * math.pi)), rel=1e-9)
    assert loclim.constant("D_Hd_boundary", "1/5")["value"] == pytest.approx(d1, rel=1e-8)
    assert loclim.constant("Dtilde2", "1/3")["value"] == pytest.approx(0.829577150599, rel=1e-9)


def test_lp_coefficient_terms():
    c = loclim.constant("LP_COEFFICIENT", "1/10")
    (term,) = c["lp_terms"]
    assert term["alpha"] == [2]
    assert term["derivative_coefficient"] == pytest.approx(0.5, rel=1e-9)


def test_sample_path_shape_and_determinism():
    a = loclim.sample_path(0.3, 256, seed=5, replicate=2)
    b = loclim.sample_path(0.3, 256, seed=5, replicate=2)
    assert a.shape == (1, 257)
    assert a[0, 0] == 0.0
    np.testing.assert_array_equal(a, b)
    c = loclim.sample_path(0.3, 256, seed=5, replicate=3)
    assert not np.array_equal(a, c)


def test_heat_kernel_deriv_paths_agree():
    h = loclim.heat_kernel_deriv([0.3], 0.5, [2])
    f = loclim.heat_kernel_deriv([0.3], 0.5, [2], method="fourier")
    assert f == pytest.approx(h, rel=1e-8)


def test_expected_estimate_bm():
    v = loclim.expected_estimate(0.5, 0.1)
    exact = 2 * (math.sqrt(1.1) - math.sqrt(0.1)) / math.sqrt(2 * math.pi)
    assert v == pytest.approx(exact, rel=1e-8)


def test_estimate_is_positive_and_deterministic():
    a = loclim.estimate(0.5, 0.05, seed=3, steps=512)
    assert a > 0
    assert a == loclim.estimate(0.5, 0.05, seed=3, steps=512)


def test_moment_formula_bm():
    r = loclim.moment_formula([(0.0, 1.0)], [2], H=0.5, samples=1 << 14)
    assert abs(r["value"] - math.sqrt(2 / math.pi)) < 4 * r["standard_error"] + 1e-12
    assert loclim.moment_formula([(0.0, 1.0)], [1])["value"] == 0.0


def test_domain_errors_raise():
    with pytest.raises(ValueError):
        loclim.constant("Dtilde2", "1/5")
    with pytest.raises(ValueError):
        loclim.sample_path(1.5, 16, seed=1)
