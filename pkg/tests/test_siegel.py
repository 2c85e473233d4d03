from fractions import Fraction

import mpmath
import numpy as np
import pytest

from brjunokit.contfrac import ContinuedFraction
from brjunokit.siegel import (
    Disk,
    Ellipse,
    SlitDisk,
    SmallDivisorError,
    conformal_radius,
    koebe_check,
    linearizer_coeffs,
    radius_drop_bound,
    running_estimates,
    upsilon_estimate,
)

GOLDEN = ContinuedFraction.golden()


def _reference_coefficients(n, dps=50):
    """b_1 = 1, (lambda^k - lambda) b_k = sum_{i<k} b_i b_{k-i}, in mpmath."""
    with mpmath.workdps(dps):
        t = (mpmath.sqrt(5) - 1) / 2
        lam = mpmath.expjpi(2 * t)
        b = [mpmath.mpc(0), mpmath.mpc(1)]
        for k in range(2, n + 1):
            s = sum(b[i] * b[k - i] for i in range(1, k))
            b.append(s / (lam ** k - lam))
        return [complex(x) for x in b]


@pytest.fixture(scope="module")
def golden_series():
    return linearizer_coeffs(GOLDEN, 128)


def test_coefficients_enclose_reference(golden_series):
    ref = _reference_coefficients(60)
    for k in range(1, 61):
        b = golden_series.coefficient(k)
        assert b.re.lo_float() <= ref[k].real <= b.re.hi_float()
        assert b.im.lo_float() <= ref[k].imag <= b.im.hi_float()


def test_residuals_contain_zero(golden_series):
    assert golden_series.residuals_contain_zero()[2:].all()


def test_small_divisor_at_rational():
    with pytest.raises(SmallDivisorError):
        linearizer_coeffs(Fraction(1, 3), 16)


def test_radius_estimate_is_flagged_non_rigorous(golden_series):
    est = conformal_radius(GOLDEN, 128, series=golden_series)
    assert est.rigorous is False
    assert 0.3 < est.point_estimate < 0.4
    assert min(v for _, v in est.window_estimates) <= est.point_estimate <= max(v for _, v in est.window_estimates)


def test_running_estimates_rows(golden_series):
    rows = running_estimates(golden_series)
    assert len(rows) == 128 and rows[0][0] == 1
    assert all(np.isfinite(r[2]) for r in rows[8:])


def test_radius_settles_with_order():
    r = [conformal_radius(GOLDEN, n).point_estimate for n in (128, 256, 512)]
    assert abs(r[2] - r[1]) < abs(r[1] - r[0])


def test_upsilon_estimate_is_periodic():
    a = upsilon_estimate(GOLDEN, 128)
    b = upsilon_estimate(GOLDEN, 128, shift=1)
    assert abs(a.value - b.value) < 1e-9


def test_koebe_quarter_disk_stays_bounded(golden_series):
    est = conformal_radius(GOLDEN, 128, series=golden_series)
    report = koebe_check(GOLDEN, est.point_estimate, samples=32, maxiter=1000)
    assert report.passed and report.escaped == 0


@pytest.mark.parametrize("domain", [Disk(), Disk(Fraction(3)), SlitDisk(), SlitDisk(Fraction(1, 2))])
@pytest.mark.parametrize("eps", [Fraction(1, 10 ** j) for j in range(1, 5)])
def test_radius_drop(domain, eps):
    rep = radius_drop_bound(domain, eps)
    assert rep.holds
    assert rep.difference.positive()
    assert rep.difference.le(rep.bound)


def test_slit_disk_closed_form():
    rep = radius_drop_bound(SlitDisk(), Fraction(1, 2))
    # a = 1/2: 4a / (1 + a)^2 = 8/9
    assert rep.r_inner.contains(Fraction(8, 9))


def test_ellipse_not_supported():
    with pytest.raises(NotImplementedError):
        radius_drop_bound(Ellipse(), Fraction(1, 10))


def test_oscillation_shrinks_across_doublings():
    osc = [conformal_radius(GOLDEN, n).oscillation for n in (64, 128, 256, 512)]
    assert osc == sorted(osc, reverse=True)
