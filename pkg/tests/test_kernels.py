import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brjunokit import kernels

needs_cython = pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")


def _disks(seed, n=4000):
    rng = np.random.default_rng(seed)
    zr = rng.uniform(-2.5, 2.5, n)
    zi = rng.uniform(-2.5, 2.5, n)
    rad = rng.uniform(0, 0.05, n)
    return zr, zi, rad


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_numpy_backend_always_available():
    assert "numpy" in kernels.available_backends()
    assert kernels.BACKEND in kernels.available_backends()


@needs_cython
@given(st.integers(min_value=0, max_value=10 ** 6),
       st.sampled_from([(0.0, 0.0), (-1.0, 0.0), (-0.122561, 0.744862), (0.3, 0.0), (-2.0, 0.0)]))
@settings(max_examples=15, deadline=None)
def test_backends_agree_on_disk_verdicts(seed, c):
    zr, zi, rad = _disks(seed)
    cr, ci = c
    R0 = (1 + np.sqrt(1 + 4 * np.hypot(cr, ci))) / 2
    tr = np.array([0.0]) if c == (0.0, 0.0) else np.zeros(0)
    ti = np.zeros_like(tr)
    trad = np.full_like(tr, 0.25)
    a = kernels.get_backend("numpy").iterate_disks(zr, zi, rad, cr, ci, 1e-17, R0, 300, tr, ti, trad)
    b = kernels.get_backend("cython").iterate_disks(zr, zi, rad, cr, ci, 1e-17, R0, 300, tr, ti, trad)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


@needs_cython
def test_backends_agree_on_linearizer():
    n = 64
    k = np.arange(n + 1)
    theta = (np.sqrt(5) - 1) / 2
    lam = np.exp(2j * np.pi * theta)
    d = lam ** k - lam
    drad = np.full(n + 1, 1e-15)
    a = kernels.get_backend("numpy").linearizer_series(d.real.copy(), d.imag.copy(), drad, 0.5, n)
    b = kernels.get_backend("cython").linearizer_series(d.real.copy(), d.imag.copy(), drad, 0.5, n)
    for x, y in zip(a[:3], b[:3]):
        assert np.array_equal(x, y)
    assert a[3] == b[3]
