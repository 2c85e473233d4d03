import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brjunokit.julia import (
    INSIDE_K,
    OUTSIDE_K,
    Circle,
    DyadicBall,
    DyadicBallSet,
    Segment,
    Viewport,
    default_viewport,
    distance_estimate,
    hausdorff,
    hausdorff_to_reference,
    pgm_bytes,
    render,
    verdict_image,
    verify_outside,
)

import oracles


@pytest.fixture(scope="module")
def rabbit():
    return render(complex(-0.122561166876654, 0.744861766619744), resolution=128, m=4)


@pytest.fixture(scope="module")
def disk_c0():
    return render(0, resolution=128, m=4)


def test_default_viewports():
    assert default_viewport(0) == Viewport(-2, 2, -2, 2)
    assert default_viewport(-2) == Viewport(-4, 4, -4, 4)


def test_viewport_rejects_non_dyadic():
    with pytest.raises(ValueError):
        Viewport(Fraction(-1, 3), 1, -1, 1)


def test_outside_pixels_are_sound(rabbit):
    grid, _ = rabbit
    rows, cols = np.nonzero(grid.verdicts == OUTSIDE_K)
    rng = np.random.default_rng(1)
    for i in rng.choice(len(rows), size=40, replace=False):
        assert verify_outside(grid, int(rows[i]), int(cols[i]))


def test_verdicts_agree_with_float_orbits(rabbit):
    grid, _ = rabbit
    c = complex(-0.122561166876654, 0.744861766619744)
    for v, expect in ((OUTSIDE_K, False), (INSIDE_K, True)):
        rows, cols = np.nonzero(grid.verdicts == v)
        for i in range(0, len(rows), max(1, len(rows) // 50)):
            x, y = grid.pixel_center(int(rows[i]), int(cols[i]))
            assert oracles.brute_force_k_membership(c, complex(float(x), float(y)), 2000) is expect


def test_c0_classification(disk_c0):
    grid, balls = disk_c0
    for r in range(0, 128, 7):
        for col in range(0, 128, 7):
            x, y = (float(v) for v in grid.pixel_center(r, col))
            rho = math.hypot(x, y)
            v = grid.verdicts[r, col]
            if v == OUTSIDE_K:
                assert rho > 1
            elif v == INSIDE_K:
                assert rho < 1
    cx, cy, rad = balls.arrays()
    # every ball meets a neighbourhood of the unit circle
    assert np.all(np.abs(np.hypot(cx, cy) - 1) <= rad + 2 * 4 / 128 * math.sqrt(2))


def test_monotone_refinement():
    coarse, _ = render(-1, resolution=64, m=3)
    fine, _ = render(-1, resolution=128, m=3)
    up = np.kron(coarse.verdicts, np.ones((2, 2), dtype=coarse.verdicts.dtype))
    # certified regions never contradict each other
    assert not np.any((up == OUTSIDE_K) & (fine.verdicts == INSIDE_K))
    assert not np.any((up == INSIDE_K) & (fine.verdicts == OUTSIDE_K))
    cert = lambda v: np.isin(v, (OUTSIDE_K, INSIDE_K)).mean()
    assert cert(fine.verdicts) >= cert(coarse.verdicts)


def test_render_is_deterministic_across_backends_and_threads():
    a, ba = render(-1, resolution=64, m=3, threads=1, backend="numpy")
    b, bb = render(-1, resolution=64, m=3, threads=4)
    assert np.array_equal(a.verdicts, b.verdicts)
    assert ba.to_jsonl() == bb.to_jsonl()


def test_ball_json_round_trip(rabbit):
    _, balls = rabbit
    again = DyadicBallSet.from_jsonl(balls.to_jsonl())
    assert again.balls == balls.balls


def test_ball_rejects_non_dyadic():
    with pytest.raises(ValueError):
        DyadicBall(Fraction(1, 3), 0, Fraction(1, 8))


def test_pgm_header(disk_c0):
    grid, _ = disk_c0
    data = pgm_bytes(verdict_image(grid), "config: {}")
    head = data.split(b"\n", 3)
    assert head[0] == b"P5" and head[1].startswith(b"# config") and head[2] == b"128 128"
    assert len(data) == len(b"\n".join(head[:3])) + 1 + len(b"255\n") + 128 * 128


@given(st.floats(min_value=1.05, max_value=8), st.floats(min_value=0, max_value=2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_distance_estimate_c0_is_a_lower_bound(rho, t):
    z = complex(rho * math.cos(t), rho * math.sin(t))
    d = distance_estimate(0, z)
    assert d.lo_float() <= abs(z) - 1 + 1e-12
    assert d.lo_float() > 0


def test_distance_estimate_nonescaping_point():
    d = distance_estimate(0, complex(0.5, 0))
    assert d.lo_float() == 0 and math.isinf(d.hi_float())


def _pointset(pts, k=40):
    r = Fraction(1, 1 << k)
    q = 1 << 20
    return DyadicBallSet([DyadicBall(Fraction(round(x * q), q), Fraction(round(y * q), q), r) for x, y in pts])


def _rounded(pts):
    q = 1 << 20
    return [(round(x * q) / q, round(y * q) / q) for x, y in pts]


point_sets = st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=30)


@given(point_sets, point_sets)
@settings(max_examples=40, deadline=None)
def test_hausdorff_matches_brute_force_and_is_symmetric(p, q):
    a, b = _pointset(p), _pointset(q)
    lo, hi = hausdorff(a, b, 1e-9)
    ref = oracles.hausdorff_points(_rounded(p), _rounded(q))
    assert lo - 1e-9 <= ref <= hi + 1e-9
    lo2, hi2 = hausdorff(b, a, 1e-9)
    assert lo2 <= hi and lo <= hi2


@given(point_sets, point_sets, point_sets)
@settings(max_examples=25, deadline=None)
def test_hausdorff_triangle_inequality(p, q, s):
    a, b, c = _pointset(p), _pointset(q), _pointset(s)
    lo_ac, _ = hausdorff(a, c, 1e-9)
    _, hi_ab = hausdorff(a, b, 1e-9)
    _, hi_bc = hausdorff(b, c, 1e-9)
    assert lo_ac <= hi_ab + hi_bc


def test_hausdorff_of_fat_balls():
    a = DyadicBallSet([DyadicBall(0, 0, 1)])
    b = DyadicBallSet([DyadicBall(3, 0, Fraction(1, 2))])
    lo, hi = hausdorff(a, b, 1e-6)
    # farthest point of a from b is (-1, 0) at distance 4 - 1/2
    assert lo <= 3.5 <= hi and hi - lo < 1e-5


def test_reference_curves():
    ring = [(math.cos(t), math.sin(t)) for t in np.linspace(0, 2 * math.pi, 400, endpoint=False)]
    lo, hi = hausdorff_to_reference(_pointset(ring), Circle(), 1e-4)
    assert lo <= math.sin(math.pi / 400) + 1e-4 and hi < 0.01
    seg = [(x, 0.0) for x in np.linspace(-2, 2, 65)]
    lo, hi = hausdorff_to_reference(_pointset(seg), Segment(), 1e-4)
    assert lo <= 1 / 32 + 1e-9 and hi < 1 / 32 + 1e-3
