"""Certified pictures of quadratic Julia sets as finite unions of dyadic balls.

Pixels are classified by iterating whole disks under z^2 + c: a disk that
leaves the escape radius lies outside the filled Julia set K, a disk that
falls into a verified attracting trap lies in its interior.  The remaining
pixels form the ball cover.  A pixel gets a proximity certificate from an
escaping point and a point of K nearby: the segment between them meets
J = boundary of K, which bounds the distance from the pixel center to J.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .dynamics import _csqrt, _float_cycle, _trap_radius
from .intervals import ComplexInterval, Interval, dyadic_string, parse_dyadic, precision

OUTSIDE_K = 1
INSIDE_K = 2
NEAR_J = 3
UNRESOLVED = 0

VERDICT_NAMES = {OUTSIDE_K: "OutsideK", INSIDE_K: "InsideK", NEAR_J: "NearJ", UNRESOLVED: "Unresolved"}

_CHUNK = 16384


def _is_dyadic(x: Fraction) -> bool:
    q = x.denominator
    return q & (q - 1) == 0


@dataclass(frozen=True)
class DyadicBall:
    cx: Fraction
    cy: Fraction
    r: Fraction

    def __post_init__(self):
        for name in ("cx", "cy", "r"):
            v = Fraction(getattr(self, name))
            if not _is_dyadic(v):
                raise ValueError(f"{name} = {v} is not dyadic")
            object.__setattr__(self, name, v)
        if self.r <= 0:
            raise ValueError("radius must be positive")

    def to_json(self) -> str:
        return json.dumps({"cx": dyadic_string(self.cx), "cy": dyadic_string(self.cy), "r": dyadic_string(self.r)})

    @classmethod
    def from_json(cls, line: str) -> "DyadicBall":
        d = json.loads(line)
        return cls(parse_dyadic(d["cx"]), parse_dyadic(d["cy"]), parse_dyadic(d["r"]))


@dataclass
class DyadicBallSet:
    balls: list
    claimed_precision: Optional[int] = None   # m with d_H < 2^-m, when certified

    def __len__(self):
        return len(self.balls)

    def arrays(self):
        cx = np.array([float(b.cx) for b in self.balls])
        cy = np.array([float(b.cy) for b in self.balls])
        r = np.array([float(b.r) for b in self.balls])
        return cx, cy, r

    def to_jsonl(self) -> str:
        return "".join(b.to_json() + "\n" for b in self.balls)

    @classmethod
    def from_jsonl(cls, text: str, claimed_precision=None) -> "DyadicBallSet":
        balls = [DyadicBall.from_json(line) for line in text.splitlines()
                 if line.strip() and not line.lstrip().startswith("#")]
        return cls(balls, claimed_precision)


@dataclass(frozen=True)
class Viewport:
    xmin: Fraction
    xmax: Fraction
    ymin: Fraction
    ymax: Fraction

    def __post_init__(self):
        for name in ("xmin", "xmax", "ymin", "ymax"):
            v = Fraction(getattr(self, name))
            if not _is_dyadic(v):
                raise ValueError(f"viewport bound {name} = {v} is not dyadic")
            object.__setattr__(self, name, v)
        if self.xmin >= self.xmax or self.ymin >= self.ymax:
            raise ValueError("empty viewport")

    @classmethod
    def square(cls, half) -> "Viewport":
        h = Fraction(half)
        return cls(-h, h, -h, h)

    def contains_disk(self, radius: float) -> bool:
        return min(-self.xmin, self.xmax, -self.ymin, self.ymax) > radius


@dataclass
class RenderGrid:
    viewport: Viewport
    resolution: int
    verdicts: np.ndarray            # (rows, cols) uint8, row 0 at the top
    escape_iter: np.ndarray         # pixel escape index, -1 if none
    distance_bound: np.ndarray      # certified upper bound on dist(center, J); inf if none
    leaves: dict = field(default_factory=dict)   # refined pixel -> list of (depth, ix, iy, verdict, iters)
    c_ball: tuple = (0.0, 0.0, 0.0)
    escape_radius: float = 2.0
    maxiter: int = 0
    traps: list = field(default_factory=list)
    covers_K: bool = False

    @property
    def pixel_width(self) -> Fraction:
        return (self.viewport.xmax - self.viewport.xmin) / self.resolution

    @property
    def pixel_height(self) -> Fraction:
        return (self.viewport.ymax - self.viewport.ymin) / self.resolution

    def pixel_center(self, row: int, col: int) -> tuple:
        w, h = self.pixel_width, self.pixel_height
        return (self.viewport.xmin + (col + Fraction(1, 2)) * w,
                self.viewport.ymax - (row + Fraction(1, 2)) * h)

    def counts(self) -> dict:
        return {VERDICT_NAMES[k]: int(np.sum(self.verdicts == k)) for k in VERDICT_NAMES}


# ---------------------------------------------------------------------------
# helpers


def _c_ball(c) -> tuple:
    """(re, im, radius) floats whose disk contains the parameter enclosure."""
    if isinstance(c, ComplexInterval):
        ci = c
    elif isinstance(c, complex):
        ci = ComplexInterval(Interval(c.real), Interval(c.imag))
    elif isinstance(c, tuple):
        ci = ComplexInterval(Interval(c[0]) if not isinstance(c[0], Interval) else c[0],
                             Interval(c[1]) if not isinstance(c[1], Interval) else c[1])
    else:
        ci = ComplexInterval.coerce(c)
    re0, im0 = ci.re.mid(), ci.im.mid()
    with precision(80):
        dx = Interval.hull(abs(ci.re - re0)).hi_float()
        dy = Interval.hull(abs(ci.im - im0)).hi_float()
    rad = 0.0 if dx == 0 and dy == 0 else math.nextafter(math.hypot(dx, dy), math.inf) * (1 + 2 ** -50)
    return re0, im0, rad


def escape_radius(c_ball: tuple) -> float:
    """(1 + sqrt(1 + 4|c|))/2 rounded up: |z| above it forces escape, and K lies inside it."""
    cr, ci, crad = c_ball
    cabs = (math.hypot(cr, ci) + crad) * (1 + 2 ** -50)
    with precision(80):
        R = (1 + (1 + Interval(cabs).scale2(2)).sqrt()).scale2(-1)
    return math.nextafter(R.hi_float(), math.inf)


def default_viewport(c) -> Viewport:
    """Square [-2^k, 2^k]^2 with 2^k the smallest power of two above the escape radius."""
    R = escape_radius(_c_ball(c))
    k = math.floor(math.log2(R)) + 1
    while 2.0 ** k <= R:
        k += 1
    while k > -60 and 2.0 ** (k - 1) > R:
        k -= 1
    return Viewport.square(Fraction(2) ** k)


def find_traps(c_ball: tuple, maxiter: int = 2000) -> list:
    """Disks (x, y, r) around a verified attracting cycle, each mapped into itself by f^p."""
    cr, ci, crad = c_ball
    c = complex(cr, ci)
    cyc = _float_cycle(c, maxiter)
    if cyc is None:
        return []
    z0, p = cyc
    with precision(64):
        cint = ComplexInterval(Interval(cr) + Interval(-crad, crad), Interval(ci) + Interval(-crad, crad))
        traps = []
        z = z0
        for _ in range(p):
            r = _trap_radius(cint, z, p)
            if r is not None:
                traps.append((z.real, z.imag, r))
            z = z * z + c
    return traps


def _segment_in_K(c_ball: tuple) -> Optional[float]:
    """beta with [-beta, beta] inside K, for exact real c in [-2, 1/4]."""
    cr, ci, crad = c_ball
    if ci != 0 or crad != 0 or not -2 <= cr <= 0.25:
        return None
    with precision(80):
        beta = (1 + (1 - 4 * Interval(cr)).sqrt()).scale2(-1)
    return beta.lo_float()


def julia_points(c_ball: tuple, max_points: int = 4096) -> np.ndarray:
    """Enclosures (x, y, rho) of points of J: repelling fixed points and their preimages."""
    cr, ci, crad = c_ball
    with precision(64):
        c = ComplexInterval(Interval(cr) + Interval(-crad, crad), Interval(ci) + Interval(-crad, crad))
        s = _csqrt(1 - c * 4)
        seeds = []
        for z in ((1 + s) * Fraction(1, 2), (1 - s) * Fraction(1, 2)):
            if abs(z).scale2(1).gt(1):
                seeds.append(z)
        out = []
        frontier = list(seeds)
        seen = 0
        while frontier and seen < max_points:
            nxt = []
            for z in frontier:
                out.append(z)
                seen += 1
                if seen >= max_points:
                    break
                root = _csqrt(z - c)
                nxt.extend([root, -root])
            frontier = nxt
    arr = np.zeros((len(out), 3))
    for i, z in enumerate(out):
        mx, my = z.re.mid(), z.im.mid()
        rho = math.hypot(max(z.re.hi_float() - mx, mx - z.re.lo_float()),
                         max(z.im.hi_float() - my, my - z.im.lo_float()))
        arr[i] = (mx, my, rho * (1 + 2 ** -40) + 2 ** -60)
    return arr


def _run_disks(zr, zi, rad, c_ball, R0, maxiter, traps, threads, backend):
    be = kernels.get_backend(backend) if backend else kernels.get_backend(kernels.BACKEND)
    tr = np.array([t[0] for t in traps], dtype=np.float64)
    ti = np.array([t[1] for t in traps], dtype=np.float64)
    trad = np.array([t[2] for t in traps], dtype=np.float64)
    n = zr.shape[0]
    if n == 0:
        return np.zeros(0, np.int8), np.zeros(0, np.int32)
    bounds = [(s, min(s + _CHUNK, n)) for s in range(0, n, _CHUNK)]

    def job(b):
        s, e = b
        return be.iterate_disks(np.ascontiguousarray(zr[s:e]), np.ascontiguousarray(zi[s:e]),
                                np.ascontiguousarray(rad[s:e]), c_ball[0], c_ball[1], c_ball[2],
                                R0, maxiter, tr, ti, trad)

    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _ceil_dyadic_half_diagonal(w: Fraction, h: Fraction) -> Fraction:
    """Smallest p/2^k >= sqrt(w^2 + h^2)/2, with k eight bits below the pixel scale."""
    k = max(-math.floor(math.log2(min(w, h))), 0) + 8
    target = (w * w + h * h) / 4 * (1 << (2 * k))
    p = math.isqrt(math.floor(target))
    while p * p < target:
        p += 1
    return Fraction(p, 1 << k)


# ---------------------------------------------------------------------------
# rendering


def render(c, viewport: Optional[Viewport] = None, m: int = 6, maxiter: int = 500,
           resolution: int = 512, refine_depth: int = 3, threads: Optional[int] = None,
           backend: Optional[str] = None) -> tuple:
    """Classify pixels and emit a dyadic ball cover of J_c.

    Returns (RenderGrid, DyadicBallSet).  The ball set claims precision 2^-m
    only if the viewport contains K, every non-certified pixel carries a
    proximity certificate, and each ball lies within 2^-m of J.
    """
    if resolution < 1 or resolution & (resolution - 1):
        raise ValueError("resolution must be a power of two")
    cb = _c_ball(c)
    R0 = escape_radius(cb)
    vp = viewport or default_viewport(c)
    res = resolution
    w = (vp.xmax - vp.xmin) / res
    h = (vp.ymax - vp.ymin) / res
    wf, hf = float(w), float(h)
    half_diag = math.nextafter(math.hypot(wf, hf) / 2, math.inf)
    traps = find_traps(cb)
    xs = float(vp.xmin) + (np.arange(res) + 0.5) * wf
    ys = float(vp.ymax) - (np.arange(res) + 0.5) * hf
    X, Y = np.meshgrid(xs, ys)
    zr, zi = X.ravel(), Y.ravel()
    verdict, iters = _run_disks(zr, zi, np.full(zr.shape, half_diag), cb, R0, maxiter, traps, threads, backend)
    verdict = verdict.astype(np.uint8)
    escape_iter = np.where(verdict == 1, iters, -1).astype(np.int32)

    # quadtree refinement of unresolved pixels
    unknown = np.flatnonzero(verdict == 0)
    pix = unknown
    cx, cy = zr[unknown], zi[unknown]
    sw, sh = wf, hf
    leaf_records = []          # (pixel, depth, cx, cy, verdict, iters)
    for depth in range(1, refine_depth + 1):
        if pix.size == 0:
            break
        sw, sh = sw / 2, sh / 2
        offs = [(-0.5, 0.5), (0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]
        pix = np.repeat(pix, 4)
        ncx = np.repeat(cx, 4) + np.tile([o[0] * sw for o in offs], cx.size)
        ncy = np.repeat(cy, 4) + np.tile([o[1] * sh for o in offs], cy.size)
        rad = math.nextafter(math.hypot(sw, sh) / 2, math.inf)
        v, it = _run_disks(ncx, ncy, np.full(ncx.shape, rad), cb, R0, maxiter, traps, threads, backend)
        done = v != 0
        for p_, x_, y_, v_, i_ in zip(pix[done], ncx[done], ncy[done], v[done], it[done]):
            leaf_records.append((int(p_), depth, float(x_), float(y_), int(v_), int(i_)))
        keep = ~done
        pix, cx, cy = pix[keep], ncx[keep], ncy[keep]
    final_depth = depth if unknown.size else 0
    # point samples at the centers of leaves that stayed unresolved
    pv, pit = _run_disks(cx, cy, np.zeros(cx.shape), cb, R0, maxiter, traps, threads, backend)
    unresolved_leaf = {}
    for p_, x_, y_ in zip(pix, cx, cy):
        unresolved_leaf.setdefault(int(p_), []).append((float(x_), float(y_)))

    esc_pts = [zr[verdict == 1], zi[verdict == 1]]
    k_pts = [zr[verdict == 2], zi[verdict == 2]]
    leaves = {}
    has_esc = np.zeros(res * res, bool)
    has_k = np.zeros(res * res, bool)
    for p_, d_, x_, y_, v_, i_ in leaf_records:
        leaves.setdefault(p_, []).append((d_, x_, y_, v_, i_))
        if v_ == 1:
            has_esc[p_] = True
        else:
            has_k[p_] = True
    lx = np.array([r[2] for r in leaf_records])
    ly = np.array([r[3] for r in leaf_records])
    lv = np.array([r[4] for r in leaf_records], dtype=np.int8)
    if lx.size:
        esc_pts = [np.concatenate([esc_pts[0], lx[lv == 1]]), np.concatenate([esc_pts[1], ly[lv == 1]])]
        k_pts = [np.concatenate([k_pts[0], lx[lv == 2]]), np.concatenate([k_pts[1], ly[lv == 2]])]
    if cx.size:
        esc_pts = [np.concatenate([esc_pts[0], cx[pv == 1]]), np.concatenate([esc_pts[1], cy[pv == 1]])]
        k_pts = [np.concatenate([k_pts[0], cx[pv == 2]]), np.concatenate([k_pts[1], cy[pv == 2]])]

    # pixels resolved entirely through refinement
    for p_ in unknown:
        if int(p_) in unresolved_leaf:
            continue
        recs = leaves.get(int(p_), [])
        if recs and all(r[3] == 1 for r in recs):
            verdict[p_] = OUTSIDE_K
            escape_iter[p_] = max(r[4] for r in recs)
        elif recs and all(r[3] == 2 for r in recs):
            verdict[p_] = INSIDE_K

    emitted = np.flatnonzero(verdict == 0)
    dist = np.full(res * res, np.inf)
    beta = _segment_in_K(cb)
    if emitted.size:
        ex, ey = zr[emitted], zi[emitted]
        if esc_pts[0].size:
            de, _ = cKDTree(np.column_stack(esc_pts)).query(np.column_stack([ex, ey]))
        else:
            de = np.full(ex.shape, np.inf)
        dk = np.full(ex.shape, np.inf)
        if k_pts[0].size:
            dk, _ = cKDTree(np.column_stack(k_pts)).query(np.column_stack([ex, ey]))
        if beta is not None:
            px = np.clip(ex, -beta, beta)
            dk = np.minimum(dk, np.hypot(ex - px, ey))
        d = np.maximum(de, dk)
        jp = julia_points(cb)
        if jp.shape[0]:
            kk = min(4, jp.shape[0])
            dj, idx = cKDTree(jp[:, :2]).query(np.column_stack([ex, ey]), k=kk)
            dj = np.atleast_2d(dj.reshape(ex.shape[0], -1))
            idx = np.atleast_2d(idx.reshape(ex.shape[0], -1))
            d = np.minimum(d, np.min(dj + jp[idx, 2], axis=1))
        d = d * (1 + 2 ** -40) + 2 ** -60
        dist[emitted] = d
        near = d <= 2 * max(wf, hf)
        verdict[emitted[near]] = NEAR_J

    grid = RenderGrid(vp, res, verdict.reshape(res, res), escape_iter.reshape(res, res),
                      dist.reshape(res, res), leaves, cb, R0, maxiter, traps,
                      vp.contains_disk(R0))
    grid.refine_depth = final_depth

    r_ball = _ceil_dyadic_half_diagonal(w, h)
    balls = []
    for p_ in emitted:
        row, col = divmod(int(p_), res)
        x0, y0 = grid.pixel_center(row, col)
        balls.append(DyadicBall(x0, y0, r_ball))
    claimed = None
    if emitted.size and grid.covers_K and np.all(verdict[emitted] == NEAR_J):
        worst = float(np.max(dist[emitted])) + float(r_ball)
        if worst * (1 + 2 ** -40) < 2.0 ** -m:
            claimed = m
    return grid, DyadicBallSet(balls, claimed)


def verify_outside(grid: RenderGrid, row: int, col: int) -> bool:
    """Re-check an OutsideK verdict with exact-endpoint interval disk iteration."""
    if grid.verdicts[row, col] != OUTSIDE_K:
        raise ValueError("pixel is not OutsideK")
    p = row * grid.resolution + col
    w, h = grid.pixel_width, grid.pixel_height
    x0, y0 = grid.pixel_center(row, col)
    if p not in grid.leaves:
        return _interval_escapes(grid, x0, y0, w, h)
    for depth, lx, ly, v, _ in grid.leaves[p]:
        if v != 1:
            return False
        sw, sh = w / (1 << depth), h / (1 << depth)
        if not _interval_escapes(grid, Fraction(lx), Fraction(ly), sw, sh):
            return False
    return True


def _interval_escapes(grid, x0, y0, w, h) -> bool:
    cr, ci, crad = grid.c_ball
    with precision(80):
        z = ComplexInterval(Interval(x0), Interval(y0))
        r = ((Interval(w).square() + Interval(h).square()).sqrt()).scale2(-1)
        c = ComplexInterval(Interval(cr), Interval(ci))
        cr_rad = Interval(crad)
        R0 = Interval(grid.escape_radius)
        for _ in range(grid.maxiter + 1):
            az = abs(z)
            if (az - r).gt(R0):
                return True
            r = Interval((az.scale2(1) * r + r.square() + cr_rad).hi)
            z = z.square() + c
            if r.hi_float() > 1e6:
                return False
    return False


# ---------------------------------------------------------------------------
# distance estimate


def distance_estimate(c, z, maxiter: int = 500) -> Interval:
    """Certified [L, inf) containing dist(z, J_c), for z in the basin of infinity.

    With s = |z_n| - R0 the disk D(z_n, s) lies outside the escape radius and
    misses J; when it also misses the critical values f^j(0), j <= n, the
    inverse branch of f^n through z is univalent there and Koebe's quarter
    theorem gives dist(z, J) >= s / (4 |(f^n)'(z)|).  The n = 0 case is
    |z| - R0.  Points that do not escape get [0, inf).
    """
    from mpmath.libmp import finf

    cb = _c_ball(c)
    R0f = escape_radius(cb)
    with precision(80):
        cr, ci, crad = cb
        cI = ComplexInterval(Interval(cr) + Interval(-crad, crad), Interval(ci) + Interval(-crad, crad))
        zI = ComplexInterval.coerce(z) if not isinstance(z, complex) else ComplexInterval(Interval(z.real), Interval(z.imag))
        R0 = Interval(R0f)
        best = Interval(0)
        crit = []
        cv = ComplexInterval(0, 0)
        zn, dz = zI, ComplexInterval(1, 0)
        escaped = False
        for n in range(maxiter + 1):
            az = abs(zn)
            s = az - R0
            if s.positive():
                escaped = True
                ok = all((abs(zn - v) - s).positive() for v in crit)
                if ok:
                    cand = s / (abs(dz).scale2(2)) if n else s
                    if cand.lo_float() > best.lo_float():
                        best = Interval._raw(cand.lo, cand.lo)
            if az.gt(R0 * 1e6) or n == maxiter:
                break
            dz = dz * zn * 2
            zn = zn.square() + cI
            cv = cv.square() + cI
            crit.append(cv)
        if not escaped:
            return Interval._raw(Interval(0).lo, finf)
        return Interval._raw(best.lo, finf)


# ---------------------------------------------------------------------------
# Hausdorff distances


class _BallIndex:
    """Nearest-ball queries: d(y, A) = min_j max(0, |y - a_j| - r_j), grouped by radius."""

    def __init__(self, cx, cy, r):
        self.groups = []
        for rv in np.unique(r):
            mask = r == rv
            self.groups.append((float(rv), cKDTree(np.column_stack([cx[mask], cy[mask]]))))

    def distance(self, pts: np.ndarray) -> np.ndarray:
        best = np.full(pts.shape[0], np.inf)
        for rv, tree in self.groups:
            d, _ = tree.query(pts)
            best = np.minimum(best, np.maximum(d - rv, 0.0))
        return best

    def upper_over_squares(self, q: np.ndarray, hq: np.ndarray, a_c: np.ndarray, a_r: np.ndarray, k: int = 4):
        """Upper bound of sup over (square(q, hq) intersect ball(a_c, a_r)) of d(., A)."""
        best = np.full(q.shape[0], np.inf)
        for rv, tree in self.groups:
            kk = min(k, tree.n)
            _, idx = tree.query(q, k=kk)
            idx = np.atleast_2d(idx.reshape(q.shape[0], -1))
            for j in range(idx.shape[1]):
                b = tree.data[idx[:, j]]
                far = np.minimum(np.hypot(q[:, 0] - b[:, 0], q[:, 1] - b[:, 1]) + hq,
                                 np.hypot(a_c[:, 0] - b[:, 0], a_c[:, 1] - b[:, 1]) + a_r)
                best = np.minimum(best, np.maximum(far - rv, 0.0))
        return best


def _directed(a: DyadicBallSet, b_index: _BallIndex, tol: float, max_rounds: int = 40) -> tuple:
    """Enclosure of sup_{x in a} d(x, b)."""
    cx, cy, r = a.arrays()
    centers = np.column_stack([cx, cy])
    lower = float(np.max(b_index.distance(centers)))
    q = centers.copy()
    hq = r * math.sqrt(2)
    owner = np.arange(len(r))
    for _ in range(max_rounds):
        ub = b_index.upper_over_squares(q, hq, centers[owner], r[owner])
        upper = float(np.max(ub))
        # lower bound from points of each square clipped into its ball
        d = q - centers[owner]
        nd = np.hypot(d[:, 0], d[:, 1])
        scale = np.where(nd > r[owner], r[owner] / np.maximum(nd, 1e-300), 1.0)
        pts = centers[owner] + d * scale[:, None]
        lower = max(lower, float(np.max(b_index.distance(pts))))
        if upper - lower <= tol:
            return lower, upper
        keep = ub > lower + tol / 2
        q, hq, owner = q[keep], hq[keep], owner[keep]
        half = hq / 2
        side = half / math.sqrt(2)
        offs = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=float)
        q = (q[:, None, :] + offs[None, :, :] * side[:, None, None]).reshape(-1, 2)
        hq = np.repeat(half, 4)
        owner = np.repeat(owner, 4)
        # drop squares that miss their ball
        dd = np.hypot(q[:, 0] - centers[owner, 0], q[:, 1] - centers[owner, 1])
        hit = dd <= r[owner] + hq
        q, hq, owner = q[hit], hq[hit], owner[hit]
        if q.shape[0] == 0:
            return lower, lower
    return lower, upper


def _outward(lo: float, hi: float) -> tuple:
    return max(0.0, lo * (1 - 2 ** -40) - 2 ** -60), hi * (1 + 2 ** -40) + 2 ** -60


def hausdorff(a: DyadicBallSet, b: DyadicBallSet, tol: float = 2 ** -20) -> tuple:
    """(lower, upper) enclosure of the Hausdorff distance between two ball unions."""
    if not len(a) or not len(b):
        raise ValueError("Hausdorff distance needs nonempty sets")
    ia = _BallIndex(*a.arrays())
    ib = _BallIndex(*b.arrays())
    l1, u1 = _directed(a, ib, tol)
    l2, u2 = _directed(b, ia, tol)
    return _outward(max(l1, l2), max(u1, u2))


@dataclass(frozen=True)
class Circle:
    cx: float = 0.0
    cy: float = 0.0
    radius: float = 1.0

    def sup_over_balls(self, cx, cy, r):
        d = np.hypot(cx - self.cx, cy - self.cy)
        return np.maximum(d + r - self.radius, self.radius - np.maximum(d - r, 0.0))

    def sample(self, spacing: float) -> np.ndarray:
        n = max(8, int(math.ceil(2 * math.pi * self.radius / spacing)))
        t = np.arange(n) * (2 * math.pi / n)
        return np.column_stack([self.cx + self.radius * np.cos(t), self.cy + self.radius * np.sin(t)])


@dataclass(frozen=True)
class Segment:
    ax: float = -2.0
    ay: float = 0.0
    bx: float = 2.0
    by: float = 0.0

    def _dist(self, px, py):
        vx, vy = self.bx - self.ax, self.by - self.ay
        L2 = vx * vx + vy * vy
        t = np.clip(((px - self.ax) * vx + (py - self.ay) * vy) / L2, 0.0, 1.0)
        return np.hypot(px - (self.ax + t * vx), py - (self.ay + t * vy))

    def sup_over_balls(self, cx, cy, r):
        return self._dist(cx, cy) + r

    def sample(self, spacing: float) -> np.ndarray:
        L = math.hypot(self.bx - self.ax, self.by - self.ay)
        n = max(2, int(math.ceil(L / spacing)) + 1)
        t = np.linspace(0.0, 1.0, n)
        return np.column_stack([self.ax + t * (self.bx - self.ax), self.ay + t * (self.by - self.ay)])


def hausdorff_to_reference(a: DyadicBallSet, ref, tol: float = 2 ** -16) -> tuple:
    """(lower, upper) enclosure of d_H(union of balls, reference curve)."""
    if not len(a):
        raise ValueError("Hausdorff distance needs a nonempty set")
    cx, cy, r = a.arrays()
    part1 = float(np.max(ref.sup_over_balls(cx, cy, r)))
    pts = ref.sample(tol)
    # the sampled curve has gaps at most tol (chord <= arc), and d(., A) is 1-Lipschitz
    lo2 = float(np.max(_BallIndex(cx, cy, r).distance(pts)))
    hi2 = lo2 + tol / 2
    return _outward(max(part1, lo2), max(part1, hi2))


# ---------------------------------------------------------------------------
# images


def verdict_image(grid: RenderGrid) -> np.ndarray:
    """Grayscale codes: OutsideK 255, InsideK 160, NearJ 0, Unresolved 80."""
    lut = np.array([80, 255, 160, 0], dtype=np.uint8)
    return lut[grid.verdicts]


def color_image(grid: RenderGrid) -> np.ndarray:
    rows, cols = grid.verdicts.shape
    img = np.zeros((rows, cols, 3), dtype=np.uint8)
    it = grid.escape_iter.astype(float)
    shade = np.clip(255 - 12 * np.sqrt(np.maximum(it, 0)), 90, 255).astype(np.uint8)
    out = grid.verdicts == OUTSIDE_K
    img[out] = np.stack([shade[out]] * 3, axis=-1)
    img[grid.verdicts == INSIDE_K] = (40, 70, 200)
    img[grid.verdicts == NEAR_J] = (0, 0, 0)
    img[grid.verdicts == UNRESOLVED] = (220, 30, 30)
    return img


def pgm_bytes(img: np.ndarray, comment: str = "") -> bytes:
    rows, cols = img.shape
    head = "P5\n" + (f"# {comment}\n" if comment else "") + f"{cols} {rows}\n255\n"
    return head.encode() + img.astype(np.uint8).tobytes()


def ppm_bytes(img: np.ndarray, comment: str = "") -> bytes:
    rows, cols, _ = img.shape
    head = "P6\n" + (f"# {comment}\n" if comment else "") + f"{cols} {rows}\n255\n"
    return head.encode() + img.astype(np.uint8).tobytes()
