"""Curves and point clouds: images of the limit cycle, folds, invariant curves, attractors."""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core2d import ShearParams, jacobian, psi, psi_lifted, trapping_bound
from .errors import NoConvergence, PointBudgetExceeded
from .rng import prng_stream

DEFAULT_ARC_TOL = 0.01
DEFAULT_BUDGET = 2 ** 20


@dataclass
class CurveSample:
    """Polyline in lifted coordinates, ordered by the seed parameter ``s``.

    ``s`` parametrizes the seed curve (the cycle y = 0 for images of the
    cycle); ``theta`` is the lifted angle and is never reduced mod 1.
    """

    s: np.ndarray
    theta: np.ndarray
    y: np.ndarray
    params: ShearParams = None
    n_kicks: int = 0
    resolution: int = 0
    complete: bool = True

    def __len__(self):
        return len(self.s)

    def as_array(self):
        return np.column_stack([self.s, self.theta, self.y])


@dataclass(frozen=True)
class FoldReport:
    turning_points: int
    laps: int
    is_graph: bool
    total_variation: float


def _image(s, params, n_kicks):
    theta, y = np.asarray(s, dtype=float), np.zeros_like(s, dtype=float)
    for _ in range(n_kicks):
        theta, y = psi_lifted((theta, y), params)
    return theta, y


def image_of_cycle(params, n_kicks=1, resolution=256, arc_tol=DEFAULT_ARC_TOL,
                   budget=DEFAULT_BUDGET, strict=False):
    """Sample psi^n_kicks of the cycle {y = 0}, refining where the image stretches.

    Starts from ``resolution + 1`` equally spaced points (both ends of the
    unit interval included) and bisects every segment whose image is longer
    than ``arc_tol`` in (theta, y / h) until none is or ``budget`` points are
    used.  Points are always evaluated from the seed curve, never
    interpolated.  When the budget runs out the partial curve is returned with
    ``complete=False`` (or PointBudgetExceeded is raised if ``strict``).
    """
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    h = trapping_bound(params)
    yscale = 1.0 / h if h > 0 else 1.0
    s = np.linspace(0.0, 1.0, resolution + 1)
    theta, y = _image(s, params, n_kicks)
    complete = True
    while True:
        seg = np.hypot(np.diff(theta), np.diff(y) * yscale)
        long = np.nonzero(seg > arc_tol)[0]
        if long.size == 0:
            break
        if s.size + long.size > budget:
            complete = False
            break
        mids = 0.5 * (s[long] + s[long + 1])
        mt, my = _image(mids, params, n_kicks)
        s = np.insert(s, long + 1, mids)
        theta = np.insert(theta, long + 1, mt)
        y = np.insert(y, long + 1, my)
    curve = CurveSample(s, theta, y, params, n_kicks, resolution, complete)
    if not complete:
        if strict:
            raise PointBudgetExceeded(f"curve needs more than {budget} points", curve=curve)
        warnings.warn(f"point budget {budget} exhausted; curve is under-resolved", RuntimeWarning, stacklevel=2)
    return curve


def fold_report(curve):
    """Turning points of the lifted angle along ``curve`` and its wrapping count."""
    theta = np.asarray(curve.theta if hasattr(curve, "theta") else curve, dtype=float)
    if theta.size == 0:
        raise ValueError("empty curve")
    d = np.diff(theta)
    signs = np.sign(d[d != 0])
    turning = int(np.count_nonzero(signs[1:] != signs[:-1])) if signs.size else 0
    return FoldReport(
        turning_points=turning,
        laps=int(math.floor(theta.max() - theta.min())),
        is_graph=turning == 0,
        total_variation=float(np.abs(d).sum()),
    )


def monotone_segments(theta):
    """Index ranges ``(i, j)`` of maximal monotone runs of ``theta``."""
    d = np.diff(theta)
    segs = []
    start, sign = 0, 0
    for i, di in enumerate(d.tolist()):
        si = (di > 0) - (di < 0)
        if si == 0:
            continue
        if sign == 0:
            sign = si
        elif si != sign:
            segs.append((start, i))
            start, sign = i, si
    segs.append((start, len(theta) - 1))
    return segs


def horseshoe_crossing_diagnostic(params, resolution=1024, arc_tol=DEFAULT_ARC_TOL):
    """Count monotone pieces of psi(cycle) that cross the whole cylinder.

    Two or more full crossings is reported as a horseshoe candidate: it is
    numerical evidence of stretch-and-fold, not a proof.
    """
    curve = image_of_cycle(params, 1, resolution=resolution, arc_tol=arc_tol)
    details = []
    for i, j in monotone_segments(curve.theta):
        extent = float(abs(curve.theta[j] - curve.theta[i]))
        details.append({
            "s_start": float(curve.s[i]), "s_end": float(curve.s[j]),
            "theta_start": float(curve.theta[i]), "theta_end": float(curve.theta[j]),
            "extent": extent, "full_crossing": extent >= 1.0,
        })
    full = sum(d["full_crossing"] for d in details)
    return {
        "full_crossings": full,
        "horseshoe_candidate": full >= 2,
        "total_variation": float(np.abs(np.diff(curve.theta)).sum()),
        "details": details,
    }


@dataclass
class InvariantCurve:
    theta: np.ndarray
    g: np.ndarray
    iterations: int
    residual: float
    params: ShearParams = None

    def __call__(self, theta):
        return periodic_interp(theta, self.theta, self.g)


@dataclass
class Breakdown:
    """The graph transform produced a non-graph at ``iteration``."""

    iteration: int
    image: CurveSample
    previous: np.ndarray = field(default=None, repr=False)
    reason: str = "image is not a graph over theta"


def periodic_interp(x, xp, fp):
    """Linear interpolation of 1-periodic data given on increasing ``xp`` in [0, 1)."""
    return np.interp(np.mod(x, 1.0), xp, fp, period=1.0)


def _graph_image(grid, g, params):
    tl, yl = psi_lifted((grid, g), params)
    d = np.diff(np.append(tl, tl[0] + 1.0))
    return tl, yl, bool(np.all(d > 0))


def _tangent_defect(grid, g, params, slope_tol):
    # D psi must carry the graph's tangent (1, g') to a positive multiple of
    # the tangent at the image point; a discrete fixed point can survive a
    # corner (e.g. around a spiral sink) that no C^1 invariant curve can.
    step = grid[1] - grid[0]
    gp = (np.roll(g, -1) - np.roll(g, 1)) / (2.0 * step)
    J = jacobian((grid, g), params)
    dtheta = J.a11 + J.a12 * gp
    if np.any(dtheta <= 0):
        return "tangent of the converged graph folds under D psi"
    tl, _ = psi_lifted((grid, g), params)
    image_slope = (J.a21 + J.a22 * gp) / dtheta
    graph_slope = np.interp(np.mod(tl, 1.0), grid, gp, period=1.0)
    if np.max(np.abs(image_slope - graph_slope)) > slope_tol:
        return "converged graph is not tangent-invariant"
    return None


def invariant_curve(params, tol=1e-8, max_iters=10_000, resolution=4096, slope_tol=1e-3):
    """Invariant graph y = g(theta) near the cycle, by iterating the graph transform.

    Returns an InvariantCurve on convergence (sup-norm change below ``tol``)
    or a Breakdown if some image stops being a graph.  Raises NoConvergence
    after ``max_iters``.  A converged graph is re-checked through D psi: its
    tangent field must be mapped onto itself to within ``slope_tol``.
    """
    grid = np.arange(resolution) / resolution
    g = np.zeros(resolution)
    for it in range(1, max_iters + 1):
        tl, yl, ok = _graph_image(grid, g, params)
        if not ok:
            s = grid
            return Breakdown(it, CurveSample(s, tl, yl, params, it, resolution), previous=g)
        order = np.argsort(np.mod(tl, 1.0), kind="stable")
        g_new = np.interp(grid, np.mod(tl, 1.0)[order], yl[order], period=1.0)
        residual = float(np.max(np.abs(g_new - g)))
        g = g_new
        if residual < tol:
            reason = _tangent_defect(grid, g, params, slope_tol)
            if reason:
                tl, yl, _ = _graph_image(grid, g, params)
                return Breakdown(it, CurveSample(grid, tl, yl, params, it, resolution), previous=g, reason=reason)
            return InvariantCurve(grid, g, it, residual, params)
    raise NoConvergence(f"graph transform did not converge in {max_iters} iterations",
                        last=InvariantCurve(grid, g, max_iters, residual, params))


def attractor_cloud(params, n_points=1000, burn_in=1000, n_record=10, seed=0):
    """Points on the attractor: ``n_points`` seeds uniform in U, ``burn_in`` kicks
    discarded, then ``n_record`` iterates of each recorded.

    Returns an array of shape ``(n_record, n_points, 2)`` holding (theta, y).
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = prng_stream(seed, 0)
    h = trapping_bound(params)
    theta = rng.random(n_points)
    y = rng.uniform(-h, h, n_points) if h > 0 else np.zeros(n_points)
    for _ in range(burn_in):
        theta, y = psi((theta, y), params)
    out = np.empty((n_record, n_points, 2))
    for k in range(n_record):
        theta, y = psi((theta, y), params)
        out[k, :, 0] = theta
        out[k, :, 1] = y
    return out


def cloud_diameter(points):
    """Largest pairwise distance of (theta, y) points, theta measured on the circle."""
    pts = np.asarray(points).reshape(-1, 2)
    # cheap: bound by the extents along each axis
    th = pts[:, 0]
    # circular extent: complement of the largest gap between sorted angles
    srt = np.sort(np.mod(th, 1.0))
    gaps = np.diff(np.append(srt, srt[0] + 1.0))
    th_extent = 1.0 - gaps.max()
    y_extent = pts[:, 1].max() - pts[:, 1].min()
    return float(math.hypot(th_extent, y_extent))


def distance_to_graph(points, curve):
    """Vertical distance |y - g(theta)| of each point from an invariant graph."""
    pts = np.asarray(points).reshape(-1, 2)
    return np.abs(pts[:, 1] - curve(pts[:, 0]))
