"""Per-kick maximal Lyapunov exponent of psi and the 10-orbit ensemble protocol.

The exponent is the average of log ||D psi . v|| along an orbit, with the
tangent ``v`` renormalized to unit length after every kick.  It is measured
per kick, not per unit time.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core2d import CylinderPoint, ShearParams, trapping_bound
from .errors import NonFiniteState
from .rng import prng_stream

DEFAULT_ZERO_BAND = 0.005
DEFAULT_GAP = 0.01
DEFAULT_BURN_IN = 1000


def classify(value, zero_band=DEFAULT_ZERO_BAND):
    if zero_band <= 0:
        raise ValueError("zero_band must be positive")
    if value < -zero_band:
        return "negative"
    if value > zero_band:
        return "positive"
    return "near-zero"


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    n_steps: int
    initial_point: tuple
    tangent_seed: tuple
    classification: str
    burn_in: int = DEFAULT_BURN_IN
    # for 2D only: the other exponent follows from det D psi = exp(-lam tau)
    second_exponent: float = None


def _guard_for(y0, h):
    return 2.0 * (float(np.max(np.abs(y0))) + h) + 1.0


def max_lyapunov(p0, v0, n_steps, params, burn_in=DEFAULT_BURN_IN,
                 zero_band=DEFAULT_ZERO_BAND, guard=None):
    """Estimate the maximal per-kick Lyapunov exponent of psi from ``p0``.

    Parameters
    ----------
    p0 : (theta, y)
        Initial state.
    v0 : (dtheta, dy)
        Initial tangent; it is normalized before the first step, so only
        its direction matters.
    n_steps : int
        Number of kicks over which log-stretching is averaged.
    params : ShearParams
    burn_in : int
        Kicks discarded (state and tangent still iterated) before averaging.
    guard : float, optional
        Bound on |y|; exceeding it raises NonFiniteState.  Defaults to a box
        comfortably containing the orbit's forward-invariant strip.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    theta0, y0 = float(p0[0]), float(p0[1])
    v1, v2 = float(v0[0]), float(v0[1])
    if not (math.isfinite(v1) and math.isfinite(v2)) or (v1 == 0.0 and v2 == 0.0):
        raise ValueError("tangent seed must be a finite non-zero vector")
    if guard is None:
        guard = _guard_for(y0, trapping_bound(params))
    total, theta, y, _, _, steps, status = _kernels.lyap2d(
        theta0, y0, v1, v2, int(n_steps), int(burn_in),
        params.A, params.tau, params.gain, params.b, float(guard))
    if status != _kernels.OK:
        raise NonFiniteState(
            f"orbit from {(theta0, y0)} left |y| <= {guard} after {steps} kicks "
            f"(theta={theta}, y={y}) for {params}")
    value = total / n_steps
    nv = math.hypot(v1, v2)
    return LyapunovEstimate(
        value=value,
        n_steps=int(n_steps),
        initial_point=CylinderPoint(theta0, y0),
        tangent_seed=(v1 / nv, v2 / nv),
        classification=classify(value, zero_band),
        burn_in=int(burn_in),
        second_exponent=-params.lam * params.tau - value,
    )


def initial_conditions(params, seed, orbit_id):
    """Initial point and tangent for one ensemble orbit.

    The point is uniform on [0, 1) x [-h, h] (the trapping strip) and the
    tangent is a uniformly random direction, both drawn from the stream
    ``(seed, orbit_id)``.
    """
    rng = prng_stream(seed, orbit_id)
    h = trapping_bound(params)
    theta = float(rng.random())
    y = float(rng.uniform(-h, h)) if h > 0 else 0.0
    ang = 2.0 * math.pi * float(rng.random())
    return CylinderPoint(theta, y), (math.cos(ang), math.sin(ang))


@dataclass(frozen=True)
class EnsembleReport:
    all_estimates: tuple
    min_of_8: float
    max_of_8: float
    multi_behavior_flag: bool
    dropped: tuple
    estimates: tuple = ()

    @property
    def kept(self):
        return tuple(v for i, v in enumerate(self.all_estimates) if i not in self.dropped)


def trimmed_extremes(values):
    """Drop one largest and one smallest value (first occurrence by index).

    Returns ``(min_of_rest, max_of_rest, (i_min, i_max))``.
    """
    values = list(values)
    if len(values) < 3:
        raise ValueError("need at least 3 values to drop both extremes")
    i_max = max(range(len(values)), key=lambda i: (values[i], -i))
    i_min = min(range(len(values)), key=lambda i: (values[i], i))
    if i_min == i_max:
        # all equal: drop the first two entries
        i_min, i_max = 0, 1
    rest = [v for i, v in enumerate(values) if i not in (i_min, i_max)]
    return min(rest), max(rest), (i_min, i_max)


def ensemble_protocol(params, n_orbits=10, n_steps=100_000, seed=0,
                      burn_in=DEFAULT_BURN_IN, zero_band=DEFAULT_ZERO_BAND,
                      gap=DEFAULT_GAP, workers=1):
    """Run ``n_orbits`` random orbits, drop the extremes and report the rest.

    Results depend only on ``(params, n_orbits, n_steps, seed, burn_in)``;
    ``workers`` changes wall time, never values.
    """
    if n_orbits < 3:
        raise ValueError("n_orbits must be >= 3")

    def one(i):
        p0, v0 = initial_conditions(params, seed, i)
        return max_lyapunov(p0, v0, n_steps, params, burn_in=burn_in, zero_band=zero_band)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            estimates = list(pool.map(one, range(n_orbits)))
    else:
        estimates = [one(i) for i in range(n_orbits)]
    return summarize(estimates, gap=gap)


def summarize(estimates, gap=DEFAULT_GAP):
    values = tuple(e.value for e in estimates)
    lo, hi, dropped = trimmed_extremes(values)
    return EnsembleReport(
        all_estimates=values,
        min_of_8=lo,
        max_of_8=hi,
        multi_behavior_flag=(hi - lo) > gap,
        dropped=dropped,
        estimates=tuple(estimates),
    )
