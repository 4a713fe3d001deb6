"""The singular-limit circle maps f_a(theta) = theta + a + B sin(2 pi theta).

``B = (sigma / lam) * A``.  These are what the first coordinate of psi tends
to when tau = k + a and k -> infinity.  The family is a circle diffeomorphism
for 2 pi B < 1 and has two critical points for 2 pi B > 1.
"""
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .core2d import TWO_PI, ShearParams, psi_lifted, reduce_mod1
from .errors import CriticalHitWarning, InvalidParameters, NotInvertible
from .lyapunov import DEFAULT_BURN_IN, max_lyapunov
from .rng import prng_stream

CRITICAL_HIT_TOL = 1e-14


@dataclass(frozen=True)
class CircleMapParams:
    a: float
    B: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.B)):
            raise InvalidParameters("a and B must be finite")
        if self.B < 0:
            raise InvalidParameters("B must be non-negative")

    @classmethod
    def from_shear(cls, params):
        """Singular limit of ``params``: a = frac(tau), B = (sigma/lam) A."""
        k = math.floor(params.tau)
        return cls(params.tau - k, params.shear_ratio)

    @property
    def is_diffeomorphism(self):
        return TWO_PI * self.B < 1.0


def f_lift(theta, cmp):
    return theta + cmp.a + cmp.B * np.sin(TWO_PI * np.asarray(theta))


def f(theta, cmp):
    return reduce_mod1(f_lift(theta, cmp))


def fprime(theta, cmp):
    return 1.0 + TWO_PI * cmp.B * np.cos(TWO_PI * np.asarray(theta))


class CriticalSet(NamedTuple):
    points: tuple
    degenerate: bool = False

    def __len__(self):
        return len(self.points)


def critical_points(cmp):
    """Zeros of f' on the circle, in closed form.

    At 2 pi B == 1 the two critical points merge at 1/2; the pair is
    returned with ``degenerate=True``.
    """
    k = TWO_PI * cmp.B
    if k < 1.0:
        return CriticalSet(())
    if k == 1.0:
        return CriticalSet((0.5, 0.5), degenerate=True)
    c = math.acos(-1.0 / k) / TWO_PI
    return CriticalSet((c, 1.0 - c))


def lyap1d(theta0, n, cmp, burn_in=0):
    """Average of log|f'| over ``n`` iterates after ``burn_in``.

    Returns ``-inf`` (and warns with CriticalHitWarning) if the orbit comes
    within 1e-14 of a critical point.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    crit = critical_points(cmp)
    c1, c2 = crit.points if crit.points else (0.0, 0.0)
    total, _, hit = _kernels.lyap1d(
        float(reduce_mod1(theta0)), int(n), int(burn_in), float(cmp.a), float(cmp.B),
        c1, c2, bool(crit.points), CRITICAL_HIT_TOL)
    if hit:
        warnings.warn(f"orbit of {theta0} hit a critical point of {cmp}", CriticalHitWarning, stacklevel=2)
        return -math.inf
    return total / n


class RotationNumber(NamedTuple):
    rho: float
    rho_lift: float
    error: float


def _rotation_lift(cmp, n, n_init):
    # same start points for every cmp keeps the estimate monotone in a
    starts = np.arange(n_init) / n_init
    ends = [_kernels.circle_lift_orbit_end(float(x), int(n), float(cmp.a), float(cmp.B)) for x in starts]
    return float(np.mean((np.asarray(ends) - starts) / n))


def rotation_number(cmp, n=100_000, tol=1e-9, n_init=32):
    """Rotation number of the circle diffeomorphism f_a.

    The lift displacement over ``n`` iterates is averaged over ``n_init``
    equally spaced start points.  For a in [0, 1) the lift's rotation number
    lies in [0, 1]; ``rho`` is it reduced into [0, 1).  ``error`` is the
    bound max(1/n, tol).
    """
    if not cmp.is_diffeomorphism:
        raise NotInvertible(f"2 pi B = {TWO_PI * cmp.B:.6g} >= 1; f_a is not invertible")
    if n < 1:
        raise ValueError("n must be >= 1")
    raw = _rotation_lift(cmp, n, n_init)
    # F_a >= F_m and F_m has the fixed point 0 (m = floor a), so the lift's
    # rotation number lies in [m, m + 1]; clipping keeps monotonicity in a
    m = math.floor(cmp.a)
    lift = min(max(raw, m), m + 1)
    return RotationNumber(float(reduce_mod1(lift)), lift, max(1.0 / n, tol))


def rotation_number_psi(params, n=100_000, burn_in=1000, n_init=8):
    """Rotation number of psi from orbits started on the cycle, reduced into [0, 1).

    Meaningful when the attractor is an invariant circle; with A = 0 it is
    frac(tau).
    """
    total = 0.0
    for j in range(n_init):
        theta, y = j / n_init, 0.0
        for _ in range(burn_in):
            theta, y = psi_lifted((theta, y), params)
            theta = float(theta) - math.floor(theta)
        start = theta
        theta = float(theta)
        for _ in range(n):
            theta, y = psi_lifted((theta, y), params)
        total += (float(theta) - start) / n
    return float(reduce_mod1(total / n_init))


def staircase(B, a_grid, n=100_000, tol=1e-9, n_init=32):
    """Devil's staircase: rows ``(a, rho_lift, error)`` over ``a_grid``.

    The lift rotation number is reported so the table is monotone in a
    across the whole grid (rho_lift = 1 is the same circle map behavior as 0).
    """
    rows = []
    for a in a_grid:
        r = rotation_number(CircleMapParams(float(a), B), n=n, tol=tol, n_init=n_init)
        rows.append((float(a), r.rho_lift, r.error))
    return np.array(rows).reshape(-1, 3)


def plateaus(table, tol=1e-6, min_points=2):
    """Runs of consecutive staircase rows whose rho agree within ``tol``.

    Returns a list of ``(a_start, a_end, rho)``.
    """
    out = []
    a, rho = table[:, 0], table[:, 1]
    i = 0
    while i < len(rho):
        j = i
        while j + 1 < len(rho) and abs(rho[j + 1] - rho[i]) <= tol:
            j += 1
        if j - i + 1 >= min_points:
            out.append((float(a[i]), float(a[j]), float(np.mean(rho[i:j + 1]))))
        i = j + 1
    return out


# Critical orbits are followed in the centered coordinate x in [-1/2, 1/2]:
# x - rint(x) is odd, so for a = 0 the orbits of c and -c mirror exactly.
def _centered(x):
    return x - np.rint(x)


@dataclass(frozen=True)
class CriticalOrbitReport:
    critical_point: float
    min_distance_to_C: float
    log_derivative_slope: float
    derivative_growth: np.ndarray
    verdict: str


@dataclass(frozen=True)
class CriticalOrbitDiagnostic:
    reports: tuple
    verdict: str
    heuristic: bool = True


def critical_orbit_diagnostic(cmp, n=100, delta=3e-3, margin=0.1):
    """Heuristic check of the Misiurewicz-type condition for f_a.

    Each critical point is iterated ``n`` times.  Its orbit (from step 1 on)
    must stay at least ``delta`` from the critical set and the running log of
    |(f^j)'| along it must grow at average slope >= ``margin``.  A pass is
    reported as ``"misiurewicz-candidate"``; this is numerical evidence only.
    """
    if TWO_PI * cmp.B <= 1.0:
        raise InvalidParameters("critical orbits need 2 pi B > 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = math.acos(-1.0 / (TWO_PI * cmp.B)) / TWO_PI
    crit = (c, -c)
    reports = []
    for c0 in crit:
        x = c0
        dmin = math.inf
        logs = np.empty(n)
        acc = 0.0
        for j in range(n):
            x = float(_centered(x + cmp.a + cmp.B * math.sin(TWO_PI * x)))
            d = min(abs(_centered(x - crit[0])), abs(_centered(x - crit[1])))
            dmin = min(dmin, d)
            acc += math.log(max(abs(1.0 + TWO_PI * cmp.B * math.cos(TWO_PI * x)), 1e-300))
            logs[j] = acc
        slope = acc / n
        ok = dmin >= delta and slope >= margin
        reports.append(CriticalOrbitReport(
            critical_point=float(reduce_mod1(c0)),
            min_distance_to_C=dmin,
            log_derivative_slope=slope,
            derivative_growth=logs,
            verdict="misiurewicz-candidate" if ok else "inconclusive",
        ))
    verdict = "misiurewicz-candidate" if all(r.verdict == "misiurewicz-candidate" for r in reports) else "inconclusive"
    return CriticalOrbitDiagnostic(tuple(reports), verdict)


@dataclass(frozen=True)
class SingularComparison:
    k: int
    a: float
    B: float
    lambda_1d: float
    lambda_2d: float
    gap: float


def compare_to_2d(params, n=1_000_000, seed=0, n_orbits=3, burn_in=DEFAULT_BURN_IN):
    """Per-kick exponent of psi against the 1D exponent of its singular limit.

    tau = k + a with k = floor(tau).  Both exponents are averaged over
    ``n_orbits`` orbits whose initial angles come from the same seeded
    streams (the 2D orbit starts on the cycle y = 0).
    """
    cmp = CircleMapParams.from_shear(params)
    l1, l2 = [], []
    for i in range(n_orbits):
        theta0 = float(prng_stream(seed, i).random())
        l1.append(lyap1d(theta0, n, cmp, burn_in=burn_in))
        l2.append(max_lyapunov((theta0, 0.0), (1.0, 0.0), n, params, burn_in=burn_in).value)
    lam1, lam2 = float(np.mean(l1)), float(np.mean(l2))
    return SingularComparison(
        k=math.floor(params.tau), a=cmp.a, B=cmp.B,
        lambda_1d=lam1, lambda_2d=lam2, gap=abs(lam1 - lam2))
