"""Exact kick map, between-kick flow and time-tau map for the 2D linear shear model.

The unforced system is

    theta' = 1 + sigma * y,      y' = -lam * y

on the cylinder S^1 x R, with instantaneous kicks y -> y + A sin(2 pi theta)
every ``tau`` time units.  Everything here is closed form; no ODE integration.

Points are ``(theta, y)`` pairs.  Coordinates may be floats or numpy arrays of
matching shape, in which case the maps act elementwise.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameters, NonIntegerTau, ZeroAmplitude

TWO_PI = 2.0 * math.pi

# real/complex cut for the 2x2 eigenvalue discriminant
DISCRIMINANT_TOL = 1e-12


@dataclass(frozen=True)
class ShearParams:
    """Parameters of the kicked linear shear oscillator.

    Parameters
    ----------
    sigma : float
        Shear strength (> 0).
    lam : float
        Contraction rate towards the cycle ``y = 0`` (> 0).
    A : float
        Kick amplitude (>= 0; 0 gives the unforced system).
    tau : float
        Time between kicks (> 0).
    """

    sigma: float
    lam: float
    A: float
    tau: float
    b: float = field(init=False, repr=False)
    sigma_over_lambda: float = field(init=False, repr=False)
    gain: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("sigma", "lam", "A", "tau"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.sigma <= 0 or self.lam <= 0 or self.tau <= 0:
            raise InvalidParameters("sigma, lam and tau must be positive")
        if self.A < 0:
            raise InvalidParameters("A must be non-negative")
        b = math.exp(-self.lam * self.tau)
        s_over_l = self.sigma / self.lam
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "sigma_over_lambda", s_over_l)
        # theta-displacement per unit post-kick y over one period
        object.__setattr__(self, "gain", s_over_l * (1.0 - b))

    @property
    def shear_ratio(self):
        """(sigma / lam) * A: shear over contraction times kick amplitude."""
        return self.sigma_over_lambda * self.A

    def replace(self, **changes):
        kw = dict(sigma=self.sigma, lam=self.lam, A=self.A, tau=self.tau)
        kw.update(changes)
        return ShearParams(**kw)


class CylinderPoint(NamedTuple):
    theta: float
    y: float


class LiftedPoint(NamedTuple):
    theta_lift: float
    y: float

    def reduce(self):
        return CylinderPoint(reduce_mod1(self.theta_lift), self.y)


def reduce_mod1(x):
    """Reduce into [0, 1).  Guards against ``-tiny % 1.0 == 1.0``."""
    if np.ndim(x) == 0:
        r = x % 1.0
        return 0.0 if r >= 1.0 else float(r)
    r = np.mod(x, 1.0)
    return np.where(r >= 1.0, 0.0, r)


def circle_distance(x, z):
    """Distance on R/Z."""
    d = np.abs(np.asarray(x) - np.asarray(z)) % 1.0
    return np.minimum(d, 1.0 - d)


def kick(p, params):
    theta, y = p
    return CylinderPoint(theta, y + params.A * np.sin(TWO_PI * np.asarray(theta)))


def flow(p, t, params):
    """Unforced flow for time ``t >= 0`` (theta reduced mod 1)."""
    if t < 0:
        raise ValueError("flow is only defined forward in time")
    theta, y = p
    bt = math.exp(-params.lam * t)
    g = params.sigma_over_lambda * (1.0 - bt)
    return CylinderPoint(reduce_mod1((theta + t) + g * y), bt * y)


def _psi_lift(theta, y, params):
    y1 = y + params.A * np.sin(TWO_PI * np.asarray(theta))
    return (theta + params.tau) + params.gain * y1, params.b * y1


def psi(p, params):
    """Time-tau map: one kick followed by unforced flow for ``tau``."""
    theta, y = _psi_lift(*p, params)
    return CylinderPoint(reduce_mod1(theta), y)


def psi_lifted(p, params):
    """Same as :func:`psi` on the universal cover (no mod reduction)."""
    return LiftedPoint(*_psi_lift(*p, params))


def iterate(p, params, n_kicks, lifted=False):
    """Orbit of ``p`` under psi as an ``(n_kicks + 1, 2)`` array."""
    out = np.empty((n_kicks + 1, 2))
    theta, y = float(p[0]), float(p[1])
    out[0] = theta, y
    for k in range(1, n_kicks + 1):
        theta, y = _psi_lift(theta, y, params)
        if not lifted:
            theta = reduce_mod1(theta)
        out[k] = theta, y
    return out


@dataclass(frozen=True)
class Jacobian2:
    a11: float
    a12: float
    a21: float
    a22: float

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def trace(self):
        return self.a11 + self.a22

    def as_array(self):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)

    def eigenvalues(self):
        return eigenvalues_2x2(self.trace, self.det)


def jacobian(p, params):
    """D psi at ``p``; independent of y."""
    theta = np.asarray(p[0])
    # kick linearization is [[1, 0], [dk, 1]], flow's is [[1, gain], [0, b]]
    dk = params.A * (TWO_PI * np.cos(TWO_PI * theta))
    if dk.ndim == 0:
        dk = float(dk)
    return Jacobian2(1.0 + params.gain * dk, params.gain, params.b * dk, params.b)


def eigenvalues_2x2(trace, det, tol=DISCRIMINANT_TOL):
    """Eigenvalues from trace and determinant; returns ``(ev1, ev2, is_complex)``.

    Real pairs are ordered by decreasing modulus.
    """
    half = 0.5 * trace
    disc = half * half - det
    if disc < -tol:
        im = math.sqrt(-disc)
        return complex(half, im), complex(half, -im), True
    r = math.sqrt(max(disc, 0.0))
    e1, e2 = half + r, half - r
    if abs(e2) > abs(e1):
        e1, e2 = e2, e1
    return e1, e2, False


def classify_fixed_point(ev1, ev2, is_complex, tol=1e-12):
    m1, m2 = abs(ev1), abs(ev2)
    if abs(m1 - 1.0) <= tol or abs(m2 - 1.0) <= tol:
        return "non-hyperbolic"
    if is_complex:
        return "spiral sink" if m1 < 1.0 else "spiral source"
    big, small = max(m1, m2), min(m1, m2)
    if big < 1.0:
        return "real sink"
    if small > 1.0:
        return "source"
    return "saddle"


class FixedPoint(NamedTuple):
    point: CylinderPoint
    eigenvalues: tuple
    classification: str


def fixed_points_integer_tau(params):
    """The two fixed points (0, 0) and (1/2, 0) that exist on the cycle for integer tau."""
    k = round(params.tau)
    if k < 1 or abs(params.tau - k) > 1e-12:
        raise NonIntegerTau(f"tau={params.tau} is not a positive integer")
    out = []
    for theta in (0.0, 0.5):
        J = jacobian((theta, 0.0), params)
        e1, e2, cplx = eigenvalues_2x2(J.trace, params.b)
        out.append(FixedPoint(CylinderPoint(theta, 0.0), (e1, e2), classify_fixed_point(e1, e2, cplx)))
    return out


def trapping_bound(params):
    """Half-width h of the trapping strip U = {|y| <= h}."""
    return params.A / math.expm1(params.lam * params.tau)


def fold_threshold_sigma(lam, A, tau):
    """Shear at which psi(cycle) first stops being a graph over theta.

    The theta-derivative along the cycle is smallest at theta = 1/2; this is
    the sigma where it reaches zero.
    """
    if A == 0:
        raise ZeroAmplitude("no fold without a kick (A == 0)")
    return lam / (TWO_PI * A * (1.0 - math.exp(-lam * tau)))
