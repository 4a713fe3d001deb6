"""n-dimensional linear shear model with a fixed kick direction.

    theta' = 1 + sigma . y,        y' = -Lambda y + A H(theta) v sum_n delta(t - n tau)

with theta on the circle and y in R^(n-1).  The unforced flow is solved
exactly through e^{-Lambda t}; its strong stable leaves are the hyperplanes
{theta + w . y = const} with w = sigma^T Lambda^{-1}.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .core2d import TWO_PI, reduce_mod1
from .errors import DimensionTooLarge, InvalidParameters, NonFiniteState, SingularLambda
from .lyapunov import DEFAULT_BURN_IN, DEFAULT_GAP, DEFAULT_ZERO_BAND, LyapunovEstimate, classify, summarize
from .rng import prng_stream, random_unit_vector

MAX_DIM = 16

# Pade coefficients and 1-norm thresholds (Higham 2005)
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068e0, 13: 5.371920351148152e0}


def _pade_uv(A, m):
    b = _PADE[m]
    n = A.shape[0]
    ident = np.eye(n)
    A2 = A @ A
    if m < 13:
        powers = [ident, A2]
        while len(powers) < (m + 1) // 2:
            powers.append(powers[-1] @ A2)
        U = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
        V = sum(b[2 * k] * powers[k] for k in range(len(powers)))
        return A @ U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    return U, V


def mat_exp(M, t=1.0):
    """e^{M t} by scaling and squaring with a diagonal Pade approximant.

    The Pade degree (3..13) and the number of squarings are chosen from the
    1-norm of ``M t`` as in Higham (2005).  Square matrices up to 16 x 16.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("mat_exp needs a square matrix")
    n = M.shape[0]
    if n > MAX_DIM:
        raise DimensionTooLarge(f"dimension {n} > {MAX_DIM}")
    if not np.all(np.isfinite(M)) or not math.isfinite(t):
        raise ValueError("non-finite input to mat_exp")
    if n == 1:
        return np.array([[math.exp(M[0, 0] * t)]])
    A = M * t
    norm = np.linalg.norm(A, 1)
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            U, V = _pade_uv(A, m)
            return np.linalg.solve(V - U, V + U)
    s = max(0, int(math.ceil(math.log2(norm / _THETA[13])))) if norm > 0 else 0
    U, V = _pade_uv(A / 2.0 ** s, 13)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


@dataclass(frozen=True)
class FourierProfile:
    """Kick profile H(theta) = const + sum_k cos[k-1] cos(2 pi k theta) + sin[k-1] sin(2 pi k theta)."""

    const: float = 0.0
    cos: tuple = ()
    sin: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(c) for c in self.sin))
        object.__setattr__(self, "const", float(self.const))

    def arrays(self):
        """Equal-length coefficient arrays (cos, sin) for the compiled kernels."""
        K = max(len(self.cos), len(self.sin))
        ccos = np.zeros(K)
        csin = np.zeros(K)
        ccos[:len(self.cos)] = self.cos
        csin[:len(self.sin)] = self.sin
        return ccos, csin

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        ccos, csin = self.arrays()
        h = np.full(theta.shape, self.const)
        for k in range(ccos.size):
            arg = TWO_PI * (k + 1) * theta
            h = h + (ccos[k] * np.cos(arg) + csin[k] * np.sin(arg))
        return h if h.ndim else float(h)

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        ccos, csin = self.arrays()
        hp = np.zeros(theta.shape)
        for k in range(ccos.size):
            arg = TWO_PI * (k + 1) * theta
            hp = hp + TWO_PI * (k + 1) * (-ccos[k] * np.sin(arg) + csin[k] * np.cos(arg))
        return hp if hp.ndim else float(hp)

    @property
    def is_constant(self):
        return not any(self.cos) and not any(self.sin)

    @property
    def sup_bound(self):
        return abs(self.const) + sum(map(abs, self.cos)) + sum(map(abs, self.sin))

    def to_dict(self):
        return {"const": self.const, "cos": list(self.cos), "sin": list(self.sin)}

    @classmethod
    def from_dict(cls, d):
        return cls(const=d.get("const", 0.0), cos=tuple(d.get("cos", ())), sin=tuple(d.get("sin", ())))


def _inverse(Lambda):
    m = Lambda.shape[0]
    if m == 1:
        if Lambda[0, 0] == 0:
            raise SingularLambda("Lambda is singular")
        return np.array([[1.0 / Lambda[0, 0]]])
    if np.linalg.cond(Lambda) > 1e12:
        raise SingularLambda("Lambda is numerically singular")
    return np.linalg.inv(Lambda)


def _shear_covector(sigma, Lambda):
    """w = sigma^T Lambda^{-1}, i.e. the solution of Lambda^T w = sigma."""
    if Lambda.shape[0] == 1:
        if Lambda[0, 0] == 0:
            raise SingularLambda("Lambda is singular")
        return np.array([sigma[0] / Lambda[0, 0]])
    if np.linalg.cond(Lambda) > 1e12:
        raise SingularLambda("Lambda is numerically singular")
    return np.linalg.solve(Lambda.T, sigma)


def optimal_kick_direction(sigma, Lambda):
    """Unit v maximizing sigma^T Lambda^{-1} v: (Lambda^T)^{-1} sigma normalized."""
    sigma = np.asarray(sigma, dtype=float)
    Lambda = np.atleast_2d(np.asarray(Lambda, dtype=float))
    if not np.any(sigma):
        raise InvalidParameters("sigma must be non-zero")
    w = _shear_covector(sigma, Lambda)
    v = w / np.linalg.norm(w)
    # w . v = |w| > 0, so this sign is the maximizer
    return v


@dataclass(frozen=True, eq=False)
class NDParams:
    """Parameters of the n-D model.  ``v=None`` selects the optimal kick direction."""

    sigma: np.ndarray
    Lambda: np.ndarray
    A: float
    tau: float
    v: np.ndarray = None
    H: FourierProfile = field(default_factory=FourierProfile)
    E: np.ndarray = field(init=False, repr=False)
    Lambda_inv: np.ndarray = field(init=False, repr=False)
    w: np.ndarray = field(init=False, repr=False)
    gain_row: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float)).copy()
        Lambda = np.atleast_2d(np.asarray(self.Lambda, dtype=float)).copy()
        m = sigma.size
        if sigma.ndim != 1 or Lambda.shape != (m, m):
            raise InvalidParameters(f"sigma has length {m} but Lambda has shape {Lambda.shape}")
        if m + 1 > MAX_DIM:
            raise DimensionTooLarge(f"phase dimension {m + 1} > {MAX_DIM}")
        if not np.any(sigma):
            raise InvalidParameters("sigma must be non-zero")
        if not (np.all(np.isfinite(sigma)) and np.all(np.isfinite(Lambda))):
            raise InvalidParameters("sigma and Lambda must be finite")
        if np.max(np.linalg.eigvals(-Lambda).real) >= 0:
            raise InvalidParameters("all eigenvalues of Lambda need positive real part")
        if self.tau <= 0 or self.A < 0:
            raise InvalidParameters("need tau > 0 and A >= 0")
        if self.v is None:
            v = optimal_kick_direction(sigma, Lambda)
        else:
            v = np.atleast_1d(np.asarray(self.v, dtype=float)).copy()
            if v.shape != (m,):
                raise InvalidParameters(f"kick direction must have length {m}")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise InvalidParameters("kick direction must be a unit vector")
        for arr in (sigma, Lambda, v):
            arr.setflags(write=False)
        E = mat_exp(-Lambda, self.tau)
        w = _shear_covector(sigma, Lambda)
        if m == 1:
            gain = np.array([w[0] * (1.0 - E[0, 0])])
        else:
            gain = w @ (np.eye(m) - E)
        sets = dict(sigma=sigma, Lambda=Lambda, v=v, A=float(self.A), tau=float(self.tau),
                    E=E, Lambda_inv=_inverse(Lambda), w=w, gain_row=gain)
        for k, val in sets.items():
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, k, val)

    @property
    def n(self):
        return self.sigma.size + 1

    @property
    def effective_shear(self):
        """w . v: theta-displacement per unit kick in the large-tau limit."""
        return float(self.w @ self.v)

    @classmethod
    def from_shear(cls, params):
        """n = 2 instance equivalent to a core2d ShearParams."""
        return cls([params.sigma], [[params.lam]], params.A, params.tau, v=[1.0])

    def to_dict(self):
        return {"sigma": self.sigma.tolist(), "Lambda": self.Lambda.tolist(), "A": self.A,
                "tau": self.tau, "v": self.v.tolist(), "H": self.H.to_dict()}


class NDState(NamedTuple):
    theta: float
    y: np.ndarray


def _unpack(s):
    return float(s[0]), np.asarray(s[1], dtype=float)


def flow_nd(s, t, p):
    if t < 0:
        raise ValueError("flow is only defined forward in time")
    theta, y = _unpack(s)
    Et = mat_exp(-p.Lambda, t)
    m = y.size
    if m == 1:
        row = p.w[0] * (1.0 - Et[0, 0])
        return NDState(reduce_mod1((theta + t) + row * y[0]), Et @ y)
    row = p.w @ (np.eye(m) - Et)
    return NDState(reduce_mod1((theta + t) + row @ y), Et @ y)


def kick_nd(s, p):
    theta, y = _unpack(s)
    return NDState(theta, y + (p.A * p.H(theta)) * p.v)


def _psi_nd_lift(s, p):
    theta, y = _unpack(s)
    y1 = y + (p.A * p.H(theta)) * p.v
    return (theta + p.tau) + float(p.gain_row @ y1), p.E @ y1


def psi_nd(s, p):
    theta, y = _psi_nd_lift(s, p)
    return NDState(reduce_mod1(theta), y)


def psi_nd_lifted(s, p):
    return NDState(*_psi_nd_lift(s, p))


def jacobian_nd(s, p):
    """D psi_nd at ``s`` as an n x n matrix (flow linearization times kick linearization)."""
    theta, _ = _unpack(s)
    m = p.sigma.size
    F = np.zeros((m + 1, m + 1))
    F[0, 0] = 1.0
    F[0, 1:] = p.gain_row
    F[1:, 1:] = p.E
    K = np.eye(m + 1)
    K[1:, 0] = p.A * p.H.derivative(theta) * p.v
    return F @ K


def wss_covector(p):
    """(1, sigma^T Lambda^{-1}); strong stable leaves are its level sets."""
    return np.concatenate([[1.0], p.w])


def magnification_factor(p, theta):
    """Large-tau theta-displacement produced by a kick at ``theta``: A H(theta) w.v."""
    return p.A * p.H(theta) * p.effective_shear


def singular_limit_map_nd(theta, a, p):
    """Slide kappa(theta, 0) along its strong stable leaf back to the cycle, then rotate by a."""
    return reduce_mod1(theta + a + p.effective_shear * p.A * p.H(theta))


def top_lyapunov_nd(s0, v0, n_steps, p, burn_in=DEFAULT_BURN_IN,
                    zero_band=DEFAULT_ZERO_BAND, guard=None):
    """Per-kick top Lyapunov exponent of psi_nd (tangent renormalized every kick)."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    theta0, y0 = _unpack(s0)
    v0 = np.asarray(v0, dtype=float)
    if v0.shape != (p.n,) or not np.all(np.isfinite(v0)) or not np.any(v0):
        raise ValueError(f"tangent seed must be a finite non-zero {p.n}-vector")
    if guard is None:
        guard = 2.0 * (float(np.max(np.abs(y0))) + _kick_radius(p)) + 1.0
    ccos, csin = p.H.arrays()
    total, theta, y, _, steps, status = _kernels.lyapnd(
        theta0, y0.copy(), v0.copy(), int(n_steps), int(burn_in), p.A, p.tau,
        np.ascontiguousarray(p.gain_row), np.ascontiguousarray(p.E), np.ascontiguousarray(p.v),
        p.H.const, ccos, csin, float(guard))
    if status != _kernels.OK:
        raise NonFiniteState(f"n-D orbit left the guard box after {steps} kicks (theta={theta}, y={y})")
    value = total / n_steps
    return LyapunovEstimate(
        value=value, n_steps=int(n_steps), initial_point=NDState(theta0, y0.copy()),
        tangent_seed=tuple(v0 / np.linalg.norm(v0)), classification=classify(value, zero_band),
        burn_in=int(burn_in))


def _kick_radius(p):
    # sup |y| on the attractor is at most A sup|H| sum_k ||E^k|| ; a generous box
    norms, Ek, total = 0, np.eye(p.sigma.size), 0.0
    while norms < 200:
        Ek = Ek @ p.E
        total += np.linalg.norm(Ek, 2)
        norms += 1
    return p.A * p.H.sup_bound * total


def initial_conditions_nd(p, seed, orbit_id):
    """Initial state and tangent of one n-D ensemble orbit.

    theta is uniform, y uniform in the cube |y_i| <= A sup|H| and the tangent a
    uniformly random direction, all drawn from the stream ``(seed, orbit_id)``.
    """
    rng = prng_stream(seed, orbit_id)
    r = p.A * p.H.sup_bound
    theta = float(rng.random())
    y = rng.uniform(-r, r, p.sigma.size) if r > 0 else np.zeros(p.sigma.size)
    return NDState(theta, y), random_unit_vector(rng, p.n)


def ensemble_protocol_nd(p, n_orbits=10, n_steps=100_000, seed=0, burn_in=DEFAULT_BURN_IN,
                         zero_band=DEFAULT_ZERO_BAND, gap=DEFAULT_GAP):
    """n-D version of the 10-orbit protocol; orbit ``i`` uses stream ``(seed, i)``."""
    if n_orbits < 3:
        raise ValueError("n_orbits must be >= 3")
    estimates = []
    for i in range(n_orbits):
        s0, v0 = initial_conditions_nd(p, seed, i)
        estimates.append(top_lyapunov_nd(s0, v0, n_steps, p, burn_in=burn_in, zero_band=zero_band))
    return summarize(estimates, gap=gap)
