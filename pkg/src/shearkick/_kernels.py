"""Compiled inner loops for tangent-vector iteration.

The 2D and n-D kernels perform the same floating-point operations in the same
order, so an n = 2 instance of the n-D model reproduces the 2D estimate bit for
bit.  Both apply the kick linearization first and then the flow's, matching
psi = flow o kick.

Status codes: 0 ok, 1 orbit left the guard box or became non-finite.
"""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi

OK = 0
GUARD_TRIPPED = 1


@njit(cache=True, nogil=True)
def lyap2d(theta, y, v1, v2, n_steps, burn_in, A, tau, gain, b, guard):
    nrm = math.sqrt(v1 * v1 + v2 * v2)
    v1 = v1 / nrm
    v2 = v2 / nrm
    total = 0.0
    for k in range(burn_in + n_steps):
        s = math.sin(TWO_PI * theta)
        c = math.cos(TWO_PI * theta)
        dk = A * (TWO_PI * c)
        y1 = y + A * s
        theta = (theta + tau) + gain * y1
        theta = theta % 1.0
        if theta >= 1.0:
            theta = 0.0
        y = b * y1
        u2 = v2 + dk * v1
        w1 = v1 + gain * u2
        w2 = b * u2
        nrm = math.sqrt(w1 * w1 + w2 * w2)
        v1 = w1 / nrm
        v2 = w2 / nrm
        if k >= burn_in:
            total += math.log(nrm)
        if not (abs(y) <= guard) or not math.isfinite(theta) or not (nrm > 0.0):
            return total, theta, y, v1, v2, k + 1, GUARD_TRIPPED
    return total, theta, y, v1, v2, burn_in + n_steps, OK


@njit(cache=True, nogil=True)
def profile_value(theta, c0, ccos, csin):
    h = c0
    for j in range(ccos.shape[0]):
        arg = TWO_PI * (j + 1) * theta
        h += ccos[j] * math.cos(arg) + csin[j] * math.sin(arg)
    return h


@njit(cache=True, nogil=True)
def profile_derivative(theta, ccos, csin):
    hp = 0.0
    for j in range(ccos.shape[0]):
        arg = TWO_PI * (j + 1) * theta
        hp += TWO_PI * (j + 1) * (-ccos[j] * math.sin(arg) + csin[j] * math.cos(arg))
    return hp


@njit(cache=True, nogil=True)
def lyapnd(theta, y0, v0, n_steps, burn_in, A, tau, gain_row, E, kdir, c0, ccos, csin, guard):
    m = y0.shape[0]
    y = y0.copy()
    y1 = np.empty(m)
    u = np.empty(m)
    dy = np.empty(m)
    nrm = v0[0] * v0[0]
    for i in range(m):
        nrm += v0[i + 1] * v0[i + 1]
    nrm = math.sqrt(nrm)
    dth = v0[0] / nrm
    for i in range(m):
        dy[i] = v0[i + 1] / nrm
    total = 0.0
    status = OK
    steps = burn_in + n_steps
    for k in range(burn_in + n_steps):
        h = profile_value(theta, c0, ccos, csin)
        hp = profile_derivative(theta, ccos, csin)
        ah = A * h
        ahp = A * hp
        acc = 0.0
        for j in range(m):
            y1[j] = y[j] + ah * kdir[j]
            acc += gain_row[j] * y1[j]
        theta = (theta + tau) + acc
        theta = theta % 1.0
        if theta >= 1.0:
            theta = 0.0
        for i in range(m):
            s = 0.0
            for j in range(m):
                s += E[i, j] * y1[j]
            y[i] = s
        acc = 0.0
        for j in range(m):
            u[j] = dy[j] + (ahp * kdir[j]) * dth
            acc += gain_row[j] * u[j]
        w0 = dth + acc
        nrm = w0 * w0
        for i in range(m):
            s = 0.0
            for j in range(m):
                s += E[i, j] * u[j]
            dy[i] = s
            nrm += s * s
        nrm = math.sqrt(nrm)
        dth = w0 / nrm
        for i in range(m):
            dy[i] = dy[i] / nrm
        if k >= burn_in:
            total += math.log(nrm)
        bad = not math.isfinite(theta) or not (nrm > 0.0)
        for i in range(m):
            if not (abs(y[i]) <= guard):
                bad = True
        if bad:
            status = GUARD_TRIPPED
            steps = k + 1
            break
    v = np.empty(m + 1)
    v[0] = dth
    v[1:] = dy
    return total, theta, y, v, steps, status


@njit(cache=True, nogil=True)
def lyap1d(theta, n, burn_in, a, B, c1, c2, has_crit, hit_tol):
    """Sum of log|f'| along a circle-map orbit; returns (sum, theta, hit)."""
    total = 0.0
    for k in range(burn_in + n):
        if has_crit:
            d1 = abs(theta - c1) % 1.0
            d1 = min(d1, 1.0 - d1)
            d2 = abs(theta - c2) % 1.0
            d2 = min(d2, 1.0 - d2)
            if min(d1, d2) <= hit_tol:
                return -math.inf, theta, True
        arg = TWO_PI * theta
        if k >= burn_in:
            total += math.log(abs(1.0 + TWO_PI * B * math.cos(arg)))
        theta = (theta + a + B * math.sin(arg)) % 1.0
        if theta >= 1.0:
            theta = 0.0
    return total, theta, False


@njit(cache=True, nogil=True)
def circle_lift_orbit_end(theta, n, a, B):
    """Lift of the circle map iterated n times (no reduction)."""
    for _ in range(n):
        theta = theta + a + B * math.sin(TWO_PI * theta)
    return theta
