"""Compiled integration kernels for the Lindblad master equation.

The right-hand side is evaluated in the form

    drho/dt = K rho + rho K^H + sum_k L_k rho L_k^H,   K = -iH - (1/2) sum_k L_k^H L_k

with the collapse operators passed in a packed COO layout (they are very
sparse: single-level sinks and the cavity lowering operator).  Everything
runs under numba so that the ~1e5..1e6 accepted steps of the long
van-der-Waals runs stay in compiled code.

Status codes returned by the steppers:
    0  finished
   -1  adaptive step size underflow (stiffness / misconfiguration)
   -2  step budget exhausted
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_UNDERFLOW = -1
STATUS_STEP_BUDGET = -2

# Dormand-Prince 5(4) tableau
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# weights of (5th order solution) - (embedded 4th order solution)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0


@njit(cache=True)
def _rhs(K, lrow, lcol, lval, lptr, rho, out, work):
    """out = K rho + (K rho)^H + sum_k L_k rho L_k^H (collapse terms in COO).

    Requires rho Hermitian (always true along a density-matrix trajectory),
    which turns rho K^H into the adjoint of the single product K rho.
    """
    n = rho.shape[0]
    t = np.dot(K, rho)
    for a in range(n):
        for b in range(n):
            out[a, b] = t[a, b] + np.conj(t[b, a])
    nL = lptr.shape[0] - 1
    for k in range(nL):
        lo, hi = lptr[k], lptr[k + 1]
        if hi == lo:
            continue
        work[:, :] = 0.0
        for e in range(lo, hi):  # work = L_k rho
            i, j, v = lrow[e], lcol[e], lval[e]
            for m in range(n):
                work[i, m] += v * rho[j, m]
        for e in range(lo, hi):  # out += work L_k^H
            i, j, vc = lrow[e], lcol[e], np.conj(lval[e])
            for m in range(n):
                out[m, i] += work[m, j] * vc
    return out


@njit(cache=True)
def _initial_step(K, lrow, lcol, lval, lptr, y, f0, rtol, atol, span, work):
    n = y.shape[0]
    d0 = 0.0
    d1 = 0.0
    for a in range(n):
        for b in range(n):
            sc = atol + rtol * abs(y[a, b])
            q0 = abs(y[a, b]) / sc
            q1 = abs(f0[a, b]) / sc
            d0 += q0 * q0
            d1 += q1 * q1
    d0 = np.sqrt(d0 / (n * n))
    d1 = np.sqrt(d1 / (n * n))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6 * span
    else:
        h = 0.01 * d0 / d1
    if h > span:
        h = span
    if h <= 0.0:
        h = 1e-12
    return h


@njit(cache=True)
def rk45_lindblad(K, lrow, lcol, lval, lptr, rho0, ts, rtol, atol, max_steps):
    """Adaptive Dormand-Prince 5(4) over the sample grid ts.

    Returns (samples, n_steps, n_accepted, status).  samples[i] is the state
    at ts[i]; samples[0] is a copy of rho0.
    """
    n = rho0.shape[0]
    ns = ts.shape[0]
    samples = np.empty((ns, n, n), np.complex128)
    y = rho0.copy()
    ynew = np.empty((n, n), np.complex128)
    ystage = np.empty((n, n), np.complex128)
    work = np.empty((n, n), np.complex128)
    k1 = np.empty((n, n), np.complex128)
    k2 = np.empty((n, n), np.complex128)
    k3 = np.empty((n, n), np.complex128)
    k4 = np.empty((n, n), np.complex128)
    k5 = np.empty((n, n), np.complex128)
    k6 = np.empty((n, n), np.complex128)
    k7 = np.empty((n, n), np.complex128)

    samples[0] = y
    t = ts[0]
    span = ts[ns - 1] - t
    _rhs(K, lrow, lcol, lval, lptr, y, k1, work)
    if span == 0.0:
        return samples, 0, 0, STATUS_OK
    h_ctrl = _initial_step(K, lrow, lcol, lval, lptr, y, k1, rtol, atol, span, work)

    n_steps = 0
    n_accept = 0
    eps = 2.220446049250313e-16
    for si in range(1, ns):
        t_end = ts[si]
        while t < t_end:
            clamped = h_ctrl >= t_end - t
            h = t_end - t if clamped else h_ctrl

            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + h * (_A21 * k1[a, b])
            _rhs(K, lrow, lcol, lval, lptr, ystage, k2, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + h * (_A31 * k1[a, b] + _A32 * k2[a, b])
            _rhs(K, lrow, lcol, lval, lptr, ystage, k3, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + h * (
                        _A41 * k1[a, b] + _A42 * k2[a, b] + _A43 * k3[a, b]
                    )
            _rhs(K, lrow, lcol, lval, lptr, ystage, k4, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + h * (
                        _A51 * k1[a, b] + _A52 * k2[a, b] + _A53 * k3[a, b] + _A54 * k4[a, b]
                    )
            _rhs(K, lrow, lcol, lval, lptr, ystage, k5, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + h * (
                        _A61 * k1[a, b] + _A62 * k2[a, b] + _A63 * k3[a, b]
                        + _A64 * k4[a, b] + _A65 * k5[a, b]
                    )
            _rhs(K, lrow, lcol, lval, lptr, ystage, k6, work)
            for a in range(n):
                for b in range(n):
                    ynew[a, b] = y[a, b] + h * (
                        _B1 * k1[a, b] + _B3 * k3[a, b] + _B4 * k4[a, b]
                        + _B5 * k5[a, b] + _B6 * k6[a, b]
                    )
            _rhs(K, lrow, lcol, lval, lptr, ynew, k7, work)

            errsum = 0.0
            for a in range(n):
                for b in range(n):
                    e = h * (
                        _E1 * k1[a, b] + _E3 * k3[a, b] + _E4 * k4[a, b]
                        + _E5 * k5[a, b] + _E6 * k6[a, b] + _E7 * k7[a, b]
                    )
                    ya = abs(y[a, b])
                    yb = abs(ynew[a, b])
                    sc = atol + rtol * (ya if ya > yb else yb)
                    q = abs(e) / sc
                    errsum += q * q
            err = np.sqrt(errsum / (n * n))

            n_steps += 1
            if n_steps > max_steps:
                samples[si] = y
                return samples, n_steps, n_accept, STATUS_STEP_BUDGET

            if err <= 1.0:
                t += h
                tmp = y
                y = ynew
                ynew = tmp
                tmp = k1
                k1 = k7
                k7 = tmp
                n_accept += 1
                if not clamped:
                    if err == 0.0:
                        fac = _FAC_MAX
                    else:
                        fac = _SAFETY * err ** -0.2
                        if fac > _FAC_MAX:
                            fac = _FAC_MAX
                    h_ctrl = h * fac
            else:
                fac = _SAFETY * err ** -0.2
                if fac < _FAC_MIN:
                    fac = _FAC_MIN
                h_ctrl = h * fac
                if h_ctrl < 1e3 * eps * max(abs(t), abs(t_end)):
                    samples[si] = y
                    return samples, n_steps, n_accept, STATUS_UNDERFLOW
        samples[si] = y
    return samples, n_steps, n_accept, STATUS_OK


@njit(cache=True)
def rk4_lindblad(K, lrow, lcol, lval, lptr, rho0, dt, stride, n_samples):
    """Classic fixed-step RK4; records a sample every `stride` steps."""
    n = rho0.shape[0]
    samples = np.empty((n_samples, n, n), np.complex128)
    y = rho0.copy()
    ystage = np.empty((n, n), np.complex128)
    work = np.empty((n, n), np.complex128)
    k1 = np.empty((n, n), np.complex128)
    k2 = np.empty((n, n), np.complex128)
    k3 = np.empty((n, n), np.complex128)
    k4 = np.empty((n, n), np.complex128)
    samples[0] = y
    for si in range(1, n_samples):
        for _ in range(stride):
            _rhs(K, lrow, lcol, lval, lptr, y, k1, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + 0.5 * dt * k1[a, b]
            _rhs(K, lrow, lcol, lval, lptr, ystage, k2, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + 0.5 * dt * k2[a, b]
            _rhs(K, lrow, lcol, lval, lptr, ystage, k3, work)
            for a in range(n):
                for b in range(n):
                    ystage[a, b] = y[a, b] + dt * k3[a, b]
            _rhs(K, lrow, lcol, lval, lptr, ystage, k4, work)
            for a in range(n):
                for b in range(n):
                    y[a, b] = y[a, b] + (dt / 6.0) * (
                        k1[a, b] + 2.0 * k2[a, b] + 2.0 * k3[a, b] + k4[a, b]
                    )
        samples[si] = y
    n_steps = (n_samples - 1) * stride
    return samples, n_steps, n_steps, STATUS_OK


def pack_collapse(ops) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pack a list of dense collapse matrices into the COO layout the kernels use."""
    rows, cols, vals, ptr = [], [], [], [0]
    for op in ops:
        r, c = np.nonzero(op)
        rows.extend(r.tolist())
        cols.extend(c.tolist())
        vals.extend(op[r, c].tolist())
        ptr.append(len(rows))
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.complex128),
        np.asarray(ptr, dtype=np.int64),
    )
