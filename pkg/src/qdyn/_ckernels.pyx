# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Ohmic rate quadrature and the Dormand-Prince integrator.

The Bloch-space generators of every channel family are evaluated in C so
the integration loop never calls back into Python. Model codes and parameter
layouts are defined in ``qdyn._kernels``.
"""

import numpy as np

from libc.math cimport sin, cos, tan, tanh, atan, pow, fabs, isfinite
from libc.string cimport memset

cdef extern from "complex.h" nogil:
    double complex ccosh(double complex)
    double complex csinh(double complex)
    double complex csqrt(double complex)
    double complex cexp(double complex)
    double creal(double complex)
    double cimag(double complex)
    double cabs(double complex)

cdef enum:
    OK = 0
    STEP_UNDERFLOW = 1
    NONFINITE = 2
    MAX_STEPS = 3
    MAX_DEPTH = 48


cdef inline double _ohmic_rate(double t, double omega_c, double s, double gamma_s) noexcept nogil:
    cdef double x = omega_c * t
    return omega_c * pow(1.0 + x * x, -0.5 * s) * gamma_s * sin(s * atan(x))


def ohmic_rate(double t, double omega_c, double s, double gamma_s):
    return _ohmic_rate(t, omega_c, s, gamma_s)


cdef double _simpson(double a, double b, double fa, double fm, double fb,
                     double whole, double eps, int depth,
                     double omega_c, double s, double gamma_s) noexcept nogil:
    cdef double m = 0.5 * (a + b)
    cdef double flm = _ohmic_rate(0.5 * (a + m), omega_c, s, gamma_s)
    cdef double frm = _ohmic_rate(0.5 * (m + b), omega_c, s, gamma_s)
    cdef double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    cdef double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    cdef double delta = left + right - whole
    if depth >= MAX_DEPTH or fabs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    # left half first, matching the pure-Python stack order
    cdef double lval = _simpson(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1, omega_c, s, gamma_s)
    return lval + _simpson(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1, omega_c, s, gamma_s)


def ohmic_upsilon(times, double omega_c, double s, double gamma_s, double tol):
    """Cumulative ``2 * integral_0^t rate`` at each of the ascending ``times``."""
    cdef double[::1] ts = np.ascontiguousarray(times, dtype=float)
    cdef Py_ssize_t n = ts.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    if n == 0:
        return out
    cdef double span = ts[n - 1]
    cdef double acc = 0.0, prev = 0.0, t, eps, fa, fm, fb
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            t = ts[i]
            if t > prev:
                eps = 0.5 * tol * (t - prev) / span
                if eps < 1e-300:
                    eps = 1e-300
                fa = _ohmic_rate(prev, omega_c, s, gamma_s)
                fm = _ohmic_rate(0.5 * (prev + t), omega_c, s, gamma_s)
                fb = _ohmic_rate(t, omega_c, s, gamma_s)
                acc += _simpson(prev, t, fa, fm, fb, (t - prev) / 6.0 * (fa + 4.0 * fm + fb),
                                eps, 0, omega_c, s, gamma_s)
                prev = t
            o[i] = 2.0 * acc
    return out


cdef int _generator(int code, const double* p, double t, double* A, double* b) noexcept nogil:
    # A is row-major 3x3; returns 0 when finite
    cdef double g, h, g1, g3
    cdef double c2, s2, W, sx
    cdef double complex e1, e2, P, dP, r, a, om, x, S, C
    memset(A, 0, 9 * sizeof(double))
    memset(b, 0, 3 * sizeof(double))
    if code == 0:
        g = _ohmic_rate(t, p[0], p[1], p[2])
        A[0] = -2.0 * g
        A[4] = -2.0 * g
    elif code == 1:
        # dn, sigma, w1, w2, xi
        sx = sin(p[4])
        c2 = 1.0 - sx * sx
        s2 = sx * sx
        e1 = cexp(1j * p[2] * p[0] * t)
        e2 = cexp(1j * p[3] * p[0] * t)
        P = c2 * e1 + s2 * e2
        if cabs(P) == 0.0:
            return 1
        dP = 1j * p[0] * (p[2] * c2 * e1 + p[3] * s2 * e2)
        r = -p[1] * p[1] * p[0] * p[0] * t + dP / P
        g = -0.5 * creal(r)
        h = -0.5 * cimag(r)
        A[0] = -2.0 * g
        A[4] = -2.0 * g
        A[1] = -2.0 * h
        A[3] = 2.0 * h
    elif code == 2:
        # lam, gamma_M, delta
        W = 0.5 * p[1] * p[0] + 0.25 * p[2] * p[2]
        a = p[0] - 1j * p[2]
        om = csqrt(p[0] * p[0] - 2j * p[0] * p[2] - 4.0 * W * W)
        x = 0.5 * om * t
        if cabs(om) * t < 1e-6:
            S = 0.5 * t * (1.0 + x * x / 6.0)
            C = 1.0 + 0.5 * x * x
        else:
            S = csinh(x) / om
            C = ccosh(x)
        if cabs(C + a * S) == 0.0:
            return 1
        r = 0.5 * (p[2] * p[2] - 4.0 * W * W) * S / (C + a * S)
        g = -2.0 * creal(r)
        h = 0.5 * cimag(r)
        A[0] = -0.5 * g
        A[4] = -0.5 * g
        A[1] = -2.0 * h
        A[3] = 2.0 * h
        A[8] = -g
        b[2] = g
    elif code == 3 or code == 4:
        # lam, omega
        g1 = 0.5 * p[0]
        if code == 3:
            g3 = -0.5 * p[1] * tanh(p[1] * t)
        else:
            if cos(p[1] * t) == 0.0:
                return 1
            g3 = 0.5 * p[1] * tan(p[1] * t)
        A[0] = -2.0 * (g1 + g3)
        A[4] = -2.0 * (g1 + g3)
        A[8] = -4.0 * g1
    else:
        return 1
    cdef int k
    for k in range(9):
        if not isfinite(A[k]):
            return 1
    return 0 if isfinite(b[2]) else 1


def generator(int code, params, double t):
    """Bloch generator ``(A, b)`` of model ``code`` at time ``t``."""
    cdef double[::1] p = np.ascontiguousarray(params, dtype=float)
    A = np.empty((3, 3))
    b = np.empty(3)
    cdef double[:, ::1] Av = A
    cdef double[::1] bv = b
    if _generator(code, &p[0], t, &Av[0, 0], &bv[0]) != 0:
        raise ArithmeticError(f"generator is singular at t={t}")
    return A, b


cdef double _C[7]
cdef double _B[7]
cdef double _E[7]
cdef double _A[7][6]

_C[:] = [0.0, 1 / 5., 3 / 10., 4 / 5., 8 / 9., 1.0, 1.0]
_B[:] = [35 / 384., 0.0, 500 / 1113., 125 / 192., -2187 / 6784., 11 / 84., 0.0]
_E[:] = [71 / 57600., 0.0, -71 / 16695., 71 / 1920., -17253 / 339200., 22 / 525., -1 / 40.]
_A[1][:] = [1 / 5., 0, 0, 0, 0, 0]
_A[2][:] = [3 / 40., 9 / 40., 0, 0, 0, 0]
_A[3][:] = [44 / 45., -56 / 15., 32 / 9., 0, 0, 0]
_A[4][:] = [19372 / 6561., -25360 / 2187., 64448 / 6561., -212 / 729., 0, 0]
_A[5][:] = [9017 / 3168., -355 / 33., 46732 / 5247., 49 / 176., -5103 / 18656., 0]
_A[6][:] = [35 / 384., 0.0, 500 / 1113., 125 / 192., -2187 / 6784., 11 / 84.]


cdef inline int _rhs(int code, const double* p, double t, const double* y,
                     double* out) noexcept nogil:
    cdef double A[9]
    cdef double b[3]
    cdef int i
    if _generator(code, p, t, A, b) != 0:
        return 1
    for i in range(3):
        out[i] = A[3 * i] * y[0] + A[3 * i + 1] * y[1] + A[3 * i + 2] * y[2] + b[i]
        if not isfinite(out[i]):
            return 1
    return 0


def rk45_affine(int code, params, n0, times, double tol, long max_steps=2_000_000):
    """Compiled counterpart of ``_pykernels.rk45_affine`` for a built-in model.

    Returns ``(states, status, t_fail)``.
    """
    cdef double[::1] p = np.ascontiguousarray(params, dtype=float)
    cdef double[::1] ts = np.ascontiguousarray(times, dtype=float)
    cdef Py_ssize_t n = ts.shape[0]
    out = np.full((n, 3), np.nan)
    cdef double[:, ::1] o = out
    cdef double y[3]
    cdef double ynew[3]
    cdef double yy[3]
    cdef double err[3]
    cdef double k[7][3]
    cdef double t, target, h, h_try, span, enorm, fac, sc, ay
    cdef int st, j, d, status = OK, bad, last, have_k1
    cdef long steps = 0
    cdef Py_ssize_t i
    for d in range(3):
        y[d] = n0[d]
        o[0, d] = y[d]
    t = ts[0]
    if n < 2:
        return out, OK, t
    span = ts[n - 1] - ts[0]
    if span <= 0.0:
        return out, OK, t
    h = 0.01 * span
    if 0.1 * pow(tol, 0.2) < h:
        h = 0.1 * pow(tol, 0.2)
    with nogil:
        have_k1 = _rhs(code, &p[0], t, y, k[0]) == 0
        i = 1
        while i < n and status == OK:
            target = ts[i]
            if not have_k1:
                status = NONFINITE
                break
            while t < target:
                steps += 1
                if steps > max_steps:
                    status = MAX_STEPS
                    break
                if h <= 1e-14 * (fabs(t) if fabs(t) > 1.0 else 1.0):
                    status = STEP_UNDERFLOW
                    break
                h_try = h
                last = t + h_try >= target
                if last:
                    h_try = target - t
                bad = 0
                for st in range(1, 7):
                    for d in range(3):
                        yy[d] = y[d]
                        for j in range(st):
                            if _A[st][j] != 0.0:
                                yy[d] += h_try * _A[st][j] * k[j][d]
                    if _rhs(code, &p[0], t + _C[st] * h_try, yy, k[st]) != 0:
                        bad = 1
                        break
                if bad:
                    h = 0.25 * h_try
                    continue
                enorm = 0.0
                for d in range(3):
                    ynew[d] = y[d]
                    err[d] = 0.0
                    for j in range(7):
                        if _B[j] != 0.0:
                            ynew[d] += h_try * _B[j] * k[j][d]
                        if _E[j] != 0.0:
                            err[d] += h_try * _E[j] * k[j][d]
                    ay = fabs(y[d]) if fabs(y[d]) > fabs(ynew[d]) else fabs(ynew[d])
                    sc = fabs(err[d]) / (tol * (1.0 + ay))
                    if sc > enorm:
                        enorm = sc
                if enorm <= 1.0:
                    t = target if last else t + h_try
                    for d in range(3):
                        y[d] = ynew[d]
                        k[0][d] = k[6][d]
                    if enorm == 0.0:
                        fac = 5.0
                    else:
                        fac = 0.9 * pow(enorm, -0.2)
                        if fac > 5.0:
                            fac = 5.0
                    if last:
                        if h_try * fac > h:
                            h = h_try * fac
                    else:
                        h = h_try * fac
                else:
                    fac = 0.9 * pow(enorm, -0.2)
                    h = h_try * (fac if fac > 0.2 else 0.2)
            if status != OK:
                break
            for d in range(3):
                o[i, d] = y[d]
            i += 1
    return out, status, t
