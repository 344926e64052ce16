"""Pure-Python reference implementation of the numerical kernels.

Mirrors ``_ckernels.pyx`` routine by routine; used when the compiled
extension is unavailable or ``QDYN_BACKEND=python`` is set.
"""

from __future__ import annotations

import math

import numpy as np

# status codes shared with the compiled kernels
OK = 0
STEP_UNDERFLOW = 1
NONFINITE = 2
MAX_STEPS = 3

_MAX_DEPTH = 48


def ohmic_rate(t: float, omega_c: float, s: float, gamma_s: float) -> float:
    x = omega_c * t
    return omega_c * (1.0 + x * x) ** (-0.5 * s) * gamma_s * math.sin(s * math.atan(x))


def _simpson_adaptive(f, a: float, b: float, tol: float) -> float:
    # iterative adaptive Simpson with Richardson correction
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth >= _MAX_DEPTH or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    return total


def ohmic_upsilon(times, omega_c: float, s: float, gamma_s: float, tol: float) -> np.ndarray:
    """Cumulative ``2 * integral_0^t rate`` at each of the ascending ``times``.

    The absolute tolerance ``tol`` is shared across sub-intervals in
    proportion to their length.
    """
    ts = np.asarray(times, dtype=float)
    out = np.empty(ts.shape[0])
    span = float(ts[-1]) if ts.shape[0] else 0.0
    f = lambda u: ohmic_rate(u, omega_c, s, gamma_s)  # noqa: E731
    acc = 0.0
    prev = 0.0
    for i, t in enumerate(ts):
        t = float(t)
        if t > prev:
            eps = max(0.5 * tol * (t - prev) / span, 1e-300)
            acc += _simpson_adaptive(f, prev, t, eps)
            prev = t
        out[i] = 2.0 * acc
    return out


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def rk45_affine(generator, n0, times, tol: float, max_steps: int = 2_000_000):
    """Integrate dn/dt = A(t) n + b(t) with the Dormand-Prince 5(4) pair.

    ``generator(t)`` returns ``(A, b)``; it may raise ``ArithmeticError`` or
    return non-finite entries at singular times, which is treated as a
    rejected step. Steps are clipped to land on every requested time.

    Returns ``(states, status, t_fail)`` where ``states`` has shape
    ``(len(times), 3)`` and rows past a failure are NaN.
    """
    ts = np.asarray(times, dtype=float)
    n = ts.shape[0]
    out = np.full((n, 3), np.nan)
    y = np.array(n0, dtype=float)
    out[0] = y
    t = float(ts[0])
    span = float(ts[-1] - ts[0])
    if n < 2 or span <= 0.0:
        return out, OK, t

    def rhs(tt, yy):
        try:
            a, b = generator(tt)
        except ArithmeticError:
            return None
        with np.errstate(over="ignore", invalid="ignore"):
            k = a @ yy + b
        return k if np.all(np.isfinite(k)) else None

    h = min(0.01 * span, 0.1 * tol ** 0.2)
    k1 = rhs(t, y)
    steps = 0
    i = 1
    while i < n:
        target = float(ts[i])
        if k1 is None:
            return out, NONFINITE, t
        while t < target:
            steps += 1
            if steps > max_steps:
                return out, MAX_STEPS, t
            if h <= 1e-14 * max(1.0, abs(t)):
                return out, STEP_UNDERFLOW, t
            h_try = h
            last = t + h_try >= target
            if last:
                h_try = target - t
            ks = [k1]
            bad = False
            for st in range(1, 7):
                yy = y.copy()
                for j, aj in enumerate(_A[st]):
                    if aj:
                        yy += h_try * aj * ks[j]
                kk = rhs(t + _C[st] * h_try, yy)
                if kk is None:
                    bad = True
                    break
                ks.append(kk)
            if bad:
                h = 0.25 * h_try
                continue
            y_new = y.copy()
            err = np.zeros(3)
            for j in range(7):
                if _B[j]:
                    y_new += h_try * _B[j] * ks[j]
                if _E[j]:
                    err += h_try * _E[j] * ks[j]
            scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
            enorm = float(np.max(np.abs(err) / scale))
            if enorm <= 1.0:
                t = target if last else t + h_try
                y = y_new
                k1 = ks[6]
                fac = 5.0 if enorm == 0.0 else min(5.0, 0.9 * enorm ** -0.2)
                h = max(h, h_try * fac) if last else h_try * fac
            else:
                h = h_try * max(0.2, 0.9 * enorm ** -0.2)
        out[i] = y
        i += 1
    return out, OK, t
