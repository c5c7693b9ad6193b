"""Compiled per-sample SGD kernels for the pi-sigma network.

Both gatings share the parameter layout of :class:`mtp_fuzzy.pisigma.FnnParams`:
``a`` (n, s) centers, ``b`` (n, s) widths and ``c`` (n, s + 1) consequent
coefficients with the intercept in column 0.  All kernels mutate ``a``, ``b``
and ``c`` in place and never allocate per sample except through the scratch
buffers handed in by the caller.

Status codes returned by the epoch kernels:
    0  finished
    1  no active rule for a sample (sample skipped, counted)
    2  non-finite loss (training must stop)
    3  a whole pass found no active rule for any sample (no update can
       happen any more)
"""

import math

import numpy as np
from numba import njit

OK = 0
NO_ACTIVE = 1
DIVERGED = 2
STALLED = 3


@njit(cache=True, nogil=True)
def _linear_output(c, j, x):
    y = c[j, 0]
    for i in range(x.shape[0]):
        y += c[j, i + 1] * x[i]
    return y


@njit(cache=True, nogil=True)
def mtp_forward(a, b, c, x, kappa, eps, deg, out, arg, dist):
    """Movement-degree forward pass.

    Fills ``deg`` (d_j, zero for inactive rules), ``out`` (y_j), ``arg`` (index
    of the input attaining the min distance, -1 when that distance is clamped)
    and ``dist`` (the unclamped min distance).  Returns (y0, sum of degrees).
    """
    n, s = a.shape
    num = 0.0
    den = 0.0
    for j in range(n):
        best = np.inf
        best_i = -1
        for i in range(s):
            rho = kappa * math.sqrt(0.5 * b[j, i])
            t = abs(x[i] - a[j, i]) / rho
            if t < best:
                best = t
                best_i = i
        if best >= 1.0:
            best = 1.0
            best_i = -1
        dj = 1.0 - best
        if dj >= eps and dj > 0.0:
            yj = _linear_output(c, j, x)
            deg[j] = dj
            out[j] = yj
            arg[j] = best_i
            dist[j] = best
            num += dj * yj
            den += dj
        else:
            deg[j] = 0.0
            arg[j] = -2
    if den == 0.0:
        return np.nan, 0.0
    return num / den, den


@njit(cache=True, nogil=True)
def mtp_step(a, b, c, x, yd, eta, kappa, eps, min_width, deg, out, arg, dist):
    y0, den = mtp_forward(a, b, c, x, kappa, eps, deg, out, arg, dist)
    if den == 0.0:
        return np.nan, NO_ACTIVE
    r = yd - y0
    loss = 0.5 * r * r
    if not math.isfinite(loss):
        return loss, DIVERGED
    n, s = a.shape
    for j in range(n):
        if arg[j] == -2:
            continue
        dj = deg[j]
        g = -r / den
        # consequent coefficients
        c[j, 0] -= eta * g * dj
        for i in range(s):
            c[j, i + 1] -= eta * g * dj * x[i]
        i = arg[j]
        if i < 0:
            continue
        # dE/dd_j, then d_j = 1 - d_ji for the minimizing input only
        gd = g * (out[j] - y0)
        aji = a[j, i]
        bji = b[j, i]
        rho = kappa * math.sqrt(0.5 * bji)
        diff = x[i] - aji
        sgn = 1.0 if diff > 0.0 else (-1.0 if diff < 0.0 else 0.0)
        a[j, i] = aji - eta * gd * sgn / rho
        bji = bji - eta * gd * dist[j] / (2.0 * bji)
        b[j, i] = bji if bji > min_width else min_width
    return loss, OK


@njit(cache=True, nogil=True)
def sugeno_forward(a, b, c, x, w, out, mu):
    """Product-of-Gaussians forward pass; fills ``w``, ``out`` and the
    per-input memberships ``mu``.  Returns (y0, sum of weights)."""
    n, s = a.shape
    num = 0.0
    den = 0.0
    for j in range(n):
        wj = 1.0
        for i in range(s):
            d = x[i] - a[j, i]
            m = math.exp(-(d * d) / b[j, i])
            mu[j, i] = m
            wj *= m
        yj = _linear_output(c, j, x)
        w[j] = wj
        out[j] = yj
        num += wj * yj
        den += wj
    if den == 0.0:
        return np.nan, 0.0
    return num / den, den


@njit(cache=True, nogil=True)
def sugeno_step(a, b, c, x, yd, eta, min_width, w, out, mu):
    y0, den = sugeno_forward(a, b, c, x, w, out, mu)
    if den == 0.0:
        return np.nan, NO_ACTIVE
    r = yd - y0
    loss = 0.5 * r * r
    if not math.isfinite(loss):
        return loss, DIVERGED
    n, s = a.shape
    for j in range(n):
        wj = w[j]
        if wj == 0.0:
            continue
        g = -r / den
        c[j, 0] -= eta * g * wj
        for i in range(s):
            c[j, i + 1] -= eta * g * wj * x[i]
        gw = g * (out[j] - y0) * wj
        for i in range(s):
            aji = a[j, i]
            bji = b[j, i]
            diff = x[i] - aji
            a[j, i] = aji - eta * gw * 2.0 * diff / bji
            bji = bji - eta * gw * diff * diff / (bji * bji)
            b[j, i] = bji if bji > min_width else min_width
    return loss, OK


@njit(cache=True, nogil=True)
def mtp_epochs(a, b, c, X, Y, epochs, eta, kappa, eps, min_width):
    """Run ``epochs`` passes over (X, Y). Returns (status, epoch, skipped)."""
    n = a.shape[0]
    deg = np.zeros(n)
    out = np.zeros(n)
    arg = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n)
    skipped = 0
    for e in range(epochs):
        missed = 0
        for k in range(X.shape[0]):
            _, st = mtp_step(a, b, c, X[k], Y[k], eta, kappa, eps, min_width,
                             deg, out, arg, dist)
            if st == DIVERGED:
                return DIVERGED, e, skipped
            if st == NO_ACTIVE:
                missed += 1
        skipped += missed
        if missed == X.shape[0]:
            return STALLED, e, skipped
    return OK, epochs, skipped


@njit(cache=True, nogil=True)
def sugeno_epochs(a, b, c, X, Y, epochs, eta, min_width):
    n, s = a.shape
    w = np.zeros(n)
    out = np.zeros(n)
    mu = np.zeros((n, s))
    skipped = 0
    for e in range(epochs):
        missed = 0
        for k in range(X.shape[0]):
            _, st = sugeno_step(a, b, c, X[k], Y[k], eta, min_width, w, out, mu)
            if st == DIVERGED:
                return DIVERGED, e, skipped
            if st == NO_ACTIVE:
                missed += 1
        skipped += missed
        if missed == X.shape[0]:
            return STALLED, e, skipped
    return OK, epochs, skipped


@njit(cache=True, nogil=True)
def mtp_predict(a, b, c, X, kappa, eps):
    n = a.shape[0]
    deg = np.zeros(n)
    out = np.zeros(n)
    arg = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n)
    res = np.empty(X.shape[0])
    for k in range(X.shape[0]):
        res[k], _ = mtp_forward(a, b, c, X[k], kappa, eps, deg, out, arg, dist)
    return res


@njit(cache=True, nogil=True)
def sugeno_predict(a, b, c, X):
    n, s = a.shape
    w = np.zeros(n)
    out = np.zeros(n)
    mu = np.zeros((n, s))
    res = np.empty(X.shape[0])
    for k in range(X.shape[0]):
        res[k], _ = sugeno_forward(a, b, c, X[k], w, out, mu)
    return res
