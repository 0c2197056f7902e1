"""Numerical kernels, optionally JIT-compiled with numba.

Set P3ELLIPTIC_NO_NUMBA=1 to force the pure-numpy/python fallback path.
``benchmarks/benchmark_kernels.py`` compares both.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("P3ELLIPTIC_NO_NUMBA", "0") != "1"
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:
    def _jit(f):
        return numba.njit(cache=True)(f)
else:
    def _jit(f):
        return f


# ---------------------------------------------------------------------------
# branch tracking for w = sqrt(P(lam)) along sampled paths
# ---------------------------------------------------------------------------

def _track_sqrt_impl(vals, w0):
    """Assign sqrt branches continuously along a sampled path.

    vals are P(lam) samples; w0 anchors the branch at the first sample.
    Returns the tracked w array and 1 if every step was unambiguous.
    """
    n = vals.shape[0]
    w = np.empty(n, dtype=np.complex128)
    ok = 1
    prev = w0
    for i in range(n):
        wi = np.sqrt(vals[i])
        if abs(wi - prev) > abs(wi + prev):
            wi = -wi
        if abs(wi - prev) > 0.5 * abs(prev) + 1e-300:
            ok = 0
        w[i] = wi
        prev = wi
    return w, ok


track_sqrt = _jit(_track_sqrt_impl)


def _match_sqrt_impl(vals, wref):
    """Pick sqrt branches of vals closest to the reference values wref."""
    n = vals.shape[0]
    w = np.empty(n, dtype=np.complex128)
    for i in range(n):
        wi = np.sqrt(vals[i])
        if abs(wi - wref[i]) > abs(wi + wref[i]):
            wi = -wi
        w[i] = wi
    return w


match_sqrt = _jit(_match_sqrt_impl)


# ---------------------------------------------------------------------------
# Dormand-Prince 4(5) coefficients
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_DP_A = np.array([
    [0.0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784,
                   11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


# ---------------------------------------------------------------------------
# lambda-system  dY/dlam = (t/4) B(t, lam) Y, integrated in l = log(lam)
# ---------------------------------------------------------------------------

def _linsys_rhs_impl(lam, y, t, eiphi, yy, zeta, th0, thinf):
    """(t/4) * B(t, lam) * Y with Y = (y11, y12, y21, y22)."""
    gamma = (-yy * (2 * zeta / t - eiphi) + 0.5 * eiphi * th0 / zeta
             - 0.5 * thinf * (4 * zeta / t - eiphi) / zeta)
    il = 1.0 / lam
    il2 = il * il
    b1 = (gamma - 2 * yy * zeta / t) * il + 1j * eiphi * il2
    b2 = -1j * (gamma + 2 * yy * zeta / t) * il - (4 * zeta / t - eiphi) * il2
    b3 = 1j * eiphi - (2 * thinf / t) * il - 1j * (4 * zeta / t - eiphi) * il2
    m11 = b3
    m12 = b1 - 1j * b2
    m21 = b1 + 1j * b2
    c = 0.25 * t
    out = np.empty(4, dtype=np.complex128)
    out[0] = c * (m11 * y[0] + m12 * y[2])
    out[1] = c * (m11 * y[1] + m12 * y[3])
    out[2] = c * (m21 * y[0] - m11 * y[2])
    out[3] = c * (m21 * y[1] - m11 * y[3])
    return out


linsys_rhs = _jit(_linsys_rhs_impl)


def _rk45_linsys_impl(l0, l1, y0, t, eiphi, yy, zeta, th0, thinf,
                      rtol, atol, max_steps):
    """Integrate the lambda-system along the straight log-lambda segment.

    Returns (y, status); status 0 on success, 1 on step-size underflow or
    step-count overflow.
    """
    y = y0.copy()
    dl = l1 - l0
    length = abs(dl)
    if length == 0.0:
        return y, 0
    direction = dl / length
    s = 0.0
    h = min(0.05, length)
    nst = 0
    k = np.empty((7, 4), dtype=np.complex128)
    while s < length:
        if h > length - s:
            h = length - s
        for i in range(6):
            yi = y.copy()
            for j in range(i):
                aij = _DP_A[i, j]
                if aij != 0.0:
                    for m in range(4):
                        yi[m] += h * aij * k[j, m]
            lam = np.exp(l0 + (s + _DP_C[i] * h) * direction)
            ki = linsys_rhs(lam, yi, t, eiphi, yy, zeta, th0, thinf)
            for m in range(4):
                k[i, m] = direction * lam * ki[m]
        y5 = y.copy()
        for j in range(6):
            bj = _DP_B5[j]
            if bj != 0.0:
                for m in range(4):
                    y5[m] += h * bj * k[j, m]
        lam = np.exp(l0 + (s + h) * direction)
        ki = linsys_rhs(lam, y5, t, eiphi, yy, zeta, th0, thinf)
        for m in range(4):
            k[6, m] = direction * lam * ki[m]
        err = 0.0
        for m in range(4):
            e4 = 0.0 + 0.0j
            for j in range(7):
                e4 += h * (_DP_B5[j] - _DP_B4[j]) * k[j, m]
            sc = atol + rtol * max(abs(y[m]), abs(y5[m]))
            e = abs(e4) / sc
            if e > err:
                err = e
        if err <= 1.0:
            s += h
            y = y5
        nst += 1
        if nst > max_steps:
            return y, 1
        fac = 0.9 * err ** -0.2 if err > 0 else 5.0
        if fac > 5.0:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        h *= fac
        if h < 1e-13 * length:
            return y, 1
    return y, 0


rk45_linsys = _jit(_rk45_linsys_impl)


# ---------------------------------------------------------------------------
# Painleve III flow  (y, zeta, log v) along straight segments in complex t
# ---------------------------------------------------------------------------

def _piii_rhs_impl(t, yy, zeta, lv, eiphi, th0, thinf):
    dy = (4 * zeta * yy * yy - eiphi * t * yy * yy + (2 * thinf - 1) * yy
          + eiphi * t) / t
    dz = (-4 * yy * zeta * zeta + (2 * eiphi * t * yy + 1 - 2 * thinf) * zeta
          + 0.5 * (th0 + thinf) * eiphi * t) / t
    dlv = (-(th0 + thinf) * (0.5 * eiphi * t) / zeta - eiphi * t * yy
           + thinf) / t
    out = np.empty(3, dtype=np.complex128)
    out[0] = dy
    out[1] = dz
    out[2] = dlv
    return out


piii_rhs_kernel = _jit(_piii_rhs_impl)


def _rk45_piii_impl(t0, t1, state0, eiphi, th0, thinf, rtol, atol,
                    pole_threshold, max_steps):
    """Integrate the Painleve flow along the straight segment t0 -> t1.

    state = (y, zeta, log v).  Returns (state, t_reached, status):
    status 0 = done, 1 = step failure, 2 = |y| exceeded pole_threshold
    (caller should detour around the pole).
    """
    st = state0.copy()
    dt = t1 - t0
    length = abs(dt)
    if length == 0.0:
        return st, t0, 0
    direction = dt / length
    s = 0.0
    h = min(0.02 * length, 0.1)
    nst = 0
    k = np.empty((7, 3), dtype=np.complex128)
    while s < length:
        if h > length - s:
            h = length - s
        bad = False
        for i in range(6):
            yi = st.copy()
            for j in range(i):
                aij = _DP_A[i, j]
                if aij != 0.0:
                    for m in range(3):
                        yi[m] += h * aij * k[j, m]
            if abs(yi[0]) > 1e14 or abs(yi[1]) > 1e14:
                bad = True
                break
            t = t0 + (s + _DP_C[i] * h) * direction
            ki = piii_rhs_kernel(t, yi[0], yi[1], yi[2], eiphi, th0, thinf)
            for m in range(3):
                k[i, m] = direction * ki[m]
        if bad:
            return st, t0 + s * direction, 2
        y5 = st.copy()
        for j in range(6):
            bj = _DP_B5[j]
            if bj != 0.0:
                for m in range(3):
                    y5[m] += h * bj * k[j, m]
        t = t0 + (s + h) * direction
        ki = piii_rhs_kernel(t, y5[0], y5[1], y5[2], eiphi, th0, thinf)
        for m in range(3):
            k[6, m] = direction * ki[m]
        err = 0.0
        for m in range(3):
            e4 = 0.0 + 0.0j
            for j in range(7):
                e4 += h * (_DP_B5[j] - _DP_B4[j]) * k[j, m]
            sc = atol + rtol * max(abs(st[m]), abs(y5[m]))
            e = abs(e4) / sc
            if e > err:
                err = e
        if err <= 1.0:
            s += h
            st = y5
            if abs(st[0]) > pole_threshold:
                return st, t0 + s * direction, 2
        nst += 1
        if nst > max_steps:
            return st, t0 + s * direction, 1
        fac = 0.9 * err ** -0.2 if err > 0 else 5.0
        if fac > 5.0:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        h *= fac
        if h < 1e-14 * length:
            return st, t0 + s * direction, 1
    return st, t1, 0


rk45_piii = _jit(_rk45_piii_impl)
