"""Adaptive Dormand-Prince 5(4) cores compiled with numba.

Two closely related kernels: `propagate_linear` integrates the piecewise
bilinear system (one constant 9x9 generator per control cell), and
`propagate_feedback` integrates the state-feedback system used by the
implicit Krotov update, where the controls are projections of switching
values evaluated along the trajectory being solved.

Both kernels land exactly on half-cell boundaries (mid and end of every
control cell) so that quadrature and control extraction never interpolate.
"""

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau.  Row 7 of the stage matrix equals the
# 5th-order weights, which gives the FSAL property (last stage of an
# accepted step is the first stage of the next one).
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.zeros((7, 7))
DP_A[1, :1] = (1 / 5,)
DP_A[2, :2] = (3 / 40, 9 / 40)
DP_A[3, :3] = (44 / 45, -56 / 15, 32 / 9)
DP_A[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
DP_A[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
DP_A[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# 5th-order minus embedded 4th-order weights (error estimator).
DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                 -17253 / 339200, 22 / 525, -1 / 40])

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1

# Fraction of a half-cell treated as "already at the boundary"; avoids
# chasing a rounding sliver with ever smaller steps.
_LANDING_TOL = 1e-12
_MIN_STEP_FRAC = 1e-14


@njit(cache=True, nogil=True)
def _matvec9(M, x, out):
    for i in range(9):
        s = 0.0
        for j in range(9):
            s += M[i, j] * x[j]
        out[i] = s


@njit(cache=True, nogil=True)
def propagate_linear(mats, dt_cell, x0, rtol, atol, max_step):
    """Integrate xdot = mats[i] x over N uniform cells of width dt_cell.

    Returns (samples, status, t_fail): samples has shape (2N+1, 9) and holds
    the state at every half-cell boundary; status is STATUS_OK or
    STATUS_STEP_UNDERFLOW (t_fail is then the time of failure).
    """
    N = mats.shape[0]
    out = np.empty((2 * N + 1, 9))
    for j in range(9):
        out[0, j] = x0[j]
    x = x0.copy()
    K = np.empty((7, 9))
    xs = np.empty(9)
    hsub = 0.5 * dt_cell
    h = hsub if hsub < max_step else max_step
    for i in range(N):
        M = mats[i]
        for s in range(2):
            t_loc = 0.0
            _matvec9(M, x, K[0])
            while True:
                rem = hsub - t_loc
                if rem <= _LANDING_TOL * hsub:
                    break
                if h > rem:
                    h = rem
                if h < _MIN_STEP_FRAC * dt_cell:
                    return out, STATUS_STEP_UNDERFLOW, (i + 0.5 * s) * dt_cell + t_loc
                for st in range(1, 7):
                    for a in range(9):
                        acc = 0.0
                        for c in range(st):
                            acc += DP_A[st, c] * K[c, a]
                        xs[a] = x[a] + h * acc
                    _matvec9(M, xs, K[st])
                # xs now holds the 5th-order step result (stage 7 abscissa is 1).
                errsq = 0.0
                for a in range(9):
                    e = 0.0
                    for c in range(7):
                        e += DP_E[c] * K[c, a]
                    e *= h
                    ax = abs(x[a])
                    axn = abs(xs[a])
                    sc = atol + rtol * (ax if ax > axn else axn)
                    q = e / sc
                    errsq += q * q
                err = np.sqrt(errsq / 9.0)
                if err <= 1.0:
                    t_loc += h
                    for a in range(9):
                        x[a] = xs[a]
                        K[0, a] = K[6, a]
                    fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                    h = min(h * fac, max_step)
                else:
                    h = h * max(0.2, 0.9 * err ** -0.2)
            idx = 2 * i + s + 1
            for a in range(9):
                out[idx, a] = x[a]
    return out, STATUS_OK, 0.0


@njit(cache=True, nogil=True)
def _hermite9(t, hsub, nodes, derivs, out):
    # Cubic Hermite evaluation of a half-cell sampled trajectory at time t.
    nseg = derivs.shape[0]
    j = int(t / hsub)
    if j < 0:
        j = 0
    elif j >= nseg:
        j = nseg - 1
    s = t / hsub - j
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    oms = 1.0 - s
    h00 = (1.0 + 2.0 * s) * oms * oms
    h10 = s * oms * oms
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    for a in range(9):
        out[a] = (h00 * nodes[j, a] + h10 * hsub * derivs[j, 0, a]
                  + h01 * nodes[j + 1, a] + h11 * hsub * derivs[j, 1, a])


@njit(cache=True, nogil=True)
def _clip(v, lo, hi):
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


@njit(cache=True, nogil=True)
def _feedback_rhs(t, x, cell, A, Bu, Bn1, Bn2, u_k, n1_k, n2_k,
                  hsub, y_nodes, y_derivs, alpha, u_lo, u_hi, n_hi,
                  y, bux, b1x, b2x, out):
    # Controls: projected (nominal + alpha * switching value at (y(t), x)).
    _hermite9(t, hsub, y_nodes, y_derivs, y)
    _matvec9(Bu, x, bux)
    _matvec9(Bn1, x, b1x)
    _matvec9(Bn2, x, b2x)
    ku = 0.0
    k1 = 0.0
    k2 = 0.0
    for a in range(9):
        ku += y[a] * bux[a]
        k1 += y[a] * b1x[a]
        k2 += y[a] * b2x[a]
    uf = _clip(u_k[cell] + alpha * ku, u_lo, u_hi)
    n1f = _clip(n1_k[cell] + alpha * k1, 0.0, n_hi)
    n2f = _clip(n2_k[cell] + alpha * k2, 0.0, n_hi)
    _matvec9(A, x, out)
    for a in range(9):
        out[a] += uf * bux[a] + n1f * b1x[a] + n2f * b2x[a]
    return uf, n1f, n2f


@njit(cache=True, nogil=True)
def propagate_feedback(A, Bu, Bn1, Bn2, u_k, n1_k, n2_k, dt_cell, x0,
                       y_nodes, y_derivs, alpha, u_lo, u_hi, n_hi,
                       rtol, atol, max_step):
    """Integrate the state-feedback system of the implicit Krotov update.

    Returns (samples, fb, status, t_fail): samples as in propagate_linear;
    fb has shape (N, 3, 3) holding the feedback controls (u, n1, n2) at the
    start, midpoint and end of every cell, evaluated with that cell's
    nominal control.
    """
    N = u_k.shape[0]
    out = np.empty((2 * N + 1, 9))
    fb = np.empty((N, 3, 3))
    for j in range(9):
        out[0, j] = x0[j]
    x = x0.copy()
    K = np.empty((7, 9))
    xs = np.empty(9)
    y = np.empty(9)
    bux = np.empty(9)
    b1x = np.empty(9)
    b2x = np.empty(9)
    scratch = np.empty(9)
    hsub = 0.5 * dt_cell
    h = hsub if hsub < max_step else max_step
    for i in range(N):
        t_cell = i * dt_cell
        uf, n1f, n2f = _feedback_rhs(
            t_cell, x, i, A, Bu, Bn1, Bn2, u_k, n1_k, n2_k, hsub,
            y_nodes, y_derivs, alpha, u_lo, u_hi, n_hi, y, bux, b1x, b2x, K[0])
        fb[i, 0, 0] = uf
        fb[i, 1, 0] = n1f
        fb[i, 2, 0] = n2f
        for s in range(2):
            t_sub = t_cell + s * hsub
            t_loc = 0.0
            if s == 1:
                _feedback_rhs(t_sub, x, i, A, Bu, Bn1, Bn2, u_k, n1_k, n2_k,
                              hsub, y_nodes, y_derivs, alpha, u_lo, u_hi,
                              n_hi, y, bux, b1x, b2x, K[0])
            while True:
                rem = hsub - t_loc
                if rem <= _LANDING_TOL * hsub:
                    break
                if h > rem:
                    h = rem
                if h < _MIN_STEP_FRAC * dt_cell:
                    return out, fb, STATUS_STEP_UNDERFLOW, t_sub + t_loc
                for st in range(1, 7):
                    for a in range(9):
                        acc = 0.0
                        for c in range(st):
                            acc += DP_A[st, c] * K[c, a]
                        xs[a] = x[a] + h * acc
                    _feedback_rhs(t_sub + t_loc + DP_C[st] * h, xs, i,
                                  A, Bu, Bn1, Bn2, u_k, n1_k, n2_k, hsub,
                                  y_nodes, y_derivs, alpha, u_lo, u_hi, n_hi,
                                  y, bux, b1x, b2x, K[st])
                errsq = 0.0
                for a in range(9):
                    e = 0.0
                    for c in range(7):
                        e += DP_E[c] * K[c, a]
                    e *= h
                    ax = abs(x[a])
                    axn = abs(xs[a])
                    sc = atol + rtol * (ax if ax > axn else axn)
                    q = e / sc
                    errsq += q * q
                err = np.sqrt(errsq / 9.0)
                if err <= 1.0:
                    t_loc += h
                    for a in range(9):
                        x[a] = xs[a]
                        K[0, a] = K[6, a]
                    fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                    h = min(h * fac, max_step)
                else:
                    h = h * max(0.2, 0.9 * err ** -0.2)
            # record the feedback controls at the landed sample point
            uf, n1f, n2f = _feedback_rhs(
                t_sub + hsub, x, i, A, Bu, Bn1, Bn2, u_k, n1_k, n2_k, hsub,
                y_nodes, y_derivs, alpha, u_lo, u_hi, n_hi,
                y, bux, b1x, b2x, scratch)
            fb[i, 0, s + 1] = uf
            fb[i, 1, s + 1] = n1f
            fb[i, 2, s + 1] = n2f
            idx = 2 * i + s + 1
            for a in range(9):
                out[idx, a] = x[a]
    return out, fb, STATUS_OK, 0.0
