"""JIT-compiled inner loops for the field solvers.

The invariant update is fused into a single pass per step: upwind transport
of (r, s) with the frozen local speed, exact 2x2 solve of the semi-implicit
damping source, refresh of the sound speed, and the diagnostic reductions
(min/max of the invariant bracket, sup norms of the centered gradients).
All reductions are min/max, so results are independent of iteration order.

The bracket variable used throughout is

    base = eta / eta_coef = 0.5 (s - r) / eta_coef + 1 = u^(-(gamma-1)/2)

from which c = base^q with q = (gamma+1)/(gamma-1) and u = base^(-2/(gamma-1)).
Integer q (gamma = 2, 3, 5/3, 1.4, ...) takes a repeated-multiply fast path.
"""

import numpy as np
from numba import njit

# damping combine modes
A_ZERO, A_TIME, A_SPACE, A_SUM, A_PRODUCT = 0, 1, 2, 3, 4


@njit(cache=True, inline="always")
def _pow_q(base, q, qi):
    if qi > 0:
        out = base
        for _ in range(qi - 1):
            out *= base
        return out
    return base ** q


@njit(cache=True)
def step_kernel(r, s, c, rn, sn, cn, a_mode, a_scalar, a2x,
                dt, dx, inv_eta_coef, q, qi):
    """One upwind step; returns
    (base_min, base_max, max|r_x|, max|s_x|, max|u_x|, max|v_x|, bad)."""
    n = r.shape[0]
    lam = dt / dx
    inv2dx = 0.5 / dx

    # constant-state background boundary (r = s = 0, c = 1)
    rn[0] = 0.0
    sn[0] = 0.0
    cn[0] = 1.0
    rn[n - 1] = 0.0
    sn[n - 1] = 0.0
    cn[n - 1] = 1.0

    base_min = 1.0
    base_max = 1.0
    m_rx = 0.0
    m_sx = 0.0
    m_ux = 0.0
    m_vx = 0.0
    bad = False

    for i in range(1, n - 1):
        ci = c[i]
        nu = lam * ci
        R = r[i] + nu * (r[i + 1] - r[i])
        S = s[i] - nu * (s[i] - s[i - 1])

        if a_mode == A_ZERO:
            ai = 0.0
        elif a_mode == A_TIME:
            ai = a_scalar
        elif a_mode == A_SPACE:
            ai = a2x[i]
        elif a_mode == A_SUM:
            ai = a_scalar + a2x[i]
        else:
            ai = a_scalar * a2x[i]

        beta = 0.5 * dt * ai
        sm = (R + S) / (1.0 + 2.0 * beta)
        df = R - S
        ri = 0.5 * (sm + df)
        si = 0.5 * (sm - df)
        rn[i] = ri
        sn[i] = si

        base = 0.5 * (si - ri) * inv_eta_coef + 1.0
        if base > 0.0:
            cn[i] = _pow_q(base, q, qi)
        else:
            cn[i] = np.nan
            bad = True
        if base < base_min:
            base_min = base
        if base > base_max:
            base_max = base
        if base != base:
            bad = True

        if i >= 2:
            j = i - 1
            rx = (rn[i] - rn[i - 2]) * inv2dx
            sx = (sn[i] - sn[i - 2]) * inv2dx
            arx = abs(rx)
            asx = abs(sx)
            if arx > m_rx:
                m_rx = arx
            if asx > m_sx:
                m_sx = asx
            avx = 0.5 * abs(rx + sx)
            if avx > m_vx:
                m_vx = avx
            aux = abs(rx - sx) / (2.0 * cn[j])
            if aux > m_ux:
                m_ux = aux
            if rx != rx or sx != sx:
                bad = True

    # remaining gradient stencils: centered at n-2, one-sided at the ends
    for pair in range(3):
        if pair == 0:
            j = n - 2
            rx = (rn[n - 1] - rn[n - 3]) * inv2dx
            sx = (sn[n - 1] - sn[n - 3]) * inv2dx
        elif pair == 1:
            j = 0
            rx = (rn[1] - rn[0]) / dx
            sx = (sn[1] - sn[0]) / dx
        else:
            j = n - 1
            rx = (rn[n - 1] - rn[n - 2]) / dx
            sx = (sn[n - 1] - sn[n - 2]) / dx
        arx = abs(rx)
        asx = abs(sx)
        if arx > m_rx:
            m_rx = arx
        if asx > m_sx:
            m_sx = asx
        avx = 0.5 * abs(rx + sx)
        if avx > m_vx:
            m_vx = avx
        aux = abs(rx - sx) / (2.0 * cn[j])
        if aux > m_ux:
            m_ux = aux

    return base_min, base_max, m_rx, m_sx, m_ux, m_vx, bad


@njit(cache=True)
def derive_kernel(r, s, cn, inv_eta_coef, q, qi):
    """Sound speed and diagnostics from given (r, s); same reductions as
    step_kernel but with no evolution (used at t = 0 and for snapshots)."""
    n = r.shape[0]
    base_min = np.inf
    base_max = -np.inf
    bad = False
    for i in range(n):
        base = 0.5 * (s[i] - r[i]) * inv_eta_coef + 1.0
        if base > 0.0:
            cn[i] = _pow_q(base, q, qi)
        else:
            cn[i] = np.nan
            bad = True
        if base < base_min:
            base_min = base
        if base > base_max:
            base_max = base
        if base != base:
            bad = True
    return base_min, base_max, bad


@njit(cache=True)
def gradient_maxima(f, g, dx):
    """(max|f_x|, max|g_x|) with centered interior / one-sided edge stencils."""
    n = f.shape[0]
    inv2dx = 0.5 / dx
    mf = abs(f[1] - f[0]) / dx
    mg = abs(g[1] - g[0]) / dx
    for j in range(1, n - 1):
        vf = abs(f[j + 1] - f[j - 1]) * inv2dx
        vg = abs(g[j + 1] - g[j - 1]) * inv2dx
        if vf > mf:
            mf = vf
        if vg > mg:
            mg = vg
    vf = abs(f[n - 1] - f[n - 2]) / dx
    vg = abs(g[n - 1] - g[n - 2]) / dx
    if vf > mf:
        mf = vf
    if vg > mg:
        mg = vg
    return mf, mg


@njit(cache=True)
def lf_step_kernel(u, v, un, vn, alpha, gamma, dt, dx):
    """Local Lax-Friedrichs (Rusanov) update of the conservative form
        u_t - v_x = 0,   v_t + p(u)_x = 0
    with per-node wave speeds `alpha` = c(u) (the damping source is applied
    outside by Strang splitting).  Boundary nodes are pinned to (1, 0)."""
    n = u.shape[0]
    lam = dt / dx

    un[0] = 1.0
    vn[0] = 0.0
    un[n - 1] = 1.0
    vn[n - 1] = 0.0

    p_im = u[0] ** (-gamma) / gamma
    for i in range(1, n - 1):
        p_i = u[i] ** (-gamma) / gamma
        p_ip = u[i + 1] ** (-gamma) / gamma
        a_l = max(alpha[i - 1], alpha[i])
        a_r = max(alpha[i], alpha[i + 1])
        # F(U) = (-v, p(u))
        fl_u = -0.5 * (v[i - 1] + v[i]) - 0.5 * a_l * (u[i] - u[i - 1])
        fl_v = 0.5 * (p_im + p_i) - 0.5 * a_l * (v[i] - v[i - 1])
        fr_u = -0.5 * (v[i] + v[i + 1]) - 0.5 * a_r * (u[i + 1] - u[i])
        fr_v = 0.5 * (p_i + p_ip) - 0.5 * a_r * (v[i + 1] - v[i])
        un[i] = u[i] - lam * (fr_u - fl_u)
        vn[i] = v[i] - lam * (fr_v - fl_v)
        p_im = p_i
