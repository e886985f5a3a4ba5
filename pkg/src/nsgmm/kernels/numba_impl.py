"""Numba @njit kernels; semantics match kernels.numpy_impl exactly.

Candidate ordering and tie-breaking are kept identical to the numpy
reference so both backends select the same argmin cell.  Kernels are
nogil so the Monte Carlo thread pool gets real parallelism, and cached
so compilation happens once per build.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_DEGENERATE = 1
STATUS_PREFIX_CHECK_FAILED = 3

_BREAKPOINT_SHIFT = 1e-12

_JIT = dict(cache=True, nogil=True, error_model="numpy", fastmath=False)


@njit(**_JIT)
def _cubic_roots(a3, a2, a1, a0, roots):
    p = a2 / a3
    q = a1 / a3
    r = a0 / a3
    pp = q - p * p / 3.0
    qq = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r
    shift = -p / 3.0
    half = qq / 2.0
    disc = half * half + (pp / 3.0) ** 3
    if disc > 0.0:
        s = math.sqrt(disc)
        t = np.cbrt(-half + s) + np.cbrt(-half - s)
        roots[0] = t + shift
        count = 1
    else:
        mneg = -pp / 3.0
        if mneg < 0.0:
            mneg = 0.0
        msqrt = math.sqrt(mneg)
        if msqrt == 0.0:
            roots[0] = shift
            count = 1
        else:
            arg = 3.0 * qq / (pp * 2.0 * msqrt)
            if arg > 1.0:
                arg = 1.0
            elif arg < -1.0:
                arg = -1.0
            base = math.acos(arg) / 3.0
            for k in range(3):
                roots[k] = 2.0 * msqrt * math.cos(base - 2.0 * math.pi * k / 3.0) + shift
            count = 3
    for i in range(count):
        x = roots[i]
        for _ in range(2):
            f = ((a3 * x + a2) * x + a1) * x + a0
            fp = (3.0 * a3 * x + 2.0 * a2) * x + a1
            if fp != 0.0:
                x -= f / fp
        roots[i] = x
    if count == 3:
        roots[:3].sort()
    return count


@njit(**_JIT)
def _poly4(q0, q1, q2, q3, q4, x):
    return q0 + x * (q1 + x * (q2 + x * (q3 + x * q4)))


@njit(**_JIT)
def location_scan(ys, c0, c1, c2, ind, W, n_obs, lo, hi):
    wc0 = W @ c0
    wc1 = W @ c1
    wc2 = W @ c2
    a00 = c0 @ wc0
    a01 = c0 @ wc1
    a02 = c0 @ wc2
    a11 = c1 @ wc1
    a12 = c1 @ wc2
    a22 = c2 @ wc2
    has_var = a22 > 0.0
    if ind >= 0:
        e0 = wc0[ind]
        e1 = wc1[ind]
        e2 = wc2[ind]
        wII = W[ind, ind]
    else:
        e0 = 0.0
        e1 = 0.0
        e2 = 0.0
        wII = 0.0

    m = ys.shape[0]
    inv_n = 1.0 / n_obs
    q3 = 2.0 * a12
    q4 = a22

    best_q = np.inf
    best_theta = np.nan
    best_k = -1
    best_attained = False
    best_interior = False
    best_left = lo
    roots = np.empty(3)

    for k in range(m + 1):
        a = lo if k == 0 else max(ys[k - 1], lo)
        if a > hi:
            break
        if k < m and a >= ys[k]:
            continue
        t = k * inv_n
        q0 = a00 + t * (2.0 * e0 + t * wII)
        q1 = 2.0 * (a01 + t * e1)
        q2 = 2.0 * (a02 + t * e2) + a11
        e = min(ys[k], hi) if k < m else hi

        val = _poly4(q0, q1, q2, q3, q4, a)
        if val < best_q or (val == best_q and not best_attained):
            best_q, best_theta, best_k = val, a, k
            best_attained, best_interior, best_left = True, False, a

        if has_var:
            count = _cubic_roots(4.0 * q4, 3.0 * q3, 2.0 * q2, q1, roots)
        elif q2 > 0.0:
            roots[0] = -q1 / (2.0 * q2)
            count = 1
        else:
            count = 0
        for r in range(count):
            x = roots[r]
            if math.isnan(x) or not (a < x < e):
                continue
            val = _poly4(q0, q1, q2, q3, q4, x)
            if val < best_q or (val == best_q and not best_attained):
                best_q, best_theta, best_k = val, x, k
                best_attained, best_interior, best_left = True, True, a

        if k == m or ys[k] > hi:
            if hi > a:
                val = _poly4(q0, q1, q2, q3, q4, hi)
                if val < best_q or (val == best_q and not best_attained):
                    best_q, best_theta, best_k = val, hi, k
                    best_attained, best_interior, best_left = True, False, a
        else:
            val = _poly4(q0, q1, q2, q3, q4, ys[k])
            if val < best_q:
                best_q, best_theta, best_k = val, ys[k], k
                best_attained, best_interior, best_left = False, False, a

    shifted = 0
    if not best_attained:
        shift = _BREAKPOINT_SHIFT * max(1.0, abs(best_theta))
        width = best_theta - best_left
        if shift > 0.5 * width:
            shift = 0.5 * width
        theta = best_theta - shift
        while theta >= best_theta:
            theta = np.nextafter(theta, best_left)
        t = best_k * inv_n
        q0 = a00 + t * (2.0 * e0 + t * wII)
        q1 = 2.0 * (a01 + t * e1)
        q2 = 2.0 * (a02 + t * e2) + a11
        best_theta = theta
        best_q = _poly4(q0, q1, q2, q3, q4, theta)
        shifted = 1

    interior_flag = 1 if best_interior else 0
    return best_theta, best_q, best_k, interior_flag, shifted


@njit(**_JIT)
def ivqr_sweep(y, d, w, W, tau, lo, hi, check_every):
    n = y.shape[0]
    inv_n = 1.0 / n
    sum_d = 0.0
    sum_w = 0.0
    for i in range(n):
        sum_d += d[i]
        sum_w += w[i]
    zb1 = sum_d / n
    zb2 = sum_w / n

    # swap events in lexicographic (i, j) order
    n_sw = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dd = d[i] - d[j]
            if dd != 0.0:
                b = (y[i] - y[j]) / dd
                if lo < b < hi:
                    n_sw += 1
    sw_beta = np.empty(n_sw)
    sw_i = np.empty(n_sw, np.int64)
    sw_j = np.empty(n_sw, np.int64)
    k = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dd = d[i] - d[j]
            if dd != 0.0:
                b = (y[i] - y[j]) / dd
                if lo < b < hi:
                    sw_beta[k] = b
                    sw_i[k] = i
                    sw_j[k] = j
                    k += 1

    # boundary events per line, alpha = lo before alpha = hi
    n_bd = 0
    for i in range(n):
        if d[i] != 0.0:
            bl = (y[i] - lo) / d[i]
            if lo < bl < hi:
                n_bd += 1
            bh = (y[i] - hi) / d[i]
            if lo < bh < hi:
                n_bd += 1
    bd_beta = np.empty(n_bd)
    bd_line = np.empty(n_bd, np.int64)
    bd_code = np.empty(n_bd, np.int64)
    k = 0
    for i in range(n):
        if d[i] != 0.0:
            bl = (y[i] - lo) / d[i]
            if lo < bl < hi:
                bd_beta[k] = bl
                bd_line[k] = i
                bd_code[k] = 0
                k += 1
            bh = (y[i] - hi) / d[i]
            if lo < bh < hi:
                bd_beta[k] = bh
                bd_line[k] = i
                bd_code[k] = 1
                k += 1

    total = n_sw + n_bd
    all_beta = np.empty(total)
    all_beta[:n_sw] = sw_beta
    all_beta[n_sw:] = bd_beta
    ev_order = np.argsort(all_beta, kind="mergesort")

    # initial intercept order just above beta = lo: (c(lo), -d, index)
    c_at_lo = y - lo * d
    p1 = np.argsort(-d, kind="mergesort")
    order = p1[np.argsort(c_at_lo[p1], kind="mergesort")]
    pos = np.empty(n, np.int64)
    for r in range(n):
        pos[order[r]] = r

    mm = np.empty((n + 1, 3))
    mm[0, 0] = tau
    mm[0, 1] = tau * zb1
    mm[0, 2] = tau * zb2
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for p in range(1, n + 1):
        idx = order[p - 1]
        s0 += 1.0
        s1 += d[idx]
        s2 += w[idx]
        mm[p, 0] = tau - s0 * inv_n
        mm[p, 1] = tau * zb1 - s1 * inv_n
        mm[p, 2] = tau * zb2 - s2 * inv_n
    Q = np.empty(n + 1)
    for p in range(n + 1):
        v0 = mm[p, 0]
        v1 = mm[p, 1]
        v2 = mm[p, 2]
        Q[p] = (
            v0 * (W[0, 0] * v0 + W[0, 1] * v1 + W[0, 2] * v2)
            + v1 * (W[1, 0] * v0 + W[1, 1] * v1 + W[1, 2] * v2)
            + v2 * (W[2, 0] * v0 + W[2, 1] * v1 + W[2, 2] * v2)
        )

    first_cut = all_beta[ev_order[0]] if total > 0 else hi
    bmid = 0.5 * (lo + first_cut)
    L = 0
    H = 0
    for i in range(n):
        ci = y[i] - bmid * d[i]
        if ci <= lo:
            L += 1
        if ci <= hi:
            H += 1

    best_q = np.inf
    best_rank = -1
    best_event = -1
    best_slab_lo = lo
    best_slab_hi = first_cut
    ties = 0
    n_swaps = 0

    for p in range(L, H + 1):
        qv = Q[p]
        if qv < best_q:
            best_q = qv
            best_rank = p
            ties = 1
            best_event = -1
            best_slab_lo = lo
            best_slab_hi = first_cut
        elif qv == best_q:
            ties += 1

    status = STATUS_OK
    for t in range(total):
        e = ev_order[t]
        slab_lo = all_beta[e]
        slab_hi = all_beta[ev_order[t + 1]] if t + 1 < total else hi
        if e < n_sw:
            i = sw_i[e]
            j = sw_j[e]
            pi_ = pos[i]
            pj_ = pos[j]
            if pi_ > pj_:
                tmp = pi_
                pi_ = pj_
                pj_ = tmp
            if pj_ - pi_ != 1:
                status = STATUS_DEGENERATE
                break
            a = order[pi_]
            b = order[pj_]
            order[pi_] = b
            order[pj_] = a
            pos[a] = pj_
            pos[b] = pi_
            pref = pi_ + 1
            d1 = (d[a] - d[b]) * inv_n
            d2 = (w[a] - w[b]) * inv_n
            u0 = W[0, 1] * d1 + W[0, 2] * d2
            u1 = W[1, 1] * d1 + W[1, 2] * d2
            u2 = W[2, 1] * d1 + W[2, 2] * d2
            dq = 2.0 * (u0 * mm[pref, 0] + u1 * mm[pref, 1] + u2 * mm[pref, 2]) + (
                u1 * d1 + u2 * d2
            )
            mm[pref, 1] += d1
            mm[pref, 2] += d2
            Q[pref] += dq
            n_swaps += 1
            if L <= pref <= H:
                qv = Q[pref]
                if qv < best_q:
                    best_q = qv
                    best_rank = pref
                    ties = 1
                    best_event = t
                    best_slab_lo = slab_lo
                    best_slab_hi = slab_hi
                elif qv == best_q:
                    ties += 1
        else:
            be = e - n_sw
            step = 1 if d[bd_line[be]] > 0.0 else -1
            if bd_code[be] == 0:
                L += step
                grew = step == -1
                rank = L
            else:
                H += step
                grew = step == 1
                rank = H
            if grew:
                qv = Q[rank]
                if qv < best_q:
                    best_q = qv
                    best_rank = rank
                    ties = 1
                    best_event = t
                    best_slab_lo = slab_lo
                    best_slab_hi = slab_hi
                elif qv == best_q:
                    ties += 1
        if check_every > 0 and (t + 1) % check_every == 0:
            s1 = 0.0
            s2 = 0.0
            ok = True
            for p in range(1, n + 1):
                idx = order[p - 1]
                s1 += d[idx]
                s2 += w[idx]
                if (
                    abs(mm[p, 1] - (tau * zb1 - s1 * inv_n)) > 1e-9
                    or abs(mm[p, 2] - (tau * zb2 - s2 * inv_n)) > 1e-9
                ):
                    ok = False
                    break
            if not ok:
                status = STATUS_PREFIX_CHECK_FAILED
                break

    beta_a = max(best_slab_lo, lo)
    beta_b = min(best_slab_hi, hi)
    beta_star = 0.5 * (beta_a + beta_b)
    cs = np.sort(y - beta_star * d)
    p = best_rank
    c_lo = lo if p == 0 else max(lo, cs[p - 1])
    c_hi = hi if p == n else min(hi, cs[p])
    alpha_star = 0.5 * (c_lo + c_hi)

    return status, best_q, beta_star, alpha_star, best_rank, best_event, ties, n_swaps
