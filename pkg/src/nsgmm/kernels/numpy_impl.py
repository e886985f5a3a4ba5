"""Pure-numpy reference implementations of the hot kernels.

These mirror the numba kernels line for line (same candidate order,
same tie-breaking) so the two backends pick the same argmin cell; only
floating-point round-off may differ between them.  Event loops are plain
Python here, so this path is the slow one -- it exists as the
no-compilation fallback and as a cross-check target for the benchmark.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_DEGENERATE = 1
STATUS_PREFIX_CHECK_FAILED = 3

_BREAKPOINT_SHIFT = 1e-12


def _cubic_roots(a3, a2, a1, a0, roots):
    """Real roots of a3 x^3 + a2 x^2 + a1 x + a0 (a3 != 0) into roots[:count]."""
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
    # two Newton polish steps on the original cubic
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


def _poly4(q0, q1, q2, q3, q4, x):
    return q0 + x * (q1 + x * (q2 + x * (q3 + x * q4)))


def location_scan(ys, c0, c1, c2, ind, W, n_obs, lo, hi):
    """Scan the order-statistic intervals of ys for the global quartic minimum.

    ys       sorted breakpoints (empty for indicator-free families)
    c0,c1,c2 polynomial coefficient vectors of the moment average in theta,
             with c0[ind] holding the indicator component at count 0 (-tau)
    ind      index of the indicator component, -1 if none
    W        fixed symmetric weight matrix
    n_obs    observation count (indicator steps are k / n_obs)

    Returns (theta, q_poly, k_best, interior_flag, shifted_flag).
    On each interval the indicator count k is constant, so the criterion
    is a quartic; candidates are the interval's left endpoint, interior
    stationary points, and the right one-sided limit at the breakpoint.
    Exact value ties prefer attained candidates over limits, then first
    encountered (ascending k).
    """
    wc0 = W @ c0
    wc1 = W @ c1
    wc2 = W @ c2
    a00 = float(c0 @ wc0)
    a01 = float(c0 @ wc1)
    a02 = float(c0 @ wc2)
    a11 = float(c1 @ wc1)
    a12 = float(c1 @ wc2)
    a22 = float(c2 @ wc2)
    has_var = a22 > 0.0
    if ind >= 0:
        e0 = float(wc0[ind])
        e1 = float(wc1[ind])
        e2 = float(wc2[ind])
        wII = float(W[ind, ind])
    else:
        e0 = e1 = e2 = wII = 0.0

    m = len(ys)
    inv_n = 1.0 / n_obs
    q3 = 2.0 * a12
    q4 = a22

    best_q = math.inf
    best_theta = math.nan
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

        # left endpoint (attained)
        val = _poly4(q0, q1, q2, q3, q4, a)
        if val < best_q or (val == best_q and not best_attained):
            best_q, best_theta, best_k = val, a, k
            best_attained, best_interior, best_left = True, False, a

        # interior stationary points (attained)
        if has_var:
            count = _cubic_roots(4.0 * q4, 3.0 * q3, 2.0 * q2, q1, roots)
        elif q2 > 0.0:
            roots[0] = -q1 / (2.0 * q2)
            count = 1
        else:
            count = 0
        for r in range(count):
            x = roots[r]
            if not (a < x < e) or math.isnan(x):
                continue
            val = _poly4(q0, q1, q2, q3, q4, x)
            if val < best_q or (val == best_q and not best_attained):
                best_q, best_theta, best_k = val, x, k
                best_attained, best_interior, best_left = True, True, a

        # right end: attained at the box edge, one-sided limit at a breakpoint
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
        # the infimum is a left limit at a breakpoint; report a point just
        # inside the interval so the returned theta attains the value
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

    return best_theta, best_q, best_k, 1 if best_interior else 0, shifted


def _quadform3(W, v0, v1, v2):
    return (
        v0 * (W[0, 0] * v0 + W[0, 1] * v1 + W[0, 2] * v2)
        + v1 * (W[1, 0] * v0 + W[1, 1] * v1 + W[1, 2] * v2)
        + v2 * (W[2, 0] * v0 + W[2, 1] * v1 + W[2, 2] * v2)
    )


def ivqr_sweep(y, d, w, W, tau, lo, hi, check_every):
    """Sweep the dual line arrangement of alpha = y_i - beta * D_i.

    For fixed beta the indicator pattern of alpha-cells is a prefix of
    the intercept order, so each criterion value is a prefix moment
    quadratic form.  Crossing one critical slope swaps one adjacent pair
    and changes exactly one prefix, updated via a rank-one identity.
    Horizontal cuts at alpha = lo/hi track which prefix ranks have cells
    intersecting the box.

    Returns (status, best_q, beta_star, alpha_star, best_rank,
    best_event, tie_count, n_swaps).
    """
    n = len(y)
    inv_n = 1.0 / n
    zb1 = float(np.mean(d))
    zb2 = float(np.mean(w))

    # swap events in lexicographic (i, j) order
    iu, ju = np.triu_indices(n, k=1)
    dd = d[iu] - d[ju]
    nz = dd != 0.0
    bet = (y[iu[nz]] - y[ju[nz]]) / dd[nz]
    inside = (bet > lo) & (bet < hi)
    sw_beta = bet[inside]
    sw_i = iu[nz][inside]
    sw_j = ju[nz][inside]
    n_sw = len(sw_beta)

    # boundary events: line i crossing alpha = lo (code 0) or hi (code 1),
    # generated per line with lo before hi
    with np.errstate(divide="ignore", invalid="ignore"):
        bl = np.where(d != 0.0, (y - lo) / d, np.nan)
        bh = np.where(d != 0.0, (y - hi) / d, np.nan)
    cand = np.column_stack([bl, bh])
    codes = np.tile(np.array([0, 1]), (n, 1))
    lines = np.tile(np.arange(n)[:, None], (1, 2))
    keep = (d[:, None] != 0.0) & (cand > lo) & (cand < hi)
    bd_beta = cand[keep]
    bd_code = codes[keep]
    bd_line = lines[keep]

    all_beta = np.concatenate([sw_beta, bd_beta])
    ev_order = np.argsort(all_beta, kind="stable")
    total = len(all_beta)

    # initial intercept order just above beta = lo: sort by (c(lo), -d, index)
    c_at_lo = y - lo * d
    p1 = np.argsort(-d, kind="stable")
    order = p1[np.argsort(c_at_lo[p1], kind="stable")]
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)

    # prefix moments m_p = tau * zbar - S_p / n and their criterion values
    mm = np.empty((n + 1, 3))
    mm[0] = tau * np.array([1.0, zb1, zb2])
    mm[1:, 0] = tau - np.arange(1, n + 1) * inv_n
    mm[1:, 1] = tau * zb1 - np.cumsum(d[order]) * inv_n
    mm[1:, 2] = tau * zb2 - np.cumsum(w[order]) * inv_n
    Q = np.einsum("pi,ij,pj->p", mm, W, mm)

    first_cut = all_beta[ev_order[0]] if total > 0 else hi
    bmid = 0.5 * (lo + first_cut)
    c_mid = y - bmid * d
    L = int(np.sum(c_mid <= lo))
    H = int(np.sum(c_mid <= hi))

    best_q = math.inf
    best_rank = -1
    best_event = -1
    best_slab_lo = lo
    best_slab_hi = first_cut
    ties = 0
    n_swaps = 0

    for p in range(L, H + 1):
        qv = Q[p]
        if qv < best_q:
            best_q, best_rank, ties = qv, p, 1
            best_event, best_slab_lo, best_slab_hi = -1, lo, first_cut
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
            pi_, pj_ = pos[i], pos[j]
            if pi_ > pj_:
                pi_, pj_ = pj_, pi_
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
                    best_q, best_rank, ties = qv, pref, 1
                    best_event, best_slab_lo, best_slab_hi = t, slab_lo, slab_hi
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
                    best_q, best_rank, ties = qv, rank, 1
                    best_event, best_slab_lo, best_slab_hi = t, slab_lo, slab_hi
                elif qv == best_q:
                    ties += 1
        if check_every > 0 and (t + 1) % check_every == 0:
            ref1 = tau * zb1 - np.cumsum(d[order]) * inv_n
            ref2 = tau * zb2 - np.cumsum(w[order]) * inv_n
            if (
                np.max(np.abs(mm[1:, 1] - ref1)) > 1e-9
                or np.max(np.abs(mm[1:, 2] - ref2)) > 1e-9
            ):
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

    return (
        status,
        best_q,
        beta_star,
        alpha_star,
        int(best_rank),
        int(best_event),
        int(ties),
        int(n_swaps),
    )
