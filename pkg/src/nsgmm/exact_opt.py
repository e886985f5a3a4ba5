"""Exact global minimization of the nonsmooth GMM criterion.

1-D (location families): between consecutive order statistics of y the
indicator component of the moment average is constant, so the criterion
is a quartic per interval; the scan minimizes every interval exactly.

2-D (IVQR): the criterion is constant on each cell of the arrangement
of lines alpha = y_i - beta * D_i.  ``minimize_ivqr_sweep`` visits every
cell intersecting the parameter box via an ascending-slope sweep with
rank-one criterion updates; ``brute_force_ivqr`` enumerates the same
cells by direct summation slab by slab and serves as the independent
oracle (and as the fallback for degenerate arrangements).
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DataError, DegenerateArrangementError, NsgmmError
from .gmm import GmmFit, WeightMatrix, criterion
from .kernels.numpy_impl import STATUS_DEGENERATE, STATUS_OK
from .moments import Family, MomentSpec, eval_ivqr, eval_location, _HAS_INDICATOR, _HAS_VARIANCE, _HAS_X
from .sampling import Dataset

BRUTE_FORCE_MAX_N = 200


def _weight_array(W) -> np.ndarray:
    mat = W.matrix if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    return np.ascontiguousarray(mat, dtype=float)


def _as_weight(W, dim: int) -> WeightMatrix:
    if isinstance(W, WeightMatrix):
        return W
    from .gmm import WeightKind

    mat = np.asarray(W, dtype=float)
    if mat.shape != (dim, dim):
        raise ValueError(f"weight must be {dim}x{dim}")
    return WeightMatrix(mat, WeightKind.IDENTITY)


def _check_box(box):
    lo, hi = float(box[0]), float(box[1])
    if not lo < hi:
        raise ValueError("parameter box must satisfy lo < hi")
    return lo, hi


# ---------------------------------------------------------------------------
# 1-D location scan
# ---------------------------------------------------------------------------

def _location_coeffs(spec: MomentSpec, data: Dataset, tau: float):
    """Coefficient vectors of g_bar(theta) = c0 + c1 theta + c2 theta^2.

    The indicator component sits at index 0 with value (k/n - tau) on
    interval k; c0 holds its k = 0 value.
    """
    y = data.y
    ybar = float(np.mean(y))
    m2 = float(np.mean(y * y))
    c0, c1, c2 = [], [], []
    ind = -1
    if _HAS_INDICATOR[spec.family]:
        ind = 0
        c0.append(-tau)
        c1.append(0.0)
        c2.append(0.0)
    c0.append(ybar)
    c1.append(-1.0)
    c2.append(0.0)
    if _HAS_VARIANCE[spec.family]:
        c0.append(m2 - 4.0)
        c1.append(-2.0 * ybar)
        c2.append(1.0)
    if _HAS_X[spec.family]:
        xbar = np.mean(data.x, axis=0)
        c0.extend(xbar - (0.5 - tau))
        c1.extend([0.0] * 5)
        c2.extend([0.0] * 5)
    return np.array(c0), np.array(c1), np.array(c2), ind


def minimize_location(
    spec: MomentSpec,
    data: Dataset,
    tau: float,
    W,
    box,
) -> GmmFit:
    """Exact 1-D minimizer of the location GMM criterion over the box."""
    if spec.family is Family.IVQR:
        raise ValueError("spec is not a location family")
    lo, hi = _check_box(box)
    weight = _as_weight(W, spec.moment_dim)
    eval_spec = MomentSpec(spec.family, tau)

    has_ind = _HAS_INDICATOR[spec.family]
    if has_ind:
        y = data.y
        if float(np.min(y)) > hi or float(np.max(y)) < lo:
            raise DataError("parameter box does not intersect the data range")
        ys = np.sort(y)
    else:
        ys = np.empty(0)

    c0, c1, c2, ind = _location_coeffs(spec, data, tau)
    theta, q_poly, k_best, interior, shifted = kernels.location_scan(
        ys, c0, c1, c2, ind, _weight_array(weight), data.n, lo, hi
    )
    if not np.isfinite(theta):
        raise NsgmmError(f"location scan failed in interval {k_best}")

    q_hat = criterion(eval_location(eval_spec, data, theta), weight)
    diagnostics = {
        "interval_index": int(k_best),
        "interior": bool(interior),
        "shifted_from_breakpoint": bool(shifted),
        "n_breakpoints": int(len(ys)),
        "q_poly": float(q_poly),
        "tie_count": 1,
        "event_count": int(len(ys)) + 1,
    }
    return GmmFit(np.array([theta]), q_hat, weight, diagnostics)


# ---------------------------------------------------------------------------
# 2-D arrangement sweep
# ---------------------------------------------------------------------------

def _require_slope_identified(d: np.ndarray) -> None:
    if np.all(d == d[0]):
        raise DataError("slope unidentified: all D_i equal")


def _cell_pattern(data: Dataset, alpha: float, beta: float) -> np.ndarray:
    return data.y <= alpha + beta * data.d


def minimize_ivqr_sweep(
    data: Dataset,
    tau: float,
    W,
    box,
    check_every: int = 0,
) -> GmmFit:
    """Exact IVQR-GMM minimizer via the arrangement sweep.

    Degenerate arrangements (concurrent lines that break the
    adjacent-swap order) fall back to brute_force_ivqr for n <= 200.
    """
    if data.d is None or data.w is None:
        raise DataError("IVQR requires columns y, D, W")
    lo, hi = _check_box(box)
    _require_slope_identified(data.d)
    weight = _as_weight(W, 3)

    y = np.ascontiguousarray(data.y, dtype=float)
    d = np.ascontiguousarray(data.d, dtype=float)
    w = np.ascontiguousarray(data.w, dtype=float)
    (status, q_sweep, beta_star, alpha_star, rank, event_idx, ties, n_swaps) = (
        kernels.ivqr_sweep(y, d, w, _weight_array(weight), tau, lo, hi, check_every)
    )

    if status == STATUS_DEGENERATE:
        return _fallback_to_brute(data, tau, weight, (lo, hi))
    if status != STATUS_OK:
        raise NsgmmError("sweep prefix-sum consistency check failed")

    pattern = _cell_pattern(data, alpha_star, beta_star)
    if int(pattern.sum()) != rank:
        # representative landed on a cell boundary (degenerate geometry)
        return _fallback_to_brute(data, tau, weight, (lo, hi))

    theta = np.array([alpha_star, beta_star])
    q_hat = criterion(eval_ivqr(data, theta, tau), weight)
    diagnostics = {
        "rank": int(rank),
        "prefix_count": int(rank),
        "slope_interval": int(event_idx),
        "tie_count": int(ties),
        "event_count": int(n_swaps),
        "pattern": pattern,
        "q_sweep": float(q_sweep),
        "fallback": False,
    }
    return GmmFit(theta, q_hat, weight, diagnostics)


def _fallback_to_brute(data, tau, weight, box) -> GmmFit:
    if data.n > BRUTE_FORCE_MAX_N:
        raise DegenerateArrangementError(
            "arrangement too degenerate for the sweep and too large for brute force"
        )
    fit = brute_force_ivqr(data, tau, weight, box)
    fit.diagnostics["fallback"] = True
    return fit


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def brute_force_ivqr(
    data: Dataset,
    tau: float,
    W,
    box,
) -> GmmFit:
    """Enumerate every arrangement cell intersecting the box directly.

    Slab boundaries are all critical slopes plus the slopes where a line
    crosses alpha = lo or hi; within a slab every prefix rank whose
    alpha-gap meets [lo, hi] is evaluated by direct summation.  O(n^3),
    capped at n <= 200.
    """
    if data.d is None or data.w is None:
        raise DataError("IVQR requires columns y, D, W")
    if data.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    lo, hi = _check_box(box)
    _require_slope_identified(data.d)
    weight = _as_weight(W, 3)
    Wm = _weight_array(weight)

    y, d, w = data.y, data.d, data.w
    n = data.n
    z = data.instruments()
    zbar = z.mean(axis=0)

    iu, ju = np.triu_indices(n, k=1)
    dd = d[iu] - d[ju]
    nz = dd != 0.0
    slopes = (y[iu[nz]] - y[ju[nz]]) / dd[nz]
    cuts = [slopes[(slopes > lo) & (slopes < hi)]]
    with np.errstate(divide="ignore", invalid="ignore"):
        for bound in (lo, hi):
            cross = np.where(d != 0.0, (y - bound) / d, np.nan)
            cuts.append(cross[(cross > lo) & (cross < hi)])
    cut_points = np.unique(np.concatenate([np.array([lo, hi])] + cuts))

    best_q = np.inf
    best_rank = -1
    best_slab = -1
    best_beta = np.nan
    ties = 0
    n_cells = 0

    for s in range(len(cut_points) - 1):
        beta = 0.5 * (cut_points[s] + cut_points[s + 1])
        c = y - beta * d
        order = np.argsort(c, kind="stable")
        cs = c[order]
        mm = np.empty((n + 1, 3))
        mm[0] = tau * zbar
        mm[1:] = tau * zbar - np.cumsum(z[order], axis=0) / n
        qs = np.einsum("pi,ij,pj->p", mm, Wm, mm)
        L = int(np.searchsorted(cs, lo, side="right"))
        H = int(np.searchsorted(cs, hi, side="right"))
        sub = qs[L : H + 1]
        n_cells += len(sub)
        mn = float(sub.min())
        if mn < best_q:
            best_q = mn
            best_rank = L + int(np.argmin(sub))
            best_slab = s
            best_beta = beta
            ties = int(np.sum(sub == mn))
        elif mn == best_q:
            ties += int(np.sum(sub == best_q))

    cs = np.sort(y - best_beta * d)
    p = best_rank
    c_lo = lo if p == 0 else max(lo, cs[p - 1])
    c_hi = hi if p == n else min(hi, cs[p])
    alpha_star = 0.5 * (c_lo + c_hi)

    pattern = _cell_pattern(data, alpha_star, best_beta)
    if int(pattern.sum()) != p:
        raise NsgmmError("brute-force representative landed on a cell boundary")
    theta = np.array([alpha_star, best_beta])
    q_hat = criterion(eval_ivqr(data, theta, tau), weight)
    diagnostics = {
        "rank": int(p),
        "prefix_count": int(p),
        "slope_interval": int(best_slab),
        "tie_count": int(ties),
        "event_count": int(n_cells),
        "pattern": pattern,
        "q_enumerated": float(best_q),
        "fallback": False,
    }
    return GmmFit(theta, q_hat, weight, diagnostics)
