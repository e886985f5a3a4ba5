"""Weight matrices, the GMM criterion, and the one-/two-step pipelines.

All weights are fixed during optimization; the two-step pipeline builds
the efficient weight at the preliminary estimate and then re-optimizes
exactly under that fixed matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DataError, WeightSingularError
from .moments import Family, MomentSpec, eval_moments, moment_matrix
from .sampling import Dataset

DEFAULT_BOX = (-10.0, 10.0)

# condition-number limits for weight targets: beyond REPAIR the inverse is
# ridge-stabilized (and flagged), beyond SINGULAR the target is rejected
_COND_REPAIR = 1e12
_COND_SINGULAR = 1e14


class WeightKind(str, Enum):
    IDENTITY = "identity"
    INSTRUMENT_OUTER = "instrument"
    TAU_SCALED = "tau-scaled"
    EFFICIENT = "efficient"


@dataclass(frozen=True)
class WeightScheme:
    kind: WeightKind
    ridge_epsilon: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if self.ridge_epsilon < 0:
            raise ValueError("ridge_epsilon must be non-negative")


@dataclass
class WeightMatrix:
    matrix: np.ndarray
    kind: WeightKind
    ridged: bool = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class GmmFit:
    theta_hat: np.ndarray
    q_hat: float
    weight: WeightMatrix
    diagnostics: dict = field(default_factory=dict)
    preliminary: Optional["GmmFit"] = None


def invert_spd(target: np.ndarray, ridge_epsilon: float = 1e-10,
               preliminary: Optional[GmmFit] = None) -> tuple[np.ndarray, bool]:
    """Invert a symmetric PSD weight target with ridge repair.

    Raises WeightSingularError when the target's condition number exceeds
    1e14 (including exact rank deficiency); applies a flagged ridge
    eps * (trace/dim) * I when it exceeds 1e12.
    """
    target = np.asarray(target, dtype=float)
    target = 0.5 * (target + target.T)
    dim = target.shape[0]
    eigs = np.linalg.eigvalsh(target)
    emax = eigs[-1]
    if emax <= 0:
        raise WeightSingularError("weight singular", preliminary=preliminary)
    cond = np.inf if eigs[0] <= 0 else emax / eigs[0]
    if cond > _COND_SINGULAR:
        raise WeightSingularError("weight singular", preliminary=preliminary)
    ridged = False
    if cond > _COND_REPAIR:
        target = target + ridge_epsilon * (np.trace(target) / dim) * np.eye(dim)
        ridged = True
    inv = cho_solve(cho_factor(target, lower=True), np.eye(dim))
    return 0.5 * (inv + inv.T), ridged


def build_weight(
    scheme: WeightScheme,
    spec: MomentSpec,
    data: Dataset,
    prelim=None,
) -> WeightMatrix:
    """Realize a weight scheme on a dataset.

    identity          I_{moment_dim}
    instrument        (n^-1 sum z z')^-1
    tau-scaled        [tau (1-tau) n^-1 sum z z']^-1
    efficient         [n^-1 sum g(X_i, prelim) g(X_i, prelim)']^-1
    """
    kind = scheme.kind
    if kind is WeightKind.IDENTITY:
        return WeightMatrix(np.eye(spec.moment_dim), kind)
    if kind in (WeightKind.INSTRUMENT_OUTER, WeightKind.TAU_SCALED):
        if spec.family is not Family.IVQR:
            raise DataError("instrument weight schemes require instrument columns")
        z = data.instruments()
        target = z.T @ z / data.n
        if kind is WeightKind.TAU_SCALED:
            target = spec.tau * (1.0 - spec.tau) * target
        matrix, ridged = invert_spd(target, scheme.ridge_epsilon)
        return WeightMatrix(matrix, kind, ridged)
    if kind is WeightKind.EFFICIENT:
        if prelim is None:
            raise ValueError("efficient weight requires a preliminary estimate")
        g = moment_matrix(spec, data, prelim)
        target = g.T @ g / data.n
        matrix, ridged = invert_spd(target, scheme.ridge_epsilon)
        return WeightMatrix(matrix, kind, ridged)
    raise ValueError(f"unknown weight kind {kind!r}")


def criterion(gbar: np.ndarray, W) -> float:
    """Quadratic form g' W g; the GMM objective at a moment average."""
    gbar = np.asarray(gbar, dtype=float)
    mat = W.matrix if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    if mat.shape != (gbar.size, gbar.size):
        raise ValueError(
            f"dimension mismatch: moments {gbar.size}, weight {mat.shape}"
        )
    return float(gbar @ mat @ gbar)


def fit_one_step(
    spec: MomentSpec,
    data: Dataset,
    scheme: WeightScheme,
    box=DEFAULT_BOX,
) -> GmmFit:
    """Exact one-step GMM under a fixed weight scheme."""
    from . import exact_opt

    if scheme.kind is WeightKind.EFFICIENT:
        raise ValueError("one-step GMM requires a parameter-free weight scheme")
    weight = build_weight(scheme, spec, data)
    if spec.family is Family.IVQR:
        return exact_opt.minimize_ivqr_sweep(data, spec.tau, weight, box)
    return exact_opt.minimize_location(spec, data, spec.tau, weight, box)


def fit_two_step(
    spec: MomentSpec,
    data: Dataset,
    first_scheme: WeightScheme,
    box=DEFAULT_BOX,
) -> GmmFit:
    """Two-step efficient GMM: re-optimize under the weight built at step one."""
    from . import exact_opt

    fit1 = fit_one_step(spec, data, first_scheme, box)
    try:
        weight2 = build_weight(
            WeightScheme(WeightKind.EFFICIENT, first_scheme.ridge_epsilon),
            spec,
            data,
            prelim=fit1.theta_hat,
        )
    except WeightSingularError as exc:
        raise WeightSingularError(str(exc), preliminary=fit1) from exc
    if spec.family is Family.IVQR:
        fit2 = exact_opt.minimize_ivqr_sweep(data, spec.tau, weight2, box)
    else:
        fit2 = exact_opt.minimize_location(spec, data, spec.tau, weight2, box)
    fit2.preliminary = fit1
    return fit2


def check_fit(spec: MomentSpec, data: Dataset, fit: GmmFit) -> float:
    """Independent re-evaluation of the criterion at the fitted point."""
    return criterion(eval_moments(spec, data, fit.theta_hat), fit.weight)
