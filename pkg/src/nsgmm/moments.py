"""Sample and population moment vectors for the supported families.

Families g1-g4 are location-model moment stacks built from an indicator
component 1(y <= theta) - tau, a mean component y - theta, a variance
component (y - theta)^2 - 4, and five parameter-free components
x_j - (0.5 - tau).  The IVQR family is (tau - 1(y <= a + b*D)) * z with
z = (1, D, W).  The indicator includes the boundary: y == threshold
counts as <=, everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import ndtr

from .errors import DataError
from .sampling import Dataset


class Family(str, Enum):
    G1 = "g1"
    G2 = "g2"
    G3 = "g3"
    G4 = "g4"
    IVQR = "ivqr"


_MOMENT_DIM = {Family.G1: 2, Family.G2: 3, Family.G3: 8, Family.G4: 7, Family.IVQR: 3}

# column layout of each location stack: (has indicator, has x block)
_HAS_INDICATOR = {Family.G1: True, Family.G2: True, Family.G3: True, Family.G4: False}
_HAS_VARIANCE = {Family.G1: False, Family.G2: True, Family.G3: True, Family.G4: True}
_HAS_X = {Family.G1: False, Family.G2: False, Family.G3: True, Family.G4: True}


@dataclass(frozen=True)
class MomentSpec:
    family: Family
    tau: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must be in (0, 1)")

    @property
    def moment_dim(self) -> int:
        return _MOMENT_DIM[self.family]

    @property
    def param_dim(self) -> int:
        return 2 if self.family is Family.IVQR else 1

    @property
    def is_location(self) -> bool:
        return self.family is not Family.IVQR

    @property
    def has_indicator(self) -> bool:
        return self.family is Family.IVQR or _HAS_INDICATOR[self.family]


def _require_location(spec: MomentSpec, data: Dataset) -> None:
    if not spec.is_location:
        raise ValueError("spec is not a location family")
    if _HAS_X[spec.family] and data.x is None:
        raise DataError(f"{spec.family.value} needs columns x1..x5")


# ---------------------------------------------------------------------------
# sample moments
# ---------------------------------------------------------------------------

def moment_matrix_location(spec: MomentSpec, data: Dataset, theta: float) -> np.ndarray:
    """(n, moment_dim) per-observation moments g(X_i, theta)."""
    _require_location(spec, data)
    y = data.y
    cols = []
    if _HAS_INDICATOR[spec.family]:
        cols.append((y <= theta).astype(float) - spec.tau)
    cols.append(y - theta)
    if _HAS_VARIANCE[spec.family]:
        cols.append((y - theta) ** 2 - 4.0)
    out = np.column_stack(cols)
    if _HAS_X[spec.family]:
        out = np.hstack([out, data.x - (0.5 - spec.tau)])
    return out


def eval_location(spec: MomentSpec, data: Dataset, theta: float) -> np.ndarray:
    """Sample moment average g_bar_n(theta) for a location family."""
    return moment_matrix_location(spec, data, theta).mean(axis=0)


def moment_matrix_ivqr(data: Dataset, theta, tau: float) -> np.ndarray:
    alpha, beta = float(theta[0]), float(theta[1])
    z = data.instruments()
    ind = (data.y <= alpha + beta * data.d).astype(float)
    return (tau - ind)[:, None] * z


def eval_ivqr(data: Dataset, theta, tau: float) -> np.ndarray:
    """Sample moment average (1/n) sum (tau - 1(y <= a + b D)) z."""
    return moment_matrix_ivqr(data, theta, tau).mean(axis=0)


def moment_matrix(spec: MomentSpec, data: Dataset, theta) -> np.ndarray:
    if spec.family is Family.IVQR:
        return moment_matrix_ivqr(data, theta, spec.tau)
    return moment_matrix_location(spec, data, np.asarray(theta).reshape(-1)[0])


def eval_moments(spec: MomentSpec, data: Dataset, theta) -> np.ndarray:
    return moment_matrix(spec, data, theta).mean(axis=0)


# ---------------------------------------------------------------------------
# population moments
# ---------------------------------------------------------------------------

def population_location(spec: MomentSpec, theta: float, eps_sd: float = 2.0) -> np.ndarray:
    """Exact population moments under the location DGP (theta0 = 0).

    Components: Phi(theta/eps_sd) - tau; -theta; eps_sd^2 - 4 + theta^2;
    and (tau - 0.5) repeated five times, selected per family.
    """
    if not spec.is_location:
        raise ValueError("spec is not a location family")
    tau = spec.tau
    cols = []
    if _HAS_INDICATOR[spec.family]:
        cols.append(ndtr(theta / eps_sd) - tau)
    cols.append(-theta)
    if _HAS_VARIANCE[spec.family]:
        cols.append(eps_sd**2 - 4.0 + theta**2)
    if _HAS_X[spec.family]:
        cols.extend([tau - 0.5] * 5)
    return np.array(cols)


@dataclass(frozen=True)
class QuadratureRule:
    """Integration rule for the bivariate-normal expectation in population_ivqr."""

    kind: str = "gauss-hermite"
    nodes: int = 64
    mc_draws: int = 1_000_000
    mc_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gauss-hermite", "monte-carlo"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")


DEFAULT_QUADRATURE = QuadratureRule()

# (D, W) = CHOL @ (s, t) with s, t iid standard normal reproduces
# var 1, cov 0.5
_DW_CHOL = np.array([[1.0, 0.0], [0.5, np.sqrt(0.75)]])


def _dw_nodes(rule: QuadratureRule):
    """Quadrature nodes/weights for (D, W) under the IVQR design."""
    if rule.kind == "gauss-hermite":
        x, w = np.polynomial.hermite.hermgauss(rule.nodes)
        s = np.sqrt(2.0) * x
        weights = np.outer(w, w).ravel() / np.pi
        grid = np.array(np.meshgrid(s, s, indexing="ij")).reshape(2, -1)
    else:
        rng = np.random.Generator(np.random.PCG64(rule.mc_seed))
        grid = rng.standard_normal((2, rule.mc_draws))
        weights = np.full(rule.mc_draws, 1.0 / rule.mc_draws)
    dw = _DW_CHOL @ grid
    return dw[0], dw[1], weights


def population_ivqr(
    theta,
    delta: float,
    tau: float = 0.5,
    rule: QuadratureRule = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """pi(theta) = E[(tau - Phi(arg)) z] for the IVQR design.

    arg = (a - 1 + (b - 1) D + (2/3 D - 4/3 W) delta) / sqrt(1 - 4/3 delta^2).
    """
    if abs(delta) >= np.sqrt(0.75):
        raise ValueError("degenerate covariance: |delta| must be < sqrt(0.75)")
    alpha, beta = float(theta[0]), float(theta[1])
    d, w, weights = _dw_nodes(rule)
    sd = np.sqrt(1.0 - (4.0 / 3.0) * delta**2)
    arg = (alpha - 1.0 + (beta - 1.0) * d + (2.0 / 3.0 * d - 4.0 / 3.0 * w) * delta) / sd
    core = tau - ndtr(arg)
    return np.array([
        np.sum(weights * core),
        np.sum(weights * core * d),
        np.sum(weights * core * w),
    ])
