"""Seeded data generation for the location and IV-quantile designs.

All randomness flows through :class:`SeedSpec`, which maps
(base_seed, scenario_id, replication_index) to an independent PCG64
stream via a SHA-256 hash, so replications can run in any order (or in
parallel) and still reproduce bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CovarianceError, DataError

RNG_ID = "pcg64:sha256-stream"

# joint covariance of (eps, x1..x5) used by the g3/g4 designs: symmetric
# Toeplitz with first row (1, .5, .4, .3, .2, .1)
_LOC_TOEPLITZ_ROW = (1.0, 0.5, 0.4, 0.3, 0.2, 0.1)

LOCATION_JOINT_COV = np.array(
    [[_LOC_TOEPLITZ_ROW[abs(i - j)] for j in range(6)] for i in range(6)]
)

DEFAULT_EPS_SD = 2.0
IVQR_DELTA_LIMIT = math.sqrt(0.75)


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeedSpec:
    """Derives one independent RNG stream per (seed, scenario, replication)."""

    base_seed: int
    scenario_id: str = ""
    replication_index: int = 0

    def __post_init__(self):
        if self.replication_index < 0:
            raise ValueError("replication_index must be non-negative")

    def stream_seed(self) -> int:
        key = f"{self.base_seed}|{self.scenario_id}|{self.replication_index}"
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.stream_seed()))


# ---------------------------------------------------------------------------
# covariance handling
# ---------------------------------------------------------------------------

def check_covariance(sigma: np.ndarray) -> np.ndarray:
    """Validate a covariance matrix (symmetry, PSD, positive diagonal)."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise CovarianceError("covariance must be a square matrix")
    if not np.all(np.abs(sigma - sigma.T) <= 1e-12):
        raise CovarianceError("covariance not symmetric within 1e-12")
    if np.any(np.diag(sigma) <= 0):
        raise CovarianceError("covariance diagonal entries must be positive")
    eigs = np.linalg.eigvalsh(sigma)
    if eigs[0] < -1e-10 * np.trace(sigma):
        raise CovarianceError("covariance not positive semidefinite")
    return sigma


def psd_cholesky(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T == sigma, tolerating PSD-singular input."""
    sigma = check_covariance(sigma)
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        pass
    # semidefinite case: outer-product Cholesky with zero-pivot skipping
    dim = sigma.shape[0]
    L = np.zeros((dim, dim))
    tol = 1e-12 * max(1.0, np.trace(sigma))
    for j in range(dim):
        pivot = sigma[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= tol:
            L[j, j] = 0.0
            continue
        L[j, j] = math.sqrt(pivot)
        for i in range(j + 1, dim):
            L[i, j] = (sigma[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    if np.max(np.abs(L @ L.T - sigma)) > 1e-12 * max(1.0, np.max(np.abs(sigma))):
        raise CovarianceError("covariance not positive semidefinite")
    return L


def mvn_sample(sigma: np.ndarray, n: int, seed: SeedSpec) -> np.ndarray:
    """Draw n rows from N(0, sigma) via the lower-triangular factor."""
    if n < 1:
        raise ValueError("n must be >= 1")
    L = psd_cholesky(sigma)
    rng = seed.generator()
    z = rng.standard_normal((n, sigma.shape[0] if hasattr(sigma, "shape") else len(sigma)))
    return z @ L.T


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------

@dataclass
class Dataset:
    """Columnar observations with role labels.

    kind 'location': y plus optional x (n, 5).
    kind 'ivqr':     y, endogenous d, exogenous w; instruments are (1, d, w).
    """

    kind: str
    y: np.ndarray
    x: Optional[np.ndarray] = None
    d: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.y)

    def instruments(self) -> np.ndarray:
        """(n, 3) instrument matrix z_i = (1, D_i, W_i) for the IVQR design."""
        if self.d is None or self.w is None:
            raise DataError("dataset has no instrument columns")
        return np.column_stack([np.ones(self.n), self.d, self.w])


def gen_location(
    n: int,
    variant: str,
    seed: SeedSpec,
    eps_sd: float = DEFAULT_EPS_SD,
) -> Dataset:
    """Location-model data: y_i = eps_i with sd(eps) = eps_sd (default 2).

    For g3/g4 the pair (eps, x) is drawn jointly from the 6x6 correlation
    structure and the eps coordinate is rescaled to eps_sd.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if variant not in ("g1", "g2", "g3", "g4"):
        raise ValueError(f"unknown location variant {variant!r}")
    if variant in ("g1", "g2"):
        draws = mvn_sample(np.array([[eps_sd**2]]), n, seed)
        return Dataset(kind="location", y=draws[:, 0])
    joint = mvn_sample(LOCATION_JOINT_COV, n, seed)
    y = eps_sd * joint[:, 0]
    return Dataset(kind="location", y=y, x=joint[:, 1:])


def gen_ivqr(n: int, delta: float, seed: SeedSpec) -> Dataset:
    """IVQR data: y = 1 + D + u with (u, D, W) jointly normal.

    cov(u, W) = delta controls misspecification; |delta| < sqrt(0.75)
    keeps the joint covariance positive definite.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if abs(delta) >= IVQR_DELTA_LIMIT:
        raise CovarianceError("degenerate covariance: |delta| must be < sqrt(0.75)")
    sigma = np.array([
        [1.0, 0.0, delta],
        [0.0, 1.0, 0.5],
        [delta, 0.5, 1.0],
    ])
    draws = mvn_sample(sigma, n, seed)
    u, d, w = draws[:, 0], draws[:, 1], draws[:, 2]
    y = 1.0 + d + u
    return Dataset(kind="ivqr", y=y, d=d, w=w)


# ---------------------------------------------------------------------------
# CSV round trip (CLI `dump` / `solve`)
# ---------------------------------------------------------------------------

def dataset_to_csv(data: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if data.kind == "ivqr":
            writer.writerow(["y", "D", "W"])
            for i in range(data.n):
                writer.writerow([repr(data.y[i]), repr(data.d[i]), repr(data.w[i])])
        else:
            if data.x is not None:
                writer.writerow(["y"] + [f"x{j}" for j in range(1, 6)])
                for i in range(data.n):
                    writer.writerow([repr(data.y[i])] + [repr(v) for v in data.x[i]])
            else:
                writer.writerow(["y"])
                for i in range(data.n):
                    writer.writerow([repr(data.y[i])])


def dataset_from_csv(path, kind: str) -> Dataset:
    """Read a dataset CSV; schema must match the `dump` layout for `kind`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not body:
        raise DataError(f"{path}: no observations")
    try:
        values = np.array([[float(v) for v in row] for row in body])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell ({exc})") from exc
    if kind == "ivqr":
        if header[:3] != ["y", "D", "W"] or values.shape[1] < 3:
            raise DataError(f"{path}: expected columns y, D, W")
        return Dataset(kind="ivqr", y=values[:, 0], d=values[:, 1], w=values[:, 2])
    if kind == "location":
        if header[0] != "y":
            raise DataError(f"{path}: expected first column y")
        if values.shape[1] >= 6 and header[1:6] == [f"x{j}" for j in range(1, 6)]:
            return Dataset(kind="location", y=values[:, 0], x=values[:, 1:6])
        return Dataset(kind="location", y=values[:, 0])
    raise ValueError(f"unknown dataset kind {kind!r}")
