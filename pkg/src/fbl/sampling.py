"""Exact sampling of the ground-state point process on the grid.

Sequential conditional sampling for projection kernels: keep an orthonormal
basis of the unoccupied-so-far subspace, draw a node from the residual
diagonal, then shrink the basis to the orthogonal complement of the drawn
node's feature vector.  Every configuration has exactly N points.

Randomness comes from counter-based Philox streams keyed by
(seed, configuration index), so batches are reproducible and independent of
generation order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import FblError, NumericalBreakdown
from .fermion import FermiProjector

TRACE_DRIFT_GUARD = 1e-6


@dataclass(frozen=True)
class SampleBatch:
    """A batch of sampled configurations (index sets of size N)."""

    configurations: np.ndarray = field(repr=False)  # (count, N) sorted indices
    seed: int
    count: int

    @property
    def points_per_configuration(self) -> int:
        return self.configurations.shape[1]


def _config_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _sample_one(U: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    num_nodes, n = U.shape
    basis = U.copy()
    chosen = np.empty(n, dtype=np.int64)
    for step in range(n):
        diag = np.einsum("ij,ij->i", basis, basis)
        total = diag.sum()
        expected = n - step
        if abs(total - expected) > TRACE_DRIFT_GUARD:
            raise NumericalBreakdown(step, abs(total - expected))
        node = rng.choice(num_nodes, p=np.maximum(diag, 0.0) / total)
        chosen[step] = node
        k = basis.shape[1]
        if k == 1:
            break
        # Householder in coefficient space: rotate the drawn node's feature
        # vector onto e_1, keep the remaining k-1 directions.
        phi = basis[node].copy()
        u = phi.copy()
        u[0] += (1.0 if phi[0] >= 0 else -1.0) * np.linalg.norm(phi)
        u /= np.linalg.norm(u)
        rot = np.eye(k) - 2.0 * np.outer(u, u)
        basis = basis @ rot[:, 1:]
        # one modified Gram-Schmidt pass to bound roundoff drift
        for j in range(basis.shape[1]):
            col = basis[:, j]
            for i in range(j):
                col -= (basis[:, i] @ col) * basis[:, i]
            col /= np.linalg.norm(col)
    chosen.sort()
    return chosen


def sample(proj: FermiProjector, count: int, seed: int) -> SampleBatch:
    """Draw `count` independent configurations of the projection process."""
    if count < 1:
        raise FblError(f"count must be >= 1, got {count}")
    n = proj.count
    configs = np.empty((count, n), dtype=np.int64)
    for c in range(count):
        configs[c] = _sample_one(proj.U, _config_rng(seed, c))
    return SampleBatch(configurations=configs, seed=int(seed), count=int(count))


@dataclass(frozen=True)
class JointStatistics:
    means: np.ndarray
    mean_standard_errors: np.ndarray
    covariance: np.ndarray = field(repr=False)
    covariance_standard_errors: np.ndarray = field(repr=False)


def empirical_joint(batch: SampleBatch, masks: list[np.ndarray]) -> JointStatistics:
    """Sample means and covariances of the region counts (X(R_1), ..., X(R_k)).

    Covariance standard errors use the moment-based estimate
    sqrt((m4 - cov^2)/B) per entry.
    """
    if batch.count < 1:
        raise FblError("empty batch")
    counts = np.empty((batch.count, len(masks)))
    for m, mask in enumerate(masks):
        idx = np.asarray(mask)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        size = int(max(idx.max(initial=-1), batch.configurations.max())) + 1
        member = np.zeros(size, dtype=bool)
        member[idx] = True
        counts[:, m] = member[batch.configurations].sum(axis=1)
    means = counts.mean(axis=0)
    centered = counts - means
    b = batch.count
    if b > 1:
        cov = centered.T @ centered / (b - 1)
    else:
        cov = np.zeros((len(masks), len(masks)))
    m4 = np.einsum("bi,bj->ij", centered**2, centered**2) / b
    cov_se = np.sqrt(np.maximum(m4 - cov**2, 0.0) / b)
    mean_se = np.sqrt(np.maximum(np.diag(cov), 0.0) / b)
    return JointStatistics(means=means, mean_standard_errors=mean_se,
                           covariance=cov, covariance_standard_errors=cov_se)


def export_csv(batch: SampleBatch, path) -> None:
    """One row per configuration, columns the sorted node indices."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"idx_{k}" for k in range(batch.points_per_configuration)])
        for row in batch.configurations:
            writer.writerow([int(v) for v in row])
