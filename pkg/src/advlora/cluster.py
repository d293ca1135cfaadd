"""Lloyd's k-means over the rows of a weight matrix.

Used to reparameterize adapters: the k centers become one low-rank factor
and the m-by-k row-to-center distance matrix becomes the other. All random
choices come from the caller's seed; ties always resolve to the lowest
cluster index so results are reproducible across platforms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class ClusterResult:
    centers: np.ndarray  # (k, n)
    assignment: np.ndarray  # (m,) index of the closest center per row
    distances: np.ndarray  # (m, k) Euclidean row-to-center distances
    iterations: int
    converged: bool

    @property
    def k(self) -> int:
        return self.centers.shape[0]


def pairwise_distances(rows: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Euclidean distances, rows against centers, shape (m, k)."""
    diff = rows[:, None, :] - centers[None, :, :]
    return np.sqrt(np.maximum((diff * diff).sum(axis=2), 0.0))


def _seed_centers(rows, k, rng, plusplus):
    m = rows.shape[0]
    if not plusplus:
        idx = rng.choice(m, size=k, replace=False)
        return rows[np.sort(idx)].copy()
    centers = np.empty((k, rows.shape[1]), dtype=np.float64)
    centers[0] = rows[int(rng.integers(m))]
    closest_sq = ((rows - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total <= 0.0:
            # all rows coincide with chosen centers; any row works
            centers[j] = rows[int(rng.integers(m))]
        else:
            idx = int(rng.choice(m, p=closest_sq / total))
            centers[j] = rows[idx]
        closest_sq = np.minimum(closest_sq, ((rows - centers[j]) ** 2).sum(axis=1))
    return centers


def _repair_empty(distances, assignment, rows, centers):
    """Turn the row farthest from its center into a singleton center for
    each empty cluster, lowest cluster index first."""
    counts = np.bincount(assignment, minlength=centers.shape[0])
    claimed = set()
    for j in np.flatnonzero(counts == 0):
        own = distances[np.arange(len(assignment)), assignment].copy()
        for i in claimed:
            own[i] = -np.inf
        farthest = int(own.argmax())
        centers[j] = rows[farthest]
        assignment[farthest] = j
        distances[:, j] = np.sqrt(((rows - centers[j]) ** 2).sum(axis=1))
        claimed.add(farthest)


def kmeans(
    weights: np.ndarray,
    k: int,
    max_iter: int = 100,
    tol: float = 1e-9,
    seed: int = 0,
    plusplus: bool = True,
) -> ClusterResult:
    """Cluster the m rows of ``weights`` into k groups.

    Stops when the assignment repeats (exact fixed point), when the largest
    center shift drops below ``tol``, or after ``max_iter`` iterations.
    """
    rows = np.asarray(weights, dtype=np.float64)
    if rows.ndim != 2:
        raise ConfigError(f"expected a 2-D weight matrix, got shape {rows.shape}")
    m = rows.shape[0]
    if not 1 <= k <= m:
        raise ConfigError(f"k={k} outside [1, {m}] for {m} rows")
    if not np.all(np.isfinite(rows)):
        raise ConfigError("weight matrix contains non-finite values")

    rng = np.random.default_rng(seed)
    centers = _seed_centers(rows, k, rng, plusplus)

    converged = False
    iterations = 0
    prev_assignment = None
    for it in range(1, max_iter + 1):
        iterations = it
        distances = pairwise_distances(rows, centers)
        assignment = distances.argmin(axis=1)  # argmin takes the lowest index on ties
        _repair_empty(distances, assignment, rows, centers)

        if prev_assignment is not None and np.array_equal(assignment, prev_assignment):
            converged = True
            break

        new_centers = np.stack(
            [rows[assignment == j].mean(axis=0) for j in range(k)]
        )
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        prev_assignment = assignment
        if shift < tol:
            converged = True
            break

    distances = pairwise_distances(rows, centers)
    assignment = distances.argmin(axis=1)
    return ClusterResult(
        centers=centers,
        assignment=assignment,
        distances=distances,
        iterations=iterations,
        converged=converged,
    )


def lloyd_objective(rows: np.ndarray, assignment: np.ndarray, centers: np.ndarray) -> float:
    """Sum of squared distances from each row to its assigned center."""
    diff = rows - centers[assignment]
    return float((diff * diff).sum())
