"""Independent reference computations the test suite checks against.

Everything in here is deliberately naive (finite differences, exhaustive
enumeration, per-pair loops) and shares no code with the library paths it
verifies.
"""

import itertools

import numpy as np

from advlora.autodiff import Tensor, backward


def finite_difference_grads(build_loss, leaf_values, h=1e-5):
    """Central-difference gradients of a scalar-valued graph builder.

    ``build_loss`` maps a list of ndarrays to a scalar float by rebuilding
    the computation from plain values. Returns one gradient array per leaf.
    """
    grads = []
    for i, base in enumerate(leaf_values):
        g = np.zeros_like(base, dtype=np.float64)
        flat = g.reshape(-1)
        base_flat = base.reshape(-1)
        for j in range(base_flat.size):
            orig = base_flat[j]
            base_flat[j] = orig + h
            f_plus = build_loss(leaf_values)
            base_flat[j] = orig - h
            f_minus = build_loss(leaf_values)
            base_flat[j] = orig
            flat[j] = (f_plus - f_minus) / (2.0 * h)
        grads.append(g)
    return grads


def autodiff_grads(build_graph, leaf_values):
    """Reverse-mode gradients for the same builder, via the engine."""
    leaves = [Tensor(v.copy(), requires_grad=True) for v in leaf_values]
    loss = build_graph(leaves)
    gmap = backward(loss)
    return [gmap.get(leaf, np.zeros(leaf.shape)) for leaf in leaves]


def max_relative_error(a, b, floor=1e-3):
    """Worst-case elementwise relative error with an absolute floor.

    The floor makes near-zero gradients compare absolutely, where central
    differences are dominated by cancellation noise.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom))


def kmeans_objective(points, assignment, k):
    """Sum of squared distances to the mean of each assigned group."""
    total = 0.0
    for j in range(k):
        members = points[assignment == j]
        if len(members) == 0:
            continue
        center = members.mean(axis=0)
        total += float(((members - center) ** 2).sum())
    return total


def brute_force_kmeans(points, k):
    """Global optimum over all k^m assignments of m points to k groups.

    Only feasible for tiny instances; returns (best objective, assignment).
    """
    m = len(points)
    best_obj = np.inf
    best_assign = None
    for combo in itertools.product(range(k), repeat=m):
        assign = np.array(combo, dtype=np.intp)
        obj = kmeans_objective(points, assign, k)
        if obj < best_obj - 1e-12:
            best_obj = obj
            best_assign = assign
    return best_obj, best_assign


def rank_of_diagonal(sim):
    """Per-query rank of the true match via explicit sorting.

    Gallery items are ordered by descending similarity; equal similarities
    are ordered by ascending index. Rank 0 means top-1.
    """
    n = sim.shape[0]
    ranks = np.empty(n, dtype=np.intp)
    for i in range(n):
        order = sorted(range(n), key=lambda j: (-sim[i, j], j))
        ranks[i] = order.index(i)
    return ranks
