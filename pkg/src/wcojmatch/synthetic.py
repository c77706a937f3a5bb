"""Seeded synthetic data graphs."""
from __future__ import annotations

import numpy as np

from .graph import EdgeList


def syn_graph(n: int, d: int, seed: int = 0) -> EdgeList:
    """Directed graph where every vertex has out-degree and in-degree exactly ``d``.

    Vertex ``v`` points to ``(v + o) mod n`` for ``d`` distinct random
    offsets ``o`` in ``[1, n)``, so there are no self-loops and
    ``|E| = n * d``.
    """
    if not 0 < d < n:
        raise ValueError(f"need 0 < d < n, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    offsets = rng.choice(np.arange(1, n), size=d, replace=False)
    src = np.repeat(np.arange(n, dtype=np.int64), d)
    dst = (src + np.tile(offsets, n)) % n
    return EdgeList(np.column_stack([src, dst]), directed=True)


def random_graph(n: int, p: float, seed: int = 0, self_loops: bool = True) -> EdgeList:
    """Directed Erdos-Renyi graph over ordered pairs with edge probability ``p``."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    if not self_loops:
        np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return EdgeList(np.column_stack([src, dst]).astype(np.int64), directed=True)


def skewed_graph(n: int, m: int, exponent: float = 1.2, seed: int = 0) -> EdgeList:
    """Directed graph whose endpoints follow a Zipf-like popularity law.

    Low ids are hubs. Duplicate draws collapse at CSR build, so the final
    edge count is at most ``m``.
    """
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, n + 1) ** exponent
    weights /= weights.sum()
    src = rng.choice(n, size=m, p=weights)
    dst = rng.choice(n, size=m, p=weights)
    keep = src != dst
    return EdgeList(np.column_stack([src[keep], dst[keep]]).astype(np.int64), directed=True)
