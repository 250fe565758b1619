"""Seeded random recursive diagrams for property tests and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .diagram import CausalDiagram, build_diagram


def random_diagram(
    n: int,
    seed: int,
    p_directed: float = 0.3,
    p_bidirected: float = 0.3,
    shuffle: bool = True,
) -> CausalDiagram:
    """Random acyclic mixed graph on ``n`` variables ``V0..V{n-1}``.

    Directed edges follow a hidden random topological order, so declaration
    order carries no information when ``shuffle`` is set.
    """
    rng = np.random.default_rng(seed)
    names = [f"V{i}" for i in range(n)]
    topo = list(rng.permutation(n)) if shuffle else list(range(n))
    directed, bidirected = [], []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = names[topo[i]], names[topo[j]]
            if rng.random() < p_directed:
                directed.append((a, b, f"c_{a}_{b}"))
            if rng.random() < p_bidirected:
                bidirected.append((a, b, f"g_{a}_{b}"))
    return build_diagram(names, directed, bidirected)
