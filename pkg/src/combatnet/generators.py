"""Model-network generators for both layers.

Three families are supported for the random structure of each layer:

* ER    — every eligible pair linked independently with a fixed probability,
* GOH   — static scale-free: nodes weighted i**(-mu), mu = 1/(beta - 1),
          weighted pairs drawn until the target edge count is reached,
* NW    — small world: ring lattice with k neighbors per side plus random
          shortcuts added (never rewired).

The family shapes the within-kind functional blocks (O-O, P-P, D-D) and the
physical C-C block; cross-kind arcs (O->P, P->D, D->A) are always drawn from
the ER probabilities.  A-A ties are never generated: the functional edge
type set has no A-A entry, so the configured p_AA is carried for
completeness but unused.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .model import CombatNetwork, DependencyMap, LayerGraph, NodeKind

FAMILIES = ("ER", "GOH", "NW")

# Paper-default layer sizes and family parameters.
DEFAULT_ER_PROBS = {
    "OO": 0.02, "OP": 0.03, "PP": 0.05, "PD": 0.03,
    "DD": 0.05, "DA": 0.03, "AA": 0.03, "CC": 0.07,
}
DEFAULT_NW_PROBS = {"OO": 0.08, "PP": 0.10, "DD": 0.14, "AA": 0.14, "CC": 0.05}


@dataclass
class GeneratorConfig:
    family: str = "ER"
    n_o: int = 50
    n_p: int = 40
    n_d: int = 30
    n_a: int = 30
    n_w: int = 100
    er_probs: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_ER_PROBS))
    goh_beta: float = 2.3
    goh_avg_degree: float = 6.0
    nw_k: int = 2
    nw_probs: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_NW_PROBS))
    group_size: int = 5

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        for name in ("n_o", "n_p", "n_d", "n_a", "n_w"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        missing = set(DEFAULT_ER_PROBS) - set(self.er_probs)
        if missing:
            raise ConfigError(f"er_probs missing keys {sorted(missing)}")
        missing = set(DEFAULT_NW_PROBS) - set(self.nw_probs)
        if missing:
            raise ConfigError(f"nw_probs missing keys {sorted(missing)}")
        for probs in (self.er_probs, self.nw_probs):
            for key, p in probs.items():
                if not 0.0 <= p <= 1.0:
                    raise ConfigError(f"probability {key}={p} outside [0, 1]")
        if self.goh_beta <= 2.0:
            raise ConfigError("goh_beta must be > 2")
        if self.goh_avg_degree < 0:
            raise ConfigError("goh_avg_degree must be >= 0")
        if self.nw_k < 1:
            raise ConfigError("nw_k must be >= 1")
        if not 1 <= self.group_size <= self.n_w:
            raise ConfigError("group_size must be in [1, n_w]")

    @property
    def n_functional(self) -> int:
        return self.n_o + self.n_p + self.n_d + self.n_a


def gen_er_edges(n: int, p: float, rng: np.random.Generator) -> set[tuple[int, int]]:
    """Undirected ER edges over nodes 0..n-1: each pair kept with prob p."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"edge probability {p} outside [0, 1]")
    edges = set()
    for i in range(n):
        draws = rng.random(n - i - 1)
        for off in np.flatnonzero(draws < p):
            edges.add((i, i + 1 + int(off)))
    return edges


def gen_er_cross_edges(n_from: int, n_to: int, p: float,
                       rng: np.random.Generator) -> set[tuple[int, int]]:
    """Directed arcs (i, j) over the bipartite index grid, each with prob p."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"edge probability {p} outside [0, 1]")
    arcs = set()
    for i in range(n_from):
        draws = rng.random(n_to)
        for j in np.flatnonzero(draws < p):
            arcs.add((i, int(j)))
    return arcs


def gen_goh_edges(n: int, beta: float, avg_degree: float,
                  rng: np.random.Generator) -> set[tuple[int, int]]:
    """Static scale-free edge set with exactly floor(n * avg_degree / 2) edges.

    Node i (1-indexed) carries weight i**(-mu), mu = 1/(beta - 1); distinct
    pairs are drawn with probability proportional to the weight product and
    kept if new, until the edge budget is met.
    """
    if n < 2:
        raise ConfigError("GOH generation needs n >= 2")
    m = int(n * avg_degree / 2)
    if m > n * (n - 1) // 2:
        raise ConfigError(f"target edge count {m} exceeds the {n * (n - 1) // 2} "
                          f"available pairs")
    mu = 1.0 / (beta - 1.0)
    weights = np.arange(1, n + 1, dtype=float) ** (-mu)
    weights /= weights.sum()
    edges: set[tuple[int, int]] = set()
    while len(edges) < m:
        batch = rng.choice(n, size=(max(m - len(edges), 32), 2), p=weights)
        for u, v in batch:
            if u == v:
                continue
            edge = (int(min(u, v)), int(max(u, v)))
            if edge not in edges:
                edges.add(edge)
                if len(edges) == m:
                    break
    return edges


def gen_nw_edges(n: int, k: int, p: float,
                 rng: np.random.Generator) -> set[tuple[int, int]]:
    """Small-world edges: ring lattice (k neighbors per side) plus shortcuts.

    Every non-lattice pair is added independently with probability p;
    lattice edges are never rewired or removed.
    """
    if n <= 2 * k:
        raise ConfigError(f"NW generation needs n > 2k (got n={n}, k={k})")
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"shortcut probability {p} outside [0, 1]")
    lattice = set()
    for i in range(n):
        for step in range(1, k + 1):
            j = (i + step) % n
            lattice.add((min(i, j), max(i, j)))
    edges = set(lattice)
    for i in range(n):
        draws = rng.random(n - i - 1)
        for off in np.flatnonzero(draws < p):
            pair = (i, i + 1 + int(off))
            if pair not in lattice:
                edges.add(pair)
    return edges


def _family_block(config: GeneratorConfig, kind_key: str, n: int,
                  rng: np.random.Generator) -> set[tuple[int, int]]:
    """Within-kind undirected edges for one node block, per the family."""
    if config.family == "ER":
        return gen_er_edges(n, config.er_probs[kind_key], rng)
    if config.family == "GOH":
        return gen_goh_edges(n, config.goh_beta, config.goh_avg_degree, rng)
    return gen_nw_edges(n, config.nw_k, config.nw_probs[kind_key], rng)


def build_network(config: GeneratorConfig, rng: np.random.Generator) -> CombatNetwork:
    """Generate a full combat network for one family configuration.

    Draw order is fixed (functional blocks O, P, D; cross arcs O->P, P->D,
    D->A; physical block; dependency groups in ascending functional id), so
    one seed always yields one network.
    """
    config.validate()
    counts = {
        NodeKind.O: config.n_o,
        NodeKind.P: config.n_p,
        NodeKind.D: config.n_d,
        NodeKind.A: config.n_a,
    }
    starts = {}
    cursor = 0
    kinds: list[NodeKind] = []
    for kind in (NodeKind.O, NodeKind.P, NodeKind.D, NodeKind.A):
        starts[kind] = cursor
        kinds.extend([kind] * counts[kind])
        cursor += counts[kind]
    n_g = cursor

    arcs: set[tuple[int, int]] = set()
    for kind in (NodeKind.O, NodeKind.P, NodeKind.D):
        base = starts[kind]
        for i, j in sorted(_family_block(config, kind.value * 2, counts[kind], rng)):
            arcs.add((base + i, base + j))
            arcs.add((base + j, base + i))
    for tail, head in ((NodeKind.O, NodeKind.P), (NodeKind.P, NodeKind.D),
                       (NodeKind.D, NodeKind.A)):
        key = tail.value + head.value
        cross = gen_er_cross_edges(counts[tail], counts[head],
                                   config.er_probs[key], rng)
        for i, j in sorted(cross):
            arcs.add((starts[tail] + i, starts[head] + j))

    functional = LayerGraph(0, tuple(kinds), frozenset(arcs))

    phys_arcs: set[tuple[int, int]] = set()
    for i, j in sorted(_family_block(config, "CC", config.n_w, rng)):
        phys_arcs.add((n_g + i, n_g + j))
        phys_arcs.add((n_g + j, n_g + i))
    physical = LayerGraph(n_g, (NodeKind.C,) * config.n_w, frozenset(phys_arcs))

    groups = {}
    for node in range(n_g):
        draw = rng.choice(config.n_w, size=config.group_size, replace=False)
        groups[node] = tuple(n_g + int(c) for c in draw)

    return CombatNetwork(functional, physical, DependencyMap(config.group_size, groups))
