"""Layered combat-network data model.

A CombatNetwork couples two node layers over one dense integer id space:

* a functional layer of typed units (O = intelligence obtaining,
  P = intelligence processing, D = decision/command, A = attack/damage)
  occupying ids ``[0, n_functional)``,
* a physical layer of communication relays (kind C) occupying ids
  ``[n_functional, n_functional + n_physical)``,
* a one-to-many dependency map sending every functional node onto a
  fixed-size group of physical nodes.

Functional edges are typed: within-kind ties (O-O, P-P, D-D) are mutual and
stored as a pair of opposite arcs, cross-kind ties exist only along the
kill-chain order O->P, P->D, D->A and are stored as a single arc.  Physical
edges are always mutual.  Simulation code works on the merged undirected
view; the stored direction is kept for link counting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import NetworkStructureError


class NodeKind(Enum):
    O = "O"
    P = "P"
    D = "D"
    A = "A"
    C = "C"


class Layer(Enum):
    FUNCTIONAL = "functional"
    PHYSICAL = "physical"


FUNCTIONAL_KINDS = (NodeKind.O, NodeKind.P, NodeKind.D, NodeKind.A)

# Ordered (tail-kind, head-kind) pairs an arc may carry in the functional
# layer.  Within-kind pairs are mutual; cross-kind pairs follow the
# kill-chain direction.
WITHIN_KIND_PAIRS = frozenset(
    {(NodeKind.O, NodeKind.O), (NodeKind.P, NodeKind.P), (NodeKind.D, NodeKind.D)}
)
CROSS_KIND_PAIRS = frozenset(
    {(NodeKind.O, NodeKind.P), (NodeKind.P, NodeKind.D), (NodeKind.D, NodeKind.A)}
)
ALLOWED_FUNCTIONAL_PAIRS = WITHIN_KIND_PAIRS | CROSS_KIND_PAIRS


@dataclass
class LayerGraph:
    """One layer: a contiguous id block, per-node kinds, and directed arcs.

    ``kinds[i]`` is the kind of node ``offset + i``.  Arcs use global ids.
    Instances are validated on construction and must not be mutated after.
    """

    offset: int
    kinds: tuple[NodeKind, ...]
    arcs: frozenset[tuple[int, int]]
    _adj: dict[int, set[int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.kinds = tuple(self.kinds)
        self.arcs = frozenset(self.arcs)
        self._validate()
        adj: dict[int, set[int]] = {node: set() for node in self.nodes()}
        for u, v in self.arcs:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = adj

    @property
    def node_count(self) -> int:
        return len(self.kinds)

    def nodes(self) -> range:
        return range(self.offset, self.offset + self.node_count)

    def has_node(self, node: int) -> bool:
        return self.offset <= node < self.offset + self.node_count

    def kind_of(self, node: int) -> NodeKind:
        if not self.has_node(node):
            raise NetworkStructureError(f"node {node} not in layer [{self.offset}, "
                                        f"{self.offset + self.node_count})")
        return self.kinds[node - self.offset]

    def adjacent(self, node: int) -> set[int]:
        """Undirected-view neighbor set (in- and out-arcs merged)."""
        if not self.has_node(node):
            raise NetworkStructureError(f"unknown node id {node}")
        return self._adj[node]

    def undirected_edges(self) -> set[tuple[int, int]]:
        """Each linked pair once, as (min, max)."""
        return {(min(u, v), max(u, v)) for u, v in self.arcs}

    def _validate(self):
        kinds = set(self.kinds)
        if NodeKind.C in kinds and kinds != {NodeKind.C}:
            raise NetworkStructureError("C nodes cannot share a layer with functional kinds")
        physical = kinds == {NodeKind.C} if kinds else False
        for u, v in self.arcs:
            if u == v:
                raise NetworkStructureError(f"self-arc on node {u}")
            if not (self.has_node(u) and self.has_node(v)):
                raise NetworkStructureError(f"arc ({u}, {v}) leaves the layer id range")
            if physical:
                if (v, u) not in self.arcs:
                    raise NetworkStructureError(f"physical arc ({u}, {v}) lacks its mirror")
                continue
            pair = (self.kind_of(u), self.kind_of(v))
            if pair not in ALLOWED_FUNCTIONAL_PAIRS:
                raise NetworkStructureError(
                    f"arc ({u}, {v}) has disallowed kind pair "
                    f"{pair[0].value}-{pair[1].value}")
            if pair in WITHIN_KIND_PAIRS and (v, u) not in self.arcs:
                raise NetworkStructureError(f"within-kind arc ({u}, {v}) lacks its mirror")


@dataclass
class DependencyMap:
    """Group dependency: functional node id -> ordered group of physical ids.

    Every functional node must map onto exactly ``group_size`` distinct
    physical nodes; group order is preserved (it is the generation draw
    order and part of the serialized form).
    """

    group_size: int
    groups: dict[int, tuple[int, ...]]

    def __post_init__(self):
        self.groups = {node: tuple(targets) for node, targets in self.groups.items()}
        for node, targets in self.groups.items():
            if len(targets) != self.group_size or len(set(targets)) != self.group_size:
                raise NetworkStructureError(
                    f"node {node} has {len(targets)} dependency targets, "
                    f"expected {self.group_size} distinct")


@dataclass
class CombatNetwork:
    """Two layers plus the one-way functional->physical dependency map."""

    functional: LayerGraph
    physical: LayerGraph
    deps: DependencyMap

    def __post_init__(self):
        if self.functional.offset != 0:
            raise NetworkStructureError("functional ids must start at 0")
        if self.physical.offset != self.functional.node_count:
            raise NetworkStructureError("physical ids must follow the functional block")
        if set(self.functional.kinds) & {NodeKind.C}:
            raise NetworkStructureError("functional layer holds a C node")
        if any(k is not NodeKind.C for k in self.physical.kinds):
            raise NetworkStructureError("physical layer holds a non-C node")
        if set(self.deps.groups) != set(self.functional.nodes()):
            raise NetworkStructureError("dependency map must cover every functional node")
        for node, targets in self.deps.groups.items():
            for t in targets:
                if not self.physical.has_node(t):
                    raise NetworkStructureError(
                        f"dependency target {t} of node {node} is not a physical node")

    @property
    def n_functional(self) -> int:
        return self.functional.node_count

    @property
    def n_physical(self) -> int:
        return self.physical.node_count

    def layer(self, which: Layer) -> LayerGraph:
        return self.functional if which is Layer.FUNCTIONAL else self.physical

    def layer_of(self, node: int) -> Layer:
        if self.functional.has_node(node):
            return Layer.FUNCTIONAL
        if self.physical.has_node(node):
            return Layer.PHYSICAL
        raise NetworkStructureError(f"unknown node id {node}")

    def kind_of(self, node: int) -> NodeKind:
        return self.layer(self.layer_of(node)).kind_of(node)

    def kind_ids(self, kind: NodeKind) -> list[int]:
        """Node ids of a kind, ascending."""
        layer = self.physical if kind is NodeKind.C else self.functional
        return [n for n in layer.nodes() if layer.kind_of(n) is kind]


def neighbors(net: CombatNetwork, layer: Layer, node: int,
              same_type_only: bool = False) -> set[int]:
    """Undirected-view neighbors of ``node`` within its own layer.

    With ``same_type_only`` the set is filtered to neighbors of the same
    kind, which is the candidate rule for functional load redistribution.
    """
    graph = net.layer(layer)
    adj = graph.adjacent(node)
    if not same_type_only:
        return set(adj)
    kind = graph.kind_of(node)
    return {v for v in adj if graph.kind_of(v) is kind}


def degree(net: CombatNetwork, layer: Layer, node: int) -> int:
    """Size of the undirected-view neighbor set."""
    return len(net.layer(layer).adjacent(node))


def typed_block(net: CombatNetwork, from_kind: NodeKind, to_kind: NodeKind) -> np.ndarray:
    """0/1 block matrix between two kinds, rows/cols in ascending node id.

    Kind pairs inside one layer read off the stored arcs; pairs that couple
    a functional kind with C read off the dependency map (both orientations
    carry the same edges, transposed).
    """
    rows = net.kind_ids(from_kind)
    cols = net.kind_ids(to_kind)
    block = np.zeros((len(rows), len(cols)), dtype=np.int64)
    col_index = {node: j for j, node in enumerate(cols)}

    if from_kind is NodeKind.C and to_kind is NodeKind.C:
        for u, v in net.physical.arcs:
            block[u - net.physical.offset, v - net.physical.offset] = 1
    elif to_kind is NodeKind.C:
        for i, node in enumerate(rows):
            for t in net.deps.groups[node]:
                block[i, col_index[t]] = 1
    elif from_kind is NodeKind.C:
        return typed_block(net, to_kind, from_kind).T.copy()
    else:
        row_index = {node: i for i, node in enumerate(rows)}
        for u, v in net.functional.arcs:
            if u in row_index and v in col_index:
                block[row_index[u], col_index[v]] = 1
    return block


# ---------------------------------------------------------------------------
# Text serialization.
#
# Line-oriented format, hand-writable:
#
#   N_G N_W group_size          header
#   <id> <kind>                 one line per node, kind in {O,P,D,A,C}
#   <u> <v>                     one edge/arc line per link:
#                               within-kind and physical lines are
#                               undirected edges (mirror arc implied),
#                               cross-kind lines are directed arcs
#   <f_id> -> <c_id> <c_id> ... one line per dependency group
#
# Blank lines and lines starting with '#' are ignored on read.
# ---------------------------------------------------------------------------

_KIND_LETTERS = {k.value: k for k in NodeKind}


def format_network(net: CombatNetwork) -> str:
    """Serialize deterministically (same network -> identical text)."""
    lines = [f"{net.n_functional} {net.n_physical} {net.deps.group_size}"]
    for layer in (net.functional, net.physical):
        for node in layer.nodes():
            lines.append(f"{node} {layer.kind_of(node).value}")
    link_lines = set()
    for u, v in net.functional.arcs:
        pair = (net.functional.kind_of(u), net.functional.kind_of(v))
        if pair in WITHIN_KIND_PAIRS:
            link_lines.add((min(u, v), max(u, v)))
        else:
            link_lines.add((u, v))
    link_lines.update(net.physical.undirected_edges())
    for u, v in sorted(link_lines):
        lines.append(f"{u} {v}")
    for node in net.functional.nodes():
        targets = " ".join(str(t) for t in net.deps.groups[node])
        lines.append(f"{node} -> {targets}")
    return "\n".join(lines) + "\n"


def parse_network(text: str) -> CombatNetwork:
    """Parse the text format back into a validated CombatNetwork."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise NetworkStructureError("empty network file")
    try:
        n_g, n_w, group_size = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise NetworkStructureError(f"bad header line: {lines[0]!r}") from exc

    kinds: dict[int, NodeKind] = {}
    links: list[tuple[int, int]] = []
    groups: dict[int, tuple[int, ...]] = {}
    for ln in lines[1:]:
        tokens = ln.split()
        if "->" in tokens:
            sep = tokens.index("->")
            try:
                node = int(tokens[0])
                targets = tuple(int(t) for t in tokens[sep + 1:])
            except ValueError as exc:
                raise NetworkStructureError(f"bad dependency line: {ln!r}") from exc
            if sep != 1:
                raise NetworkStructureError(f"bad dependency line: {ln!r}")
            groups[node] = targets
        elif len(tokens) == 2 and tokens[1] in _KIND_LETTERS:
            kinds[int(tokens[0])] = _KIND_LETTERS[tokens[1]]
        elif len(tokens) == 2:
            try:
                links.append((int(tokens[0]), int(tokens[1])))
            except ValueError as exc:
                raise NetworkStructureError(f"bad line: {ln!r}") from exc
        else:
            raise NetworkStructureError(f"bad line: {ln!r}")

    if set(kinds) != set(range(n_g + n_w)):
        raise NetworkStructureError("node declarations do not match header counts")
    f_kinds = tuple(kinds[i] for i in range(n_g))
    p_kinds = tuple(kinds[i] for i in range(n_g, n_g + n_w))

    f_arcs: set[tuple[int, int]] = set()
    p_arcs: set[tuple[int, int]] = set()
    for u, v in links:
        if u >= n_g and v >= n_g:
            p_arcs.add((u, v))
            p_arcs.add((v, u))
        elif u < n_g and v < n_g:
            f_arcs.add((u, v))
            if (kinds[u], kinds[v]) in WITHIN_KIND_PAIRS:
                f_arcs.add((v, u))
        else:
            raise NetworkStructureError(f"link ({u}, {v}) crosses layers")

    return CombatNetwork(
        functional=LayerGraph(0, f_kinds, frozenset(f_arcs)),
        physical=LayerGraph(n_g, p_kinds, frozenset(p_arcs)),
        deps=DependencyMap(group_size, groups),
    )


def write_network(net: CombatNetwork, path: str | Path) -> None:
    Path(path).write_text(format_network(net))


def read_network(path: str | Path) -> CombatNetwork:
    return parse_network(Path(path).read_text())
