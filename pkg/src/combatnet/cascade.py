"""Failure dynamics: load, capacity, redistribution, and the cascade loop.

Every node starts with load (k_i * sum of neighbor degrees)**kappa and
capacity L0 + lambda * L0**gamma, both per layer.  When a node fails its
load moves to surviving same-layer neighbors (same kind only, in the
functional layer) split by a mix of initial-load share and remaining-
capacity share; load with nowhere to go is dropped.  A node pushed past
its capacity fails with probability (L - C) / (delta * C), capped to the
band (C, (1+delta)C]; beyond the band it fails outright.

A cascade run applies the attack, settles the physical layer (isolation +
redistribution + overload until quiet), fails every functional node whose
dependency group lost more than the tolerated fraction, then settles the
functional layer.  Dependency is strictly one-way, so a single pass
reaches the stable state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigError, NetworkStructureError
from .model import CombatNetwork, Layer, LayerGraph


class FailureCause(Enum):
    ATTACK = "attack"
    ISOLATION = "isolation"
    DEPENDENCY = "dependency"
    OVERLOAD = "overload"


@dataclass
class CascadeParams:
    """All cascade tunables; defaults are the standard experiment values."""

    kappa_g: float = 0.5
    kappa_w: float = 0.5
    lambda_g: float = 1.0
    lambda_w: float = 1.0
    gamma_g: float = 1.1
    gamma_w: float = 1.1
    delta_g: float = 0.3
    delta_w: float = 0.3
    eta: float = 0.5
    tau: float = 0.8

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("kappa_g", "kappa_w", "gamma_g", "gamma_w"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        for name in ("lambda_g", "lambda_w"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        for name in ("delta_g", "delta_w"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for name in ("eta", "tau"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1]")

    def kappa(self, layer: Layer) -> float:
        return self.kappa_g if layer is Layer.FUNCTIONAL else self.kappa_w

    def lam(self, layer: Layer) -> float:
        return self.lambda_g if layer is Layer.FUNCTIONAL else self.lambda_w

    def gamma(self, layer: Layer) -> float:
        return self.gamma_g if layer is Layer.FUNCTIONAL else self.gamma_w

    def delta(self, layer: Layer) -> float:
        return self.delta_g if layer is Layer.FUNCTIONAL else self.delta_w


@dataclass
class NodeDynamics:
    """Mutable per-run state, indexed by global node id."""

    initial_load: np.ndarray
    load: np.ndarray
    capacity: np.ndarray
    alive: np.ndarray
    dropped_load: dict[Layer, float]

    def total_load(self) -> float:
        """Loads still on nodes plus everything dropped; conserved by design."""
        return float(self.load.sum()) + sum(self.dropped_load.values())


@dataclass
class CascadeOutcome:
    surviving_functional: set[int]
    surviving_physical: set[int]
    rounds: int
    failure_log: list[tuple[int, int, FailureCause]] = field(default_factory=list)

    def failed_nodes(self) -> set[int]:
        return {node for _, node, _ in self.failure_log}


def write_failure_log(outcome: CascadeOutcome, stream) -> None:
    """Dump the log as tab-separated `round node cause` lines."""
    for rnd, node, cause in outcome.failure_log:
        stream.write(f"{rnd}\t{node}\t{cause.value}\n")


def init_dynamics(net: CombatNetwork, params: CascadeParams) -> NodeDynamics:
    """Initial loads and capacities; every node starts alive.

    Degree-0 nodes get load 0 and capacity 0; they sit inert until an
    isolation sweep removes them.
    """
    total = net.n_functional + net.n_physical
    initial = np.zeros(total)
    capacity = np.zeros(total)
    for layer_id in (Layer.FUNCTIONAL, Layer.PHYSICAL):
        graph = net.layer(layer_id)
        kappa = params.kappa(layer_id)
        lam = params.lam(layer_id)
        gamma = params.gamma(layer_id)
        for node in graph.nodes():
            neigh = graph.adjacent(node)
            if neigh:
                base = len(neigh) * sum(len(graph.adjacent(j)) for j in neigh)
                initial[node] = base ** kappa
                capacity[node] = initial[node] + lam * initial[node] ** gamma
    return NodeDynamics(
        initial_load=initial,
        load=initial.copy(),
        capacity=capacity,
        alive=np.ones(total, dtype=bool),
        dropped_load={Layer.FUNCTIONAL: 0.0, Layer.PHYSICAL: 0.0},
    )


def redistribution_shares(failed: int, dyn: NodeDynamics, net: CombatNetwork,
                          params: CascadeParams) -> dict[int, float]:
    """Allocation fractions over the surviving candidates of one failed node.

    share_j = eta * L_j(0)/sum L(0)  +  (1-eta) * rc_j/sum rc, with
    rc_j = max(C_j - L_j, 0).  If every candidate's remaining capacity
    clamps to zero the dynamic term falls back to the static ratio.
    Empty candidate set -> empty map (the caller drops the load).
    """
    layer_id = net.layer_of(failed)
    graph = net.layer(layer_id)
    same_kind = layer_id is Layer.FUNCTIONAL
    kind = graph.kind_of(failed) if same_kind else None
    candidates = sorted(
        v for v in graph.adjacent(failed)
        if dyn.alive[v] and (not same_kind or graph.kind_of(v) is kind)
    )
    if not candidates:
        return {}
    static = np.array([dyn.initial_load[v] for v in candidates])
    static = static / static.sum()
    rc = np.array([max(dyn.capacity[v] - dyn.load[v], 0.0) for v in candidates])
    rc_sum = rc.sum()
    dynamic = rc / rc_sum if rc_sum > 0 else static
    shares = params.eta * static + (1.0 - params.eta) * dynamic
    return {v: float(s) for v, s in zip(candidates, shares)}


def apply_redistribution(failed_set: Iterable[int], dyn: NodeDynamics,
                         net: CombatNetwork, params: CascadeParams) -> None:
    """Transfer the loads of newly failed nodes to their candidates.

    Shares are computed against the load table as it stands on entry and
    all gains land simultaneously, so the result does not depend on the
    processing order inside one round.  (Gains are deferred and failed
    nodes are never candidates, so the live table equals the snapshot for
    every share computation.)
    """
    gains = np.zeros_like(dyn.load)
    for node in sorted(failed_set):
        amount = float(dyn.load[node])
        dyn.load[node] = 0.0
        shares = redistribution_shares(node, dyn, net, params)
        if shares:
            for v, s in shares.items():
                gains[v] += amount * s
        else:
            dyn.dropped_load[net.layer_of(node)] += amount
    dyn.load += gains


def overload_probability(load: float, capacity: float, delta: float) -> float:
    """Three-state overload rule: 0 below capacity, linear ramp in the
    endurance band, 1 beyond it.  delta=0 or capacity=0 collapse the band."""
    if load <= capacity:
        return 0.0
    if delta <= 0.0 or capacity <= 0.0:
        return 1.0
    if load > (1.0 + delta) * capacity:
        return 1.0
    return (load - capacity) / (delta * capacity)


def isolation_sweep(layer: LayerGraph, surviving: set[int]) -> set[int]:
    """Survivors outside the largest connected component of the surviving
    subgraph.  Equal-size components tie-break toward the smallest minimum
    node id; kinds are merged (undirected view)."""
    if not surviving:
        return set()
    seen: set[int] = set()
    best: set[int] | None = None
    for start in sorted(surviving):
        if start in seen:
            continue
        component = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in layer.adjacent(node):
                if nxt in surviving and nxt not in component:
                    component.add(nxt)
                    stack.append(nxt)
        seen |= component
        if best is None or len(component) > len(best):
            best = component  # first-found wins ties: scan order is by min id
    return surviving - best


def dependency_sweep(net: CombatNetwork, dyn: NodeDynamics, tau: float) -> set[int]:
    """Active functional nodes whose failed dependency fraction exceeds tau.

    The fraction is measured against the original group size and the
    comparison is strict, so a ratio exactly at tau survives.
    """
    doomed = set()
    for node in net.functional.nodes():
        if not dyn.alive[node]:
            continue
        group = net.deps.groups[node]
        failed = sum(1 for t in group if not dyn.alive[t])
        if failed / len(group) > tau:
            doomed.add(node)
    return doomed


def settle_layer(layer_id: Layer, dyn: NodeDynamics, net: CombatNetwork,
                 params: CascadeParams, rng: np.random.Generator,
                 pending: Iterable[int] = (),
                 step_observer: Callable[[NodeDynamics], None] | None = None,
                 ) -> list[list[tuple[int, FailureCause]]]:
    """Iterate one layer to a quiet state after some of its nodes failed.

    Each iteration: isolation sweep, redistribution of every failure whose
    load has not moved yet (isolation failures of this iteration plus
    overload failures of the previous one), then one overload evaluation
    with a fresh uniform draw per node above capacity.  Stops when an
    iteration produces no new failure.

    ``pending`` names already-failed nodes whose loads still need
    redistribution (e.g. dependency failures).  Returns the failures
    grouped into per-iteration waves, in order.
    """
    graph = net.layer(layer_id)
    delta = params.delta(layer_id)
    pending = set(pending)
    waves: list[list[tuple[int, FailureCause]]] = []
    guard = graph.node_count + 2
    for _ in range(guard):
        wave: list[tuple[int, FailureCause]] = []
        surviving = {n for n in graph.nodes() if dyn.alive[n]}
        for node in sorted(isolation_sweep(graph, surviving)):
            dyn.alive[node] = False
            pending.add(node)
            wave.append((node, FailureCause.ISOLATION))
        apply_redistribution(pending, dyn, net, params)
        if step_observer is not None:
            step_observer(dyn)
        pending.clear()
        over = [n for n in graph.nodes()
                if dyn.alive[n] and dyn.load[n] > dyn.capacity[n]]
        for node in over:
            p = overload_probability(dyn.load[node], dyn.capacity[node], delta)
            if rng.random() < p:
                dyn.alive[node] = False
                pending.add(node)
                wave.append((node, FailureCause.OVERLOAD))
        if not wave:
            break
        waves.append(wave)
    else:
        raise AssertionError("settling exceeded the iteration guard")
    return waves


def run_cascade(net: CombatNetwork, params: CascadeParams, attack_set: Iterable[int],
                rng: np.random.Generator,
                step_observer: Callable[[NodeDynamics], None] | None = None,
                ) -> CascadeOutcome:
    """Full attack-to-steady-state cascade on freshly initialized dynamics.

    Phases: mark the attack set failed and redistribute its loads inside
    each layer, settle the physical layer, fail over-tolerance dependents,
    settle the functional layer.  ``step_observer``, when given, is called
    after every redistribution step (debug/verification hook).
    """
    attack = sorted(set(attack_set))
    total = net.n_functional + net.n_physical
    for node in attack:
        if not 0 <= node < total:
            raise NetworkStructureError(f"attacked node {node} does not exist")

    dyn = init_dynamics(net, params)
    log: list[tuple[int, int, FailureCause]] = []
    rounds = 0
    if attack:
        rounds = 1
        for node in attack:
            dyn.alive[node] = False
            log.append((1, node, FailureCause.ATTACK))
        apply_redistribution(attack, dyn, net, params)
        if step_observer is not None:
            step_observer(dyn)

        for wave in settle_layer(Layer.PHYSICAL, dyn, net, params, rng,
                                 step_observer=step_observer):
            rounds += 1
            log.extend((rounds, node, cause) for node, cause in wave)

        doomed = sorted(dependency_sweep(net, dyn, params.tau))
        if doomed:
            rounds += 1
            for node in doomed:
                dyn.alive[node] = False
                log.append((rounds, node, FailureCause.DEPENDENCY))

        for wave in settle_layer(Layer.FUNCTIONAL, dyn, net, params, rng,
                                 pending=doomed, step_observer=step_observer):
            rounds += 1
            log.extend((rounds, node, cause) for node, cause in wave)

    return CascadeOutcome(
        surviving_functional={n for n in net.functional.nodes() if dyn.alive[n]},
        surviving_physical={n for n in net.physical.nodes() if dyn.alive[n]},
        rounds=rounds,
        failure_log=log,
    )
