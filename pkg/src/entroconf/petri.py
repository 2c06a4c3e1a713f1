"""Petri net semantics: boundedness, reachability graphs, and conversion of
nets to the automata the measures consume.

Boundedness is decided natively by a coverability search (a strictly
covering ancestor marking is a pump and proves unboundedness), so no
external model checker is involved.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .automata import SILENT, Dfa, Nfa, determinize
from .errors import (
    InvalidFinalMarking,
    NoAcceptingState,
    NondeterministicStochasticModel,
    SilentTransitionUnsupported,
    StateSpaceExceeded,
)
from .stochastic import Sdfa, _canonical_sdfa

DEFAULT_NODE_CAP = 10**7


@dataclass(frozen=True)
class Marking:
    """Token counts with finite support, canonically sorted for hashing."""

    tokens: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        if list(self.tokens) != sorted(self.tokens):
            raise ValueError("token entries must be sorted by place")
        places = [p for p, _ in self.tokens]
        if len(set(places)) != len(places):
            raise ValueError("duplicate place in marking")
        if any(c < 1 for _, c in self.tokens):
            raise ValueError("marking stores only positive token counts")

    @classmethod
    def of(cls, counts: Mapping[str, int]) -> "Marking":
        return cls(tuple(sorted((p, c) for p, c in counts.items() if c)))

    def count(self, place: str) -> int:
        for p, c in self.tokens:
            if p == place:
                return c
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.tokens)


@dataclass(frozen=True)
class PetriNet:
    """Place/transition net; a transition's label is None when silent."""

    places: frozenset[str]
    transitions: Mapping[str, str | None]
    arcs: Mapping[tuple[str, str], int]
    initial_marking: Marking
    final_markings: frozenset[Marking] | None = None

    def __post_init__(self) -> None:
        if self.places & set(self.transitions):
            raise ValueError("place and transition ids must be disjoint")
        for (src, dst), weight in self.arcs.items():
            if weight < 1:
                raise ValueError("arc weights must be positive")
            known = {src, dst} <= (self.places | set(self.transitions))
            mixed = (src in self.places) != (dst in self.places)
            if not (known and mixed):
                raise ValueError(f"arc {src}->{dst} must connect a place and a transition")
        for marking in self._declared_markings():
            for place, _ in marking.tokens:
                if place not in self.places:
                    raise ValueError(f"marking mentions unknown place {place}")

    def _declared_markings(self):
        yield self.initial_marking
        if self.final_markings is not None:
            yield from self.final_markings


@dataclass(frozen=True)
class StochasticPetriNet(PetriNet):
    """Net with a positive firing weight per transition; silent not allowed."""

    weights: Mapping[str, Fraction] = field(kw_only=True)

    def __post_init__(self) -> None:
        super().__post_init__()
        silent = sorted(t for t, label in self.transitions.items() if label is None)
        if silent:
            raise SilentTransitionUnsupported(
                f"stochastic nets cannot contain silent transitions: {', '.join(silent)}"
            )
        if set(self.weights) != set(self.transitions):
            raise ValueError("exactly one weight per transition required")
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("weights must be positive")


@dataclass(frozen=True)
class ReachabilityGraph:
    nodes: frozenset[Marking]
    initial: Marking
    edges: frozenset[tuple[Marking, str, Marking]]

    def deadlocks(self) -> frozenset[Marking]:
        live = {src for src, _, _ in self.edges}
        return frozenset(m for m in self.nodes if m not in live)


def _firing_data(net: PetriNet):
    """Per-transition pre/post token vectors over a fixed place order."""
    order = sorted(net.places)
    index = {p: i for i, p in enumerate(order)}
    pre = {t: [0] * len(order) for t in net.transitions}
    post = {t: [0] * len(order) for t in net.transitions}
    for (src, dst), weight in net.arcs.items():
        if src in index:
            pre[dst][index[src]] += weight
        else:
            post[src][index[dst]] += weight
    rules = []
    for t in sorted(net.transitions):
        rules.append((t, tuple(pre[t]), tuple(post[t])))
    return order, rules


def _initial_vector(net: PetriNet, order: list[str]) -> tuple[int, ...]:
    return tuple(net.initial_marking.count(p) for p in order)


def is_bounded(net: PetriNet) -> bool:
    """Whether the reachability set is finite.

    Depth-first coverability search keeping the whole ancestor chain of
    each node: a marking equal to an ancestor closes the branch, a marking
    strictly covering an ancestor can be pumped forever and settles the
    question. By Dickson's lemma every infinite chain would contain such a
    pair, so the search always terminates.
    """
    order, rules = _firing_data(net)
    start = _initial_vector(net, order)
    stack: list[tuple[tuple[int, ...], tuple | None]] = [(start, None)]
    while stack:
        marking, parent = stack.pop()
        ancestor = parent
        repeated = False
        while ancestor is not None:
            seen = ancestor[0]
            if seen == marking:
                repeated = True
                break
            if all(a <= b for a, b in zip(seen, marking)):
                return False
            ancestor = ancestor[1]
        if repeated:
            continue
        chain = (marking, parent)
        for _, pre, post in rules:
            if all(have >= need for have, need in zip(marking, pre)):
                successor = tuple(
                    have - need + gain
                    for have, need, gain in zip(marking, pre, post)
                )
                stack.append((successor, chain))
    return True


def reachability_graph(net: PetriNet, max_nodes: int = DEFAULT_NODE_CAP) -> ReachabilityGraph:
    """Breadth-first exploration of all reachable markings.

    Assumes a bounded net (or a caller who accepts StateSpaceExceeded when
    the node cap is hit).
    """
    order, rules = _firing_data(net)
    start = _initial_vector(net, order)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        marking = queue.popleft()
        for t, pre, post in rules:
            if not all(have >= need for have, need in zip(marking, pre)):
                continue
            successor = tuple(
                have - need + gain for have, need, gain in zip(marking, pre, post)
            )
            edges.add((marking, t, successor))
            if successor not in seen:
                if len(seen) >= max_nodes:
                    raise StateSpaceExceeded(
                        f"reachability graph exceeded {max_nodes} markings"
                    )
                seen.add(successor)
                queue.append(successor)

    def to_marking(vector: tuple[int, ...]) -> Marking:
        return Marking.of(dict(zip(order, vector)))

    return ReachabilityGraph(
        nodes=frozenset(to_marking(v) for v in seen),
        initial=to_marking(start),
        edges=frozenset((to_marking(a), t, to_marking(b)) for a, t, b in edges),
    )


def rg_to_dfa(rg: ReachabilityGraph, net: PetriNet) -> Dfa:
    """Language automaton of a reachability graph.

    Edges take their transition's label, silent transitions become silent
    edges removed by determinization. Accepting markings are the declared
    final markings when the net has any, otherwise the deadlocks; a net
    with neither cannot accept at all, which is reported rather than
    silently producing the empty language.
    """
    if net.final_markings is not None:
        accepting = frozenset(net.final_markings) & rg.nodes
    else:
        accepting = rg.deadlocks()
        if not accepting:
            raise NoAcceptingState(
                "no final markings declared and the net never deadlocks"
            )
    triples = frozenset(
        (src, net.transitions[t] if net.transitions[t] is not None else SILENT, dst)
        for src, t, dst in rg.edges
    )
    alphabet = frozenset(
        label for label in net.transitions.values() if label is not None
    )
    return determinize(
        Nfa(
            states=rg.nodes,
            alphabet=alphabet,
            initial=rg.initial,
            accepting=accepting,
            transitions=triples,
        )
    )


def stochastic_rg_to_sdfa(
    net: StochasticPetriNet, max_nodes: int = DEFAULT_NODE_CAP
) -> Sdfa:
    """Reachability graph of a weighted net as an SDFA.

    At each marking the enabled transitions fire with probability
    proportional to their weights; deadlock markings terminate with
    probability 1. Declared final markings must coincide with the
    reachable deadlocks, since any other convention leaves some state's
    probability short of 1.
    """
    rg = reachability_graph(net, max_nodes)
    deadlocks = rg.deadlocks()
    if net.final_markings is not None:
        declared = frozenset(net.final_markings) & rg.nodes
        if declared != deadlocks:
            raise InvalidFinalMarking(
                "declared final markings must be exactly the reachable deadlocks"
            )
    outgoing: dict[Marking, list[tuple[str, Marking]]] = {}
    for src, t, dst in rg.edges:
        outgoing.setdefault(src, []).append((t, dst))
    transitions: dict[tuple[Marking, str], tuple[Marking, Fraction]] = {}
    for src, fired in outgoing.items():
        labels = [net.transitions[t] for t, _ in fired]
        if len(set(labels)) != len(labels):
            raise NondeterministicStochasticModel(
                "two equally labeled transitions enabled at one marking"
            )
        total = sum(net.weights[t] for t, _ in fired)
        for t, dst in fired:
            transitions[(src, net.transitions[t])] = (dst, net.weights[t] / total)
    termination = {m: Fraction(1) for m in deadlocks}
    return _canonical_sdfa(
        rg.initial,
        transitions,
        termination,
        frozenset(net.transitions.values()),
    )
