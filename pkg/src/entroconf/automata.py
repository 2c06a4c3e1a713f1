"""Finite automata over activity alphabets and the language constructions
(trim, product, determinization, skip closure, short-circuiting) that the
conformance measures are built on.

All operations are pure and return canonically renumbered automata (states
are 0..n-1 in breadth-first discovery order with labels visited in sorted
order), so repeated runs produce identical objects.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyLog, StateSpaceExceeded

Trace = tuple[str, ...]

# unlabeled (silent) edge marker for Nfa transitions
SILENT = None


class _Unbounded:
    def __repr__(self) -> str:
        return "UNBOUNDED"


#: skip budget meaning "delete any number of symbols"
UNBOUNDED = _Unbounded()


@dataclass(frozen=True)
class EventLog:
    """Finite multiset of traces with occurrence counts."""

    entries: Mapping[Trace, int]

    def __post_init__(self) -> None:
        for trace, count in self.entries.items():
            if count < 1:
                raise ValueError(f"trace count must be positive, got {count}")
            if any(not label for label in trace):
                raise ValueError("activity labels must be non-empty strings")

    @classmethod
    def from_traces(cls, traces: Iterable[Iterable[str]]) -> "EventLog":
        counts: dict[Trace, int] = {}
        for t in traces:
            key = tuple(t)
            counts[key] = counts.get(key, 0) + 1
        return cls(counts)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(label for trace in self.entries for label in trace)

    def total_instances(self) -> int:
        return sum(self.entries.values())

    def distinct_traces(self) -> frozenset[Trace]:
        return frozenset(self.entries)


@dataclass(frozen=True)
class Dfa:
    """Deterministic finite automaton; transitions map (state, label) to state."""

    states: frozenset
    alphabet: frozenset[str]
    initial: object
    accepting: frozenset
    transitions: Mapping[tuple[object, str], object]

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise ValueError("initial state missing from state set")
        if not self.accepting <= self.states:
            raise ValueError("accepting states missing from state set")
        for (src, label), dst in self.transitions.items():
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition ({src},{label})->{dst} leaves the state set")

    def accepts(self, word: Iterable[str]) -> bool:
        state = self.initial
        for label in word:
            nxt = self.transitions.get((state, label))
            if nxt is None:
                return False
            state = nxt
        return state in self.accepting

    @property
    def is_empty_language(self) -> bool:
        # exact for trimmed automata, conservative otherwise
        return not self.accepting


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton; silent edges carry SILENT instead of a label."""

    states: frozenset
    alphabet: frozenset[str]
    initial: object
    accepting: frozenset
    transitions: frozenset  # of (src, label or SILENT, dst)


@dataclass(frozen=True)
class ShortCircuitGraph:
    """Adjacency counts of a trimmed DFA plus one back edge per accepting state."""

    node_count: int
    adjacency: np.ndarray = field(compare=False)


def _out_map(transitions: Mapping[tuple[object, str], object]) -> dict:
    out: dict[object, list[tuple[str, object]]] = {}
    for (src, label), dst in transitions.items():
        out.setdefault(src, []).append((label, dst))
    for succ in out.values():
        succ.sort()
    return out


def _canonical(initial, accepting, transitions, alphabet) -> Dfa:
    """Renumber states 0..n-1 by BFS from initial, labels in sorted order.

    Drops anything unreachable; the result is the unique representative of
    its isomorphism class, which keeps downstream numerics reproducible.
    """
    out = _out_map(transitions)
    order: dict[object, int] = {initial: 0}
    queue = deque([initial])
    new_transitions: dict[tuple[int, str], int] = {}
    while queue:
        src = queue.popleft()
        for label, dst in out.get(src, ()):
            if dst not in order:
                order[dst] = len(order)
                queue.append(dst)
            new_transitions[(order[src], label)] = order[dst]
    return Dfa(
        states=frozenset(range(len(order))),
        alphabet=frozenset(alphabet),
        initial=0,
        accepting=frozenset(order[s] for s in accepting if s in order),
        transitions=new_transitions,
    )


def _empty_dfa(alphabet) -> Dfa:
    return Dfa(
        states=frozenset({0}),
        alphabet=frozenset(alphabet),
        initial=0,
        accepting=frozenset(),
        transitions={},
    )


def log_to_dfa(log: EventLog) -> Dfa:
    """Prefix-tree acceptor of the distinct traces of a log.

    Counts are ignored: the language measures below are set-of-traces
    properties. Raises EmptyLog for a log with no traces at all.
    """
    if not log.entries:
        raise EmptyLog("cannot build an automaton from an empty log")
    transitions: dict[tuple[int, str], int] = {}
    accepting = set()
    next_state = 1
    for trace in sorted(log.entries):
        state = 0
        for label in trace:
            nxt = transitions.get((state, label))
            if nxt is None:
                nxt = next_state
                transitions[(state, label)] = nxt
                next_state += 1
            state = nxt
        accepting.add(state)
    return _canonical(0, accepting, transitions, log.alphabet)


def trim(a: Dfa) -> Dfa:
    """Restrict to states on some initial-to-accepting path.

    The language is unchanged. When no accepting state is reachable the
    canonical empty automaton (single useless initial state) is returned.
    """
    out = _out_map(a.transitions)
    reachable = {a.initial}
    queue = deque([a.initial])
    while queue:
        src = queue.popleft()
        for _, dst in out.get(src, ()):
            if dst not in reachable:
                reachable.add(dst)
                queue.append(dst)
    rev: dict[object, list[object]] = {}
    for (src, _), dst in a.transitions.items():
        rev.setdefault(dst, []).append(src)
    coreachable = set(a.accepting)
    queue = deque(a.accepting)
    while queue:
        dst = queue.popleft()
        for src in rev.get(dst, ()):
            if src not in coreachable:
                coreachable.add(src)
                queue.append(src)
    useful = reachable & coreachable
    if a.initial not in useful:
        return _empty_dfa(a.alphabet)
    kept = {
        (src, label): dst
        for (src, label), dst in a.transitions.items()
        if src in useful and dst in useful
    }
    return _canonical(a.initial, a.accepting & useful, kept, a.alphabet)


def product(a: Dfa, b: Dfa) -> Dfa:
    """Synchronous product; accepts exactly the traces both operands accept.

    Synchronization happens per label, so differing alphabets need no
    preprocessing: a label missing on one side simply never fires.
    """
    out_a = _out_map(a.transitions)
    out_b = _out_map(b.transitions)
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    transitions: dict[tuple[tuple, str], tuple] = {}
    while queue:
        pair = queue.popleft()
        sa, sb = pair
        succ_b = dict(out_b.get(sb, ()))
        for label, da in out_a.get(sa, ()):
            db = succ_b.get(label)
            if db is None:
                continue
            dst = (da, db)
            transitions[(pair, label)] = dst
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    accepting = {p for p in seen if p[0] in a.accepting and p[1] in b.accepting}
    return _canonical(start, accepting, transitions, a.alphabet & b.alphabet)


def determinize(n: Nfa, max_states: int = 10**6) -> Dfa:
    """Subset construction with silent-edge closure; result is trimmed.

    Subsequence closures of large inputs can blow up exponentially, so the
    number of subset states is capped (StateSpaceExceeded beyond it).
    """
    eps: dict[object, set] = {}
    labeled: dict[tuple[object, str], set] = {}
    for src, label, dst in n.transitions:
        if label is SILENT:
            eps.setdefault(src, set()).add(dst)
        else:
            labeled.setdefault((src, label), set()).add(dst)

    def closure(states: set) -> frozenset:
        todo = list(states)
        closed = set(states)
        while todo:
            s = todo.pop()
            for t in eps.get(s, ()):
                if t not in closed:
                    closed.add(t)
                    todo.append(t)
        return frozenset(closed)

    start = closure({n.initial})
    subsets = {start}
    queue = deque([start])
    transitions: dict[tuple[frozenset, str], frozenset] = {}
    while queue:
        subset = queue.popleft()
        labels = sorted({label for (s, label) in labeled if s in subset})
        for label in labels:
            targets = set()
            for s in subset:
                targets |= labeled.get((s, label), set())
            dst = closure(targets)
            transitions[(subset, label)] = dst
            if dst not in subsets:
                if len(subsets) >= max_states:
                    raise StateSpaceExceeded(
                        f"determinization exceeded {max_states} states"
                    )
                subsets.add(dst)
                queue.append(dst)
    accepting = {subset for subset in subsets if subset & n.accepting}
    dfa = Dfa(
        states=frozenset(subsets),
        alphabet=n.alphabet,
        initial=start,
        accepting=frozenset(accepting),
        transitions=transitions,
    )
    return trim(dfa)


def skip_closure(a: Dfa, k) -> Nfa:
    """Close a language under deletion of up to k symbols per word.

    k may be a nonnegative integer budget or UNBOUNDED (any number of
    deletions, i.e. all subsequences). Skips are realized as silent edges
    running parallel to the labeled ones; a bounded budget is tracked in a
    per-state counter component, so each accepted word spends its own
    deletions independently.
    """
    if k is UNBOUNDED:
        triples = set()
        for (src, label), dst in a.transitions.items():
            triples.add((src, label, dst))
            triples.add((src, SILENT, dst))
        return Nfa(
            states=a.states,
            alphabet=a.alphabet,
            initial=a.initial,
            accepting=a.accepting,
            transitions=frozenset(triples),
        )
    if not isinstance(k, int) or k < 0:
        raise ValueError("skip budget must be a nonnegative integer or UNBOUNDED")
    triples = set()
    for (src, label), dst in a.transitions.items():
        for used in range(k + 1):
            triples.add(((src, used), label, (dst, used)))
            if used < k:
                triples.add(((src, used), SILENT, (dst, used + 1)))
    states = {(s, used) for s in a.states for used in range(k + 1)}
    accepting = {(s, used) for s in a.accepting for used in range(k + 1)}
    return Nfa(
        states=frozenset(states),
        alphabet=a.alphabet,
        initial=(a.initial, 0),
        accepting=frozenset(accepting),
        transitions=frozenset(triples),
    )


def short_circuit(a: Dfa) -> ShortCircuitGraph:
    """Adjacency matrix of a trimmed DFA with one back edge per accepting state.

    The back edges (a fresh symbol, one per accepting state, pointing at the
    initial state) make the graph strongly connected, which is what gives
    finite languages a well-defined, inclusion-monotone growth rate. An
    empty-language automaton yields the 0-node graph.
    """
    if not a.accepting:
        return ShortCircuitGraph(0, np.zeros((0, 0), dtype=np.int64))
    index = {s: i for i, s in enumerate(sorted(a.states))}
    n = len(index)
    m = np.zeros((n, n), dtype=np.int64)
    for (src, _), dst in a.transitions.items():
        m[index[src], index[dst]] += 1
    for acc in a.accepting:
        m[index[acc], index[a.initial]] += 1
    return ShortCircuitGraph(n, m)
