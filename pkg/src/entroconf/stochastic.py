"""Stochastic conformance measures on weighted trace distributions.

An Sdfa assigns each trace a probability: the product of its transition
probabilities times the termination probability where it ends. Entropy of
that distribution is computed in closed form from expected state visit
counts rather than by enumerating traces. Precision and recall quotient the
entropy of a conjunction (one side's probabilities restricted to the other
side's support) against the operand entropies; entropic relevance prices a
log against a model as an average per-trace compression cost.

Probabilities are exact fractions everywhere outside the entropy numerics,
so construction-level identities (per-state sums, renormalization by mass
1) hold exactly, not within a tolerance.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .automata import EventLog, Trace
from .errors import EmptyConjunction, EmptyLog, NonTerminatingSdfa, NotConverged
from .measures import PrecisionRecall

_SUM_TOLERANCE = Fraction(1, 10**9)
_FIXED_POINT_TOL = 1e-12
_MAX_SWEEPS = 10**7


@dataclass(frozen=True)
class Sdfa:
    """Stochastic DFA: transitions map (state, label) to (state, probability).

    Per state, termination plus outgoing probabilities must sum to 1;
    parsed inputs are allowed 1e-9 of slack, internal constructions are
    exact. States absent from the termination map terminate with 0.
    """

    states: frozenset
    alphabet: frozenset[str]
    initial: object
    transitions: Mapping[tuple[object, str], tuple[object, Fraction]]
    termination: Mapping[object, Fraction]

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise ValueError("initial state missing from state set")
        sums = {s: self.termination.get(s, Fraction(0)) for s in self.states}
        for value in sums.values():
            if not 0 <= value <= 1:
                raise ValueError("termination probability outside [0, 1]")
        for (src, _), (dst, prob) in self.transitions.items():
            if src not in self.states or dst not in self.states:
                raise ValueError("transition endpoint missing from state set")
            if not 0 <= prob <= 1:
                raise ValueError("transition probability outside [0, 1]")
            sums[src] += prob
        for state, total in sums.items():
            if abs(total - 1) > _SUM_TOLERANCE:
                raise ValueError(
                    f"probabilities at state {state!r} sum to {total}, not 1"
                )

    def out_edges(self, state) -> list[tuple[str, object, Fraction]]:
        """Positive-probability outgoing edges, sorted by label."""
        edges = [
            (label, dst, prob)
            for (src, label), (dst, prob) in self.transitions.items()
            if src == state and prob > 0
        ]
        edges.sort(key=lambda e: e[0])
        return edges


@dataclass(frozen=True)
class StochasticEntropy:
    bits: float


@dataclass(frozen=True)
class RelevanceValue:
    """Average per-trace encoding cost, split into its two summands."""

    bits: float
    selector_bits: float
    avg_trace_bits: float


def _canonical_sdfa(initial, transitions, termination, alphabet) -> Sdfa:
    # BFS renumbering, labels in sorted order; same discipline as for plain
    # automata so repeated constructions are bit-identical
    out: dict[object, list[tuple[str, object, Fraction]]] = {}
    for (src, label), (dst, prob) in transitions.items():
        out.setdefault(src, []).append((label, dst, prob))
    for edges in out.values():
        edges.sort(key=lambda e: e[0])
    order: dict[object, int] = {initial: 0}
    queue = deque([initial])
    new_transitions: dict[tuple[int, str], tuple[int, Fraction]] = {}
    while queue:
        src = queue.popleft()
        for label, dst, prob in out.get(src, ()):
            if dst not in order:
                order[dst] = len(order)
                queue.append(dst)
            new_transitions[(order[src], label)] = (order[dst], prob)
    new_termination = {
        order[s]: p for s, p in termination.items() if s in order and p > 0
    }
    return Sdfa(
        states=frozenset(range(len(order))),
        alphabet=frozenset(alphabet),
        initial=0,
        transitions=new_transitions,
        termination=new_termination,
    )


def log_to_sdfa(log: EventLog) -> Sdfa:
    """Frequency prefix tree of a log.

    Transition probability out of a prefix state is the fraction of
    instances continuing with that label among instances reaching the
    prefix; termination is the fraction ending there. Sums are exactly 1
    by construction.
    """
    if not log.entries:
        raise EmptyLog("cannot build an automaton from an empty log")
    reaching: dict[Trace, int] = {}
    ending: dict[Trace, int] = {}
    for trace, count in log.entries.items():
        for i in range(len(trace) + 1):
            prefix = trace[:i]
            reaching[prefix] = reaching.get(prefix, 0) + count
        ending[trace] = ending.get(trace, 0) + count
    transitions: dict[tuple[Trace, str], tuple[Trace, Fraction]] = {}
    for prefix in reaching:
        if prefix:
            parent = prefix[:-1]
            transitions[(parent, prefix[-1])] = (
                prefix,
                Fraction(reaching[prefix], reaching[parent]),
            )
    termination = {
        prefix: Fraction(ending.get(prefix, 0), reached)
        for prefix, reached in reaching.items()
    }
    return _canonical_sdfa((), transitions, termination, log.alphabet)


def _reachable(a: Sdfa) -> list:
    """States reachable along positive-probability edges, in BFS order."""
    seen = {a.initial}
    order = [a.initial]
    queue = deque([a.initial])
    while queue:
        src = queue.popleft()
        for _, dst, _ in a.out_edges(src):
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                queue.append(dst)
    return order


def _termination_reachable(a: Sdfa, within: set) -> set:
    reverse: dict[object, set] = {}
    for (src, _), (dst, prob) in a.transitions.items():
        if prob > 0 and src in within and dst in within:
            reverse.setdefault(dst, set()).add(src)
    found = {s for s in within if a.termination.get(s, Fraction(0)) > 0}
    queue = deque(found)
    while queue:
        dst = queue.popleft()
        for src in reverse.get(dst, ()):
            if src not in found:
                found.add(src)
                queue.append(src)
    return found


def sdfa_entropy(a: Sdfa) -> StochasticEntropy:
    """Shannon entropy in bits of the trace distribution of an SDFA.

    H = sum over states of (expected visit count) * (local entropy of the
    state's outgoing-plus-termination distribution). Visit counts are the
    fixed point of c = e_initial + c P, iterated until the max-norm change
    drops below 1e-12; the fixed point exists only when every reachable
    state can reach positive termination, so that is checked up front
    (NonTerminatingSdfa) instead of letting the iteration run away.
    """
    order = _reachable(a)
    position = {s: i for i, s in enumerate(order)}
    if set(order) - _termination_reachable(a, set(order)):
        raise NonTerminatingSdfa(
            "a reachable state has no positive-probability path to termination"
        )
    n = len(order)
    p = np.zeros((n, n))
    local = np.zeros(n)
    for i, state in enumerate(order):
        h = 0.0
        for _, dst, prob in a.out_edges(state):
            q = float(prob)
            p[i, position[dst]] += q
            h -= q * math.log2(q)
        term = a.termination.get(state, Fraction(0))
        if term > 0:
            q = float(term)
            h -= q * math.log2(q)
        local[i] = h
    e_initial = np.zeros(n)
    e_initial[0] = 1.0
    counts = np.zeros(n)
    for _ in range(_MAX_SWEEPS):
        updated = e_initial + counts @ p
        if float(np.abs(updated - counts).max()) < _FIXED_POINT_TOL:
            counts = updated
            break
        counts = updated
    else:
        raise NotConverged(
            f"visit-count fixed point not within {_FIXED_POINT_TOL} "
            f"after {_MAX_SWEEPS} sweeps"
        )
    return StochasticEntropy(float(counts @ local))


def conjunction(prob_source: Sdfa, structure: Sdfa) -> Sdfa:
    """Restrict prob_source to traces also possible in structure.

    Walks pairs of states along labels that carry positive probability on
    both sides, keeping prob_source's probabilities. Pairs that cannot
    reach positive termination anymore are dropped, and each surviving
    state's probabilities are renormalized by its surviving mass, so the
    result is again a proper distribution. EmptyConjunction when no trace
    has positive probability in both inputs.
    """
    start = (prob_source.initial, structure.initial)
    seen = {start}
    queue = deque([start])
    transitions: dict[tuple[tuple, str], tuple[tuple, Fraction]] = {}
    termination: dict[tuple, Fraction] = {}
    while queue:
        pair = queue.popleft()
        sp, ss = pair
        if (
            prob_source.termination.get(sp, Fraction(0)) > 0
            and structure.termination.get(ss, Fraction(0)) > 0
        ):
            termination[pair] = prob_source.termination[sp]
        structure_out = {
            label: dst for label, dst, _ in structure.out_edges(ss)
        }
        for label, dst_p, prob in prob_source.out_edges(sp):
            dst_s = structure_out.get(label)
            if dst_s is None:
                continue
            dst = (dst_p, dst_s)
            transitions[(pair, label)] = (dst, prob)
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)

    # surviving = pairs that still reach positive termination
    reverse: dict[tuple, set] = {}
    for (src, _), (dst, _) in transitions.items():
        reverse.setdefault(dst, set()).add(src)
    surviving = set(termination)
    queue = deque(surviving)
    while queue:
        dst = queue.popleft()
        for src in reverse.get(dst, ()):
            if src not in surviving:
                surviving.add(src)
                queue.append(src)
    if start not in surviving:
        raise EmptyConjunction("no trace has positive probability in both inputs")

    kept = {
        key: value
        for key, value in transitions.items()
        if key[0] in surviving and value[0] in surviving
    }
    mass: dict[tuple, Fraction] = {
        s: termination.get(s, Fraction(0)) for s in surviving
    }
    for (src, _), (_, prob) in kept.items():
        mass[src] += prob
    renormalized = {
        key: (dst, prob / mass[key[0]]) for key, (dst, prob) in kept.items()
    }
    final_termination = {s: p / mass[s] for s, p in termination.items()}
    return _canonical_sdfa(
        start,
        renormalized,
        final_termination,
        prob_source.alphabet & structure.alphabet,
    )


def _entropy_quotient(numerator: float, denominator: float) -> float:
    # a zero-entropy denominator with a non-empty conjunction means the
    # denominator admits a single trace, and it survived: full agreement
    if denominator == 0.0:
        return 1.0
    return min(1.0, numerator / denominator)


def stochastic_precision_recall(rel: Sdfa, ret: Sdfa) -> PrecisionRecall:
    """Entropy quotients of the two conjunctions against their sources.

    recall = H(conjunction(rel, ret)) / H(rel), precision the mirror
    image; an empty conjunction (disjoint supports) maps to 0/0.
    """
    try:
        shared_rel = conjunction(rel, ret)
        shared_ret = conjunction(ret, rel)
    except EmptyConjunction:
        return PrecisionRecall(precision=0.0, recall=0.0)
    recall = _entropy_quotient(sdfa_entropy(shared_rel).bits, sdfa_entropy(rel).bits)
    precision = _entropy_quotient(
        sdfa_entropy(shared_ret).bits, sdfa_entropy(ret).bits
    )
    return PrecisionRecall(precision=precision, recall=recall)


def trace_probability(a: Sdfa, t: Trace) -> Fraction:
    """Probability the SDFA assigns to one trace; exact, 0 on a missing step."""
    state = a.initial
    prob = Fraction(1)
    for label in t:
        step = a.transitions.get((state, label))
        if step is None:
            return Fraction(0)
        state, p = step
        prob *= p
        if prob == 0:
            return Fraction(0)
    return prob * a.termination.get(state, Fraction(0))


def _log2(value: Fraction) -> float:
    # math.log2 on the integer parts keeps huge/tiny fractions in range
    return math.log2(value.numerator) - math.log2(value.denominator)


def entropic_relevance(log: EventLog, model: Sdfa) -> RelevanceValue:
    """Average bits to encode a log trace with the model as the coder.

    A trace the model can produce costs -log2 of its model probability; a
    trace it cannot costs a uniform background code over the log's alphabet
    plus a terminator, (len+1)*log2(|alphabet|+1). On top comes the entropy
    of the one-bit fitting/non-fitting selector. Instances count with
    multiplicity, so duplicated traces weigh double.
    """
    total = log.total_instances()
    if total == 0:
        raise EmptyLog("cannot score an empty log")
    background_bits = math.log2(len(log.alphabet) + 1)
    fitting = 0
    cost_sum = 0.0
    for trace in sorted(log.entries):
        count = log.entries[trace]
        probability = trace_probability(model, trace)
        if probability > 0:
            fitting += count
            cost_sum += count * -_log2(probability)
        else:
            cost_sum += count * (len(trace) + 1) * background_bits
    rho = Fraction(fitting, total)
    selector = 0.0
    for part in (rho, 1 - rho):
        if part > 0:
            selector -= float(part) * _log2(part)
    avg = cost_sum / total
    return RelevanceValue(
        bits=selector + avg, selector_bits=selector, avg_trace_bits=avg
    )
