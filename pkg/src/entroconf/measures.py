"""Non-stochastic conformance measures.

A trace collection is scored by the asymptotic growth rate of its
short-circuited language; precision and recall are quotients of the growth
factors of the shared behavior against retrieved and relevant behavior.
The variants differ only in a preprocessing step: exact matching compares
languages as-is, partial matching closes both under arbitrary symbol
deletion, controlled partial matching under a per-side deletion budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .automata import (
    UNBOUNDED,
    Dfa,
    determinize,
    product,
    short_circuit,
    skip_closure,
    trim,
)
from .errors import NotConverged

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITERATIONS = 10**6


@dataclass(frozen=True)
class EntropyValue:
    """Topological entropy in bits per symbol, with an empty-language flag."""

    bits_per_symbol: float
    empty_language: bool = False

    def __post_init__(self) -> None:
        if self.empty_language and self.bits_per_symbol != 0.0:
            raise ValueError("the empty language has zero entropy")


@dataclass(frozen=True)
class PrecisionRecall:
    precision: float
    recall: float


def spectral_radius(
    m,
    tol: float = DEFAULT_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """Perron root of a nonnegative square matrix, to relative tolerance tol.

    Power iteration on (M + I) with an all-ones start vector; the +I shift
    makes periodic graphs (pure cycles) converge. Iteration runs per
    strongly connected component because the two-sided Rayleigh bounds that
    certify the tolerance are only valid on irreducible blocks; the radius
    of the whole matrix is the maximum over components.
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = a.shape[0]
    if n == 0:
        return 0.0
    if a.min() < 0:
        raise ValueError("matrix must be nonnegative")
    _, labels = connected_components(
        csr_matrix(a != 0), directed=True, connection="strong"
    )
    best = 0.0
    for comp in np.unique(labels):
        idx = np.flatnonzero(labels == comp)
        if idx.size == 1:
            # a singleton component's radius is its self-loop count
            best = max(best, float(a[idx[0], idx[0]]))
            continue
        block = a[np.ix_(idx, idx)].astype(float) + np.eye(idx.size)
        v = np.ones(idx.size)
        for _ in range(max_iterations):
            w = block @ v
            ratios = w / v
            lo = float(ratios.min())
            hi = float(ratios.max())
            if hi - lo <= tol * hi:
                best = max(best, (lo + hi) / 2.0 - 1.0)
                break
            v = w / w.max()
        else:
            raise NotConverged(
                f"spectral radius not within {tol} after {max_iterations} iterations"
            )
    return best


def _growth_factor(a: Dfa) -> tuple[float, bool]:
    """Growth factor (2 ** entropy) of a language and its emptiness flag."""
    t = trim(a)
    if not t.accepting:
        return 0.0, True
    return spectral_radius(short_circuit(t).adjacency), False


def topological_entropy(a: Dfa) -> EntropyValue:
    """Short-circuit topological entropy of the language of a DFA.

    Trim, add one back edge per accepting state, take log2 of the Perron
    root of the resulting adjacency matrix. The empty language reports
    (0, emptyLanguage); finite languages come out at 0 bits only when they
    hold a single word, since the back edges let distinct words compound.
    """
    growth, empty = _growth_factor(a)
    if empty:
        return EntropyValue(0.0, empty_language=True)
    # trimmed short-circuited graphs have growth >= 1; guard against the
    # iteration midpoint landing a hair below it
    return EntropyValue(max(0.0, math.log2(growth)), False)


def _quotient(shared: tuple[float, bool], denominator: tuple[float, bool]) -> float:
    """Growth-factor ratio with the degenerate-language convention.

    The shared language is included in the denominator one, so an empty
    denominator forces an empty numerator: identical inputs stay at 1 all
    the way down to two empty languages. A non-empty denominator with an
    empty shared language is genuine disagreement, hence 0. Inclusion also
    bounds the ratio by 1; the clamp only absorbs iteration roundoff.
    """
    shared_growth, shared_empty = shared
    denominator_growth, denominator_empty = denominator
    if denominator_empty:
        return 1.0
    if shared_empty:
        return 0.0
    return min(1.0, shared_growth / denominator_growth)


def exact_precision_recall(rel: Dfa, ret: Dfa) -> PrecisionRecall:
    """Precision and recall of exactly matching traces.

    shared = product(rel, ret); precision scores shared against retrieved,
    recall against relevant.
    """
    shared = _growth_factor(product(rel, ret))
    return PrecisionRecall(
        precision=_quotient(shared, _growth_factor(ret)),
        recall=_quotient(shared, _growth_factor(rel)),
    )


def partial_precision_recall(rel: Dfa, ret: Dfa) -> PrecisionRecall:
    """Exact measure after closing both languages under symbol deletion.

    Every trace collection is widened to all subtraces (subsequences) of
    its traces before comparison.
    """
    return exact_precision_recall(
        determinize(skip_closure(trim(rel), UNBOUNDED)),
        determinize(skip_closure(trim(ret), UNBOUNDED)),
    )


def controlled_partial_precision_recall(
    rel: Dfa, ret: Dfa, skips_rel: int, skips_ret: int
) -> PrecisionRecall:
    """Partial matching with per-side deletion budgets.

    skips_rel and skips_ret bound how many symbols may be dropped from a
    relevant resp. retrieved trace; budgets of zero reproduce the exact
    measure.
    """
    return exact_precision_recall(
        determinize(skip_closure(trim(rel), skips_rel)),
        determinize(skip_closure(trim(ret), skips_ret)),
    )
