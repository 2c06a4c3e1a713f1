"""Readers and writers for the five artifact formats.

XML formats: XES event logs (only the concept:name of each event is used),
PNML Petri nets (initialMarking, optional finalmarkings section, silent
transitions by empty name or an invisible marker), and sPNML stochastic
nets (PNML plus a per-transition weight annotation).

Line formats, with '#' comments and blank lines ignored:

    SDFA                            DFG
    initial <stateId>               source <nodeId>
    state <stateId> <termination>   sink <nodeId>
    arc <from> <to> <label> <prob>  node <nodeId> <label>
                                    arc <from> <to> <frequency>

Probabilities and weights may be decimals ("0.5") or fractions ("4/5") and
are kept as exact rationals, so serializing and reparsing is lossless.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .automata import EventLog, Trace
from .errors import (
    DanglingArc,
    DeadEndNode,
    DuplicateTransition,
    InputError,
    MalformedXml,
    MissingConceptName,
    NonPositiveWeight,
    ParseError,
    SilentTransitionUnsupported,
    StochasticSumViolation,
    UnknownExtension,
    UnreachableNode,
)
from .petri import Marking, PetriNet, StochasticPetriNet
from .stochastic import Sdfa

_SUM_TOLERANCE = Fraction(1, 10**9)

# transitions carrying this ProM marker are silent regardless of their name
_INVISIBLE = "$invisible$"


@dataclass(frozen=True)
class Dfg:
    """Directly-follows graph: labeled activity nodes between two endpoints."""

    nodes: Mapping[str, str]
    arcs: Mapping[tuple[str, str], int]
    source: str
    sink: str


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def _parse_xml(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None


def _child_text(element: ET.Element, tag: str) -> str | None:
    for child in element:
        if _local(child.tag) == tag:
            for grandchild in child:
                if _local(grandchild.tag) == "text":
                    return grandchild.text or ""
            return child.text or ""
    return None


def _parse_number(token: str, context: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{context}: cannot read number {token!r}") from None


# --- XES ---------------------------------------------------------------


def parse_xes(text: str) -> EventLog:
    """Event log from an XES document; one trace per <trace> element."""
    root = _parse_xml(text)
    counts: dict[Trace, int] = {}
    for trace_el in root.iter():
        if _local(trace_el.tag) != "trace":
            continue
        events = []
        for event_el in trace_el:
            if _local(event_el.tag) != "event":
                continue
            name = None
            for attr in event_el:
                if attr.get("key") == "concept:name":
                    name = attr.get("value")
                    break
            if not name:
                raise MissingConceptName("event without a concept:name attribute")
            events.append(name)
        trace = tuple(events)
        counts[trace] = counts.get(trace, 0) + 1
    return EventLog(counts)


def serialize_xes(log: EventLog) -> str:
    root = ET.Element("log", {"xes.version": "1.0"})
    for trace in sorted(log.entries):
        for _ in range(log.entries[trace]):
            trace_el = ET.SubElement(root, "trace")
            for label in trace:
                event_el = ET.SubElement(trace_el, "event")
                ET.SubElement(
                    event_el, "string", {"key": "concept:name", "value": label}
                )
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


# --- PNML / sPNML ------------------------------------------------------


def _parse_net_elements(root: ET.Element):
    places: dict[str, int] = {}
    transitions: dict[str, str | None] = {}
    weights: dict[str, Fraction | None] = {}
    arcs: dict[tuple[str, str], int] = {}
    finals: list[Marking] | None = None
    # the <place> elements under <finalmarkings> are idref references, not
    # declarations, and are handled by the finalmarkings branch below
    nested = set()
    for el in root.iter():
        if _local(el.tag) == "finalmarkings":
            nested.update(sub for sub in el.iter() if sub is not el)
    for el in root.iter():
        if el in nested:
            continue
        tag = _local(el.tag)
        if tag == "place":
            ident = el.get("id")
            if ident is None:
                raise ParseError("place without id")
            marking_text = _child_text(el, "initialMarking")
            places[ident] = int(marking_text) if marking_text else 0
        elif tag == "transition":
            ident = el.get("id")
            if ident is None:
                raise ParseError("transition without id")
            name = _child_text(el, "name")
            label = name.strip() if name else ""
            weight: Fraction | None = None
            for child in el:
                if _local(child.tag) != "toolspecific":
                    continue
                if child.get("activity") == _INVISIBLE:
                    label = ""
                for grandchild in child:
                    if _local(grandchild.tag) == "weight":
                        weight = _parse_number(
                            (grandchild.text or "").strip(), f"transition {ident}"
                        )
            transitions[ident] = label or None
            weights[ident] = weight
        elif tag == "arc":
            source = el.get("source")
            target = el.get("target")
            if source is None or target is None:
                raise ParseError("arc without source or target")
            inscription = _child_text(el, "inscription")
            multiplicity = int(inscription) if inscription else 1
            key = (source, target)
            arcs[key] = arcs.get(key, 0) + multiplicity
        elif tag == "finalmarkings":
            finals = []
            for marking_el in el:
                if _local(marking_el.tag) != "marking":
                    continue
                tokens: dict[str, int] = {}
                for place_el in marking_el:
                    if _local(place_el.tag) != "place":
                        continue
                    idref = place_el.get("idref")
                    if idref is None:
                        raise ParseError("final marking place without idref")
                    count_text = _child_text(place_el, "text")
                    if count_text is None:
                        count_text = place_el.text or "1"
                    tokens[idref] = tokens.get(idref, 0) + int(count_text)
                finals.append(Marking.of(tokens))
    for source, target in arcs:
        for endpoint in (source, target):
            if endpoint not in places and endpoint not in transitions:
                raise DanglingArc(f"arc endpoint {endpoint!r} is not declared")
    return places, transitions, weights, arcs, finals


def parse_pnml(text: str) -> PetriNet:
    """Petri net from a PNML document.

    Missing initialMarking means zero tokens; a transition with an empty
    or missing name, or an invisible toolspecific marker, is silent.
    """
    places, transitions, _, arcs, finals = _parse_net_elements(_parse_xml(text))
    try:
        return PetriNet(
            places=frozenset(places),
            transitions=transitions,
            arcs=arcs,
            initial_marking=Marking.of(places),
            final_markings=frozenset(finals) if finals is not None else None,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_spnml(text: str) -> StochasticPetriNet:
    """Stochastic net: PNML plus a positive weight annotation per transition.

    A transition without a weight annotation gets weight 1.
    """
    places, transitions, weights, arcs, finals = _parse_net_elements(_parse_xml(text))
    silent = sorted(t for t, label in transitions.items() if label is None)
    if silent:
        raise SilentTransitionUnsupported(
            f"stochastic nets cannot contain silent transitions: {', '.join(silent)}"
        )
    for ident, weight in weights.items():
        if weight is not None and weight <= 0:
            raise NonPositiveWeight(f"transition {ident} has weight {weight}")
    try:
        return StochasticPetriNet(
            places=frozenset(places),
            transitions=transitions,
            arcs=arcs,
            initial_marking=Marking.of(places),
            final_markings=frozenset(finals) if finals is not None else None,
            weights={
                t: w if w is not None else Fraction(1) for t, w in weights.items()
            },
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _serialize_net(net: PetriNet, weighted: bool) -> str:
    root = ET.Element("pnml")
    net_el = ET.SubElement(root, "net", {"id": "net", "type": "http://www.pnml.org/"})
    page = ET.SubElement(net_el, "page", {"id": "page"})
    for place in sorted(net.places):
        place_el = ET.SubElement(page, "place", {"id": place})
        tokens = net.initial_marking.count(place)
        if tokens:
            marking_el = ET.SubElement(place_el, "initialMarking")
            ET.SubElement(marking_el, "text").text = str(tokens)
    for ident in sorted(net.transitions):
        label = net.transitions[ident]
        transition_el = ET.SubElement(page, "transition", {"id": ident})
        if label is not None:
            name_el = ET.SubElement(transition_el, "name")
            ET.SubElement(name_el, "text").text = label
        else:
            ET.SubElement(
                transition_el,
                "toolspecific",
                {"tool": "entroconf", "version": "1.0", "activity": _INVISIBLE},
            )
        if weighted:
            tool_el = ET.SubElement(
                transition_el, "toolspecific", {"tool": "stochastic", "version": "1.0"}
            )
            weight = net.weights[ident]  # type: ignore[attr-defined]
            ET.SubElement(tool_el, "weight").text = str(weight)
    for source, target in sorted(net.arcs):
        arc_el = ET.SubElement(
            page, "arc", {"id": f"{source}.to.{target}", "source": source, "target": target}
        )
        multiplicity = net.arcs[(source, target)]
        if multiplicity != 1:
            inscription_el = ET.SubElement(arc_el, "inscription")
            ET.SubElement(inscription_el, "text").text = str(multiplicity)
    if net.final_markings is not None:
        finals_el = ET.SubElement(net_el, "finalmarkings")
        for marking in sorted(net.final_markings, key=lambda m: m.tokens):
            marking_el = ET.SubElement(finals_el, "marking")
            for place, count in marking.tokens:
                place_el = ET.SubElement(marking_el, "place", {"idref": place})
                ET.SubElement(place_el, "text").text = str(count)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def serialize_pnml(net: PetriNet) -> str:
    return _serialize_net(net, weighted=False)


def serialize_spnml(net: StochasticPetriNet) -> str:
    return _serialize_net(net, weighted=True)


# --- SDFA ---------------------------------------------------------------


def _records(text: str):
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_number, line.split()


def parse_sdfa(text: str) -> Sdfa:
    """SDFA from the line format; per-state sums checked to 1 +- 1e-9."""
    initial: str | None = None
    termination: dict[str, Fraction] = {}
    arcs: list[tuple[str, str, str, Fraction]] = []
    for line_number, fields in _records(text):
        kind = fields[0]
        if kind == "initial" and len(fields) == 2:
            if initial is not None:
                raise ParseError(f"line {line_number}: repeated initial declaration")
            initial = fields[1]
        elif kind == "state" and len(fields) == 3:
            if fields[1] in termination:
                raise ParseError(f"line {line_number}: state {fields[1]} redeclared")
            termination[fields[1]] = _parse_number(fields[2], f"line {line_number}")
        elif kind == "arc" and len(fields) == 5:
            arcs.append(
                (
                    fields[1],
                    fields[2],
                    fields[3],
                    _parse_number(fields[4], f"line {line_number}"),
                )
            )
        else:
            raise ParseError(f"line {line_number}: unrecognized record {' '.join(fields)!r}")
    if initial is None:
        raise ParseError("missing initial declaration")
    if initial not in termination:
        raise ParseError(f"initial state {initial} is not declared")
    transitions: dict[tuple[str, str], tuple[str, Fraction]] = {}
    for src, dst, label, probability in arcs:
        for endpoint in (src, dst):
            if endpoint not in termination:
                raise ParseError(f"arc endpoint {endpoint} is not declared")
        if not 0 <= probability <= 1:
            raise ParseError(f"arc probability {probability} outside [0, 1]")
        if (src, label) in transitions:
            raise DuplicateTransition(f"second arc for label {label!r} at state {src}")
        transitions[(src, label)] = (dst, probability)
    sums = dict(termination)
    for (src, _), (_, probability) in transitions.items():
        sums[src] += probability
    for state, total in sorted(sums.items()):
        if abs(total - 1) > _SUM_TOLERANCE:
            raise StochasticSumViolation(
                f"probabilities at state {state} sum to {total}, not 1"
            )
    return Sdfa(
        states=frozenset(termination),
        alphabet=frozenset(label for _, label in transitions),
        initial=initial,
        transitions=transitions,
        termination={s: p for s, p in termination.items() if p > 0},
    )


def serialize_sdfa(a: Sdfa) -> str:
    lines = [f"initial {a.initial}"]
    for state in sorted(a.states, key=str):
        lines.append(f"state {state} {a.termination.get(state, Fraction(0))}")
    for (src, label), (dst, probability) in sorted(
        a.transitions.items(), key=lambda item: (str(item[0][0]), item[0][1])
    ):
        lines.append(f"arc {src} {dst} {label} {probability}")
    return "\n".join(lines) + "\n"


# --- DFG ----------------------------------------------------------------


def read_dfg(text: str) -> Dfg:
    """Directly-follows graph from the line format, fully validated."""
    source: str | None = None
    sink: str | None = None
    nodes: dict[str, str] = {}
    arcs: dict[tuple[str, str], int] = {}
    for line_number, fields in _records(text):
        kind = fields[0]
        if kind == "source" and len(fields) == 2:
            if source is not None:
                raise ParseError(f"line {line_number}: repeated source declaration")
            source = fields[1]
        elif kind == "sink" and len(fields) == 2:
            if sink is not None:
                raise ParseError(f"line {line_number}: repeated sink declaration")
            sink = fields[1]
        elif kind == "node" and len(fields) == 3:
            if fields[1] in nodes:
                raise ParseError(f"line {line_number}: node {fields[1]} redeclared")
            nodes[fields[1]] = fields[2]
        elif kind == "arc" and len(fields) == 4:
            try:
                frequency = int(fields[3])
            except ValueError:
                raise ParseError(
                    f"line {line_number}: cannot read frequency {fields[3]!r}"
                ) from None
            if frequency < 1:
                raise ParseError(f"line {line_number}: frequency must be positive")
            if (fields[1], fields[2]) in arcs:
                raise ParseError(
                    f"line {line_number}: repeated arc {fields[1]} -> {fields[2]}"
                )
            arcs[(fields[1], fields[2])] = frequency
        else:
            raise ParseError(f"line {line_number}: unrecognized record {' '.join(fields)!r}")
    if source is None or sink is None:
        raise ParseError("both a source and a sink declaration are required")
    if source == sink or source in nodes or sink in nodes:
        raise ParseError("source and sink must be distinct, undeclared endpoints")
    for src, dst in arcs:
        if src not in nodes and src != source:
            raise ParseError(f"arc leaves unknown node {src!r}")
        if dst not in nodes and dst != sink:
            raise ParseError(f"arc enters unknown node {dst!r}")
        if src == sink or dst == source:
            raise ParseError("arcs may not leave the sink or enter the source")

    outgoing: dict[str, list[str]] = {}
    for src, dst in arcs:
        outgoing.setdefault(src, []).append(dst)
    for node, label in sorted(nodes.items()):
        if node not in outgoing:
            raise DeadEndNode(f"node {node} ({label}) has no outgoing arc")
    if source not in outgoing:
        raise DeadEndNode("the source has no outgoing arc")
    reached = {source}
    frontier = [source]
    while frontier:
        for dst in outgoing.get(frontier.pop(), ()):
            if dst not in reached:
                reached.add(dst)
                frontier.append(dst)
    unreachable = sorted(set(nodes) - reached)
    if unreachable:
        raise UnreachableNode(f"unreachable from the source: {', '.join(unreachable)}")
    return Dfg(nodes=nodes, arcs=arcs, source=source, sink=sink)


def parse_dfg(text: str) -> Sdfa:
    """DFG interpreted as an SDFA.

    An arc is a step to its target and takes the target's label; arcs into
    the sink become termination probability. Frequencies out of each state
    are normalized exactly, so the stochastic-sum invariant holds with no
    tolerance.
    """
    dfg = read_dfg(text)
    totals: dict[str, int] = {}
    for (src, _), frequency in dfg.arcs.items():
        totals[src] = totals.get(src, 0) + frequency
    transitions: dict[tuple[str, str], tuple[str, Fraction]] = {}
    termination: dict[str, Fraction] = {}
    for (src, dst), frequency in dfg.arcs.items():
        probability = Fraction(frequency, totals[src])
        if dst == dfg.sink:
            termination[src] = termination.get(src, Fraction(0)) + probability
            continue
        label = dfg.nodes[dst]
        if (src, label) in transitions:
            raise ParseError(
                f"two successors of {src} carry the label {label!r}; "
                "the stochastic interpretation would be ambiguous"
            )
        transitions[(src, label)] = (dst, probability)
    return Sdfa(
        states=frozenset(dfg.nodes) | {dfg.source},
        alphabet=frozenset(dfg.nodes.values()),
        initial=dfg.source,
        transitions=transitions,
        termination=termination,
    )


def serialize_dfg(dfg: Dfg) -> str:
    lines = [f"source {dfg.source}", f"sink {dfg.sink}"]
    for node, label in sorted(dfg.nodes.items()):
        lines.append(f"node {node} {label}")
    for (src, dst), frequency in sorted(dfg.arcs.items()):
        lines.append(f"arc {src} {dst} {frequency}")
    return "\n".join(lines) + "\n"


# --- dispatch ------------------------------------------------------------

_PARSERS = {
    ".xes": parse_xes,
    ".pnml": parse_pnml,
    ".spnml": parse_spnml,
    ".sdfa": parse_sdfa,
    ".dfg": parse_dfg,
}


def load_artifact(path: str | Path):
    """Parse a file into its domain object, dispatching on the extension."""
    suffix = Path(path).suffix.lower()
    parser = _PARSERS.get(suffix)
    if parser is None:
        raise UnknownExtension(
            f"{path}: expected one of {', '.join(sorted(_PARSERS))}"
        )
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parser(text)
