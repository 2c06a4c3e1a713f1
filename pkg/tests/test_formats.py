from fractions import Fraction

import pytest

from entroconf.automata import EventLog
from entroconf.errors import (
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
from entroconf.formats import (
    load_artifact,
    parse_dfg,
    parse_pnml,
    parse_sdfa,
    parse_spnml,
    parse_xes,
    read_dfg,
    serialize_dfg,
    serialize_pnml,
    serialize_sdfa,
    serialize_spnml,
    serialize_xes,
)
from entroconf.petri import Marking, PetriNet, StochasticPetriNet
from entroconf.stochastic import Sdfa, trace_probability


def test_bundled_log(log_e):
    assert log_e.total_instances() == 7
    assert len(log_e.distinct_traces()) == 6
    assert log_e.entries[tuple("bce")] == 2
    assert log_e.alphabet == frozenset("abcde")


def test_bundled_net(net_n):
    assert net_n.places == frozenset({"p0", "p1", "p2", "p3", "p4", "p5"})
    assert sorted(net_n.transitions.values()) == ["a", "b", "c", "d", "e"]
    assert net_n.initial_marking == Marking.of({"p0": 1})
    assert net_n.final_markings is None
    assert net_n.arcs[("p0", "t0")] == 1


def test_bundled_sdfa(sdfa_a):
    assert sdfa_a.initial == "s0"
    assert sdfa_a.termination["s4"] == Fraction(1, 5)
    assert sdfa_a.termination["s5"] == Fraction(1)
    assert sdfa_a.transitions[("s1", "c")] == ("s4", Fraction(1, 2))


def test_bundled_weighted_net(fixtures):
    net = load_artifact(fixtures / "N.spnml")
    assert isinstance(net, StochasticPetriNet)
    # missing weight annotations default to 1
    assert net.weights == {t: Fraction(1) for t in net.transitions}


def test_xes_round_trip(fixtures, log_e):
    assert parse_xes(serialize_xes(log_e)) == log_e
    text = (fixtures / "E.xes").read_text()
    assert parse_xes(text) == log_e


def test_xes_trace_order_is_irrelevant():
    def doc(*bodies):
        traces = "".join(f"<trace>{b}</trace>" for b in bodies)
        return f"<log>{traces}</log>"

    def event(name):
        return f'<event><string key="concept:name" value="{name}"/></event>'

    forward = doc(event("a") + event("b"), event("c"))
    backward = doc(event("c"), event("a") + event("b"))
    assert parse_xes(forward) == parse_xes(backward)
    assert parse_xes(forward).entries == {("a", "b"): 1, ("c",): 1}


def test_xes_accepts_empty_traces():
    log = parse_xes("<log><trace/><trace/></log>")
    assert log.entries == {(): 2}


def test_xes_errors():
    with pytest.raises(MalformedXml):
        parse_xes("<log><trace>")
    with pytest.raises(MissingConceptName):
        parse_xes('<log><trace><event><string key="other" value="x"/></event></trace></log>')
    with pytest.raises(MissingConceptName):
        parse_xes('<log><trace><event><string key="concept:name" value=""/></event></trace></log>')


def test_pnml_round_trip(fixtures, net_n):
    assert parse_pnml(serialize_pnml(net_n)) == net_n
    text = (fixtures / "N.pnml").read_text()
    assert parse_pnml(text) == net_n


def test_pnml_preserves_weights_finals_and_silence():
    net = PetriNet(
        places=frozenset({"p0", "p1"}),
        transitions={"t0": "a", "t1": None},
        arcs={("p0", "t0"): 2, ("t0", "p1"): 1, ("p1", "t1"): 1, ("t1", "p0"): 1},
        initial_marking=Marking.of({"p0": 2}),
        final_markings=frozenset({Marking.of({"p1": 1}), Marking.of({})}),
    )
    restored = parse_pnml(serialize_pnml(net))
    assert restored == net
    assert restored.transitions["t1"] is None
    assert restored.arcs[("p0", "t0")] == 2


def test_pnml_errors():
    with pytest.raises(MalformedXml):
        parse_pnml("<pnml><net>")
    with pytest.raises(DanglingArc):
        parse_pnml(
            '<pnml><net><page><place id="p"/>'
            '<arc id="a" source="p" target="ghost"/></page></net></pnml>'
        )


def test_spnml_round_trip(fixtures):
    net = load_artifact(fixtures / "N.spnml")
    assert parse_spnml(serialize_spnml(net)) == net

    weighted = StochasticPetriNet(
        places=frozenset({"p0", "p1", "p2"}),
        transitions={"ta": "a", "tb": "b"},
        arcs={("p0", "ta"): 1, ("ta", "p1"): 1, ("p0", "tb"): 1, ("tb", "p2"): 1},
        initial_marking=Marking.of({"p0": 1}),
        weights={"ta": Fraction(3, 2), "tb": Fraction(1)},
    )
    restored = parse_spnml(serialize_spnml(weighted))
    assert restored == weighted
    assert restored.weights["ta"] == Fraction(3, 2)


def test_spnml_errors():
    with pytest.raises(NonPositiveWeight):
        parse_spnml(
            '<pnml><net><page><transition id="t"><name><text>a</text></name>'
            '<toolspecific tool="stochastic"><weight>0</weight></toolspecific>'
            "</transition></page></net></pnml>"
        )
    with pytest.raises(SilentTransitionUnsupported):
        parse_spnml(
            '<pnml><net><page><transition id="t"/></page></net></pnml>'
        )


def test_sdfa_round_trip(fixtures, sdfa_a):
    text = serialize_sdfa(sdfa_a)
    assert parse_sdfa(text) == sdfa_a
    assert "4/5" in text
    original = (fixtures / "A.sdfa").read_text()
    assert parse_sdfa(original) == sdfa_a


def test_sdfa_parser_tolerates_comments_and_tiny_sum_slack():
    text = (
        "# comment line\n"
        "initial s0\n"
        "state s0 0.4999999996   # trailing comment\n"
        "\n"
        "state s1 1\n"
        "arc s0 s1 go 1/2\n"
    )
    a = parse_sdfa(text)
    assert a.transitions[("s0", "go")] == ("s1", Fraction(1, 2))
    assert a.termination["s0"] == Fraction("0.4999999996")


def test_sdfa_errors():
    with pytest.raises(ParseError):
        parse_sdfa("state s0 1\n")  # no initial declaration
    with pytest.raises(ParseError):
        parse_sdfa("initial s0\nstate s0 1\nwhatever s0\n")
    with pytest.raises(ParseError):
        parse_sdfa("initial s0\nstate s0 1\narc s0 ghost go 0\n")
    with pytest.raises(ParseError):
        parse_sdfa("initial s0\nstate s0 1\nstate s1 0\narc s0 s1 go 3/2\n")
    with pytest.raises(DuplicateTransition):
        parse_sdfa(
            "initial s0\nstate s0 0\nstate s1 1\n"
            "arc s0 s1 go 1/2\narc s0 s0 go 1/2\n"
        )
    with pytest.raises(StochasticSumViolation):
        parse_sdfa("initial s0\nstate s0 0.9\n")


def test_dfg_fixture_normalizes_exactly(fixtures):
    text = (fixtures / "billing.dfg").read_text()
    dfg = read_dfg(text)
    assert dfg.source == "start"
    assert dfg.sink == "end"
    assert len(dfg.nodes) == 5

    a = parse_dfg(text)
    assert a.initial == "start"
    first = {(label, prob) for label, _, prob in a.out_edges("start")}
    assert first == {("a", Fraction(5, 7)), ("b", Fraction(2, 7))}
    for state in a.states:
        total = a.termination.get(state, Fraction(0)) + sum(
            p for _, _, p in a.out_edges(state)
        )
        assert total == 1
    assert trace_probability(a, ("a", "b", "c", "e")) == Fraction(18, 49)


def test_dfg_round_trip(fixtures):
    text = (fixtures / "billing.dfg").read_text()
    dfg = read_dfg(text)
    assert read_dfg(serialize_dfg(dfg)) == dfg


def test_dfg_errors():
    with pytest.raises(ParseError):
        read_dfg("source s\nnode n a\narc s n 1\narc n end 1\n")  # no sink
    with pytest.raises(ParseError):
        read_dfg("source s\nsink e\nnode n a\narc s n 0\narc n e 1\n")
    with pytest.raises(ParseError):
        read_dfg("source s\nsink e\nnode n a\narc s n 1\narc s n 2\narc n e 1\n")
    with pytest.raises(ParseError):
        read_dfg("source s\nsink e\nnode n a\narc s ghost 1\narc n e 1\n")
    with pytest.raises(DeadEndNode):
        read_dfg("source s\nsink e\nnode n a\narc s n 1\n")
    with pytest.raises(UnreachableNode):
        read_dfg(
            "source s\nsink e\nnode n a\nnode m b\n"
            "arc s n 1\narc n e 1\narc m e 1\n"
        )
    with pytest.raises(ParseError):
        # two successors of the source share a label
        parse_dfg(
            "source s\nsink e\nnode n1 a\nnode n2 a\n"
            "arc s n1 1\narc s n2 1\narc n1 e 1\narc n2 e 1\n"
        )


def test_load_artifact_dispatch(fixtures):
    assert isinstance(load_artifact(fixtures / "E.xes"), EventLog)
    assert isinstance(load_artifact(fixtures / "N.pnml"), PetriNet)
    assert isinstance(load_artifact(fixtures / "N.spnml"), StochasticPetriNet)
    assert isinstance(load_artifact(fixtures / "A.sdfa"), Sdfa)
    assert isinstance(load_artifact(fixtures / "billing.dfg"), Sdfa)
    with pytest.raises(UnknownExtension):
        load_artifact(fixtures / "E.txt")
    with pytest.raises(InputError):
        load_artifact(fixtures / "missing.xes")
