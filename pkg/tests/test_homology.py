import pytest

from strata.errors import BasisError
from strata.gaussian import ZERO, ONE, GaussianRational
from strata.homology import (
    AdaptedBasis,
    BasisElement,
    Cycle,
    LambdaRelationSet,
    pair,
    picard_lefschetz,
    validate_adapted,
)
from support import adapted_basis_for, loop_graph, random_int_cycle, rng, two_level_graph


def test_noncrossing_basis_valid():
    graph = two_level_graph((1,))
    basis = AdaptedBasis(
        graph,
        [
            BasisElement("g1", 0, "noncrossing", None),
            BasisElement("g2", -1, "noncrossing", None),
        ],
        {"g1": {"v1": 1}, "g2": {}},
    )
    assert validate_adapted(basis, graph) == []


def test_crossing_two_edges_violation():
    graph = loop_graph(2)
    basis = AdaptedBasis(
        graph,
        [BasisElement("d1", 0, "crossing", "e1")],
        {"d1": {"e1": 1, "e2": 1}},
    )
    problems = validate_adapted(basis, graph)
    assert any(v.rule == "crossing-pairings" for v in problems)


def test_three_node_fixture_basis(documents):
    doc = documents["three_node_pinch"]
    assert validate_adapted(doc.basis, doc.graph) == []
    assert len(doc.basis.elements) == 4


def test_ordering_violation():
    graph = loop_graph(1)
    basis = AdaptedBasis(
        graph,
        [
            BasisElement("a1", 0, "noncrossing", None),
            BasisElement("d1", 0, "crossing", "e1"),
        ],
        {"a1": {}, "d1": {"e1": 1}},
    )
    assert any(v.rule == "ordering" for v in validate_adapted(basis, graph))


def test_duplicate_paired_edge():
    graph = loop_graph(1)
    basis = AdaptedBasis(
        graph,
        [
            BasisElement("d1", 0, "crossing", "e1"),
            BasisElement("d2", 0, "crossing", "e1"),
        ],
        {"d1": {"e1": 1}, "d2": {"e1": 1}},
    )
    assert any("already paired" in v.detail for v in validate_adapted(basis, graph))


def test_name_edge_collision():
    graph = loop_graph(1)
    basis = AdaptedBasis(graph, [BasisElement("e1", 0, "noncrossing", None)], {"e1": {}})
    assert any(v.rule == "namespace" for v in validate_adapted(basis, graph))


def test_reordering_respecting_rule_stays_valid():
    graph = loop_graph(2)
    names = ["d1", "d2"]
    elements = [BasisElement(n, 0, "crossing", e) for n, e in zip(names, ("e1", "e2"))]
    elements += [BasisElement("x1", 0, "noncrossing", None)]
    pairings = {"d1": {"e1": 1}, "d2": {"e2": 1}, "x1": {}}
    basis = AdaptedBasis(graph, elements, pairings)
    assert validate_adapted(basis, graph) == []
    renamed = AdaptedBasis(
        graph,
        [
            BasisElement("c_a", 0, "crossing", "e1"),
            BasisElement("c_b", 0, "crossing", "e2"),
            BasisElement("z9", 0, "noncrossing", None),
        ],
        {"c_a": {"e1": 1}, "c_b": {"e2": 1}, "z9": {}},
    )
    assert validate_adapted(renamed, graph) == []


def test_pair_bilinearity():
    graph = loop_graph(2)
    basis = adapted_basis_for(graph)
    c = Cycle(basis, {"d_e1": GaussianRational(2), "d_e2": GaussianRational(-3)}, {})
    assert pair(c, "e1") == GaussianRational(2)
    assert pair(c, "e2") == GaussianRational(-3)
    pure = Cycle(basis, {}, {"e1": ONE, "e2": GaussianRational(5)})
    assert pair(pure, "e1") == ZERO and pair(pure, "e2") == ZERO


def test_pair_unknown_edge():
    graph = loop_graph(1)
    basis = adapted_basis_for(graph)
    with pytest.raises(BasisError):
        pair(basis.zero(), "nope")


def test_picard_lefschetz_formula():
    graph = loop_graph(2)
    basis = adapted_basis_for(graph)
    d1 = Cycle(basis, {"d_e1": ONE}, {})
    moved = picard_lefschetz(d1, {"e1": 1})
    assert moved == d1 + Cycle(basis, {}, {"e1": ONE})
    untouched = picard_lefschetz(Cycle(basis, {"n0_0": ONE}, {}), {"e1": 3, "e2": 5})
    assert untouched == Cycle(basis, {"n0_0": ONE}, {})
    both = Cycle(basis, {"d_e1": ONE, "d_e2": ONE}, {})
    moved = picard_lefschetz(both, {"e1": 2, "e2": 5})
    assert moved == both + Cycle(basis, {}, {"e1": GaussianRational(2), "e2": GaussianRational(5)})


def test_picard_lefschetz_properties():
    r = rng(11)
    graph = two_level_graph((2, 3))
    basis = adapted_basis_for(graph, r)
    for _ in range(40):
        c = random_int_cycle(basis, r)
        d = random_int_cycle(basis, r)
        n1 = {e.id: r.randint(0, 3) for e in graph.edges}
        n2 = {e.id: r.randint(0, 3) for e in graph.edges}
        total = {k: n1[k] + n2[k] for k in n1}
        # Additivity in the winding numbers: iterates do not compound.
        assert picard_lefschetz(picard_lefschetz(c, n1), n2) == picard_lefschetz(c, total)
        # Linearity in the cycle.
        assert picard_lefschetz(c + d, n1) == picard_lefschetz(c, n1) + picard_lefschetz(d, n1)
        # Pairings against vanishing cycles are preserved.
        for e in graph.edges:
            assert pair(picard_lefschetz(c, n1), e.id) == pair(c, e.id)


def test_picard_lefschetz_rejects_negative():
    graph = loop_graph(1)
    basis = adapted_basis_for(graph)
    with pytest.raises(BasisError):
        picard_lefschetz(basis.zero(), {"e1": -1})


def test_relation_set_reduction():
    graph = loop_graph(3)
    basis = adapted_basis_for(graph)
    rel = LambdaRelationSet(
        basis,
        [
            (Cycle(basis, {}, {"e1": ONE, "e2": -ONE}), "declared"),
            (Cycle(basis, {}, {"e2": ONE, "e3": -ONE}), "declared"),
        ],
    )
    target = Cycle(basis, {}, {"e1": ONE, "e3": -ONE})
    assert rel.contains(target)
    residual = rel.reduce(Cycle(basis, {}, {"e1": ONE}))
    assert residual == Cycle(basis, {}, {"e3": ONE})


def test_cycle_render_forms():
    graph = loop_graph(2)
    basis = adapted_basis_for(graph)
    assert basis.zero().render() == "0"
    plain = Cycle(basis, {"d_e1": ONE, "d_e2": GaussianRational(-2)}, {"e1": GaussianRational(3)})
    assert plain.render() == "d_e1 - 2*d_e2 + 3*lambda[e1]"
    complex_lead = Cycle(basis, {"d_e1": GaussianRational(1, 1)}, {})
    assert complex_lead.render() == "(1+i)*d_e1"
    negative_lead = Cycle(basis, {"d_e1": -ONE}, {})
    assert negative_lead.render() == "-d_e1"


def test_cycle_arithmetic_and_vector_roundtrip():
    r = rng(12)
    graph = loop_graph(2)
    basis = adapted_basis_for(graph, r)
    for _ in range(20):
        c = random_int_cycle(basis, r)
        assert Cycle.from_vector(basis, c.to_vector()) == c
        assert (c - c).is_zero()
        assert c.scale(2) == c + c
