"""
Tests for the cone graph model: validation, structure, subdivision, singular degrees.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cone_graph import (
    ConeGraph,
    Edge,
    complete_graph,
    cycle_graph,
    normalized_laplacian,
    path_graph,
    require_valid,
    singular_degrees,
    star_graph,
    structure,
    subdivide_edge,
    subdivide_evenly,
    to_networkx,
    validate,
)
from errors import GraphValidationError, PreconditionError
from graph_strategies import connected_cone_graphs


def test_builders_produce_valid_graphs(triangle, square, single_edge, star, k4):
    for g in (triangle, square, single_edge, star, k4):
        assert validate(g).ok
    assert triangle.n_vertices == 3 and triangle.n_edges == 3
    assert k4.n_edges == 6
    assert star.vertex_order[0] == "v0"
    assert math.isclose(triangle.total_angle, 2 * math.pi)


def test_vertex_order_is_sorted_and_dense():
    g = ConeGraph.from_edges([("b", "a", 1.0), ("c", "b", 1.0)])
    assert g.vertex_order == ("a", "b", "c")
    assert g.index == {"a": 0, "b": 1, "c": 2}
    tails, heads = g.endpoints
    assert tails.tolist() == [1, 2]
    assert heads.tolist() == [0, 1]


def test_empty_graph_is_rejected():
    report = validate(ConeGraph((), ()))
    assert "empty graph" in report.violations


def test_edgeless_graph_is_rejected():
    report = validate(ConeGraph(("a",), ()))
    assert report.violations == ("no edges",)
    with pytest.raises(GraphValidationError):
        require_valid(ConeGraph(("a",), ()))


def test_validation_lists_every_violation():
    g = ConeGraph(
        ("a", "b", "a"),
        (
            Edge("e0", "a", "b", 1.0),
            Edge("e0", "b", "z", 1.0),
            Edge("e1", "a", "a", 0.5),
            Edge("e2", "a", "b", math.pi),
            Edge("e3", "a", "b", float("nan")),
            Edge("e4", "a", "b", 1.0, phi=4.0),
        ),
    )
    report = validate(g)
    text = "\n".join(report.violations)
    assert "duplicate vertex id 'a'" in text
    assert "duplicate edge id 'e0'" in text
    assert "unknown endpoint 'z'" in text
    assert "self-loop" in text
    assert "angle out of (0,π)" in text
    assert "theta is not finite" in text
    assert "target angle out of (0,π)" in text


def test_disconnected_graph_is_reported():
    g = ConeGraph.from_edges([("a", "b", 1.0), ("c", "d", 1.0)])
    assert validate(g).violations == ("disconnected",)
    with pytest.raises(GraphValidationError) as info:
        require_valid(g)
    assert info.value.exit_code == 3
    assert info.value.violations == ["disconnected"]


def test_isolated_vertex_makes_graph_disconnected():
    g = ConeGraph.from_edges([("a", "b", 1.0)], vertices=["a", "b", "c"])
    assert "disconnected" in validate(g).violations


def test_wide_angles_need_the_flag():
    edges = [("a", "b", 4.0), ("b", "a", 1.0)]
    assert not validate(ConeGraph.from_edges(edges)).ok
    assert validate(ConeGraph.from_edges(edges, allow_wide_angles=True)).ok
    assert validate(ConeGraph.from_edges(edges), allow_wide=True).ok
    with pytest.raises(GraphValidationError):
        require_valid(ConeGraph.from_edges(edges, allow_wide_angles=True), allow_wide=False)


def test_parallel_edges_are_allowed():
    g = cycle_graph(2, [1.0, 2.0])
    assert validate(g).ok
    assert to_networkx(g).number_of_edges("v0", "v1") == 2


def test_structure_of_small_graphs(triangle, square, star, k4):
    tri = structure(triangle)
    assert tri.has_odd_cycle and not tri.bipartite
    assert tri.cycle_rank == 1 and tri.components == 1 and tri.is_complete

    sq = structure(square)
    assert sq.bipartite and not sq.is_complete and sq.cycle_rank == 1

    st_ = structure(star)
    assert st_.bipartite and st_.cycle_rank == 0

    full = structure(k4)
    assert full.is_complete and full.cycle_rank == 3
    assert math.isclose(full.max_theta, math.pi / 2)


def test_structure_dict_is_json_ready(triangle):
    data = structure(triangle).to_dict()
    assert set(data) == {"bipartite", "has_odd_cycle", "cycle_rank", "components", "is_complete", "max_theta"}


def test_subdivide_edge_keeps_the_metric(triangle):
    child, record = subdivide_edge(triangle, "e1", [0.25, 0.75])
    assert child.n_vertices == 4 and child.n_edges == 4
    assert record.inserted_vertices == ("e1~1",)
    assert validate(child).ok
    recovered = record.recovered_angles()
    for e in triangle.edges:
        assert recovered[e.id] == pytest.approx(e.theta, abs=1e-12)
    assert record.edge_map["e1.0"] == ("e1", (0.0, 0.25))
    assert record.edge_map["e1.1"][1][1] == 1.0
    assert record.edge_map["e0"] == ("e0", (0.0, 1.0))


def test_subdivided_path_follows_the_original_orientation(triangle):
    child, _ = subdivide_edge(triangle, "e0", [0.5, 0.5])
    first, second = child.edge_by_id["e0.0"], child.edge_by_id["e0.1"]
    assert first.u == "v0" and first.v == "e0~1"
    assert second.u == "e0~1" and second.v == "v1"


def test_subdivision_splits_target_angles():
    g = path_graph(2, 1.2, phi=0.9)
    child, _ = subdivide_edge(g, "e0", [1 / 3, 2 / 3])
    assert math.fsum(e.phi for e in child.edges) == pytest.approx(0.9, abs=1e-15)


def test_single_fraction_is_the_identity(square):
    child, record = subdivide_edge(square, "e2", [1.0])
    assert child == square
    assert record.inserted_vertices == ()


@pytest.mark.parametrize("fractions", [[], [0.5, 0.6], [1.5, -0.5], [0.5, float("nan")]])
def test_bad_fractions_are_rejected(square, fractions):
    with pytest.raises(PreconditionError):
        subdivide_edge(square, "e0", fractions)


def test_unknown_edge_is_rejected(square):
    with pytest.raises(PreconditionError):
        subdivide_edge(square, "nope", [0.5, 0.5])


def test_inserted_ids_do_not_collide():
    g = ConeGraph.from_edges([("v0", "e0~1", 1.0), ("e0~1", "v0", 1.0)])
    child, record = subdivide_edge(g, "e0", [0.5, 0.5])
    assert record.inserted_vertices == ("e0~1_1",)
    assert validate(child).ok


def test_subdivide_evenly_composes_records(square):
    child, record = subdivide_evenly(square, {"e0": 3, "e2": 2})
    assert child.n_vertices == 4 + 2 + 1
    assert record.parent == square and record.child == child
    assert sorted(record.inserted_vertices) == ["e0~1", "e0~2", "e2~1"]
    recovered = record.recovered_angles()
    assert all(recovered[e.id] == pytest.approx(math.pi / 2, abs=1e-12) for e in square.edges)


@given(connected_cone_graphs(max_vertices=5), st.data())
def test_random_subdivision_recovers_angles(g, data):
    edge = data.draw(st.sampled_from([e.id for e in g.edges]))
    pieces = data.draw(st.integers(1, 4))
    weights = data.draw(st.lists(st.floats(0.1, 1.0), min_size=pieces, max_size=pieces))
    total = math.fsum(weights)
    fractions = [w / total for w in weights]
    fractions[-1] = 1.0 - math.fsum(fractions[:-1])
    child, record = subdivide_edge(g, edge, fractions)
    assert validate(child).ok
    recovered = record.recovered_angles()
    for e in g.edges:
        assert recovered[e.id] == pytest.approx(e.theta, abs=1e-12)


def test_singular_degrees_with_witnesses():
    g = path_graph(3, [math.pi / 2, math.pi / 3])
    found = singular_degrees(g, 6.0)
    assert [round(s.alpha, 12) for s in found] == [2.0, 3.0, 4.0, 6.0]
    six = found[-1]
    assert sorted(six.witnesses) == [("e0", 3), ("e1", 2)]


def test_singular_degrees_include_alpha_max(square):
    assert [s.alpha for s in singular_degrees(square, 2.0)] == pytest.approx([2.0])
    assert singular_degrees(square, 1.99) == []
    with pytest.raises(PreconditionError):
        singular_degrees(square, 0.0)


def test_normalized_laplacian_of_triangle(triangle):
    L = normalized_laplacian(triangle)
    assert np.allclose(np.linalg.eigvalsh(L), [0.0, 1.5, 1.5])


def test_normalized_laplacian_counts_parallel_edges():
    g = cycle_graph(2, [1.0, 1.5])
    assert np.allclose(normalized_laplacian(g), [[1.0, -1.0], [-1.0, 1.0]])


def test_with_phi_forms(square):
    assert np.allclose(square.with_phi(0.5).phi, 0.5)
    by_id = square.with_phi({"e0": 0.1, "e1": 0.2, "e2": 0.3, "e3": 0.4})
    assert by_id.phi.tolist() == [0.1, 0.2, 0.3, 0.4]
    with pytest.raises(PreconditionError):
        square.with_phi([0.1, 0.2])
    with pytest.raises(PreconditionError):
        square.phi


def test_to_dict_round_trips_through_the_constructor(star):
    g = star.with_phi(1.0)
    data = g.to_dict()
    rebuilt = ConeGraph(
        tuple(data["vertices"]),
        tuple(Edge(d["id"], d["u"], d["v"], d["theta"], d.get("phi")) for d in data["edges"]),
    )
    assert rebuilt == g


def test_builders_reject_wrong_angle_counts():
    with pytest.raises(PreconditionError):
        cycle_graph(3, [1.0, 1.0])
    with pytest.raises(PreconditionError):
        complete_graph(3, [1.0])
    assert star_graph(2, [0.5, 0.7]).theta.tolist() == [0.5, 0.7]
