import collections
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk.embeddings import (
    Gem,
    RotationSystem,
    build_gem,
    count_rotation_systems,
    embed,
    enumerate_rotation_systems,
    facial_walks,
    gem_quotient,
    genus,
    is_orientable,
    parse_rotation_system,
)
from qwalk.errors import InternalConsistencyError, ParameterError, ParseError, PreconditionError
from qwalk.factorizations import permutation_matrix
from qwalk.graph import (
    Graph,
    bipartite_double_cover,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    is_isomorphic,
    path_graph,
    prism_graph,
)
from qwalk.harness import NAMED_GRAPHS

K4_PLANAR = "0: (1, 2, 3), 1: (0, 3, 2), 2: (0, 1, 3), 3: (0, 2, 1)"
K33_FIRST = "0:(3,5,4),1:(3,5,4),2:(3,4,5),3:(0,2,1),4:(0,1,2),5:(0,2,1]"


def genus_histogram(g):
    return dict(collections.Counter(embed(g, r).genus for r in enumerate_rotation_systems(g)))


class TestRotationSystem:
    def test_parse_text_format(self):
        r = parse_rotation_system(K4_PLANAR)
        assert r.pi == ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1))
        assert r.format() == K4_PLANAR

    def test_parse_tolerates_stray_bracket(self):
        r = parse_rotation_system(K33_FIRST)
        assert r.pi[5] == (0, 2, 1)

    @pytest.mark.parametrize("bad", ["0: (1, 2", "0 (1,2)", "0: (1), 0: (1)", "0: (1), 2: (0)", "0: (1, x)"])
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            parse_rotation_system(bad)

    def test_check_rejects_wrong_neighbors(self):
        with pytest.raises(ParameterError):
            RotationSystem.of([(1, 2), (0, 2), (0, 3)]).check(complete_graph(3))

    def test_json_round_trip(self):
        r = parse_rotation_system(K4_PLANAR)
        assert RotationSystem.from_json(r.to_json()) == r
        assert json.loads(r.to_json())["1"] == [0, 3, 2]

    def test_rotated_normalizes_back(self):
        r = parse_rotation_system(K4_PLANAR)
        assert r.rotated([1, 2, 0, 1]).normalized() == r


class TestEnumeration:
    def test_k4_count(self):
        rots = list(enumerate_rotation_systems(complete_graph(4)))
        assert len(rots) == 16 == count_rotation_systems(complete_graph(4))
        assert len(set(rots)) == 16

    def test_single_edge(self):
        assert len(list(enumerate_rotation_systems(path_graph(2)))) == 1

    def test_degree_four(self):
        g = complete_graph(5)
        assert count_rotation_systems(g) == 6 ** 5

    def test_deterministic_order(self):
        g = complete_bipartite_graph(3, 3)
        assert list(enumerate_rotation_systems(g)) == list(enumerate_rotation_systems(g))

    @pytest.mark.parametrize(
        "name, expected",
        [("K33", {1: 40, 2: 24}), ("K2xK3", {0: 2, 1: 38, 2: 24}), ("Q3", {0: 2, 1: 54, 2: 200})],
    )
    def test_genus_histograms(self, name, expected):
        assert genus_histogram(NAMED_GRAPHS[name]) == expected


class TestFaces:
    def test_planar_k4_has_four_faces(self):
        g = complete_graph(4)
        fw = facial_walks(g, parse_rotation_system(K4_PLANAR))
        assert len(fw) == 4
        assert genus(g, fw) == 0

    def test_triangle_two_faces(self):
        g = cycle_graph(3)
        fw = facial_walks(g, RotationSystem.of([(1, 2), (0, 2), (0, 1)]))
        assert sorted(len(f) for f in fw.faces) == [3, 3]

    def test_tree_genus_zero(self):
        g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
        for r in enumerate_rotation_systems(g):
            e = embed(g, r)
            assert e.genus == 0 and len(e.faces) == 1

    def test_k33_stray_bracket_row_genus(self):
        g = NAMED_GRAPHS["K33"]
        assert embed(g, parse_rotation_system(K33_FIRST)).genus == 1

    def test_disconnected_genus_rejected(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        r = RotationSystem.of([(1,), (0,), (3,), (2,)])
        with pytest.raises(PreconditionError):
            genus(g, facial_walks(g, r))

    @pytest.mark.parametrize("name", ["K4", "K33", "K2xK3", "Q3"])
    def test_faces_follow_rotation_rule(self, name):
        g = NAMED_GRAPHS[name]
        arcs = g.arcs
        for r in enumerate_rotation_systems(g):
            fw = facial_walks(g, r)
            flat = sorted(i for f in fw.faces for i in f)
            assert flat == list(range(len(arcs)))
            for f in fw.faces:
                for k, i in enumerate(f):
                    (u0, u1), (w1, u2) = arcs[i], arcs[f[(k + 1) % len(f)]]
                    assert w1 == u1 and u2 == r.successor(u1, u0)
            # every edge occupies exactly two face slots
            slots = collections.Counter(frozenset(arcs[i]) for f in fw.faces for i in f)
            assert set(slots.values()) == {2}
            numer = 2 - g.n + g.num_edges - len(fw)
            assert numer >= 0 and numer % 2 == 0


class TestGem:
    def test_planar_triangle_gem_is_hexagonal_prism(self):
        gem = build_gem(cycle_graph(3), RotationSystem.of([(1, 2), (0, 2), (0, 1)]))
        gem.check_axioms()
        assert len(gem) == 12
        assert is_isomorphic(gem.as_graph, prism_graph(6))
        assert is_orientable(gem)

    def test_planar_square_gem_is_octagonal_prism(self):
        g = cycle_graph(4)
        gem = build_gem(g, RotationSystem.of([(1, 3), (0, 2), (1, 3), (0, 2)]))
        assert is_isomorphic(gem.as_graph, prism_graph(8))

    def test_flags_are_incident_triples(self):
        g = complete_graph(4)
        r = parse_rotation_system(K4_PLANAR)
        gem = build_gem(g, r)
        fw = facial_walks(g, r)
        assert len(gem) == 4 * g.num_edges
        for v, e, f in gem.flags:
            assert v in e
            assert any(set(g.arcs[i]) == set(e) for i in fw.faces[f])

    def test_three_coloring_is_proper(self):
        gem = build_gem(complete_graph(4), parse_rotation_system(K4_PLANAR))
        h = gem.as_graph
        assert h.regular_degree() == 3
        for a in range(h.n):
            assert sorted(gem.edge_color(a, b) for b in h.adjacency[a]) == [0, 1, 2]

    def test_synthetic_odd_cycle_gem_is_not_orientable(self):
        # three perfect matchings of K4 form a valid gem whose graph has triangles
        flags = tuple((0, (0, 1), 0) for _ in range(4))
        gem = Gem(flags, (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))
        gem.check_axioms()
        assert not is_orientable(gem)
        assert gem_quotient(gem) == []

    def test_broken_gem_fails_axioms(self):
        flags = tuple((0, (0, 1), 0) for _ in range(4))
        gem = Gem(flags, (1, 0, 3, 2), (1, 0, 3, 2), (0, 1, 2, 3))
        with pytest.raises(InternalConsistencyError):
            gem.check_axioms()

    @pytest.mark.parametrize("name", ["K4", "K33", "K2xK3"])
    def test_every_rotation_gives_bipartite_gem(self, name):
        g = NAMED_GRAPHS[name]
        for r in enumerate_rotation_systems(g):
            gem = build_gem(g, r)
            gem.check_axioms()
            assert is_orientable(gem)
            assert gem.as_graph.is_bipartite()


class TestGemQuotient:
    def test_planar_triangle_quotient_is_triangular_prism(self):
        gem = build_gem(cycle_graph(3), RotationSystem.of([(1, 2), (0, 2), (0, 1)]))
        quotients = gem_quotient(gem)
        assert len(quotients) >= 1
        assert any(is_isomorphic(q.graph, prism_graph(3)) for q in quotients)

    @pytest.mark.parametrize(
        "g, rot",
        [
            (cycle_graph(3), [(1, 2), (0, 2), (0, 1)]),
            (cycle_graph(4), [(1, 3), (0, 2), (1, 3), (0, 2)]),
            (complete_graph(4), K4_PLANAR),
        ],
    )
    def test_quotient_properties(self, g, rot):
        r = parse_rotation_system(rot) if isinstance(rot, str) else RotationSystem.of(rot)
        gem = build_gem(g, r)
        for q in gem_quotient(gem):
            y = q.graph
            mats = [permutation_matrix(p) for p in q.decomposition.shunts]
            total = sum(mats)
            assert np.array_equal(total, y.adjacency_matrix())
            assert np.array_equal(total, total.T)
            assert is_isomorphic(bipartite_double_cover(y), gem.as_graph)
            alpha = q.involution
            assert all(alpha[alpha[a]] == a != alpha[a] for a in range(len(alpha)))


@st.composite
def cubic_rotation(draw):
    name = draw(st.sampled_from(["K4", "K33", "K2xK3", "Q3", "GCrb`o", "GCY^B_"]))
    g = NAMED_GRAPHS[name]
    rot = []
    for u in range(g.n):
        nb = list(g.adjacency[u])
        if draw(st.booleans()):
            nb = [nb[0], nb[2], nb[1]]
        rot.append(tuple(nb))
    return g, RotationSystem.of(rot)


@settings(max_examples=80, deadline=None)
@given(cubic_rotation())
def test_random_rotation_gem_axioms(case):
    g, r = case
    gem = build_gem(g, r)
    gem.check_axioms()
    assert is_orientable(gem)
    e = embed(g, r)
    assert g.n - g.num_edges + len(e.faces) == 2 - 2 * e.genus
