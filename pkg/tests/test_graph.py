import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_force_laplacian
from hallspec.graph import (
    CouplingWeights,
    GraphError,
    Hyperedge,
    InteractionClass,
    Node,
    build_graph,
    compose_multimodal_laplacian,
    hyperedge_weight,
    hypergraph_laplacian,
    induced_subgraph,
    node_weights,
    pairwise_distance,
)
from hallspec.synthetic import random_hypergraph


class TestInteractionClass:
    def test_cross_is_canonical(self):
        assert InteractionClass.cross("V", "T") == InteractionClass.cross("T", "V")
        assert str(InteractionClass.cross("A", "T")) == "cross:T-A"

    @pytest.mark.parametrize("text", ["intra:V", "cross:T-V", "cross:V-A", "joint"])
    def test_parse_round_trip(self, text):
        assert str(InteractionClass.parse(text)) == text

    @pytest.mark.parametrize("kind,mods", [("intra", ()), ("cross", ("T", "T")), ("joint", ("T",)), ("pair", ())])
    def test_rejects_malformed(self, kind, mods):
        with pytest.raises(GraphError):
            InteractionClass(kind, mods)


class TestBuildGraph:
    def test_derived_classes(self, small_graph):
        classes = [str(e.interaction_class) for e in small_graph.edges]
        assert classes == ["intra:T", "intra:V", "cross:T-V", "joint"]

    def test_duplicate_edges_dropped(self):
        nodes = [Node(0, "T", (0.0,)), Node(1, "T", (1.0,))]
        g = build_graph(nodes, [Hyperedge((0, 1)), Hyperedge((1, 0))], 1.0)
        assert len(g.edges) == 1

    def test_dimension_mismatch_names_node(self):
        nodes = [Node(0, "T", (0.0, 1.0)), Node(1, "V", (1.0,))]
        with pytest.raises(GraphError, match="node 1"):
            build_graph(nodes, [], 1.0)

    @pytest.mark.parametrize(
        "edge",
        [Hyperedge((0,)), Hyperedge((0, 1, 2, 3)), Hyperedge((0, 0)), Hyperedge((0, 9))],
    )
    def test_bad_edges(self, edge):
        nodes = [Node(i, "T", (float(i),)) for i in range(4)]
        with pytest.raises(GraphError):
            build_graph(nodes, [edge], 1.0)

    def test_wrong_explicit_class(self):
        nodes = [Node(0, "T", (0.0,)), Node(1, "V", (1.0,))]
        with pytest.raises(GraphError):
            build_graph(nodes, [Hyperedge((0, 1), InteractionClass.intra("T"))], 1.0)

    @pytest.mark.parametrize("temp", [0.0, -1.0])
    def test_nonpositive_temperature(self, temp):
        with pytest.raises(GraphError):
            build_graph([Node(0, "T", (0.0,))], [], temp)

    def test_with_temperature_keeps_ratios(self):
        nodes = [Node(0, "T", (0.0,), 4.0), Node(1, "T", (1.0,))]
        g = build_graph(nodes, [], 2.0).with_temperature(1.0)
        np.testing.assert_allclose(g.temperatures(), [2.0, 1.0])


class TestWeights:
    def test_distances(self):
        assert pairwise_distance((0, 0), (3, 4)) == 5.0
        assert pairwise_distance((1, 0), (0, 1), "cosine") == pytest.approx(1.0)
        assert pairwise_distance((1, 1), (2, 2), "cosine") == pytest.approx(0.0, abs=1e-15)

    def test_cosine_zero_vector(self):
        with pytest.raises(GraphError):
            pairwise_distance((0, 0), (1, 0), "cosine")

    def test_edge_weight_values(self, small_graph):
        # exp(-5/4) for the intra text edge; the triple has distances sqrt(18), sqrt(13), 1 over T-sum 6
        by_members = {e.members: e for e in small_graph.edges}
        assert hyperedge_weight(small_graph, by_members[(0, 1)]) == pytest.approx(math.exp(-1.25), rel=1e-15)
        expected = math.exp(-(math.sqrt(18) + math.sqrt(13) + 1) / 6)
        assert hyperedge_weight(small_graph, by_members[(1, 2, 3)]) == pytest.approx(expected, rel=1e-15)

    def test_higher_temperature_raises_weight(self, small_graph):
        e = small_graph.edges[0]
        assert hyperedge_weight(small_graph.with_temperature(10.0), e) > hyperedge_weight(small_graph, e)


class TestLaplacian:
    def test_matches_brute_force_per_class(self, small_graph):
        for cls in small_graph.interaction_classes():
            ours = hypergraph_laplacian(small_graph, cls)
            oracle = brute_force_laplacian(small_graph, small_graph.edges_of(cls))
            np.testing.assert_allclose(ours, oracle, atol=1e-14)

    def test_single_pair_block(self, small_graph):
        lap = hypergraph_laplacian(small_graph, InteractionClass.cross("T", "V"))
        expected = np.zeros((4, 4))
        expected[np.ix_([0, 2], [0, 2])] = [[0.5, -0.5], [-0.5, 0.5]]
        np.testing.assert_allclose(lap, expected, atol=1e-15)

    def test_composed_spectrum(self, small_graph):
        # frozen from the entry-by-entry oracle
        lap = compose_multimodal_laplacian(small_graph)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(lap.composed),
            [0.0, 1.0, 1.5917517095361364, 2.4082482904638622],
            atol=1e-12,
        )

    def test_composed_spectrum_weighted(self, small_graph):
        w = CouplingWeights(alpha={"T": 2.0}, beta={"V-T": 0.5}, gamma=3.0)
        lap = compose_multimodal_laplacian(small_graph, w)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(lap.composed),
            [0.0, 1.3580589092924942, 4.000000000000002, 4.141941090707504],
            atol=1e-12,
        )

    def test_missing_class_raises_and_blocks_zero(self, small_graph):
        with pytest.raises(GraphError):
            hypergraph_laplacian(small_graph, InteractionClass.intra("A"))
        lap = compose_multimodal_laplacian(small_graph)
        assert not lap.block(InteractionClass.intra("A")).any()

    def test_no_edges_raises(self):
        g = build_graph([Node(0, "T", (0.0,))], [], 1.0)
        with pytest.raises(GraphError):
            compose_multimodal_laplacian(g)

    def test_edge_unnormalized_form_differs(self, small_graph):
        cls = InteractionClass.joint()
        assert not np.allclose(
            hypergraph_laplacian(small_graph, cls, form="edge_unnormalized"), hypergraph_laplacian(small_graph, cls)
        )

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), metric=st.sampled_from(["euclidean", "cosine"]))
    def test_blocks_psd_unit_bounded(self, seed, metric):
        rng = np.random.default_rng(seed)
        g = random_hypergraph(rng, int(rng.integers(3, 25)), int(rng.integers(2, 40)), node_temperatures=True)
        for cls in g.interaction_classes():
            lap = hypergraph_laplacian(g, cls, metric)
            assert np.array_equal(lap, lap.T)
            eig = np.linalg.eigvalsh(lap)
            assert eig.min() >= -1e-10 and eig.max() <= 1 + 1e-10
            if metric == "euclidean":
                np.testing.assert_allclose(lap, brute_force_laplacian(g, g.edges_of(cls)), atol=1e-12)


class TestCoupling:
    def test_defaults_and_canonical_keys(self):
        w = CouplingWeights(beta={("V", "T"): 2.0})
        assert w.coefficient(InteractionClass.cross("T", "V")) == 2.0
        assert w.alpha == {"T": 1.0, "V": 1.0, "A": 1.0}
        assert w.total() == pytest.approx(8.0)

    def test_asymmetric_beta_rejected(self):
        with pytest.raises(GraphError):
            CouplingWeights(beta={"T-V": 1.0, "V-T": 2.0})

    def test_negative_rejected(self):
        with pytest.raises(GraphError):
            CouplingWeights(gamma=-1.0)

    def test_node_weights(self, small_graph):
        w = CouplingWeights(alpha={"T": 2.0, "V": 3.0}, beta={"T-V": 0.5}, gamma=0.25)
        # nodes 0 and 2 share the only cross edge
        np.testing.assert_allclose(node_weights(small_graph, w), [2.75, 2.25, 3.75, 3.25])


def test_induced_subgraph(small_graph):
    sub, id_map = induced_subgraph(small_graph, [3, 2, 1])
    assert id_map == {1: 0, 2: 1, 3: 2}
    assert [e.members for e in sub.edges] == [(1, 2), (0, 1, 2)]
    assert sub.nodes[0].embedding == (3.0, 4.0)
