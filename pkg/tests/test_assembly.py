import numpy as np
import pytest

from qstar import (
    CompoundGraph,
    DeltaChainRecipe,
    ExternalLine,
    FilterN3,
    GateN4,
    GraphVertex,
    InternalEdge,
    InvalidParameterError,
    SingularSystemError,
    build_recipe,
    compound_smatrix,
    convergence_study,
    graph_from_json,
    graph_to_json,
    smatrix,
)
from qstar.assembly import MAGNETIC, V5_DELTA, _open_block_distance

from conftest import rng_for

FLAT_A = 1 / np.sqrt(2)


class TestRecipeStrengths:
    def test_filter_example(self):
        r = DeltaChainRecipe(FilterN3(a=1.0, b=3.0, U=1.0), d=0.1)
        assert r.strengths() == {"v1": 60.0, "v2": 0.0, "v3": -20.0}

    def test_gate_v5_example(self):
        r = DeltaChainRecipe(GateN4(a=1.0, U=1.0), d=0.1, variant=V5_DELTA)
        v = r.strengths()
        assert v == pytest.approx(
            {"v1": 0.0, "v2": -20.0, "v3": -10.0, "v4": -30.0, "v5": -80.0}
        )

    def test_free_couplings_when_unit_parameters(self):
        r = DeltaChainRecipe(FilterN3(a=1.0, b=1.0, U=1.0), d=0.05)
        assert all(v == 0.0 for v in r.strengths().values())

    def test_strengths_scale_inversely_with_d(self):
        f = FilterN3(a=1.0, b=3.0, U=1.0)
        v1 = DeltaChainRecipe(f, d=0.1).strengths()
        v2 = DeltaChainRecipe(f, d=0.05).strengths()
        for key in v1:
            assert v2[key] == pytest.approx(2 * v1[key], rel=1e-14)

    def test_gate_magnetic_strengths(self):
        v = DeltaChainRecipe(GateN4(a=FLAT_A, U=1.0), d=0.1).strengths()
        a = FLAT_A
        assert v["v1"] == pytest.approx(2 * a * (a - 1) / 0.1)
        assert v["v2"] == v["v1"]
        assert v["v3"] == pytest.approx((1 - 2 * a) / 0.1)
        assert v["v4"] == v["v3"]

    def test_invalid_inputs(self):
        with pytest.raises(InvalidParameterError):
            DeltaChainRecipe(FilterN3(1.0, 3.0, 1.0), d=0.0)
        with pytest.raises(InvalidParameterError):
            DeltaChainRecipe(GateN4(1.0, 1.0), d=0.1, variant="bogus")


class TestBuildRecipe:
    def test_filter_topology(self):
        g = build_recipe(DeltaChainRecipe(FilterN3(a=1.0, b=3.0, U=1.0), d=0.1))
        assert [v.id for v in g.vertices] == ["v1", "v2", "v3"]
        assert [l.U for l in g.lines] == [0.0, 0.0, 1.0]
        lengths = {(e.src, e.dst): e.length for e in g.edges}
        assert lengths[("v1", "v2")] == pytest.approx(0.1)
        assert lengths[("v1", "v3")] == pytest.approx(0.1 / 3)

    def test_gate_magnetic_topology(self):
        g = build_recipe(DeltaChainRecipe(GateN4(a=1.0, U=1.0), d=0.1))
        phases = {(e.src, e.dst): e.phase for e in g.edges}
        assert phases[("v2", "v4")] == pytest.approx(np.pi)
        assert phases[("v1", "v3")] == 0.0
        assert len(g.vertices) == 4 and len(g.edges) == 4

    def test_gate_v5_topology(self):
        g = build_recipe(
            DeltaChainRecipe(GateN4(a=1.0, U=1.0), d=0.1, variant=V5_DELTA)
        )
        assert len(g.vertices) == 5 and len(g.edges) == 5
        halves = [e for e in g.edges if "v5" in (e.src, e.dst)]
        assert len(halves) == 2
        for e in halves:
            assert e.length == pytest.approx(0.05)
            assert e.phase == 0.0


class TestCompoundSmatrix:
    def test_single_delta_vertex_transmission(self):
        # Independent oracle: |S21|^2 = k^2 / (k^2 + v^2/4) for one delta
        # of strength v between two free lines.
        v = 4.0
        g = CompoundGraph(
            vertices=(GraphVertex("c", v),),
            lines=(ExternalLine("c", 0.0), ExternalLine("c", 0.0)),
        )
        for k in (0.3, 1.0, 2.5):
            sm = compound_smatrix(g, k**2)
            assert abs(sm.S[1, 0]) ** 2 == pytest.approx(
                k**2 / (k**2 + v**2 / 4), abs=1e-12
            )

    def test_free_chain_transmits_fully(self):
        g = CompoundGraph(
            vertices=(GraphVertex("a", 0.0), GraphVertex("b", 0.0)),
            lines=(ExternalLine("a", 0.0), ExternalLine("b", 0.0)),
            edges=(InternalEdge("a", "b", 0.7),),
        )
        for e in (0.3, 1.7, 9.0):
            sm = compound_smatrix(g, e)
            assert abs(sm.S[1, 0]) == pytest.approx(1.0, abs=1e-12)

    def test_random_graphs_are_flux_unitary(self):
        rng = rng_for("assembly-unitarity")
        for _ in range(40):
            n_vert = int(rng.integers(2, 5))
            ids = [f"w{i}" for i in range(n_vert)]
            vertices = tuple(
                GraphVertex(i, float(rng.uniform(-20, 20))) for i in ids
            )
            # spanning-tree edges keep it connected, plus one optional extra
            edges = [
                InternalEdge(
                    ids[int(rng.integers(0, i))],
                    ids[i],
                    float(rng.uniform(0.05, 0.6)),
                    float(rng.uniform(0, 2 * np.pi)),
                )
                for i in range(1, n_vert)
            ]
            lines = tuple(
                ExternalLine(ids[int(rng.integers(0, n_vert))], float(rng.uniform(0, 3)))
                for _ in range(int(rng.integers(2, 5)))
            )
            graph = CompoundGraph(vertices, lines, tuple(edges))
            energy = float(rng.uniform(0.1, 8.0))
            if any(abs(energy - l.U) < 1e-6 for l in lines):
                continue
            try:
                sm = compound_smatrix(graph, energy)
            except SingularSystemError:
                continue
            assert sm.unitarity_defect() < 1e-8

    def test_chain_approaches_device_amplitudes(self):
        f = FilterN3(a=1.0, b=3.0, U=1.0)
        graph = build_recipe(DeltaChainRecipe(f, d=1e-3))
        approx = compound_smatrix(graph, 4.0)
        exact = smatrix(f.boundary_condition(), f.channels(2.0))
        assert np.abs(approx.S - exact.S).max() < 0.02

    def test_singular_resonance_detected(self):
        g = CompoundGraph(
            vertices=(GraphVertex("a", 0.0), GraphVertex("b", 0.0)),
            lines=(ExternalLine("a", 0.0), ExternalLine("b", 0.0)),
            edges=(InternalEdge("a", "b", 1.0), InternalEdge("a", "b", 1.0)),
        )
        with pytest.raises(SingularSystemError):
            compound_smatrix(g, np.pi**2)

    def test_open_mask_reflects_potentials(self):
        f = FilterN3(a=1.0, b=3.0, U=1.0)
        graph = build_recipe(DeltaChainRecipe(f, d=0.01))
        sm = compound_smatrix(graph, 0.25)
        assert list(sm.open_mask) == [True, True, False]


class TestConvergence:
    def test_filter_error_decreases(self):
        f = FilterN3(a=1.0, b=3.0, U=1.0)
        rep = convergence_study(f, (0.5, 2.0), tuple(0.1 * 2.0**-m for m in range(4)))
        assert rep.monotone
        assert all(o > 0.58 for o in rep.orders)  # shrink factor >= 1.5

    def test_gate_variants_agree_in_the_limit(self):
        g = GateN4(a=1.0, U=1.0)
        d = 1e-3
        mag = compound_smatrix(build_recipe(DeltaChainRecipe(g, d, MAGNETIC)), 4.0)
        v5 = compound_smatrix(build_recipe(DeltaChainRecipe(g, d, V5_DELTA)), 4.0)
        exact = smatrix(g.boundary_condition(), g.channels(2.0))
        eps = np.abs(mag.S - exact.S).max()
        assert np.abs(mag.S - v5.S).max() < 2 * eps

    def test_zero_potential_limit_is_momentum_independent(self):
        f = FilterN3(a=1.0, b=3.0, U=0.0)
        graph = build_recipe(DeltaChainRecipe(f, d=1e-4))
        exact = smatrix(f.boundary_condition(), f.channels(1.0))
        for k in (0.5, 3.0):
            sm = compound_smatrix(graph, k**2)
            assert np.abs(sm.S - exact.S).max() < 5e-3

    def test_open_block_distance_skips_closed_lines(self):
        f = FilterN3(a=1.0, b=3.0, U=1.0)
        graph = build_recipe(DeltaChainRecipe(f, d=1e-3))
        approx = compound_smatrix(graph, 0.25)
        exact = smatrix(f.boundary_condition(), f.channels(0.5))
        dist = _open_block_distance(approx, exact)
        assert dist < 0.02


class TestGraphValidation:
    def test_disconnected_rejected(self):
        with pytest.raises(InvalidParameterError):
            CompoundGraph(
                vertices=(GraphVertex("a", 0.0), GraphVertex("b", 0.0)),
                lines=(ExternalLine("a", 0.0), ExternalLine("b", 0.0)),
            )

    def test_bad_edge_length(self):
        with pytest.raises(InvalidParameterError):
            CompoundGraph(
                vertices=(GraphVertex("a", 0.0), GraphVertex("b", 0.0)),
                lines=(ExternalLine("a", 0.0),),
                edges=(InternalEdge("a", "b", 0.0),),
            )

    def test_unknown_vertex_reference(self):
        with pytest.raises(InvalidParameterError):
            CompoundGraph(
                vertices=(GraphVertex("a", 0.0),),
                lines=(ExternalLine("zz", 0.0),),
            )

    def test_too_few_lines_for_smatrix(self):
        g = CompoundGraph(
            vertices=(GraphVertex("a", 0.0),),
            lines=(ExternalLine("a", 0.0),),
        )
        with pytest.raises(InvalidParameterError):
            compound_smatrix(g, 1.0)


class TestGraphJson:
    def test_round_trip(self):
        g = build_recipe(
            DeltaChainRecipe(GateN4(a=FLAT_A, U=1.0), d=0.1, variant=V5_DELTA)
        )
        again = graph_from_json(graph_to_json(g))
        assert again == g

    def test_schema_keys(self):
        import json

        g = build_recipe(DeltaChainRecipe(FilterN3(1.0, 3.0, 1.0), d=0.1))
        data = json.loads(graph_to_json(g))
        assert set(data) == {"vertices", "lines", "edges"}
        assert set(data["edges"][0]) == {"from", "to", "d", "phi"}
        assert set(data["lines"][0]) == {"vertex", "U"}
        assert set(data["vertices"][0]) == {"id", "strength"}

    def test_malformed_config(self):
        with pytest.raises(InvalidParameterError):
            graph_from_json('{"vertices": [{"id": "a"}], "lines": []}')
