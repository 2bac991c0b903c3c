import json

import numpy as np
import pytest

from hallspec.config import (
    ConfigError,
    Schedule,
    SweepConfig,
    apply_overrides,
    config_from_dict,
    config_to_dict,
    diffusion_time,
    load_config,
    temperature_at,
)
from hallspec.graph import CouplingWeights
from hallspec.synthetic import generate_synthetic, random_hypergraph, sample_pairs


class TestSchedule:
    def test_reciprocal_decay(self):
        s = Schedule(T0=5.0, gamma=0.05)
        assert temperature_at(s, 0.0) == 5.0
        assert temperature_at(s, 10.0) == pytest.approx(5.0 / 1.5)
        assert s.t_grid[0] == 0.1 and s.t_grid[-1] == 10.0

    def test_temperatures_decrease(self):
        assert np.all(np.diff(Schedule().temperatures()) < 0)

    @pytest.mark.parametrize("kw", [{"T0": 0.0}, {"gamma": -0.1}, {"t_grid": ()}, {"t_grid": (1.0, 0.5)}])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            Schedule(**kw)


class TestSweepConfig:
    def test_coupling_from_dict(self):
        cfg = SweepConfig(coupling={"alpha": {"T": 2.0}, "gamma": 0.5})
        assert isinstance(cfg.coupling, CouplingWeights)
        assert cfg.coupling.alpha["T"] == 2.0

    @pytest.mark.parametrize(
        "kw", [{"tau": 0.0}, {"plausible_fraction": 0.0}, {"metric": "l1"}, {"tau_schedule": "linear"}]
    )
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            SweepConfig(**kw)

    def test_diffusion_time(self):
        s = Schedule(T0=4.0)
        assert diffusion_time(SweepConfig(tau=0.5), s, 2.0) == 1.0
        assert diffusion_time(SweepConfig(tau=0.5, tau_schedule="fixed"), s, 2.0) == 0.5

    def test_overrides_skip_none(self):
        cfg = apply_overrides(SweepConfig(), seed=3, tau=None)
        assert cfg.seed == 3 and cfg.tau == 1.0
        with pytest.raises(ConfigError):
            apply_overrides(SweepConfig(), pair_count=-1)


class TestConfigFiles:
    def test_round_trip(self, tmp_path):
        cfg = SweepConfig(tau=0.3, seed=9, coupling={"beta": {"T-V": 2.0}})
        sched = Schedule(T0=2.0, gamma=0.1, t_grid=(0.0, 1.0, 4.0))
        path = tmp_path / "c.json"
        path.write_text(json.dumps(config_to_dict(cfg, sched)))
        cfg2, sched2 = load_config(path)
        assert cfg2 == cfg and sched2 == sched

    def test_grid_range(self):
        _, sched = config_from_dict({"schedule": {"t_grid": {"start": 0.0, "stop": 1.0, "num": 5}}})
        assert sched.t_grid == (0.0, 0.25, 0.5, 0.75, 1.0)

    @pytest.mark.parametrize("doc", [{"bogus": 1}, {"schedule": {"T1": 2}}, {"tau": "fast"}])
    def test_rejects(self, doc):
        with pytest.raises(ConfigError):
            config_from_dict(doc)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{")
        with pytest.raises(ConfigError, match="line 1"):
            load_config(path)


class TestSynthetic:
    def test_shape(self):
        inst = generate_synthetic(SweepConfig(node_count=60, pair_count=40, seed=7, joint_edges=10))
        g = inst.graph
        counts = {m: sum(n.modality == m for n in g.nodes) for m in "TVA"}
        assert counts == {"T": 20, "V": 20, "A": 20}
        assert len(inst.plausible) == 30
        assert len(inst.pairs) == 40
        assert all(x != p and p in inst.plausible for x, p in inst.pairs)
        kinds = {c.kind for c in g.interaction_classes()}
        assert kinds == {"intra", "cross", "joint"}

    def test_deterministic(self):
        cfg = SweepConfig(node_count=30, pair_count=10, seed=2)
        assert generate_synthetic(cfg) == generate_synthetic(cfg)
        assert generate_synthetic(cfg) != generate_synthetic(apply_overrides(cfg, seed=3))

    def test_too_few_nodes(self):
        with pytest.raises(ConfigError):
            generate_synthetic(SweepConfig(node_count=6, neighbors=4))

    def test_pairs_never_equal(self):
        pairs = sample_pairs(np.random.default_rng(0), 3, [0, 1, 2], 300)
        assert all(x != p for x, p in pairs)
        assert {x for x, _ in pairs} == {0, 1, 2}

    def test_random_hypergraph(self):
        g = random_hypergraph(np.random.default_rng(1), 10, 15, node_temperatures=True)
        assert g.n_nodes == 10 and 0 < len(g.edges) <= 15
        assert all(n.temperature is not None for n in g.nodes)
