import numpy as np
import pytest

from hallspec.bounds import sandwich_for_energy, tau_decay_check
from hallspec.config import Schedule, SweepConfig, diffusion_time, temperature_at
from hallspec.energy import (
    PlausibilityBand,
    assign_modes_to_hallucination_region,
    hallucination_energy_modes,
    hallucination_energy_rayleigh,
    mode_mass,
    mode_weights,
    pad_spectrum,
    semantic_distortion_closed,
    total_spectral_energy,
)
from hallspec.graph import compose_multimodal_laplacian, induced_subgraph, node_weights
from hallspec.probability import OutcomeSpace, boltzmann_distribution, semantic_distortion_discrete
from hallspec.spectral import eigendecompose, mode_coefficients
from hallspec.sweep import SweepError, run_sweep
from hallspec.synthetic import generate_synthetic

SMALL = SweepConfig(node_count=12, neighbors=2, cross_neighbors=1, joint_edges=4, pair_count=8, seed=5)
SCHEDULE = Schedule(t_grid=(0.1, 2.0, 6.0, 10.0))


@pytest.fixture(scope="module")
def small_run():
    inst = generate_synthetic(SMALL)
    return inst, run_sweep(inst.graph, inst.plausible, inst.pairs, SCHEDULE, SMALL)


def scalar_row(inst, t, pair, config=SMALL, schedule=SCHEDULE):
    """Recompute one row through the scalar public API only."""
    temp = temperature_at(schedule, t)
    tau = diffusion_time(config, schedule, temp)
    g = inst.graph.with_temperature(temp)
    spec = eigendecompose(compose_multimodal_laplacian(g, config.coupling).composed)
    w = mode_weights(spec, node_weights(g, config.coupling))
    modes = assign_modes_to_hallucination_region(spec, inst.plausible)
    sub, _ = induced_subgraph(g, inst.plausible)
    lam_k = pad_spectrum(np.linalg.eigvalsh(compose_multimodal_laplacian(sub, config.coupling).composed), g.n_nodes)
    x, p = pair
    dphi = mode_coefficients(spec, x, p)
    e_modes = hallucination_energy_modes(spec, modes, w, tau, x, p)
    e_ray = hallucination_energy_rayleigh(spec.eigenvalues, lam_k, dphi, tau)
    bound = sandwich_for_energy(spec, np.sqrt(w) * dphi, tau, e_modes, modes)
    taus = np.linspace(0, 2 * tau, 50)
    decay = tau_decay_check(taus, [hallucination_energy_modes(spec, modes, w, s, x, p) for s in taus])
    mass = mode_mass(spec.eigenvalues[modes], w[modes], tau)
    d_closed = semantic_distortion_closed(mass, PlausibilityBand.uniform(len(modes), config.band), temp)
    energies = [total_spectral_energy(spec, w, tau, v, p) for v in range(g.n_nodes)]
    mask = np.zeros(g.n_nodes, bool)
    mask[list(inst.plausible)] = True
    d_disc = semantic_distortion_discrete(boltzmann_distribution(energies, temp), OutcomeSpace(mask, mask))
    return e_modes, e_ray, d_closed, d_disc, bound.satisfied, decay.ok


def test_rows_match_scalar_api(small_run):
    inst, report = small_run
    assert len(report.rows) == len(SCHEDULE.t_grid) * len(inst.pairs)
    for row in report.rows[::3]:
        e_modes, e_ray, d_closed, d_disc, sandwich, decay = scalar_row(inst, row.t, inst.pairs[row.pair_id])
        assert row.e_hall_modes == pytest.approx(e_modes, abs=1e-12)
        assert row.e_hall_rayleigh == pytest.approx(e_ray, abs=1e-12)
        assert row.d_sem_closed == pytest.approx(d_closed, abs=1e-12)
        assert row.d_sem_discrete == pytest.approx(d_disc, abs=1e-12)
        assert row.sandwich_ok == sandwich and row.decay_ok == decay


def test_verdicts_and_summary(small_run):
    _, report = small_run
    assert report.verified
    s = report.summary
    assert s["rows"] == len(report.rows)
    assert 0 <= s["lambda_min"] < s["lambda_max"]
    assert s["sandwich_violations"] == 0 and s["decay_violations"] == 0


def test_rows_within_reported_bounds(small_run):
    _, report = small_run
    lo, hi, e = report.column("bound_lower"), report.column("bound_upper"), report.column("e_hall_rayleigh")
    assert np.all(lo - 1e-9 <= e) and np.all(e <= hi + 1e-9)


def test_pair_order_independence(small_run):
    inst, report = small_run
    reversed_pairs = inst.pairs[::-1]
    rev = run_sweep(inst.graph, inst.plausible, reversed_pairs, SCHEDULE, SMALL)
    n = len(inst.pairs)
    by_key = {(r.t, r.pair_id): r for r in rev.rows}
    for r in report.rows:
        other = by_key[(r.t, n - 1 - r.pair_id)]
        assert other[3:] == pytest.approx(r[3:], abs=1e-12)


def test_full_plausible_set_is_zero():
    inst = generate_synthetic(SMALL)
    report = run_sweep(inst.graph, range(SMALL.node_count), inst.pairs, SCHEDULE, SMALL)
    for name in ("e_hall_modes", "e_hall_rayleigh", "d_sem_closed", "d_sem_discrete"):
        assert np.all(report.column(name) == 0.0)


def test_same_node_pair_scores_zero():
    inst = generate_synthetic(SMALL)
    p = inst.plausible[0]
    report = run_sweep(inst.graph, inst.plausible, [(p, p)], SCHEDULE, SMALL)
    assert all(r.e_hall_modes == 0.0 and r.e_hall_rayleigh == 0.0 and r.sandwich_ok for r in report.rows)


@pytest.mark.parametrize("plausible", [[], [99]])
def test_bad_plausible_set(plausible):
    inst = generate_synthetic(SMALL)
    with pytest.raises(SweepError):
        run_sweep(inst.graph, plausible, inst.pairs, SCHEDULE, SMALL)


def test_edgeless_plausible_subgraph():
    inst = generate_synthetic(SMALL)
    with pytest.raises(SweepError):
        run_sweep(inst.graph, [0], [(1, 0)], SCHEDULE, SMALL)


def test_mean_curve(small_run):
    _, report = small_run
    ts, temps, mean, lo, hi = report.mean_curve("e_hall_rayleigh")
    assert list(ts) == list(SCHEDULE.t_grid)
    assert np.all(lo <= mean) and np.all(mean <= hi)
