"""Temperature-annealing sweep over the full spectral pipeline.

At every schedule step the graph is re-weighted at the new temperature, both
multimodal Laplacians (full graph and plausible subgraph) are rebuilt and
decomposed, and every prompt/output pair is scored.  Per-pair work is
vectorized over pairs; each row depends only on its own pair.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from hallspec.bounds import BOUND_TOL, DECAY_TOL
from hallspec.config import Schedule, SweepConfig, diffusion_time, temperature_at
from hallspec.energy import (
    assign_modes_to_hallucination_region,
    mode_mass,
    mode_weights,
    pad_spectrum,
    PlausibilityBand,
    semantic_distortion_closed,
)
from hallspec.graph import (
    GraphError,
    SemanticGraph,
    compose_multimodal_laplacian,
    induced_subgraph,
    node_weights,
)
from hallspec.spectral import Spectrum, eigendecompose

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "t",
    "temperature",
    "pair_id",
    "e_hall_modes",
    "e_hall_rayleigh",
    "d_sem_closed",
    "d_sem_discrete",
    "bound_lower",
    "bound_upper",
    "sandwich_ok",
    "decay_ok",
)


class SweepError(RuntimeError):
    pass


class SweepRow(NamedTuple):
    t: float
    temperature: float
    pair_id: int
    e_hall_modes: float
    e_hall_rayleigh: float
    d_sem_closed: float
    d_sem_discrete: float
    bound_lower: float
    bound_upper: float
    sandwich_ok: bool
    decay_ok: bool


@dataclass
class SweepReport:
    rows: list[SweepRow]
    summary: dict = field(default_factory=dict)

    def sorted(self) -> "SweepReport":
        return SweepReport(sorted(self.rows, key=lambda r: (r.t, r.pair_id)), self.summary)

    @property
    def sandwich_violations(self) -> int:
        return sum(not r.sandwich_ok for r in self.rows)

    @property
    def decay_violations(self) -> int:
        return sum(not r.decay_ok for r in self.rows)

    @property
    def verified(self) -> bool:
        return self.sandwich_violations == 0 and self.decay_violations == 0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def mean_curve(self, name: str = "e_hall_modes") -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Per-step ``(t, T, mean, min, max)`` of a column across pairs."""
        by_t: dict[float, list[SweepRow]] = {}
        for r in self.rows:
            by_t.setdefault(r.t, []).append(r)
        ts = sorted(by_t)
        temps = np.array([by_t[t][0].temperature for t in ts])
        vals = [np.array([getattr(r, name) for r in by_t[t]]) for t in ts]
        return (
            np.array(ts),
            temps,
            np.array([v.mean() for v in vals]),
            np.array([v.min() for v in vals]),
            np.array([v.max() for v in vals]),
        )


@dataclass(frozen=True)
class StepState:
    """Everything a sweep step derives from the graph at one temperature."""

    t: float
    temperature: float
    tau: float
    spectrum: Spectrum
    weights: np.ndarray
    modes: tuple[int, ...]
    lambda_k: np.ndarray
    empty_k_classes: tuple[str, ...]


def prepare_step(
    graph: SemanticGraph,
    plausible: Sequence[int],
    t: float,
    temperature: float,
    tau: float,
    config: SweepConfig,
) -> StepState:
    g = graph.with_temperature(temperature)
    lap = compose_multimodal_laplacian(g, config.coupling, config.metric, config.laplacian_form)
    spectrum = eigendecompose(lap.composed)
    weights = mode_weights(spectrum, node_weights(g, config.coupling))
    n = g.n_nodes
    if len(plausible) >= n:
        return StepState(t, temperature, tau, spectrum, weights, (), spectrum.eigenvalues.copy(), ())
    modes = tuple(assign_modes_to_hallucination_region(spectrum, plausible, config.mode_threshold))
    sub, _ = induced_subgraph(g, plausible)
    present = {str(c) for c in sub.interaction_classes()}
    empty = tuple(str(c) for c in g.interaction_classes() if str(c) not in present)
    try:
        lap_k = compose_multimodal_laplacian(sub, config.coupling, config.metric, config.laplacian_form)
    except GraphError:
        raise SweepError(f"plausible subgraph has no edges in any class (empty: {', '.join(empty)})") from None
    lambda_k = pad_spectrum(np.linalg.eigvalsh(lap_k.composed), n)
    return StepState(t, temperature, tau, spectrum, weights, modes, lambda_k, empty)


def score_pairs(state: StepState, plausible: Sequence[int], pairs: Sequence[tuple[int, int]], config: SweepConfig) -> list[SweepRow]:
    """Score every pair at one schedule step."""
    n = state.spectrum.source_dim
    if not pairs:
        return []
    xs = np.array([x for x, _ in pairs], dtype=int)
    ps = np.array([p for _, p in pairs], dtype=int)
    if xs.min() < 0 or ps.min() < 0 or max(xs.max(), ps.max()) >= n:
        raise SweepError("pair references a node outside the graph")
    tau = state.tau
    lam = state.spectrum.eigenvalues
    u = state.spectrum.eigenvectors
    w = state.weights
    modes = np.array(state.modes, dtype=int)
    same = xs == ps

    dphi = u[xs] - u[ps]
    dphi[same] = 0.0
    sq = dphi**2
    weighted_sq = sq[:, modes] * w[modes]
    damp = np.exp(-tau * lam[modes])
    e_modes = weighted_sq @ damp

    # Rayleigh-Ritz on the damped operator restricted to the hallucinated modes
    norm_s = weighted_sq.sum(axis=1)
    if modes.size:
        lower_s, upper_s = damp.min() * norm_s, damp.max() * norm_s
    else:
        lower_s = upper_s = np.zeros(len(pairs))
    ok_modes = (lower_s - BOUND_TOL <= e_modes) & (e_modes <= upper_s + BOUND_TOL)

    # the normalized form is bounded by the extreme eigenvalues of its diagonal operator
    diag = np.exp(-tau * lam) - np.exp(-tau * state.lambda_k)
    norm = sq.sum(axis=1)
    e_ray = np.where(same, 0.0, (sq @ diag) / np.where(same, 1.0, norm))
    lower = np.full(len(pairs), diag.min())
    upper = np.full(len(pairs), diag.max())
    ok_ray = same | ((lower - BOUND_TOL <= e_ray) & (e_ray <= upper + BOUND_TOL))

    taus = np.linspace(0.0, config.decay_tau_span * tau, config.decay_points)
    curves = weighted_sq @ np.exp(-np.outer(lam[modes], taus))
    decay_ok = np.max(np.diff(curves, axis=1), axis=1, initial=0.0) <= DECAY_TOL

    if modes.size:
        mass = mode_mass(lam[modes], w[modes], tau)
        d_closed = semantic_distortion_closed(mass, PlausibilityBand.uniform(modes.size, config.band), state.temperature)
    else:
        d_closed = 0.0

    d_discrete = _discrete_distortion(state, plausible, ps)

    rows = []
    for k in range(len(pairs)):
        rows.append(
            SweepRow(
                state.t,
                state.temperature,
                k,
                float(e_modes[k]),
                float(e_ray[k]),
                d_closed,
                float(d_discrete[k]),
                float(lower[k]),
                float(upper[k]),
                bool(ok_modes[k] and ok_ray[k]),
                bool(decay_ok[k]),
            )
        )
    return rows


def _discrete_distortion(state: StepState, plausible: Sequence[int], ps: np.ndarray) -> np.ndarray:
    """``-log P(K)`` under the Boltzmann law over nodes with spectral energies to each prompt."""
    n = state.spectrum.source_dim
    if len(plausible) >= n:
        return np.zeros(ps.size)
    mask = np.zeros(n, dtype=bool)
    mask[list(plausible)] = True
    u = state.spectrum.eigenvectors
    a = state.weights * np.exp(-state.tau * state.spectrum.eigenvalues)
    out = {}
    for p in np.unique(ps):
        diff = u - u[p]
        energies = (diff**2) @ a
        logits = -energies / state.temperature
        out[int(p)] = float(logsumexp(logits) - logsumexp(logits[mask]))
    return np.array([max(0.0, out[int(p)]) for p in ps])


def run_sweep(
    graph: SemanticGraph,
    plausible: Sequence[int],
    pairs: Sequence[tuple[int, int]],
    schedule: Schedule,
    config: SweepConfig,
) -> SweepReport:
    """Evaluate every ``(t, pair)`` combination; rows are ordered by ``(t, pair_id)``."""
    plausible = sorted(set(int(v) for v in plausible))
    if not plausible:
        raise SweepError("plausible set is empty")
    if plausible[0] < 0 or plausible[-1] >= graph.n_nodes:
        raise SweepError("plausible set references a node outside the graph")
    rows: list[SweepRow] = []
    lam_min, lam_max = np.inf, -np.inf
    excluded = 0
    empty_classes: set[str] = set()
    for t in schedule.t_grid:
        temperature = temperature_at(schedule, t)
        tau = diffusion_time(config, schedule, temperature)
        state = prepare_step(graph, plausible, t, temperature, tau, config)
        log.debug("t=%g T=%g hallucinated modes=%d", t, temperature, len(state.modes))
        lam_min = min(lam_min, float(state.spectrum.eigenvalues[0]))
        lam_max = max(lam_max, float(state.spectrum.eigenvalues[-1]))
        excluded += int(np.count_nonzero(state.weights[list(state.modes)] <= 0))
        empty_classes.update(state.empty_k_classes)
        rows.extend(score_pairs(state, plausible, pairs, config))
    report = SweepReport(rows)
    report.summary = {
        "lambda_min": lam_min,
        "lambda_max": lam_max,
        "sandwich_violations": report.sandwich_violations,
        "decay_violations": report.decay_violations,
        "excluded_modes": excluded,
        "empty_plausible_classes": sorted(empty_classes),
        "rows": len(rows),
    }
    return report
