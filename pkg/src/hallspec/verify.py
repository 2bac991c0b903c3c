"""Randomized self-verification suites behind the ``verify-*`` commands."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hallspec.bounds import operator_sandwich, rayleigh_quotient, sandwich_for_energy
from hallspec.energy import (
    assign_modes_to_hallucination_region,
    hallucination_energy_modes,
    hallucination_energy_rayleigh,
    mode_weights,
    pad_spectrum,
)
from hallspec.graph import CouplingWeights, compose_multimodal_laplacian, induced_subgraph, node_weights
from hallspec.probability import kl_decomposition_check, random_case
from hallspec.spectral import eigendecompose, mode_coefficients
from hallspec.synthetic import random_hypergraph


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    worst: float
    tolerance: float
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.cases} cases, worst {self.worst:.3e} (tol {self.tolerance:g}), {self.failures} failures"


def kl_residuals(cases: int = 1000, max_n: int = 64, seed: int = 0, tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, failures = 0.0, 0
    for _ in range(cases):
        g, f_p, space = random_case(rng, int(rng.integers(2, max_n + 1)))
        r = abs(kl_decomposition_check(g, f_p, space).residual)
        worst = max(worst, r)
        failures += r > tol
    return CheckResult("kl-decomposition residual", cases, worst, tol, failures)


def rayleigh_cases(cases: int = 1000, seed: int = 0, tol: float = 1e-9) -> CheckResult:
    """Rayleigh quotients of random symmetric matrices stay inside the spectrum."""
    rng = np.random.default_rng(seed)
    worst, failures = 0.0, 0
    for _ in range(cases):
        n = int(rng.integers(1, 12))
        a = rng.normal(size=(n, n))
        a = 0.5 * (a + a.T)
        v = rng.normal(size=n)
        eig = np.linalg.eigvalsh(a)
        q = rayleigh_quotient(a, v)
        scale = max(1.0, float(np.max(np.abs(eig))))
        excess = max(eig[0] - q, q - eig[-1], 0.0) / scale
        worst = max(worst, excess)
        failures += excess > tol
    return CheckResult("rayleigh quotient within spectrum", cases, worst, tol, failures)


def pipeline_sandwich_cases(cases: int = 200, seed: int = 0, tol: float = 1e-9) -> CheckResult:
    """Damped-operator sandwich bounds on random graph pipelines, both energy forms."""
    rng = np.random.default_rng(seed)
    worst, failures, done = 0.0, 0, 0
    while done < cases:
        n = int(rng.integers(6, 30))
        graph = random_hypergraph(rng, n, int(rng.integers(n, 3 * n)))
        coupling = CouplingWeights(
            alpha={m: rng.uniform(0, 2) for m in "TVA"},
            beta={p: rng.uniform(0, 2) for p in ("T-V", "T-A", "V-A")},
            gamma=rng.uniform(0, 2),
        )
        plausible = sorted(rng.choice(n, size=int(rng.integers(2, n)), replace=False).tolist())
        sub, _ = induced_subgraph(graph, plausible)
        if not sub.edges:
            continue
        spec = eigendecompose(compose_multimodal_laplacian(graph, coupling).composed)
        lam_k = pad_spectrum(np.linalg.eigvalsh(compose_multimodal_laplacian(sub, coupling).composed), n)
        w = mode_weights(spec, node_weights(graph, coupling))
        modes = assign_modes_to_hallucination_region(spec, plausible)
        tau = float(rng.uniform(0.0, 5.0))
        x, p = (int(v) for v in rng.choice(n, size=2, replace=False))
        dphi = mode_coefficients(spec, x, p)
        value = hallucination_energy_modes(spec, modes, w, tau, x, p)
        bound = sandwich_for_energy(spec, np.sqrt(w) * dphi, tau, value, modes)
        ray = hallucination_energy_rayleigh(spec.eigenvalues, lam_k, dphi, tau)
        ray_bound = operator_sandwich(np.exp(-tau * spec.eigenvalues) - np.exp(-tau * lam_k), dphi, ray)
        for b in (bound, ray_bound):
            excess = max(-b.slack_lower, -b.slack_upper, 0.0)
            worst = max(worst, excess)
            failures += not b.satisfied
        done += 1
    return CheckResult("pipeline sandwich bounds", cases, worst, tol, failures)
