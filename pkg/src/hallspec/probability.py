"""Discrete Boltzmann distributions, restriction to a plausible set, and KL gaps.

On a finite outcome space the KL decomposition

    D(g || f) - D(g || f restricted to K) = -log P_f(K)

holds exactly for any ``g`` supported inside the grounded set.  The helpers
here compute each side independently so the identity can be checked.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

# probabilities below this are treated as exact zeros in support checks
ZERO_MASS = 1e-300


class ProbabilityError(ValueError):
    pass


class SupportError(ProbabilityError):
    """A distribution puts mass where it must not."""


class ZeroMassError(ProbabilityError):
    """The plausible set carries no probability."""


class AbsoluteContinuityError(ProbabilityError):
    """``p`` has mass where ``q`` has none."""


@dataclass(frozen=True, eq=False)
class OutcomeSpace:
    plausible_mask: np.ndarray
    grounded_mask: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.plausible_mask, dtype=bool)
        kg = np.asarray(self.grounded_mask, dtype=bool)
        if k.shape != kg.shape or k.ndim != 1:
            raise ProbabilityError("plausible and grounded masks must be 1-d and equal length")
        if not k.any():
            raise ProbabilityError("at least one outcome must be plausible")
        if np.any(kg & ~k):
            raise SupportError("grounded set must lie inside the plausible set")
        object.__setattr__(self, "plausible_mask", k)
        object.__setattr__(self, "grounded_mask", kg)

    @property
    def size(self) -> int:
        return self.plausible_mask.size

    @classmethod
    def full(cls, n: int) -> "OutcomeSpace":
        mask = np.ones(n, dtype=bool)
        return cls(mask, mask)


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    probabilities: np.ndarray
    space: OutcomeSpace | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ProbabilityError("probabilities must be a nonempty vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ProbabilityError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ProbabilityError(f"probabilities sum to {p.sum()!r}, not 1")
        if self.space is not None and self.space.size != p.size:
            raise ProbabilityError("distribution and outcome space differ in size")
        object.__setattr__(self, "probabilities", p)

    def mass(self, mask) -> float:
        return float(self.probabilities[np.asarray(mask, dtype=bool)].sum())


def _normalized_from_logits(logits: np.ndarray) -> np.ndarray:
    p = np.exp(logits - logsumexp(logits))
    return p / p.sum()


def boltzmann_distribution(energies, temperature: float, space: OutcomeSpace | None = None) -> DiscreteDistribution:
    """``p_i = exp(-E_i/T) / Z`` evaluated with a max shift."""
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        raise ProbabilityError("energy vector is empty")
    if not temperature > 0:
        raise ProbabilityError(f"temperature must be positive, got {temperature}")
    if not np.all(np.isfinite(e)):
        raise ProbabilityError("energies must be finite")
    return DiscreteDistribution(_normalized_from_logits(-e / temperature), space)


def log_partition(energies, temperature: float, mask=None) -> float:
    """``log sum exp(-E_i/T)`` over all outcomes, or over ``mask`` only."""
    logits = -np.asarray(energies, dtype=float) / temperature
    if mask is not None:
        logits = logits[np.asarray(mask, dtype=bool)]
    return float(logsumexp(logits))


def restrict(dist: DiscreteDistribution, mask) -> DiscreteDistribution:
    """Condition ``dist`` on ``mask``: zero outside, renormalized inside."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != dist.probabilities.shape:
        raise ProbabilityError("mask and distribution differ in size")
    p = np.where(mask, dist.probabilities, 0.0)
    total = p.sum()
    if total <= ZERO_MASS:
        raise ZeroMassError("restriction set has zero probability")
    if np.array_equal(p, dist.probabilities):
        return dist
    p = p / total
    return DiscreteDistribution(p / p.sum(), dist.space)


def kl_divergence(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """``sum p_i log(p_i/q_i)`` with ``0 log 0 = 0``."""
    pp, qq = p.probabilities, q.probabilities
    if pp.shape != qq.shape:
        raise ProbabilityError("distributions differ in size")
    support = pp > ZERO_MASS
    if np.any(support & (qq <= ZERO_MASS)):
        raise AbsoluteContinuityError("p has mass where q is zero")
    ps, qs = pp[support], qq[support]
    return float(max(0.0, np.sum(ps * (np.log(ps) - np.log(qs)))))


def semantic_distortion_discrete(f_p: DiscreteDistribution, space: OutcomeSpace) -> float:
    """``-log P_f(K)`` for the plausible set of ``space``."""
    mask = space.plausible_mask
    if mask.all():
        return 0.0
    mass = f_p.mass(mask)
    if mass <= ZERO_MASS:
        raise ZeroMassError("plausible set has zero probability")
    return float(-np.log(mass))


class KLDecomposition(NamedTuple):
    kl_full: float
    kl_restricted: float
    distortion: float
    residual: float

    @property
    def gap(self) -> float:
        return self.kl_full - self.kl_restricted


def kl_decomposition_check(g: DiscreteDistribution, f_p: DiscreteDistribution, space: OutcomeSpace) -> KLDecomposition:
    """Evaluate both sides of the KL decomposition and their residual."""
    if g.probabilities.shape != f_p.probabilities.shape or g.probabilities.size != space.size:
        raise ProbabilityError("g, f_p and the outcome space must have equal size")
    if np.any((g.probabilities > ZERO_MASS) & ~space.grounded_mask):
        raise SupportError("g has mass outside the grounded set")
    if f_p.mass(space.plausible_mask) <= ZERO_MASS:
        raise ZeroMassError("f_p gives the plausible set zero probability")
    if np.any((g.probabilities > ZERO_MASS) & (f_p.probabilities <= ZERO_MASS)):
        raise AbsoluteContinuityError("g has mass where f_p is zero")
    full = kl_divergence(g, f_p)
    restricted = kl_divergence(g, restrict(f_p, space.plausible_mask))
    distortion = semantic_distortion_discrete(f_p, space)
    return KLDecomposition(full, restricted, distortion, full - restricted - distortion)


def random_distribution(rng: np.random.Generator, n: int, support=None) -> DiscreteDistribution:
    """Normalized exponentials of uniform deviates, optionally on ``support``."""
    logits = rng.uniform(-3.0, 3.0, size=n)
    w = np.exp(logits)
    if support is not None:
        w = np.where(np.asarray(support, dtype=bool), w, 0.0)
    return DiscreteDistribution(w / w.sum())


def random_space(rng: np.random.Generator, n: int) -> OutcomeSpace:
    """Random nested masks with at least one grounded outcome."""
    plausible = rng.random(n) < rng.uniform(0.2, 0.9)
    anchor = rng.integers(n)
    plausible[anchor] = True
    grounded = plausible & (rng.random(n) < 0.6)
    grounded[anchor] = True
    return OutcomeSpace(plausible, grounded)


def random_case(rng: np.random.Generator, n: int) -> tuple[DiscreteDistribution, DiscreteDistribution, OutcomeSpace]:
    """A valid ``(g, f_p, space)`` triple for the decomposition check."""
    space = random_space(rng, n)
    f_p = random_distribution(rng, n)
    g = random_distribution(rng, n, support=space.grounded_mask)
    return g, f_p, space
