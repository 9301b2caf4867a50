"""Channel noise models and eavesdropper strategies for in-flight blocks.

Noise is i.i.d. single-qubit depolarizing: each of the five qubits suffers
X, Y, or Z with probability p/3 each.  Loss follows a fiber model: each of
the block's five photons survives with probability 10^(-distance*loss/10),
and the block is kept only if all five arrive.  A weak-coherent-pulse
source is modeled by Poisson photon counts per pulse; a block is counted
as a splitting-attack leak opportunity when at least three of its five
pulses are multi-photon, since fewer than three exposed positions reveal
nothing about a distance-3 codeword.

The interceptor decodes with a guessed pattern exactly as a legitimate
receiver would (syndrome, correction, logical readout) and retransmits a
fresh codeword of her measured bit under that same pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import code5
from .patterns import Pattern, PatternSet, all_patterns, sets_sharing
from .quantum_core import apply_pauli_string, apply_permutation

_PAULI_LETTERS = ("X", "Y", "Z")

UNIFORM_KNOWLEDGE = "uniform"


@dataclass(frozen=True)
class NoiseModel:
    """Channel parameters for one session.

    Attributes
    ----------
    per_qubit_flip_prob : float
        Depolarizing strength p in [0, 1]; each qubit independently gets
        X, Y, or Z with probability p/3 each.
    distance_km : float
        Fiber length, >= 0.
    loss_db_per_km : float
        Attenuation rate, >= 0.
    mean_photon_number : float
        Poisson mean per pulse; 0 models an ideal single-photon source.
    """

    per_qubit_flip_prob: float = 0.0
    distance_km: float = 0.0
    loss_db_per_km: float = 0.2
    mean_photon_number: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.per_qubit_flip_prob <= 1.0:
            raise ValueError(f"per_qubit_flip_prob must be in [0,1], got {self.per_qubit_flip_prob}")
        if self.distance_km < 0.0:
            raise ValueError(f"distance_km must be >= 0, got {self.distance_km}")
        if self.loss_db_per_km < 0.0:
            raise ValueError(f"loss_db_per_km must be >= 0, got {self.loss_db_per_km}")
        if self.mean_photon_number < 0.0:
            raise ValueError(f"mean_photon_number must be >= 0, got {self.mean_photon_number}")

    @property
    def photon_survival_prob(self) -> float:
        """Per-photon survival 10^(-distance * loss / 10), in [0, 1]."""
        return 10.0 ** (-self.distance_km * self.loss_db_per_km / 10.0)


@dataclass(frozen=True)
class EveStrategy:
    """What the eavesdropper does and what she believes the secret is.

    ``knowledge`` is either a guessed :class:`PatternSet` (which may share
    2, 1, or 0 patterns with the true secret) or the string ``"uniform"``
    for a guess drawn uniformly from all 120 patterns per block.
    """

    kind: str = "none"
    knowledge: Union[PatternSet, str, None] = None

    def __post_init__(self) -> None:
        if self.kind not in ("none", "intercept_resend"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "intercept_resend":
            if self.knowledge != UNIFORM_KNOWLEDGE and not isinstance(self.knowledge, PatternSet):
                raise ValueError("intercept_resend needs a PatternSet or 'uniform' knowledge")

    @classmethod
    def none(cls) -> "EveStrategy":
        return cls(kind="none")

    @classmethod
    def intercept_resend(cls, knowledge: Union[PatternSet, str]) -> "EveStrategy":
        return cls(kind="intercept_resend", knowledge=knowledge)

    @property
    def active(self) -> bool:
        return self.kind != "none"


@dataclass(frozen=True)
class EveRecord:
    """Outcome of one interception: the guess, the measured bit."""

    guessed_pattern: Pattern
    eve_bit: int
    acted: bool = True


def apply_depolarizing(
    state: np.ndarray, p: float, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    """Depolarize each qubit independently with total error probability p.

    Returns the resulting state and the number of qubits hit.  The weight
    is diagnostic only; protocol parties never see it.  Draw order: one
    uniform per qubit 1..5, plus one choice draw per qubit that errs.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must be in [0,1], got {p}")
    weight = 0
    for qubit in range(1, 6):
        if rng.random() < p:
            letter = _PAULI_LETTERS[int(rng.integers(0, 3))]
            label = "I" * (qubit - 1) + letter + "I" * (5 - qubit)
            state = apply_pauli_string(state, label)
            weight += 1
    return state, weight


def sample_block_loss(model: NoiseModel, rng: np.random.Generator) -> bool:
    """True if the block is lost: any of its five photons fails to survive.

    Consumes exactly five uniform draws regardless of the outcome.
    """
    survival = model.photon_survival_prob
    draws = rng.random(5)
    return bool(np.any(draws >= survival))


def sample_photon_numbers(mu: float, rng: np.random.Generator) -> np.ndarray:
    """Photon counts for the block's five pulses, i.i.d. Poisson(mu)."""
    if mu < 0.0:
        raise ValueError(f"mean photon number must be >= 0, got {mu}")
    return rng.poisson(mu, size=5)


def pns_leak_event(photon_counts: np.ndarray) -> bool:
    """True when >= 3 of the 5 pulses are multi-photon (count >= 2)."""
    return int(np.sum(np.asarray(photon_counts) >= 2)) >= 3


def eve_apply(
    strategy: EveStrategy,
    state: np.ndarray,
    rng: np.random.Generator,
    basis: str = "Z",
) -> tuple[np.ndarray, Optional[EveRecord]]:
    """Run the eavesdropper on one in-flight block.

    ``none`` passes the state through untouched.  ``intercept_resend``
    picks a pattern (uniform over her two guessed patterns, or over all
    120), decodes the block with it, and retransmits a fresh codeword of
    the measured bit under the same pattern.  The session basis is assumed
    known to her; only the pattern is secret.
    """
    if not strategy.active:
        return state, None
    if strategy.knowledge == UNIFORM_KNOWLEDGE:
        table = all_patterns()
        guess = table[int(rng.integers(0, len(table)))]
    else:
        guess = strategy.knowledge.members()[int(rng.integers(0, 2))]
    eve_bit, _ = code5.decode_block(state, guess, rng, basis=basis)
    resent = apply_permutation(code5.encode_logical(eve_bit, basis=basis), guess)
    return resent, EveRecord(guessed_pattern=guess, eve_bit=eve_bit)


def guessed_set_with_overlap(
    true_set: PatternSet, correct_count: int, rng: np.random.Generator
) -> PatternSet:
    """Uniformly draw a valid set sharing exactly ``correct_count`` patterns
    with ``true_set`` (2 returns the set itself)."""
    candidates = sets_sharing(true_set, correct_count)
    return candidates[int(rng.integers(0, len(candidates)))]
