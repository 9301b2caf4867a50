"""Per-block transmission, sifting, error-rate estimation, and the session loop.

One block: Alice draws a bit and one of the two secret patterns, encodes,
and transmits; the interceptor (if any) acts; depolarizing noise and then
loss are applied; Bob draws his own pattern from the secret set and runs a
full decode.  Blocks where the two pattern choices differ are discarded
(sifting); a random subset of the survivors is disclosed to estimate the
multi-qubit error rate (MQER), the fraction of disclosed bits whose
corrected logical value disagrees with Alice's.  The session continues
only if the estimate is strictly below the configured threshold.

Reproducibility contract: every block derives private random streams
(Alice, Eve, channel, photon statistics, Bob) from
``(master_seed, block_id)``, and the per-block draw order is pinned:

    Alice:   bit, pattern index
    Eve:     pattern pick, 4 syndrome draws, 1 logical draw (when active)
    channel: 5 depolarizing uniforms (+1 choice draw per errored qubit),
             then 5 loss uniforms
    photons: 5 Poisson draws (only when mean photon number > 0)
    Bob:     pattern index, then 4 syndrome draws and 1 logical draw
             (only when the block arrived)

Two runs with the same config are therefore bitwise identical, independent
of scheduling, and blocks may be computed in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import code5
from .channel import (
    EveRecord,
    EveStrategy,
    NoiseModel,
    apply_depolarizing,
    eve_apply,
    pns_leak_event,
    sample_block_loss,
    sample_photon_numbers,
)
from .patterns import PatternSet
from .quantum_core import apply_permutation

DECISION_CONTINUE = "continue"
DECISION_ABORT = "abort"

# Stream-derivation domains: blocks use (BLOCK, block_id, channel),
# session-level draws use (SESSION, purpose, 0).
_DOMAIN_BLOCK = 0
_DOMAIN_SESSION = 1

_CH_ALICE = 0
_CH_EVE = 1
_CH_CHANNEL = 2
_CH_BOB = 3
_CH_PHOTONS = 4

_SESSION_TEST_SUBSET = 0
_SESSION_SECRET_SET = 1


def block_rng(master_seed: int, block_id: int, channel: int) -> np.random.Generator:
    """Private random stream for one (block, role) pair."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(_DOMAIN_BLOCK, block_id, channel))
    return np.random.default_rng(seq)


def session_rng(master_seed: int, purpose: int) -> np.random.Generator:
    """Session-level stream, disjoint from every block stream."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(_DOMAIN_SESSION, purpose, 0))
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class SessionConfig:
    """Full definition of one protocol session."""

    num_blocks: int
    secret_set: PatternSet
    master_seed: int = 0
    test_fraction: float = 0.5
    mqer_threshold: float = 0.10
    noise: NoiseModel = field(default_factory=NoiseModel)
    eve: EveStrategy = field(default_factory=EveStrategy.none)
    logical_basis: str = "Z"

    def __post_init__(self) -> None:
        if self.num_blocks < 1:
            raise ValueError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if not isinstance(self.secret_set, PatternSet):
            raise ValueError("secret_set must be a PatternSet")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must be strictly inside (0,1), got {self.test_fraction}")
        if not 0.0 <= self.mqer_threshold <= 1.0:
            raise ValueError(f"mqer_threshold must be in [0,1], got {self.mqer_threshold}")
        if self.logical_basis not in ("Z", "X"):
            raise ValueError(f"logical_basis must be 'Z' or 'X', got {self.logical_basis!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass
class BlockRecord:
    """Everything that happened to one transmitted block."""

    block_id: int
    alice_bit: int
    alice_pattern_index: int
    bob_pattern_index: int
    lost: bool
    syndrome: Optional[int]
    bob_bit: Optional[int]
    eve: Optional[EveRecord]
    sifted: bool
    disclosed_for_test: bool = False
    pns_leak: bool = False


@dataclass
class SessionReport:
    """Aggregate outcome of a session."""

    blocks_sent: int
    blocks_lost: int
    blocks_sifted: int
    blocks_tested: int
    mqer_estimate: float
    mqer_warning: bool
    decision: str
    sift_rate: float
    raw_key: list[int]
    eve_success_rate: Optional[float]
    pns_leak_blocks: int


def run_block(config: SessionConfig, block_id: int) -> BlockRecord:
    """Simulate one block end to end; deterministic in (master_seed, block_id)."""
    seed = config.master_seed
    basis = config.logical_basis

    rng_alice = block_rng(seed, block_id, _CH_ALICE)
    alice_bit = int(rng_alice.integers(0, 2))
    alice_idx = int(rng_alice.integers(0, 2))
    alice_pattern = config.secret_set.members()[alice_idx]
    state = apply_permutation(code5.encode_logical(alice_bit, basis=basis), alice_pattern)

    eve_record: Optional[EveRecord] = None
    if config.eve.active:
        rng_eve = block_rng(seed, block_id, _CH_EVE)
        state, eve_record = eve_apply(config.eve, state, rng_eve, basis=basis)

    rng_channel = block_rng(seed, block_id, _CH_CHANNEL)
    state, _ = apply_depolarizing(state, config.noise.per_qubit_flip_prob, rng_channel)
    lost = sample_block_loss(config.noise, rng_channel)

    leak = False
    if config.noise.mean_photon_number > 0.0:
        rng_photons = block_rng(seed, block_id, _CH_PHOTONS)
        counts = sample_photon_numbers(config.noise.mean_photon_number, rng_photons)
        leak = pns_leak_event(counts)

    rng_bob = block_rng(seed, block_id, _CH_BOB)
    bob_idx = int(rng_bob.integers(0, 2))
    syndrome: Optional[int] = None
    bob_bit: Optional[int] = None
    if not lost:
        bob_pattern = config.secret_set.members()[bob_idx]
        bob_bit, syndrome = code5.decode_block(state, bob_pattern, rng_bob, basis=basis)

    return BlockRecord(
        block_id=block_id,
        alice_bit=alice_bit,
        alice_pattern_index=alice_idx,
        bob_pattern_index=bob_idx,
        lost=lost,
        syndrome=syndrome,
        bob_bit=bob_bit,
        eve=None if lost else eve_record,
        sifted=(not lost) and alice_idx == bob_idx,
        pns_leak=leak,
    )


def sift(records: list[BlockRecord]) -> list[BlockRecord]:
    """Keep exactly the records flagged sifted, in order."""
    return [r for r in records if r.sifted]


def estimate_mqer(
    sifted: list[BlockRecord],
    test_fraction: float,
    rng: np.random.Generator,
) -> tuple[float, int, list[BlockRecord]]:
    """Disclose a uniform test subset and estimate the multi-qubit error rate.

    Samples ``ceil(test_fraction * len(sifted))`` records without
    replacement, marks them disclosed, and counts a multi-qubit error for
    every disclosed record whose corrected bit mismatches Alice's.  An
    empty sifted list yields (0.0, 0, []); callers flag that as a warning.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be strictly inside (0,1), got {test_fraction}")
    if not sifted:
        return 0.0, 0, []
    n_test = math.ceil(test_fraction * len(sifted))
    chosen = rng.choice(len(sifted), size=n_test, replace=False)
    tested = []
    mismatches = 0
    for index in sorted(int(i) for i in chosen):
        record = sifted[index]
        record.disclosed_for_test = True
        tested.append(record)
        if record.bob_bit != record.alice_bit:
            mismatches += 1
    return mismatches / n_test, n_test, tested


def decide(mqer: float, threshold: float) -> str:
    """Continue iff the estimate is strictly below the threshold."""
    if not 0.0 <= mqer <= 1.0 or not 0.0 <= threshold <= 1.0:
        raise ValueError("mqer and threshold must be in [0,1]")
    return DECISION_CONTINUE if mqer < threshold else DECISION_ABORT


def run_session(config: SessionConfig) -> tuple[SessionReport, list[BlockRecord]]:
    """Run the whole session: blocks, sifting, estimation, decision, key."""
    records = [run_block(config, block_id) for block_id in range(config.num_blocks)]

    sifted = sift(records)
    rng_test = session_rng(config.master_seed, _SESSION_TEST_SUBSET)
    mqer, n_tested, _ = estimate_mqer(sifted, config.test_fraction, rng_test)
    decision = decide(mqer, config.mqer_threshold)

    raw_key = [r.bob_bit for r in sifted if not r.disclosed_for_test]

    eve_success: Optional[float] = None
    if config.eve.active:
        observed = [r for r in records if r.eve is not None]
        if observed:
            hits = sum(1 for r in observed if r.eve.eve_bit == r.alice_bit)
            eve_success = hits / len(observed)

    report = SessionReport(
        blocks_sent=config.num_blocks,
        blocks_lost=sum(1 for r in records if r.lost),
        blocks_sifted=len(sifted),
        blocks_tested=n_tested,
        mqer_estimate=mqer,
        mqer_warning=(len(sifted) == 0),
        decision=decision,
        sift_rate=len(sifted) / config.num_blocks,
        raw_key=raw_key,
        eve_success_rate=eve_success,
        pns_leak_blocks=sum(1 for r in records if r.pns_leak),
    )
    return report, records


def sample_secret_set(master_seed: int) -> PatternSet:
    """Deterministically draw a secret set from the session seed."""
    from .patterns import sample_pattern_set

    return sample_pattern_set(session_rng(master_seed, _SESSION_SECRET_SET))
