"""Security quantities: entropies, guess analysis, Holevo readings, photon stats."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from helpers import random_state

from patternqkd import analysis, code5
from patternqkd.patterns import PatternSet, valid_pattern_sets
from patternqkd.quantum_core import (
    density_from_ensemble,
    von_neumann_entropy,
)


class TestBinaryEntropy:
    def test_endpoints_are_zero(self):
        assert analysis.binary_entropy(0.0) == 0.0
        assert analysis.binary_entropy(1.0) == 0.0

    def test_half_is_one_bit(self):
        assert analysis.binary_entropy(0.5) == 1.0

    def test_reference_values(self):
        assert abs(analysis.binary_entropy(0.75) - 0.8113) < 0.0005
        assert abs(analysis.binary_entropy(0.625) - 0.9544) < 0.0005

    def test_symmetry(self):
        for p in (0.1, 0.3, 0.47):
            assert abs(analysis.binary_entropy(p) - analysis.binary_entropy(1 - p)) < 1e-12

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            analysis.binary_entropy(1.2)


class TestMutualInformation:
    def test_reference_values(self):
        assert abs(analysis.intercept_resend_mutual_info(0.75) - 0.189) < 0.001
        assert abs(analysis.intercept_resend_mutual_info(0.625) - 0.046) < 0.001
        assert analysis.intercept_resend_mutual_info(0.5) == 0.0


class TestGuessOutcomeDistribution:
    def test_exact_fractions(self):
        dist = analysis.guess_outcome_distribution()
        assert dist.p_both == Fraction(1, 6540)
        assert dist.p_one == Fraction(216, 6540)
        assert dist.p_none == Fraction(6323, 6540)
        assert dist.p_both + dist.p_one + dist.p_none == 1

    def test_independent_brute_force_oracle(self):
        # recount from raw permutations, no reuse of the patterns module
        perms = list(itertools.permutations((1, 2, 3, 4, 5)))

        def dist(a, b):
            return sum(1 for x, y in zip(a, b) if x != y)

        sets = [
            frozenset((p, q))
            for i, p in enumerate(perms)
            for q in perms[i + 1:]
            if dist(p, q) >= 3
        ]
        truth = sets[137]
        counts = [0, 0, 0]
        for candidate in sets:
            counts[len(truth & candidate)] += 1
        assert counts[2] == 1
        assert counts[1] == 216
        assert counts[0] == 6323

    def test_invariant_under_choice_of_secret(self):
        table = valid_pattern_sets()
        rng = np.random.default_rng(0)
        reference = analysis.guess_outcome_distribution(table[0])
        for index in rng.integers(0, len(table), size=20):
            assert analysis.guess_outcome_distribution(table[int(index)]) == reference


class TestEveSuccessModel:
    def test_values(self):
        assert analysis.eve_success_probability(0) == 0.5
        assert analysis.eve_success_probability(1) == 0.625
        assert analysis.eve_success_probability(2) == 0.75

    def test_rejects_other_counts(self):
        with pytest.raises(ValueError):
            analysis.eve_success_probability(3)


class TestHolevoIdenticalEnsembles:
    def test_vanishes_for_sampled_sets(self):
        rng = np.random.default_rng(1)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=25):
            assert abs(analysis.holevo_identical_ensembles(table[int(index)])) < 1e-9

    def test_conditional_entropy_tracks_overlap(self):
        # equal two-state mixture has eigenvalues (1 +- |overlap|)/2, so its
        # entropy is h((1 + |ov|)/2); exactly 1 bit would need |ov| < 1e-9
        rng = np.random.default_rng(2)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=15):
            chosen = table[int(index)]
            overlap = abs(analysis.pattern_state_overlap(chosen))
            entropy = analysis.identical_ensembles_entropy(chosen)
            expected = analysis.binary_entropy((1 + overlap) / 2)
            assert abs(entropy - expected) < 1e-9
            if overlap < 1e-9:
                assert abs(entropy - 1.0) < 1e-9

    def test_overlap_values_over_sample(self):
        # permuted same-bit codewords are never orthogonal here; the overlap
        # magnitude always lands in {1/4, 1/2, 1}
        rng = np.random.default_rng(3)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=40):
            overlap = abs(analysis.pattern_state_overlap(table[int(index)]))
            assert min(
                abs(overlap - v) for v in (0.25, 0.5, 1.0)
            ) < 1e-9


class TestHolevoBitConditioned:
    def test_report_bounds(self):
        rng = np.random.default_rng(4)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=10):
            report = analysis.holevo_bit_conditioned(table[int(index)])
            assert -1e-9 <= report.chi_bit_conditioned <= 1.0 + 1e-9
            for term in (report.entropy_average, report.entropy_rho0, report.entropy_rho1):
                assert 0.0 <= term <= 5.0
            # concavity of entropy
            mixture_bound = 0.5 * report.entropy_rho0 + 0.5 * report.entropy_rho1
            assert report.entropy_average >= mixture_bound - 1e-9

    def test_gram_route_agrees_with_jacobi_route(self):
        rng = np.random.default_rng(5)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=8):
            full = analysis.holevo_bit_conditioned(table[int(index)])
            fast = analysis.holevo_bit_conditioned_gram(table[int(index)])
            assert abs(full.chi_bit_conditioned - fast.chi_bit_conditioned) < 1e-9
            assert abs(full.entropy_average - fast.entropy_average) < 1e-9
            assert abs(full.entropy_rho0 - fast.entropy_rho0) < 1e-9

    def test_bit_parity_makes_chi_one_bit(self):
        # the all-Z parity operator commutes with every wire permutation, so
        # the two bit-conditioned mixtures live in orthogonal eigenspaces
        # and the ensemble carries a full bit regardless of the set
        rng = np.random.default_rng(6)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=10):
            report = analysis.holevo_bit_conditioned(table[int(index)])
            assert abs(report.chi_bit_conditioned - 1.0) < 1e-9

    def test_sweep_rows_shape(self):
        rows = analysis.chi_physical_sweep(list(valid_pattern_sets()[:25]))
        assert len(rows) == 25
        for set_id, chi, ov00, ov01 in rows:
            assert 0.0 <= chi <= 1.0 + 1e-9
            assert 0.0 <= ov00 <= 1.0 + 1e-9
            assert ov01 < 1e-9  # opposite parity sectors never overlap


class TestGramEntropy:
    def test_matches_full_entropy_on_random_ensembles(self):
        rng = np.random.default_rng(7)
        for size in (2, 3, 4):
            weights = rng.dirichlet(np.ones(size))
            members = [(float(w), random_state(rng)) for w in weights]
            via_gram = analysis.gram_entropy(members)
            via_jacobi = von_neumann_entropy(density_from_ensemble(members))
            assert abs(via_gram - via_jacobi) < 1e-9


class TestPoissonStatistics:
    def test_pmf_at_zero(self):
        assert abs(analysis.poisson_pmf(0, 0.1) - math.exp(-0.1)) < 1e-12
        assert analysis.poisson_pmf(0, 0.0) == 1.0
        assert analysis.poisson_pmf(3, 0.0) == 0.0

    def test_pmf_sums_to_one(self):
        for mu in (0.05, 0.5, 1.0, 2.0):
            total = sum(analysis.poisson_pmf(n, mu) for n in range(31))
            assert abs(total - 1.0) < 1e-12

    def test_multiphoton_prob(self):
        assert analysis.multiphoton_prob(0.0) == 0.0
        mu = 0.1
        expected = 1.0 - math.exp(-mu) * (1 + mu)
        assert abs(analysis.multiphoton_prob(mu) - expected) < 1e-15

    def test_leak_zero_at_zero_mu(self):
        assert analysis.pns_block_leak_prob(0.0) == 0.0

    def test_leak_against_independent_oracle(self):
        # oracle: truncated pmf series for q, then raw subset enumeration
        def oracle(mu):
            q = sum(analysis.poisson_pmf(n, mu) for n in range(2, 60))
            total = 0.0
            for pulses in itertools.product((False, True), repeat=5):
                if sum(pulses) >= 3:
                    term = 1.0
                    for multi in pulses:
                        term *= q if multi else (1 - q)
                    total += term
            return total

        for mu in (0.05, 0.1, 0.3, 1.0):
            mine = analysis.pns_block_leak_prob(mu)
            ref = oracle(mu)
            assert abs(mine - ref) <= 1e-12 + 1e-9 * ref
        assert abs(analysis.pns_block_leak_prob(0.1) - 1.02e-6) / 1.02e-6 < 0.02

    def test_leak_monotone_in_mu(self):
        grid = [round(0.05 * k, 2) for k in range(21)]
        values = [analysis.pns_block_leak_prob(mu) for mu in grid]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_negative_arguments_rejected(self):
        with pytest.raises(ValueError):
            analysis.poisson_pmf(1, -0.1)
        with pytest.raises(ValueError):
            analysis.multiphoton_prob(-1.0)


class TestWrongDecodeAgreement:
    def test_values_are_quantized(self):
        # exact decode arithmetic only ever yields these three agreements
        rng = np.random.default_rng(8)
        table = valid_pattern_sets()
        for index in rng.integers(0, len(table), size=25):
            value = analysis.wrong_decode_agreement(table[int(index)])
            assert min(abs(value - v) for v in (0.375, 0.5, 1.0)) < 1e-9

    def test_monte_carlo_consistency(self):
        # sampling the decoder reproduces the exact agreement
        chosen = PatternSet.from_string("12345 13452")
        exact = analysis.wrong_decode_agreement(chosen)
        rng = np.random.default_rng(9)
        trials = 4000
        agree = 0
        for _ in range(trials):
            bit = int(rng.integers(0, 2))
            encode_with, decode_with = (
                chosen.members() if rng.integers(0, 2) == 0 else chosen.members()[::-1]
            )
            state = analysis.pattern_state(encode_with, bit)
            out, _ = code5.decode_block(state, decode_with, rng)
            agree += out == bit
        sigma = math.sqrt(exact * (1 - exact) / trials)
        assert abs(agree / trials - exact) < 4 * sigma

    def test_success_model_assumption_quantified(self):
        # the 0.625/0.75 model presumes agreement exactly 1/2; report how
        # far sampled sets actually sit from that assumption
        rng = np.random.default_rng(10)
        table = valid_pattern_sets()
        values = [
            analysis.wrong_decode_agreement(table[int(i)])
            for i in rng.integers(0, len(table), size=30)
        ]
        deviations = [abs(v - 0.5) for v in values]
        print(
            f"\nwrong-decode agreement over 30 sampled sets: "
            f"min={min(values):.4f} max={max(values):.4f} "
            f"max deviation from 1/2: {max(deviations):.4f}"
        )
        assert max(values) <= 1.0 and min(values) >= 0.0
