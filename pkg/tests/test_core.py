"""Fock combinatorics, permanents, and transition probabilities."""

import math

import numpy as np
import pytest

from photonshift import core
from helpers import naive_permanent, random_gram, random_unitary


def test_validate_occupation_rejects_negative_and_fractional():
    with pytest.raises(ValueError):
        core.validate_occupation([1, -1])
    with pytest.raises(ValueError):
        core.validate_occupation([1.5, 0])
    assert core.validate_occupation([2, 0, 1]) == (2, 0, 1)


def test_mode_assignment_examples():
    assert core.mode_assignment([1, 0, 1]) == [0, 2]
    assert core.mode_assignment([2, 0, 0]) == [0, 0]
    assert core.mode_assignment([0, 0, 0]) == []


def test_normalization_mu():
    assert core.normalization_mu([1, 1, 1]) == 1
    assert core.normalization_mu([3, 2, 0]) == 12
    with pytest.raises(ValueError):
        core.normalization_mu([21])


def test_permanent_small_cases():
    assert core.permanent([[3.0]]) == 3.0
    a, b, c, d = 1.0, 2.0, 3.0, 4.0
    assert core.permanent([[a, b], [c, d]]) == pytest.approx(a * d + b * c)
    assert core.permanent(np.eye(5)) == pytest.approx(1.0)
    n = 6
    assert core.permanent(np.ones((n, n))) == pytest.approx(math.factorial(n))


def test_permanent_matches_naive_oracle():
    rng = np.random.default_rng(42)
    for n in range(1, 7):
        for _ in range(5):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            fast = core.permanent(a)
            slow = naive_permanent(a)
            assert abs(fast - slow) <= 1e-10 * max(1.0, abs(slow))


def test_permanent_rejects_bad_shapes_and_large_input():
    with pytest.raises(ValueError):
        core.permanent(np.ones((2, 3)))
    with pytest.raises(ValueError):
        core.permanent(np.ones((13, 13)))


def test_scattering_matrix_indices():
    U = np.arange(9, dtype=complex).reshape(3, 3)
    M = core.scattering_matrix(U, [1, 0, 1], [0, 2, 0])
    # output photons both in mode 1, input photons in modes 0 and 2
    assert M.shape == (2, 2)
    assert M[0, 0] == U[1, 0] and M[0, 1] == U[1, 2]
    assert M[1, 0] == U[1, 0] and M[1, 1] == U[1, 2]


def test_scattering_matrix_photon_mismatch():
    with pytest.raises(core.PhotonNumberMismatch):
        core.scattering_matrix(np.eye(2), [1, 0], [1, 1])


def test_transition_probabilities_sum_to_one():
    rng = np.random.default_rng(7)
    U = random_unitary(4, rng)
    r = (1, 1, 0, 0)
    total = sum(core.transition_probability(U, r, s)
                for s in core.enumerate_outputs(4, 2))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_hong_ou_mandel_dip():
    """Two photons on a balanced splitter never exit one per port."""
    c = 1 / math.sqrt(2)
    U = np.array([[c, 1j * c], [1j * c, c]])
    assert core.transition_probability(U, [1, 1], [1, 1]) == pytest.approx(0.0, abs=1e-14)
    assert core.transition_probability(U, [1, 1], [2, 0]) == pytest.approx(0.5)
    assert core.transition_probability(U, [1, 1], [0, 2]) == pytest.approx(0.5)


def test_gram_validation():
    with pytest.raises(ValueError):
        core.validate_gram(np.array([[1.0, 0.5], [0.4, 1.0]]), 2)  # not Hermitian
    with pytest.raises(ValueError):
        core.validate_gram(np.array([[2.0, 0.0], [0.0, 1.0]]), 2)  # diagonal
    with pytest.raises(ValueError):
        core.validate_gram(np.array([[1.0, 2.0], [2.0, 1.0]]), 2)  # not PSD
    G = np.array([[1.0, 0.3], [0.3, 1.0]])
    assert np.allclose(core.validate_gram(G, 2), G)


def test_distinguishability_limits():
    """All-ones Gram = ideal interference; identity = classical transport."""
    rng = np.random.default_rng(3)
    U = random_unitary(3, rng)
    r, n = (1, 1, 1), 3
    ones = np.ones((n, n))
    for s in core.enumerate_outputs(3, 3):
        ideal = core.transition_probability(U, r, s)
        assert core.distinguishable_probability(U, r, s, ones) == pytest.approx(
            ideal, abs=1e-12)
        M = np.abs(core.scattering_matrix(U, r, s)) ** 2
        p_classical = core.permanent(M).real / (
            core.normalization_mu(r) * core.normalization_mu(s))
        assert core.distinguishable_probability(U, r, s, np.eye(n)) == pytest.approx(
            p_classical, abs=1e-12)


def test_partial_distinguishability_balanced_splitter():
    """Coincidence probability (1 - x^2) / 2 for real overlap x."""
    c = 1 / math.sqrt(2)
    U = np.array([[c, 1j * c], [1j * c, c]])
    for x in (0.0, 0.25, 0.7, 1.0):
        G = np.array([[1.0, x], [x, 1.0]])
        p = core.distinguishable_probability(U, [1, 1], [1, 1], G)
        assert p == pytest.approx((1 - x**2) / 2, abs=1e-12)


def test_distinguishable_distribution_normalized():
    rng = np.random.default_rng(11)
    U = random_unitary(4, rng)
    G = random_gram(2, rng)
    dist = core.output_distribution(U, (1, 0, 1, 0), gram=G)
    assert dist.total() == pytest.approx(1.0, abs=1e-10)


def test_gram_relabeling_within_equal_modes_is_invariant():
    """Swapping photons that share an input mode permutes G harmlessly."""
    rng = np.random.default_rng(13)
    U = random_unitary(3, rng)
    r = (2, 1, 0)  # photons 0 and 1 share mode 0
    G = random_gram(3, rng)
    perm = [1, 0, 2]
    Gp = G[np.ix_(perm, perm)]
    for s in core.enumerate_outputs(3, 3):
        p = core.distinguishable_probability(U, r, s, G)
        pp = core.distinguishable_probability(U, r, s, Gp)
        assert pp == pytest.approx(p, abs=1e-12)


def test_enumerate_outputs_count():
    outs = core.enumerate_outputs(4, 2)
    assert len(outs) == 10  # C(5, 2)
    assert all(sum(s) == 2 for s in outs)
    assert len(set(outs)) == len(outs)


def test_post_selection_renormalizes():
    rng = np.random.default_rng(5)
    U = random_unitary(3, rng)
    dist = core.output_distribution(
        U, (1, 1, 0), post_selection=lambda s: s[2] == 0)
    assert dist.post_selected
    assert dist.total() == pytest.approx(1.0, abs=1e-12)
    assert all(s[2] == 0 for s, _ in dist.outcomes)


def test_post_selection_starvation():
    with pytest.raises(core.PostSelectionStarvation):
        core.output_distribution(np.eye(2), (1, 0), post_selection=lambda s: False)


def test_sample_counts_deterministic_and_consistent():
    rng = np.random.default_rng(17)
    U = random_unitary(3, rng)
    dist = core.output_distribution(U, (1, 1, 0))
    rec1 = core.sample_counts(dist, 1000, seed=99)
    rec2 = core.sample_counts(dist, 1000, seed=99)
    assert rec1.outcomes == rec2.outcomes
    assert sum(c for _, c in rec1.outcomes) == 1000
    poisson = core.sample_counts(dist, 1000, seed=99, mode="poisson")
    assert all(c >= 0 for _, c in poisson.outcomes)
    with pytest.raises(ValueError):
        core.sample_counts(dist, 0, seed=1)
