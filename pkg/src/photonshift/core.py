"""Fock-state combinatorics and transition probabilities for linear optics.

Photon configurations are plain sequences of non-negative occupation numbers
(one entry per mode).  All probabilities are computed from matrix permanents
of scattering submatrices; partially distinguishable photons are handled
through a Gram matrix of pairwise internal-state overlaps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

# Desk-scale caps; configurable through the module-level functions' arguments
# where it matters, kept here as shared defaults.
MAX_PHOTONS = 12
MAX_MODES = 24
PERMANENT_CAP = 12

# Values in [PROB_CLAMP, 0) are treated as round-off and clamped to zero;
# anything below PROB_CLAMP indicates a genuine bug and raises.
PROB_CLAMP = -1e-12

GRAM_HERMITIAN_TOL = 1e-10
GRAM_PSD_TOL = -1e-10


class PhotonNumberMismatch(ValueError):
    """Input and output configurations carry different photon numbers."""


class PostSelectionStarvation(RuntimeError):
    """No probability mass (or no counts) survived post-selection."""


def validate_occupation(r: Sequence[int]) -> tuple[int, ...]:
    """Check an occupation list and return it as a tuple of ints."""
    occ = tuple(int(x) for x in r)
    if any(x != y for x, y in zip(occ, r)):
        raise ValueError(f"occupation entries must be integers, got {r!r}")
    if any(x < 0 for x in occ):
        raise ValueError(f"occupation entries must be non-negative, got {r!r}")
    return occ


def photon_number(r: Sequence[int]) -> int:
    return sum(validate_occupation(r))


def mode_assignment(r: Sequence[int]) -> list[int]:
    """Expand an occupation list into one (sorted) mode index per photon.

    [1, 0, 1] -> [0, 2]; [2, 0, 0] -> [0, 0].  Mode indices are 0-based.
    """
    occ = validate_occupation(r)
    modes: list[int] = []
    for j, n in enumerate(occ):
        modes.extend([j] * n)
    return modes


def normalization_mu(r: Sequence[int]) -> int:
    """Product of factorials of the occupation numbers."""
    occ = validate_occupation(r)
    if sum(occ) > 20:
        raise ValueError(f"photon number {sum(occ)} exceeds factorial-safe cap 20")
    out = 1
    for n in occ:
        out *= math.factorial(n)
    return out


def permanent(matrix, cap: int = PERMANENT_CAP) -> complex:
    """Permanent of a square complex matrix via Glynn's Gray-code formula.

    Runs in O(2^n * n); suitable for n up to ``cap``.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > cap:
        raise ValueError(f"matrix size {n} exceeds permanent cap {cap}")
    if n == 1:
        return complex(a[0, 0])

    # Glynn: per(A) = 2^{1-n} sum_{d in {+-1}^n, d_0=+1} (prod d) prod_j (sum_i d_i A_ij)
    # iterated in Gray-code order so each step updates the column sums by one row.
    sums = a.sum(axis=0)
    total = np.prod(sums)
    sign = 1
    old_gray = 0
    half = 1 << (n - 1)
    for k in range(1, half):
        gray = k ^ (k >> 1)
        bit = gray ^ old_gray
        row = bit.bit_length()  # flipped d index in 1..n-1
        step = -2.0 if gray & bit else 2.0
        sums = sums + step * a[row]
        sign = -sign
        total += sign * np.prod(sums)
        old_gray = gray
    return complex(total / half)


def scattering_matrix(U, r: Sequence[int], s: Sequence[int]) -> np.ndarray:
    """N x N submatrix M[h, j] = U[d(s)_h, d(r)_j] for input r and output s."""
    U = np.asarray(U, dtype=complex)
    dr = mode_assignment(r)
    ds = mode_assignment(s)
    if len(dr) != len(ds):
        raise PhotonNumberMismatch(
            f"input has {len(dr)} photons, output has {len(ds)}"
        )
    m = U.shape[0]
    if len(r) != m or len(s) != m:
        raise ValueError("occupation lists must match the unitary mode count")
    return U[np.ix_(ds, dr)]


def _clamp_probability(p: float) -> float:
    if p < PROB_CLAMP:
        raise ValueError(f"probability {p} below round-off clamp {PROB_CLAMP}")
    return max(p, 0.0)


def transition_probability(U, r: Sequence[int], s: Sequence[int]) -> float:
    """|Per(M)|^2 / (mu(r) mu(s)) for indistinguishable photons."""
    M = scattering_matrix(U, r, s)
    p = abs(permanent(M)) ** 2 / (normalization_mu(r) * normalization_mu(s))
    return _clamp_probability(float(p))


def validate_gram(G, n_photons: int) -> np.ndarray:
    """Check hermiticity, unit diagonal and positive semi-definiteness."""
    G = np.asarray(G, dtype=complex)
    if G.shape != (n_photons, n_photons):
        raise ValueError(f"Gram matrix shape {G.shape} != ({n_photons}, {n_photons})")
    if not np.allclose(G, G.conj().T, atol=GRAM_HERMITIAN_TOL):
        raise ValueError("Gram matrix is not Hermitian")
    if not np.allclose(np.diag(G), 1.0, atol=GRAM_HERMITIAN_TOL):
        raise ValueError("Gram matrix diagonal must be all ones")
    if np.linalg.eigvalsh(G).min() < GRAM_PSD_TOL:
        raise ValueError("Gram matrix is not positive semi-definite")
    return G


def distinguishable_probability(
    U, r: Sequence[int], s: Sequence[int], G, *, validate: bool = True
) -> float:
    """Transition probability for partially distinguishable photons.

    G[i, j] is the internal-state overlap of photons i and j, indexed by
    position in the input mode assignment list.  The permutation-pair overlap
    factor is J(s1, s2) = prod_k G[s1^{-1}(k), s2^{-1}(k)]; an all-ones G
    recovers the ideal interference, the identity recovers classical transport.
    """
    M = scattering_matrix(U, r, s)
    n = M.shape[0]
    if n > 6:
        raise ValueError("distinguishable_probability capped at 6 photons ((N!)^2 sum)")
    if validate:
        G = validate_gram(G, n)
    else:
        G = np.asarray(G, dtype=complex)

    perms = list(itertools.permutations(range(n)))
    # amplitude of photon k (input slot) exiting at output slot sigma(k)
    amps = np.array(
        [np.prod([M[sig[k], k] for k in range(n)]) for sig in perms], dtype=complex
    )
    inverse = [tuple(np.argsort(sig)) for sig in perms]

    total = 0.0 + 0.0j
    for i1, s1_inv in enumerate(inverse):
        for i2, s2_inv in enumerate(inverse):
            j = np.prod([G[s1_inv[k], s2_inv[k]] for k in range(n)])
            total += j * np.conj(amps[i1]) * amps[i2]
    p = total.real / (normalization_mu(r) * normalization_mu(s))
    return _clamp_probability(float(p))


def enumerate_outputs(m: int, n: int) -> list[tuple[int, ...]]:
    """All C(m+n-1, n) occupation lists of n photons over m modes."""
    outputs = []
    for combo in itertools.combinations_with_replacement(range(m), n):
        occ = [0] * m
        for mode in combo:
            occ[mode] += 1
        outputs.append(tuple(occ))
    return outputs


@dataclass
class OutcomeDistribution:
    """Probabilities over output occupation lists.

    ``post_selected`` marks a renormalized conditional distribution.
    """

    outcomes: list[tuple[tuple[int, ...], float]]
    post_selected: bool = False

    def total(self) -> float:
        return sum(p for _, p in self.outcomes)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(self.outcomes)


@dataclass
class CountRecord:
    """Sampled detection counts with the RNG seed that produced them."""

    outcomes: list[tuple[tuple[int, ...], int]]
    shots: int
    seed: int
    mode: str = "multinomial"

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.outcomes)


def output_distribution(
    U,
    r: Sequence[int],
    *,
    post_selection: Optional[Callable[[tuple[int, ...]], bool]] = None,
    gram=None,
    max_photons: int = MAX_PHOTONS,
    max_modes: int = MAX_MODES,
) -> OutcomeDistribution:
    """Enumerate all output probabilities, optionally post-selected.

    With ``post_selection`` the surviving outcomes are renormalized.  With
    ``gram`` the partially-distinguishable probability is used throughout.
    """
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    n = photon_number(r)
    if n > max_photons:
        raise ValueError(f"photon number {n} exceeds cap {max_photons}")
    if m > max_modes:
        raise ValueError(f"mode count {m} exceeds cap {max_modes}")
    if gram is not None:
        gram = validate_gram(gram, n)

    outcomes = []
    for s in enumerate_outputs(m, n):
        if gram is None:
            p = transition_probability(U, r, s)
        else:
            p = distinguishable_probability(U, r, s, gram, validate=False)
        outcomes.append((s, p))

    if post_selection is None:
        return OutcomeDistribution(outcomes, post_selected=False)

    kept = [(s, p) for s, p in outcomes if post_selection(s)]
    norm = sum(p for _, p in kept)
    if norm <= 0.0:
        raise PostSelectionStarvation("post-selection kept no probability mass")
    return OutcomeDistribution(
        [(s, p / norm) for s, p in kept], post_selected=True
    )


def sample_counts(
    dist: OutcomeDistribution,
    shots: int,
    seed: int,
    mode: str = "multinomial",
) -> CountRecord:
    """Draw detection counts from a normalized distribution.

    ``multinomial`` fixes the total number of shots; ``poisson`` draws an
    independent Poisson count per outcome with mean shots * p, which models
    raw coincidence counting.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    probs = np.array([p for _, p in dist.outcomes], dtype=float)
    total = probs.sum()
    if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-6):
        raise ValueError(f"distribution is not normalized (sum={total})")
    probs = probs / total

    rng = np.random.default_rng(seed)
    if mode == "multinomial":
        counts = rng.multinomial(shots, probs)
    elif mode == "poisson":
        counts = rng.poisson(shots * probs)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    outcomes = [(s, int(c)) for (s, _), c in zip(dist.outcomes, counts)]
    return CountRecord(outcomes, shots=shots, seed=seed, mode=mode)
