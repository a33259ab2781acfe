"""Shared test oracles: brute-force reference implementations."""

import itertools

import numpy as np


def naive_permanent(matrix):
    """O(n!) permutation-sum permanent, the reference for the fast version."""
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    rows = range(n)
    for perm in itertools.permutations(rows):
        term = 1.0 + 0.0j
        for i, j in zip(rows, perm):
            term *= a[i, j]
        total += term
    return total


def random_unitary(m, rng):
    """Haar-random unitary via QR with phase-fixed diagonal."""
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_gram(n, rng):
    """Random PSD Gram matrix with unit diagonal."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    g = a @ a.conj().T
    d = np.sqrt(np.real(np.diag(g)))
    return g / np.outer(d, d)
