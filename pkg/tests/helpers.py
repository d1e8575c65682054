"""Shared random-object generators for the test suite."""

import numpy as np


def random_hermitian(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (m + m.conj().T) / 2.0


def random_unitary(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(m)
    # fix the QR phase ambiguity so the distribution is Haar
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d, rank=None):
    k = d if rank is None else rank
    m = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_probabilities(rng, d):
    p = rng.uniform(0.05, 1.0, size=d)
    return p / p.sum()
