"""Shared random-object generators for the test suite.

Everything takes an explicit numpy Generator so each test controls its
own seed.  Rational vectors are built from random integer loads, which
keeps every downstream identity checkable in exact arithmetic.
"""

from fractions import Fraction

import numpy as np

from entconvert import BipartiteState, DensityOperator, SchmidtVector


def rand_rational_schmidt(rng, n, max_part=60):
    """Random exact Schmidt vector with n strictly positive entries."""
    parts = [int(rng.integers(1, max_part + 1)) for _ in range(n)]
    total = sum(parts)
    vals = sorted((Fraction(p, total) for p in parts), reverse=True)
    return SchmidtVector(tuple(vals))


def rand_float_schmidt(rng, n):
    raw = rng.random(n) + 1e-3
    raw = raw / raw.sum()
    raw = np.sort(raw)[::-1]
    return SchmidtVector(tuple(float(v) for v in raw))


def rand_majorized_below(rng, sv, steps=3):
    """Vector exactly majorized by ``sv``: a few rational T-transforms.

    Each step mixes two entries toward each other with a rational weight,
    which can only flatten the distribution, so the original majorizes
    every intermediate (and hence the result).
    """
    v = list(sv.probs)
    for _ in range(steps):
        i, j = rng.choice(len(v), size=2, replace=False)
        lam = Fraction(int(rng.integers(0, 6)), 10)  # in [0, 1/2]
        vi, vj = v[i], v[j]
        v[i] = (1 - lam) * vi + lam * vj
        v[j] = lam * vi + (1 - lam) * vj
        v.sort(reverse=True)
    return SchmidtVector(tuple(v))


def haar_unitary(rng, n):
    """Haar-ish random unitary: QR of a complex Ginibre matrix, phases fixed."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def rand_state(rng, n_a, n_b):
    amp = rng.standard_normal((n_a, n_b)) + 1j * rng.standard_normal((n_a, n_b))
    return BipartiteState(amp / np.linalg.norm(amp))


def rand_density(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    rho = (rho + rho.conj().T) / 2
    return DensityOperator(rho)


def rand_kraus(rng, n, outcomes):
    """Random complete measurement: K_m = G_m S^{-1/2}, S = sum G^dag G."""
    gs = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
          for _ in range(outcomes)]
    s = sum(g.conj().T @ g for g in gs)
    w, v = np.linalg.eigh(s)
    s_isqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return [g @ s_isqrt for g in gs]
