"""Bipartite pure states and their Schmidt-coefficient description.

A state of two parties is carried either as a full complex amplitude
matrix or, when only local-unitary-invariant questions are asked, as the
vector of squared Schmidt coefficients sorted in non-increasing order.
All conversion results in this package depend on the state through that
vector alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import DEFAULT_TOL, all_exact, parse_scalar

__all__ = [
    "InvalidStateError",
    "SchmidtVector",
    "BipartiteState",
    "DensityOperator",
    "schmidt_decompose",
    "state_from_schmidt",
    "tensor_power",
    "reduced_density",
    "majorizes",
]


class InvalidStateError(ValueError):
    """A state object violates one of its structural invariants."""


def _zero_like(value):
    return Fraction(0) if isinstance(value, Fraction) else 0.0


@dataclass(frozen=True)
class SchmidtVector:
    """Squared Schmidt coefficients, sorted non-increasing, summing to 1.

    Entries are either exact rationals (``fractions.Fraction``) or floats;
    a vector is *exact* when every entry is rational, and all downstream
    arithmetic on exact vectors stays exact.
    """

    probs: tuple

    def __post_init__(self):
        probs = tuple(self.probs)
        if len(probs) == 0:
            raise InvalidStateError("a Schmidt vector needs at least one entry")
        cleaned = []
        for p in probs:
            if isinstance(p, Fraction):
                if p < 0:
                    raise InvalidStateError(f"negative squared coefficient {p}")
                cleaned.append(p)
            else:
                p = float(p)
                if p < -DEFAULT_TOL:
                    raise InvalidStateError(f"negative squared coefficient {p}")
                cleaned.append(max(p, 0.0))
        probs = tuple(cleaned)
        exact = all_exact(probs)
        for a, b in itertools.pairwise(probs):
            if exact:
                if a < b:
                    raise InvalidStateError(
                        f"entries not sorted non-increasing: {a} < {b}"
                    )
            elif float(a) < float(b) - DEFAULT_TOL:
                raise InvalidStateError(
                    f"entries not sorted non-increasing: {a} < {b}"
                )
        total = sum(probs)
        if exact:
            if total != 1:
                raise InvalidStateError(f"exact entries sum to {total}, not 1")
        elif abs(float(total) - 1.0) > DEFAULT_TOL:
            raise InvalidStateError(f"entries sum to {float(total)}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_values(cls, values, *, mode="rational", normalize=False,
                    trim=False, tol=DEFAULT_TOL):
        """Build a vector from loosely typed entries.

        Entries are parsed per ``mode`` ("108/144" and decimal strings are
        exact in rational mode), stably sorted in non-increasing order,
        optionally normalized by their sum, and optionally trimmed of
        trailing entries below ``tol`` (with renormalization).
        """
        parsed = [parse_scalar(v, mode) for v in values]
        if not parsed:
            raise InvalidStateError("a Schmidt vector needs at least one entry")
        for p in parsed:
            if (isinstance(p, Fraction) and p < 0) or (
                not isinstance(p, Fraction) and float(p) < -tol
            ):
                raise InvalidStateError(f"negative squared coefficient {p}")
        parsed = [p if isinstance(p, Fraction) else max(float(p), 0.0)
                  for p in parsed]
        parsed.sort(key=lambda v: -v)  # stable: ties keep input order
        if normalize:
            total = sum(parsed)
            if total == 0:
                raise InvalidStateError("cannot normalize an all-zero vector")
            parsed = [p / total for p in parsed]
        if trim:
            keep = len(parsed)
            while keep > 1 and parsed[keep - 1] < tol:
                keep -= 1
            if keep < len(parsed):
                parsed = parsed[:keep]
                total = sum(parsed)
                parsed = [p / total for p in parsed]
        return cls(tuple(parsed))

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def is_exact(self) -> bool:
        return all_exact(self.probs)

    def nonzero_count(self, tol=DEFAULT_TOL) -> int:
        """Number of entries that carry weight (exact > 0, float > tol)."""
        count = 0
        for p in self.probs:
            if isinstance(p, Fraction):
                count += p > 0
            else:
                count += float(p) > tol
        return count

    def padded(self, n: int) -> "SchmidtVector":
        if n < self.n:
            raise ValueError(f"cannot pad length {self.n} down to {n}")
        if n == self.n:
            return self
        return SchmidtVector(self.probs + (_zero_like(self.probs[0]),) * (n - self.n))

    def as_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs], dtype=float)


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Pure two-party state as an n_A x n_B complex amplitude matrix."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidStateError("amplitudes must form a 2-d matrix")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > DEFAULT_TOL:
            raise InvalidStateError(f"state norm {norm} deviates from 1")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def from_amplitudes(cls, values, *, normalize=False) -> "BipartiteState":
        arr = np.array(values, dtype=complex)
        if normalize:
            norm = np.linalg.norm(arr)
            if norm == 0:
                raise InvalidStateError("cannot normalize the zero vector")
            arr = arr / norm
        return cls(arr)

    @property
    def n_a(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_b(self) -> int:
        return self.amplitudes.shape[1]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidStateError("a density operator must be square")
        if not np.allclose(arr, arr.conj().T, atol=DEFAULT_TOL):
            raise InvalidStateError("density operator is not Hermitian")
        trace = complex(np.trace(arr)).real
        if abs(trace - 1.0) > DEFAULT_TOL:
            raise InvalidStateError(f"trace {trace} deviates from 1")
        if float(np.linalg.eigvalsh(arr)[0]) < -DEFAULT_TOL:
            raise InvalidStateError("density operator has a negative eigenvalue")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def schmidt_decompose(state: BipartiteState, *, trim=False,
                      tol=DEFAULT_TOL) -> SchmidtVector:
    """Squared singular values of the amplitude matrix, sorted descending.

    Parameters
    ----------
    state : BipartiteState
        Normalized pure state.
    trim : bool
        Drop trailing entries below ``tol`` (and renormalize).  By default
        the full min(n_A, n_B)-length vector is kept, zeros included.

    Returns
    -------
    SchmidtVector
        Float-mode vector of squared Schmidt coefficients.
    """
    svals = np.linalg.svd(state.amplitudes, compute_uv=False)
    probs = [max(float(s) ** 2, 0.0) for s in svals]
    if trim:
        keep = len(probs)
        while keep > 1 and probs[keep - 1] < tol:
            keep -= 1
        probs = probs[:keep]
        total = sum(probs)
        probs = [p / total for p in probs]
    return SchmidtVector(tuple(probs))


def state_from_schmidt(sv: SchmidtVector) -> BipartiteState:
    """Canonical n x n representative: amplitudes diag(sqrt(probs))."""
    return BipartiteState(np.diag(np.sqrt(sv.as_floats())).astype(complex))


def tensor_power(sv: SchmidtVector, copies: int) -> SchmidtVector:
    """Schmidt vector of ``copies`` independent copies of the state.

    Entries are all products of one entry per copy, re-sorted descending;
    the result has n**copies entries and stays exact for exact input.
    """
    if not isinstance(copies, int) or copies < 1:
        raise ValueError(f"copies must be a positive integer, got {copies!r}")
    if copies == 1:
        return sv
    products = [math.prod(combo)
                for combo in itertools.product(sv.probs, repeat=copies)]
    products.sort(reverse=True)
    return SchmidtVector(tuple(products))


def reduced_density(state: BipartiteState) -> DensityOperator:
    """Reduced operator on the second party, Tr_A |psi><psi|.

    Its nonzero spectrum equals the squared Schmidt coefficients.
    """
    amp = state.amplitudes
    rho = amp.T @ amp.conj()
    # clean Hermitian round-off so the constructor's checks see a clean matrix
    rho = (rho + rho.conj().T) / 2
    return DensityOperator(rho)


def majorizes(x: SchmidtVector, y: SchmidtVector, *, tol=DEFAULT_TOL) -> bool:
    """True when y majorizes x (every head sum of y >= that of x).

    Vectors are zero-padded to a common length.  Exact comparison when
    both vectors are rational; otherwise float comparison with ``tol``
    slack per head sum.
    """
    n = max(x.n, y.n)
    xs = x.padded(n).probs
    ys = y.padded(n).probs
    if x.is_exact and y.is_exact:
        hx = Fraction(0)
        hy = Fraction(0)
        for a, b in zip(xs, ys):
            hx += a
            hy += b
            if hy < hx:
                return False
        return True
    hx = 0.0
    hy = 0.0
    for a, b in zip(xs, ys):
        hx += float(a)
        hy += float(b)
        if hy < hx - tol:
            return False
    return True
