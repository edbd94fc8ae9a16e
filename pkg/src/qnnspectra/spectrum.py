"""Exact frequency-spectrum algebra over integer-scaled rational sets.

A :class:`FreqSet` stores integer numerators with one shared denominator so
set membership never touches floating point. The spectrum of an encoding is
the difference set of the Minkowski sum of all sub-generator spectra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from . import encodings
from .errors import ArchitectureError, CapacityError, ContractError, UnsupportedError

PAIR_CAP = 10 ** 8


def _common_scale(values) -> tuple[list[int], int]:
    fr = [Fraction(v) for v in values]
    scale = reduce(lcm, (f.denominator for f in fr), 1)
    return [int(f * scale) for f in fr], scale


@dataclass(frozen=True, eq=False)
class FreqSet:
    """Sorted distinct rationals ``numerators / scale``."""

    numerators: np.ndarray
    scale: int = 1

    def __post_init__(self):
        num = np.unique(np.asarray(self.numerators, dtype=np.int64))
        scale = int(self.scale)
        if scale < 1:
            raise ContractError("scale must be a positive integer")
        g = reduce(gcd, (int(v) for v in num), scale)
        if g > 1:
            num, scale = num // g, scale // g
        object.__setattr__(self, "numerators", num)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def of(cls, values: Iterable) -> "FreqSet":
        num, scale = _common_scale(list(values))
        return cls(np.array(num, dtype=np.int64), scale)

    @property
    def elements(self) -> tuple:
        if self.scale == 1:
            return tuple(int(v) for v in self.numerators)
        return tuple(Fraction(int(v), self.scale) for v in self.numerators)

    def rescaled(self, scale: int) -> np.ndarray:
        if scale % self.scale:
            raise ContractError(f"cannot express scale {self.scale} in units of 1/{scale}")
        return self.numerators * (scale // self.scale)

    def __len__(self):
        return int(self.numerators.shape[0])

    def __contains__(self, value) -> bool:
        f = Fraction(value) * self.scale
        if f.denominator != 1:
            return False
        i = np.searchsorted(self.numerators, int(f))
        return bool(i < len(self) and self.numerators[i] == int(f))

    def __eq__(self, other):
        return (
            isinstance(other, FreqSet)
            and self.scale == other.scale
            and np.array_equal(self.numerators, other.numerators)
        )

    def __repr__(self):
        return f"FreqSet({list(self.elements)!r})"


def _as_set(s) -> FreqSet:
    return s if isinstance(s, FreqSet) else FreqSet.of(s)


def difference_set(S) -> FreqSet:
    S = _as_set(S)
    if len(S) == 0:
        raise ContractError("difference set of an empty set")
    n = S.numerators
    return FreqSet((n[:, None] - n[None, :]).ravel(), S.scale)


def minkowski_sum(sets: Sequence) -> FreqSet:
    sets = [_as_set(s) for s in sets]
    if not sets:
        raise ContractError("minkowski_sum needs at least one set")
    scale = reduce(lcm, (s.scale for s in sets), 1)
    acc = sets[0].rescaled(scale)
    for s in sets[1:]:
        acc = np.unique((acc[:, None] + s.rescaled(scale)[None, :]).ravel())
    return FreqSet(acc, scale)


def _fold_multiset(vals, counts, other_vals, other_counts, cap):
    if vals.shape[0] * other_vals.shape[0] > cap:
        raise CapacityError(f"multiset fold exceeds {cap} pairs")
    s = (vals[:, None] + other_vals[None, :]).ravel()
    w = (counts[:, None] * other_counts[None, :]).ravel()
    u, inv = np.unique(s, return_inverse=True)
    return u, _sum_by(inv, w, u.shape[0])


def _sum_by(inv, w, size):
    out = np.zeros(size, dtype=np.int64)
    np.add.at(out, inv, w)
    return out


def minkowski_multiset(multisets: Sequence[Sequence], cap: int = PAIR_CAP) -> tuple[np.ndarray, np.ndarray, int]:
    """Sum-multiset of eigenvalue lists: ``(numerators, multiplicities, scale)``."""
    lists = [_common_scale(list(m)) for m in multisets]
    if not lists:
        raise ContractError("minkowski_multiset needs at least one multiset")
    scale = reduce(lcm, (sc for _, sc in lists), 1)
    vals, counts = None, None
    for nums, sc in lists:
        v, c = np.unique(np.array(nums, dtype=np.int64) * (scale // sc), return_counts=True)
        if vals is None:
            vals, counts = v, c.astype(np.int64)
        else:
            vals, counts = _fold_multiset(vals, counts, v, c.astype(np.int64), cap)
    return vals, counts, scale


def degeneracy_map(vals, counts, scale, cap: int = PAIR_CAP) -> dict:
    """``omega -> #{(s1, s2) : s1 - s2 = omega}`` over a sum-multiset."""
    if vals.shape[0] ** 2 > cap:
        raise CapacityError(f"degeneracy enumeration exceeds {cap} pairs")
    d = (vals[:, None] - vals[None, :]).ravel()
    w = (counts[:, None] * counts[None, :]).ravel()
    u, inv = np.unique(d, return_inverse=True)
    total = _sum_by(inv, w, u.shape[0])
    out = {}
    for num, m in zip(u.tolist(), total.tolist()):
        f = Fraction(num, scale)
        out[int(f) if f.denominator == 1 else f] = m
    return out


def max_gapfree_K(omega: FreqSet) -> int:
    """Largest ``K`` with every integer in ``[-K, K]`` contained in ``omega``."""
    if omega.scale != 1:
        ints = omega.numerators[omega.numerators % omega.scale == 0] // omega.scale
    else:
        ints = omega.numerators
    pos = ints[ints > 0]
    if 0 not in set(ints.tolist()):
        raise ContractError("0 is not in the set")
    # consecutive run 1, 2, ... at the start of the sorted positives
    run = np.flatnonzero(pos != np.arange(1, pos.shape[0] + 1))
    return int(run[0]) if run.shape[0] else int(pos.shape[0])


def turnpike_K(eigenvalues: Sequence[int]) -> int:
    return max_gapfree_K(difference_set(eigenvalues))


def is_golomb_ruler(marks: Sequence[int]) -> bool:
    marks = [int(m) for m in marks]
    diffs = [b - a for i, a in enumerate(marks) for b in marks[i + 1:]]
    return len(diffs) == len(set(diffs))


@dataclass(frozen=True)
class SpectrumReport:
    omega: FreqSet
    positive_size: int
    max_gapfree_K: int
    degeneracy: dict = field(repr=False)


def subgenerator_sets(fam, R: int, L: int) -> list[list]:
    """Eigenvalue multisets (as rationals) of every sub-generator ``beta[r, l] * H``."""
    fam = encodings.family(fam, R)
    beta = encodings.schedule(fam, R, L).beta
    eig = encodings.subgenerator_eigenvalues(fam)
    return [[int(b) * Fraction(e) for e in eig] for b in beta.ravel()]


def frequency_spectrum(fam, R: int, L: int, with_degeneracy: bool = True) -> SpectrumReport:
    sets = subgenerator_sets(fam, R, L)
    omega = difference_set(minkowski_sum([FreqSet.of(s) for s in sets]))
    degeneracy = {}
    if with_degeneracy:
        vals, counts, scale = minkowski_multiset(sets)
        degeneracy = degeneracy_map(vals, counts, scale)
    return SpectrumReport(
        omega=omega,
        positive_size=(len(omega) - 1) // 2,
        max_gapfree_K=max_gapfree_K(omega),
        degeneracy=degeneracy,
    )


def analytic_size(fam, A: int, q: int | None = None) -> int:
    """Closed-form ``|Omega_{>0}|`` for area ``A``."""
    name = fam.name if isinstance(fam, encodings.EncodingFamily) else str(fam).lower()
    if A < 1:
        raise ArchitectureError("area must be positive")
    if name == "hamming":
        return A
    if name == "binary":
        return 2 ** A - 1
    if name == "exponential":
        return 2 ** A if A > 1 else 1
    if name == "ternary":
        return (3 ** A - 1) // 2
    if name == "golomb":
        if isinstance(fam, encodings.EncodingFamily):
            q, eig = fam.q, fam.fixed_eigenvalues
        else:
            if q is None:
                raise ArchitectureError("golomb closed form needs the block width q")
            eig = encodings.EncodingFamily("golomb", q).fixed_eigenvalues
        if A % q:
            raise ArchitectureError(f"q={q} does not divide A={A}")
        return (len(difference_set(eig)) ** (A // q) - 1) // 2
    if name == "turnpike":
        raise UnsupportedError("turnpike has only a lower bound; use frequency_spectrum")
    raise ArchitectureError(f"unknown encoding family {name!r}")


def turnpike_lower_bound(A: int, q: int, eigenvalues: Sequence[int] | None = None) -> int:
    """``K`` such that ``Z_K`` is guaranteed inside a turnpike spectrum of area ``A``."""
    if eigenvalues is None:
        eigenvalues = encodings.EncodingFamily("turnpike", q).fixed_eigenvalues
    if A % q:
        raise ArchitectureError(f"q={q} does not divide A={A}")
    K = turnpike_K(eigenvalues)
    return ((2 * K + 1) ** (A // q) - 1) // 2
