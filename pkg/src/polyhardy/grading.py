"""Graded monomial bases, Hardy vectors, and the re-indexing unitary.

The ambient space is a degree-capped slice of a vector-valued Hardy space in
one outer variable ``z`` and ``n`` inner variables ``z1..zn``, with a
``coeff_dim``-dimensional coefficient slot.  Monomials are orthonormal; the
fixed dense ordering is lexicographic on ``(outer, inner..., coord)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import GradeError


@dataclass(frozen=True)
class Grade:
    """Truncation caps of the ambient space.

    ``safe_margin`` degrees are reserved as a guard band: residual checks for
    degree-raising operators are read only on indices at least ``safe_margin``
    below every cap.
    """

    n: int
    outer_cap: int
    inner_cap: int
    coeff_dim: int = 1
    safe_margin: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GradeError("need at least one inner variable")
        if self.outer_cap < 0 or self.inner_cap < 0:
            raise GradeError("degree caps must be nonnegative")
        if self.coeff_dim < 1:
            raise GradeError("coefficient dimension must be positive")
        if self.safe_margin < 0:
            raise GradeError("safe margin must be nonnegative")

    @property
    def dim(self) -> int:
        return (self.outer_cap + 1) * (self.inner_cap + 1) ** self.n * self.coeff_dim

    @property
    def inner_slot_dim(self) -> int:
        """Dimension of the inner-variables-plus-coefficient slot."""
        return (self.inner_cap + 1) ** self.n * self.coeff_dim

    @property
    def indices(self) -> tuple[tuple[int, ...], ...]:
        """All monomial indices ``(a, b1.., e)`` in the fixed dense order."""
        return _indices(self)

    @property
    def index_of(self) -> Mapping[tuple[int, ...], int]:
        return _index_map(self)

    @property
    def safe_mask(self) -> np.ndarray:
        """Boolean mask of indices on the safe band (read-only)."""
        return _safe_mask(self)

    def position(self, idx: MultiIndex) -> int:
        key = (idx.outer, *idx.inner, idx.coord)
        try:
            return self.index_of[key]
        except KeyError:
            raise GradeError(f"index {key} outside caps of {self}") from None


@lru_cache(maxsize=None)
def _indices(grade: Grade) -> tuple[tuple[int, ...], ...]:
    axes = [range(grade.outer_cap + 1)]
    axes += [range(grade.inner_cap + 1)] * grade.n
    axes += [range(grade.coeff_dim)]
    return tuple(itertools.product(*axes))


@lru_cache(maxsize=None)
def _index_map(grade: Grade) -> Mapping[tuple[int, ...], int]:
    return {t: i for i, t in enumerate(_indices(grade))}


@lru_cache(maxsize=None)
def _safe_mask(grade: Grade) -> np.ndarray:
    ms = grade.safe_margin
    mask = np.array(
        [
            t[0] <= grade.outer_cap - ms
            and all(b <= grade.inner_cap - ms for b in t[1:-1])
            for t in _indices(grade)
        ],
        dtype=bool,
    )
    mask.flags.writeable = False
    return mask


@dataclass(frozen=True)
class MultiIndex:
    """Monomial exponents: outer degree, inner degrees, coefficient coordinate."""

    outer: int
    inner: tuple[int, ...]
    coord: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "inner", tuple(self.inner))
        if self.outer < 0 or self.coord < 0 or any(b < 0 for b in self.inner):
            raise GradeError("multi-index entries must be nonnegative")

    def within(self, grade: Grade) -> bool:
        return (
            self.outer <= grade.outer_cap
            and len(self.inner) == grade.n
            and all(b <= grade.inner_cap for b in self.inner)
            and self.coord < grade.coeff_dim
        )


@dataclass(frozen=True)
class PolydiscIndex:
    """Monomial exponents on the polydisc side: ``n+1`` equal variables."""

    exponents: tuple[int, ...]
    coord: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if any(k < 0 for k in self.exponents) or self.coord < 0:
            raise GradeError("polydisc exponents must be nonnegative")


@dataclass(frozen=True)
class HardyVector:
    """Element of the capped Hardy space as a sparse coefficient map."""

    grade: Grade
    coeffs: Mapping[MultiIndex, complex]

    def __post_init__(self) -> None:
        clean = {k: complex(v) for k, v in self.coeffs.items() if v != 0}
        for key in clean:
            if not key.within(self.grade):
                raise GradeError(f"index {key} violates caps of {self.grade}")
        object.__setattr__(self, "coeffs", clean)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values())))

    def to_dense(self) -> np.ndarray:
        v = np.zeros(self.grade.dim, dtype=complex)
        for key, c in self.coeffs.items():
            v[self.grade.position(key)] = c
        return v

    @classmethod
    def from_dense(cls, grade: Grade, dense: np.ndarray, tol: float = 0.0) -> HardyVector:
        if dense.shape != (grade.dim,):
            raise GradeError("dense vector length does not match the grade")
        coeffs = {}
        for t, c in zip(grade.indices, dense):
            if abs(c) > tol:
                coeffs[MultiIndex(t[0], t[1:-1], t[-1])] = complex(c)
        return cls(grade, coeffs)

    def outer_degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(k.outer for k in self.coeffs)

    def inner_degrees(self) -> tuple[int, ...]:
        if not self.coeffs:
            return (0,) * self.grade.n
        return tuple(
            max(k.inner[i] for k in self.coeffs) for i in range(self.grade.n)
        )


def inner_product(f: HardyVector, g: HardyVector) -> complex:
    """Hardy inner product: monomials are orthonormal."""
    if f.grade != g.grade:
        raise GradeError("inner product requires a shared grade")
    small, large = (f.coeffs, g.coeffs) if len(f.coeffs) <= len(g.coeffs) else (g.coeffs, f.coeffs)
    total = 0j
    for key, c in small.items():
        other = large.get(key)
        if other is not None:
            if small is f.coeffs:
                total += c * np.conj(other)
            else:
                total += other * np.conj(c)
    return complex(total)


def reindex_to_disc(
    v: Mapping[PolydiscIndex, complex], grade: Grade
) -> HardyVector:
    """Relabel polydisc exponents ``(k1, k2..kn+1; e)`` to ``(a=k1; b=rest; e)``.

    Pure relabeling: exact on every coefficient, preserves inner products.
    """
    coeffs: dict[MultiIndex, complex] = {}
    for key, c in v.items():
        if len(key.exponents) != grade.n + 1:
            raise GradeError("polydisc index arity does not match the grade")
        idx = MultiIndex(key.exponents[0], key.exponents[1:], key.coord)
        if not idx.within(grade):
            raise GradeError(f"exponent {key.exponents} outside caps")
        coeffs[idx] = complex(c)
    return HardyVector(grade, coeffs)


def reindex_to_polydisc(f: HardyVector) -> dict[PolydiscIndex, complex]:
    """Exact inverse of :func:`reindex_to_disc`."""
    return {
        PolydiscIndex((k.outer, *k.inner), k.coord): c for k, c in f.coeffs.items()
    }


def hardy_basis_vector(grade: Grade, idx: MultiIndex) -> HardyVector:
    return HardyVector(grade, {idx: 1.0})


def dense_matrix(grade: Grade, vectors: Iterable[HardyVector]) -> np.ndarray:
    cols = [v.to_dense() for v in vectors]
    if not cols:
        return np.zeros((grade.dim, 0), dtype=complex)
    return np.stack(cols, axis=1)
