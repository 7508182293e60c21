"""Bit-packed linear algebra over F_2^n.

Group elements are plain int bitmasks (bit i = coordinate i, addition is XOR);
subspaces are kept in canonical reduced row echelon form so that two Subspace
values are equal iff they describe the same subspace.  Pivots are least
significant set bits and pivot columns strictly increase down the basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import CapacityError, DimensionMismatchError, ValidationError
from .tolerances import MAX_ELEMENT_N, MAX_ENUM_N


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_ELEMENT_N:
        raise CapacityError(f"ambient dimension must be in [1, {MAX_ELEMENT_N}], got {n}")


def _check_element(x: int, n: int) -> None:
    if not 0 <= x < (1 << n):
        raise DimensionMismatchError(f"element {x:#x} out of range for F_2^{n}")


def pivot_of(row: int) -> int:
    """Index of the least significant set bit."""
    return (row & -row).bit_length() - 1


def _rref(vectors: Iterable[int], n: int) -> tuple[int, ...]:
    """Reduced row echelon form, rows sorted by increasing pivot column."""
    rows: list[int] = []
    for v in vectors:
        _check_element(v, n)
        for r in rows:
            if (v >> pivot_of(r)) & 1:
                v ^= r
        if v:
            rows.append(v)
    # Back-substitute so every pivot column is zero in all other rows.
    rows.sort(key=pivot_of)
    for i, r in enumerate(rows):
        p = pivot_of(r)
        for j in range(len(rows)):
            if j != i and (rows[j] >> p) & 1:
                rows[j] ^= r
    rows.sort(key=pivot_of)
    return tuple(rows)


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_2^n held as a canonical RREF basis."""

    n: int
    basis: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        if self.basis != _rref(self.basis, self.n):
            raise ValidationError(f"basis {self.basis} is not in canonical RREF")

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(1 << i for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(pivot_of(r) for r in self.basis)

    def reduce(self, x: int) -> int:
        """Canonical coset representative: zeros in all pivot coordinates."""
        _check_element(x, self.n)
        for r in self.basis:
            if (x >> pivot_of(r)) & 1:
                x ^= r
        return x

    def contains(self, x: int) -> bool:
        return self.reduce(x) == 0

    def is_subspace_of(self, other: "Subspace") -> bool:
        if self.n != other.n:
            raise DimensionMismatchError("ambient dimensions differ")
        return all(other.contains(r) for r in self.basis)

    def elements(self) -> Iterator[int]:
        """All 2^dim members (capacity-guarded)."""
        if self.dim > MAX_ELEMENT_N:
            raise CapacityError("subspace too large to enumerate")
        for mask in range(1 << self.dim):
            x = 0
            m = mask
            while m:
                i = pivot_of(m)
                x ^= self.basis[i]
                m &= m - 1
            yield x

    def rep_table(self) -> np.ndarray:
        """Vectorized x -> canonical representative over all of F_2^n."""
        return _rep_table(self.n, self.basis)

    def quotient_map(self) -> "QuotientMap":
        return QuotientMap(self)

    def to_json(self) -> dict:
        return {"n": self.n, "basis": [format(r, "x") for r in self.basis]}

    @classmethod
    def from_json(cls, payload: dict) -> "Subspace":
        try:
            n = int(payload["n"])
            basis = tuple(int(h, 16) for h in payload["basis"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed subspace payload: {exc}") from exc
        return cls(n, basis)


@lru_cache(maxsize=4096)
def _rep_table(n: int, basis: tuple[int, ...]) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    rep = idx.copy()
    # Rows never touch each other's pivot bits (RREF), so order is irrelevant.
    for r in basis:
        p = pivot_of(r)
        rep ^= ((rep >> p) & 1) * r
    rep.setflags(write=False)
    return rep


@dataclass(frozen=True)
class QuotientMap:
    """The linear projection G -> G/V via canonical coset representatives."""

    subspace: Subspace

    def __call__(self, x: int) -> int:
        return self.subspace.reduce(x)


def project(q: QuotientMap, x: int) -> int:
    return q(x)


def span(vectors: Iterable[int], n: int) -> Subspace:
    """Canonical subspace spanned by the given bitmask vectors."""
    _check_n(n)
    return Subspace(n, _rref(vectors, n))


def subspace_sum(v1: Subspace, v2: Subspace) -> Subspace:
    if v1.n != v2.n:
        raise DimensionMismatchError("ambient dimensions differ")
    return span(v1.basis + v2.basis, v1.n)


def subspace_intersect(v1: Subspace, v2: Subspace) -> Subspace:
    """Kernel method: coefficient vectors whose v1-combination lies in v2."""
    if v1.n != v2.n:
        raise DimensionMismatchError("ambient dimensions differ")
    # Pairs (image, coefficient tracker); eliminate images, harvest kernel.
    pivots: dict[int, tuple[int, int]] = {}
    kernel: list[int] = []
    for i, b in enumerate(v1.basis):
        img, track = v2.reduce(b), 1 << i
        while img:
            p = pivot_of(img)
            if p in pivots:
                pimg, ptrack = pivots[p]
                img ^= pimg
                track ^= ptrack
            else:
                pivots[p] = (img, track)
                break
        if img == 0:
            kernel.append(track)
    members = []
    for track in kernel:
        x = 0
        m = track
        while m:
            i = pivot_of(m)
            x ^= v1.basis[i]
            m &= m - 1
        members.append(x)
    return span(members, v1.n)


def enumerate_subspaces(n: int, max_dim: int | None = None) -> Iterator[Subspace]:
    """Every subspace of F_2^n with dim <= max_dim, ordered by (dim, lex basis)."""
    _check_n(n)
    if n > MAX_ENUM_N:
        raise CapacityError(f"exhaustive enumeration capped at n <= {MAX_ENUM_N}")
    if max_dim is None:
        max_dim = n
    if max_dim > n:
        raise ValueError("max_dim exceeds ambient dimension")
    for d in range(max_dim + 1):
        bucket: list[tuple[int, ...]] = []
        for pivs in itertools.combinations(range(n), d):
            piv_set = set(pivs)
            free = [[j for j in range(p + 1, n) if j not in piv_set] for p in pivs]
            for fill in itertools.product(*[range(1 << len(f)) for f in free]):
                rows = []
                for i, p in enumerate(pivs):
                    row = 1 << p
                    for k, j in enumerate(free[i]):
                        if (fill[i] >> k) & 1:
                            row |= 1 << j
                    rows.append(row)
                bucket.append(tuple(rows))
        bucket.sort()
        for basis in bucket:
            yield Subspace(n, basis)


@lru_cache(maxsize=16)
def all_subspaces(n: int) -> tuple[Subspace, ...]:
    return tuple(enumerate_subspaces(n))


def coset_decompose(elements: Iterable[int], v: Subspace) -> dict[int, tuple[int, ...]]:
    """Partition a set by cosets of v, keyed by canonical representative."""
    parts: dict[int, list[int]] = {}
    for x in sorted(set(elements)):
        parts.setdefault(v.reduce(x), []).append(x)
    return {rep: tuple(members) for rep, members in sorted(parts.items())}


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F_2^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= (1 << n) - (1 << i)
        den *= (1 << k) - (1 << i)
    return num // den
