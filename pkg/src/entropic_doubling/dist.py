"""Dense probability distributions over F_2^n.

A Dist is a length-2^n float64 table; a JointDist is a k-block table (k <= 4)
with one axis per block.  All operations are pure: inputs are never mutated
and returned tables are renormalized to kill floating-point drift, with
sub-MASS_EPS dust clamped to zero.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    ConditioningError,
    DimensionMismatchError,
    EmptySupportError,
    NormalizationError,
    ValidationError,
)
from .gf2 import Subspace
from .tolerances import IDENTITY_TOL, MASS_EPS, max_dense_n, max_joint_bits


def _clean(raw: np.ndarray) -> np.ndarray:
    """Clamp dust, renormalize, freeze."""
    mass = np.asarray(raw, dtype=np.float64).copy()
    if mass.min() < -1e-12:
        raise NormalizationError(f"negative mass {mass.min():.3e}")
    mass[mass < MASS_EPS] = 0.0
    total = mass.sum()
    if abs(total - 1.0) > IDENTITY_TOL:
        raise NormalizationError(f"total mass {total!r} not within 1e-9 of 1")
    mass /= total
    mass.setflags(write=False)
    return mass


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability distribution over F_2^n as a dense table."""

    n: int
    mass: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= max_dense_n():
            raise CapacityError(f"dense distributions capped at n <= {max_dense_n()}")
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (1 << self.n,):
            raise DimensionMismatchError(
                f"mass table has shape {mass.shape}, expected ({1 << self.n},)"
            )
        object.__setattr__(self, "mass", _clean(mass))

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.mass > 0.0)[0]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.n).encode())
        h.update(np.round(self.mass, 12).tobytes())
        return h.hexdigest()[:16]

    def to_json(self, sparse: bool | None = None) -> dict:
        if sparse is None:
            sparse = len(self.support) * 4 < len(self.mass)
        if sparse:
            return {
                "n": self.n,
                "support": {format(int(i), "x"): float(self.mass[i]) for i in self.support},
            }
        return {"n": self.n, "mass": [float(m) for m in self.mass]}

    @classmethod
    def from_json(cls, payload: dict) -> "Dist":
        try:
            n = int(payload["n"])
            if "mass" in payload:
                mass = np.asarray(payload["mass"], dtype=np.float64)
            else:
                mass = np.zeros(1 << n)
                for key, val in payload["support"].items():
                    mass[int(key, 16)] = float(val)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ValidationError(f"malformed distribution payload: {exc}") from exc
        try:
            return cls(n, mass)
        except (NormalizationError, DimensionMismatchError, CapacityError) as exc:
            raise ValidationError(str(exc)) from exc


@dataclass(frozen=True, eq=False)
class JointDist:
    """Joint distribution over a product of F_2^{n_i} blocks, k <= 4."""

    dims: tuple[int, ...]
    mass: np.ndarray

    def __post_init__(self):
        if not 1 <= len(self.dims) <= 4:
            raise CapacityError("joint distributions support 1..4 blocks")
        if sum(self.dims) > max_joint_bits():
            raise CapacityError(f"joint table exceeds {max_joint_bits()} total bits")
        shape = tuple(1 << d for d in self.dims)
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != shape:
            raise DimensionMismatchError(
                f"mass table has shape {mass.shape}, expected {shape}"
            )
        object.__setattr__(self, "mass", _clean(mass))

    @property
    def k(self) -> int:
        return len(self.dims)

    def marginal(self, blocks: int | Sequence[int]) -> "JointDist | Dist":
        keep = (blocks,) if isinstance(blocks, int) else tuple(blocks)
        if any(b < 0 or b >= self.k for b in keep) or len(set(keep)) != len(keep):
            raise ValueError(f"invalid block indices {keep}")
        drop = tuple(a for a in range(self.k) if a not in keep)
        table = self.mass.sum(axis=drop) if drop else self.mass
        # Reorder axes to the requested block order.
        order = tuple(sorted(range(len(keep)), key=lambda i: keep[i]))
        inverse = tuple(np.argsort(order))
        table = np.transpose(table, inverse)
        if len(keep) == 1:
            return Dist(self.dims[keep[0]], table)
        return JointDist(tuple(self.dims[b] for b in keep), table)


def uniform_on(elements: Iterable[int], n: int) -> Dist:
    """Uniform distribution on a nonempty subset of F_2^n."""
    members = sorted(set(elements))
    if not members:
        raise EmptySupportError("uniform_on requires a nonempty set")
    mass = np.zeros(1 << n)
    for x in members:
        if not 0 <= x < (1 << n):
            raise DimensionMismatchError(f"element {x:#x} out of range for F_2^{n}")
        mass[x] = 1.0 / len(members)
    return Dist(n, mass)


def point_mass(x: int, n: int) -> Dist:
    return uniform_on([x], n)


def uniform_on_subspace(v: Subspace) -> Dist:
    return uniform_on(list(v.elements()), v.n)


def random_dist(n: int, rng: np.random.Generator, support_size: int | None = None) -> Dist:
    """Random distribution with exponential weights on a random support."""
    size = 1 << n
    mass = np.zeros(size)
    if support_size is None:
        mass = rng.exponential(size=size)
    else:
        support_size = max(1, min(support_size, size))
        idx = rng.choice(size, size=support_size, replace=False)
        mass[idx] = rng.exponential(size=support_size)
    mass /= mass.sum()
    return Dist(n, mass)


def wht(table: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis; wht(wht(t)) == size * t."""
    out = np.asarray(table, dtype=np.float64).copy()
    size = out.shape[-1]
    if size == 0 or size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    h = 1
    while h < size:
        blocks = out.reshape(-1, 2 * h)
        a = blocks[:, :h].copy()
        b = blocks[:, h:].copy()
        blocks[:, :h] = a + b
        blocks[:, h:] = a - b
        h *= 2
    return out


def _convolve_raw(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """XOR convolution of raw (not necessarily normalized) tables."""
    spec = wht(a) * wht(b)
    return wht(spec) / len(a)


def xor_convolve(p: Dist, q: Dist) -> Dist:
    """Distribution of X+Y for independent X ~ p, Y ~ q (fast transform)."""
    if p.n != q.n:
        raise DimensionMismatchError("ambient dimensions differ")
    return Dist(p.n, np.maximum(_convolve_raw(p.mass, q.mass), 0.0))


def xor_convolve_naive(p: Dist, q: Dist) -> Dist:
    """Test oracle: explicit double sum over all pairs, no fast transform."""
    if p.n != q.n:
        raise DimensionMismatchError("ambient dimensions differ")
    size = 1 << p.n
    idx = np.arange(size)
    pairs = idx[:, None] ^ idx[None, :]
    out = np.zeros(size)
    np.add.at(out, pairs.ravel(), np.outer(p.mass, q.mass).ravel())
    return Dist(p.n, out)


def pushforward_quotient(p: Dist, v: Subspace) -> Dist:
    """Distribution of pi_V(X), supported on canonical coset representatives."""
    if p.n != v.n:
        raise DimensionMismatchError("ambient dimensions differ")
    reps = v.rep_table()
    out = np.bincount(reps, weights=p.mass, minlength=1 << p.n)
    return Dist(p.n, out)


def condition_on_sum(p: Dist, q: Dist, u: int) -> Dist:
    """Distribution of (X | X+Y = u) for independent X ~ p, Y ~ q."""
    if p.n != q.n:
        raise DimensionMismatchError("ambient dimensions differ")
    if not 0 <= u < (1 << p.n):
        raise DimensionMismatchError(f"element {u:#x} out of range for F_2^{p.n}")
    idx = np.arange(1 << p.n)
    joint = p.mass * q.mass[idx ^ u]
    total = joint.sum()
    if total <= MASS_EPS:
        raise ConditioningError(f"event X+Y = {u:#x} has probability zero")
    return Dist(p.n, joint / total)


def product(*dists: Dist) -> JointDist:
    """Product measure of up to four independent distributions."""
    if not 2 <= len(dists) <= 4:
        raise CapacityError("product requires 2..4 factors")
    table = dists[0].mass
    for d in dists[1:]:
        table = np.multiply.outer(table, d.mass)
    return JointDist(tuple(d.n for d in dists), table)


def map_joint(j: JointDist, outputs: Sequence[Sequence[int]]) -> Dist | JointDist:
    """Pushforward under a linear map given, per output block, the input
    blocks to XOR together.  All XORed blocks must share a dimension."""
    outputs = [tuple(spec) for spec in outputs]
    if not 1 <= len(outputs) <= 4:
        raise ValueError("map must produce 1..4 output blocks")
    out_dims = []
    for spec in outputs:
        if not spec or any(b < 0 or b >= j.k for b in spec) or len(set(spec)) != len(spec):
            raise ValueError(f"malformed output block {spec}")
        dims = {j.dims[b] for b in spec}
        if len(dims) > 1:
            raise DimensionMismatchError(f"blocks {spec} have mixed dimensions")
        out_dims.append(dims.pop())
    out_shape = tuple(1 << d for d in out_dims)
    grids = np.ix_(*[np.arange(1 << d) for d in j.dims])
    flat = np.zeros(j.mass.shape, dtype=np.int64)
    stride = 1
    for size, spec in zip(reversed(out_shape), reversed(outputs)):
        coord = np.zeros(j.mass.shape, dtype=np.int64)
        for b in spec:
            coord = coord ^ grids[b]
        flat += coord * stride
        stride *= size
    out = np.zeros(int(np.prod(out_shape)))
    np.add.at(out, flat.ravel(), j.mass.ravel())
    out = out.reshape(out_shape)
    if len(out_dims) == 1:
        return Dist(out_dims[0], out)
    return JointDist(tuple(out_dims), out)


def mixture(weights: np.ndarray, dists: Sequence[Dist]) -> Dist:
    """Weighted mixture of distributions on a common F_2^n."""
    if len(weights) != len(dists) or not dists:
        raise ValueError("weights and distributions must align and be nonempty")
    n = dists[0].n
    if any(d.n != n for d in dists):
        raise DimensionMismatchError("ambient dimensions differ")
    out = np.zeros(1 << n)
    for w, d in zip(weights, dists):
        out += w * d.mass
    return Dist(n, out)


@dataclass(frozen=True)
class FiberFamily:
    """Conditioned fibers X_u = (X | U = u) with their weights."""

    labels: tuple[int, ...]
    weights: np.ndarray
    dists: tuple[Dist, ...]

    def mixture(self) -> Dist:
        return mixture(self.weights, self.dists)

    def conditional_entropy(self) -> float:
        from .entropy import shannon_entropy

        return float(
            sum(w * shannon_entropy(d) for w, d in zip(self.weights, self.dists))
        )


def sum_fibers(p: Dist, q: Dist) -> FiberFamily:
    """Fibers of X given X+Y = u over supp(X+Y), weighted by Pr[X+Y=u]."""
    conv = xor_convolve(p, q)
    labels, weights, dists = [], [], []
    for u in conv.support:
        labels.append(int(u))
        weights.append(float(conv.mass[u]))
        dists.append(condition_on_sum(p, q, int(u)))
    return FiberFamily(tuple(labels), np.asarray(weights), tuple(dists))


def quotient_fibers(p: Dist, v: Subspace) -> FiberFamily:
    """Fibers of X given pi_V(X) = t over the occupied cosets."""
    if p.n != v.n:
        raise DimensionMismatchError("ambient dimensions differ")
    reps = v.rep_table()
    pushed = np.bincount(reps, weights=p.mass, minlength=1 << p.n)
    labels, weights, dists = [], [], []
    for t in np.nonzero(pushed > 0.0)[0]:
        sel = np.where(reps == t, p.mass, 0.0)
        labels.append(int(t))
        weights.append(float(pushed[t]))
        dists.append(Dist(p.n, sel / pushed[t]))
    return FiberFamily(tuple(labels), np.asarray(weights), tuple(dists))
