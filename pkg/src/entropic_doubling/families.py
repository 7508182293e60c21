"""Example families of moderate-doubling sets, and set-level sumset stats.

Generators are deterministic given (parameters, seed); the PRNG is numpy's
PCG64 and the algorithm identifier is recorded in experiment outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, EmptySupportError
from .gf2 import span
from .tolerances import MAX_ELEMENT_N

PRNG_ID = "numpy-pcg64"


def hamming_ball(n: int, r: int) -> list[int]:
    """All vectors of Hamming weight <= r, sorted."""
    if not 0 <= r <= n or n > MAX_ELEMENT_N:
        raise ValueError(f"need 0 <= r <= n <= {MAX_ELEMENT_N}")
    out = [0]
    for w in range(1, r + 1):
        for bits in combinations(range(n), w):
            x = 0
            for b in bits:
                x |= 1 << b
            out.append(x)
    return sorted(out)


def random_subset_of_subspace(n: int, dim_v: int, count: int, seed: int) -> list[int]:
    """Uniformly random count-subset of the first-coordinates subspace."""
    if not 0 <= dim_v <= n or n > MAX_ELEMENT_N:
        raise ValueError("invalid dimensions")
    if not 1 <= count <= (1 << dim_v):
        raise ValueError(f"count must lie in [1, 2^{dim_v}]")
    rng = np.random.default_rng(seed)
    members = rng.choice(1 << dim_v, size=count, replace=False)
    return sorted(int(x) for x in members)


def union_of_cosets(n: int, dim_v: int, num_cosets: int, seed: int) -> list[int]:
    """A = V + Lambda for a random Lambda of the given size."""
    if not 0 <= dim_v <= n or n > MAX_ELEMENT_N:
        raise ValueError("invalid dimensions")
    if not 1 <= num_cosets <= (1 << n):
        raise ValueError("invalid coset count")
    if n > 24:
        raise CapacityError("set generation capped for dense enumeration")
    rng = np.random.default_rng(seed)
    lam = rng.choice(1 << n, size=num_cosets, replace=False)
    v = span([1 << i for i in range(dim_v)], n)
    out = {int(l) ^ x for l in lam for x in v.elements()}
    return sorted(out)


def sumset(elements) -> set[int]:
    """Exact A+A by pairwise XOR (vectorized)."""
    members = np.asarray(sorted(set(elements)), dtype=np.int64)
    if members.size == 0:
        raise EmptySupportError("sumset of an empty set")
    pairs = members[:, None] ^ members[None, :]
    return set(int(x) for x in np.unique(pairs))


def sumset_naive(elements) -> set[int]:
    """Double-loop oracle for sumset."""
    members = sorted(set(elements))
    if not members:
        raise EmptySupportError("sumset of an empty set")
    return {a ^ b for a in members for b in members}


@dataclass(frozen=True)
class DoublingStats:
    size: int
    sumset_size: int
    eta: float

    def to_json(self) -> dict:
        return {"size": self.size, "sumset_size": self.sumset_size, "eta": self.eta}


def doubling_stats(elements) -> DoublingStats:
    """(|A|, |A+A|, eta) with |A+A| = |A|^(2-eta); eta := 0 when |A| = 1."""
    members = sorted(set(elements))
    if not members:
        raise EmptySupportError("doubling stats of an empty set")
    size = len(members)
    ss = len(sumset(members))
    if size == 1:
        eta = 0.0
    else:
        eta = 2.0 - math.log2(ss) / math.log2(size)
    return DoublingStats(size=size, sumset_size=ss, eta=eta)
