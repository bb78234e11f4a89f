"""Seeded random elements of Gamma_n, involutions and automorphism specs."""

from __future__ import annotations

import random
from typing import Sequence

from gmpy2 import mpq

from .autom import AutomorphismSpec, Homothety, HomothetySpec, Inner, RingMap
from .errors import InputError
from .matgroup import Mat, Perm, peirce_sum, perm_matrix
from .ring import RingAutomorphism, RingDescriptor

FACTOR_KINDS = ("inner", "ring_map", "homothety")


def _unit(rng: random.Random) -> mpq:
    return mpq(rng.randint(1, 7), rng.randint(1, 5))


def _monomial(n: int, ring: RingDescriptor, rng: random.Random) -> Mat:
    images = list(range(n))
    rng.shuffle(images)
    rows = [[ring.zero] * n for _ in range(n)]
    for j, i in enumerate(images):
        rows[i][j] = ring.scalar(_unit(rng))
    return Mat.from_rows(rows)


def _paired(n: int, ring: RingDescriptor, pairs: int) -> Mat:
    """S_τ for τ = (1,2)(3,4)... with ``pairs`` transpositions."""
    images = list(range(1, n + 1))
    for r in range(pairs):
        images[2 * r], images[2 * r + 1] = images[2 * r + 1], images[2 * r]
    return perm_matrix(Perm(tuple(images)), ring)


def gamma_element(n: int, ring: RingDescriptor, rng: random.Random) -> Mat:
    """Σ e_c·P_c over the atoms e_c, each P_c a random positive monomial matrix."""
    return peirce_sum([(e, _monomial(n, ring, rng)) for e in ring.atoms()])


def involution(n: int, ring: RingDescriptor, rng: random.Random, pairs: int | None = None) -> Mat:
    """G·(b·S_τ)·G⁻¹ with G from :func:`gamma_element` and b = 1.

    With ``pairs=None`` each atom draws its own number of 2-cycles, so over a
    product ring the idempotent system genuinely splits.
    """
    counts = [rng.randint(0, n // 2) if pairs is None else pairs for _ in range(ring.k)]
    target = peirce_sum([(e, _paired(n, ring, m)) for e, m in zip(ring.atoms(), counts)])
    g = gamma_element(n, ring, rng)
    return g @ target @ g.inverse()


def ring_map(ring: RingDescriptor, rng: random.Random) -> RingAutomorphism:
    return RingAutomorphism(tuple(rng.sample(range(ring.k), ring.k)))


def homothety(ring: RingDescriptor, rng: random.Random, max_power: int = 2) -> HomothetySpec:
    return HomothetySpec(tuple(rng.randint(-max_power, max_power) for _ in range(ring.k)), (0,) * ring.k)


def automorphism(n: int, ring: RingDescriptor, rng: random.Random,
                 factors: Sequence[str] = FACTOR_KINDS) -> AutomorphismSpec:
    """Composite of the requested factor kinds, in the order given."""
    out = []
    for kind in factors:
        if kind == "inner":
            out.append(Inner(gamma_element(n, ring, rng)))
        elif kind == "ring_map":
            out.append(RingMap(ring_map(ring, rng)))
        elif kind == "homothety":
            out.append(Homothety(homothety(ring, rng)))
        else:
            raise InputError(f"unknown factor kind {kind!r}; expected one of {', '.join(FACTOR_KINDS)}")
    return AutomorphismSpec(ring, n, tuple(out))
