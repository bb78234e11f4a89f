"""Exact arithmetic in R = Q^k with the componentwise partial order.

Elements are immutable tuples of ``gmpy2.mpq``; every operation returns a
fresh element in lowest terms.  Two elements may be incomparable; ``leq``
simply answers False in that case.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import ConfigurationError, DescriptorMismatch, InputError, NotInvertible

DEFAULT_MAX_K = 8
ZERO = mpq(0)
ONE = mpq(1)


def max_k() -> int:
    raw = os.environ.get("ORDMAT_MAX_K")
    if raw is None:
        return DEFAULT_MAX_K
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"ORDMAT_MAX_K must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigurationError("ORDMAT_MAX_K must be positive")
    return value


def to_mpq(value) -> mpq:
    """Coerce int, str ("3", "-1/2"), Fraction or mpq to mpq."""
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, (int, type(ZERO))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            num, _, den = text.partition("/")
            if den:
                if int(den) == 0:
                    raise InputError(f"zero denominator in {value!r}")
                return mpq(int(num), int(den))
            return mpq(int(num))
        except ValueError as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational: {value!r}")


@dataclass(frozen=True)
class RingDescriptor:
    k: int
    kind: str = "product_rationals"

    def __post_init__(self):
        if self.kind != "product_rationals":
            raise ConfigurationError(f"unsupported ring kind {self.kind!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigurationError(f"k must be a positive integer, got {self.k!r}")

    @property
    def zero(self) -> "RingElem":
        return RingElem((ZERO,) * self.k)

    @property
    def one(self) -> "RingElem":
        return RingElem((ONE,) * self.k)

    def scalar(self, value) -> "RingElem":
        """Embed a rational diagonally, i.e. the same value in every factor."""
        q = to_mpq(value)
        return RingElem((q,) * self.k)

    def elem(self, values) -> "RingElem":
        if isinstance(values, (list, tuple)):
            if len(values) != self.k:
                raise DescriptorMismatch(f"expected {self.k} components, got {len(values)}")
            return RingElem(tuple(to_mpq(v) for v in values))
        return self.scalar(values)

    def atoms(self) -> list["RingElem"]:
        """The primitive idempotents (weight-one 0/1 vectors)."""
        return [RingElem(tuple(ONE if j == i else ZERO for j in range(self.k))) for i in range(self.k)]

    def name(self) -> str:
        return "q" if self.k == 1 else f"q{self.k}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "k": self.k}


def parse_ring(spec) -> RingDescriptor:
    """Accept ``"q"``, ``"q2"``, ``{"kind":..., "k":...}`` or ``{"ring": {...}}``."""
    if isinstance(spec, RingDescriptor):
        return spec
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text in ("q", "q1"):
            return RingDescriptor(1)
        if text.startswith("q") and text[1:].isdigit():
            return RingDescriptor(int(text[1:]))
        raise InputError(f"unknown ring shorthand {spec!r}")
    if isinstance(spec, dict):
        if "ring" in spec:
            return parse_ring(spec["ring"])
        try:
            return RingDescriptor(int(spec["k"]), spec.get("kind", "product_rationals"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad ring descriptor {spec!r}") from exc
    raise InputError(f"bad ring descriptor {spec!r}")


@dataclass(frozen=True)
class RingElem:
    comps: tuple

    @property
    def k(self) -> int:
        return len(self.comps)

    @property
    def ring(self) -> RingDescriptor:
        return RingDescriptor(len(self.comps))

    def _check(self, other: "RingElem"):
        if len(other.comps) != len(self.comps):
            raise DescriptorMismatch(f"ring mismatch: k={self.k} vs k={other.k}")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(tuple(a * b for a, b in zip(self.comps, other.comps)))

    def __neg__(self) -> "RingElem":
        return RingElem(tuple(-a for a in self.comps))

    def __pow__(self, e: int) -> "RingElem":
        if e < 0:
            return self.inv() ** (-e)
        return RingElem(tuple(a ** e for a in self.comps))

    def __le__(self, other: "RingElem") -> bool:
        return leq(self, other)

    def __ge__(self, other: "RingElem") -> bool:
        return leq(other, self)

    def inv(self) -> "RingElem":
        return inv(self)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.comps)

    def is_one(self) -> bool:
        return all(a == 1 for a in self.comps)

    def is_nonneg(self) -> bool:
        return all(a >= 0 for a in self.comps)

    def is_unit(self) -> bool:
        return all(a != 0 for a in self.comps)

    def is_idempotent(self) -> bool:
        return all(a * a == a for a in self.comps)

    def is_comparable_to_zero(self) -> bool:
        return self.is_nonneg() or all(a <= 0 for a in self.comps)

    def abs(self) -> "RingElem":
        return RingElem(tuple(abs(a) for a in self.comps))

    def support(self) -> "RingElem":
        """Idempotent that is 1 exactly where this element is nonzero."""
        return RingElem(tuple(ONE if a != 0 else ZERO for a in self.comps))

    def __repr__(self) -> str:
        if self.k == 1:
            return f"RingElem({self.comps[0]})"
        return "RingElem(" + ", ".join(str(a) for a in self.comps) + ")"

    def to_json(self):
        if self.k == 1:
            return str(self.comps[0])
        return [str(a) for a in self.comps]


def parse_elem(data, k: int | None = None) -> RingElem:
    """Decode the wire form: a string/int for k=1, or a list of strings."""
    if isinstance(data, (list, tuple)):
        if k is not None and len(data) != k:
            raise DescriptorMismatch(f"expected {k} components, got {len(data)}")
        if not data:
            raise InputError("empty ring element")
        return RingElem(tuple(to_mpq(v) for v in data))
    q = to_mpq(data)
    return RingElem((q,) * (k or 1))


def arith(op: str, a: RingElem, b: RingElem) -> RingElem:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        a._check(b)
        return -a
    raise ValueError(f"unknown op {op!r}")


def inv(a: RingElem) -> RingElem:
    if not a.is_unit():
        raise NotInvertible(f"{a!r} has a zero component", witness=a.to_json())
    return RingElem(tuple(ONE / x for x in a.comps))


def leq(a: RingElem, b: RingElem) -> bool:
    a._check(b)
    return all(x <= y for x, y in zip(a.comps, b.comps))


def is_nonneg(a: RingElem) -> bool:
    return a.is_nonneg()


def _bounded(ring: RingDescriptor) -> None:
    bound = max_k()
    if ring.k > bound:
        raise ConfigurationError(f"k={ring.k} exceeds enumeration bound {bound} (ORDMAT_MAX_K)")


def idempotents(ring: RingDescriptor) -> list[RingElem]:
    _bounded(ring)
    return [RingElem(tuple(mpq(b) for b in bits)) for bits in itertools.product((0, 1), repeat=ring.k)]


@dataclass(frozen=True)
class RingAutomorphism:
    """Coordinate permutation of Q^k: ``c(x)[i] = x[perm[i]]`` (0-based)."""

    perm: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ConfigurationError(f"not a permutation: {self.perm!r}")

    @property
    def k(self) -> int:
        return len(self.perm)

    def __call__(self, x: RingElem) -> RingElem:
        if x.k != self.k:
            raise DescriptorMismatch(f"ring map on k={self.k} applied to k={x.k}")
        return RingElem(tuple(x.comps[p] for p in self.perm))

    def apply_comps(self, comps: Sequence):
        """Permute any per-component sequence the same way."""
        return tuple(comps[p] for p in self.perm)

    def inverse(self) -> "RingAutomorphism":
        out = [0] * self.k
        for i, p in enumerate(self.perm):
            out[p] = i
        return RingAutomorphism(tuple(out))

    def compose(self, other: "RingAutomorphism") -> "RingAutomorphism":
        """``self ∘ other``."""
        # (self∘other)(x)[i] = other(x)[perm[i]] = x[other.perm[perm[i]]]
        return RingAutomorphism(tuple(other.perm[p] for p in self.perm))

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    @property
    def name(self) -> str:
        if self.is_identity():
            return "identity"
        if self.perm == (1, 0):
            return "swap"
        return "perm"

    def to_json(self):
        if self.name in ("identity", "swap"):
            return self.name
        return [p + 1 for p in self.perm]

    @classmethod
    def identity(cls, k: int) -> "RingAutomorphism":
        return cls(tuple(range(k)))


def parse_ring_map(data, k: int) -> RingAutomorphism:
    if data == "identity":
        return RingAutomorphism.identity(k)
    if data == "swap":
        if k != 2:
            raise InputError("'swap' ring map needs k = 2")
        return RingAutomorphism((1, 0))
    if isinstance(data, list):
        try:
            return RingAutomorphism(tuple(int(p) - 1 for p in data))
        except (TypeError, ValueError, ConfigurationError) as exc:
            raise InputError(f"bad ring map {data!r}") from exc
    raise InputError(f"bad ring map {data!r}")


def ring_automorphisms(ring: RingDescriptor) -> list[RingAutomorphism]:
    """All order-preserving automorphisms of Q^k, identity first."""
    _bounded(ring)
    return [RingAutomorphism(p) for p in itertools.permutations(range(ring.k))]


def random_rational(rng: random.Random, lo: int = -6, hi: int = 6, max_den: int = 6) -> mpq:
    return mpq(rng.randint(lo, hi), rng.randint(1, max_den))


def random_elem(ring: RingDescriptor, rng: random.Random, nonneg: bool = False, unit: bool = False,
                zero_prob: float = 0.0) -> RingElem:
    comps = []
    for _ in range(ring.k):
        if zero_prob and not unit and rng.random() < zero_prob:
            comps.append(ZERO)
            continue
        lo = 1 if (nonneg and unit) else (0 if nonneg else -6)
        q = random_rational(rng, lo, 6)
        while unit and q == 0:
            q = random_rational(rng, lo, 6)
        comps.append(q)
    return RingElem(tuple(comps))


@dataclass
class AxiomReport:
    ring: RingDescriptor
    samples: int
    passed: bool = True
    checks: dict = field(default_factory=dict)
    counterexample: dict | None = None

    def fail(self, law: str, **witness) -> None:
        if self.passed:
            self.passed = False
            self.counterexample = {"law": law, **{k: v.to_json() if isinstance(v, RingElem) else v
                                                 for k, v in witness.items()}}

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "samples": self.samples, "passed": self.passed,
                "checks": self.checks, "counterexample": self.counterexample}


def check_order_axioms(ring: RingDescriptor, samples: int = 1000, seed: int = 0) -> AxiomReport:
    """Sample the ordered-ring laws; failures are reported, never raised."""
    rng = random.Random(seed)
    report = AxiomReport(ring, samples)
    counts = dict.fromkeys(
        ["translation", "product_nonneg", "zero_sum_free", "antisymmetry", "transitivity",
         "inverse_naturals_nonneg"], 0)
    zero = ring.zero
    for _ in range(samples):
        x = random_elem(ring, rng)
        z = random_elem(ring, rng)
        d = random_elem(ring, rng, nonneg=True, zero_prob=0.3)
        # half of the time force comparability so the implication is exercised
        y = x + d if rng.random() < 0.5 else random_elem(ring, rng)
        if leq(x, y):
            counts["translation"] += 1
            if not leq(x + z, y + z):
                report.fail("translation", x=x, y=y, z=z)
            w = y + random_elem(ring, rng, nonneg=True, zero_prob=0.3)
            counts["transitivity"] += 1
            if not leq(x, w):
                report.fail("transitivity", x=x, y=y, z=w)
            if leq(y, x):
                counts["antisymmetry"] += 1
                if x != y:
                    report.fail("antisymmetry", x=x, y=y)
        a = random_elem(ring, rng, nonneg=True, zero_prob=0.3)
        b = random_elem(ring, rng, nonneg=True, zero_prob=0.3)
        counts["product_nonneg"] += 1
        if not leq(zero, a * b):
            report.fail("product_nonneg", x=a, y=b)
        counts["zero_sum_free"] += 1
        if (a + b).is_zero() and not (a.is_zero() and b.is_zero()):
            report.fail("zero_sum_free", x=a, y=b)
        m = rng.randint(1, 10_000)
        counts["inverse_naturals_nonneg"] += 1
        if not leq(zero, ring.scalar(m).inv()):
            report.fail("inverse_naturals_nonneg", m=m)
    # the degenerate zero-sum instance is always included
    counts["zero_sum_free"] += 1
    if not (zero + zero).is_zero():
        report.fail("zero_sum_free", x=zero, y=zero)
    report.checks = counts
    return report


def sum_elems(elems: Iterable[RingElem], ring: RingDescriptor) -> RingElem:
    total = ring.zero
    for e in elems:
        total = total + e
    return total
