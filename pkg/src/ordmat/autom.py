"""Automorphisms of G_n(R) built from inner, ring-map and homothety factors.

A factor list ``[F1, F2, F3]`` denotes the composite ``F1 ∘ F2 ∘ F3``, so
``F3`` acts first, matching the way the standard form ``Φ_M Φ^c Ω`` is
written.  Consumers only ever see :class:`Automorphism`, an oracle with an
``apply`` method.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence


from .errors import ConstructionError, DomainError, InputError, OrdmatError
from .matgroup import GenWord, Mat, eval_word, is_member, parse_matrix
from .ring import ONE, RingAutomorphism, RingDescriptor, RingElem, parse_elem, parse_ring_map


@dataclass(frozen=True)
class HomothetySpec:
    """λ(A) = |det A|^t · α^[det A < 0 and sign], read per ring component."""

    t: tuple
    sign: tuple
    alpha: RingElem | None = None

    def sign_involution(self) -> RingElem:
        return self.alpha if self.alpha is not None else RingElem((ONE,) * len(self.t))

    def lam(self, a: Mat) -> RingElem:
        d = a.det()
        alpha = self.sign_involution()
        out = []
        for dc, tc, sc, ac in zip(d.comps, self.t, self.sign, alpha.comps):
            if dc == 0:
                raise DomainError("determinant is not invertible")
            value = abs(dc) ** tc
            if sc and dc < 0:
                value *= ac
            out.append(value)
        return RingElem(tuple(out))

    def __call__(self, a: Mat) -> Mat:
        return a.scale(self.lam(a))

    def is_trivial(self) -> bool:
        return all(t == 0 for t in self.t) and (
            not any(self.sign) or self.sign_involution().is_one())

    def is_bijective(self, n: int) -> bool:
        # |det Ω(A)| = |det A|^(1 + n t) per component
        return all(1 + n * t in (1, -1) for t in self.t)

    @classmethod
    def trivial(cls, k: int) -> "HomothetySpec":
        return cls((0,) * k, (0,) * k)

    @classmethod
    def abs_det(cls, k: int, power: int = 1) -> "HomothetySpec":
        return cls((power,) * k, (0,) * k)

    def to_json(self) -> dict:
        out = {"t": list(self.t), "sign": list(self.sign)}
        if self.alpha is not None and not self.alpha.is_one():
            out["alpha"] = self.alpha.to_json()
        return out


def parse_homothety(data, k: int) -> HomothetySpec:
    try:
        t = tuple(int(x) for x in data["t"])
        sign = tuple(int(x) for x in data.get("sign", [0] * len(t)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad homothety spec {data!r}") from exc
    alpha = parse_elem(data["alpha"], k) if "alpha" in data else None
    return HomothetySpec(t, sign, alpha)


@dataclass(frozen=True)
class Inner:
    m: Mat
    m_inv: Mat = field(default=None, compare=False)

    def __post_init__(self):
        if self.m_inv is None:
            object.__setattr__(self, "m_inv", self.m.inverse())

    def __call__(self, x: Mat) -> Mat:
        return self.m @ x @ self.m_inv

    def to_json(self):
        return {"inner": self.m.to_json()}


@dataclass(frozen=True)
class RingMap:
    c: RingAutomorphism

    def __call__(self, x: Mat) -> Mat:
        return x.apply_ring_map(self.c)

    def to_json(self):
        return {"ring_map": self.c.to_json()}


@dataclass(frozen=True)
class Homothety:
    h: HomothetySpec

    def __call__(self, x: Mat) -> Mat:
        return self.h(x)

    def to_json(self):
        return {"homothety": self.h.to_json()}


@dataclass(frozen=True)
class AutomorphismSpec:
    ring: RingDescriptor
    n: int
    factors: tuple = ()

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "n": self.n,
                "factors": [f.to_json() for f in self.factors]}


def parse_automorphism_spec(data, ring: RingDescriptor | None = None, n: int | None = None) -> AutomorphismSpec:
    if not isinstance(data, dict) or "factors" not in data:
        raise InputError("automorphism JSON must be an object with 'factors'")
    if ring is None:
        ring = RingDescriptor(int(data["ring"]["k"])) if "ring" in data else RingDescriptor(1)
    factors = []
    for item in data["factors"]:
        if not isinstance(item, dict) or len(item) != 1:
            raise InputError(f"bad factor {item!r}")
        (tag, body), = item.items()
        if tag == "inner":
            factors.append(Inner(parse_matrix(body, ring.k)))
        elif tag == "ring_map":
            factors.append(RingMap(parse_ring_map(body, ring.k)))
        elif tag == "homothety":
            factors.append(Homothety(parse_homothety(body, ring.k)))
        else:
            raise InputError(f"unknown factor kind {tag!r}")
    if n is None:
        n = data.get("n")
        if n is None:
            n = next((f.m.n for f in factors if isinstance(f, Inner)), None)
        if n is None:
            raise InputError("dimension n is not given and cannot be inferred")
    return AutomorphismSpec(ring, int(n), tuple(factors))


class Automorphism:
    """Oracle view ``apply: Mat -> Mat`` of a (claimed) automorphism of G_n(R)."""

    def __init__(self, fn: Callable[[Mat], Mat], n: int, ring: RingDescriptor,
                 spec: AutomorphismSpec | None = None, name: str = "phi", check_domain: bool = True):
        self._fn = fn
        self.n = n
        self.ring = ring
        self.spec = spec
        self.name = name
        self.check_domain = check_domain
        self._cache: dict[Mat, Mat] = {}

    @classmethod
    def from_callable(cls, fn: Callable[[Mat], Mat], n: int, ring: RingDescriptor,
                      name: str = "oracle") -> "Automorphism":
        return cls(fn, n, ring, name=name)

    def apply(self, a: Mat) -> Mat:
        hit = self._cache.get(a)
        if hit is not None:
            return hit
        if a.n != self.n or a.k != self.ring.k:
            raise DomainError(f"expected a {self.n}x{self.n} matrix over k={self.ring.k}")
        if self.check_domain and not is_member(a, "Gn"):
            raise DomainError("argument is not in G_n(R)", witness=a.to_json())
        out = self._fn(a)
        self._cache[a] = out
        return out

    __call__ = apply

    def then(self, outer: Callable[[Mat], Mat], name: str = "") -> "Automorphism":
        """``outer ∘ self`` as a new oracle; ``outer`` is a plain matrix map."""
        return Automorphism(lambda a: outer(self.apply(a)), self.n, self.ring,
                            name=name or f"({self.name})'", check_domain=False)


def _compose(factors: Sequence) -> Callable[[Mat], Mat]:
    def fn(a: Mat) -> Mat:
        for f in reversed(factors):
            a = f(a)
        return a
    return fn


def make_automorphism(spec: AutomorphismSpec) -> Automorphism:
    for idx, f in enumerate(spec.factors):
        if isinstance(f, Inner):
            if f.m.n != spec.n or f.m.k != spec.ring.k:
                raise ConstructionError(f"factor {idx + 1}: inner matrix has the wrong shape")
            if not is_member(f.m, "Gamma_n"):
                raise ConstructionError(f"factor {idx + 1}: inner matrix is not in Gamma_n",
                                        witness=f.m.to_json())
        elif isinstance(f, RingMap):
            if f.c.k != spec.ring.k:
                raise ConstructionError(f"factor {idx + 1}: ring map acts on k={f.c.k}")
        elif isinstance(f, Homothety):
            h = f.h
            if len(h.t) != spec.ring.k or len(h.sign) != spec.ring.k:
                raise ConstructionError(f"factor {idx + 1}: homothety needs {spec.ring.k} exponents")
            if any(s not in (0, 1) for s in h.sign):
                raise ConstructionError(f"factor {idx + 1}: sign flags must be 0 or 1")
            a = h.sign_involution()
            if a.k != spec.ring.k or not (a.is_nonneg() and a * a == spec.ring.one):
                raise ConstructionError(f"factor {idx + 1}: sign factor is not a nonnegative involution",
                                        witness=a.to_json())
        else:
            raise ConstructionError(f"factor {idx + 1}: unknown factor {f!r}")
    return Automorphism(_compose(spec.factors), spec.n, spec.ring, spec=spec, name="phi")


def apply(phi: Automorphism, a: Mat) -> Mat:
    return phi.apply(a)


@dataclass
class CheckReport:
    passed: bool = True
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def count(self, name: str) -> None:
        self.checks[name] = self.checks.get(name, 0) + 1

    def fail(self, law: str, **witness) -> None:
        self.passed = False
        self.failures.append({"law": law, **witness})

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "failures": self.failures,
                "warnings": self.warnings}


def sample_check_automorphism(phi: Automorphism, words: Sequence[GenWord], seed: int = 0) -> CheckReport:
    """Spot-check multiplicativity and preservation of G_n, Gamma_n, D_n."""
    rng = random.Random(seed)
    report = CheckReport()
    if phi.spec is not None:
        for f in phi.spec.factors:
            if isinstance(f, Homothety) and not f.h.is_bijective(phi.n):
                report.warnings.append(
                    f"homothety {f.h.to_json()} is an injective endomorphism, not surjective on G_{phi.n}")
    mats = [eval_word(w) for w in words]
    for idx, x in enumerate(mats):
        y = mats[rng.randrange(len(mats))]
        try:
            fx, fy, fxy = phi.apply(x), phi.apply(y), phi.apply(x @ y)
        except OrdmatError as exc:
            report.fail("evaluation", word=words[idx].to_json(), error=str(exc))
            continue
        report.count("multiplicative")
        if fxy != fx @ fy:
            report.fail("multiplicative", word=words[idx].to_json())
        report.count("Gn")
        if not is_member(fx, "Gn"):
            report.fail("Gn", word=words[idx].to_json(), image=fx.to_json(),
                        negative_entry=fx.first_nonzero_negative())
            continue
        for cls in ("Gamma_n", "Dn"):
            report.count(cls)
            if is_member(x, cls) != is_member(fx, cls):
                report.fail(cls, word=words[idx].to_json(), image=fx.to_json())
        report.count("commutation")
        if (x @ y == y @ x) != (fx @ fy == fy @ fx):
            report.fail("commutation", word=words[idx].to_json())
    return report


def identity_automorphism(n: int, ring: RingDescriptor) -> Automorphism:
    return make_automorphism(AutomorphismSpec(ring, n, ()))


def scalar_ratio(a: Mat, b: Mat) -> RingElem | None:
    """r with a = r·b if it exists (b invertible), else None."""
    q = a @ b.inverse()
    if not q.is_scalar():
        return None
    return q[0, 0]


__all__ = ["HomothetySpec", "Inner", "RingMap", "Homothety", "AutomorphismSpec", "Automorphism",
           "make_automorphism", "apply", "sample_check_automorphism", "CheckReport",
           "parse_automorphism_spec", "parse_homothety", "identity_automorphism", "scalar_ratio"]
