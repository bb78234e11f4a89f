"""Recover ``Φ = Φ_M ∘ Φ^c ∘ Ω`` from an automorphism oracle of G_n(R).

The pipeline runs in three stages, each working only through ``phi.apply``:

1. find M1 in Gamma_n with ``M1 Φ(S_σ) M1⁻¹ = S_σ`` for every permutation;
2. read the ring automorphism c off the images of the transvections B_12(x);
3. strip c and read the scalar character of the remaining homothety.

Stage 1 has two independent routes (ring-level idempotent arithmetic and a
per-component cycle reconstruction) whose answers must coincide.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .autom import (Automorphism, AutomorphismSpec, Homothety, HomothetySpec, Inner, RingMap,
                    _compose, parse_homothety)
from .errors import (DecompositionMismatch, InputError, NotAnAutomorphism, OrdmatError,
                     PipelineOrderError, PreconditionError, UnsupportedHomothety,
                     UnsupportedRingAutomorphism)
from .involution import involution_to_scaled_perm, require_involution
from .matgroup import (DiagLetter, ElemLetter, GenWord, Mat, Perm, PermLetter, block_decomposition,
                       eval_word, is_member, normalize_central, parse_matrix, perm_matrix,
                       random_word, standard_substitution, transvection)
from .ring import (RingAutomorphism, RingDescriptor, RingElem, parse_elem, parse_ring_map,
                   ring_automorphisms, sum_elems)


def _perm(n: int, *cycles) -> Perm:
    return Perm.from_cycles(n, *cycles)


def _s(n: int, ring: RingDescriptor, *cycles) -> Mat:
    return perm_matrix(_perm(n, *cycles), ring)


def _image(phi, x: Mat, label: str) -> Mat:
    """``phi(x)``, insisting that the image lies in G_n."""
    try:
        y = phi(x)
    except OrdmatError as exc:
        raise NotAnAutomorphism(f"oracle failed on {label}: {exc}", witness={"input": label}) from exc
    if not is_member(y, "Gn"):
        raise NotAnAutomorphism(f"image of {label} is not in G_n",
                                witness={"input": label, "image": y.to_json(),
                                         "negative_entry": y.first_nonzero_negative()})
    return y


def _conj(m: Mat, x: Mat, m_inv: Mat | None = None) -> Mat:
    return m @ x @ (m_inv if m_inv is not None else m.inverse())


def _as_involution(a: Mat, label: str) -> None:
    try:
        require_involution(a)
    except OrdmatError as exc:
        raise NotAnAutomorphism(f"image of {label} is not an involution of Gamma_n",
                                witness={"input": label, "image": a.to_json()}) from exc


def _scaled_perm_step(a: Mat, tau: Perm, label: str) -> tuple[Mat, RingElem]:
    _as_involution(a, label)
    try:
        return involution_to_scaled_perm(a, tau)
    except OrdmatError as exc:
        raise NotAnAutomorphism(f"image of {label} is not conjugate to a multiple of {tau.format_cycles()}",
                                witness={"input": label, "image": a.to_json()}) from exc


def _straightened(a: Mat, target: Mat, label: str) -> None:
    if a != target:
        raise NotAnAutomorphism(f"could not straighten the image of {label}",
                                witness={"input": label, "image": a.to_json()})


def _adjacent_chain(phi, m: Mat, alpha: RingElem, start: int) -> Mat:
    """Extend a normalizer fixing S_(1,2)..S_(start-1,start) to all adjacent transpositions."""
    n, ring = m.n, m.ring
    for p in range(start, n):
        label = f"S_({p},{p + 1})"
        a = _conj(m, _image(phi, _s(n, ring, (p, p + 1)), label))
        _as_involution(a, label)
        if p == 2:
            # components where the image moves 1 instead of 2
            e = a[0, 0] * a[0, 0]
            if not e.is_idempotent():
                raise NotAnAutomorphism("diagonal entry is not an idempotent",
                                        witness={"input": label, "value": a[0, 0].to_json()})
            c = Mat.scalar(n, e) + _s(n, ring, (1, 2)).scale(ring.one - e)
            a, m = _conj(c, a, c), c @ m
        piv = p - 1
        es = [a[piv, j] * a[j, piv] * alpha.inv() * alpha.inv() for j in range(p, n)]
        if not (all(e.is_idempotent() for e in es) and sum_elems(es, ring) == ring.one):
            raise NotAnAutomorphism(f"image of {label} does not pair {p} with a later index",
                                    witness={"input": label, "image": a.to_json()})
        b = sum((_s(n, ring, (p + 1, j + 1)).scale(e) for j, e in zip(range(p, n), es) if not e.is_zero()),
                Mat.zeros(n, ring))
        a, m = _conj(b, a, b), b @ m
        scales = [ring.one] * n
        scales[p] = a[piv, p] * alpha.inv()
        d = Mat.diag(scales)
        a, m = _conj(d, a), d @ m
        _straightened(a, _s(n, ring, (p, p + 1)).scale(alpha), label)
    return m


def _three_route(phi, ring: RingDescriptor) -> tuple[Mat, RingElem]:
    """n = 3: S_(12) first, then S_(23) through the idempotents a23·a32 and a13·a31."""
    n = 3
    m, alpha = _scaled_perm_step(_image(phi, _s(n, ring, (1, 2)), "S_(12)"), _perm(n, (1, 2)), "S_(12)")
    a = _conj(m, _image(phi, _s(n, ring, (2, 3)), "S_(23)"))
    _as_involution(a, "S_(23)")
    sq = alpha.inv() * alpha.inv()
    e1, e2 = a[1, 2] * a[2, 1] * sq, a[0, 2] * a[2, 0] * sq
    if not (e1.is_idempotent() and e2.is_idempotent() and e1 + e2 == ring.one):
        raise NotAnAutomorphism("image of S_(23) does not pair 3 with 1 or 2",
                                witness={"input": "S_(23)", "image": a.to_json()})
    c = Mat.scalar(n, e1) + _s(n, ring, (1, 2)).scale(e2)
    c2 = Mat.diag([ring.one, ring.one, (a[0, 2] + a[1, 2]) * alpha.inv()])
    m = c2 @ c @ m
    _straightened(_conj(m, phi(_s(n, ring, (2, 3)))), _s(n, ring, (2, 3)).scale(alpha), "S_(23)")
    return m, alpha


def _klein_route(phi, ring: RingDescriptor) -> tuple[Mat, RingElem]:
    """n = 4: fix the Klein four-group, then a 4-cycle, then S_(12)."""
    n = 4
    m, _ = _scaled_perm_step(_image(phi, _s(n, ring, (1, 2), (3, 4)), "S_(12)(34)"),
                             _perm(n, (1, 2), (3, 4)), "S_(12)(34)")

    x = _conj(m, _image(phi, _s(n, ring, (1, 3), (2, 4)), "S_(13)(24)"))
    _as_involution(x, "S_(13)(24)")
    if any(not x[i, j].is_zero() for i in range(2) for j in range(2)) or any(
            not x[i, j].is_zero() for i in range(2, 4) for j in range(2, 4)):
        raise NotAnAutomorphism("image of S_(13)(24) has nonzero diagonal blocks",
                                witness={"image": x.to_json()})
    lower = [[x[i, j] for j in range(2)] for i in range(2, 4)]
    block = Mat.from_rows([lower[0] + [ring.zero] * 2, lower[1] + [ring.zero] * 2,
                           [ring.zero] * 2 + [ring.one, ring.zero],
                           [ring.zero] * 3 + [ring.one]])
    m = block @ m

    # rows of S_(4321): ones at (1,2), (2,3), (3,4), (4,1); odd, so it picks up alpha
    cycle = perm_matrix(Perm((4, 1, 2, 3)), ring)
    y = _conj(m, _image(phi, cycle, "S_(4321)"))
    alpha = y[0, 1] + y[0, 3]
    if not (alpha.is_nonneg() and alpha * alpha == ring.one):
        raise NotAnAutomorphism("image of S_(4321) carries no involutive scalar",
                                witness={"image": y.to_json()})
    z1, z2 = y[0, 1] * alpha.inv(), y[0, 3] * alpha.inv()
    flip = _s(n, ring, (1, 4), (2, 3)).scale(z2 * z2) + Mat.scalar(n, z1 * z1)
    m = flip @ m

    a = _conj(m, _image(phi, _s(n, ring, (1, 2)), "S_(12)"))
    a1, a2 = a[0, 0] * alpha.inv(), a[0, 1] * alpha.inv()
    m = (_s(n, ring, (1, 3), (2, 4)).scale(a1 * a1) + Mat.scalar(n, a2 * a2)) @ m
    return m, alpha


def normalizer_generic(phi: Automorphism) -> tuple[Mat, RingElem]:
    """M1 in Gamma_n and α with ``M1 Φ(S_σ) M1⁻¹ = α^sgn(σ) S_σ``, by ring arithmetic."""
    n, ring = phi.n, phi.ring
    if n == 3:
        m, alpha = _three_route(phi, ring)
    elif n == 4:
        m, alpha = _klein_route(phi, ring)
    else:
        m, alpha = _scaled_perm_step(_image(phi, _s(n, ring, (1, 2)), "S_(12)"),
                                     _perm(n, (1, 2)), "S_(12)")
        m = _adjacent_chain(phi, m, alpha, 2)
    return normalize_central(m), alpha


def normalizer_fast(phi: Automorphism) -> tuple[Mat, RingElem]:
    """Same normalizer, rebuilt per Q-factor from the transpositions' supports."""
    n, ring = phi.n, phi.ring
    images = [_image(phi, _s(n, ring, (p, p + 1)), f"S_({p},{p + 1})") for p in range(1, n)]
    comps, alphas = [], []
    for c in range(ring.k):
        moved = []
        for p, img in enumerate(images, start=1):
            comp = img.comps[c]
            pts = [i for i in range(n) if comp[i][i] == 0]
            if len(pts) != 2 or not img.is_monomial():
                raise NotAnAutomorphism(f"image of S_({p},{p + 1}) is not a scaled transposition",
                                        witness={"component": c + 1, "image": img.to_json()})
            moved.append(pts)
        fixed = next(i for i in range(n) if i not in moved[0])
        alpha = images[0].comps[c][fixed][fixed]
        first = set(moved[0]) - set(moved[1])
        if len(first) != 1:
            raise NotAnAutomorphism("images of S_(12) and S_(23) do not share exactly one point",
                                    witness={"component": c + 1})
        f = [first.pop()]
        for pts in moved:
            if f[-1] not in pts:
                raise NotAnAutomorphism("adjacent transposition images do not form a chain",
                                        witness={"component": c + 1})
            f.append(pts[0] if pts[1] == f[-1] else pts[1])
        if len(set(f)) != n:
            raise NotAnAutomorphism("transposition images do not define a permutation",
                                    witness={"component": c + 1})
        d = {f[0]: mpq(1)}
        for p in range(n - 1):
            d[f[p + 1]] = d[f[p]] * alpha / images[p].comps[c][f[p]][f[p + 1]]
        rows = [[mpq(0)] * n for _ in range(n)]
        for j in range(n):
            rows[j][f[j]] = 1 / d[f[j]]
        comps.append(tuple(tuple(r) for r in rows))
        alphas.append(alpha)
    return normalize_central(Mat(n, tuple(comps))), RingElem(tuple(alphas))


def normalize_permutation_images(phi: Automorphism) -> tuple[Mat, RingElem]:
    """Stage 1: both routes, cross-checked, and the result verified on every S_(p,p+1)."""
    n, ring = phi.n, phi.ring
    generic, alpha = normalizer_generic(phi)
    fast, alpha_fast = normalizer_fast(phi)
    if generic != fast or alpha != alpha_fast:
        raise NotAnAutomorphism("the two normalizer routes disagree",
                                witness={"generic": generic.to_json(), "fast": fast.to_json()})
    if not (alpha.is_nonneg() and alpha * alpha == ring.one):
        raise NotAnAutomorphism("sign scalar is not a nonnegative involution", witness=alpha.to_json())
    if not is_member(generic, "Gamma_n"):
        raise NotAnAutomorphism("normalizer left Gamma_n", witness=generic.to_json())
    inv = generic.inverse()
    for p in range(1, n):
        s = _s(n, ring, (p, p + 1))
        if _conj(generic, phi(s), inv) != s.scale(alpha):
            raise NotAnAutomorphism(f"normalized image of S_({p},{p + 1}) is not α·S_({p},{p + 1})")
    return generic, alpha


# -- stage 2: the ring automorphism ------------------------------------------------


def _scalar_probes(ring: RingDescriptor) -> list[RingElem]:
    probes = [ring.scalar(v) for v in (0, 1, mpq(1, 2), 3)]
    if ring.k > 1:
        probes.append(ring.elem(list(range(1, ring.k + 1))))
        probes.append(ring.elem([mpq(1, j + 2) for j in range(ring.k)]))
    return probes


def _require_normalized(phi_prime, n: int, ring: RingDescriptor) -> RingElem:
    s = _s(n, ring, (1, 2))
    y = phi_prime(s)
    alpha = y[0, 1]
    if y != s.scale(alpha):
        raise PipelineOrderError("permutation images are not normalized yet; run stage 1 first",
                                 witness={"image": y.to_json()})
    return alpha


@dataclass
class RingMapData:
    c: RingAutomorphism
    table: list


def extract_ring_automorphism(phi_prime, n: int, ring: RingDescriptor) -> RingMapData:
    """Stage 2: c with Φ′(B_12(x)) = B_12(c(x)) for an oracle fixing all S_σ."""
    _require_normalized(phi_prime, n, ring)
    probes = _scalar_probes(ring)
    table = {}

    def read(x: RingElem) -> RingElem:
        y = _image(phi_prime, transvection(n, 1, 2, x), f"B_12({x!r})")
        if y != transvection(n, 1, 2, y[0, 1]):
            raise PipelineOrderError(f"image of B_12({x!r}) is not a transvection at (1,2)",
                                     witness={"x": x.to_json(), "image": y.to_json()})
        return y[0, 1]

    for x in probes:
        table[x] = read(x)
    for x in probes:
        for y in probes:
            if read(x + y) != table[x] + table[y]:
                raise NotAnAutomorphism("transvection parameters are not additive",
                                        witness={"x": x.to_json(), "y": y.to_json()})
            if read(x * y) != table[x] * table[y]:
                raise NotAnAutomorphism("transvection parameters are not multiplicative",
                                        witness={"x": x.to_json(), "y": y.to_json()})
    pairs = [[x.to_json(), v.to_json()] for x, v in table.items()]
    for c in ring_automorphisms(ring):
        if all(c(x) == v for x, v in table.items()):
            return RingMapData(c, pairs)
    raise UnsupportedRingAutomorphism("no coordinate permutation matches the transvection images",
                                      witness=pairs)


# -- stage 3: the central character --------------------------------------------------


def default_probe_units(ring: RingDescriptor) -> list[RingElem]:
    """1/2, 2, 3, 5/3 in every component, plus one mixed unit when k > 1."""
    units = [ring.scalar(v) for v in (mpq(1, 2), 2, 3, mpq(5, 3))]
    if ring.k > 1:
        units.append(ring.elem([mpq(j + 2, j + 1) for j in range(ring.k)]))
    return units


def _exact_log2(v) -> int | None:
    if v <= 0:
        return None
    num, den = int(v.numerator), int(v.denominator)
    if den == 1 and num & (num - 1) == 0:
        return num.bit_length() - 1
    if num == 1 and den & (den - 1) == 0:
        return -(den.bit_length() - 1)
    return None


@dataclass
class CentralData:
    alpha: RingElem
    gamma_table: list
    homothety: HomothetySpec | None = None


def _gamma(phi2, n: int, ring: RingDescriptor, u: RingElem) -> RingElem:
    d = Mat.diag([u] + [ring.one] * (n - 1))
    y = _image(phi2, d, f"diag[{u!r},1,...]")
    g = y[1, 1]
    if y != Mat.diag([u * g] + [g] * (n - 1)):
        raise PipelineOrderError("image of a one-entry diagonal matrix is not u·γ(u) ⊕ γ(u)I",
                                 witness={"u": u.to_json(), "image": y.to_json()})
    return g


def extract_central_data(phi2, n: int, ring: RingDescriptor,
                         probe_units: Sequence[RingElem] | None = None) -> CentralData:
    """Stage 3: γ on probe units, the sign scalar α, and a |det|-power fit.

    Raises UnsupportedHomothety, carrying the γ table, when no fit exists.
    """
    alpha = _require_normalized(phi2, n, ring)
    if not (alpha.is_nonneg() and alpha * alpha == ring.one):
        raise NotAnAutomorphism("image of S_(12) is not a nonnegative involutive multiple of S_(12)",
                                witness={"alpha": alpha.to_json()})
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            for x in (ring.one, ring.scalar(mpq(1, 2))):
                b = transvection(n, i, j, x)
                if _image(phi2, b, f"B_{i}{j}") != b:
                    raise PipelineOrderError(f"B_{i}{j}({x!r}) is not fixed after removing c",
                                             witness={"i": i, "j": j, "x": x.to_json()})

    units = list(probe_units) if probe_units is not None else default_probe_units(ring)
    basis = [ring.elem([2 if j == c else 1 for j in range(ring.k)]) for c in range(ring.k)]
    gammas = {u: _gamma(phi2, n, ring, u) for u in basis + units}
    table = [[u.to_json(), g.to_json()] for u, g in gammas.items()]
    for u in units:
        for v in units:
            if _gamma(phi2, n, ring, u * v) != gammas[u] * gammas[v]:
                raise NotAnAutomorphism("γ is not multiplicative on probe units",
                                        witness={"u": u.to_json(), "v": v.to_json()})
    out = CentralData(alpha, table)

    t = []
    for c, u in enumerate(basis):
        g = gammas[u]
        tc = _exact_log2(g.comps[c])
        if tc is None or any(g.comps[j] != 1 for j in range(ring.k) if j != c):
            raise UnsupportedHomothety(f"γ({u!r}) = {g!r} is not a power of |det|", witness=table)
        t.append(tc)
    # over Q^k the sign scalar is 1, so the sign flags are not observable and stay 0
    spec = HomothetySpec(tuple(t), (0,) * ring.k, None if alpha.is_one() else alpha)
    for u in units:
        if spec.lam(Mat.diag([u] + [ring.one] * (n - 1))) != gammas[u]:
            raise UnsupportedHomothety(f"fitted exponents {t} miss the probe unit {u!r}", witness=table)
    out.homothety = spec
    return out


def check_diagonal_laws(phi_prime, c: RingAutomorphism, n: int, ring: RingDescriptor) -> dict:
    """Shape laws for images of diagonal and block matrices; raises on violation."""
    checks = {}
    for a, b in ((2, 3), (mpq(1, 2), 5)):
        x = Mat.diag([ring.scalar(a)] + [ring.scalar(b)] * (n - 1))
        y = _image(phi_prime, x, "diag[a,b,...,b]")
        g, d = y[0, 0], y[1, 1]
        if y != Mat.diag([g] + [d] * (n - 1)):
            raise PipelineOrderError("image of diag[a,b,...,b] is not of the form diag[γ,δ,...,δ]",
                                     witness={"image": y.to_json()})
        if g * d.inv() != c(ring.scalar(a) * ring.scalar(b).inv()):
            raise NotAnAutomorphism("image of diag[a,b,...,b] has the wrong ratio",
                                    witness={"image": y.to_json()})
        checks["diag_ab"] = checks.get("diag_ab", 0) + 1
    x = transvection(n, 1, 2, ring.one) @ _s(n, ring, (1, 2)) @ Mat.diag(
        [ring.scalar(2)] + [ring.one] * (n - 1))
    y = _image(phi_prime, x, "X ⊕ I")
    tail = y[2, 2]
    for i in range(n):
        for j in range(n):
            outside = not (i < 2 and j < 2)
            if (outside and i != j and not y[i, j].is_zero()) or (i == j >= 2 and y[i, j] != tail):
                raise NotAnAutomorphism("image of X ⊕ I does not keep the block shape",
                                        witness={"image": y.to_json(), "row": i + 1, "col": j + 1})
    checks["block_shape"] = 1
    alpha = _require_normalized(phi_prime, n, ring)
    layout = block_decomposition(n)
    for i in range(1, layout.exponents[0] + 1):
        sigma = standard_substitution("sigma_i", (i,), n)
        s = perm_matrix(sigma, ring)
        if phi_prime(s) != (s.scale(alpha) if sigma.sign() < 0 else s):
            raise NotAnAutomorphism(f"standard substitution sigma_{i} is not fixed")
        checks["substitutions"] = checks.get("substitutions", 0) + 1
    return checks


# -- the full decomposition ---------------------------------------------------------------


@dataclass
class Decomposition:
    """``Φ(A) = M · c(λ(A) A) · M⁻¹`` with M normalized so each row-1 lead entry is 1."""

    n: int
    ring: RingDescriptor
    inner: Mat
    ring_map: RingAutomorphism
    homothety: HomothetySpec | None
    alpha: RingElem | None = None
    gamma_table: list = field(default_factory=list)
    lambda_table: list = field(default_factory=list)
    transcript: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def as_spec(self) -> AutomorphismSpec:
        if self.homothety is None:
            raise UnsupportedHomothety("central character is only known on probes",
                                       witness=self.gamma_table)
        return AutomorphismSpec(self.ring, self.n, (Inner(self.inner), RingMap(self.ring_map),
                                                    Homothety(self.homothety)))

    def as_automorphism(self) -> Automorphism:
        """Reassembled map, without the Gamma_n check on M so perturbed data can be tested."""
        spec = self.as_spec()
        return Automorphism(_compose(spec.factors), self.n, self.ring, spec=spec, name="decomposition")

    def to_json(self) -> dict:
        out = {"ring": self.ring.to_json(), "n": self.n, "inner": self.inner.to_json(),
               "ring_map": self.ring_map.to_json(),
               "homothety": self.homothety.to_json() if self.homothety is not None else None,
               "alpha": (self.alpha or self.ring.one).to_json(),
               "gamma_table": self.gamma_table}
        if self.lambda_table:
            out["lambda_table"] = self.lambda_table
        if self.transcript:
            out["transcript"] = self.transcript
        if self.warnings:
            out["warnings"] = self.warnings
        return out


def parse_decomposition(data, ring: RingDescriptor | None = None) -> Decomposition:
    try:
        if ring is None:
            ring = RingDescriptor(int(data["ring"]["k"])) if "ring" in data else None
        inner = parse_matrix(data["inner"], ring.k if ring else None)
        ring = ring or inner.ring
        c = parse_ring_map(data.get("ring_map", "identity"), ring.k)
        h = data.get("homothety")
        h = parse_homothety(h, ring.k) if h is not None else None
        alpha = parse_elem(data["alpha"], ring.k) if "alpha" in data else None
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"bad decomposition JSON: {exc}") from exc
    return Decomposition(inner.n, ring, inner, c, h, alpha=alpha, gamma_table=data.get("gamma_table", []))


def default_probes(n: int, ring: RingDescriptor, seed: int = 0, random_count: int = 50) -> list[GenWord]:
    """Adjacent transpositions, every B_ij once, spread diagonals and seeded random words."""
    words = [GenWord(n, ring, (PermLetter(_perm(n, (p, p + 1))),)) for p in range(1, n)]
    xs = [ring.zero, ring.one, ring.scalar(mpq(1, 2)), ring.scalar(3)]
    idx = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                words.append(GenWord(n, ring, (ElemLetter(i, j, xs[idx % len(xs)]),)))
                idx += 1
    primes = [2, 3, 5, 7, 11, 13, 17, 19]
    for r in range(n):
        entries = [ring.one] * n
        entries[r] = ring.elem([mpq(primes[(r + c) % len(primes)], 1 + c) for c in range(ring.k)])
        words.append(GenWord(n, ring, (DiagLetter(tuple(entries)),)))
    rng = random.Random(seed)
    words += [random_word(n, ring, rng) for _ in range(max(random_count, 60 - len(words)))]
    return words


@dataclass
class VerifyReport:
    passed: bool
    results: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def checked(self) -> int:
        return len(self.results)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.results if not r["pass"])

    @property
    def first_failure(self) -> dict | None:
        return next((r for r in self.results if not r["pass"]), None)

    def to_json(self) -> dict:
        out = {"passed": self.passed, "checked": self.checked, "failed": self.failed,
               "words": self.results}
        if self.warnings:
            out["warnings"] = self.warnings
        return out


def verify_decomposition(phi: Automorphism, dec: Decomposition, words: Sequence[GenWord]) -> VerifyReport:
    """Re-evaluate ``Φ(w) = M·c(λ(w) w)·M⁻¹`` on every word."""
    report = VerifyReport(True)
    if not words:
        report.warnings.append("no words supplied; the check is vacuous")
        return report
    rebuilt = dec.as_automorphism()
    for w in words:
        x = eval_word(w)
        want, got = phi.apply(x), rebuilt.apply(x)
        entry = {"word": w.to_json(), "pass": want == got}
        if want != got:
            entry.update(oracle=want.to_json(), decomposition=got.to_json())
            report.passed = False
        report.results.append(entry)
    return report


def _lambda_of(phi: Automorphism, m: Mat, c: RingAutomorphism, x: Mat) -> RingElem | None:
    """λ(x) read from the oracle: c⁻¹ of the scalar relating M⁻¹Φ(x)M to c(x)."""
    inner = m.inverse() @ phi.apply(x) @ m
    cx = x.apply_ring_map(c)
    q = inner @ cx.inverse()
    return c.inverse()(q[0, 0]) if q.is_scalar() else None


def _staged(stage: str, fn, *args):
    try:
        return fn(*args)
    except OrdmatError as exc:
        exc.stage = stage
        raise


def decompose(phi: Automorphism, probe_units: Sequence[RingElem] | None = None,
              probe_words: Sequence[GenWord] | None = None, seed: int = 0) -> Decomposition:
    """Run the three stages in order, then verify on the probe words."""
    n, ring = phi.n, phi.ring
    if n < 3:
        raise PreconditionError("decomposition needs n >= 3", witness={"n": n})
    m1, alpha = _staged("normalize_permutation_images", normalize_permutation_images, phi)
    m1_inv = m1.inverse()
    phi_prime = phi.then(lambda y: m1 @ y @ m1_inv, name="normalized")
    ring_data = _staged("extract_ring_automorphism", extract_ring_automorphism, phi_prime, n, ring)
    c = ring_data.c
    shape_checks = _staged("extract_ring_automorphism", check_diagonal_laws, phi_prime, c, n, ring)
    c_inv = c.inverse()
    phi2 = phi_prime.then(lambda y: y.apply_ring_map(c_inv), name="central")
    m = normalize_central(m1_inv)
    transcript = {
        "normalize_permutation_images": {"M1": m1.to_json(), "alpha": alpha.to_json(),
                                         "routes_agree": True},
        "extract_ring_automorphism": {"c": c.to_json(), "table": ring_data.table, "shape_checks": shape_checks},
    }
    dec = Decomposition(n, ring, m, c, None, alpha=alpha, transcript=transcript)
    try:
        central = extract_central_data(phi2, n, ring, probe_units)
        dec.homothety, dec.gamma_table = central.homothety, central.gamma_table
    except UnsupportedHomothety as exc:
        exc.stage = "extract_central_data"
        dec.gamma_table = exc.witness or []
        dec.warnings.append(str(exc) + "; only the γ table is returned")
    transcript["extract_central_data"] = {
        "gamma_table": dec.gamma_table,
        "homothety": dec.homothety.to_json() if dec.homothety is not None else None}

    words = list(probe_words) if probe_words is not None else default_probes(n, ring, seed)
    dec.lambda_table = []
    for w in words[: min(len(words), 20)]:
        lam = _lambda_of(phi, m, c, eval_word(w))
        dec.lambda_table.append([w.to_json(), lam.to_json() if lam is not None else None])
    if dec.homothety is None:
        return dec
    report = verify_decomposition(phi, dec, words)
    transcript["verification"] = {"checked": report.checked, "failed": report.failed}
    if not report.passed:
        err = DecompositionMismatch("decomposition disagrees with the oracle", witness=report.first_failure)
        err.stage = "verify"
        raise err
    return dec
