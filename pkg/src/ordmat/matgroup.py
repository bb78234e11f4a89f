"""Matrices over Q^k, membership tests, permutations and generator words.

A :class:`Mat` stores one exact rational matrix per factor of Q^k, so all
linear algebra runs componentwise on ``mpq`` values.  ``A[i, j]`` is
0-based like any Python container; everything that names a position in
the mathematical sense (permutations, transvections ``B(i, j, x)``, block
offsets, word letters) is 1-based.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .errors import (DimensionMismatch, InputError, MalformedWord, PreconditionError,
                     SingularMatrix)
from .ring import ONE, ZERO, RingAutomorphism, RingDescriptor, RingElem, parse_elem


def _matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum([x * y for x, y in zip(row, col)], ZERO) for col in cols) for row in a)


def _inverse(a):
    n = len(a)
    work = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        p = work[col][col]
        if p != 1:
            work[col] = [x / p for x in work[col]]
        prow = work[col]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], prow)]
    return tuple(tuple(row[n:]) for row in work)


def _bareiss_det(a):
    n = len(a)
    if n == 0:
        return ONE
    m = [list(row) for row in a]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return ZERO
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class Mat:
    """Square matrix over Q^k stored as ``k`` rational matrices."""

    n: int
    comps: tuple

    # -- construction -----------------------------------------------------

    @classmethod
    def from_components(cls, comps: Sequence) -> "Mat":
        comps = tuple(tuple(tuple(mpq(x) for x in row) for row in c) for c in comps)
        if not comps:
            raise DimensionMismatch("a matrix needs at least one ring component")
        n = len(comps[0])
        for c in comps:
            if len(c) != n or any(len(row) != n for row in c):
                raise DimensionMismatch("matrix must be square with equal component shapes")
        return cls(n, comps)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RingElem]]) -> "Mat":
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square and nonempty")
        k = rows[0][0].k
        if any(x.k != k for r in rows for x in r):
            raise DimensionMismatch("entries come from different rings")
        comps = tuple(tuple(tuple(rows[i][j].comps[c] for j in range(n)) for i in range(n))
                      for c in range(k))
        return cls(n, comps)

    @classmethod
    def identity(cls, n: int, ring: RingDescriptor) -> "Mat":
        eye = tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))
        return cls(n, (eye,) * ring.k)

    @classmethod
    def zeros(cls, n: int, ring: RingDescriptor) -> "Mat":
        z = tuple((ZERO,) * n for _ in range(n))
        return cls(n, (z,) * ring.k)

    @classmethod
    def diag(cls, entries: Sequence[RingElem]) -> "Mat":
        n = len(entries)
        k = entries[0].k
        comps = tuple(tuple(tuple(entries[i].comps[c] if i == j else ZERO for j in range(n))
                            for i in range(n)) for c in range(k))
        return cls(n, comps)

    @classmethod
    def scalar(cls, n: int, r: RingElem) -> "Mat":
        return cls.diag([r] * n)

    # -- access -----------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.comps)

    @property
    def ring(self) -> RingDescriptor:
        return RingDescriptor(len(self.comps))

    def __getitem__(self, idx) -> RingElem:
        i, j = idx
        return RingElem(tuple(c[i][j] for c in self.comps))

    def rows(self) -> list[list[RingElem]]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def component(self, c: int):
        return self.comps[c]

    # -- algebra ------------------------------------------------------------

    def _check(self, other: "Mat"):
        if self.n != other.n:
            raise DimensionMismatch(f"dimension mismatch: {self.n} vs {other.n}")
        if self.k != other.k:
            raise DimensionMismatch(f"ring mismatch: k={self.k} vs k={other.k}")

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat(self.n, tuple(_matmul(a, b) for a, b in zip(self.comps, other.comps)))

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat(self.n, tuple(tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
                                 for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: "Mat") -> "Mat":
        return self + other.scale(RingElem((mpq(-1),) * self.k))

    def scale(self, r: RingElem) -> "Mat":
        if r.k != self.k:
            raise DimensionMismatch(f"ring mismatch: k={self.k} vs k={r.k}")
        return Mat(self.n, tuple(tuple(tuple(s * x for x in row) for row in c)
                                 for s, c in zip(r.comps, self.comps)))

    def transpose(self) -> "Mat":
        return Mat(self.n, tuple(tuple(zip(*c)) for c in self.comps))

    def apply_ring_map(self, c: RingAutomorphism) -> "Mat":
        """Entrywise application of a coordinate permutation of Q^k."""
        if c.k != self.k:
            raise DimensionMismatch(f"ring map on k={c.k} applied to k={self.k}")
        return Mat(self.n, c.apply_comps(self.comps))

    def det(self) -> RingElem:
        return RingElem(tuple(_bareiss_det(c) for c in self.comps))

    def inverse(self) -> "Mat":
        out = []
        for idx, c in enumerate(self.comps):
            inv = _inverse(c)
            if inv is None:
                raise SingularMatrix(f"matrix is singular in ring component {idx + 1}")
            out.append(inv)
        return Mat(self.n, tuple(out))

    def __pow__(self, e: int) -> "Mat":
        if e < 0:
            return self.inverse() ** (-e)
        out = Mat.identity(self.n, self.ring)
        for _ in range(e):
            out = out @ self
        return out

    # -- predicates -----------------------------------------------------------

    def is_nonneg(self) -> bool:
        return all(x >= 0 for c in self.comps for row in c for x in row)

    def is_diagonal(self) -> bool:
        return all(c[i][j] == 0 for c in self.comps for i in range(self.n) for j in range(self.n)
                   if i != j)

    def is_identity(self) -> bool:
        return self == Mat.identity(self.n, self.ring)

    def is_scalar(self) -> bool:
        return self.is_diagonal() and all(c[i][i] == c[0][0] for c in self.comps for i in range(self.n))

    def is_monomial(self) -> bool:
        """One nonzero entry per row and column in every component."""
        for c in self.comps:
            if any(sum(1 for x in row if x != 0) != 1 for row in c):
                return False
            if any(sum(1 for x in col if x != 0) != 1 for col in zip(*c)):
                return False
        return True

    def first_nonzero_negative(self):
        for idx, c in enumerate(self.comps):
            for i, row in enumerate(c):
                for j, x in enumerate(row):
                    if x < 0:
                        return {"component": idx + 1, "row": i + 1, "col": j + 1, "value": str(x)}
        return None

    def __repr__(self) -> str:
        body = "; ".join(" ".join(_fmt(self[i, j]) for j in range(self.n)) for i in range(self.n))
        return f"Mat[{body}]"

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[self[i, j].to_json() for j in range(self.n)]
                                         for i in range(self.n)]}


def normalize_central(m: Mat) -> Mat:
    """Rescale each component so the first nonzero entry of row 1 is 1.

    Conjugation by ``m`` is unchanged, since the factor is central.
    """
    factors = []
    for c in m.comps:
        lead = next((x for x in c[0] if x != 0), None)
        if lead is None:
            raise SingularMatrix("first row vanishes in some component")
        factors.append(ONE / lead)
    return m.scale(RingElem(tuple(factors)))


def submatrix(m: Mat, idx: Sequence[int]) -> Mat:
    """Principal submatrix on 0-based indices ``idx``."""
    return Mat(len(idx), tuple(tuple(tuple(c[i][j] for j in idx) for i in idx) for c in m.comps))


def direct_sum(a: Mat, b: Mat) -> Mat:
    if a.k != b.k:
        raise DimensionMismatch("ring mismatch in direct sum")
    n = a.n + b.n
    comps = []
    for ca, cb in zip(a.comps, b.comps):
        rows = [tuple(row) + (ZERO,) * b.n for row in ca]
        rows += [(ZERO,) * a.n + tuple(row) for row in cb]
        comps.append(tuple(rows))
    return Mat(n, tuple(comps))


def _fmt(x: RingElem) -> str:
    if x.k == 1:
        return str(x.comps[0])
    return "(" + ",".join(str(a) for a in x.comps) + ")"


def peirce_sum(parts: Sequence[tuple[RingElem, Mat]]) -> Mat:
    """``Σ e·X`` over pairs (idempotent e, matrix X)."""
    total = None
    for e, m in parts:
        term = m.scale(e)
        total = term if total is None else total + term
    if total is None:
        raise PreconditionError("empty Peirce sum")
    return total


def _infer_k(entries) -> int:
    for row in entries:
        for x in row:
            if isinstance(x, (list, tuple)):
                return len(x)
    return 1


def parse_matrix(data, k: int | None = None) -> Mat:
    if not isinstance(data, dict) or "entries" not in data:
        raise InputError("matrix JSON must be an object with 'entries'")
    entries = data["entries"]
    if not isinstance(entries, list) or not entries:
        raise InputError("'entries' must be a nonempty list of rows")
    if k is None:
        k = data["ring"]["k"] if isinstance(data.get("ring"), dict) else _infer_k(entries)
    rows = [[parse_elem(x, k) for x in row] for row in entries]
    mat = Mat.from_rows(rows)
    if "n" in data and int(data["n"]) != mat.n:
        raise InputError(f"declared n={data['n']} but entries are {mat.n}x{mat.n}")
    return mat


# -- permutations --------------------------------------------------------------


@dataclass(frozen=True)
class Perm:
    """A permutation of {1..n}; ``images[i-1]`` is the image of i."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise InputError(f"not a permutation of 1..n: {self.images!r}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Perm":
        images = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a - 1] = b
        return cls(tuple(images))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Perm":
        return cls.from_cycles(n, (a, b))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        """Composition ``self ∘ other`` (apply ``other`` first)."""
        return Perm(tuple(self.images[other.images[i] - 1] for i in range(self.n)))

    def inverse(self) -> "Perm":
        out = [0] * self.n
        for i, v in enumerate(self.images, start=1):
            out[v - 1] = i
        return Perm(tuple(out))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(1, self.n + 1):
            if start in seen or self(start) == start:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self(x)
            out.append(tuple(cyc))
        return out

    def sign(self) -> int:
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, start=1))

    def format_cycles(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(str(x) for x in c) + ")" for c in cyc)

    def to_json(self) -> list[int]:
        return list(self.images)


def perm_matrix(sigma: Perm, ring: RingDescriptor) -> Mat:
    """``S_σ = (δ_{i,σ(j)})``: column j carries its 1 in row σ(j)."""
    n = sigma.n
    m = tuple(tuple(ONE if i + 1 == sigma(j + 1) else ZERO for j in range(n)) for i in range(n))
    return Mat(n, (m,) * ring.k)


def transvection(n: int, i: int, j: int, x: RingElem) -> Mat:
    """``B_ij(x) = I + x E_ij`` (1-based, i != j)."""
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise MalformedWord(f"bad transvection indices ({i}, {j}) for n={n}")
    comps = []
    for xc in x.comps:
        comps.append(tuple(tuple(ONE if r == s else (xc if (r, s) == (i - 1, j - 1) else ZERO)
                                 for s in range(n)) for r in range(n)))
    return Mat(n, tuple(comps))


# -- block layout and the standard substitutions ----------------------------


@dataclass(frozen=True)
class BlockLayout:
    sizes: tuple
    offsets: tuple

    @property
    def exponents(self) -> tuple:
        return tuple(s.bit_length() - 1 for s in self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def block_indices(self, j: int) -> range:
        """1-based positions of block j (1-based)."""
        return range(self.offsets[j - 1], self.offsets[j - 1] + self.sizes[j - 1])


def block_decomposition(n: int) -> BlockLayout:
    if n < 1:
        raise PreconditionError("n must be positive")
    sizes = [1 << b for b in range(n.bit_length() - 1, -1, -1) if n >> b & 1]
    offsets, pos = [], 1
    for s in sizes:
        offsets.append(pos)
        pos += s
    return BlockLayout(tuple(sizes), tuple(offsets))


def _block_pairs(start: int, length: int, i: int) -> list[tuple[int, int]]:
    """Transpositions (p, p + 2^(i-1)) covering positions start..start+length-1."""
    step = 1 << (i - 1)
    return [(start + r, start + r + step) for r in range(length) if not (r >> (i - 1)) & 1]


def standard_substitution(kind: str, params: Sequence[int], n: int) -> Perm:
    """``sigma_i`` (i,), ``sigma_i_of_block`` (i, j) or ``tau`` (i, p, m)."""
    layout = block_decomposition(n)
    ks = layout.exponents
    pairs: list[tuple[int, int]] = []
    if kind == "sigma_i_of_block":
        i, j = params
        if not (1 <= j <= len(ks)) or not (1 <= i <= ks[j - 1]):
            raise PreconditionError(f"sigma_{i}^({j}) undefined for n={n}")
        pairs = _block_pairs(layout.offsets[j - 1], layout.sizes[j - 1], i)
    elif kind == "sigma_i":
        (i,) = params
        if not (1 <= i <= ks[0]):
            raise PreconditionError(f"sigma_{i} undefined for n={n}")
        for q, kq in enumerate(ks, start=1):
            iq = min(i, kq)
            if iq >= 1:
                pairs += _block_pairs(layout.offsets[q - 1], layout.sizes[q - 1], iq)
    elif kind == "tau":
        i, p, m = params
        if not (1 <= i <= len(ks)) or not (1 <= p <= m <= ks[i - 1]):
            raise PreconditionError(f"tau({i},{p},{m}) undefined for n={n}")
        pairs = _block_pairs(layout.offsets[i - 1], 1 << m, p)
    else:
        raise PreconditionError(f"unknown substitution kind {kind!r}")
    return Perm.from_cycles(n, *pairs)


# -- membership -----------------------------------------------------------------

MEMBER_CLASSES = ("Gn", "Gamma_n", "Dn", "BlockScalarInvolution")


def is_member(a: Mat, cls: str, layout: BlockLayout | None = None) -> bool:
    if cls == "Gn":
        return a.is_nonneg() and a.det().is_unit()
    if cls == "Gamma_n":
        if not is_member(a, "Gn"):
            return False
        return a.inverse().is_nonneg()
    if cls == "Dn":
        return a.is_diagonal() and all(a[i, i].is_nonneg() and a[i, i].is_unit() for i in range(a.n))
    if cls == "BlockScalarInvolution":
        layout = layout or block_decomposition(a.n)
        if layout.n != a.n:
            raise PreconditionError(f"layout covers {layout.n} positions, matrix has n={a.n}")
        if not is_member(a, "Dn") or not (a @ a).is_identity():
            return False
        for j in range(1, len(layout.sizes) + 1):
            idx = [p - 1 for p in layout.block_indices(j)]
            if any(a[p, p] != a[idx[0], idx[0]] for p in idx):
                return False
        return True
    raise PreconditionError(f"unknown membership class {cls!r}")


# -- generator words --------------------------------------------------------------


@dataclass(frozen=True)
class PermLetter:
    perm: Perm

    def matrix(self, n: int, ring: RingDescriptor) -> Mat:
        if self.perm.n != n:
            raise MalformedWord(f"permutation of degree {self.perm.n} in a word of dimension {n}")
        return perm_matrix(self.perm, ring)

    def det_sign(self, ring: RingDescriptor) -> RingElem:
        return ring.scalar(self.perm.sign())

    def to_json(self):
        return {"perm": self.perm.to_json()}


@dataclass(frozen=True)
class DiagLetter:
    entries: tuple

    def matrix(self, n: int, ring: RingDescriptor) -> Mat:
        if len(self.entries) != n:
            raise MalformedWord(f"diagonal letter of length {len(self.entries)} in dimension {n}")
        for d in self.entries:
            if d.k != ring.k:
                raise MalformedWord("diagonal entry from a different ring")
            if not (d.is_nonneg() and d.is_unit()):
                raise MalformedWord(f"diagonal entry {d!r} is not a nonnegative unit",
                                    witness=d.to_json())
        return Mat.diag(list(self.entries))

    def det_sign(self, ring: RingDescriptor) -> RingElem:
        return ring.one

    def to_json(self):
        return {"diag": [d.to_json() for d in self.entries]}


@dataclass(frozen=True)
class ElemLetter:
    i: int
    j: int
    x: RingElem

    def matrix(self, n: int, ring: RingDescriptor) -> Mat:
        if self.x.k != ring.k:
            raise MalformedWord("transvection parameter from a different ring")
        if not self.x.is_nonneg():
            raise MalformedWord(f"transvection parameter {self.x!r} is negative", witness=self.x.to_json())
        return transvection(n, self.i, self.j, self.x)

    def det_sign(self, ring: RingDescriptor) -> RingElem:
        return ring.one

    def to_json(self):
        return {"elem": {"i": self.i, "j": self.j, "x": self.x.to_json()}}


@dataclass(frozen=True)
class GenWord:
    n: int
    ring: RingDescriptor
    letters: tuple = ()

    def __add__(self, other: "GenWord") -> "GenWord":
        return GenWord(self.n, self.ring, self.letters + other.letters)

    def to_json(self) -> list:
        return [letter.to_json() for letter in self.letters]


def eval_word(w: GenWord) -> Mat:
    out = Mat.identity(w.n, w.ring)
    for letter in w.letters:
        out = out @ letter.matrix(w.n, w.ring)
    return out


def word_det_sign(w: GenWord) -> RingElem:
    """Product of the letters' determinant signs (+1 or -1 per component)."""
    s = w.ring.one
    for letter in w.letters:
        s = s * letter.det_sign(w.ring)
    return s


def parse_letter(data, k: int, n: int | None = None):
    if not isinstance(data, dict) or len(data) != 1:
        raise InputError(f"bad word letter {data!r}")
    (tag, body), = data.items()
    if tag == "perm":
        return PermLetter(Perm(tuple(int(v) for v in body)))
    if tag == "diag":
        return DiagLetter(tuple(parse_elem(d, k) for d in body))
    if tag == "elem":
        try:
            return ElemLetter(int(body["i"]), int(body["j"]), parse_elem(body["x"], k))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad elem letter {body!r}") from exc
    raise InputError(f"unknown letter kind {tag!r}")


def infer_word_shape(data) -> tuple[int | None, int | None]:
    """Best-effort (n, k) from a word's letters."""
    n = k = None
    for letter in data:
        if not isinstance(letter, dict):
            continue
        if "perm" in letter:
            n = n or len(letter["perm"])
        if "diag" in letter:
            n = n or len(letter["diag"])
            for d in letter["diag"]:
                if isinstance(d, list):
                    k = k or len(d)
        if "elem" in letter and isinstance(letter["elem"], dict):
            x = letter["elem"].get("x")
            if isinstance(x, list):
                k = k or len(x)
    return n, k


def parse_word(data, n: int, ring: RingDescriptor) -> GenWord:
    if not isinstance(data, list):
        raise InputError("a word must be a JSON list of letters")
    return GenWord(n, ring, tuple(parse_letter(x, ring.k, n) for x in data))


def _small_unit(rng: random.Random) -> mpq:
    return mpq(rng.randint(1, 5), rng.randint(1, 4))


def random_word(n: int, ring: RingDescriptor, rng: random.Random, max_len: int = 6) -> GenWord:
    letters = []
    for _ in range(rng.randint(1, max_len)):
        kind = rng.randrange(3 if n > 1 else 2)
        if kind == 0:
            images = list(range(1, n + 1))
            rng.shuffle(images)
            letters.append(PermLetter(Perm(tuple(images))))
        elif kind == 1:
            letters.append(DiagLetter(tuple(RingElem(tuple(_small_unit(rng) for _ in range(ring.k)))
                                            for _ in range(n))))
        else:
            i, j = rng.sample(range(1, n + 1), 2)
            x = RingElem(tuple(mpq(rng.randint(0, 4), rng.randint(1, 3)) for _ in range(ring.k)))
            letters.append(ElemLetter(i, j, x))
    return GenWord(n, ring, tuple(letters))


# -- P-equivalence certificates --------------------------------------------------


@dataclass(frozen=True)
class EquivLink:
    p: GenWord
    p_tilde: GenWord
    q: GenWord
    q_tilde: GenWord
    a: Mat
    a_next: Mat


@dataclass(frozen=True)
class EquivChainCert:
    chain: tuple


def verify_equiv_chain(cert: EquivChainCert) -> bool:
    prev = None
    for link in cert.chain:
        if prev is not None and prev != link.a:
            return False
        try:
            left = eval_word(link.p) @ link.a @ eval_word(link.p_tilde)
            right = eval_word(link.q) @ link.a_next @ eval_word(link.q_tilde)
        except (MalformedWord, DimensionMismatch):
            return False
        if left != right:
            return False
        prev = link.a_next
    return True


def parse_chain(data, n: int, ring: RingDescriptor) -> EquivChainCert:
    links = []
    for item in data:
        try:
            links.append(EquivLink(parse_word(item["P"], n, ring), parse_word(item["P_tilde"], n, ring),
                                   parse_word(item["Q"], n, ring), parse_word(item["Q_tilde"], n, ring),
                                   parse_matrix(item["A"], ring.k), parse_matrix(item["A_next"], ring.k)))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad chain link: missing {exc}") from exc
    return EquivChainCert(tuple(links))
