"""Involutions of Gamma_n(R): idempotent systems and block-diagonal forms.

The generic route works entirely with ring operations.  For an involution
A the products ``e_i = a_{1i} a_{i1}`` form a complete system of
orthogonal idempotents; on the piece ``e_i R`` the first basis vector is
paired with the i-th one (or is fixed when i = 1), the pair is moved to
the front by ``e_i S_{(2,i)}`` and the remaining principal submatrix is an
involution over ``e_i R`` that is treated the same way.  The branches are
glued back together by Peirce summation.

A second, independent route handles each Q-factor separately, where every
involution of Gamma_n(Q) is a positive monomial matrix, by pairing its
2-cycles.  The two must agree after :func:`canonical_conjugator`.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import PreconditionError, ShapeError
from .matgroup import (Mat, Perm, direct_sum, is_member, normalize_central, perm_matrix,
                       submatrix)
from .ring import ONE, ZERO, RingElem, sum_elems


@dataclass(frozen=True)
class IdempotentSystem:
    elements: tuple

    def is_valid(self) -> bool:
        if not self.elements:
            return False
        ring = self.elements[0].ring
        es = self.elements
        if any(not (e * e == e) for e in es):
            return False
        if any(not (es[i] * es[j]).is_zero() for i in range(len(es)) for j in range(len(es)) if i != j):
            return False
        return sum_elems(es, ring) == ring.one


@dataclass(frozen=True)
class BlockDiagForm:
    conjugator: Mat
    result: Mat
    block_sizes: tuple


def require_involution(a: Mat, unit: RingElem | None = None) -> None:
    unit = unit if unit is not None else a.ring.one
    if not (a @ a) == Mat.scalar(a.n, unit):
        raise PreconditionError("matrix does not square to the identity", witness=a.to_json())
    if not is_member(a, "Gamma_n"):
        raise PreconditionError("matrix is not in Gamma_n", witness=a.to_json())


def _system(a: Mat, unit: RingElem) -> list[RingElem]:
    es = [a[0, i] * a[i, 0] for i in range(a.n)]
    system = IdempotentSystem(tuple(es))
    ring = unit.ring
    if any(not (e * e == e) for e in es) or sum_elems(es, ring) != unit or not all(
            (es[i] * es[j]).is_zero() for i in range(len(es)) for j in range(i + 1, len(es))):
        raise PreconditionError("first-row products are not a complete orthogonal idempotent system",
                                witness=[e.to_json() for e in system.elements])
    return es


def idempotent_system(a: Mat) -> IdempotentSystem:
    """``e_i = a_{1i} a_{i1}`` for an involution ``a`` of Gamma_n(R)."""
    require_involution(a)
    return IdempotentSystem(tuple(_system(a, a.ring.one)))


def _recurse(a: Mat, unit: RingElem) -> list[tuple[RingElem, Mat, list[int]]]:
    """Branches (delta, P, sizes) with Σ delta = unit and P·a·P⁻¹ block diagonal on delta·R."""
    m = a.n
    if m == 1:
        return [(unit, Mat.scalar(1, unit), [1])]
    branches = []
    for i, e in enumerate(_system(a, unit)):
        if e.is_zero():
            continue
        piece = a.scale(e)
        if i == 0:
            head, swap = 1, Mat.scalar(m, e)
        else:
            head = 2
            swap = perm_matrix(Perm.transposition(m, 2, i + 1), a.ring).scale(e)
        moved = swap @ piece @ swap
        for r in range(head):
            for s in range(head, m):
                if not (moved[r, s].is_zero() and moved[s, r].is_zero()):
                    raise ShapeError("leading block does not split off", witness={"row": r + 1, "col": s + 1})
        if head == m:
            branches.append((e, swap, [head]))
            continue
        rest = submatrix(moved, list(range(head, m)))
        for delta, sub, sizes in _recurse(rest, e):
            conj = direct_sum(Mat.scalar(head, delta), sub) @ swap.scale(delta)
            branches.append((delta, conj, [head] + sizes))
    return branches


def _front_loading_perm(sizes: list[int]) -> Perm:
    """Permutation moving the 2x2 blocks ahead of the 1x1 blocks, keeping order."""
    starts, pos = [], 1
    for s in sizes:
        starts.append(pos)
        pos += s
    order = [i for i, s in enumerate(sizes) if s == 2] + [i for i, s in enumerate(sizes) if s == 1]
    images = [0] * sum(sizes)
    new = 1
    for b in order:
        for off in range(sizes[b]):
            images[starts[b] + off - 1] = new
            new += 1
    return Perm(tuple(images))


def _layout_sizes(pairs: int, n: int) -> tuple:
    return (2,) * pairs + (1,) * (n - 2 * pairs)


def _check_block_form(result: Mat, sizes: tuple) -> None:
    pos = 0
    allowed = set()
    for s in sizes:
        allowed.update((pos + r, pos + t) for r in range(s) for t in range(s))
        pos += s
    for c in result.comps:
        for i in range(result.n):
            for j in range(result.n):
                if c[i][j] != 0 and (i, j) not in allowed:
                    raise ShapeError("conjugated matrix is not block diagonal",
                                     witness={"row": i + 1, "col": j + 1})


def block_diagonalize(a: Mat) -> BlockDiagForm:
    """Conjugate an involution of Gamma_n(R) to blocks of size <= 2, 2x2 blocks first."""
    require_involution(a)
    parts = []
    most_pairs = 0
    for delta, conj, sizes in _recurse(a, a.ring.one):
        most_pairs = max(most_pairs, sizes.count(2))
        reorder = perm_matrix(_front_loading_perm(sizes), a.ring)
        parts.append((reorder @ conj).scale(delta))
    conjugator = parts[0]
    for p in parts[1:]:
        conjugator = conjugator + p
    result = conjugator @ a @ conjugator.inverse()
    sizes = _layout_sizes(most_pairs, a.n)
    _check_block_form(result, sizes)
    return BlockDiagForm(conjugator, result, sizes)


# -- per-component route --------------------------------------------------------


def _monomial_pairing(comp) -> tuple[list[tuple[int, int]], list[int]]:
    n = len(comp)
    support = []
    for j in range(n):
        rows = [i for i in range(n) if comp[i][j] != 0]
        if len(rows) != 1:
            raise PreconditionError("component is not monomial")
        support.append(rows[0])
    pairs = sorted((j, support[j]) for j in range(n) if support[j] > j)
    fixed = [j for j in range(n) if support[j] == j]
    return pairs, fixed


def _canonical_component(comp, pairs, fixed):
    """Monomial conjugator sending pairs to (1,2),(3,4),... with unit first columns."""
    n = len(comp)
    out = [[ZERO] * n for _ in range(n)]
    pos = 0
    for i, j in sorted(pairs):
        out[pos][i] = ONE
        out[pos + 1][j] = ONE / comp[j][i]
        pos += 2
    for i in sorted(fixed):
        out[pos][i] = ONE
        pos += 1
    return tuple(tuple(row) for row in out)


def block_diagonalize_monomial(a: Mat) -> BlockDiagForm:
    """Cycle pairing in each Q-factor; the conjugator is already canonical."""
    require_involution(a)
    comps = []
    most_pairs = 0
    for comp in a.comps:
        pairs, fixed = _monomial_pairing(comp)
        most_pairs = max(most_pairs, len(pairs))
        comps.append(_canonical_component(comp, pairs, fixed))
    conjugator = Mat(a.n, tuple(comps))
    result = conjugator @ a @ conjugator.inverse()
    sizes = _layout_sizes(most_pairs, a.n)
    _check_block_form(result, sizes)
    return BlockDiagForm(conjugator, result, sizes)


def canonical_conjugator(conjugator: Mat, a: Mat) -> Mat:
    """Normal form of a block-diagonalizing conjugator of ``a``.

    Reads off which original indices ``conjugator`` pairs into 2x2 blocks,
    then rebuilds the unique conjugator that lists the pairs by smallest
    index, keeps the fixed points in ascending order and puts 1 in the
    column of each orbit's smallest index.
    """
    result = conjugator @ a @ conjugator.inverse()
    comps = []
    for cc, rc, ac in zip(conjugator.comps, result.comps, a.comps):
        n = len(cc)
        origin = {}
        for j in range(n):
            rows = [i for i in range(n) if cc[i][j] != 0]
            if len(rows) != 1:
                raise ShapeError("conjugator is not monomial in some component")
            origin[rows[0]] = j
        pairs, fixed, seen = [], [], set()
        for p in range(n):
            if p in seen:
                continue
            partner = next((q for q in range(n) if q != p and rc[p][q] != 0), None)
            if partner is None:
                fixed.append(origin[p])
                seen.add(p)
            else:
                pairs.append(tuple(sorted((origin[p], origin[partner]))))
                seen.update((p, partner))
        comps.append(_canonical_component(ac, pairs, fixed))
    return Mat(a.n, tuple(comps))


def _lemma_shape(tau: Perm) -> int:
    cycles = tau.cycles()
    if any(c != (2 * r + 1, 2 * r + 2) for r, c in enumerate(cycles)):
        raise ShapeError(f"target {tau.format_cycles()} is not of the form (1,2)(3,4)...")
    return len(cycles)


def involution_to_scaled_perm(a: Mat, tau: Perm) -> tuple[Mat, RingElem]:
    """Find M in Gamma_n(R) and an involution b >= 0 with M·a·M⁻¹ = b·S_tau."""
    if tau.n != a.n:
        raise ShapeError(f"target permutation has degree {tau.n}, matrix has n={a.n}")
    m = _lemma_shape(tau)
    form = block_diagonalize(a)
    res = form.result
    ring = a.ring
    if form.block_sizes.count(2) > m:
        raise ShapeError("involution has more 2-cycles than the target",
                         witness={"block": m + 1})
    scales = []
    for r in range(m):
        p, q = 2 * r, 2 * r + 1
        if not (res[p, p].is_zero() and res[q, q].is_zero()):
            raise ShapeError("2x2 block has a nonzero diagonal", witness={"block": r + 1})
        scales.append(res[p, q])
    tail = [res[i, i] for i in range(2 * m, a.n)]
    b = tail[0] if tail else ring.one
    if any(t != b for t in tail):
        raise ShapeError("fixed points carry different scalars", witness=[t.to_json() for t in tail])
    if not (b * b == ring.one and b.is_nonneg()):
        raise ShapeError("scalar on the fixed points is not a nonnegative involution",
                         witness=b.to_json())
    diag = []
    for x in scales:
        diag += [ring.one, x * b]
    diag += [ring.one] * (a.n - 2 * m)
    conj = normalize_central(Mat.diag(diag) @ form.conjugator)
    target = perm_matrix(tau, ring).scale(b)
    if conj @ a @ conj.inverse() != target:
        raise ShapeError("conjugation did not reach b·S_tau", witness=(conj @ a @ conj.inverse()).to_json())
    return conj, b


def scaled_monomial_target(a: Mat) -> Mat:
    """``S_{tau_c}`` per component, ``tau_c`` pairing (1,2),(3,4),... as often as ``a`` has 2-cycles."""
    comps = []
    for comp in a.comps:
        pairs, fixed = _monomial_pairing(comp)
        n = len(comp)
        rows = [[ZERO] * n for _ in range(n)]
        for r in range(len(pairs)):
            rows[2 * r][2 * r + 1] = rows[2 * r + 1][2 * r] = ONE
        for i in range(2 * len(pairs), n):
            rows[i][i] = comp[fixed[0]][fixed[0]] if fixed else mpq(1)
        comps.append(tuple(tuple(r) for r in rows))
    return Mat(a.n, tuple(comps))
