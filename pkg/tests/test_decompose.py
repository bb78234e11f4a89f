import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from ordmat import gen
from ordmat.autom import (Automorphism, AutomorphismSpec, Homothety, HomothetySpec, Inner, RingMap,
                          make_automorphism)
from ordmat.decompose import (decompose, default_probes, extract_central_data, extract_ring_automorphism,
                              normalize_permutation_images, parse_decomposition, verify_decomposition)
from ordmat.errors import NotAnAutomorphism, PipelineOrderError
from ordmat.matgroup import Mat, Perm, eval_word, perm_matrix, transvection
from ordmat.ring import RingAutomorphism, RingDescriptor

from conftest import Q, Q2, gamma_of, seeds, word_of

SWAP = RingAutomorphism((1, 0))


def auto(ring, n, *factors):
    return make_automorphism(AutomorphismSpec(ring, n, tuple(factors)))


def s(n, ring, *cycles):
    return perm_matrix(Perm.from_cycles(n, *cycles), ring)


@pytest.mark.parametrize("ring,n", [(Q, 3), (Q2, 4), (Q, 5)])
def test_identity_decomposes_trivially(ring, n):
    d = decompose(auto(ring, n))
    assert d.inner.is_identity()
    assert d.ring_map.is_identity()
    assert d.homothety.is_trivial()
    assert d.alpha == ring.one


def test_stage_one_on_inner_monomial():
    p = gamma_of(5, Q, 12)
    m1, alpha = normalize_permutation_images(auto(Q, 5, Inner(p)))
    assert (m1 @ p).is_scalar()
    assert alpha == Q.one


def test_stage_one_on_component_mixed_conjugator():
    e = Q2.elem([1, 0])
    cyc = perm_matrix(Perm((2, 3, 1)), Q2) @ Mat.diag([Q2.one, Q2.scalar(3), Q2.scalar(mpq(1, 2))])
    mixed = cyc.scale(e) + Mat.identity(3, Q2).scale(Q2.one - e)
    phi = auto(Q2, 3, Inner(mixed))
    m1, _ = normalize_permutation_images(phi)
    for cycles in [((1, 2),), ((2, 3),)]:
        sm = s(3, Q2, *cycles)
        assert m1 @ phi.apply(sm) @ m1.inverse() == sm


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
def test_stage_one_routes_agree_over_q3(n):
    ring = RingDescriptor(3)
    phi = auto(ring, n, Inner(gamma_of(n, ring, n)))
    m1, _ = normalize_permutation_images(phi)
    assert (m1 @ gamma_of(n, ring, n)).is_scalar()


def test_ring_map_stage():
    phi = auto(Q2, 3, RingMap(SWAP))
    assert extract_ring_automorphism(phi, 3, Q2).c == SWAP
    assert extract_ring_automorphism(auto(Q, 3), 3, Q).c.is_identity()


def test_ring_map_stage_needs_stage_one():
    phi = auto(Q, 3, Inner(s(3, Q, (1, 2, 3))))
    with pytest.raises(PipelineOrderError):
        extract_ring_automorphism(phi, 3, Q)


def test_central_stage_reads_abs_det():
    data = extract_central_data(auto(Q, 3, Homothety(HomothetySpec.abs_det(1))), 3, Q)
    assert data.homothety.t == (1,)
    table = dict((u, g) for u, g in data.gamma_table)
    assert table["2"] == "2" and table["3"] == "3" and table["1/2"] == "1/2"


def test_abs_det_homothety_decomposition():
    phi = auto(Q, 3, Homothety(HomothetySpec.abs_det(1)))
    d = decompose(phi)
    assert d.inner.is_identity() and d.homothety.t == (1,)
    for w in default_probes(3, Q)[:30]:
        x = eval_word(w)
        assert d.homothety.lam(x) == x.det().abs()


def test_spec_round_trip_example():
    m0 = gamma_of(4, Q2, 21)
    phi = auto(Q2, 4, Inner(m0), RingMap(SWAP), Homothety(HomothetySpec((1, 1), (0, 0))))
    d = decompose(phi, probe_words=[word_of(4, Q2, i) for i in range(50)])
    assert d.ring_map == SWAP
    assert (d.inner @ m0.inverse()).is_scalar()
    assert d.homothety.t == (1, 1)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(Q, 3), (Q, 4), (Q, 6), (Q2, 3), (Q2, 5)]), seeds)
def test_round_trip_property(shape, seed):
    ring, n = shape
    spec = gen.automorphism(n, ring, random.Random(seed))
    phi = make_automorphism(spec)
    d = decompose(phi, seed=seed)
    assert d.transcript["verification"]["failed"] == 0
    m_inj = spec.factors[0].m
    assert (d.inner @ m_inj.inverse()).is_scalar()
    assert d.ring_map == spec.factors[1].c
    assert d.homothety.t == spec.factors[2].h.t


def test_decompositions_agree_up_to_center():
    spec = gen.automorphism(4, Q2, random.Random(3))
    phi = make_automorphism(spec)
    a = decompose(phi, seed=1)
    b = decompose(make_automorphism(spec), seed=2)
    assert (a.inner @ b.inner.inverse()).is_scalar()


def test_non_gamma_conjugation_rejected_with_witness():
    b = transvection(3, 1, 2, Q.one)
    b_inv = b.inverse()
    bad = Automorphism.from_callable(lambda x: b @ x @ b_inv, 3, Q)
    with pytest.raises(NotAnAutomorphism) as info:
        decompose(bad)
    assert info.value.stage == "normalize_permutation_images"
    assert info.value.witness["negative_entry"]["value"] == "-1"


def test_perturbed_inner_matrix_fails_verification():
    phi = auto(Q, 4, Inner(gamma_of(4, Q, 8)))
    d = decompose(phi)
    rows = d.inner.rows()
    i, j = next((i, j) for i in range(1, 4) for j in range(4) if not rows[i][j].is_zero())
    rows[i][j] = rows[i][j] * Q.scalar(2)
    d.inner = Mat.from_rows(rows)
    report = verify_decomposition(phi, d, default_probes(4, Q))
    assert not report.passed
    assert any(w["pass"] is False and any("perm" in letter for letter in w["word"]) for w in report.results)


def test_empty_word_list_is_vacuous():
    phi = auto(Q, 3)
    report = verify_decomposition(phi, decompose(phi), [])
    assert report.passed and report.warnings


def _swap_primes(q):
    """Multiplicative map on positive rationals exchanging the primes 2 and 3."""
    out = mpq(1)
    for part, sgn in ((int(q.numerator), 1), (int(q.denominator), -1)):
        for p, image in ((2, 3), (3, 2)):
            while part % p == 0:
                part //= p
                out *= mpq(image) ** sgn
        out *= mpq(part) ** sgn
    return out


def test_non_determinant_character_returns_table_only():
    def omega(x):
        d = x.det().comps[0]
        return x.scale(Q.scalar(_swap_primes(abs(d))))

    phi = Automorphism.from_callable(omega, 3, Q)
    d = decompose(phi)
    assert d.homothety is None and d.warnings
    assert ["2", "3"] in d.gamma_table


def test_decomposition_json_round_trip():
    phi = make_automorphism(gen.automorphism(3, Q2, random.Random(4)))
    d = decompose(phi)
    again = parse_decomposition(d.to_json())
    assert again.inner == d.inner and again.ring_map == d.ring_map and again.homothety == d.homothety
    assert verify_decomposition(phi, again, default_probes(3, Q2)).passed


def test_default_probe_suite_size():
    for ring, n in [(Q, 3), (Q, 7), (Q2, 4)]:
        words = default_probes(n, ring)
        assert len(words) >= 60
        assert sum(1 for w in words if len(w.letters) == 1 and "perm" in w.to_json()[0]) >= n - 1
