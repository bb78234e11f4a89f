import random

import pytest
from hypothesis import given, settings, strategies as st

from ordmat import gen
from ordmat.autom import (Automorphism, AutomorphismSpec, Homothety, HomothetySpec, Inner, RingMap,
                          apply, make_automorphism, parse_automorphism_spec, sample_check_automorphism)
from ordmat.errors import ConstructionError, DomainError
from ordmat.matgroup import Mat, Perm, eval_word, is_member, perm_matrix, transvection
from ordmat.ring import RingAutomorphism

from conftest import Q, Q2, gamma_of, seeds, word_of

SWAP = RingAutomorphism((1, 0))


def auto(ring, n, *factors):
    return make_automorphism(AutomorphismSpec(ring, n, tuple(factors)))


def test_empty_factor_list_is_identity():
    phi = auto(Q2, 3)
    x = eval_word(word_of(3, Q2, 1))
    assert apply(phi, x) == x


def test_inner_example():
    phi = auto(Q, 3, Inner(Mat.diag([Q.scalar(2), Q.one, Q.one])))
    assert phi.apply(transvection(3, 1, 2, Q.one)) == transvection(3, 1, 2, Q.scalar(2))


def test_ring_map_example():
    phi = auto(Q2, 2, RingMap(SWAP))
    x = Mat.diag([Q2.elem([1, 2]), Q2.one])
    assert phi.apply(x) == Mat.diag([Q2.elem([2, 1]), Q2.one])


def test_abs_det_homothety_examples():
    phi = auto(Q, 3, Homothety(HomothetySpec.abs_det(1)))
    assert phi.apply(Mat.diag([Q.scalar(2), Q.one, Q.one])) == Mat.diag([Q.scalar(4), Q.scalar(2), Q.scalar(2)])
    s12 = perm_matrix(Perm((2, 1, 3)), Q)
    assert phi.apply(s12) == s12


def test_factors_apply_right_to_left():
    m = Mat.diag([Q2.elem([2, 3]), Q2.one])
    x = Mat.diag([Q2.one, Q2.elem([5, 7])])
    phi = auto(Q2, 2, Inner(m), RingMap(SWAP))
    assert phi.apply(x) == m @ x.apply_ring_map(SWAP) @ m.inverse()


def test_domain_is_checked():
    phi = auto(Q, 2)
    with pytest.raises(DomainError):
        phi.apply(Mat.diag([Q.one, Q.scalar(-1)]))
    with pytest.raises(DomainError):
        phi.apply(Mat.identity(3, Q))


def test_construction_validation():
    with pytest.raises(ConstructionError):
        auto(Q, 3, Inner(transvection(3, 1, 2, Q.one)))
    with pytest.raises(ConstructionError):
        auto(Q2, 3, Homothety(HomothetySpec((1,), (0,))))
    with pytest.raises(ConstructionError):
        auto(Q, 3, Homothety(HomothetySpec((1,), (2,))))
    with pytest.raises(ConstructionError):
        auto(Q, 3, Homothety(HomothetySpec((0,), (1,), Q.scalar(-1))))
    with pytest.raises(ConstructionError):
        auto(Q2, 3, RingMap(RingAutomorphism((0,))))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([Q, Q2]), st.integers(2, 5), seeds)
def test_homothety_is_multiplicative(ring, n, seed):
    rng = random.Random(seed)
    h = gen.homothety(ring, rng)
    x, y = (eval_word(word_of(n, ring, rng.randrange(2**32))) for _ in range(2))
    assert h.lam(x @ y) == h.lam(x) * h.lam(y)
    assert h(x @ y) == h(x) @ h(y)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), seeds, seeds)
def test_inner_composition_law(n, s1, s2):
    m, k = gamma_of(n, Q2, s1), gamma_of(n, Q2, s2)
    x = eval_word(word_of(n, Q2, s1 ^ s2))
    assert auto(Q2, n, Inner(m), Inner(k)).apply(x) == auto(Q2, n, Inner(m @ k)).apply(x)


@given(st.integers(2, 6), seeds)
def test_ring_maps_fix_permutation_matrices(n, seed):
    images = list(range(1, n + 1))
    random.Random(seed).shuffle(images)
    sm = perm_matrix(Perm(tuple(images)), Q2)
    assert auto(Q2, n, RingMap(SWAP)).apply(sm) == sm


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([Q, Q2]), st.integers(2, 5), seeds)
def test_random_composites_preserve_nonnegativity(ring, n, seed):
    rng = random.Random(seed)
    phi = make_automorphism(gen.automorphism(n, ring, rng))
    for _ in range(5):
        assert is_member(phi.apply(eval_word(word_of(n, ring, rng.randrange(2**32)))), "Gn")


def test_sample_check_passes_for_inner_monomial():
    m = gamma_of(5, Q, 4)
    phi = auto(Q, 5, Inner(m))
    words = [word_of(5, Q, i) for i in range(50)]
    report = sample_check_automorphism(phi, words, seed=1)
    assert report.passed, report.failures
    assert report.checks["Dn"] == 50


def test_sample_check_flags_non_bijective_homothety():
    phi = auto(Q, 3, Homothety(HomothetySpec.abs_det(1)))
    report = sample_check_automorphism(phi, [word_of(3, Q, i) for i in range(10)])
    assert report.passed
    assert report.warnings


def test_sample_check_catches_non_gamma_conjugation():
    b = transvection(4, 1, 2, Q.one)
    b_inv = b.inverse()
    bad = Automorphism.from_callable(lambda x: b @ x @ b_inv, 4, Q)
    report = sample_check_automorphism(bad, [word_of(4, Q, i) for i in range(30)], seed=0)
    assert not report.passed
    failure = next(f for f in report.failures if f["law"] == "Gn")
    assert failure["negative_entry"]["value"].startswith("-")


def test_spec_json_round_trip():
    spec = gen.automorphism(3, Q2, random.Random(7))
    again = parse_automorphism_spec(spec.to_json())
    assert again.to_json() == spec.to_json()
    x = eval_word(word_of(3, Q2, 2))
    assert make_automorphism(again).apply(x) == make_automorphism(spec).apply(x)


def test_spec_json_example_shape():
    data = {"factors": [{"inner": Mat.identity(2, Q2).to_json()}, {"ring_map": "swap"},
                        {"homothety": {"t": [1, 0], "sign": [0, 0]}}]}
    spec = parse_automorphism_spec(data, Q2)
    assert spec.n == 2 and [type(f) for f in spec.factors] == [Inner, RingMap, Homothety]
    x = Mat.diag([Q2.elem([2, 3]), Q2.one])
    assert make_automorphism(spec).apply(x) == Mat.diag([Q2.elem([3, 4]), Q2.elem([1, 2])])
