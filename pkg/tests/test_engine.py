import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import P, Q, oracle_bracket
from thinlie.engine import (DegreeOverflowError, GradedAlgebra, validate)
from thinlie.gf import lucas_binom, vec_is_zero, vec_scale
from thinlie.maxclass import build_maxclass, metabelian_sequence
from thinlie.patterns import compile_pattern, family_pattern


@pytest.fixture(scope="module")
def n7():
    pat = family_pattern("a", P, Q, 100)
    L, rep = compile_pattern(pat, 60)
    assert rep.ok
    return L


@pytest.fixture(scope="module")
def case_e():
    pat = family_pattern("e", P, Q, 100)
    L, rep = compile_pattern(pat, 60)
    assert rep.ok
    return L


def test_bracket_alternating(n7):
    for e in n7.elements:
        if 2 * e.degree <= n7.N_built:
            u = n7.as_element(e.gid)
            assert vec_is_zero(n7.bracket(u, u)[1])


def test_second_diamond_relation_via_bracket(n7):
    # [v1y, x] = -2 [v1x, y] in L_8
    v1y = n7.eval_word("y" + "x" * 5 + "y")
    v1x = n7.eval_word("y" + "x" * 6)
    x = n7.as_element(n7.gid(1, 0))
    y = n7.as_element(n7.gid(1, 1))
    lhs = n7.bracket(v1y, x)
    rhs = n7.bracket(v1x, y)
    assert lhs[1] == vec_scale(-2, rhs[1], P)


def test_bracket_against_word_expansion_oracle(n7):
    # every basis pair with degree sum <= 20, plus the (5, 9) pairs
    pairs = [(e1, e2) for e1 in n7.elements for e2 in n7.elements
             if e1.degree + e2.degree <= 20]
    pairs += [(e1, e2) for e1 in n7.elements if e1.degree == 5
              for e2 in n7.elements if e2.degree == 9]
    for e1, e2 in pairs:
        got = n7.bracket(n7.as_element(e1.gid), n7.as_element(e2.gid))
        want = oracle_bracket(n7, n7.as_element(e1.gid), e2.word)
        assert got == want, (e1.word, e2.word)


def test_generalized_jacobi_identity(n7):
    # [a, [b x^n]] = sum (-1)^i C(n,i) [a x^i b x^{n-i}] for chain words
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 5)
        a_deg = rng.randint(1, 8)
        a = n7.as_element(n7.gid(a_deg, rng.randrange(n7.dim(a_deg))))
        b_deg = rng.randint(1, 6)
        b = n7.elements[n7.gid(b_deg, rng.randrange(n7.dim(b_deg)))]
        v = n7.apply_word(n7.as_element(b.gid), "x" * n)
        lhs = n7.bracket(a, v)
        acc = (lhs[0], (0,) * len(lhs[1]))
        for i in range(n + 1):
            c = lucas_binom(n, i, P)
            if i % 2:
                c = P - c
            t = n7.bracket(n7.apply_word(a, "x" * i), n7.as_element(b.gid))
            t = n7.apply_word(t, "x" * (n - i))
            acc = (acc[0], tuple((x + c * y) % P
                                 for x, y in zip(acc[1], t[1])))
        assert lhs == acc


_shared = {}


def _shared_n7():
    if "L" not in _shared:
        pat = family_pattern("a", P, Q, 100)
        _shared["L"], _ = compile_pattern(pat, 60, run_validation=False)
    return _shared["L"]


@given(st.data())
@settings(max_examples=120, deadline=None)
def test_bracket_bilinear_antisymmetric_random(data):
    L = _shared_n7()
    du = data.draw(st.integers(1, 25))
    dv = data.draw(st.integers(1, 25))
    coeff = st.integers(0, P - 1)
    u = (du, tuple(data.draw(coeff) for _ in range(L.dim(du))))
    v = (dv, tuple(data.draw(coeff) for _ in range(L.dim(dv))))
    w = (dv, tuple(data.draw(coeff) for _ in range(L.dim(dv))))
    c = data.draw(coeff)
    uv = L.bracket(u, v)
    # antisymmetry
    vu = L.bracket(v, u)
    assert uv[1] == tuple((-a) % P for a in vu[1])
    # bilinearity in the second slot: [u, c v + w] = c [u, v] + [u, w]
    cvw = (dv, tuple((c * a + b) % P for a, b in zip(v[1], w[1])))
    lhs = L.bracket(u, cvw)
    uw = L.bracket(u, w)
    assert lhs[1] == tuple((c * a + b) % P for a, b in zip(uv[1], uw[1]))


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_jacobi_random_elements(data):
    L = _shared_n7()
    degs = [data.draw(st.integers(1, 18)) for _ in range(3)]
    elems = [(d, tuple(data.draw(st.integers(0, P - 1))
                       for _ in range(L.dim(d)))) for d in degs]
    a, b, c = elems
    s = L.bracket(L.bracket(a, b), c)
    s2 = L.bracket(L.bracket(b, c), a)
    s3 = L.bracket(L.bracket(c, a), b)
    total = tuple((x + y + z) % P for x, y, z in zip(s[1], s2[1], s3[1]))
    assert all(t == 0 for t in total)


def test_validate_passes_on_families(n7, case_e):
    assert validate(n7).ok
    assert validate(case_e).ok


def test_corrupted_ad_matrix_fails_jacobi(n7):
    ad_x = [None if rows is None else [list(r) for r in rows]
            for rows in n7.ad["x"]]
    ad_x[20][0][0] = (ad_x[20][0][0] + 1) % P
    bad = GradedAlgebra(n7.field, n7.elements, n7.comp_gids,
                        [rows if rows is None else tuple(tuple(r) for r in rows)
                         for rows in ad_x],
                        n7.ad["y"], N=n7.N, q=n7.q)
    rep = validate(bad, checks=("jacobi",))
    assert not rep.ok
    assert rep.failures()[0].witnesses  # carries a witness triple


def test_corrupted_sandwich_and_covering_detected(n7):
    # break ad_y on a mid chain component: the sandwich or covering checks
    # (not only Jacobi) must notice
    ad_y = [None if rows is None else [list(r) for r in rows]
            for rows in n7.ad["y"]]
    ad_y[5][0][0] = 1     # followed by the nonzero ad_y into the diamond
    bad = GradedAlgebra(n7.field, n7.elements, n7.comp_gids, n7.ad["x"],
                        [rows if rows is None else tuple(tuple(r) for r in rows)
                         for rows in ad_y],
                        N=n7.N, q=n7.q)
    rep = validate(bad, checks=("sandwich_y",))
    assert not rep.ok
    ad_x = [None if rows is None else [list(r) for r in rows]
            for rows in n7.ad["x"]]
    ad_x[20][0] = [0]
    bad2 = GradedAlgebra(n7.field, n7.elements, n7.comp_gids,
                         [rows if rows is None else tuple(tuple(r) for r in rows)
                          for rows in ad_x],
                         n7.ad["y"], N=n7.N, q=n7.q)
    rep2 = validate(bad2, checks=("covering",))
    assert not rep2.ok and rep2.failures()[0].witnesses


def test_support(n7):
    supp = n7.support()
    assert {(1, 0), (0, 1)} <= supp
    for i in range(1, 6):
        assert (i, 1) in supp            # degrees 2..6
    assert (6, 1) in supp and (5, 2) in supp   # the second diamond
    assert (4, 2) not in supp


def test_dims(n7):
    d = n7.dims()
    assert d[0] == 2
    assert all(d[k - 1] == (2 if k % 6 == 1 else 1) for k in range(2, 61))


def test_centralizer_examples(n7):
    assert n7.centralizer_in_L1(3) == [(0, 1)]      # span{y}
    assert n7.centralizer_in_L1(6) == []            # pre-diamond
    pat = family_pattern("uniqueness", P, Q, 140, s=1)
    L, _ = compile_pattern(pat, 95, run_validation=False)
    assert L.centralizer_in_L1(85) == [(1, 0)]      # span{x} at the fake


def test_centralizer_at_diamond_is_trivial(n7):
    assert n7.centralizer_in_L1(7) == []


def test_ad_power_operator(n7):
    assert n7.ad_power_operator((0, 1), 2).is_zero()     # sandwich
    assert n7.ad_power_operator((1, 0), Q).is_zero()     # (ad x)^q
    pat49 = family_pattern("a", P, 49, 120)
    L49, _ = compile_pattern(pat49, 60, run_validation=False)
    op = L49.ad_power_operator((1, 0), P)
    u = L49.eval_word("y" + "x" * (P - 1))
    img = op.apply(u)
    assert not vec_is_zero(img[1])
    assert img == L49.eval_word("y" + "x" * (2 * P - 1))


def test_coclass_excess(n7):
    expected = sum(1 for k in range(1, 61) if k == 1 or k % 6 == 1)
    assert expected == 10
    assert n7.coclass_excess() == 10
    patL1 = family_pattern("L1q", P, Q, 100)
    L1, _ = compile_pattern(patL1, 60, run_validation=False)
    assert L1.coclass_excess() == 2
    M = build_maxclass(metabelian_sequence(P, 70), 60)
    assert M.algebra.coclass_excess() == 1


def test_degree_overflow_raises(n7):
    u = n7.as_element(n7.gid(40, 0))
    with pytest.raises(DegreeOverflowError):
        n7.bracket(u, u)
    with pytest.raises(DegreeOverflowError):
        n7.apply_word(u, "x" * 40)


def test_memo_coherence(n7):
    # memoized values equal a fresh recomputation on an identical algebra
    pat = family_pattern("a", P, Q, 100)
    fresh, _ = compile_pattern(pat, 60, run_validation=False)
    for e1 in n7.elements:
        for e2 in n7.elements:
            if e1.degree + e2.degree <= 30:
                assert n7.bracket_basis(e1.gid, e2.gid) == \
                    fresh.bracket_basis(e1.gid, e2.gid)
    # and asking twice gives the same object content
    g1, g2 = n7.gid(5, 0), n7.gid(9, 0)
    assert n7.bracket_basis(g1, g2) == n7.bracket_basis(g1, g2)


def test_precompute_brackets(n7):
    pat = family_pattern("a", P, Q, 60)
    fresh, _ = compile_pattern(pat, 30, run_validation=False)
    fresh.precompute_brackets(25)
    pairs = [(e1, e2) for e1 in fresh.elements for e2 in fresh.elements
             if e1.degree + e2.degree <= 25]
    assert all((e1.gid, e2.gid) in fresh._memo for e1, e2 in pairs)


def test_word_reproduction(n7):
    for e in n7.elements:
        assert n7.eval_word(e.word) == n7.as_element(e.gid)


def test_bidegree_additivity_spot(n7):
    for e1 in n7.elements[:40]:
        for e2 in n7.elements[:40]:
            if e1.degree + e2.degree > 40:
                continue
            w = n7.bracket_basis(e1.gid, e2.gid)
            tgt = n7.basis(e1.degree + e2.degree)
            want = (e1.bidegree[0] + e2.bidegree[0],
                    e1.bidegree[1] + e2.bidegree[1])
            for s, c in enumerate(w):
                if c:
                    assert tgt[s].bidegree == want


def test_support_argument_soundness(n7):
    supp = n7.support()
    for e1 in n7.elements:
        for e2 in n7.elements:
            if e1.degree + e2.degree > 40:
                continue
            want = (e1.bidegree[0] + e2.bidegree[0],
                    e1.bidegree[1] + e2.bidegree[1])
            if want not in supp:
                assert vec_is_zero(n7.bracket_basis(e1.gid, e2.gid))


def test_structure_json(n7):
    doc = n7.to_structure_json()
    assert doc["schema"] == "thinlie.structure.v1"
    assert doc["p"] == P and doc["q"] == Q and doc["N"] == 60
    assert len(doc["components"]) == 60
    assert doc["components"][0] == {"degree": 1, "dims": 2,
                                    "basis_words": ["x", "y"],
                                    "bidegrees": [[1, 0], [0, 1]]}
    assert len(doc["ad_x"]) == 59
    assert all(len(b["coeffs"]) >= 1 for b in doc["brackets"])


def test_operator_family_algebra(n7):
    adx = n7.ad_operator((1, 0))
    ady = n7.ad_operator((0, 1))
    u = n7.as_element(n7.gid(3, 0))
    assert adx.then(ady).apply(u) == n7.apply_word(u, "xy")
    comm = adx.op_bracket(ady)
    # [u, [x, y]] = (ad_y ad_x - ad_x ad_y)(u) under the right-action rule
    got = comm.apply(u)
    want = n7.bracket(u, n7.bracket(n7.as_element(n7.gid(1, 0)),
                                    n7.as_element(n7.gid(1, 1))))
    assert got == want
