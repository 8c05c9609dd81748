import json
import pathlib

import pytest

from helpers import P, Q, backbone_sequence
from thinlie.constructions import (ConstructionError, DividedPowerAlgebra,
                                   deflate, divided_power_product,
                                   nottingham_Nqr, tensor_construct)
from thinlie.gf import vec_scale
from thinlie.maxclass import (build_maxclass, extract_centralizer_sequence,
                              metabelian_sequence)
from thinlie.patterns import (classify_regularity, compile_pattern, detect,
                              family_pattern)

GOLDEN = pathlib.Path(__file__).parent / "golden"


def test_divided_power_examples():
    assert divided_power_product(1, 1, 7, 7) == (2, 2)
    for j in range(7):
        assert divided_power_product(0, j, 7, 7) == (1, j)
    # C(8,3) = 56 = 0 mod 7 and the index 8 exceeds q-1: zero either way
    assert 56 % 7 == 0
    assert divided_power_product(3, 5, 7, 7) is None
    with pytest.raises(ValueError):
        divided_power_product(7, 0, 7, 7)


@pytest.mark.parametrize("q", [7, 49])
def test_divided_power_algebra_axioms(q):
    A = DividedPowerAlgebra(q, 7)

    def as_pair(r):
        return (0, None) if r is None else r

    # commutativity and associativity, exhaustively
    for i in range(q):
        for j in range(q):
            assert A.product(i, j) == A.product(j, i)
    for i in range(0, q, max(1, q // 12)):
        for j in range(q):
            for k in range(q):
                left = A.product(i, j)
                lhs = (0, None) if left is None else \
                    ((0, None) if A.product(left[1], k) is None else
                     (left[0] * A.product(left[1], k)[0] % 7,
                      A.product(left[1], k)[1]))
                right = A.product(j, k)
                rhs = (0, None) if right is None else \
                    ((0, None) if A.product(i, right[1]) is None else
                     (right[0] * A.product(i, right[1])[0] % 7,
                      A.product(i, right[1])[1]))
                if lhs[0] == 0:
                    lhs = (0, None)
                if rhs[0] == 0:
                    rhs = (0, None)
                assert lhs == rhs, (i, j, k)


def test_truncation_consistency():
    # C(i+j, i) = 0 mod p whenever q <= i+j <= 2q-2, so killing high terms
    # is compatible with the multiplication rule
    from thinlie.gf import lucas_binom
    for q in (7, 49):
        for i in range(q):
            for j in range(q):
                if q <= i + j <= 2 * q - 2:
                    assert lucas_binom(i + j, i, 7) == 0


@pytest.mark.parametrize("q", [7, 49])
def test_derivation_leibniz(q):
    A = DividedPowerAlgebra(q, 7)
    # d(e_i e_j) = d(e_i) e_j + e_i d(e_j) on all basis pairs, computed in
    # coordinates {index: coeff}
    for i in range(q):
        for j in range(q):
            prod = A.product(i, j)
            lhs = {}
            if prod is not None and A.derive(prod[1]) is not None:
                lhs = {A.derive(prod[1]): prod[0] % 7}
            rhs = {}
            for a, bb in ((A.derive(i), j), (A.derive(j), i)):
                if a is None:
                    continue
                r = A.product(a, bb)
                if r is not None:
                    rhs[r[1]] = (rhs.get(r[1], 0) + r[0]) % 7
            rhs = {k: v for k, v in rhs.items() if v}
            assert lhs == rhs, (i, j)


@pytest.fixture(scope="module")
def t72_metabelian():
    M = build_maxclass(metabelian_sequence(P, 40), 30)
    return tensor_construct(M, Q, 100)


def test_tensor_v1_ambient(t72_metabelian):
    tc = t72_metabelian
    L, Ma = tc.algebra, tc.maxclass.algebra
    gid_v1 = L.gid(Q - 1, 0)
    assert L.elements[gid_v1].word == "y" + "x" * (Q - 2)
    assert tc.ambient[gid_v1] == {("e", Ma.gid(1, 0), 0): 1,
                                  ("e", Ma.gid(1, 1), 1): 1}


def test_tensor_v1y_coefficient(t72_metabelian):
    tc = t72_metabelian
    L, Ma = tc.algebra, tc.maxclass.algebra
    (leg,) = [g for g in L.comp_gids[Q]
              if L.elements[g].word.endswith("y")]
    assert tc.ambient[leg] == {("e", Ma.gid(2, 0), Q - 1): (-2) % P}


def test_tensor_detects_as_all_infinite(t72_metabelian):
    tc = t72_metabelian
    assert tc.report.ok
    pat, rep = detect(tc.algebra)
    assert rep.ok
    want = family_pattern("e", P, Q, 100)
    assert pat.entries == want.truncate(100).entries
    assert classify_regularity(tc.algebra).regular


def test_tensor_matches_sequence_pattern():
    seq = backbone_sequence(30)
    M = build_maxclass(seq, 26)
    tc = tensor_construct(M, Q, 140)
    assert tc.report.ok
    pat, _ = detect(tc.algebra)
    want = family_pattern("tq2", P, Q, 140,
                          sequence=extract_centralizer_sequence(M))
    assert pat.entries == want.truncate(140).entries
    assert [d for d, t in pat.entries if not t.genuine] == [85, 128]
    assert not classify_regularity(tc.algebra).regular


def test_tensor_bidegrees_match_ambient():
    # ambient bidegrees (X at (q-2,1), Y at (q-1,1), eps^(1) at (-1,0), the
    # derivation generator at (1,0)) agree with the engine word bidegrees
    M = build_maxclass(metabelian_sequence(P, 30), 25)
    tc = tensor_construct(M, Q, 60)
    L, Ma = tc.algebra, tc.maxclass.algebra
    for e in L.elements:
        amb = tc.ambient[e.gid]
        bids = set()
        for key in amb:
            if key == ("d",):
                bids.add((1, 0))
                continue
            _, g, j = key
            a, b = Ma.elements[g].bidegree   # counts of X and Y letters
            bids.add((a * (Q - 2) + b * (Q - 1) - j, a + b))
        assert bids == {e.bidegree}, e.word


def test_tensor_equals_compiled_structure():
    # two independent routes to the same algebra: ambient divided-power
    # arithmetic vs the local diamond relation rules; the structure
    # constants must agree entry for entry
    M = build_maxclass(metabelian_sequence(P, 40), 30)
    A = tensor_construct(M, Q, 100, run_validation=False).algebra
    B, _ = compile_pattern(family_pattern("e", P, Q, 140), 100,
                           run_validation=False)
    assert [e.word for e in A.elements] == [e.word for e in B.elements]
    for k in range(1, 101):
        assert A.ad["x"][k] == B.ad["x"][k], k
        assert A.ad["y"][k] == B.ad["y"][k], k


def test_tensor_backbone_equals_compiled_structure():
    from thinlie.patterns import uniqueness_sequence
    M = build_maxclass(uniqueness_sequence(P, 1, 40), 32)
    A = tensor_construct(M, Q, 150, run_validation=False).algebra
    B, _ = compile_pattern(family_pattern("uniqueness", P, Q, 200, s=1), 150,
                           run_validation=False)
    assert [e.word for e in A.elements] == [e.word for e in B.elements]
    for k in range(1, 151):
        assert A.ad["x"][k] == B.ad["x"][k], k
        assert A.ad["y"][k] == B.ad["y"][k], k


def test_tensor_needs_enough_maxclass_degrees():
    M = build_maxclass(metabelian_sequence(P, 12), 8)
    with pytest.raises(ConstructionError):
        tensor_construct(M, Q, 100)


def test_deflate_fixed_point():
    pat = family_pattern("a", P, Q, 300)
    L, _ = compile_pattern(pat, 240, run_validation=False)
    D, rep = deflate(L, 30)
    assert rep.ok
    dpat, _ = detect(D)
    assert dpat.entries == pat.truncate(30).entries


def test_deflate_requires_budget():
    pat = family_pattern("a", P, Q, 100)
    L, _ = compile_pattern(pat, 60, run_validation=False)
    with pytest.raises(ConstructionError):
        deflate(L, 30)


@pytest.fixture(scope="module")
def n77():
    return nottingham_Nqr(Q, Q, 100)


def test_n77_pattern(n77):
    L, pat, rep = n77
    assert rep.ok
    by = dict(pat.entries)
    from thinlie.patterns import DiamondType
    genuine = [d for d, t in pat.entries if t.genuine]
    assert genuine == [d for d in range(1, 101) if d % 48 == 7]
    assert all(by[d] == DiamondType.finite(-1, P) for d in genuine)
    assert by[13] == DiamondType.fake1()
    assert not classify_regularity(L).regular


def test_n77_golden(n77):
    _, pat, _ = n77
    golden = json.loads((GOLDEN / "n77_pattern.json").read_text())
    assert pat.to_json() == golden


def test_deflation_cycle():
    # deflating the once-deflated parameter-(7,7) algebra climbs back up to
    # the q = 49 type-(-1) family: repeated deflation cycles
    pat49 = family_pattern("a", P, 49, 2760)
    src = compile_pattern(pat49, 2667, run_validation=False)[0]
    L77, _ = deflate(src, 378, run_validation=False)
    back, rep = deflate(L77, 51)
    assert rep.ok
    bpat, _ = detect(back)
    assert bpat.entries == pat49.truncate(51).entries


def test_double_deflation():
    # r = p^2: two deflation steps; the type-1 fake still lands at 2q-1
    L, pat, rep = nottingham_Nqr(7, 49, 14)
    assert rep.ok
    assert [(d, t.to_json()) for d, t in pat.entries] == \
        [(7, "finite:6"), (13, "fake1")]


def test_tensor_q49():
    M = build_maxclass(metabelian_sequence(P, 12), 8)
    tc = tensor_construct(M, 49, 150)
    assert tc.report.ok
    pat, _ = detect(tc.algebra)
    want = family_pattern("e", P, 49, 150)
    assert pat.entries == want.truncate(150).entries


def test_deflated_second_diamond_relation(n77):
    L, _, _ = n77
    v1 = L.eval_word("y" + "x" * (Q - 2))
    assert L.apply_word(v1, "yx")[1] == \
        vec_scale(-2, L.apply_word(v1, "xy")[1], P)
