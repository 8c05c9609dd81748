"""The outer derivation D with Dx = 0, Dy = [y x^{q-2} y], the extraction of
a maximal-class algebra from an algebra whose post-second diamonds are all of
infinite type or fake of type 1, and the round trip back through the tensor
construction.

D is built by recursion on defining words and then verified to satisfy the
Leibniz rule exhaustively; the extension L + F X treats the formal element X
as acting on the right, [u, X] = D(u), matching the extraction recursion
U_{j+1} = [U_j X].
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .engine import GradedAlgebra, OperatorFamily
from .gf import vec_add, vec_is_zero, vec_scale
from .maxclass import CentralizerSequence, build_maxclass
from .patterns import DiamondPattern, detect


class ClassGateError(Exception):
    """The input algebra is not in the infinite-or-fake class this
    correspondence covers."""


class ExtractionError(Exception):
    pass


def in_tq2_class(pattern: DiamondPattern) -> bool:
    """Second diamond of type -1; every later diamond infinite or fake of
    type 1 (whence consecutive genuine gaps q-1 or 2q-1)."""
    ent = pattern.entries
    if not ent or ent[0][0] != pattern.q:
        return False
    if ent[0][1].kind != "finite" or ent[0][1].mu != pattern.p - 1:
        return False
    return all(t.kind in ("infinite", "fake1") for _, t in ent[1:])


@dataclass
class DerivationRep:
    algebra: GradedAlgebra
    op: OperatorFamily          # shift q-1
    dy: tuple                   # image of y, an element of degree q

    def apply(self, elem):
        return self.op.apply(elem)


def build_D(L: GradedAlgebra, pattern: DiamondPattern | None = None,
            enforce_class: bool = True) -> DerivationRep:
    """Construct D on every basis element by the word recursion
    D([u, t]) = [D(u), t] + [u, D(t)], from Dx = 0 and Dy = [y x^{q-2} y]."""
    q = L.q
    p = L.p
    if enforce_class:
        if pattern is None:
            pattern, _ = detect(L)
        if not in_tq2_class(pattern):
            raise ClassGateError(
                "derivation requires all post-second diamonds of infinite "
                f"type or fake of type 1; detected {pattern.to_json()['entries']!r}")
    dy = L.eval_word("y" + "x" * (q - 2) + "y")
    shift = q - 1
    images = {}
    for e in L.elements:
        if e.degree + shift > L.N_built:
            continue
        if e.degree == 1:
            images[e.gid] = L.zero(1 + shift) if e.word == "x" else dy
            continue
        par, t = e.parent_gid, e.letter
        if par not in images:
            continue
        img = L.apply_letter(images[par], t)
        if t == "y":
            img = (img[0], vec_add(img[1],
                                   L.bracket(L.as_element(par), dy)[1], p))
        images[e.gid] = img
    maps = {}
    for k in range(1, L.N_built - shift + 1):
        rows = []
        for i in range(L.dim(k)):
            g = L.gid(k, i)
            if g not in images:
                rows = None
                break
            rows.append(images[g][1])
        if rows is not None:
            maps[k] = tuple(rows)
    return DerivationRep(L, OperatorFamily(L, shift, maps), dy)


@dataclass
class LeibnizReport:
    pairs_checked: int
    failures: list
    instance_checks: list       # (label, degree, ok)

    @property
    def ok(self) -> bool:
        return not self.failures and all(ok for _, _, ok in self.instance_checks)

    def to_json(self) -> dict:
        return {
            "schema": "thinlie.leibniz.v1",
            "ok": self.ok,
            "pairs_checked": self.pairs_checked,
            "failures": [list(map(int, f)) for f in self.failures[:20]],
            "instance_checks": [[lbl, deg, ok]
                                for lbl, deg, ok in self.instance_checks],
        }


def verify_leibniz(L: GradedAlgebra, D: DerivationRep,
                   pattern: DiamondPattern | None = None,
                   limit: int | None = None) -> LeibnizReport:
    """D([u,v]) = [D(u), v] + [u, D(v)] on all basis pairs within budget,
    plus the coefficient facts at diamond-to-diamond steps and the bidegree
    homogeneity of D."""
    p, q = L.p, L.q
    shift = q - 1
    budget = min(limit if limit is not None else L.N, L.N_built - shift)
    fails = []
    pairs = 0
    for e1 in L.elements:
        for e2 in L.elements:
            if e2.gid < e1.gid:
                continue
            if e1.degree + e2.degree > budget:
                continue
            u, v = L.as_element(e1.gid), L.as_element(e2.gid)
            lhs = D.apply(L.bracket(u, v))
            rhs = vec_add(L.bracket(D.apply(u), v)[1],
                          L.bracket(u, D.apply(v))[1], p)
            pairs += 1
            if lhs[1] != rhs:
                fails.append((e1.gid, e2.gid))
    checks = []
    # bidegree homogeneity: shift (q-2, 1) on every nonzero image
    homog = True
    for e in L.elements:
        if e.degree + shift > L.N_built or e.degree > budget:
            continue
        img = D.apply(L.as_element(e.gid))
        want = (e.bidegree[0] + q - 2, e.bidegree[1] + 1)
        tgt = L.basis(e.degree + shift)
        for s, c in enumerate(img[1]):
            if c and tgt[s].bidegree != want:
                homog = False
    checks.append(("bidegree shift (q-2,1)", 0, homog))
    if pattern is None:
        pattern, _ = detect(L)
    ent = pattern.entries
    for idx, (m, t) in enumerate(ent):
        nxt = ent[idx + 1] if idx + 1 < len(ent) else None
        if nxt is None or m - 1 > budget:
            continue
        v = L.as_element(L.gid(m - 1, 0))
        if (t.kind == "infinite" and nxt[0] == m + q - 1
                and nxt[1].kind in ("infinite", "fake1")
                and m + 2 * (q - 1) <= L.N_built):
            w = L.apply_word(v, "xy" + "x" * (q - 3))
            lhs = D.apply(L.apply_word(v, "x"))
            checks.append(("D[vx] = -2[wx] at infinite diamond", m,
                           lhs[1] == vec_scale(-2, L.apply_word(w, "x")[1], p)))
        if (t.kind == "fake1" and nxt[0] == m + q
                and nxt[1].kind == "infinite"
                and m + q <= L.N_built):
            lhs = D.apply(L.apply_word(v, "x"))
            checks.append(("D[vx] = 0 at fake diamond", m,
                           vec_is_zero(lhs[1])))
    return LeibnizReport(pairs, fails, checks)


@dataclass
class ExtendedElement:
    """u + a X inside L + F X, X the formal element with [u, X] = D(u).

    X carries degree q - 1 (the shift of D), so the element slot of a pure
    multiple of X is a zero vector in degree q - 1.
    """

    elem: tuple
    xcoeff: int


def extended_bracket(D: DerivationRep, a: ExtendedElement, b: ExtendedElement):
    L = D.algebra
    p = L.p
    out = L.bracket(a.elem, b.elem)
    if a.xcoeff:
        out = (out[0], vec_add(out[1],
                               vec_scale(-a.xcoeff, D.apply(b.elem)[1], p), p))
    if b.xcoeff:
        out = (out[0], vec_add(out[1],
                               vec_scale(b.xcoeff, D.apply(a.elem)[1], p), p))
    return ExtendedElement(out, 0)


def extract_M(L: GradedAlgebra, D: DerivationRep, N_M: int | None = None):
    """Inside L + F X with X = D and Y = [y x^{q-1}], run the recursion
    U_{j+1} = [U_j X] if [U_j Y] = 0 else [U_j Y], reading off the two-step
    centralizer sequence.  Returns (MaxClassAlgebra, CentralizerSequence)."""
    p, q = L.p, L.q
    Y = L.eval_word("y" + "x" * (q - 1))
    U = Y
    entries = []
    j = 1
    while True:
        degU = U[0]
        can_y = degU + q <= L.N_built
        can_x = degU in D.op.maps
        if not (can_y and can_x):
            break
        uy = L.bracket(U, Y)
        ux = D.apply(U)
        ky, kx = vec_is_zero(uy[1]), vec_is_zero(ux[1])
        if ky == kx:
            raise ExtractionError(
                f"U_{j} (degree {degU}) has centralizer of dimension "
                f"{2 if ky else 0} in the generator plane")
        if j >= 2:
            entries.append("Y" if ky else "X")
        U = ux if ky else uy
        if vec_is_zero(U[1]):
            raise ExtractionError(f"U_{j + 1} vanished")
        j += 1
        if N_M is not None and j > N_M + 2:
            break
    seq = CentralizerSequence(p, entries)
    n_m = N_M if N_M is not None else len(entries) - 1
    n_m = min(n_m, len(entries) - 1)
    if n_m < 2:
        raise ExtractionError("input algebra too short to extract anything")
    M = build_maxclass(seq, n_m)
    return M, seq


@dataclass
class RoundtripReport:
    stages: list = dc_field(default_factory=list)
    extracted_sequence: str = ""
    pattern_L: dict | None = None
    pattern_T: dict | None = None
    passed: bool = False
    compare_N: int = 0

    def to_json(self) -> dict:
        return {
            "schema": "thinlie.roundtrip.v1",
            "stages": self.stages,
            "extracted_sequence": self.extracted_sequence,
            "pattern_L": self.pattern_L,
            "pattern_T": self.pattern_T,
            "compare_N": self.compare_N,
            "pass": self.passed,
        }


def roundtrip_check(L: GradedAlgebra, compare_N: int | None = None) -> RoundtripReport:
    """detect(tensor_construct(build_maxclass(extracted sequence))) must equal
    detect(L) up to the comparison bound."""
    from .constructions import tensor_construct

    q = L.q
    rep = RoundtripReport()
    pattern, _ = detect(L)
    rep.pattern_L = pattern.to_json()
    if not in_tq2_class(pattern):
        rep.stages.append(["class-gate", "rejected: diamonds of finite type "
                           "past the second diamond"])
        return rep
    rep.stages.append(["class-gate", "ok"])
    D = build_D(L, pattern=pattern, enforce_class=False)
    rep.stages.append(["derivation", f"built on degrees 1..{max(D.op.maps)}"])
    M, seq = extract_M(L, D)
    rep.extracted_sequence = "".join(seq.entries)
    rep.stages.append(["extraction", f"sequence of length {len(seq)}, "
                       f"maximal-class algebra to degree {M.N}"])
    n_cmp = min(compare_N if compare_N is not None else L.N,
                L.N, (M.algebra.N_built - 2) * (q - 1) - 2)
    rep.compare_N = n_cmp
    T = tensor_construct(M, q, n_cmp, run_validation=False)
    rep.stages.append(["tensor", f"rebuilt to degree {n_cmp}"])
    pat_T, _ = detect(T.algebra)
    rep.pattern_T = pat_T.to_json()
    rep.passed = pat_T.truncate(n_cmp).entries == pattern.truncate(n_cmp).entries
    rep.stages.append(["compare", "equal" if rep.passed else "MISMATCH"])
    return rep
