"""Command-line surface: build, verify, detect, roundtrip, deflate, diagram,
export.  All artifacts are JSON (DOT/plain text for diagrams), byte-stable
for identical job specifications.

Exit codes: 0 success, 2 malformed job, 3 degree budget exceeded,
4 verification or round-trip failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .constructions import (ConstructionError, _smallest_prime_factor,
                            nottingham_Nqr, tensor_construct)
from .derivations import ClassGateError, ExtractionError, roundtrip_check
from .engine import DegreeOverflowError, validate
from .maxclass import (CentralizerSequence, SequenceError,
                       UnrealizableSequenceError, build_maxclass)
from .patterns import (DiamondPattern, PatternError, classify_regularity,
                       compile_pattern, detect, family_pattern,
                       family_pattern_from_json, verify_lemma_suite)

EXIT_OK = 0
EXIT_BADSPEC = 2
EXIT_BUDGET = 3
EXIT_FAILED = 4

FAMILIES = ("a", "b", "c", "d", "e", "L1q", "L0q", "tq2", "uniqueness", "nqr")


def max_degree() -> int:
    return int(os.environ.get("THINLIE_MAX_DEGREE", "1000"))


def _dump(doc, path):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _family_params(args):
    kw = {}
    if args.family == "b":
        kw["start_type"] = args.start_type if args.start_type is not None else 2
    if args.family in ("c", "d"):
        kw["s"] = args.s or 1
        if args.family == "d":
            kw["step"] = args.step if args.step is not None else 1
    if args.family == "uniqueness":
        kw["s"] = args.s or 1
    if args.family == "tq2":
        if not args.sequence:
            raise PatternError("family tq2 needs --sequence")
        kw["sequence"] = CentralizerSequence.from_json(_load_json(args.sequence))
    return kw


def make_algebra(args, guard=2, run_validation=False):
    """Resolve --family/--pattern/--sequence into a built algebra."""
    N = args.N
    if N is None:
        raise PatternError("--N is required")
    if N > max_degree():
        raise DegreeOverflowError(N, max_degree())
    if args.family == "nqr":
        if not (args.q and args.r):
            raise PatternError("family nqr needs --q and --r")
        L, pattern, report = nottingham_Nqr(args.q, args.r, N, p=args.p,
                                            run_validation=run_validation)
        return L, report
    if args.pattern:
        pattern = DiamondPattern.from_json(_load_json(args.pattern))
        return compile_pattern(pattern, N, guard=guard,
                               run_validation=run_validation)
    if args.family_spec:
        doc = _load_json(args.family_spec)
        pat = family_pattern_from_json(doc, N + guard + doc["q"] + 2)
        return compile_pattern(pat, N, guard=guard,
                               run_validation=run_validation)
    if args.family:
        q = args.q or args.p or 7
        p = args.p or _smallest_prime_factor(q)
        pat = family_pattern(args.family, p, q, N + guard + q + 2,
                             **_family_params(args))
        return compile_pattern(pat, N, guard=guard,
                               run_validation=run_validation)
    if args.sequence:
        seq = CentralizerSequence.from_json(_load_json(args.sequence))
        q = args.q
        if not q:
            raise PatternError("--sequence needs --q")
        need = -(-(N + guard) // (q - 1)) + 2
        M = build_maxclass(seq, need + 1)
        tc = tensor_construct(M, q, N, guard=guard,
                              run_validation=run_validation)
        return tc.algebra, tc.report
    raise PatternError("specify one of --family, --family-spec, --pattern, "
                       "--sequence")


def cmd_build(args):
    L, report = make_algebra(args, run_validation=True)
    _dump(L.to_structure_json(), args.out)
    if report is not None:
        print(report.summary(), file=sys.stderr)
        if not report.ok:
            return EXIT_FAILED
    return EXIT_OK


def cmd_export(args):
    L, _ = make_algebra(args, run_validation=False)
    _dump(L.to_structure_json(), args.out)
    return EXIT_OK


def cmd_verify(args):
    L, _ = make_algebra(args, run_validation=False)
    doc = {"schema": "thinlie.verify.v1", "checks": {}}
    failed = False
    if args.check in ("all", "jacobi"):
        rep = validate(L)
        doc["checks"]["axioms"] = rep.to_json()
        failed = failed or not rep.ok
    if args.check in ("all", "lemmas", "distance"):
        lem = verify_lemma_suite(L)
        if args.check == "distance":
            inst = [i for i in lem.instances if i.lemma == "distance"]
            doc["checks"]["distance"] = {
                "ok": all(i.status != "fail" for i in inst),
                "instances": [vars(i) for i in inst]}
            failed = failed or not doc["checks"]["distance"]["ok"]
        else:
            doc["checks"]["lemmas"] = lem.to_json()
            failed = failed or not lem.ok
    reg = classify_regularity(L)
    doc["regularity"] = {"regular": reg.regular,
                         "violations": [list(v) for v in reg.violations[:10]]}
    doc["ok"] = not failed
    _dump(doc, args.out)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_detect(args):
    L, _ = make_algebra(args, run_validation=False)
    pattern, rep = detect(L)
    doc = pattern.to_json()
    doc["fake_sites"] = rep.sites
    doc["untypable"] = [list(map(str, u)) for u in rep.untypable]
    _dump(doc, args.out)
    return EXIT_OK if rep.ok else EXIT_FAILED


def cmd_roundtrip(args):
    L, _ = make_algebra(args, guard=(args.q or 7) + 2, run_validation=False)
    try:
        rep = roundtrip_check(L, compare_N=args.compare_N)
    except (ClassGateError, ExtractionError) as e:
        _dump({"schema": "thinlie.roundtrip.v1", "pass": False,
               "error": str(e)}, args.out)
        return EXIT_FAILED
    _dump(rep.to_json(), args.out)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_deflate(args):
    if not (args.q and args.r):
        raise PatternError("deflate needs --q and --r")
    L, pattern, report = nottingham_Nqr(args.q, args.r, args.N, p=args.p)
    doc = {"schema": "thinlie.deflate.v1",
           "structure": L.to_structure_json(),
           "pattern": pattern.to_json(),
           "validation": report.to_json() if report else None}
    _dump(doc, args.out)
    return EXIT_OK if (report is None or report.ok) else EXIT_FAILED


def _diagram_txt(L, pattern):
    lines = []
    types = dict(pattern.entries)
    for k in range(1, L.N + 1):
        basis = L.basis(k)
        bids = " ".join(f"({e.bidegree[0]},{e.bidegree[1]})" for e in basis)
        note = ""
        if k == 1:
            note = "  first diamond"
        elif k in types:
            note = f"  diamond type {types[k].label(L.p)}"
        lines.append(f"deg {k:>4}  dim {len(basis)}  {bids}{note}")
    return "\n".join(lines) + "\n"


def _diagram_dot(L, pattern):
    types = dict(pattern.entries)
    out = ["digraph double_grading {", "  rankdir=TB;",
           '  node [shape=circle, fontsize=10];']
    for e in sorted(L.elements, key=lambda e: (e.degree, e.index)):
        if e.degree > L.N:
            continue
        r, s = e.bidegree
        label = f"({r},{s})"
        attrs = f'label="{label}"'
        if e.degree in types:
            attrs += f', xlabel="{types[e.degree].label(L.p)}"'
        elif e.degree == 1:
            attrs += f', xlabel="{e.word}"'
        out.append(f'  "n{r}_{s}" [{attrs}];')
    for e in sorted(L.elements, key=lambda e: (e.degree, e.index)):
        if e.degree >= L.N:
            continue
        for letter, style in (("x", "solid"), ("y", "dashed")):
            img = L.apply_letter(L.as_element(e.gid), letter)
            tgt = L.basis(img[0])
            for sidx, c in enumerate(img[1]):
                if c:
                    r1, s1 = e.bidegree
                    r2, s2 = tgt[sidx].bidegree
                    out.append(f'  "n{r1}_{s1}" -> "n{r2}_{s2}" '
                               f'[style={style}];')
    out.append("}")
    return "\n".join(out) + "\n"


def _diagram_json(L, pattern):
    types = dict(pattern.entries)
    nodes = []
    for e in sorted(L.elements, key=lambda e: (e.degree, e.index)):
        if e.degree > L.N:
            continue
        node = {"degree": e.degree, "bidegree": list(e.bidegree),
                "word": e.word}
        if e.degree in types:
            node["diamond_type"] = types[e.degree].to_json()
        nodes.append(node)
    return {"schema": "thinlie.diagram.v1", "p": L.p, "q": L.q, "N": L.N,
            "nodes": nodes,
            "diamonds": [{"degree": d, "type": t.to_json()}
                         for d, t in pattern.entries]}


def cmd_diagram(args):
    L, _ = make_algebra(args, run_validation=False)
    pattern, _ = detect(L)
    if args.format == "json":
        _dump(_diagram_json(L, pattern), args.out)
        return EXIT_OK
    text = (_diagram_dot if args.format == "dot" else _diagram_txt)(L, pattern)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="thinlie",
        description="Exact engine for Nottingham-type thin graded Lie "
                    "algebras over prime fields.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--family-spec", dest="family_spec",
                        help="family spec JSON file")
    common.add_argument("--pattern", help="pattern JSON file")
    common.add_argument("--sequence", help="centralizer sequence JSON file")
    common.add_argument("--p", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--s", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--start-type", type=int, dest="start_type",
                        help="type of the third diamond (family b)")
    common.add_argument("--step", type=int,
                        help="type progression step (family d)")
    common.add_argument("--out")
    for name, fn in (("build", cmd_build), ("verify", cmd_verify),
                     ("detect", cmd_detect), ("roundtrip", cmd_roundtrip),
                     ("deflate", cmd_deflate), ("diagram", cmd_diagram),
                     ("export", cmd_export)):
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(fn=fn)
        if name == "verify":
            sp.add_argument("--check", default="all",
                            choices=("all", "jacobi", "lemmas", "distance"))
        if name == "roundtrip":
            sp.add_argument("--compare-N", type=int, dest="compare_N")
        if name == "diagram":
            sp.add_argument("--format", default="txt",
                            choices=("json", "dot", "txt"))
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except DegreeOverflowError as e:
        print(f"degree budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (PatternError, SequenceError, ConstructionError, ValueError) as e:
        print(f"bad job specification: {e}", file=sys.stderr)
        return EXIT_BADSPEC
    except UnrealizableSequenceError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
