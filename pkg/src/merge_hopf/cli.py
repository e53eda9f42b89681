"""``merge-hopf``: batch command line over the library.

Exit codes: 0 success, 2 a verify suite found violations, 64 usage error,
65 malformed input (messages carry byte offsets), 66 unreadable file.
"""
from __future__ import annotations

import argparse
import inspect
import json
import sys
from pathlib import Path

from . import __version__
from .algebra import antipode, coproduct, coproduct_by_arity, graded_coproduct, reduced_coproduct
from .dyson_schwinger import DSPoly, ds_core, ds_general, wedderburn_etherington
from .errors import ConfigurationError, MergeHopfError, ParseError
from .externalization import (
    PERMISSIVE, filter as pl_filter, grade_dimensions, load_language, malcev_decode,
    malcev_encode, parse_planar, parse_planar_forest, project, section,
)
from .merge import (
    classify_form, derive, expected_delta, check_constraints, load_script, merge_eps,
    merge_op, minimal_search_limit, size_delta, WeightedWorkspace,
)
from .nary import nary_merge_op, overgeneration_counts, reachable_lengths, undergeneration_gap, catalan
from .syntax import (
    counts, enumerate_forests, enumerate_trees, load_lexicon, parse_forest, parse_occurrence,
    parse_tree,
)
from .verify import SUITES

EXIT_FINDINGS = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--lexicon", metavar="FILE", default=d, help="one label per line; restricts parsing")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="machine-readable output")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                   help="seed for sampled checks")
    p.add_argument("--max-leaves", type=int, default=d, help="size bound for enumeration")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _globals(common, suppress=True)

    ap = _Parser(prog="merge-hopf", description="Merge on workspaces, the forest bialgebra and friends.")
    _globals(ap, suppress=False)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = cmd("parse", help="canonicalize a forest and report its counts")
    p.add_argument("forest")
    p.add_argument("--arity", type=int, default=2, help="node arity; 0 accepts any")

    p = cmd("enumerate", help="list trees or forests over an alphabet")
    p.add_argument("--labels", default="a,b")
    p.add_argument("--forests", action="store_true")
    p.add_argument("--max-vertices", type=int)

    p = cmd("coproduct", help="Delta of a forest")
    p.add_argument("forest")
    p.add_argument("--arity", type=int, help="keep the stratum with arity-1 extracted components")
    p.add_argument("--graded", action="store_true", help="tag terms with their depth degree")
    p.add_argument("--reduced", action="store_true")

    p = cmd("antipode", help="S of a forest")
    p.add_argument("forest")

    p = cmd("merge", help="M_{S,S'} on a workspace")
    p.add_argument("S")
    p.add_argument("S2", metavar="S'")
    p.add_argument("forest")
    p.add_argument("--eps", action="store_true", help="depth-weighted, then the Minimal Search limit")

    p = cmd("derive", help="replay a JSON derivation script")
    p.add_argument("script", help="path, or - for stdin")

    p = cmd("classify", help="form of Merge for one or two occurrences (component:path)")
    p.add_argument("forest")
    p.add_argument("occurrences", nargs="+")

    p = cmd("tables", help="size changes and the constraint matrix over an enumeration")
    p.add_argument("--labels", default="a,b,c")
    p.add_argument("--max-vertices", type=int, default=6)

    p = cmd("nary", help="n-ary Merge counting and action")
    p.add_argument("what", choices=["lengths", "counts", "merge"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--op", action="append", default=[], help="operator argument (repeat n times; 1 for unit)")
    p.add_argument("--forest")

    p = cmd("ds", help="Dyson-Schwinger solutions")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--poly", help="a_0,a_1,... for X = B+(P(X)) on rooted trees")
    p.add_argument("--csv", action="store_true", help="census only, as CSV")

    p = cmd("externalize", help="planar section, projection, Malcev words, filters, dimensions")
    ext = p.add_subparsers(dest="what", required=True, parser_class=_Parser)

    def ecmd(name, inp, **kw):
        q = ext.add_parser(name, parents=[common], **kw)
        if inp:
            q.add_argument("input", help=inp)
        q.add_argument("--language", metavar="FILE", help="LanguageSpec JSON")
        return q

    ecmd("section", "abstract tree", help="sigma_L: choose a planar embedding")
    ecmd("project", "planar forest", help="forget the planar embedding")
    q = ecmd("malcev", "planar tree, or a Malcev word with --decode", help="Malcev prefix words")
    q.add_argument("--decode", action="store_true")
    q.add_argument("--compact", action="store_true", help="write marker runs as c², c³, ...")
    q.add_argument("--marker", default="c")
    ecmd("filter", "planar forest", help="accept or reject under the language's filters")
    q = ecmd("dims", None, help="per-grade dimensions as CSV")
    q.add_argument("--l-max", type=int, default=6)
    q.add_argument("--labels", default="x")
    q.add_argument("--budget", type=int, default=2_000_000)

    p = cmd("verify", help="run an invariant suite; exit 2 on findings")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--max-vertices", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--labels")
    return ap


# -- helpers -------------------------------------------------------------------------

def _lexicon(args):
    return load_lexicon(args.lexicon) if args.lexicon else None


def _labels(text: str) -> list:
    return [x for x in (s.strip() for s in text.split(",")) if x]


def _lines(x) -> str:
    if not x.terms:
        return "0"
    return "\n".join(f"{c:+d} * {type(x)._fmt_key(k)}" for k, c in x.items())


def _language(args):
    return load_language(args.language) if args.language else PERMISSIVE


# -- commands --------------------------------------------------------------------------
# each returns (result for --json, text, exit code)

def do_parse(args):
    arity = args.arity or None
    f = parse_forest(args.forest, _lexicon(args), arity=arity)
    c = counts(f)
    res = {"forest": str(f), "trees": [str(t) for t in f.trees], "counts": c.to_json()}
    return res, f"{f}\n{c}", 0


def do_enumerate(args):
    labels = _labels(args.labels)
    if args.forests:
        items = enumerate_forests(labels, max_leaves=args.max_leaves, max_vertices=args.max_vertices)
    else:
        if args.max_leaves is None:
            raise UsageError("enumerate: trees need --max-leaves")
        items = enumerate_trees(labels, args.max_leaves)
    out = [str(x) for x in items]
    return {"labels": labels, "count": len(out), "items": out}, "\n".join(out), 0


def do_coproduct(args):
    f = parse_forest(args.forest, _lexicon(args))
    if args.graded:
        x = graded_coproduct(f)
    elif args.arity:
        x = coproduct_by_arity(f, args.arity)
    elif args.reduced:
        x = reduced_coproduct(f)
    else:
        x = coproduct(f)
    return {"forest": str(f), "terms": x.to_json()}, _lines(x), 0


def do_antipode(args):
    f = parse_forest(args.forest, _lexicon(args))
    x = antipode(f)
    return {"forest": str(f), "terms": x.to_json()}, _lines(x), 0


def do_merge(args):
    lex = _lexicon(args)
    S, S2 = parse_tree(args.S, lex), parse_tree(args.S2, lex)
    f = parse_forest(args.forest, lex)
    if args.eps:
        weighted = merge_eps(S, S2, WeightedWorkspace.from_forest(f))
        x = minimal_search_limit(weighted)
        res = {"S": str(S), "S'": str(S2), "forest": str(f),
               "weighted": [{"coeff": c, "workspace": str(w)} for w, c in weighted.items()],
               "terms": x.to_json()}
        text = _lines(weighted) + "\n-- Minimal Search limit --\n" + _lines(x)
        return res, text, 0
    x = merge_op(S, S2, f)
    return {"S": str(S), "S'": str(S2), "forest": str(f), "terms": x.to_json()}, _lines(x), 0


def do_derive(args):
    try:
        text = sys.stdin.read() if args.script == "-" else Path(args.script).read_text(encoding="utf-8")
    except OSError as e:
        raise FileNotFoundError(str(e)) from None
    try:
        initial, steps = load_script(text)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ParseError(f"bad derivation script: {e}", 0) from None
    d = derive(initial, steps)
    res = d.to_json()
    lines = [f"initial  {d.initial}  {counts(d.initial)}"]
    for s in d.steps:
        flags = " ".join(k for k, ok in s.constraints.items() if not ok)
        lines.append(f"step {s.index}  {s.form or '-'}  {s.after}  delta={s.deltas}"
                     + (f"  violates: {flags}" if flags else ""))
    return res, "\n".join(lines), 0


def do_classify(args):
    f = parse_forest(args.forest, _lexicon(args))
    occ = [parse_occurrence(o) for o in args.occurrences]
    if len(occ) > 2:
        raise UsageError("classify: give one or two occurrences")
    form = classify_form(f, *occ)
    got = size_delta(form, f, check=False)
    want = expected_delta(form, f)
    res = {"form": form.to_json(), "delta": list(got), "table_row": list(want),
           "matches_table": got == want, "constraints": check_constraints(got)}
    text = (f"{form.variant}  delta={got}  table={want}"
            f"{'' if got == want else '  MISMATCH'}\n"
            + " ".join(f"{k}:{'Y' if v else 'N'}" for k, v in res["constraints"].items()))
    return res, text, 0


def do_tables(args):
    rep = SUITES["tables"](labels=tuple(_labels(args.labels)), max_vertices=args.max_vertices)
    d = rep.details
    lines = ["variant             instances  mismatches  observed"]
    for k, row in d["per_variant"].items():
        obs = " ".join(str(tuple(x)) for x in d["observed_deltas"].get(k, []))
        lines.append(f"{k:<20}{row['instances']:>9}  {row['mismatches']:>10}  {obs}")
    lines.append("")
    lines.append("constraint matrix (db0<=0, dacc>=0, 0<=dsigma<=1, dsigma_hat==0): computed / printed")
    for k in d["yn_computed"]:
        lines.append(f"{k:<20}{d['yn_computed'][k]} / {d['yn_printed'][k]}")
    return d | {"params": rep.params}, "\n".join(lines), 0


def do_nary(args):
    if args.what == "lengths":
        res = sorted(reachable_lengths(args.n, args.k_max))
        gaps = {k: undergeneration_gap(args.n, k, 1) for k in range(1, args.k_max + 1)} if args.n >= 3 else {}
        return ({"n": args.n, "lengths": res, "gaps": {str(k): v for k, v in gaps.items()}},
                " ".join(map(str, res)) + ("\ngap " + " ".join(str(v) for v in gaps.values()) if gaps else ""), 0)
    if args.what == "counts":
        c = overgeneration_counts(args.n, args.k)
        text = "\n".join(f"{k}: {v}" for k, v in c.to_json().items())
        return c.to_json(), text, 0
    if not args.forest or not args.op:
        raise UsageError("nary merge: needs --forest and --op (n times)")
    lex = _lexicon(args)
    ops = [parse_tree(o, lex, arity=None) for o in args.op]
    f = parse_forest(args.forest, lex, arity=None)
    x = nary_merge_op(ops, f, n=len(ops))
    return {"ops": [str(o) for o in ops], "forest": str(f), "terms": x.to_json()}, _lines(x), 0


def do_ds(args):
    we = wedderburn_etherington(args.n)
    if args.poly:
        try:
            P = DSPoly.parse(args.poly)
        except ValueError:
            raise UsageError(f"ds: --poly wants comma separated integers, got {args.poly!r}") from None
        X = ds_general(P, args.n)
        census = [[n, len(x), x.coefficient_sum()] for n, x in enumerate(X.grades, 1)]
        res = {"poly": list(P.coefficients), "grades": [x.to_json() for x in X.grades], "census": census}
        header, rows = "grade,support,coefficient_sum", [",".join(map(str, r)) for r in census]
    else:
        X = ds_core(args.n)
        census = [[n, len(x), x.coefficient_sum(), catalan(n - 1), we[n - 1]]
                  for n, x in enumerate(X.grades, 1)]
        res = {"grades": [x.to_json() for x in X.grades], "census": census}
        header = "grade,support,coefficient_sum,catalan,wedderburn_etherington"
        rows = [",".join(map(str, r)) for r in census]
    if args.csv:
        return res, "\n".join([header] + rows), 0
    lines = [f"X_{n} = {x}" for n, x in enumerate(X.grades, 1)]
    return res, "\n".join(lines + ["", header] + rows), 0


def do_externalize(args):
    L = _language(args)
    lex = _lexicon(args)
    if args.what == "dims":
        t = grade_dimensions(L, args.l_max, _labels(args.labels), args.budget)
        return t.to_json(), t.to_csv().rstrip("\n"), 0
    if args.what == "section":
        t = parse_tree(args.input, lex)
        p = section(t, L)
        return {"tree": str(t), "planar": str(p), "words": p.leaves()}, f"{p}\n{' '.join(p.leaves())}", 0
    if args.what == "project":
        f = parse_planar_forest(args.input, lex)
        g = project(f)
        return {"planar": str(f), "forest": str(g)}, str(g), 0
    if args.what == "malcev":
        if args.decode:
            p = malcev_decode(args.input, args.marker)
            return {"word": args.input, "planar": str(p)}, str(p), 0
        p = parse_planar(args.input, lex)
        w = malcev_encode(p, args.marker, compact=args.compact)
        return {"planar": str(p), "word": w}, w, 0
    f = parse_planar_forest(args.input, lex)
    out = pl_filter(f, L)
    text = "accepted" if out.accepted else f"rejected: bit {out.bit} ({out.kind}) fails on component {out.component}"
    return out.to_json(), text, 0


def do_verify(args):
    fn = SUITES[args.suite]
    kw = {}
    params = inspect.signature(fn).parameters
    if "seed" in params:
        kw["seed"] = args.seed
    for name in ("max_leaves", "max_vertices", "samples"):
        v = getattr(args, name, None)
        if v is not None:
            if name not in params:
                raise UsageError(f"verify {args.suite}: --{name.replace('_', '-')} does not apply")
            kw[name] = v
    if args.labels:
        if "labels" not in params:
            raise UsageError(f"verify {args.suite}: --labels does not apply")
        kw["labels"] = tuple(_labels(args.labels))
    rep = fn(**kw)
    return rep.to_json(), rep.summary(), 0 if rep.passed else EXIT_FINDINGS


COMMANDS = {
    "parse": do_parse, "enumerate": do_enumerate, "coproduct": do_coproduct,
    "antipode": do_antipode, "merge": do_merge, "derive": do_derive, "classify": do_classify,
    "tables": do_tables, "nary": do_nary, "ds": do_ds, "externalize": do_externalize,
    "verify": do_verify,
}


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        res, text, code = COMMANDS[args.command](args)
    except UsageError as e:
        print(str(e), file=err)
        return EXIT_USAGE
    except ParseError as e:
        print(f"merge-hopf: parse error at byte {e.offset}: {e.reason}", file=err)
        return EXIT_DATA
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"merge-hopf: {e}", file=err)
        return EXIT_NOINPUT
    except ConfigurationError as e:
        print(f"merge-hopf: {e}", file=err)
        return EXIT_DATA
    except MergeHopfError as e:
        print(f"merge-hopf: {e}", file=err)
        return EXIT_USAGE
    if args.json:
        name = args.command + (f" {args.what}" if hasattr(args, "what") else "")
        if args.command == "verify":
            name += f" {args.suite}"
        print(json.dumps({"command": name, "result": res}, ensure_ascii=False, sort_keys=True), file=out)
    else:
        print(text, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
