"""Command-line entry point.

Exit status: 0 on success or exact fixture match, 1 on a mathematical
mismatch, 2 on usage, syntax or resource errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

from . import bounds as bd
from . import checks
from .classifier import classify_chi1, classify_chi_gt1, enumerate_chi_gt1, thresholds
from .constraints import miyaoka_reid
from .core import BasketSyntaxError, FormalBasket, OutOfDomain, fmt_q, parse_formal, plurigenus, volume
from .fixtures import FixtureError, load_tablea
from .lattice import ResourceError, descendant_closure, minimal_positive_descendants

OK, MISMATCH, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- output --------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _tsv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), delimiter="\t", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (fmt_q(v) if isinstance(v, Fraction) else v) for k, v in r.items()})
    return buf.getvalue()


def emit(args, stem: str, doc: dict, table: list[dict]) -> None:
    """Persist ``doc`` as JSON and ``table`` as TSV under --out, plus the run config."""
    if args.out is None:
        return
    out = Path(args.out)
    if args.format in ("json", "both"):
        atomic_write(out / f"{stem}.json", json.dumps(_jsonable(doc), indent=1, sort_keys=True) + "\n")
    if args.format in ("tsv", "both"):
        atomic_write(out / f"{stem}.tsv", _tsv(table))
    atomic_write(out / f"{stem}.config.json", json.dumps(run_config(args), indent=1, sort_keys=True) + "\n")


def run_config(args) -> dict:
    skip = {"func", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _formal(text: str) -> FormalBasket:
    return parse_formal(text)


def _range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError as e:
        raise UsageError(f"bad range {text!r}; use LO..HI") from e


# -- commands ------------------------------------------------------------------

def cmd_basket_eval(args) -> int:
    fb = _formal(args.basket)
    show_all = not args.k3 and args.pm is None
    k3 = volume(fb)
    if args.k3 or show_all:
        print(f"K3 = {fmt_q(k3)}")
    ms = _range(args.pm or "2..12")
    P = {m: plurigenus(fb, m) for m in ms}
    if args.pm is not None or show_all:
        print("m\t" + "\t".join(str(m) for m in ms))
        print("P_m\t" + "\t".join(str(v) if v.denominator == 1 else fmt_q(v) for v in P.values()))
    mr = miyaoka_reid(fb)
    if show_all:
        print(f"Miyaoka-Reid: {'holds' if mr.holds else 'fails'} (margin {fmt_q(mr.margin)})")
    doc = {"basket": str(fb), "k3": k3, "plurigenera": {m: v for m, v in P.items()},
           "miyaoka_reid": {"holds": mr.holds, "margin": mr.margin}}
    emit(args, "basket", doc, [{"m": m, "P": v} for m, v in P.items()])
    return OK


def cmd_pack_explore(args) -> int:
    fb = _formal(args.basket)
    closure = descendant_closure(fb, unpack_order=args.order, cap_states=args.cap_states)
    mins = minimal_positive_descendants(fb, unpack_order=args.order, cap_states=args.cap_states)
    print(f"{len(closure)} positive descendants, {len(mins)} minimal")
    table = []
    for b in mins:
        f = FormalBasket(b, fb.chi, fb.p2)
        chain = closure[b]
        moves = " ; ".join(str(mv) for mv in chain.moves)
        print(f"{fmt_q(volume(f))}\t{b}\t{moves}")
        table.append({"k3": volume(f), "basket": str(b), "moves": moves,
                      "miyaoka_reid": miyaoka_reid(f).holds})
    emit(args, "pack", {"start": str(fb), "closure_size": len(closure), "minimal": table}, table)
    return OK


def cmd_classify_chi1(args) -> int:
    rep = classify_chi1(args.cap_relem or 30, args.cap_states)
    cases = []
    for c in rep.cases:
        cases.append({"case": c.name, "pattern": list(c.pattern), "initial": str(c.initial),
                      "minimal": [{"basket": str(b), "k3": c.nodes[b].k3,
                                   "miyaoka_reid": c.nodes[b].mr.holds,
                                   "excluded": c.nodes[b].exclusion.rule} for b in c.minimal],
                      "frontier": [str(b) for b in c.frontier]})
        print(f"case {c.name} {c.initial}: {len(c.minimal)} minimal, {len(c.frontier)} admissible frontier")
    table = [{"basket": str(b), "k3": volume(FormalBasket(b, 1))} for b in rep.survivors]
    print(f"{len(rep.survivors)} survivors; minimum K3 = {fmt_q(rep.min_volume)} at "
          + ", ".join(map(str, rep.attained_by)))
    doc = {"cases": cases, "survivors": table, "min_volume": rep.min_volume,
           "attained_by": [str(b) for b in rep.attained_by],
           "excluded": [{"basket": str(b), "rule": v.rule, "witness": list(v.witness)} for b, v in rep.excluded]}
    emit(args, "chi1", doc, table)
    return OK


def _row_doc(r) -> dict:
    return {"index": r.index, "chi": r.chi, "p_vector": "".join(map(str, r.p_vector)), "basket": str(r.b12),
            "k3": r.k3, "mu1": r.mu1, "p18": r.p18, "p24": r.p24,
            "minimal": " ".join(f"{b}:{fmt_q(k)}" for b, k in r.minimal_descendants)}


def cmd_classify_tablec(args) -> int:
    rows = enumerate_chi_gt1(args.cap_relem or 11, cap_states=args.cap_states)
    rep = classify_chi_gt1(rows, args.cap_states)
    table = [_row_doc(r) for r in rows]
    for t in table:
        print(f"{t['index']:>3} chi={t['chi']} {t['p_vector']} {t['basket']} K3={fmt_q(t['k3'])} "
              f"mu1={t['mu1']} P18={t['p18']} P24={t['p24']}")
    print(f"{len(rows)} rows, {len(rep.excluded)} excluded minimal baskets, {len(rep.survivors)} survivors; "
          f"minimum K3 = {fmt_q(rep.min_volume)}")
    doc = {"rows": table, "min_volume": rep.min_volume,
           "attained_by": [{"row": i, "basket": str(b)} for i, b in rep.attained_by],
           "excluded": [{"row": i, "basket": str(b), "rule": v.rule, "witness": list(v.witness)}
                        for i, b, v in rep.excluded],
           "survivors": [{"row": i, "basket": str(b)} for i, b in rep.survivors]}
    emit(args, "tablec", doc, table)
    return OK


def _ctx(args) -> checks.Context:
    cfg = checks.Config(fixtures=args.fixtures, cap_states=args.cap_states)
    if args.cap_relem:
        cfg.r_elem_cap_chi1 = cfg.r_elem_cap_chi_gt1 = args.cap_relem
    if getattr(args, "cases", None):
        cfg.property_cases = args.cases
    return checks.Context(cfg)


def _report(args, stem: str, results: list) -> int:
    for r in results:
        print(r.line())
        for line in r.diff[:20]:
            print(f"    {line}")
    doc = {"results": [{"criterion": r.number, "title": r.title, "pass": r.ok, "diff": r.diff} for r in results]}
    emit(args, stem, doc, [{"criterion": r.number, "title": r.title, "pass": r.ok} for r in results])
    return OK if all(r.ok for r in results) else MISMATCH


def cmd_verify_volumes(args) -> int:
    nums = {"1": [3, 4], "2+": [6, 7, 8]}[args.chi]
    return _report(args, f"verify_volumes_{'chi1' if args.chi == '1' else 'chigt1'}",
                   checks.run_all(_ctx(args), nums))


def _run_group(cfg, nums):
    return checks.run_all(checks.Context(cfg), nums)


def cmd_verify_all(args) -> int:
    ctx = _ctx(args)
    if args.jobs <= 1:
        results = checks.run_all(ctx)
    else:
        groups = [[1, 2, 9, 10], [3, 4], [5, 6, 7, 8], [11]]
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            parts = list(ex.map(_run_group, [ctx.cfg] * len(groups), groups))
        results = sorted((r for p in parts for r in p), key=lambda r: r.number)
    return _report(args, "verify_all", results)


def cmd_bounds_tablea(args) -> int:
    want = load_tablea(args.fixtures)
    m0s = sorted(next(iter(want.values())))
    got = bd.table_a(m0s)
    print("row\t" + "\t".join(str(m) for m in m0s))
    diff = []
    for row, cells in got.items():
        print(row + "\t" + "\t".join(fmt_q(cells[m]) for m in m0s))
        for m in m0s:
            if row in want and want[row].get(m) != cells[m]:
                diff.append(f"{row} m0={m}: got {fmt_q(cells[m])}, want {fmt_q(want[row][m])}")
    for line in diff:
        print(f"MISMATCH {line}")
    table = [{"row": row, **{str(m): cells[m] for m in m0s}} for row, cells in got.items()]
    emit(args, "tablea", {"m0": m0s, "rows": got, "mismatches": diff}, table)
    return MISMATCH if diff else OK


def cmd_bounds_replay(args) -> int:
    if args.beta or args.deg or args.p:
        if not (args.beta and args.deg and args.p):
            raise UsageError("--beta, --deg and --p go together")
        case = bd.FibrationCase(args.type, args.m0, args.p, Fraction(args.beta), args.deg,
                                even_divisor=args.even_divisor)
    else:
        case = bd.FibrationCase.default(args.type, args.m0, purpose=args.purpose)
    try:
        ms = [int(x) for x in args.ms.split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"bad --ms {args.ms!r}") from e
    tr, m = bd.replay_chain(case, ms, Fraction(args.target), relaxed=args.relaxed)
    print(f"seed xi = {fmt_q(tr.seed)}")
    for s in tr.steps:
        print(f"m={s.m}\talpha={fmt_q(s.alpha)}\tceil={s.alpha0}\txi={fmt_q(s.xi)}")
    print(f"volume bound = {fmt_q(tr.volume_bound)}")
    print(f"least m with alpha > {args.target}: {m}")
    table = [{"m": s.m, "alpha": s.alpha, "alpha0": s.alpha0, "xi": s.xi} for s in tr.steps]
    doc = {"case": {k: v for k, v in asdict(case).items()}, "seed": tr.seed, "steps": table,
           "volume_bound": tr.volume_bound, "threshold": m}
    emit(args, "replay", doc, table)
    return OK


def cmd_bounds_optimize(args) -> int:
    case = bd.FibrationCase.default(args.type, args.m0)
    tr = bd.optimize_volume(case, args.mmax, strategy=args.strategy)
    for s in tr.steps:
        print(f"m={s.m}\talpha={fmt_q(s.alpha)}\txi={fmt_q(s.xi)}")
    print(f"volume bound = {fmt_q(tr.volume_bound)} (closed form {fmt_q(bd.closed_form_volume(args.type, args.m0))})")
    return OK


# -- parser --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cap-relem", type=int, default=None, help="largest r for elementary (1,r) pairs")
    p.add_argument("--cap-states", type=int, default=10**6, help="closure size limit")
    p.add_argument("--mmax", type=int, default=None, help="largest m tried by the optimizer")
    p.add_argument("--out", default=None, help="directory for JSON/TSV artifacts")
    p.add_argument("--fixtures", default=None, help="fixture directory (default: $BASKETFORGE_FIXTURES)")
    p.add_argument("--format", choices=("json", "tsv", "both"), default="both")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="basketforge", description="Exact basket arithmetic for threefolds.")
    top = ap.add_subparsers(dest="group", required=True)

    def sub(group, name, func, help_):
        p = group.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=func)
        return p

    g = top.add_parser("basket").add_subparsers(dest="cmd", required=True)
    p = sub(g, "eval", cmd_basket_eval, "K3 and plurigenera of a formal basket")
    p.add_argument("basket", help='e.g. "{(3,6),(3,7),(2,5),(1,4),(1,6)};chi=1;p2=0"')
    p.add_argument("--pm", default=None, help="plurigenus range LO..HI")
    p.add_argument("--k3", action="store_true")

    g = top.add_parser("pack").add_subparsers(dest="cmd", required=True)
    p = sub(g, "explore", cmd_pack_explore, "minimal positive descendants")
    p.add_argument("basket")
    p.add_argument("--order", type=int, default=None, help="only packings producing r > ORDER")

    g = top.add_parser("classify").add_subparsers(dest="cmd", required=True)
    sub(g, "chi1", cmd_classify_chi1, "classification for chi = 1")
    sub(g, "tablec", cmd_classify_tablec, "enumeration and exclusions for chi >= 2")

    g = top.add_parser("verify").add_subparsers(dest="cmd", required=True)
    p = sub(g, "volumes", cmd_verify_volumes, "volume minimum checks")
    p.add_argument("--chi", choices=("1", "2+"), default="2+")
    p = sub(g, "all", cmd_verify_all, "every acceptance criterion")
    p.add_argument("--cases", type=int, default=None, help="random cases per property (default 10000)")

    g = top.add_parser("bounds").add_subparsers(dest="cmd", required=True)
    sub(g, "tablea", cmd_bounds_tablea, "optimized small-m0 volume bounds")
    p = sub(g, "replay", cmd_bounds_replay, "replay a refinement chain")
    p.add_argument("--type", default="generic", choices=bd.TYPES + ("generic",))
    p.add_argument("--m0", type=int, required=True)
    p.add_argument("--ms", required=True, help="comma-separated m values")
    p.add_argument("--purpose", choices=("volume", "birationality"), default="birationality")
    p.add_argument("--beta", default=None)
    p.add_argument("--deg", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--even-divisor", action="store_true")
    p.add_argument("--target", default="2")
    p.add_argument("--relaxed", action="store_true")
    p = sub(g, "optimize", cmd_bounds_optimize, "fixed point for one fibration type")
    p.add_argument("--type", required=True, choices=[t for t in bd.TYPES if t != "I_q"])
    p.add_argument("--m0", type=int, required=True)
    p.add_argument("--strategy", choices=("max", "least"), default="max")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (BasketSyntaxError, UsageError, OutOfDomain, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except (ResourceError, FixtureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
