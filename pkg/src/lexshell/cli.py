"""Command-line front end: builds complexes, runs checks, writes certificates.

Exit codes: 0 claim verified or data emitted, 1 claim falsified (the
counterexample is in the payload), 2 usage or resource error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from .complex import (
    BudgetExceeded,
    ComplexError,
    descent_sets,
    shelling_exists,
    verify_partitioning,
    verify_shelling,
)
from .series import DEFAULT_DEGREE, SeriesError

SCHEMA = 1
BUDGET_ENV = "LEXSHELL_BUDGET"
DEFAULT_BUDGET = 10 ** 7

VERIFIED = "verified"
FALSIFIED = "falsified"
DATA = "data"


class UsageError(Exception):
    pass


@dataclass
class Report:
    kind: str
    parameters: dict
    payload: dict
    verdict: str
    header: list = field(default_factory=list)
    rows: list = field(default_factory=list)


def dash(support) -> str:
    return "-".join(str(x) for x in sorted(support))


def _ints(support) -> list:
    return sorted(int(x) for x in support)


# ---------------------------------------------------------------------------
# wreath
# ---------------------------------------------------------------------------

def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _wreath(args):
    from .wreath import MAX_LETTERS, wreath_complex

    _need(args, "k", "n")
    if args.k < 1 or args.n < 1:
        raise UsageError("--k and --n must be positive")
    cap = 10 ** 9 if args.allow_large else MAX_LETTERS
    if args.k * args.n > cap:
        raise UsageError(f"kn = {args.k * args.n} exceeds {MAX_LETTERS}; pass --allow-large to override")
    if args.k * args.n < 2:
        raise UsageError("kn must be at least 2")
    return wreath_complex(args.k, args.n, cap)


def _word(w) -> str:
    return "".join(str(x) for x in w) if max(w) < 10 else " ".join(str(x) for x in w)


def cmd_wreath_facets(args) -> Report:
    from .wreath import classified_descents, classify_positions

    c = _wreath(args)
    ds = descent_sets(c)
    rows, items = [], []
    for i, (w, d) in enumerate(zip(c.facets, ds)):
        item = {"index": i, "word": list(w), "descents": _ints(d)}
        row = [i, _word(w), dash(d)]
        if args.k == 2:
            cls = classify_positions(args.n, w)
            item["classes"] = list(cls)
            item["classified"] = _ints(classified_descents(cls))
            row.append(dash(classified_descents(cls)))
        items.append(item)
        rows.append(row)
    header = ["index", "word", "descents"] + (["classified"] if args.k == 2 else [])
    return Report("shelling", {"k": args.k, "n": args.n}, {"facets": items}, DATA, header, rows)


def cmd_wreath_shell(args) -> Report:
    c = _wreath(args)
    cert = verify_shelling(c)
    ds = descent_sets(c)
    payload = {"order": [list(w) for w in c.facets], "descents": [_ints(d) for d in ds]}
    if not cert.passed:
        step, support, codim = cert.failure
        payload["failure"] = {"step": step, "support": _ints(support), "codimension": codim}
    rows = [[i, _word(w), dash(d)] for i, (w, d) in enumerate(zip(c.facets, ds))]
    return Report("shelling", {"k": args.k, "n": args.n, "order": "lex"}, payload,
                  VERIFIED if cert.passed else FALSIFIED, ["step", "word", "descents"], rows)


def cmd_wreath_search(args) -> Report:
    c = _wreath(args)
    params = {"k": args.k, "n": args.n, "budget": args.budget}
    order = shelling_exists(c, args.budget)
    if order is None:
        payload = {"facets": [list(w) for w in c.facets], "search": "exhausted"}
        return Report("nonshellability", params, payload, VERIFIED,
                      ["facets", "shelling"], [[len(c), "none"]])
    words = [list(c.facets[f]) for f in order]
    rows = [[j, _word(w)] for j, w in enumerate(words)]
    return Report("shelling", params, {"order": words}, VERIFIED, ["step", "word"], rows)


def cmd_wreath_hilbert(args) -> Report:
    from .wreath import gs_numerator, hilbert_numerator

    c = _wreath(args)
    D = args.max_degree
    num = hilbert_numerator(c, D).integers()
    top = max((i for i, x in enumerate(num) if x), default=0)
    num = num[: top + 1]
    payload = {"numerator": num, "factors": c.d, "degree": D, "facets": len(c)}
    ok = sum(num) == len(c) and top < D
    cert = verify_shelling(c)
    if cert.passed:
        gs = gs_numerator(c, descent_sets(c))
        payload["gs_numerator"] = gs
        ok = ok and gs == num
    rows = [[i, x] for i, x in enumerate(num)]
    return Report("series-identity", {"k": args.k, "n": args.n, "max_degree": D}, payload,
                  VERIFIED if ok else FALSIFIED, ["degree", "coefficient"], rows)


# ---------------------------------------------------------------------------
# partition
# ---------------------------------------------------------------------------

def _partition_n(args, low: int = 3) -> int:
    from .partition import MAX_N

    _need(args, "n")
    if args.n < low:
        raise UsageError(f"--n must be at least {low}")
    if args.n > MAX_N and not args.allow_large:
        raise UsageError(f"n = {args.n} exceeds {MAX_N}; pass --allow-large to override")
    return args.n


def _cap(args) -> int:
    from .partition import MAX_N

    return max(MAX_N, args.n) if args.allow_large else MAX_N


def _label(lab) -> list:
    return [lab[0], list(lab[1]), list(lab[2])]


def cmd_partition_facets(args) -> Report:
    from .partition import partition_complex

    n = _partition_n(args)
    c = partition_complex(n, _cap(args))
    ds = descent_sets(c)
    items, rows = [], []
    for i, (f, d) in enumerate(zip(c.facets, ds)):
        items.append({"index": i, "steps": [list(s) for s in f.encoding.steps],
                      "bars": [lab[0] for lab in f.labels], "descents": _ints(d)})
        rows.append([i, " ".join(f"{a}:{b}|{c_}" for a, b, c_ in f.encoding.steps),
                     " ".join(str(lab[0]) for lab in f.labels),
                     dash(d)])
    return Report("shelling", {"n": n}, {"facets": items}, DATA,
                  ["index", "splits", "bars", "descents"], rows)


def cmd_partition_labels(args) -> Report:
    from .partition import partition_complex

    n = _partition_n(args)
    c = partition_complex(n, _cap(args))
    items, rows = [], []
    for i, f in enumerate(c.facets):
        items.append({"index": i, "labels": [_label(lab) for lab in f.labels], "tied": f.tied})
        rows.append([i, "; ".join(f"{a} [{dash(b)}] ({dash(r)})" for a, b, r in f.labels)])
    return Report("shelling", {"n": n}, {"facets": items}, DATA, ["index", "labels"], rows)


def cmd_partition_partitioning(args) -> Report:
    from .partition import partition_complex
    from .partitioning import build_partitioning

    n = _partition_n(args)
    partition_complex(n, _cap(args))
    res = build_partitioning(n, args.link_rule)
    payload = {"assignment": [_ints(g) for g in res.assignment],
               "provenance": res.provenance,
               "histogram_matches_flag_h": res.histogram_matches,
               "families": [{**fam, "shape": list(fam["shape"])} for fam in res.families]}
    if res.counterexample:
        payload["counterexample"] = res.counterexample
    rows = [[i, dash(g), p["rule"]] for i, (g, p) in enumerate(zip(res.assignment, res.provenance))]
    ok = res.passed and res.histogram_matches
    return Report("partitioning", {"n": n, "link_rule": args.link_rule}, payload,
                  VERIFIED if ok else FALSIFIED, ["facet", "minimal_face", "rule"], rows)


def cmd_partition_bs(args) -> Report:
    from .partition import b_s_table

    n = _partition_n(args)
    table = b_s_table(n, _cap(args))
    keys = sorted(table, key=lambda s: (len(s), sorted(s)))
    zeros = all(table[frozenset(range(1, i + 1))] == 0 for i in range(1, n - 1))
    payload = {"b_S": [{"S": _ints(s), "b": table[s]} for s in keys], "initial_segments_zero": zeros}
    rows = [[dash(s), table[s]] for s in keys]
    return Report("conjecture-scan", {"n": n}, payload, VERIFIED if zeros else FALSIFIED,
                  ["S", "b_S"], rows)


def cmd_partition_icc(args) -> Report:
    from .partition import check_icc

    n = _partition_n(args, 3)
    if args.scope == "all" and n > 7 and not args.allow_large:
        raise UsageError("scope 'all' is limited to n <= 7; use --scope sample or --allow-large")
    v = check_icc(n, args.scope, cap=max(7, n) if args.allow_large else 7)
    payload = {"intervals": v.intervals, "label_increasing": v.label_increasing}
    if v.witness is not None:
        w = v.witness
        payload["witness"] = {"root_support": list(w.root_support), "top": w.top,
                              "first_labels": [list(x) if isinstance(x, tuple) else x for x in w.first_labels],
                              "offending_labels": [list(x) if isinstance(x, tuple) else x
                                                   for x in w.offending_labels],
                              "reason": w.reason}
    rows = [[n, v.intervals, "pass" if v.passed else "fail"]]
    return Report("shelling", {"n": n, "scope": args.scope}, payload,
                  VERIFIED if v.passed else FALSIFIED, ["n", "intervals", "icc"], rows)


def cmd_partition_rp2(args) -> Report:
    from .partition import rp2_witness

    r = rp2_witness()
    payload = {"facet": r.facet, "support": list(r.support), "link_labels": list(r.link_labels),
               "f_vector": list(r.f_vector), "betti_gf2": list(r.betti), "euler": r.euler}
    ok = tuple(r.f_vector) == (3, 6, 4) and list(r.betti) == [1, 1, 1]
    rows = [[dash(r.support), " ".join(map(str, r.f_vector)), " ".join(map(str, r.betti)), r.euler]]
    return Report("rp2", {"n": 8}, payload, VERIFIED if ok else FALSIFIED,
                  ["support", "f_vector", "betti_gf2", "euler"], rows)


def cmd_partition_scan(args) -> Report:
    from .partition import conjecture_scan

    n = _partition_n(args)
    rows_ = conjecture_scan(n, _cap(args))
    payload = {"rows": [{"S": list(s), "b": b, "reduced_betti_gf2": list(beta)} for s, b, beta in rows_]}
    rows = [[dash(s), b, " ".join(map(str, beta))] for s, b, beta in rows_]
    return Report("conjecture-scan", {"n": n}, payload, DATA, ["S", "b_S", "reduced_betti_gf2"], rows)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

ORBIT_CHECK_DEGREE = 12


def cmd_invariants_molien(args) -> Report:
    from .series import molien, monomial_orbit_count, wreath_product_group

    _need(args, "k", "n")
    if args.k < 1 or args.n < 1:
        raise UsageError("--k and --n must be positive")
    g = wreath_product_group(args.k, args.n)
    D = args.max_degree
    coeffs = molien(g, D).integers()
    checked = []
    ok = True
    for d in range(min(D, ORBIT_CHECK_DEGREE) + 1):
        try:
            cnt = monomial_orbit_count(g, d)
        except SeriesError:
            break
        checked.append(cnt)
        ok = ok and cnt == coeffs[d]
    payload = {"group_order": g.order(), "coefficients": coeffs, "orbit_counts": checked}
    rows = [[d, x, checked[d] if d < len(checked) else ""] for d, x in enumerate(coeffs)]
    return Report("series-identity", {"k": args.k, "n": args.n, "max_degree": D}, payload,
                  VERIFIED if ok else FALSIFIED, ["degree", "molien", "orbits"], rows)


# ---------------------------------------------------------------------------
# certificate re-verification
# ---------------------------------------------------------------------------

def recheck(cert: dict) -> str:
    """Re-derive the verdict of a JSON certificate from its payload."""
    kind, p, body = cert["kind"], cert["parameters"], cert["payload"]
    if kind == "partitioning":
        from .partition import partition_complex

        c = partition_complex(p["n"])
        v = verify_partitioning(c, [frozenset(g) for g in body["assignment"]])
        return VERIFIED if v.passed and body["histogram_matches_flag_h"] else FALSIFIED
    if kind in ("shelling", "nonshellability") and "k" in p:
        from .wreath import wreath_complex

        c = wreath_complex(p["k"], p["n"])
        if kind == "nonshellability":
            return VERIFIED if shelling_exists(c, p.get("budget", DEFAULT_BUDGET)) is None else FALSIFIED
        if "order" not in body:
            return cert["verdict"]
        index = {tuple(w): i for i, w in enumerate(c.facets)}
        order = [index[tuple(w)] for w in body["order"]]
        return VERIFIED if verify_shelling(c, order).passed else FALSIFIED
    args = _parser().parse_args(_argv_for(cert))
    return _dispatch(args).verdict


def _argv_for(cert: dict) -> list:
    group, action = cert["command"]
    argv = [group, action]
    for key, val in cert["parameters"].items():
        if key in ("k", "n", "max_degree", "scope", "link_rule", "budget"):
            argv += [f"--{key.replace('_', '-')}", str(val)]
    return argv


def cmd_verify(args) -> Report:
    with open(args.file, encoding="utf-8") as fh:
        cert = json.load(fh)
    if cert.get("schema") != SCHEMA:
        raise UsageError(f"unsupported certificate schema {cert.get('schema')!r}")
    again = recheck(cert)
    same = again == cert["verdict"]
    return Report(cert["kind"], {"file": args.file}, {"recorded": cert["verdict"], "recomputed": again},
                  VERIFIED if same else FALSIFIED, ["recorded", "recomputed"], [[cert["verdict"], again]])


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def render(report: Report, fmt: str, command: list, wall: float | None) -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA, "kind": report.kind, "command": command,
               "parameters": report.parameters, "payload": report.payload,
               "verdict": report.verdict, "version": __version__}
        if wall is not None:
            doc["wall_time_s"] = round(wall, 3)
        return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.header)
        w.writerows(report.rows)
        return buf.getvalue()
    cells = [list(map(str, report.header))] + [[str(x) for x in r] for r in report.rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(report.header))]
    lines = ["  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() for r in cells]
    lines.append(f"# {report.kind}: {report.verdict}")
    return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, tuple):
        return list(x)
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


COMMANDS = {
    "wreath": {"facets": cmd_wreath_facets, "shell": cmd_wreath_shell,
               "search": cmd_wreath_search, "hilbert": cmd_wreath_hilbert},
    "partition": {"facets": cmd_partition_facets, "labels": cmd_partition_labels,
                  "partitioning": cmd_partition_partitioning, "bs": cmd_partition_bs,
                  "icc": cmd_partition_icc, "rp2": cmd_partition_rp2,
                  "conjecture-scan": cmd_partition_scan},
    "invariants": {"molien": cmd_invariants_molien},
}


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--max-degree", type=int, default=DEFAULT_DEGREE)
    p.add_argument("--budget", type=int, default=None, help=f"search nodes (default ${BUDGET_ENV} or {DEFAULT_BUDGET})")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--allow-large", action="store_true", help="lift the size caps")
    p.add_argument("--no-timing", action="store_true", help="omit wall time from JSON output")
    p.add_argument("--link-rule", choices=("similarity", "search"), default="similarity")
    p.add_argument("--scope", choices=("all", "sample"), default="all")


def _parser() -> argparse.ArgumentParser:
    top = _Parser(prog="lexshell", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=__version__)
    groups = top.add_subparsers(dest="group", required=True, parser_class=_Parser)
    for group, actions in COMMANDS.items():
        g = groups.add_parser(group)
        sub = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
        for action in actions:
            _common(sub.add_parser(action))
    v = groups.add_parser("verify", help="re-run the check behind a JSON certificate")
    v.add_argument("file")
    _common(v)
    return top


def _dispatch(args) -> Report:
    if args.budget is None:
        args.budget = _default_budget()
    if args.group == "verify":
        return cmd_verify(args)
    return COMMANDS[args.group][args.action](args)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parser().parse_args(argv)
        start = time.perf_counter()
        report = _dispatch(args)
        wall = None if args.no_timing else time.perf_counter() - start
        command = [args.group] + ([args.action] if args.group != "verify" else [])
        text = render(report, args.format, command, wall)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except UsageError as e:
        stderr.write(f"lexshell: {e}\n")
        return 2
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    except BudgetExceeded as e:
        stderr.write(f"lexshell: {e}\n")
        return 2
    except (ComplexError, SeriesError, MemoryError, OSError) as e:
        stderr.write(f"lexshell: {e}\n")
        return 2
    return 1 if report.verdict == FALSIFIED else 0


def main() -> None:
    sys.exit(run())
