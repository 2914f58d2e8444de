"""Command line interface: ``rackhom <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .census import census_structure_report, enumerate_quandles, write_census
from .constructors import (GQParseError, GraphicSpec, SpecError, dihedral, format_gq,
                           graphic_from_spec, parse_gq, recognize_example13, trivial)
from .extensions import (BudgetError, Cocycle2, CocycleError, extend, orbit_indicator_cocycle,
                         verify_prop_213)
from .homology import ChainSpec, VariantError, homology, predict_h2_graphic
from .intlin import BoundaryError, HomologyGroup, SNFBudgetError
from .knots import FIXTURE_DIAGRAMS, PDParseError, cocycle_invariant, colorings, parse_pd
from .magma import MagmaTable, classify, find_quasigroup_subspindles, orbits

__all__ = ["main", "build_parser", "RunConfig", "BUILTIN", "TABLE5",
           "scan_c31", "scan_c32", "c_sequence", "load_source"]

EXIT_OK, EXIT_ABORT, EXIT_INPUT = 0, 1, 2

DEFAULT_TUPLE_BUDGET = 10**7


def _default_memory_budget() -> int:
    """8 GiB, or half the physical memory when that is smaller."""
    try:
        phys = os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (ValueError, OSError, AttributeError):
        return 8 * 2**30
    return min(8 * 2**30, phys // 2)


DEFAULT_MEMORY_BUDGET = _default_memory_budget()
# rough cost of one stored sparse entry in the elimination workspace
BYTES_PER_ENTRY = 200

TABLE5 = (
    "GQ(Id,(0 1),(0 1)|(2 3),Id,(2 3)|(4 5),(4 5),Id)",
    "GQ(Id,(0 1 2),(0 1 2)|(3 4 5),Id,(3 4 5)|(6 7 8),(6 7 8),Id)",
    "GQ(Id,(0 1),(0 1),(0 1)|(2 3),Id,(2 3),(2 3)|(4 5),(4 5),Id,(4 5)|(6 7),(6 7),(6 7),Id)",
    "GQ(Id,(0 1 2 3),(0 2)(1 3)|(4 6)(5 7),Id,(4 5 6 7)|(8 9 10 11),(8 10)(9 11),Id)",
    "GQ(Id,(0 1 2 3),(0 2)(1 3)|(4 5 6 7),Id,(4 6)(5 7)|(8 9 10 11),(8 10)(9 11),Id)",
)

BUILTIN = {
    "r3": lambda: dihedral(3),
    "r4": lambda: dihedral(4),
    "r5": lambda: dihedral(5),
    **{f"t{k}": (lambda k=k: trivial(k)) for k in range(1, 7)},
    **{f"table5-{i}": (lambda s=s: graphic_from_spec(parse_gq(s))) for i, s in enumerate(TABLE5, 1)},
}


class InputError(ValueError):
    pass


class Abort(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    fmt: str = "pretty"
    threads: int = 1
    tuple_budget: int = DEFAULT_TUPLE_BUDGET
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    force: bool = False

    def __post_init__(self):
        if self.fmt not in ("pretty", "json", "csv"):
            raise InputError(f"unknown format {self.fmt!r}")
        if self.threads < 1 or self.tuple_budget < 1 or self.memory_budget < 1:
            raise InputError("thread count and budgets must be positive")


@dataclass
class Report:
    """What a command produced: a JSON payload, CSV rows and pretty text."""

    payload: dict
    rows: list = field(default_factory=list)
    text: str = ""

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload, indent=2, sort_keys=True)
        if fmt == "csv":
            if not self.rows:
                return ""
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(self.rows)
            return buf.getvalue().rstrip("\n")
        return self.text


# ------------------------------------------------------------------ inputs

def _read_table_text(text: str, origin: str) -> MagmaTable | GraphicSpec:
    text = text.strip()
    if text.startswith("GQ"):
        return parse_gq(text)
    if text.startswith("{"):
        return MagmaTable.from_json(text)
    try:
        return MagmaTable.from_text(text)
    except ValueError as e:
        raise InputError(f"{origin}: {e}") from None


def load_source(source: str | None, path: str | None) -> MagmaTable | GraphicSpec:
    """A builtin name, a GQ string, or a table file."""
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise InputError(f"no such file: {path}")
        return _read_table_text(p.read_text(), path)
    if source is None:
        raise InputError("give a table name, a GQ string or --file")
    if source in BUILTIN:
        return BUILTIN[source]()
    if source.strip().startswith("GQ"):
        return parse_gq(source)
    raise InputError(f"unknown table {source!r}; builtins are {', '.join(BUILTIN)}")


def as_table(src: MagmaTable | GraphicSpec) -> MagmaTable:
    if isinstance(src, MagmaTable):
        return src
    if not src.finite:
        raise InputError("infinite orbits are only handled by --predict")
    return graphic_from_spec(src)


def _degrees(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or any(d < 0 for d in out):
        raise InputError(f"bad degree list {text!r}")
    return out


def _basis_size(t: MagmaTable, spec: ChainSpec) -> int:
    n, d = t.n, spec.degree
    if spec.variant == "quandle":
        return n * (n - 1) ** max(d - 1, 0)
    return n ** d


def _check_budget(cfg: RunConfig, t: MagmaTable, spec: ChainSpec) -> None:
    if cfg.force:
        return
    size = _basis_size(t, spec)
    if size > cfg.tuple_budget:
        raise Abort(f"degree {spec.degree} needs {size} basis tuples (budget {cfg.tuple_budget}); "
                    "use --force")
    # d_{n+1} has about 2n entries per column
    est = 2 * (spec.degree + 1) * _basis_size(t, spec.at(spec.degree + 1)) * BYTES_PER_ENTRY
    if est > cfg.memory_budget:
        raise Abort(f"degree {spec.degree} needs about {est / 2**30:.1f} GiB; use --force")


def _homology_job(args) -> HomologyGroup:
    t, spec, max_entries = args
    try:
        return homology(t, spec, max_entries=max_entries)
    except SNFBudgetError as e:
        raise Abort(f"degree {spec.degree}: {e}; use --force") from None


def _homologies(cfg: RunConfig, t: MagmaTable, specs: list[ChainSpec]) -> list[HomologyGroup]:
    for s in specs:
        _check_budget(cfg, t, s)
    workers = min(cfg.threads, len(specs))
    cap = None if cfg.force else cfg.memory_budget // (BYTES_PER_ENTRY * max(workers, 1))
    jobs = [(t, s, cap) for s in specs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_homology_job, jobs))
    return [_homology_job(j) for j in jobs]


# ---------------------------------------------------------------- commands

def cmd_check(cfg: RunConfig, src) -> Report:
    t = as_table(src)
    cls = classify(t)
    orb = orbits(t)
    spec = recognize_example13(t) if "quandle" in cls else None
    subq = [sorted(s) for s in find_quasigroup_subspindles(t)] if "spindle" in cls else []
    payload = {
        "n": t.n,
        "flags": sorted(cls.flags),
        "n_quandle_order": cls.n_quandle_order,
        "orbit_sizes": list(orb.sizes),
        "orbits": [list(o) for o in orb.orbits],
        "example13": None if spec is None else format_gq(spec),
        "quasigroup_subquandles": subq,
    }
    rows = [{"key": k, "value": json.dumps(v)} for k, v in sorted(payload.items())]
    lines = [
        f"order:     {t.n}",
        f"flags:     {', '.join(sorted(cls.flags)) or '-'}",
        f"n-quandle: {cls.n_quandle_order}",
        f"orbits:    {len(orb.orbits)} of sizes {', '.join(map(str, orb.sizes))}",
        f"block form: {payload['example13'] or 'not of block type'}",
        f"quasigroup subquandles: {len(subq)}",
    ]
    return Report(payload, rows, "\n".join(lines))


def cmd_homology(cfg: RunConfig, src, degrees: list[int], variant: str, predict: bool) -> Report:
    payload: dict = {"variant": variant, "degrees": {}}
    rows = []
    lines = []
    if predict:
        if not isinstance(src, GraphicSpec) or not src.uniform_shift:
            raise InputError("--predict needs a uniform GQ(o1|...|ok) string")
        pred = predict_h2_graphic(src)
        payload["prediction"] = pred.to_json()
        lines.append(f"predicted H2 ({variant}): {_pick(pred, variant).primary()}")
        if pred.note:
            lines.append(f"note: {pred.note}")
        if not src.finite:
            payload["degrees"] = {}
            return Report(payload, [{"degree": 2, "source": "predicted",
                                     "free_rank": _pick(pred, variant).free_rank,
                                     "torsion": " ".join(map(str, _pick(pred, variant).torsion)),
                                     "primary": _pick(pred, variant).primary()}],
                          "\n".join(lines))
        degrees = sorted(set(degrees) | {2})
    t = as_table(src)
    specs = [ChainSpec.parse(variant, d) for d in degrees]
    groups = _homologies(cfg, t, specs)
    for d, g in zip(degrees, groups):
        payload["degrees"][str(d)] = g.to_json()
        rows.append({"degree": d, "source": "matrix", "free_rank": g.free_rank,
                     "torsion": " ".join(map(str, g.torsion)), "primary": g.primary()})
        lines.append(f"H_{d} = {g.primary()}    torsion: {g.primary(free=False)}")
    if predict:
        got = groups[degrees.index(2)]
        want = _pick(pred, variant)
        agree = got == want
        payload["agree"] = agree
        lines.append(f"predictor and matrix agree: {str(agree).lower()}")
    return Report(payload, rows, "\n".join(lines))


def _pick(pred, variant: str) -> HomologyGroup:
    if variant == "rack":
        return pred.rack
    if variant == "quandle":
        return pred.quandle
    if variant == "degenerate":
        return pred.degenerate
    i = int(variant.split("=")[1])
    return pred.per_orbit[i]


def c_sequence(n: int) -> int:
    """c_0 = c_1 = 0, c_{2j} = 2 c_{2j-1} + 2, c_{2j+1} = 2 c_{2j}."""
    c = 0
    for i in range(2, n + 1):
        c = 2 * c + 2 if i % 2 == 0 else 2 * c
    return c


def scan_c32(cfg: RunConfig, sizes: list[int], degrees: list[int]) -> list[dict]:
    cells = []
    for o in sizes:
        t = graphic_from_spec(GraphicSpec((o, o), None, True))
        specs = [ChainSpec("quandle", n) for n in degrees]
        for n, g in zip(degrees, _homologies(cfg, t, specs)):
            want = c_sequence(n)
            got = g.count_factor(o)
            ok = g.torsion == (o,) * want
            cells.append({"o": o, "n": n, "torsion": g.primary(free=False), "exponent": got,
                          "c_n": want, "verdict": "CONSISTENT" if ok else "INCONSISTENT"})
    return cells


def scan_c31(cfg: RunConfig, sources: list[str], degrees: list[int] | None) -> list[dict]:
    cells = []
    for s in sources:
        t = as_table(load_source(s, None))
        sizes = orbits(t).sizes
        k = len(sizes)
        d = math.gcd(*sizes)
        applies = d != 1 and max(sizes) > 2
        degs = degrees or list(range(1, k + 1))
        specs = [ChainSpec("quandle", n) for n in degs]
        for n, g in zip(degs, _homologies(cfg, t, specs)):
            has = g.contains_cyclic(d)
            expected = n >= k
            if not applies:
                verdict = "CONSISTENT (hypothesis not met)"
            else:
                verdict = "CONSISTENT" if has == expected else "INCONSISTENT"
            cells.append({"quandle": s, "sizes": " ".join(map(str, sizes)), "k": k, "d": d,
                          "n": n, "torsion": g.primary(free=False), "contains_Z_d": has,
                          "verdict": verdict})
    return cells


def cmd_scan(cfg: RunConfig, which: str, sizes, degrees, sources) -> Report:
    if which == "c32":
        cells = scan_c32(cfg, sizes or [2], degrees or [2, 3, 4])
        lines = [f"o={c['o']} n={c['n']}: tor = {c['torsion']}, exponent {c['exponent']}, "
                 f"c_n = {c['c_n']}: {c['verdict']}" for c in cells]
    else:
        cells = scan_c31(cfg, sources or [f"table5-{i}" for i in range(1, 6)], degrees)
        lines = [f"{c['quandle']} (sizes {c['sizes']}, d={c['d']}) n={c['n']}: "
                 f"tor = {c['torsion']}, Z_{c['d']} inside: {str(c['contains_Z_d']).lower()}: "
                 f"{c['verdict']}" for c in cells]
    consistent = all(c["verdict"].startswith("CONSISTENT") for c in cells)
    lines.append(f"overall: {'CONSISTENT' if consistent else 'INCONSISTENT'} (evidence, not proof)")
    return Report({"conjecture": which, "cells": cells, "consistent": consistent},
                  cells, "\n".join(lines))


def cmd_census(cfg: RunConfig, n: int, out: str | None, structure: bool) -> Report:
    res = enumerate_quandles(n, workers=cfg.threads)
    payload = res.to_json()
    lines = [f"{res.total_quandles} quandles, {res.graphic_quandles} graphic"]
    if out:
        manifest = write_census(res, out)
        payload["manifest"] = str(manifest)
        lines.append(f"wrote {res.total_quandles} tables and {manifest}")
    if structure:
        rep = census_structure_report(n, workers=cfg.threads)
        payload["structure"] = rep.to_json()
        built, g = rep.graphic_constructible
        lines.append(f"orders 1..{n}: {rep.graphic_or_quasigroup} of {rep.total} classes are "
                     f"graphic or contain a quasigroup subquandle; {built} of {g} graphic "
                     "classes are block constructions")
    rows = [{"index": c["index"], "flags": " ".join(c["flags"])} for c in payload["classes"]]
    return Report(payload, rows, "\n".join(lines))


def cmd_extend(cfg: RunConfig, src, m: int, verify: bool) -> Report:
    if verify:
        if not isinstance(src, GraphicSpec) or not src.uniform_shift:
            raise InputError("--verify-213 needs a uniform GQ(o1|...|ok) string")
        chk = verify_prop_213(list(src.sizes), m)
        target = format_gq(GraphicSpec(tuple(m * s for s in src.sizes), None, True))
        payload = chk.to_json()
        payload["target"] = target
        text = (f"isomorphic to {target}: {str(chk.holds).lower()}\n"
                f"extension orbit sizes: {', '.join(map(str, chk.extension_orbit_sizes))}")
        return Report(payload, [{"target": target, "holds": chk.holds}], text)
    t = as_table(src)
    c = orbit_indicator_cocycle(t, m)
    e = extend(t, c)
    payload = {"cocycle": c.to_json(), "extension": e.to_json(),
               "flags": sorted(classify(e).flags)}
    return Report(payload, [{"row": i, "entries": " ".join(map(str, r))} for i, r in enumerate(e.op)],
                  e.to_text().rstrip("\n"))


def _diagram(pd: str):
    """A PD string, or the name of a built-in fixture diagram."""
    return parse_pd(FIXTURE_DIAGRAMS.get(pd, pd))


def cmd_color(cfg: RunConfig, pd: str, src) -> Report:
    d = _diagram(pd)
    t = as_table(src)
    cols = colorings(d, t)
    payload = {"colorings": len(cols), "arcs": list(d.arcs), "components": d.components}
    return Report(payload, [{"colorings": len(cols)}], str(len(cols)))


def cmd_invariant(cfg: RunConfig, pd: str, src, cocycle_path: str | None, m: int | None) -> Report:
    d = _diagram(pd)
    t = as_table(src)
    if cocycle_path:
        p = Path(cocycle_path)
        if not p.is_file():
            raise InputError(f"no such file: {cocycle_path}")
        c = Cocycle2.from_json(p.read_text())
    elif m:
        c = orbit_indicator_cocycle(t, m)
    else:
        raise InputError("give --cocycle FILE or --m for the orbit-indicator cocycle")
    inv = cocycle_invariant(d, t, c)
    payload = inv.to_json()
    text = " + ".join(f"{k}*u^{v}" for v, k in sorted(inv.counts.items()))
    rows = [{"value": v, "count": k} for v, k in sorted(inv.counts.items())]
    return Report(payload, rows, text)


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("pretty", "json", "csv"), default="pretty")
    common.add_argument("--threads", type=int, default=None,
                        help="worker count (default: $RACKHOM_THREADS or 1)")
    common.add_argument("--file", help="read the table from a file (table text, JSON or GQ string)")

    parser = argparse.ArgumentParser(prog="rackhom",
                                     description="Rack and quandle homology of finite quandles")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="classify a table")
    p.add_argument("source", nargs="?")

    p = sub.add_parser("homology", parents=[common], help="homology groups by Smith normal form")
    p.add_argument("source", nargs="?")
    p.add_argument("-n", dest="degrees", default="1,2", help="degree list, e.g. 2,3,4 or 1-3")
    p.add_argument("--variant", default="rack",
                   help="rack, quandle, degenerate or orbit=<i>")
    p.add_argument("--predict", action="store_true", help="closed-form H2 for uniform GQ specs")
    p.add_argument("--force", action="store_true", help="ignore size budgets")
    p.add_argument("--budget", type=int, default=DEFAULT_TUPLE_BUDGET,
                   help="largest chain group size in basis tuples")

    p = sub.add_parser("scan-conjectures", parents=[common], help="numerical evidence: c31 torsion onset, c32 exponent recurrence")
    p.add_argument("which", choices=("c31", "c32"))
    p.add_argument("-n", dest="degrees", default=None)
    p.add_argument("--o", dest="sizes", default=None, help="orbit sizes for c32, e.g. 2,3")
    p.add_argument("--quandle", action="append", dest="sources",
                   help="table or GQ string for c31 (repeatable; default: table5-1 .. table5-5)")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("census", parents=[common], help="quandles of order n up to isomorphism")
    p.add_argument("n", type=int)
    p.add_argument("--out", help="directory for q<n>_<i>.tbl files and manifest.json")
    p.add_argument("--structure", action="store_true",
                   help="graphic / quasigroup / block-construction report for orders 1..n")

    p = sub.add_parser("extend", parents=[common], help="extension by the orbit-indicator cocycle")
    p.add_argument("source", nargs="?")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--verify-213", dest="verify", action="store_true",
                   help="compare with GQ(m*o1|...|m*ok) up to isomorphism")

    p = sub.add_parser("color", parents=[common], help="count colorings of a PD diagram")
    p.add_argument("pd", help="PD string or fixture name (%s)" % ", ".join(FIXTURE_DIAGRAMS))
    p.add_argument("--quandle", dest="source")

    p = sub.add_parser("invariant", parents=[common], help="2-cocycle state-sum invariant")
    p.add_argument("pd", help="PD string or fixture name (%s)" % ", ".join(FIXTURE_DIAGRAMS))
    p.add_argument("--quandle", dest="source")
    p.add_argument("--cocycle", help='JSON file {"m": m, "phi": [[...]]}')
    p.add_argument("--m", type=int, default=None)
    return parser


def _threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("RACKHOM_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"RACKHOM_THREADS={env!r} is not an integer") from None
    return 1


def run(argv=None) -> tuple[int, str]:
    """Parse and execute; returns the exit code and the rendered output."""
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.fmt, _threads(args.threads),
                        getattr(args, "budget", DEFAULT_TUPLE_BUDGET),
                        force=getattr(args, "force", False))
        c = args.command
        if c == "check":
            rep = cmd_check(cfg, load_source(args.source, args.file))
        elif c == "homology":
            variant = args.variant
            ChainSpec.parse(variant, 1)
            rep = cmd_homology(cfg, load_source(args.source, args.file),
                               _degrees(args.degrees), variant, args.predict)
        elif c == "scan-conjectures":
            rep = cmd_scan(cfg, args.which,
                           _degrees(args.sizes) if args.sizes else None,
                           _degrees(args.degrees) if args.degrees else None,
                           args.sources)
        elif c == "census":
            if args.n < 1:
                raise InputError("order must be positive")
            rep = cmd_census(cfg, args.n, args.out, args.structure)
        elif c == "extend":
            if args.m < 2:
                raise InputError("--m must be at least 2")
            rep = cmd_extend(cfg, load_source(args.source, args.file), args.m, args.verify)
        elif c == "color":
            rep = cmd_color(cfg, args.pd, load_source(args.source, args.file))
        else:
            rep = cmd_invariant(cfg, args.pd, load_source(args.source, args.file),
                                args.cocycle, args.m)
    except (Abort, BoundaryError, BudgetError) as e:
        return EXIT_ABORT, f"rackhom: aborted: {e}"
    except (InputError, GQParseError, SpecError, PDParseError, VariantError, CocycleError,
            ValueError, json.JSONDecodeError) as e:
        return EXIT_INPUT, f"rackhom: error: {e}"
    return EXIT_OK, rep.render(cfg.fmt)


def main(argv=None) -> int:
    code, out = run(argv)
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    if out:
        print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
