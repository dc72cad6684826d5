"""Command-line interface.

Subcommands: analyze, lint, family, search, rt, enumreps.  The global flags
``--json``, ``--field``, ``--seed`` and ``--budget`` may appear before or
after the subcommand.  Reports go to stdout; diagnostics go to stderr.

Exit codes: 0 success, 2 parse / lint / parameter error, 3 non-commuting input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from dataclasses import asdict, dataclass, fields

from . import SCHEMA_VERSION, __version__
from .algebra import CommutingAction, generate_algebra
from .errors import (BudgetExceeded, CommatError, DiagramError, FieldTooSmall, IllFormedEndo,
                     NonCommuting, NotLocal, UnknownFamily)
from .exactlin import FieldSpec

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCOMMUTING = 3


class UsageError(Exception):
    """Bad parameters; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# Analysis report
# ---------------------------------------------------------------------------

@dataclass
class AnalysisReport:
    input: dict
    field: str
    dimM: int
    dimA: int
    radicalLengths: list | None
    minGenerators: int | None
    socleLength: int | None
    cyclic: bool | None
    cocyclic: bool | None
    faithful: bool
    relations: list
    gerstenhaberHolds: bool
    excess: int
    schemaVersion: int = SCHEMA_VERSION
    kind: str = "AnalysisReport"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown report fields {sorted(unknown)}")
        if data.get("schemaVersion", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValueError(f"unsupported schemaVersion {data['schemaVersion']!r}")
        return cls(**data)

    def human(self) -> str:
        lines = []
        ident = self.input
        if "file" in ident:
            lines.append(f"input: {ident['file']}")
        else:
            params = ", ".join(f"{k}={v}" for k, v in sorted(ident.get("params", {}).items()))
            lines.append(f"input: family {ident['family']}" + (f" ({params})" if params else ""))
        lines.append(f"field: {self.field}")
        lines.append(f"dimM: {self.dimM}")
        lines.append(f"dimA: {self.dimA}")
        lines.append(f"excess: {self.excess}")
        lines.append(f"gerstenhaberHolds: {_b(self.gerstenhaberHolds)}")
        lines.append(f"faithful: {_b(self.faithful)}")
        if self.radicalLengths is not None:
            lines.append("radicalLengths: " + " ".join(map(str, self.radicalLengths)))
            lines.append(f"minGenerators: {self.minGenerators}")
            lines.append(f"socleLength: {self.socleLength}")
            lines.append(f"cyclic: {_b(self.cyclic)}")
            lines.append(f"cocyclic: {_b(self.cocyclic)}")
        lines.append("relations:")
        lines.extend(f"  {r}" for r in self.relations)
        return "\n".join(lines)


def _b(x) -> str:
    return "true" if x else "false"


def analyze_action(action: CommutingAction, identity: dict) -> AnalysisReport:
    from .modtheory import action_invariants
    ga = generate_algebra(action)
    try:
        inv = action_invariants(action)
        rad, top, soc = list(inv.radical_lengths), inv.min_generators, inv.socle_length
        cyc, cocyc = inv.is_cyclic, inv.is_cocyclic
    except NotLocal:
        # not all generators nilpotent: the module invariants are not defined here
        rad = top = soc = cyc = cocyc = None
    return AnalysisReport(
        input=identity, field=str(action.field), dimM=action.dim, dimA=ga.dim,
        radicalLengths=rad, minGenerators=top, socleLength=soc, cyclic=cyc, cocyclic=cocyc,
        faithful=ga.annihilator().faithful, relations=ga.relation_strings(),
        gerstenhaberHolds=ga.dim <= action.dim, excess=ga.dim - action.dim)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _emit(args, payload: dict, human: str):
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(human.rstrip("\n") + "\n")


def _field(args, default: FieldSpec | None = None) -> FieldSpec | None:
    if args.field is None:
        return default
    try:
        return FieldSpec.parse(args.field)
    except ValueError as exc:
        raise UsageError(f"--field: {exc}") from None


def _edge_line(text: str, gen: str, src: str):
    pat = re.compile(rf"^\s*{re.escape(gen)}\s*:\s*{re.escape(src)}\s*->")
    for i, line in enumerate(text.splitlines(), 1):
        if pat.match(line):
            return i
    return None


def _load(path: str, args):
    """Parse a diagram file; returns (diagram, source text, lint violations)."""
    from .diagrams import parallelogram_lint, parse_diagram
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        d = parse_diagram(text)
    except DiagramError as exc:
        loc = f"{path}:{exc.line}" + (f":{exc.col}" if exc.col else "") if exc.line else path
        raise UsageError(f"{loc}: {exc.message}") from None
    field = _field(args)
    if field is not None:
        d = d.with_field(field)
    return d, text, parallelogram_lint(d)


def _lint_messages(path, text, violations):
    out = []
    for v in violations:
        line = _edge_line(text, v.first, v.source)
        loc = f"{path}:{line}" if line else path
        out.append(f"{loc}: lint: {v}")
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    from .diagrams import realize, serialize
    d, text, violations = _load(args.path, args)
    if violations and not args.skip_lint:
        for msg in _lint_messages(args.path, text, violations):
            print(msg, file=sys.stderr)
        return EXIT_INPUT
    act = realize(d)  # raises NonCommuting when the lint was skipped on a bad diagram
    report = analyze_action(act, {"file": os.path.basename(args.path)})
    _emit(args, report.to_dict(), report.human())
    if args.emit_cdg:
        with open(args.emit_cdg, "w", encoding="utf-8") as fh:
            fh.write(serialize(d))
    return EXIT_OK


def cmd_lint(args) -> int:
    d, text, violations = _load(args.path, args)
    for msg in _lint_messages(args.path, text, violations):
        print(msg, file=sys.stderr)
    payload = {"schemaVersion": SCHEMA_VERSION, "kind": "LintReport",
               "file": os.path.basename(args.path), "clean": not violations,
               "violations": [{"source": v.source, "middle": v.middle, "end": v.end,
                               "first": v.first, "second": v.second} for v in violations]}
    human = "clean" if not violations else f"{len(violations)} violation(s)"
    _emit(args, payload, human)
    return EXIT_OK if not violations else EXIT_INPUT


def _family_params(args, name):
    from .diagrams import FAMILIES
    params = {}
    for key in FAMILIES[name]:
        value = getattr(args, key, None)
        if value is None:
            raise UsageError(f"family {name} needs --{key}")
        if key == "ns":
            try:
                value = [int(x) for x in value.split(",") if x.strip()]
            except ValueError:
                raise UsageError(f"--ns expects comma-separated integers, got {value!r}") from None
        params[key] = value
    return params


def cmd_family(args) -> int:
    from .diagrams import FAMILIES, ModuleDiagram, family, monomial_diagram, realize, serialize
    from .exactlin import GF2
    if args.name not in FAMILIES:
        raise UsageError(str(UnknownFamily(args.name)))
    params = _family_params(args, args.name)
    field = _field(args, GF2)
    try:
        obj = family(args.name, field, **params)
    except (FieldTooSmall, ValueError) as exc:
        raise UsageError(str(exc)) from None
    diagram = None
    if isinstance(obj, ModuleDiagram):
        diagram = obj
    elif not isinstance(obj, CommutingAction):
        diagram = monomial_diagram(obj)
    action = realize(diagram) if diagram is not None else obj
    report = analyze_action(action, {"family": args.name, "params": params})
    _emit(args, report.to_dict(), report.human())
    if args.emit_cdg:
        if diagram is None:
            print(f"family {args.name} has no diagram; nothing written", file=sys.stderr)
        else:
            with open(args.emit_cdg, "w", encoding="utf-8") as fh:
                fh.write(serialize(diagram))
    return EXIT_OK


def cmd_search(args) -> int:
    from .exactlin import GF2
    from .search import SearchConfig, run_search
    try:
        cfg = SearchConfig(args.gens, args.max_verts, _field(args, GF2),
                           args.budget or 10 ** 6, args.workers, args.checkpoint)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_search(cfg)
    text = report.dumps()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.witness_dir:
        os.makedirs(args.witness_dir, exist_ok=True)
        for key, w in (("best_excess", report.bestExcess), ("best_ratio", report.bestRatio)):
            if w is not None:
                with open(os.path.join(args.witness_dir, key + ".cdg"), "w", encoding="utf-8") as fh:
                    fh.write(w.cdg)
    data = report.to_json()
    lines = [f"gens: {cfg.gens}", f"maxVertices: {cfg.max_verts}", f"field: {cfg.field}",
             f"candidatesEnumerated: {report.candidatesEnumerated}",
             f"candidatesRealized: {report.candidatesRealized}",
             "countsBySize: " + " ".join(f"{k}:{v}" for k, v in data["countsBySize"].items()),
             f"exhaustive: {_b(report.exhaustive)}"]
    for key in ("bestExcess", "bestRatio"):
        w = data[key]
        lines.append(f"{key}: {w['value']} (dimM {w['dimM']}, dimA {w['dimA']})")
        lines.extend("  " + ln for ln in w["cdg"].splitlines())
    for f in report.flaggedFindings:
        lines.append(f"FLAGGED: {f['finding']} (excess {f['excess']})")
    lines.append(f"scope: {report.scope}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_rt(args) -> int:
    from .pid import (PidModuleWithEndo, describe_ring, ideal_chain, parse_factors,
                      parse_matrix_literal, parse_ring, random_endo, rt_verify)
    try:
        R = parse_ring(args.ring)
        factors = parse_factors(R, args.factors)
    except (ValueError, CommatError) as exc:
        raise UsageError(str(exc)) from None
    if args.random:
        endo = random_endo(factors, random.Random(args.seed))
    else:
        try:
            endo = parse_matrix_literal(R, args.endo, factors.d)
        except (ValueError, CommatError) as exc:
            raise UsageError(f"--endo: {exc}") from None
    try:
        mod = PidModuleWithEndo(factors, endo)
    except IllFormedEndo as exc:
        raise UsageError(f"IllFormedEndo: {exc}") from None
    report = rt_verify(mod)
    chain = ideal_chain(mod)
    data = {"schemaVersion": SCHEMA_VERSION, "kind": "RtReport", **report.to_json(),
            "endo": [[R.to_json(x) for x in row] for row in mod.endo],
            "idealChain": chain.to_json()}
    data["ring"] = describe_ring(R)
    ring = data["ring"]
    ring_name = "Z" if ring["kind"] == "Integers" else (
        f"F{ring['characteristic']}[x]" if ring["characteristic"] else "Q[x]")
    lines = [f"ring: {ring_name}",
             "factorsM: " + ", ".join(report.m_factors.fmt()),
             "factorsA: " + ", ".join(report.a_factors.fmt()),
             f"ltA: {report.ltA}", f"ltM: {report.ltM}",
             f"holds: {_b(report.holds)}", f"embedding: {_b(report.embedding)}",
             f"idealBound: {report.ideal_bound}"]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def _algebra(spec: str, field: FieldSpec):
    from .modtheory import PRESETS, frobenius, preset, square_zero, st_power
    name, _, arg = spec.partition(":")
    try:
        if name in PRESETS:
            return preset(name, field)
        if name == "frobenius":
            return frobenius(field, [int(x) for x in arg.split(",")])
        if name == "st_power":
            return st_power(field, int(arg))
        if name == "square_zero":
            return square_zero(field, int(arg))
    except ValueError as exc:
        raise UsageError(f"--algebra: {exc}") from None
    known = ", ".join(list(PRESETS) + ["frobenius:n1,n2,..", "st_power:n", "square_zero:d"])
    raise UsageError(f"unknown algebra {spec!r}; known: {known}")


def cmd_enumreps(args) -> int:
    from .exactlin import GF2
    from .modtheory import EnumerationStats, enumerate_reps
    field = _field(args, GF2)
    if not field.is_finite:
        raise UsageError("enumreps needs a prime field")
    if args.dim < 1:
        raise UsageError("--dim must be positive")
    A = _algebra(args.algebra, field)
    budget = args.budget or 10 ** 7
    rows = []
    listed = []
    for d in range(1, args.dim + 1) if args.upto else [args.dim]:
        stats = EnumerationStats()
        try:
            for mod in enumerate_reps(A, d, budget=budget, stats=stats):
                if args.list:
                    listed.append({"dim": d, "faithful": mod.is_faithful(),
                                   "generators": [m.tolist() for m in mod.generator_matrices]})
        except BudgetExceeded:
            stats.exhaustive = False
        rows.append({"dim": d, "modules": stats.modules, "faithful": stats.faithful,
                     "nodes": stats.nodes, "exhaustive": stats.exhaustive})
    data = {"schemaVersion": SCHEMA_VERSION, "kind": "EnumerationReport",
            "algebra": args.algebra, "field": str(field), "dimA": A.dim,
            "loewyLength": A.loewy_length(), "results": rows}
    if args.list:
        data["modules"] = listed
    lines = [f"algebra: {args.algebra} (dim {A.dim}, Loewy length {A.loewy_length()}) over {field}"]
    for r in rows:
        lines.append(f"dim {r['dim']}: {r['modules']} modules, {r['faithful']} faithful, "
                     f"{r['nodes']} nodes, exhaustive {_b(r['exhaustive'])}")
    for entry in listed:
        lines.append(f"  d={entry['dim']} faithful={_b(entry['faithful'])} {entry['generators']}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _global_flags(parser, suppress: bool):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--json", action="store_true", default=default(False),
                        help="emit the report as JSON")
    parser.add_argument("--field", default=default(None),
                        help="coefficient field: Q or F<p> (default F2, or the file's field)")
    parser.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    parser.add_argument("--budget", type=int, default=default(None),
                        help="work budget (search: classes; enumreps: backtracking nodes)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    p = argparse.ArgumentParser(prog="commat",
                                description="Commuting matrices, the algebras they generate "
                                            "and their modules.")
    p.add_argument("--version", action="version", version=f"commat {__version__}")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="analyse a .cdg diagram file")
    a.add_argument("path")
    a.add_argument("--emit-cdg", metavar="PATH", help="write the normalised diagram")
    a.add_argument("--skip-lint", action="store_true",
                   help="skip the parallelogram lint and rely on the commutation check")
    a.set_defaults(func=cmd_analyze)

    l = sub.add_parser("lint", parents=[common], help="check a .cdg file for commutation")
    l.add_argument("path")
    l.set_defaults(func=cmd_lint)

    f = sub.add_parser("family", parents=[common], help="instantiate and analyse a family")
    f.add_argument("name")
    for key in ("m", "n", "e0", "e1", "i"):
        f.add_argument(f"--{key}", type=int)
    f.add_argument("--ns", help="comma-separated exponents for frobenius")
    f.add_argument("--emit-cdg", metavar="PATH", help="write the diagram when one exists")
    f.set_defaults(func=cmd_family)

    s = sub.add_parser("search", parents=[common], help="exhaustive diagram search")
    s.add_argument("--gens", type=int, required=True)
    s.add_argument("--max-verts", type=int, required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", metavar="PATH", help="also write the JSON report here")
    s.add_argument("--witness-dir", metavar="DIR", help="write witness .cdg files here")
    s.add_argument("--checkpoint", metavar="PATH", help="resumable level checkpoint")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("rt", parents=[common],
                       help="length of k[f] against length of M over a PID")
    r.add_argument("--ring", default="Z", help="Z, Fpx or Qx")
    r.add_argument("--factors", required=True, help="invariant factors, e.g. 4,2 or x^2,x")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--endo", help="matrix literal [[..],[..]], or 0 / 1")
    g.add_argument("--random", action="store_true", help="random well-defined endomorphism")
    r.set_defaults(func=cmd_rt)

    e = sub.add_parser("enumreps", parents=[common], help="enumerate modules of a given dimension")
    e.add_argument("--algebra", required=True)
    e.add_argument("--dim", type=int, required=True)
    e.add_argument("--upto", action="store_true", help="all dimensions 1..dim")
    e.add_argument("--list", action="store_true", help="list every module found")
    e.set_defaults(func=cmd_enumreps)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"commat {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonCommuting as exc:
        where = getattr(args, "path", None)
        print(f"{where + ': ' if where else ''}{exc}", file=sys.stderr)
        return EXIT_NONCOMMUTING
    except CommatError as exc:
        print(f"commat {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
