"""Command-line interface.

Exit codes: 0 success, 1 structured negative verdict, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .assembly import PipelineConfig, find_hamilton_cycle, verify_hamilton_cycle
from .bipartite import Bipartition, check_bipartition, is_close_to_bipartite
from .errors import CapacityError, GraphFormatError, HypothesisError
from .graph import Graph
from .instances import (
    AutomorphismWitness,
    CayleySpec,
    CayleySpecError,
    cayley_graph,
    chained_cliques,
    circulant,
    double_clique,
    fixture,
    random_graph,
)
from .matching import FractionalMatching, fvc, nu_star
from .pathition import EndpointRequest, PathSystem, verify_path_system
from .robustness import CutWitness, check_cut_witness, is_l_iron, islands

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    alpha: Fraction | None = None
    c: Fraction = Fraction(1, 18)
    exact_limit: int = 18
    backtrack_limit: int = 24
    seed: int = 0
    format: str = "json"
    budget_ms: int | None = None

    def __post_init__(self):
        if self.alpha is not None and not 0 < self.alpha <= 1:
            raise UsageError("--alpha must lie in (0, 1]")
        if not 0 < self.c < Fraction(1, 17):
            raise UsageError("--c must lie in (0, 1/17)")
        if self.exact_limit < 4 or self.backtrack_limit < 4:
            raise UsageError("exact limits must be at least 4")
        if self.format not in ("json", "dot", "text"):
            raise UsageError("--format must be json, dot or text")

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(
            c=self.c,
            dp_limit=self.exact_limit,
            backtrack_limit=max(self.backtrack_limit, self.exact_limit),
            budget_ms=self.budget_ms,
        )


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _read_graph(path: str) -> Graph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return Graph.from_text(text)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


# gen ----------------------------------------------------------------------

def _parse_offsets(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad offset list {text!r}") from exc


def cmd_gen(args) -> int:
    kind, params = args.kind, args.params
    try:
        if kind == "circulant":
            if len(params) != 2:
                raise UsageError("usage: gen circulant N OFFSETS")
            g, w = circulant(int(params[0]), _parse_offsets(params[1]))
        elif kind == "double_clique":
            if len(params) != 1:
                raise UsageError("usage: gen double_clique N")
            g, w = double_clique(int(params[0]))
        elif kind == "chained":
            nums = [int(p) for p in params] or [3, 4]
            g, w = chained_cliques(*nums)
        elif kind == "fixture":
            if len(params) != 1:
                raise UsageError("usage: gen fixture NAME")
            g, w = fixture(params[0])
        elif kind == "cayley":
            if len(params) != 1:
                raise UsageError("usage: gen cayley SPEC.json")
            g, w = cayley_graph(CayleySpec.from_json(_read_json(params[0])))
        elif kind == "random":
            if len(params) != 2:
                raise UsageError("usage: gen random N P")
            g, w = random_graph(int(params[0]), float(params[1]), args.seed), None
        else:
            raise UsageError(f"unknown generator {kind!r}")
    except (CayleySpecError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        Path(args.out).write_text(g.to_text())
        if w is not None:
            Path(_witness_path(args.out)).write_text(_dumps(w.to_json()) + "\n")
        print(f"wrote {args.out} ({g.n} vertices, {g.m} edges)")
    elif args.format == "json":
        print(_dumps({"graph": g.to_text(), "witness": None if w is None else w.to_json()}))
    else:
        sys.stdout.write(g.to_text())
    return EXIT_OK


def _witness_path(graph_path: str) -> str:
    p = Path(graph_path)
    return str(p.with_name(p.stem + ".witness.json"))


# analyze ------------------------------------------------------------------

def cmd_analyze(args) -> int:
    g = _read_graph(args.graph)
    if args.what == "islands":
        part = islands(g, args.level, args.exact_limit)
        data = {"level": part.level, "islands": [list(b) for b in part.blocks]}
        ok = True
    elif args.what == "fvc":
        val, cover = fvc(g)
        mval, mw = nu_star(g)
        data = {
            "fvc": str(val),
            "nu_star": str(mval),
            "cover": [str(x) for x in cover.values],
            "matching": mw.to_json(),
        }
        ok = val == mval
    elif args.what == "iron":
        verdict = is_l_iron(g, args.level, args.exact_limit)
        data = {"level": args.level, "status": verdict.status,
                "witness": None if verdict.witness is None else verdict.witness.to_json()}
        ok = verdict.holds
    else:
        close, dist, thr, part = is_close_to_bipartite(g, args.c, args.exact_limit)
        data = {"close": close, "distance": dist, "threshold": thr, "bipartition": part.to_json()}
        ok = True
    if args.format == "text":
        _emit("\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(data.items())), args.out)
    else:
        _emit(_dumps(data), args.out)
    return EXIT_OK if ok else EXIT_NEGATIVE


# hamilton -----------------------------------------------------------------

def cmd_hamilton(args) -> int:
    cfg = RunConfig(args.alpha, args.c, args.exact_limit, args.backtrack_limit, args.seed, args.format, args.budget_ms)
    g = _read_graph(args.graph)
    wpath = args.witness
    if wpath is None and Path(_witness_path(args.graph)).exists():
        wpath = _witness_path(args.graph)
    w = AutomorphismWitness.from_json(_read_json(wpath)) if wpath else None
    if w is not None and any(len(p) != g.n for p in w.generators):
        raise UsageError("witness permutations do not match the graph order")
    report = find_hamilton_cycle(g, w, cfg.alpha, cfg.pipeline())
    if cfg.format == "json":
        text = _dumps(report.to_json())
    elif cfg.format == "dot":
        text = report.to_dot(g)
    else:
        out = report.to_json()["outcome"]
        lines = [f"status: {out['status']}"]
        if report.success:
            lines.append(f"candidate: {report.winner}")
        else:
            lines += [f"stage: {report.failure_stage}", f"reason: {report.failure_reason}"]
        text = "\n".join(lines)
    _emit(text, args.out)
    if report.success and (args.out or cfg.format != "json"):
        print("cycle: " + " ".join(map(str, report.cycle)))
    return EXIT_OK if report.success else EXIT_NEGATIVE


# verify -------------------------------------------------------------------

def _load_cycle(path: str) -> list[int]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return [int(t) for t in text.replace(",", " ").split()]
    if isinstance(data, dict):
        data = data.get("cycle") or data.get("outcome", {}).get("cycle")
    if not isinstance(data, list):
        raise UsageError("cycle artifact must be a vertex list")
    return [int(v) for v in data]


def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    problems: list[str] = []
    try:
        if args.type == "cycle":
            if not verify_hamilton_cycle(g, _load_cycle(args.artifact)):
                problems.append("not a Hamilton cycle")
        elif args.type == "path_system":
            data = _read_json(args.artifact)
            res = verify_path_system(
                g,
                EndpointRequest.from_json(data["request"]),
                PathSystem.from_json(data["system"]),
                bool(data.get("spanning", True)),
            )
            problems += res.reasons
        elif args.type == "matching":
            m = FractionalMatching.from_json(_read_json(args.artifact))
            if not m.is_feasible(g):
                problems.append("infeasible fractional matching")
            if not m.is_half_integral:
                problems.append("weights are not half-integral")
        elif args.type == "bipartition":
            problems += check_bipartition(g, Bipartition.from_json(_read_json(args.artifact)))
        else:
            problems += check_cut_witness(g, CutWitness.from_json(_read_json(args.artifact)))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed {args.type} artifact: {exc}") from exc
    data = {"type": args.type, "valid": not problems, "problems": problems}
    _emit(_dumps(data) if args.format == "json" else ("valid" if not problems else "invalid: " + "; ".join(problems)), args.out)
    return EXIT_OK if not problems else EXIT_NEGATIVE


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vthamilton", description="Hamilton cycles in dense vertex-transitive graphs")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "dot", "text"], default="json")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--c", type=_fraction, default=Fraction(1, 18))
    common.add_argument("--exact-limit", type=int, default=18)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate an instance")
    p.add_argument("kind", choices=["circulant", "double_clique", "chained", "fixture", "cayley", "random"])
    p.add_argument("params", nargs="*")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", parents=[common], help="run a structural analysis")
    p.add_argument("what", choices=["islands", "fvc", "iron", "bipartite"])
    p.add_argument("graph")
    p.add_argument("--level", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("hamilton", parents=[common], help="run the Hamilton cycle pipeline")
    p.add_argument("graph")
    p.add_argument("--witness", default=None, help="witness JSON (default: GRAPH stem + .witness.json if present)")
    p.add_argument("--alpha", type=_fraction, default=None)
    p.add_argument("--backtrack-limit", type=int, default=24)
    p.add_argument("--budget-ms", type=int, default=None)
    p.set_defaults(func=cmd_hamilton)

    p = sub.add_parser("verify", parents=[common], help="check an artifact")
    p.add_argument("type", choices=["cycle", "path_system", "matching", "bipartition", "cut_witness"])
    p.add_argument("graph")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
