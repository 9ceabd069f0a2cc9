"""Command-line entry point.

Subcommands: ``check`` an allocation against a notion, ``solve`` with one of
the constructive algorithms, ``search`` exhaustively, run the built-in
``corpus``, build ``kneser`` graphs and tightness instances, ``reduce`` a
monotone CNF, and run ``fuzz`` suites.

Exit codes: 0 on success or Found; 2 when a negative outcome is certified
(exhausted search, no allocation exists, a failed check or suite); 1 on
usage or data errors. Reports go to stdout as JSON (default) or as a plain
table via ``--format table``. Every allocation printed here has been
re-verified through the fairness checker in-process.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import algorithms, fuzz, kneser, oracle, reduction
from .binary_solver import solve_ef1_binary
from .errors import FairAllocationNotFound, GroupFairError
from .fairness import EF1, is_exact1, is_fair, parse_notion
from .model import (
    AgentPartition,
    Allocation,
    FixedGroups,
    Instance,
    allocation_violations,
    full_mask,
    instance_from_json,
    instance_to_dict,
    validate,
)

OK, CERTIFIED_NO, USAGE = 0, 2, 1


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract reserves 2 for
    # certified negative outcomes, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(USAGE)


@dataclass
class RunReport:
    command: str
    instance: dict | None = None
    result: dict = field(default_factory=dict)
    fairness: dict | None = None
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        out: dict = {"command": self.command}
        if self.instance is not None:
            out["instance"] = self.instance
        out["result"] = self.result
        if self.fairness is not None:
            out["fairness"] = self.fairness
        out["elapsed"] = round(self.elapsed, 6)
        return out

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2)
        lines = [f"command: {self.command}"]
        if self.instance is not None:
            digest = " ".join(f"{k}={v}" for k, v in self.instance.items())
            lines.append(f"instance: {digest}")
        for key, value in self.result.items():
            lines.append(f"{key}: {value}")
        if self.fairness is not None:
            lines.append(f"fair: {self.fairness['overall']}")
            for agent, witness in self.fairness.get("witnesses", {}).items():
                lines.append(f"  agent {agent}: envy witness {witness}")
        lines.append(f"elapsed: {self.elapsed:.3f}s")
        return "\n".join(lines)


def _digest(inst: Instance) -> dict:
    if isinstance(inst.groups, FixedGroups):
        shape = "fixed(" + ",".join(str(len(g)) for g in inst.groups.members) + ")"
    else:
        shape = "variable(" + ",".join(str(s) for s in inst.groups.sizes) + ")"
    return {"m": inst.m, "n": inst.n, "groups": shape}


def _load_instance(path: str) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from None
    inst = instance_from_json(text)
    problems = validate(inst)
    if problems:
        raise ValueError(f"invalid instance {path}: " + "; ".join(problems))
    return inst


def _parse_id_groups(text: str) -> list[list[int]]:
    groups = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        groups.append([int(x) for x in chunk.split(",") if x.strip()] if chunk else [])
    return groups


def _parse_allocation(text: str, inst: Instance) -> Allocation:
    alloc = Allocation.of(_parse_id_groups(text))
    if alloc.k != inst.k:
        raise ValueError(f"allocation has {alloc.k} bundles, instance has {inst.k} groups")
    problems = allocation_violations(inst.m, alloc)
    if problems:
        raise ValueError("; ".join(problems))
    return alloc


def _parse_partition(text: str, inst: Instance) -> AgentPartition:
    groups = _parse_id_groups(text)
    if len(groups) != inst.k:
        raise ValueError(f"partition has {len(groups)} groups, instance has {inst.k}")
    part = AgentPartition.from_groups(groups)
    if len(part.assignment) != inst.n:
        raise ValueError("partition does not cover all agents")
    return part


def _parse_split(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated sizes, got {text!r}")
    return int(parts[0]), int(parts[1])


def _emit(report: RunReport, fmt: str) -> None:
    print(report.render(fmt))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_check(args) -> int:
    inst = _load_instance(args.instance)
    notion = parse_notion(args.notion)
    alloc = _parse_allocation(args.allocation, inst)
    partition = _parse_partition(args.partition, inst) if args.partition else None
    t0 = time.perf_counter()
    report = is_fair(inst, alloc, notion, partition=partition)
    run = RunReport(
        "check",
        _digest(inst),
        {"notion": str(notion), "allocation": [list(b) for b in alloc.goods_lists()]},
        report.to_dict(),
        time.perf_counter() - t0,
    )
    _emit(run, args.format)
    return OK if report.overall else CERTIFIED_NO


def _solve_dispatch(args, inst: Instance):
    """Returns (result dict, allocation | None, partition | None, notion)."""
    method = args.method
    if method == "binary":
        return {}, solve_ef1_binary(inst, jobs=args.jobs), None, EF1
    if method == "two-one":
        return {}, algorithms.ef1_two_one(inst), None, EF1
    if method == "exact1":
        if inst.n != 2:
            raise ValueError("exact1 needs exactly two agents")
        x, y = algorithms.exact1_partition(inst.agents[0], inst.agents[1])
        alloc = Allocation((x, y))
        for a in range(2):
            if not is_exact1(inst.agents[a], (x, y)):
                raise AssertionError("exact1_partition output failed re-verification")
        return {"exact1": True}, alloc, None, None
    if method == "roundrobin":
        alloc = algorithms.round_robin(inst.agents)
        singles = Instance.fixed(inst.m, inst.agents, [[a] for a in range(inst.n)])
        report = is_fair(singles, alloc, EF1)
        if not report.overall:
            raise AssertionError("round_robin output failed re-verification")
        return {"groups": "one per agent"}, alloc, None, None
    sizes = None
    if isinstance(inst.groups, FixedGroups):
        raise ValueError(f"method {method} chooses the partition; use variable groups")
    sizes = inst.groups.sizes
    if method == "cutchoose":
        if inst.k != 2:
            raise ValueError("cutchoose needs exactly two groups")
        part, alloc = algorithms.cut_and_choose_ef1(inst.agents, sizes[0], sizes[1])
        return {}, alloc, part, EF1
    if method == "knife":
        if inst.k != 2:
            raise ValueError("knife needs exactly two groups")
        part, alloc = algorithms.rotating_knife(inst.agents)
        return {}, alloc, part, EF1
    if method == "prop":
        part, alloc = algorithms.proportional_k_groups(inst.agents, sizes)
        # The guarantee is proportionality up to k-1 goods, not exact Prop:
        # k*u(B) >= u(G) - (k-1)*umax. Verify that threshold directly.
        k = inst.k
        whole = full_mask(inst.m)
        for a, gi in enumerate(part.assignment):
            v = inst.agents[a]
            umax = max((v.value(1 << g) for g in range(inst.m)), default=0)
            if k * v.value(alloc.bundles[gi]) < v.value(whole) - (k - 1) * umax:
                raise AssertionError("proportional_k_groups output missed its threshold")
        return {"guarantee": "prop up to k-1 goods"}, alloc, part, None
    raise ValueError(f"unknown method {method!r}")


def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    t0 = time.perf_counter()
    try:
        extra, alloc, part, notion = _solve_dispatch(args, inst)
    except FairAllocationNotFound as exc:
        result = {"reason": str(exc)}
        if exc.certificate is not None:
            result.update(exc.certificate.to_dict())
        result.setdefault("outcome", "exhausted-none")
        run = RunReport("solve", _digest(inst), result, None, time.perf_counter() - t0)
        _emit(run, args.format)
        return CERTIFIED_NO
    result = {"outcome": "solved", "method": args.method, **extra}
    result["allocation"] = [list(b) for b in alloc.goods_lists()]
    if part is not None:
        result["partition"] = [list(g) for g in part.groups_lists()]
    fairness = None
    if notion is not None:
        check_inst = inst
        if part is not None:
            check_inst = Instance.fixed(inst.m, inst.agents, part.groups_lists())
        report = is_fair(check_inst, alloc, notion)
        if not report.overall:
            raise AssertionError(f"{args.method} output failed {notion} re-verification")
        result["notion"] = str(notion)
        fairness = report.to_dict()
    run = RunReport("solve", _digest(inst), result, fairness, time.perf_counter() - t0)
    _emit(run, args.format)
    return OK


def _cmd_search(args) -> int:
    inst = _load_instance(args.instance)
    notion = parse_notion(args.notion)
    cons = oracle.SearchConstraints(
        notion,
        balanced_allocation=args.balanced_goods,
        balanced_partition=args.balanced_agents,
    )
    t0 = time.perf_counter()
    cert = oracle.find_fair(inst, cons, jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    fairness = None
    if cert.found:
        check_inst = inst
        if cert.partition is not None:
            check_inst = Instance.fixed(inst.m, inst.agents, cert.partition.groups_lists())
        report = is_fair(check_inst, cert.allocation, notion)
        if not report.overall:
            raise AssertionError("oracle witness failed re-verification")
        fairness = report.to_dict()
    result = {"notion": str(notion), **cert.to_dict()}
    run = RunReport("search", _digest(inst), result, fairness, elapsed)
    _emit(run, args.format)
    return OK if cert.found else CERTIFIED_NO


def _cmd_corpus(args) -> int:
    entries = oracle.corpus()
    by_name = {e.name: e for e in entries}
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        for e in entries:
            path = os.path.join(args.export, f"{e.name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(instance_to_dict(e.instance), fh, indent=2)
                fh.write("\n")
        print(f"wrote {len(entries)} instances to {args.export}", file=sys.stderr)
    if args.list:
        for e in entries:
            print(f"{e.name}: {e.summary}")
        return OK
    names = [args.run] if args.run else [e.name for e in entries]
    if args.run and args.run not in by_name:
        raise ValueError(f"unknown corpus entry {args.run!r}")
    t0 = time.perf_counter()
    results = [oracle.run_corpus_entry(by_name[n], jobs=args.jobs) for n in names]
    elapsed = time.perf_counter() - t0
    if args.format == "table":
        for r in results:
            flag = "PASS" if r.passed else "FAIL"
            print(f"{flag}  {r.name:<28} {r.detail}  ({r.elapsed:.3f}s)")
    else:
        payload = {
            "command": "corpus",
            "results": [r.to_dict() for r in results],
            "passed": all(r.passed for r in results),
            "elapsed": round(elapsed, 6),
        }
        print(json.dumps(payload, indent=2))
    return OK if all(r.passed for r in results) else CERTIFIED_NO


def _cmd_kneser(args) -> int:
    g = kneser.build_kneser(args.b, args.r, args.s)
    result: dict = {"b": args.b, "r": args.r, "s": args.s, "vertices": g.n, "edges": len(g.edges())}
    t0 = time.perf_counter()
    coloring = None
    if args.chi:
        lower, upper, coloring = kneser.chromatic_number(g, mode=args.chi)
        result["chi"] = {"lower": lower, "upper": upper}
        if coloring is not None:
            result["coloring"] = list(coloring.colors)
    if args.dimacs:
        text = kneser.to_dimacs(g)
        if args.dimacs == "-":
            sys.stdout.write(text)
        else:
            with open(args.dimacs, "w", encoding="utf-8") as fh:
                fh.write(text)
            result["dimacs"] = args.dimacs
    if args.tightness:
        if args.split is None:
            raise ValueError("--tightness needs --split n1,n2")
        if coloring is None:
            _, _, coloring = kneser.chromatic_number(g, mode="exact")
        inst = kneser.tightness_instance(g, coloring, _parse_split(args.split))
        doc = json.dumps(instance_to_dict(inst), indent=2)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(doc + "\n")
            result["instance"] = args.out
        else:
            result["instance"] = instance_to_dict(inst)
    run = RunReport("kneser", None, result, None, time.perf_counter() - t0)
    _emit(run, args.format)
    return OK


def _cmd_reduce(args) -> int:
    try:
        with open(args.formula, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read {args.formula}: {exc}") from None
    f = reduction.parse_dimacs_cnf(text)
    inst = reduction.formula_to_instance(f)
    doc = instance_to_dict(inst)
    result: dict = {
        "variables": f.num_vars,
        "clauses": len(f.clauses),
        "agents": inst.n,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        result["instance"] = args.out
    else:
        result["instance"] = doc
    run = RunReport("reduce", _digest(inst), result, None, 0.0)
    _emit(run, args.format)
    return OK


def _cmd_fuzz(args) -> int:
    if args.list:
        for name in sorted(fuzz.SUITES):
            print(name)
        return OK
    if not args.suite:
        raise ValueError("pick a suite with --suite or list them with --list")
    result = fuzz.run_suite(args.suite, args.seed, args.runs)
    if args.format == "table":
        flag = "PASS" if result.passed else "FAIL"
        print(
            f"{flag}  {result.name}: {result.runs} runs,"
            f" {result.failures} failures ({result.elapsed:.2f}s, seed {args.seed})"
        )
        for ex in result.examples:
            print(f"  {ex}")
    else:
        payload = result.to_dict()
        payload["seed"] = args.seed
        print(json.dumps(payload, indent=2))
    return OK if result.passed else CERTIFIED_NO


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> _Parser:
    parser = _Parser(prog="groupfair", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="verify an allocation against a fairness notion")
    p.add_argument("instance")
    p.add_argument("--allocation", required=True, help="bundles as '0,1;2,3' (goods by group)")
    p.add_argument("--notion", default="ef1")
    p.add_argument("--partition", help="agents by group, same syntax, for variable groups")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("solve", parents=[common], help="run a constructive algorithm")
    p.add_argument("instance")
    p.add_argument(
        "--method",
        required=True,
        choices=("binary", "two-one", "exact1", "roundrobin", "cutchoose", "knife", "prop"),
    )
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("search", parents=[common], help="exhaustive existence search")
    p.add_argument("instance")
    p.add_argument("--notion", default="ef1")
    p.add_argument("--balanced-goods", action="store_true", help="bundle sizes within one")
    p.add_argument("--balanced-agents", action="store_true", help="group sizes within one")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(fn=_cmd_search)

    p = sub.add_parser("corpus", parents=[common], help="run the built-in impossibility corpus")
    p.add_argument("--run-all", action="store_true", help="run every entry (the default)")
    p.add_argument("--run", metavar="NAME", help="run a single entry")
    p.add_argument("--list", action="store_true", help="list entries")
    p.add_argument("--export", metavar="DIR", help="write the instances as JSON files")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=_cmd_corpus)

    p = sub.add_parser("kneser", parents=[common], help="generalized Kneser graph toolkit")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--chi", choices=("exact", "bounds"))
    p.add_argument("--dimacs", metavar="FILE", help="write DIMACS graph ('-' for stdout)")
    p.add_argument("--tightness", action="store_true", help="emit the no-balanced-EF1 instance")
    p.add_argument("--split", metavar="N1,N2", help="group sizes for --tightness")
    p.add_argument("--out", metavar="FILE", help="file for the tightness instance")
    p.set_defaults(fn=_cmd_kneser)

    p = sub.add_parser("reduce", parents=[common], help="monotone 3-SAT formula to instance")
    p.add_argument("--formula", required=True, help="DIMACS CNF file, monotone 3-clauses")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("fuzz", parents=[common], help="run a randomized property suite")
    p.add_argument("--suite")
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--list", action="store_true")
    p.set_defaults(fn=_cmd_fuzz)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GroupFairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    raise SystemExit(main())
