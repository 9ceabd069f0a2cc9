"""Seeded random instance generators and the property suites built on them.

Every suite is a pure function of (seed, runs) so a failure can be replayed
from the command line with the same numbers. Suites re-verify all solver
output through the fairness checker and report the first few
counterexamples verbatim.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .algorithms import (
    cut_and_choose_ef1,
    exact1_partition,
    proportional_k_groups,
    rotating_knife,
)
from .binary_solver import solve_ef1_binary
from .fairness import EF1, EF2, EFX, EFX0, is_balanced, is_exact1, is_fair
from .model import (
    AgentPartition,
    Allocation,
    Instance,
    Valuation,
    allocation_violations,
    full_mask,
    instance_to_json,
    iter_bits,
)
from .oracle import SearchConstraints, find_fair
from .reduction import (
    MonotoneClause,
    MonotoneFormula,
    allocation_to_assignment,
    assignment_to_allocation,
    brute_force_satisfiable,
    formula_to_instance,
)

MAX_EXAMPLES = 3


@dataclass
class SuiteResult:
    name: str
    runs: int
    failures: int = 0
    examples: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, message: str) -> None:
        self.failures += 1
        if len(self.examples) < MAX_EXAMPLES:
            self.examples.append(message)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "runs": self.runs,
            "failures": self.failures,
            "passed": self.passed,
            "examples": list(self.examples),
            "elapsed": round(self.elapsed, 3),
        }


# ---------------------------------------------------------------------------
# generators


def random_additive(rng: random.Random, m: int, top: int = 9) -> Valuation:
    return Valuation.additive([rng.randint(0, top) for _ in range(m)])


def random_binary(rng: random.Random, m: int) -> Valuation:
    return Valuation.binary([rng.randint(0, 1) for _ in range(m)])


def random_monotone_table(rng: random.Random, m: int, top: int = 9) -> Valuation:
    """Random monotone normalized table: draw base values, then push each
    subset up to the maximum of its one-smaller subsets."""
    table = {0: 0}
    for mask in range(1, 1 << m):
        floor = max(table[mask & ~(1 << g)] for g in iter_bits(mask))
        table[mask] = max(rng.randint(0, top), floor)
    return Valuation.table_of(m, table)


def random_monotone(rng: random.Random, m: int) -> Valuation:
    # tables alongside additive keeps both checker paths exercised
    if rng.random() < 0.5:
        return random_monotone_table(rng, m)
    return random_additive(rng, m)


def _random_sizes(rng: random.Random, n: int, k: int) -> list[int]:
    cuts = sorted(rng.randint(0, n) for _ in range(k - 1))
    sizes = []
    prev = 0
    for c in cuts + [n]:
        sizes.append(c - prev)
        prev = c
    return sizes


# ---------------------------------------------------------------------------
# suites

SUITES: dict[str, Callable[[int, int], SuiteResult]] = {}


def _suite(name: str):
    def deco(fn: Callable[[int, int], SuiteResult]):
        SUITES[name] = fn
        return fn

    return deco


def _timed(fn):
    def wrapped(seed: int, runs: int) -> SuiteResult:
        t0 = time.perf_counter()
        result = fn(seed, runs)
        result.elapsed = time.perf_counter() - t0
        return result

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _binary_shape_suite(name: str, n1: int, n2: int, max_m: int = 10):
    @_timed
    def run(seed: int, runs: int) -> SuiteResult:
        rng = random.Random(seed)
        result = SuiteResult(name, runs)
        for i in range(runs):
            m = rng.randint(0, max_m)
            agents = [random_binary(rng, m) for _ in range(n1 + n2)]
            inst = Instance.fixed(
                m, agents, [list(range(n1)), list(range(n1, n1 + n2))]
            )
            try:
                alloc = solve_ef1_binary(inst)
            except Exception as exc:  # no exception is acceptable here
                result.record(f"run {i}: solver raised {exc!r} on {instance_to_json(inst, None)}")
                continue
            if allocation_violations(m, alloc):
                result.record(f"run {i}: bundles {alloc.bundles} do not partition {m} goods")
            elif not is_fair(inst, alloc, EF1).overall:
                result.record(
                    f"run {i}: allocation {alloc.goods_lists()} is not EF1"
                    f" on {instance_to_json(inst, None)}"
                )
        return result

    run.__doc__ = f"solve_ef1_binary on random ({n1},{n2}) instances, checker-verified EF1."
    return run


SUITES["binary-5-1"] = _binary_shape_suite("binary-5-1", 5, 1)
SUITES["binary-3-2"] = _binary_shape_suite("binary-3-2", 3, 2)


@_suite("exact1")
@_timed
def _exact1_suite(seed: int, runs: int) -> SuiteResult:
    """exact1_partition output is balanced and EF1 both ways for both agents."""
    rng = random.Random(seed)
    result = SuiteResult("exact1", runs)
    for i in range(runs):
        m = rng.randint(0, 12)
        v1, v2 = random_additive(rng, m), random_additive(rng, m)
        x, y = exact1_partition(v1, v2)
        if x & y or x | y != full_mask(m):
            result.record(f"run {i}: {x:#b},{y:#b} is not a partition of {m} goods")
            continue
        if abs(x.bit_count() - y.bit_count()) > 1:
            result.record(f"run {i}: bundle sizes {x.bit_count()},{y.bit_count()} unbalanced")
            continue
        for who, v in (("first", v1), ("second", v2)):
            if not is_exact1(v, (x, y)):
                result.record(
                    f"run {i}: not Exact1 for the {who} agent"
                    f" values={v.values} bundles=({x:#b},{y:#b})"
                )
    return result


@_suite("knife")
@_timed
def _knife_suite(seed: int, runs: int) -> SuiteResult:
    """rotating_knife yields balanced groups, balanced bundles, and EF1."""
    rng = random.Random(seed)
    result = SuiteResult("knife", runs)
    for i in range(runs):
        n = rng.randint(1, 8)
        m = rng.randint(0, 10)
        agents = [random_monotone(rng, m) for _ in range(n)]
        try:
            part, alloc = rotating_knife(agents)
        except AssertionError as exc:
            result.record(f"run {i}: internal assertion fired: {exc}")
            continue
        inst = Instance.fixed(m, agents, part.groups_lists())
        if not is_balanced(part):
            result.record(f"run {i}: group sizes {part.sizes()} unbalanced")
        elif not is_balanced(alloc):
            result.record(f"run {i}: bundle sizes {alloc.sizes()} unbalanced")
        elif allocation_violations(m, alloc):
            result.record(f"run {i}: bundles {alloc.bundles} do not partition the goods")
        elif not is_fair(inst, alloc, EF1).overall:
            result.record(f"run {i}: not EF1 on {instance_to_json(inst, None)}")
    return result


@_suite("cutchoose")
@_timed
def _cutchoose_suite(seed: int, runs: int) -> SuiteResult:
    """cut_and_choose_ef1 hits the requested group sizes and is EF1."""
    rng = random.Random(seed)
    result = SuiteResult("cutchoose", runs)
    for i in range(runs):
        n = rng.randint(1, 6)
        m = rng.randint(0, 8)
        n1 = rng.randint(0, n)
        agents = [random_monotone(rng, m) for _ in range(n)]
        part, alloc = cut_and_choose_ef1(agents, n1, n - n1)
        if part.sizes() != (n1, n - n1):
            result.record(f"run {i}: sizes {part.sizes()} instead of ({n1},{n - n1})")
            continue
        inst = Instance.fixed(m, agents, part.groups_lists())
        if not is_fair(inst, alloc, EF1).overall:
            result.record(f"run {i}: not EF1 on {instance_to_json(inst, None)}")
    return result


@_suite("prop")
@_timed
def _prop_suite(seed: int, runs: int) -> SuiteResult:
    """proportional_k_groups meets k*u(B) >= u(G) - (k-1)*umax exactly."""
    rng = random.Random(seed)
    result = SuiteResult("prop", runs)
    for i in range(runs):
        n = rng.randint(1, 8)
        k = rng.randint(1, 5)
        m = rng.randint(0, 10)
        sizes = _random_sizes(rng, n, k)
        agents = [random_additive(rng, m) for _ in range(n)]
        part, alloc = proportional_k_groups(agents, sizes)
        if list(part.sizes()) != sizes:
            result.record(f"run {i}: sizes {part.sizes()} instead of {sizes}")
            continue
        for a, v in enumerate(agents):
            own = alloc.bundles[part.assignment[a]]
            total = v.value(full_mask(m))
            umax = max(v.values) if m else 0
            if k * v.value(own) < total - (k - 1) * umax:
                result.record(
                    f"run {i}: agent {a} got {v.value(own)} of {total}"
                    f" (umax {umax}, k {k})"
                )
    return result


@_suite("balanced-tables")
@_timed
def _balanced_tables_suite(seed: int, runs: int) -> SuiteResult:
    """Five monotone agents, four goods: a balanced partition with a
    balanced EF1 allocation always exists (found by exhaustion)."""
    rng = random.Random(seed)
    result = SuiteResult("balanced-tables", runs)
    cons = SearchConstraints(EF1, balanced_allocation=True, balanced_partition=True)
    for i in range(runs):
        agents = [random_monotone_table(rng, 4) for _ in range(5)]
        inst = Instance.variable(4, agents, [3, 2])
        cert = find_fair(inst, cons)
        if not cert.found:
            result.record(f"run {i}: no balanced EF1 over {instance_to_json(inst, None)}")
        elif not is_fair(inst, cert.allocation, EF1, partition=cert.partition).overall:
            result.record(f"run {i}: oracle witness fails re-verification")
    return result


def random_monotone_formula(rng: random.Random, max_vars: int = 10, max_clauses: int = 12) -> MonotoneFormula:
    v = rng.randint(3, max_vars)
    ncl = rng.randint(0, max_clauses)
    clauses = []
    for _ in range(ncl):
        variables = tuple(sorted(rng.sample(range(v), 3)))
        clauses.append(MonotoneClause(rng.random() < 0.5, variables))
    return MonotoneFormula(v, tuple(clauses))


@_suite("reduction")
@_timed
def _reduction_suite(seed: int, runs: int) -> SuiteResult:
    """Satisfiability and EF1 existence agree on reduced instances, and the
    assignment/allocation bridges land on verified objects."""
    rng = random.Random(seed)
    result = SuiteResult("reduction", runs)
    for i in range(runs):
        f = random_monotone_formula(rng)
        inst = formula_to_instance(f)
        sat, witness = brute_force_satisfiable(f)
        cert = find_fair(inst, SearchConstraints(EF1))
        if sat != cert.found:
            result.record(
                f"run {i}: satisfiable={sat} but oracle found={cert.found}"
                f" for {f.num_vars} vars, {len(f.clauses)} clauses"
            )
            continue
        if sat:
            alloc = assignment_to_allocation(f, witness)
            if not is_fair(inst, alloc, EF1).overall:
                result.record(f"run {i}: satisfying assignment maps to a non-EF1 allocation")
            back = allocation_to_assignment(f, cert.allocation)
            if not f.satisfied_by(back):
                result.record(f"run {i}: oracle allocation maps to a falsifying assignment")
    return result


@_suite("hierarchy")
@_timed
def _hierarchy_suite(seed: int, runs: int) -> SuiteResult:
    """EFX0 => EFX => EF1 => EF2 on additive pairs; EFX <=> EF1 on binary."""
    rng = random.Random(seed)
    result = SuiteResult("hierarchy", runs)
    for i in range(runs):
        binary = rng.random() < 0.5
        m = rng.randint(0, 8)
        k = rng.randint(2, 4)
        n = rng.randint(1, 6)
        gen = random_binary if binary else random_additive
        agents = [gen(rng, m) for _ in range(n)]
        assignment = tuple(rng.randrange(k) for _ in range(n))
        part = AgentPartition(assignment, k)
        inst = Instance.fixed(m, agents, part.groups_lists())
        bundles = [0] * k
        for g in range(m):
            bundles[rng.randrange(k)] |= 1 << g
        alloc = Allocation(tuple(bundles))
        efx0 = is_fair(inst, alloc, EFX0).overall
        efx = is_fair(inst, alloc, EFX).overall
        ef1 = is_fair(inst, alloc, EF1).overall
        ef2 = is_fair(inst, alloc, EF2).overall
        if efx0 and not efx:
            result.record(f"run {i}: EFX0 without EFX on {instance_to_json(inst, None)}")
        elif efx and not ef1:
            result.record(f"run {i}: EFX without EF1 on {instance_to_json(inst, None)}")
        elif ef1 and not ef2:
            result.record(f"run {i}: EF1 without EF2 on {instance_to_json(inst, None)}")
        elif binary and efx != ef1:
            result.record(f"run {i}: binary EFX/EF1 split on {instance_to_json(inst, None)}")
    return result


def run_suite(name: str, seed: int, runs: int) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}") from None
    return fn(seed, runs)
