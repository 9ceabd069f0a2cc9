"""Fairness predicates over allocations: envy relaxations, proportionality, balance.

The checkers are the ground truth the rest of the package defers to: every
algorithm output and oracle hit is re-verified here. All comparisons are on
exact integers; proportionality avoids division by cross-multiplying.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import UnsupportedNotionError
from .model import (
    BINARY,
    TABLE,
    AgentPartition,
    Allocation,
    FixedGroups,
    Instance,
    Valuation,
    allocation_violations,
    bits_of,
    full_mask,
    iter_bits,
)


@dataclass(frozen=True)
class Notion:
    """A fairness notion tag.

    ``kind`` is one of ``ef`` (no envy), ``efc`` (envy up to c goods removed
    from the envied bundle; c=1 is EF1), ``efx`` (envy-free up to any
    positively valued good), ``efx0`` (up to any good, including worthless
    ones), or ``prop`` (a 1/k share of the whole, where k is the number of
    bundles in the allocation at hand).
    """

    kind: str
    c: int = 0

    def __post_init__(self):
        if self.kind not in ("ef", "efc", "efx", "efx0", "prop"):
            raise ValueError(f"unknown fairness notion {self.kind!r}")
        if self.kind == "efc":
            if self.c < 1:
                raise ValueError("efc needs c >= 1")
        elif self.c != 0:
            raise ValueError(f"{self.kind} does not take a removal budget")

    def __str__(self) -> str:
        if self.kind == "efc":
            return f"ef{self.c}"
        return self.kind


EF = Notion("ef")
EF1 = Notion("efc", 1)
EF2 = Notion("efc", 2)
EFX = Notion("efx")
EFX0 = Notion("efx0")
PROP = Notion("prop")


def up_to(c: int) -> Notion:
    """EFc for a given removal budget c."""
    return Notion("efc", c)


def parse_notion(text: str) -> Notion:
    """Read a notion from its CLI spelling (ef, ef1, ef2, ..., efx, efx0, prop)."""
    t = text.strip().lower()
    if t == "ef":
        return EF
    if t == "efx":
        return EFX
    if t == "efx0":
        return EFX0
    if t == "prop":
        return PROP
    if t.startswith("ef") and t[2:].isdigit():
        return up_to(int(t[2:]))
    raise ValueError(f"unknown fairness notion {text!r}")


# ---------------------------------------------------------------------------
# pairwise envy checks


def _min_after_removals(v: Valuation, other: int, c: int) -> int:
    """Least value of ``other`` after deleting at most c goods from it."""
    if v.kind == TABLE:
        goods = bits_of(other)
        best = v.value(other)
        for size in range(1, min(c, len(goods)) + 1):
            for drop in combinations(goods, size):
                mm = other
                for g in drop:
                    mm &= ~(1 << g)
                val = v.value(mm)
                if val < best:
                    best = val
        return best
    # additive: dropping the c most valuable goods is optimal
    vals = sorted((v.values[g] for g in iter_bits(other)), reverse=True)
    return v.value(other) - sum(vals[:c])


def fair_toward(v: Valuation, own: int, other: int, notion: Notion) -> bool:
    """Does an agent with valuation ``v`` holding ``own`` accept ``other``?

    For ``ef`` this is plain non-envy. For ``efc`` some set of at most c
    goods may be deleted from ``other`` first; on additive valuations the
    c most valuable ones go, on tables every small removal set is tried.
    ``efx``/``efx0`` demand non-envy after removal of every (positively
    valued) single good and are only defined for additive-like valuations.
    """
    if notion.kind == "prop":
        raise ValueError("prop is checked against the whole allocation, not a pair")
    if v.kind == BINARY:
        d = v.desired_mask
        a = (d & own).bit_count()
        b = (d & other).bit_count()
        if notion.kind == "ef":
            return a >= b
        if notion.kind == "efc":
            return a >= b - min(b, notion.c)
        if notion.kind == "efx":
            return a >= b - min(b, 1)
        # efx0: a worthless good in the envied bundle must also be removable
        if other == 0:
            return True
        if other & ~d:
            return a >= b
        return a >= b - 1
    if notion.kind == "ef":
        return v.value(own) >= v.value(other)
    if notion.kind == "efc":
        return v.value(own) >= _min_after_removals(v, other, notion.c)
    # efx / efx0
    if v.kind == TABLE:
        raise UnsupportedNotionError(f"{notion} is not defined for table valuations")
    mine = v.value(own)
    total = v.value(other)
    for g in iter_bits(other):
        val = v.values[g]
        if notion.kind == "efx" and val == 0:
            continue
        if mine < total - val:
            return False
    return True


def _first_removal_violation(v: Valuation, own: int, other: int, zero_ok: bool) -> int | None:
    """Smallest good in ``other`` whose removal still leaves envy, or None."""
    mine = v.value(own)
    total = v.value(other)
    for g in iter_bits(other):
        val = v.values[g]
        if not zero_ok and val == 0:
            continue
        if mine < total - val:
            return g
    return None


def agent_verdict(
    v: Valuation, alloc: Allocation, own_group: int, notion: Notion
) -> tuple[bool, tuple[int, int | None] | None]:
    """Verdict for one agent plus a witness on failure.

    The witness is the lexicographically smallest offending ``(group, good)``
    pair; the good component is only meaningful for efx/efx0, otherwise None.
    """
    if notion.kind == "prop":
        total = v.value(full_mask(v.m))
        ok = alloc.k * v.value(alloc.bundles[own_group]) >= total
        return ok, None
    own = alloc.bundles[own_group]
    for i, other in enumerate(alloc.bundles):
        if i == own_group:
            continue
        if notion.kind in ("efx", "efx0"):
            if v.kind == TABLE:
                raise UnsupportedNotionError(f"{notion} is not defined for table valuations")
            g = _first_removal_violation(v, own, other, zero_ok=notion.kind == "efx0")
            if g is not None:
                return False, (i, g)
        elif not fair_toward(v, own, other, notion):
            return False, (i, None)
    return True, None


# ---------------------------------------------------------------------------
# whole-allocation reports


@dataclass(frozen=True)
class FairnessReport:
    """Per-agent verdicts with witnesses for the failures."""

    overall: bool
    per_agent: tuple[bool, ...]
    witnesses: dict[int, tuple[int, int | None] | None]

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "agents": list(self.per_agent),
            "witnesses": {
                str(a): (None if w is None else {"group": w[0], "good": w[1]})
                for a, w in sorted(self.witnesses.items())
            },
        }


def _group_lookup(inst: Instance, alloc: Allocation, partition: AgentPartition | None) -> list[int]:
    problems = allocation_violations(inst.m, alloc)
    if problems:
        raise ValueError("; ".join(problems))
    if isinstance(inst.groups, FixedGroups):
        if partition is not None:
            raise ValueError("fixed-group instance does not take an agent partition")
        if alloc.k != inst.k:
            raise ValueError(f"allocation has {alloc.k} bundles, instance has {inst.k} groups")
        lookup = [-1] * inst.n
        for gi, members in enumerate(inst.groups.members):
            for a in members:
                lookup[a] = gi
        return lookup
    if partition is None:
        raise ValueError("variable-group instance needs an agent partition")
    if len(partition.assignment) != inst.n:
        raise ValueError("partition covers the wrong number of agents")
    if partition.k != alloc.k:
        raise ValueError("partition and allocation disagree on the number of groups")
    return list(partition.assignment)


def is_fair(
    inst: Instance,
    alloc: Allocation,
    notion: Notion,
    partition: AgentPartition | None = None,
) -> FairnessReport:
    """Check every agent; variable-group instances need ``partition``."""
    lookup = _group_lookup(inst, alloc, partition)
    verdicts = []
    witnesses: dict[int, tuple[int, int | None] | None] = {}
    for a, v in enumerate(inst.agents):
        ok, w = agent_verdict(v, alloc, lookup[a], notion)
        verdicts.append(ok)
        if not ok:
            witnesses[a] = w
    return FairnessReport(all(verdicts), tuple(verdicts), witnesses)


def is_fair_for_agent(
    inst: Instance,
    alloc: Allocation,
    agent: int,
    group_of_agent: int,
    notion: Notion,
) -> tuple[bool, tuple[int, int | None] | None]:
    """Single-agent verdict; the caller states which group the agent sits in."""
    problems = allocation_violations(inst.m, alloc)
    if problems:
        raise ValueError("; ".join(problems))
    if isinstance(inst.groups, FixedGroups) and inst.group_of(agent) != group_of_agent:
        raise ValueError(f"agent {agent} is not in group {group_of_agent}")
    return agent_verdict(inst.agents[agent], alloc, group_of_agent, notion)


def is_exact1(v: Valuation, partition: tuple[int, int]) -> bool:
    """Are both sides of a 2-partition EF1 from this agent's viewpoint?"""
    x, y = partition
    if x & y or (x | y) != full_mask(v.m):
        raise ValueError("partition must split the goods into two disjoint bundles")
    return fair_toward(v, x, y, EF1) and fair_toward(v, y, x, EF1)


def is_balanced(x) -> bool:
    """Pairwise size difference at most one.

    Accepts an Allocation (bundle sizes), an AgentPartition (group sizes),
    or any iterable of sizes.
    """
    if isinstance(x, Allocation):
        sizes = x.sizes()
    elif isinstance(x, AgentPartition):
        sizes = x.sizes()
    else:
        sizes = tuple(x)
    if not sizes:
        return True
    return max(sizes) - min(sizes) <= 1
