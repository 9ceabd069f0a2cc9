"""Core domain types: valuations, instances, allocations, agent partitions.

All utilities are exact non-negative integers; rational inputs are scaled to
a common integer grid per agent at parse time. A bundle of goods is a bitmask
over good indices 0..m-1, so subset algebra is plain integer arithmetic.
Everything here is immutable; repair happens by building new values.

Serialization speaks a small JSON dialect::

    {"m": 4,
     "agents": [{"id": 0, "kind": "binary", "values": [1, 0, 1, 0]},
                {"id": 1, "kind": "table", "table": {"0": 0, "1": 2, ...}}],
     "groups": {"fixed": [[0], [1]]}}

Table keys are bundle bitmasks rendered as decimal strings. Variable-group
instances carry ``{"variable": [n1, n2, ...]}`` instead of fixed members.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import MalformedValuationError, UnsupportedValuationError

BINARY = "binary"
ADDITIVE = "additive"
TABLE = "table"
KINDS = (BINARY, ADDITIVE, TABLE)

# Hard cap on goods for table valuations and exhaustive enumeration. 2**24
# table rows is the largest footprint we are willing to hold or walk.
MAX_TABLE_GOODS = 24


def full_mask(m: int) -> int:
    """Bitmask of all m goods."""
    return (1 << m) - 1


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_of(mask: int) -> tuple[int, ...]:
    """Set bit positions of ``mask`` as a sorted tuple."""
    return tuple(iter_bits(mask))


def mask_of(goods: Iterable[int]) -> int:
    """Bitmask with the listed good indices set."""
    mask = 0
    for g in goods:
        mask |= 1 << g
    return mask


@dataclass(frozen=True)
class Valuation:
    """A single agent's utility function over bundles of ``m`` goods.

    ``kind`` selects the representation: ``binary`` and ``additive`` carry a
    per-good value vector, ``table`` carries an explicit subset-to-utility
    map keyed by bundle bitmask. Binary is a restriction of additive (values
    in {0, 1}); both are additive over disjoint bundles. Tables can encode
    any monotonic function with u(empty) = 0; the validator checks those
    invariants, construction does not.
    """

    kind: str
    m: int
    values: tuple[int, ...] | None = None
    table: dict[int, int] | None = None
    # Cache of the desired-good mask for binary valuations; derived, not
    # part of identity.
    _dmask: int = field(default=-1, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown valuation kind {self.kind!r}")
        if self.kind == BINARY and self.values is not None:
            dm = 0
            for g, v in enumerate(self.values):
                if v:
                    dm |= 1 << g
            object.__setattr__(self, "_dmask", dm)

    # -- constructors -------------------------------------------------

    @staticmethod
    def additive(values: Sequence[int]) -> "Valuation":
        return Valuation(ADDITIVE, len(values), values=tuple(values))

    @staticmethod
    def binary(values: Sequence[int]) -> "Valuation":
        return Valuation(BINARY, len(values), values=tuple(values))

    @staticmethod
    def binary_from_desired(m: int, goods: Iterable[int]) -> "Valuation":
        desired = set(goods)
        return Valuation(BINARY, m, values=tuple(1 if g in desired else 0 for g in range(m)))

    @staticmethod
    def table_of(m: int, entries: Mapping[int, int]) -> "Valuation":
        return Valuation(TABLE, m, table=dict(entries))

    @staticmethod
    def zeros(m: int) -> "Valuation":
        return Valuation(ADDITIVE, m, values=(0,) * m)

    # -- queries ------------------------------------------------------

    @property
    def desired_mask(self) -> int:
        """Mask of positively valued goods (binary valuations only)."""
        if self.kind != BINARY:
            raise UnsupportedValuationError("desired_mask is defined for binary valuations")
        return self._dmask

    def is_additive_like(self) -> bool:
        return self.kind in (BINARY, ADDITIVE)

    def value(self, bundle: int) -> int:
        """Utility of a bundle given as a bitmask over 0..m-1."""
        if bundle < 0 or bundle >> self.m:
            raise ValueError(f"bundle {bundle:#x} has goods outside 0..{self.m - 1}")
        if self.kind == TABLE:
            try:
                return self.table[bundle]
            except KeyError:
                raise MalformedValuationError(
                    f"table valuation has no entry for subset mask {bundle}"
                ) from None
        total = 0
        vals = self.values
        while bundle:
            low = bundle & -bundle
            total += vals[low.bit_length() - 1]
            bundle ^= low
        return total

    # -- derived valuations -------------------------------------------

    def with_zero_good(self) -> "Valuation":
        """Extend to m+1 goods where the new last good is worth nothing.

        For tables the new good has zero marginal utility in every context,
        so monotonicity and normalization are preserved.
        """
        if self.kind == TABLE:
            high = 1 << self.m
            table = {}
            for mask, v in self.table.items():
                table[mask] = v
                table[mask | high] = v
            return Valuation(TABLE, self.m + 1, table=table)
        return Valuation(self.kind, self.m + 1, values=self.values + (0,))

    def undesire(self, good: int) -> "Valuation":
        """Binary valuation with one good's value forced to zero."""
        if self.kind != BINARY:
            raise UnsupportedValuationError("undesire is defined for binary valuations")
        vals = list(self.values)
        vals[good] = 0
        return Valuation(BINARY, self.m, values=tuple(vals))

    def restrict(self, goods: Sequence[int]) -> "Valuation":
        """Project an additive-like valuation onto the listed goods, in order."""
        if not self.is_additive_like():
            raise UnsupportedValuationError("restrict is defined for additive-like valuations")
        return Valuation(self.kind, len(goods), values=tuple(self.values[g] for g in goods))


@dataclass(frozen=True)
class FixedGroups:
    """Groups given as explicit member lists, one per group."""

    members: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class VariableGroups:
    """Only group sizes are fixed; membership is part of the solution."""

    sizes: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.sizes)


Groups = Union[FixedGroups, VariableGroups]


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: goods 0..m-1, agents, and group structure."""

    m: int
    agents: tuple[Valuation, ...]
    groups: Groups

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def k(self) -> int:
        return self.groups.k

    @property
    def is_fixed(self) -> bool:
        return isinstance(self.groups, FixedGroups)

    def group_of(self, agent: int) -> int:
        if not isinstance(self.groups, FixedGroups):
            raise ValueError("group_of needs fixed groups")
        for i, members in enumerate(self.groups.members):
            if agent in members:
                return i
        raise ValueError(f"agent {agent} is in no group")

    @staticmethod
    def fixed(m: int, agents: Sequence[Valuation], members: Sequence[Sequence[int]]) -> "Instance":
        return Instance(m, tuple(agents), FixedGroups(tuple(tuple(g) for g in members)))

    @staticmethod
    def variable(m: int, agents: Sequence[Valuation], sizes: Sequence[int]) -> "Instance":
        return Instance(m, tuple(agents), VariableGroups(tuple(sizes)))


@dataclass(frozen=True)
class Allocation:
    """Bundles of goods, one bitmask per group, disjoint and covering."""

    bundles: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.bundles)

    def sizes(self) -> tuple[int, ...]:
        return tuple(b.bit_count() for b in self.bundles)

    def goods_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(bits_of(b) for b in self.bundles)

    @staticmethod
    def of(goods_lists: Sequence[Iterable[int]]) -> "Allocation":
        return Allocation(tuple(mask_of(g) for g in goods_lists))


@dataclass(frozen=True)
class AgentPartition:
    """Assignment of each agent to a group index 0..k-1."""

    assignment: tuple[int, ...]
    k: int

    def sizes(self) -> tuple[int, ...]:
        counts = [0] * self.k
        for g in self.assignment:
            counts[g] += 1
        return tuple(counts)

    def members(self, group: int) -> tuple[int, ...]:
        return tuple(a for a, g in enumerate(self.assignment) if g == group)

    def groups_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.members(g) for g in range(self.k))

    @staticmethod
    def from_groups(groups: Sequence[Iterable[int]]) -> "AgentPartition":
        pairs = [(a, g) for g, members in enumerate(groups) for a in members]
        assignment = [-1] * len(pairs)
        for a, g in pairs:
            if a < 0 or a >= len(assignment) or assignment[a] != -1:
                raise ValueError("groups must partition agents 0..n-1")
            assignment[a] = g
        return AgentPartition(tuple(assignment), len(groups))


# ---------------------------------------------------------------------------
# validation


def _valuation_violations(agent: int, v: Valuation, m: int) -> list[str]:
    out = []
    if v.m != m:
        out.append(f"agent {agent}: valuation covers {v.m} goods, instance has {m}")
        return out
    if v.kind in (BINARY, ADDITIVE):
        if v.values is None or len(v.values) != m:
            out.append(f"agent {agent}: value vector length differs from m={m}")
            return out
        for g, val in enumerate(v.values):
            if not isinstance(val, int) or isinstance(val, bool):
                out.append(f"agent {agent}: value of good {g} is not an integer")
            elif val < 0:
                out.append(f"agent {agent}: negative value {val} for good {g}")
            elif v.kind == BINARY and val not in (0, 1):
                out.append(f"agent {agent}: binary value {val} for good {g} outside {{0,1}}")
        return out
    # table
    if m > MAX_TABLE_GOODS:
        out.append(f"agent {agent}: table over {m} goods exceeds the cap of {MAX_TABLE_GOODS}")
        return out
    if v.table is None:
        out.append(f"agent {agent}: table valuation without a table")
        return out
    size = 1 << m
    missing = [mask for mask in range(size) if mask not in v.table]
    if missing:
        out.append(f"agent {agent}: table misses {len(missing)} subsets, first mask {missing[0]}")
        return out
    extra = [mask for mask in v.table if mask < 0 or mask >= size]
    if extra:
        out.append(f"agent {agent}: table has out-of-range subset mask {extra[0]}")
    if v.table[0] != 0:
        out.append(f"agent {agent}: normalization violated, empty bundle worth {v.table[0]}")
    for mask in range(size):
        val = v.table[mask]
        if not isinstance(val, int) or isinstance(val, bool):
            out.append(f"agent {agent}: table value at mask {mask} is not an integer")
            continue
        if val < 0:
            out.append(f"agent {agent}: negative table value {val} at mask {mask}")
        for g in iter_bits(mask):
            below = v.table[mask & ~(1 << g)]
            if below > val:
                out.append(
                    f"agent {agent}: monotonicity violated at subset {set(bits_of(mask))}"
                    f" after dropping good {g} ({below} > {val})"
                )
    return out


def validate(inst: Instance) -> list[str]:
    """Collect invariant violations as human-readable strings.

    An empty report means the instance is well formed: valuations match m,
    nonnegative integer utilities, binary in range, tables total, normalized
    and monotonic, and groups partition the agent ids (fixed) or sizes sum
    to n (variable).
    """
    out = []
    if inst.m < 0:
        out.append(f"negative good count {inst.m}")
    for agent, v in enumerate(inst.agents):
        out.extend(_valuation_violations(agent, v, inst.m))
    n = inst.n
    if isinstance(inst.groups, FixedGroups):
        seen = set()
        for gi, members in enumerate(inst.groups.members):
            for a in members:
                if a < 0 or a >= n:
                    out.append(f"group {gi}: unknown agent id {a}")
                elif a in seen:
                    out.append(f"group {gi}: agent {a} appears in more than one group")
                seen.add(a)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            if missing:
                out.append(f"agents {missing} belong to no group")
    else:
        if any(s < 0 for s in inst.groups.sizes):
            out.append("negative group size")
        if sum(inst.groups.sizes) != n:
            out.append(
                f"group sizes {list(inst.groups.sizes)} sum to {sum(inst.groups.sizes)},"
                f" instance has {n} agents"
            )
    return out


def allocation_violations(m: int, alloc: Allocation) -> list[str]:
    """Check that bundles are disjoint and cover goods 0..m-1."""
    out = []
    union = 0
    total = 0
    for i, b in enumerate(alloc.bundles):
        if b < 0 or b >> m:
            out.append(f"bundle {i} has goods outside 0..{m - 1}")
        union |= b
        total += b.bit_count()
    if total != m or union != full_mask(m):
        out.append("bundles do not partition the goods")
    return out


# ---------------------------------------------------------------------------
# serialization


def _as_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError("boolean is not a utility value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # use the decimal reading of the literal, not the binary float
        return Fraction(str(x))
    if isinstance(x, str):
        return Fraction(x)
    raise ValueError(f"cannot read utility value {x!r}")


def _scale_to_ints(fracs: Sequence[Fraction]) -> list[int]:
    if not fracs:
        return []
    denom = math.lcm(*(f.denominator for f in fracs))
    return [int(f * denom) for f in fracs]


def _agent_from_dict(d: Mapping, m: int) -> Valuation:
    kind = d.get("kind")
    if kind not in KINDS:
        raise ValueError(f"agent {d.get('id')}: unknown kind {kind!r}")
    if kind == TABLE:
        raw = d.get("table")
        if not isinstance(raw, Mapping):
            raise ValueError(f"agent {d.get('id')}: table kind needs a 'table' object")
        keys = []
        fracs = []
        for key, val in raw.items():
            keys.append(int(key))
            fracs.append(_as_fraction(val))
        ints = _scale_to_ints(fracs)
        return Valuation.table_of(m, dict(zip(keys, ints)))
    raw = d.get("values")
    if not isinstance(raw, Sequence) or isinstance(raw, (str, bytes)):
        raise ValueError(f"agent {d.get('id')}: {kind} kind needs a 'values' array")
    ints = _scale_to_ints([_as_fraction(x) for x in raw])
    return Valuation(kind, m, values=tuple(ints))


def instance_from_dict(d: Mapping) -> Instance:
    """Build an Instance from the JSON dialect; raises ValueError on bad data."""
    try:
        m = int(d["m"])
    except (KeyError, TypeError, ValueError):
        raise ValueError("instance needs an integer 'm'") from None
    agents_raw = d.get("agents")
    if not isinstance(agents_raw, Sequence):
        raise ValueError("instance needs an 'agents' array")
    by_id = {}
    for entry in agents_raw:
        if not isinstance(entry, Mapping) or "id" not in entry:
            raise ValueError("each agent needs an 'id'")
        aid = int(entry["id"])
        if aid in by_id:
            raise ValueError(f"duplicate agent id {aid}")
        by_id[aid] = _agent_from_dict(entry, m)
    n = len(by_id)
    if sorted(by_id) != list(range(n)):
        raise ValueError("agent ids must be dense 0..n-1")
    agents = tuple(by_id[i] for i in range(n))
    groups_raw = d.get("groups")
    if not isinstance(groups_raw, Mapping):
        raise ValueError("instance needs a 'groups' object")
    if "fixed" in groups_raw:
        members = tuple(tuple(int(a) for a in grp) for grp in groups_raw["fixed"])
        groups: Groups = FixedGroups(members)
    elif "variable" in groups_raw:
        groups = VariableGroups(tuple(int(s) for s in groups_raw["variable"]))
    else:
        raise ValueError("groups must be 'fixed' or 'variable'")
    return Instance(m, agents, groups)


def instance_to_dict(inst: Instance) -> dict:
    agents = []
    for aid, v in enumerate(inst.agents):
        entry: dict = {"id": aid, "kind": v.kind}
        if v.kind == TABLE:
            entry["table"] = {str(mask): val for mask, val in sorted(v.table.items())}
        else:
            entry["values"] = list(v.values)
        agents.append(entry)
    if isinstance(inst.groups, FixedGroups):
        groups = {"fixed": [list(g) for g in inst.groups.members]}
    else:
        groups = {"variable": list(inst.groups.sizes)}
    return {"m": inst.m, "agents": agents, "groups": groups}


def instance_from_json(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad JSON: {exc}") from None
    if not isinstance(data, Mapping):
        raise ValueError("instance document must be a JSON object")
    return instance_from_dict(data)


def instance_to_json(inst: Instance, indent: int | None = 2) -> str:
    return json.dumps(instance_to_dict(inst), indent=indent)
