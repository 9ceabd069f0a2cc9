"""Monotone 3-SAT and two-group EF1 existence are the same question.

A clause of three positive literals becomes a first-group agent who wants
those three goods; an all-negative clause a second-group agent. An agent
with three desired goods is EF1 exactly when her group's bundle holds at
least one of them, so "every clause hit" and "every agent EF1" coincide:
goods in the first bundle are the true variables.
"""

from itertools import combinations

from groupfair import (
    EF1,
    MonotoneClause,
    MonotoneFormula,
    SearchConstraints,
    allocation_to_assignment,
    brute_force_satisfiable,
    find_fair,
    formula_to_dimacs,
    formula_to_instance,
)

sat = MonotoneFormula(
    5,
    (
        MonotoneClause(True, (0, 1, 2)),
        MonotoneClause(True, (2, 3, 4)),
        MonotoneClause(False, (0, 1, 4)),
        MonotoneClause(False, (1, 2, 3)),
    ),
)

print("formula:")
print(formula_to_dimacs(sat), end="")

inst = formula_to_instance(sat)
cert = find_fair(inst, SearchConstraints(EF1))
print(f"\nEF1 allocation exists: {cert.found}")
assignment = allocation_to_assignment(sat, cert.allocation)
print(f"first bundle {list(cert.allocation.goods_lists()[0])} -> assignment {assignment}")
assert sat.satisfied_by(assignment)
print(f"brute force agrees: {brute_force_satisfiable(sat)[0]}")

# an unsatisfiable monotone formula: take every triple of five variables,
# once positive and once negative; the positive copies rule out three
# falses (>= 3 trues), the negative copies rule out three trues (>= 3
# falses), and 3 + 3 > 5
unsat_clauses = []
for trio in combinations(range(5), 3):
    unsat_clauses.append(MonotoneClause(True, trio))
    unsat_clauses.append(MonotoneClause(False, trio))
unsat = MonotoneFormula(5, tuple(unsat_clauses))
sat_answer, _ = brute_force_satisfiable(unsat)
cert = find_fair(formula_to_instance(unsat), SearchConstraints(EF1))
print(f"\ncovering formula satisfiable: {sat_answer}; EF1 exists: {cert.found}")
assert sat_answer == cert.found
assert not cert.found
print(f"both sides certified over {cert.examined} allocations")
