"""Generalized Kneser graphs, exact coloring, and the tightness construction."""

import math
from itertools import combinations

import pytest

from groupfair import (
    EF1,
    Instance,
    SearchConstraints,
    SearchSpaceTooLargeError,
    build_kneser,
    chromatic_number,
    find_fair,
    tightness_instance,
    validate,
)
from groupfair.kneser import Coloring, is_proper, to_dimacs

# chi(K(6,3,2)) measured once by the exact solver and pinned here; the
# acceptance run recomputes it and must land on the same value
CHI_K632 = 6


def test_build_vertices_lexicographic():
    g = build_kneser(4, 2, 1)
    assert g.n == math.comb(4, 2)
    assert g.vertices == (0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100)


def test_edge_rule_brute_force():
    for b, r, s in [(5, 2, 1), (5, 2, 2), (6, 3, 2), (6, 2, 1), (4, 4, 1)]:
        g = build_kneser(b, r, s)
        for i, j in combinations(range(g.n), 2):
            expect = (g.vertices[i] & g.vertices[j]).bit_count() <= s - 1
            assert g.is_edge(i, j) == expect
            assert g.is_edge(j, i) == expect
        assert all(not g.is_edge(i, i) for i in range(g.n))
        assert sum(g.degree(i) for i in range(g.n)) == 2 * len(g.edges())


def test_petersen():
    g = build_kneser(5, 2, 1)
    assert g.n == 10
    assert all(g.degree(i) == 3 for i in range(g.n))
    lo, hi, col = chromatic_number(g)
    assert lo == hi == 3
    assert is_proper(g, col)


def test_s_equals_r_gives_complete_graph():
    # any two distinct r-subsets share at most r-1 elements
    g = build_kneser(5, 2, 2)
    assert len(g.edges()) == g.n * (g.n - 1) // 2
    lo, hi, _ = chromatic_number(g)
    assert lo == hi == g.n


def test_single_vertex_graph():
    g = build_kneser(3, 3, 1)
    assert g.n == 1 and g.edges() == []
    lo, hi, col = chromatic_number(g)
    assert lo == hi == 1
    assert col.colors == (0,)


def test_build_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_kneser(2, 3, 1)
    with pytest.raises(ValueError):
        build_kneser(3, 2, 0)
    with pytest.raises(ValueError):
        build_kneser(3, 2, 3)
    with pytest.raises(SearchSpaceTooLargeError):
        build_kneser(30, 15, 1)


def test_chi_k422_is_six():
    g = build_kneser(4, 2, 2)
    lo, hi, col = chromatic_number(g)
    assert lo == hi == 6
    assert is_proper(g, col) and col.num_colors == 6


def test_chi_k632_regression():
    g = build_kneser(6, 3, 2)
    assert g.n == 20
    lo, hi, col = chromatic_number(g)
    assert lo == hi == CHI_K632
    assert is_proper(g, col)


def test_bounds_mode_brackets_exact():
    for b, r, s in [(5, 2, 1), (4, 2, 2), (6, 3, 2), (6, 2, 2)]:
        g = build_kneser(b, r, s)
        lo, hi, col = chromatic_number(g, mode="bounds")
        assert lo <= hi
        assert is_proper(g, col) and col.num_colors == hi
        exact_lo, exact_hi, _ = chromatic_number(g)
        assert lo <= exact_lo == exact_hi <= hi
    with pytest.raises(ValueError):
        chromatic_number(g, mode="quick")


def test_exact_mode_vertex_cap():
    g = build_kneser(12, 2, 1)  # 66 vertices, fine
    assert g.n <= 70
    big = build_kneser(13, 2, 1)  # 78 vertices, over the cap
    with pytest.raises(SearchSpaceTooLargeError):
        chromatic_number(big)
    lo, hi, _ = chromatic_number(big, mode="bounds")
    assert lo <= hi


def test_is_proper_rejects_defects():
    g = build_kneser(5, 2, 1)
    _, _, col = chromatic_number(g)
    assert is_proper(g, col)
    assert not is_proper(g, Coloring(col.colors, col.num_colors + 1))  # unused color
    assert not is_proper(g, Coloring(col.colors[:-1], col.num_colors))  # short
    assert not is_proper(g, Coloring((0,) * g.n, 1))  # monochromatic edge
    bad = list(col.colors)
    bad[0] = -1
    assert not is_proper(g, Coloring(tuple(bad), col.num_colors))


def test_dimacs_output():
    g = build_kneser(4, 2, 1)
    text = to_dimacs(g)
    lines = text.strip().split("\n")
    assert lines[0].startswith("c ")
    n_decl, e_decl = lines[1].split()[2:4]
    assert int(n_decl) == g.n
    edges = [tuple(int(x) for x in ln.split()[1:]) for ln in lines[2:]]
    assert len(edges) == int(e_decl) == len(g.edges())
    assert all(1 <= i <= g.n and 1 <= j <= g.n for i, j in edges)
    assert {(i - 1, j - 1) for i, j in edges} == set(g.edges())


def test_tightness_instance_shape():
    g = build_kneser(4, 2, 2)
    _, _, col = chromatic_number(g)
    inst = tightness_instance(g, col, (3, 3))
    assert inst.m == 4 and inst.n == 6 and inst.k == 2
    assert validate(inst) == []
    # normalized and subset-monotone by construction; each agent rates her
    # own color's bundles (or their complements) at zero
    for v in inst.agents:
        assert v.value(0) == 0
        assert v.value(0b1111) == 1


def test_tightness_blocks_balanced_ef1():
    g = build_kneser(4, 2, 2)
    _, _, col = chromatic_number(g)
    for split in [(3, 3), (6, 0), (2, 4)]:
        inst = tightness_instance(g, col, split)
        cert = find_fair(inst, SearchConstraints(EF1, balanced_allocation=True))
        assert not cert.found
        assert cert.examined == 6  # the balanced 2+2 splits of four goods


def test_tightness_validates_inputs():
    g = build_kneser(4, 2, 2)
    _, _, col = chromatic_number(g)
    with pytest.raises(ValueError):
        tightness_instance(g, col, (2, 2))  # split does not sum to 6
    with pytest.raises(ValueError):
        tightness_instance(g, Coloring((0,) * g.n, 1), (1, 0))  # improper
    petersen = build_kneser(5, 2, 1)
    _, _, pcol = chromatic_number(petersen)
    with pytest.raises(ValueError):
        tightness_instance(petersen, pcol, (2, 1))  # not K(2t,t,2)


def test_fewer_agents_than_colors_frees_balanced_ef1():
    """With chi-1 or fewer agents a balanced EF1 allocation reappears.

    Dropping any one color class from the tightness instance leaves some
    vertex bundle no remaining agent rejects.
    """
    g = build_kneser(4, 2, 2)
    _, _, col = chromatic_number(g)
    base = tightness_instance(g, col, (6, 0))
    for drop in range(6):
        keep = [a for a in range(6) if a != drop]
        sub = Instance.fixed(4, [base.agents[a] for a in keep], [list(range(5)), []])
        cert = find_fair(sub, SearchConstraints(EF1, balanced_allocation=True))
        assert cert.found
