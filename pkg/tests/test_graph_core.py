"""Rooted graphs, (Z_in, Z_out), gluing and tree enumeration."""
from collections import Counter
from fractions import Fraction

import pytest

from hardcore_ratios.errors import DegreeBound, DomainError, NotATree, OracleLimit, ParseError
from hardcore_ratios.exact_arith import GaussianRational
from hardcore_ratios.graph_core import (
    INDETERMINATE,
    PartitionPair,
    RootedGraph,
    brute_force_partition,
    cayley_tree,
    enumerate_catalog,
    enumerate_rooted_trees,
    equivalence_check,
    find_minimal_zero_tree,
    format_ratio,
    implement_copies,
    implement_on_path,
    independence_polynomial,
    merge_roots,
    partition,
    path,
    ratio,
    single_vertex,
    star,
    tree_partition,
)
from hardcore_ratios.moebius import INFINITY
from hardcore_ratios.regions import shearer_radius

PARAMETERS = [
    GaussianRational(-1, 1),
    GaussianRational(Fraction(1, 3)),
    GaussianRational(Fraction(-4, 27)),
    GaussianRational(Fraction(2, 5), Fraction(-7, 3)),
]


def _cycle(n: int, delta: int = 3) -> RootedGraph:
    return RootedGraph(n, frozenset((i, (i + 1) % n) for i in range(n)), 0, delta)


def test_single_vertex():
    assert partition(single_vertex(), GaussianRational(2)).to_json() == {"z_in": "2", "z_out": "1", "ratio": "2"}


def test_path_two_vanishes_at_minus_half():
    pair = partition(path(2), GaussianRational(Fraction(-1, 2)))
    assert pair.to_json() == {"z_in": "-1/2", "z_out": "1/2", "ratio": "-1"}
    assert pair.total == 0


def test_path_three():
    pair = partition(path(3), GaussianRational(1))
    assert (pair.z_in, pair.z_out) == (2, 3)
    assert pair.total == 5


def test_ratio_edge_values():
    assert PartitionPair(GaussianRational(0), GaussianRational(0)).ratio() is INDETERMINATE
    assert PartitionPair(GaussianRational(1), GaussianRational(0)).ratio() is INFINITY
    assert format_ratio(INFINITY) == "inf"
    assert format_ratio(INDETERMINATE) == "indeterminate"


def test_independence_polynomial():
    # independent sets of P_4: 1 + 4x + 3x^2
    assert independence_polynomial(path(4)) == [1, 4, 3]
    assert independence_polynomial(_cycle(4)) == [1, 4, 2]
    assert independence_polynomial(star(3)) == [1, 4, 3, 1]


def _trees(max_vertices: int):
    return [t for _, t in enumerate_rooted_trees(3, max_vertices)]


@pytest.mark.parametrize("lam", PARAMETERS, ids=str)
def test_tree_recursion_matches_enumeration(lam):
    for tree in _trees(7):
        assert tree_partition(tree, lam) == brute_force_partition(tree, lam)


@pytest.mark.slow
@pytest.mark.parametrize("lam", PARAMETERS, ids=str)
def test_tree_recursion_matches_enumeration_sweep(lam):
    for tree in _trees(10):
        assert tree_partition(tree, lam) == brute_force_partition(tree, lam)
        assert equivalence_check(tree, lam)


def test_graphs_with_cycles_use_enumeration():
    lam = GaussianRational(Fraction(1, 3), 1)
    c4 = _cycle(4)
    assert equivalence_check(c4, lam)
    assert partition(c4, lam) == brute_force_partition(c4, lam)
    with pytest.raises(NotATree):
        tree_partition(c4, lam)


def test_oracle_limit():
    with pytest.raises(OracleLimit):
        brute_force_partition(path(30, 2), GaussianRational(1))
    # the tree recursion has no such limit
    assert tree_partition(path(30, 2), GaussianRational(1)).total > 0


def test_degree_bound():
    with pytest.raises(DegreeBound):
        star(4, delta=3)
    with pytest.raises(DegreeBound):
        RootedGraph.from_json({"vertices": 5, "edges": [[0, 1], [0, 2], [0, 3], [0, 4]], "root": 0, "delta": 3})


def test_graph_json():
    g = cayley_tree(2, 2)
    assert g.vertex_count == 7
    assert RootedGraph.from_json(g.to_json()) == g
    with pytest.raises(ParseError):
        RootedGraph.from_json("{not json")
    with pytest.raises(ParseError):
        RootedGraph.from_json({"edges": []})
    assert "0 -- 1;" in g.to_dot()


def _f(r, z):
    return r / (1 + z)


@pytest.mark.parametrize("lam", PARAMETERS, ids=str)
def test_path_gluing_composes_ratio_maps(lam):
    blocks = [path(2), single_vertex(), path(3), path(2)]
    glued = implement_on_path(blocks, 3)
    assert glued.is_tree()
    assert glued.vertex_count == 8
    z = GaussianRational(0)
    for b in blocks:
        z = _f(ratio(b, lam), z)
    assert ratio(glued, lam) == z


def test_path_gluing_degree_limits():
    # interior blocks may use at most delta - 2 root edges
    middle = RootedGraph(3, frozenset({(0, 1), (0, 2)}), 0, 3)
    with pytest.raises(DegreeBound):
        implement_on_path([path(2), middle, path(2)], 3)
    assert implement_on_path([middle, path(2)], 4).vertex_count == 5
    with pytest.raises(DomainError):
        implement_on_path([], 3)


@pytest.mark.parametrize("lam", PARAMETERS, ids=str)
def test_merge_roots(lam):
    g1, g2 = path(2), path(3)
    merged = merge_roots(g1, g2)
    assert merged.vertex_count == 4
    assert merged.root_degree == 2
    assert ratio(merged, lam) == ratio(g1, lam) * ratio(g2, lam) / lam


def test_implement_copies():
    g, h = path(3, 4), path(2, 4)
    glued = implement_copies(g, h)
    assert glued.vertex_count == 6
    assert glued.root == g.root
    assert glued.is_tree()
    with pytest.raises(DegreeBound):
        implement_copies(path(3, 2), path(2, 2))


def test_enumeration_counts():
    sizes = Counter(t.vertex_count for t in _trees(5))
    assert [sizes[n] for n in range(1, 6)] == [1, 1, 2, 4, 7]
    codes = [code for code, _ in enumerate_rooted_trees(3, 6)]
    assert len(codes) == len(set(codes))
    # on delta = 2 only paths remain, rooted at an end or inside
    assert Counter(t.vertex_count for _, t in enumerate_rooted_trees(2, 4)) == {1: 1, 2: 1, 3: 2, 4: 2}


def test_enumeration_root_class():
    trees = [t for _, t in enumerate_rooted_trees(3, 6, root_degree=1)]
    assert trees and all(t.in_class(1) and t.is_tree() for t in trees)


def test_minimal_zero_tree():
    tree = find_minimal_zero_tree(GaussianRational(Fraction(-1, 2)), 3, 4)
    assert tree is not None
    assert tree.vertex_count == 2
    assert ratio(tree, GaussianRational(Fraction(-1, 2))) == -1
    # inside the Shearer disk no tree has a zero
    assert find_minimal_zero_tree(GaussianRational(Fraction(1, 10)), 3, 6) is None
    with pytest.raises(DomainError):
        find_minimal_zero_tree(GaussianRational(0), 3, 4)


def test_catalog():
    lam = GaussianRational(-1, 1)
    catalog = enumerate_catalog(3, lam, 6)
    values = [e.ratio for e in catalog]
    assert len(values) == len(set(values))
    for entry in catalog:
        assert entry.tree.root_degree <= 1
        assert ratio(entry.tree, lam) == entry.ratio
    assert all(isinstance(e.ratio, GaussianRational) for e in catalog.finite_entries())
    with pytest.raises(DomainError):
        enumerate_catalog(2, lam, 4)


@pytest.mark.parametrize(
    "lam",
    [GaussianRational(Fraction(1, 10)), GaussianRational(Fraction(-1, 10), Fraction(1, 20)), GaussianRational(Fraction(-14, 100))],
    ids=str,
)
def test_ratios_bounded_inside_shearer_disk(lam):
    delta = 3
    assert lam.norm() < shearer_radius(delta) ** 2
    for tree in _trees(8):
        r = ratio(tree, lam)
        bound = delta if tree.root_degree <= delta - 1 else delta - 1
        assert r.norm() * bound * bound < 1
