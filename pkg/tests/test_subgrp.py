import pytest

from permcensus.perm import parse_perm_list, identity, mul
from permcensus.group import PermGroup, cyclic_group, symmetric_group, alternating_group
from permcensus.blocks import wreath_product
from permcensus.subgrp import (
    automorphism_maps,
    fingerprint,
    isomorphisms,
    minimal_normal_subgroups,
    normal_subgroups,
    prime_top_subdirect,
    subgroup_classes,
    total_subgroup_count,
    transitive_subgroup_classes,
)


def G(text, degree=0):
    return PermGroup(parse_perm_list(text, degree))


def brute_force_subgroup_count(W):
    """Total number of subgroups, by closing joins of cyclic subgroups."""
    elems = sorted(W.element_set())
    n = W.degree

    def close(gens):
        out = {identity(n)}
        frontier = [identity(n)]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = mul(a, g)
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(out)

    cyclic = {close([x]) for x in elems}
    subs = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for S in frontier:
            for C in cyclic:
                if not C <= S:
                    T = close(list(S | C))
                    if T not in subs:
                        subs.add(T)
                        new.add(T)
        frontier = new
    return len(subs)


def test_subgroup_classes_small_examples():
    assert len(subgroup_classes(symmetric_group(3))) == 4
    assert len(subgroup_classes(cyclic_group(6))) == 4
    s4 = subgroup_classes(symmetric_group(4))
    assert len(s4) == 11
    assert sorted(g.order for g in s4) == [1, 2, 2, 3, 4, 4, 4, 6, 8, 12, 24]


def test_subgroup_class_sizes_sum_to_total_count():
    for W in [symmetric_group(3), symmetric_group(4), cyclic_group(8),
              G("(1 2 3 4); (1 3)"), alternating_group(4),
              wreath_product(2, cyclic_group(2))]:
        classes = subgroup_classes(W)
        assert total_subgroup_count(classes, W) == brute_force_subgroup_count(W)


def test_transitive_subgroup_classes_counts():
    # the classic count sequence for S_n, n = 2..6
    expected = {2: 1, 3: 2, 4: 5, 5: 5, 6: 16}
    for n, cnt in expected.items():
        got = transitive_subgroup_classes(symmetric_group(n))
        assert len(got) == cnt, n


def test_transitive_classes_of_wreath_with_top_filter():
    W = wreath_product(2, cyclic_group(2))
    assert W.order == 8
    C2 = cyclic_group(2)
    got = transitive_subgroup_classes(W, require_top=C2, block_size=2)
    # C_4, V_4 (regular), D_4 itself
    assert sorted(g.order for g in got) == [4, 4, 8]


def test_fingerprint_separates_and_stats_prove_backtracks_exist():
    stats = {}
    subgroup_classes(symmetric_group(4), stats=stats)
    assert stats["classes"] == 11
    # the diagnostics counters exist and never went negative
    assert stats["backtracks"] >= stats["backtrack_merges"] >= 0


def test_normal_subgroups():
    S4 = symmetric_group(4)
    orders = sorted(N.order for N in normal_subgroups(S4))
    assert orders == [1, 4, 12, 24]
    C6 = cyclic_group(6)
    assert sorted(N.order for N in normal_subgroups(C6)) == [1, 2, 3, 6]


def test_minimal_normal_subgroups():
    S4 = symmetric_group(4)
    mns = minimal_normal_subgroups(S4)
    assert len(mns) == 1 and mns[0].order == 4

    C6 = cyclic_group(6)
    assert sorted(N.order for N in minimal_normal_subgroups(C6)) == [2, 3]

    S3xS3 = G("(1 2 3); (1 2); (4 5 6); (4 5)")
    mns = minimal_normal_subgroups(S3xS3)
    assert sorted(N.order for N in mns) == [3, 3]
    assert all(len(N.orbits()) > 1 for N in mns)


def test_isomorphisms_and_automorphisms():
    C4a = cyclic_group(4)
    C4b = G("(1 3 2 4)")
    assert isomorphisms(C4a, C4b)
    V4 = G("(1 2)(3 4); (1 3)(2 4)")
    assert not isomorphisms(C4a, V4)
    assert len(automorphism_maps(C4a)) == 2
    assert len(automorphism_maps(V4)) == 6
    S3 = symmetric_group(3)
    assert len(automorphism_maps(S3)) == 6
    # exceptional outer automorphisms double |Aut| for S_6
    S6 = symmetric_group(6)
    assert len(automorphism_maps(S6, element_bound=1000)) == 1440


def test_prime_top_subdirect_k2():
    from permcensus.perm import order as perm_order
    S2 = symmetric_group(2)
    got = prime_top_subdirect(2, 2, [S2])
    assert sorted(g.order for g in got) == [4, 4, 8]
    assert all(g.degree == 4 and g.is_transitive() for g in got)
    # C_4 and D_4 have an order-4 element, V_4 does not
    with_4 = [g for g in got if any(perm_order(x) == 4 for x in g.element_set())]
    assert len(with_4) == 2


def test_prime_top_subdirect_matches_join_closure_degree6():
    # degree 6, blocks of size 3: subdirect vs generic enumeration
    from permcensus.blocks import minimal_block_systems
    C3 = cyclic_group(3)
    S3 = symmetric_group(3)
    got = prime_top_subdirect(3, 2, [C3, S3])
    W = wreath_product(3, cyclic_group(2))
    assert W.order == 72
    generic = []
    for K in transitive_subgroup_classes(W):
        systems = minimal_block_systems(K)
        if systems and systems[0].block_size == 3:
            generic.append(K)
    assert len(got) == len(generic)
    got_fp = sorted(fingerprint(g) for g in got)
    gen_fp = sorted(fingerprint(g) for g in generic)
    assert got_fp == gen_fp
