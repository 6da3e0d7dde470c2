import math

import pytest

from permcensus.perm import Perm, parse_perm, order as perm_order
from permcensus.group import (
    DegreeMismatch,
    PermGroup,
    abelian_invariant_ranks,
    action_image_kernel,
    alternating_group,
    coset_action,
    cyclic_group,
    derived_subgroup,
    normal_closure,
    p_part_of,
    prime_order_class_reps,
    symmetric_group,
    sylow_subgroup,
    trivial_group,
)


def G(text, degree=0):
    from permcensus.perm import parse_perm_list
    return PermGroup(parse_perm_list(text, degree))


def test_build_group_orders():
    assert G("(1 2 3 4)").order == 4
    assert G("(1 2); (1 2 3 4 5 6 7 8)").order == math.factorial(8)
    K = G("(1 2)(3 4); (1 3)(2 4)")
    assert K.order == 4
    assert K.is_transitive()


def test_symmetric_alternating_cyclic_constructors():
    for n in range(2, 9):
        assert symmetric_group(n).order == math.factorial(n)
    for n in range(3, 9):
        assert alternating_group(n).order == math.factorial(n) // 2
    for n in range(2, 9):
        assert cyclic_group(n).order == n


def test_order_equals_product_of_basic_orbits():
    for grp in [G("(1 2 3 4)"), symmetric_group(5), G("(1 2)(3 4); (1 3)(2 4)")]:
        prod = 1
        for orb in grp.basic_orbits():
            prod *= len(orb)
        assert prod == grp.order


def test_orbit_stabilizer_consistency():
    # |G| = |orbit(a)| * |G_a| for several groups
    for grp in [symmetric_group(5), G("(1 2 3 4 5 6)"), G("(1 2 3); (4 5)", 5)]:
        stab = grp.stabilizer(0)
        assert grp.order == len(grp.orbit(0)) * stab.order


def test_contains_and_degree_mismatch():
    S4 = symmetric_group(4)
    assert parse_perm("(1 2 3)", 4) in S4
    C4 = G("(1 2 3 4)")
    assert parse_perm("(1 2)", 4) not in C4
    V4 = G("(1 2)(3 4); (1 3)(2 4)")
    assert parse_perm("(1 4)(2 3)", 4) in V4
    with pytest.raises(DegreeMismatch):
        parse_perm("(1 2 3 4 5)", 5) in S4


def test_orbits_and_transitivity():
    grp = G("(1 2)(3 4)")
    assert grp.orbits() == [[0, 1], [2, 3]]
    assert not grp.is_transitive()
    assert G("(1 2 3 4)").is_transitive()
    grp = G("(1 2 3); (4 5)", 5)
    assert grp.orbits() == [[0, 1, 2], [3, 4]]


def test_base_is_smallest_moved_points_and_deterministic():
    S4 = symmetric_group(4)
    assert S4.base[0] == 0
    again = symmetric_group(4)
    assert S4.base == again.base
    assert S4.strong_generators() == again.strong_generators()


def test_element_iteration_matches_order():
    for grp in [symmetric_group(4), G("(1 2 3 4)"), trivial_group(3)]:
        elems = list(grp.elements())
        assert len(elems) == grp.order == len(set(elems))


def test_random_element_stays_in_group_and_is_deterministic():
    S4 = symmetric_group(4)
    for seed in range(1, 30):
        assert S4.random_element(seed) in S4
    assert S4.random_element(7) == S4.random_element(7)
    assert trivial_group(4).random_element(3) == bytes(range(4))


def test_random_elements_of_c4_stay_inside():
    C4 = G("(1 2 3 4)")
    allowed = C4.element_set()
    for seed in range(1, 101):
        assert C4.random_element(seed) in allowed


def test_random_stream_hits_every_element_of_s4():
    S4 = symmetric_group(4)
    seen = set()
    stream = S4.random_stream(99)
    for _ in range(10**4):
        seen.add(next(stream))
    assert len(seen) == 24


def test_pointwise_stabilizer():
    S5 = symmetric_group(5)
    st = S5.pointwise_stabilizer([0, 1])
    assert st.order == 6
    assert all(g[0] == 0 and g[1] == 1 for g in st.gens)


def test_prime_order_class_reps_small():
    C4 = G("(1 2 3 4)")
    reps = prime_order_class_reps(C4)
    assert set(reps) == {2}
    assert reps[2] == [parse_perm("(1 3)(2 4)", 4)]

    S3 = symmetric_group(3)
    reps = prime_order_class_reps(S3)
    assert len(reps[2]) == 1 and len(reps[3]) == 1

    V4 = G("(1 2)(3 4); (1 3)(2 4)")
    assert len(prime_order_class_reps(V4)[2]) == 3


def test_prime_order_class_reps_complete_against_brute_force():
    # every order-p element is conjugate to some returned representative
    from permcensus.perm import conj
    for grp in [symmetric_group(4), G("(1 2 3 4 5 6)"), G("(1 2 3 4); (1 3)")]:
        reps = prime_order_class_reps(grp)
        for p, plist in reps.items():
            classes = set()
            for r in plist:
                orbit = {r}
                queue = [r]
                while queue:
                    x = queue.pop()
                    for g in grp.gens:
                        y = conj(x, g)
                        if y not in orbit:
                            orbit.add(y)
                            queue.append(y)
                classes |= orbit
            brute = {x for x in grp.element_set() if perm_order(x) == p}
            assert classes == brute


def test_sylow_subgroup_orders():
    S4 = symmetric_group(4)
    assert sylow_subgroup(S4, 2).order == 8
    assert sylow_subgroup(S4, 3).order == 3
    C12 = cyclic_group(12)
    assert sylow_subgroup(C12, 2).order == 4
    with pytest.raises(ValueError):
        sylow_subgroup(S4, 5)


def test_sylow_orders_randomized_small_groups():
    rng_groups = [
        symmetric_group(5),
        alternating_group(5),
        G("(1 2 3 4 5 6); (2 6)(3 5)"),
        G("(1 2 3 4)(5 6 7 8); (1 5)(2 6)(3 7)(4 8)"),
        symmetric_group(6),
    ]
    for grp in rng_groups:
        for p in (2, 3, 5):
            if grp.order % p == 0:
                assert sylow_subgroup(grp, p).order == p_part_of(grp.order, p)


def test_coset_action_regular_representation():
    S3 = symmetric_group(3)
    image, reps = coset_action(S3, trivial_group(3))
    assert image.degree == 6 and image.order == 6
    image, reps = coset_action(S3, S3.stabilizer(0))
    assert image.degree == 3
    assert image.order == 6


def test_action_image_kernel_block_style():
    # S_4 acting on the 3 partitions of {0..3} into two pairs
    S4 = symmetric_group(4)
    pairs = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]

    def act(g, i):
        a, b = pairs[i]
        img = tuple(sorted(g[x] for x in a))
        for j, (c, d) in enumerate(pairs):
            if img in (c, d):
                return j
        raise AssertionError

    image, kernel = action_image_kernel(S4, 3, act)
    assert image.order == 6
    assert kernel.order == 4


def test_normal_closure_and_derived():
    S4 = symmetric_group(4)
    v = normal_closure(S4, [parse_perm("(1 2)(3 4)", 4)])
    assert v.order == 4
    d = derived_subgroup(S4)
    assert d.order == 12
    assert derived_subgroup(d).order == 4


def test_abelian_invariant_ranks():
    assert abelian_invariant_ranks(cyclic_group(4)) == {2: 1}
    assert abelian_invariant_ranks(G("(1 2)(3 4); (1 3)(2 4)")) == {2: 2}
    assert abelian_invariant_ranks(symmetric_group(4)) == {2: 1}
    assert abelian_invariant_ranks(alternating_group(5)) == {}
    assert abelian_invariant_ranks(cyclic_group(6)) == {2: 1, 3: 1}
