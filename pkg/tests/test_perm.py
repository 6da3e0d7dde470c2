import pytest

from permcensus.perm import (
    Perm,
    conj,
    cycle_string,
    cycle_type,
    from_cycles,
    identity,
    inv,
    mul,
    order,
    parse_perm,
    parse_perm_list,
    ppow,
)


def test_parse_and_print_roundtrip():
    p = parse_perm("(1 2 3)(4 5)", 6)
    assert cycle_string(p) == "(1 2 3)(4 5)"
    assert p.degree == 6
    assert parse_perm("()", 4) == Perm(range(4))
    assert cycle_string(identity(4)) == "()"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_perm("(1 2")
    with pytest.raises(ValueError):
        parse_perm("(1 2 2)")
    with pytest.raises(ValueError):
        parse_perm("(0 1)")


def test_composition_applies_left_then_right():
    a = from_cycles(3, (0, 1))
    b = from_cycles(3, (1, 2))
    ab = mul(a, b)
    # 0 -a-> 1 -b-> 2
    assert ab[0] == 2


def test_inverse_and_power():
    p = parse_perm("(1 2 3 4)", 4)
    assert mul(p, inv(p)) == identity(4)
    assert ppow(p, 2) == parse_perm("(1 3)(2 4)", 4)
    assert ppow(p, -1) == inv(p)
    assert ppow(p, 0) == identity(4)


def test_order_and_fixed_points():
    p = parse_perm("(1 2 3)(4 5)", 5)
    assert order(p) == 6
    assert p.fixed_points() == frozenset()
    q = parse_perm("(1 3)(2 4)", 4)
    assert order(q) == 2
    assert q.fixed_points() == frozenset()
    assert Perm(range(6)).order() == 1
    assert Perm(range(6)).fixed_points() == frozenset(range(6))


def test_cycle_type_invariant_under_conjugation():
    p = parse_perm("(1 2 3)(4 5)", 6)
    g = parse_perm("(1 6 2 4)", 6)
    assert cycle_type(conj(p, g)) == cycle_type(p) == (1, 2, 3)


def test_conjugation_maps_points():
    # p^g maps g(i) to g(p(i))
    p = parse_perm("(1 2 3)", 5)
    g = parse_perm("(1 4)(2 5)", 5)
    c = conj(p, g)
    for i in range(5):
        assert c[g[i]] == g[p[i]]


def test_parse_perm_list_pads_to_common_degree():
    gens = parse_perm_list("(1 2); (1 2 3 4 5)")
    assert all(g.degree == 5 for g in gens)
    assert gens[0] == parse_perm("(1 2)", 5)
