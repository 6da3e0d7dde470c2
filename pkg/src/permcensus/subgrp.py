"""Subgroup enumeration up to conjugacy and related structural machinery.

The core engine is an upward join closure: starting from the trivial
subgroup, class representatives are extended by representatives of the
element classes of prime-power order, with conjugacy reduction after each
join.  Any subgroup is reachable this way because every element decomposes
into its prime-power parts.

Also here: normal subgroup lattices, abstract isomorphisms/automorphisms
of small groups by generator images, and the subdirect-product
construction for groups whose block action has prime order.
"""

from __future__ import annotations

from .perm import conj, cycle_type, identity, inv, is_identity, mul, order as perm_order
from .group import EnumerationBound, PermGroup, coset_action, normal_closure, trivial_group
from .backtrack import SearchBudget, UNDETERMINED, are_conjugate, normalizer

JOIN_ORDER_BOUND = 10**5
CYCLE_FP_BOUND = 25_000


def reduce_generators(G: PermGroup) -> PermGroup:
    """Drop redundant generators (greedy); keeps chains small in join loops."""
    gens = list(G.gens)
    changed = True
    while changed and len(gens) > 1:
        changed = False
        for i in range(len(gens) - 1, -1, -1):
            rest = gens[:i] + gens[i + 1:]
            if rest and PermGroup(rest, G.degree).order == G.order:
                gens = rest
                changed = True
                break
    return PermGroup(gens, G.degree)


def fingerprint(G: PermGroup, cycle_bound: int = CYCLE_FP_BOUND) -> tuple:
    """Cheap conjugacy-invariant data; equal fingerprints still need a
    backtrack confirmation, never the other way around."""
    orbit_sizes = tuple(sorted(len(o) for o in G.orbits()))
    base = (G.order, orbit_sizes)
    if G.order <= cycle_bound:
        hist: dict[tuple, int] = {}
        for x in G.element_set(cycle_bound):
            t = cycle_type(x)
            hist[t] = hist.get(t, 0) + 1
        return base + (tuple(sorted(hist.items())),)
    from .group import derived_subgroup
    D = derived_subgroup(G)
    return base + ((D.order, G.order // D.order),)


class ClassList:
    """Conjugacy classes of subgroups, reduced inside a fixed ambient group
    (None means the full symmetric group)."""

    def __init__(self, ambient: PermGroup | None, budget: SearchBudget | None = None):
        self.ambient = ambient
        self.budget = budget or SearchBudget(on_exhaustion="raise")
        self.classes: list[PermGroup] = []
        self._buckets: dict[tuple, list[int]] = {}
        self.backtracks = 0
        self.backtrack_merges = 0

    def insert(self, G: PermGroup) -> tuple[int, bool]:
        """(class index, was_new); exact conjugacy reduction."""
        fp = fingerprint(G)
        bucket = self._buckets.setdefault(fp, [])
        for idx in bucket:
            other = self.classes[idx]
            if G.same_group(other):
                return idx, False
            self.backtracks += 1
            w = are_conjugate(G, other, ambient=self.ambient, budget=self.budget)
            if w is UNDETERMINED:
                raise EnumerationBound("conjugacy dedup exceeded its budget")
            if w is not None:
                self.backtrack_merges += 1
                return idx, False
        self.classes.append(G)
        bucket.append(len(self.classes) - 1)
        return len(self.classes) - 1, True


def element_classes(W: PermGroup, bound: int) -> list[tuple[bytes, list[bytes]]]:
    """Conjugacy classes of W as (least representative, all elements)."""
    elems = W.element_set(bound)
    unseen = set(elems)
    out = []
    while unseen:
        rep = min(unseen)
        orbit = {rep}
        queue = [rep]
        while queue:
            x = queue.pop()
            for g in W.gens:
                y = conj(x, g)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        unseen -= orbit
        out.append((rep, sorted(orbit)))
    out.sort()
    return out


def _is_prime_power(m: int) -> bool:
    if m < 2:
        return False
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            return m == 1
        p += 1
    return True


def subgroup_classes(W: PermGroup, order_bound: int = JOIN_ORDER_BOUND,
                     budget: SearchBudget | None = None,
                     stats: dict | None = None) -> list[PermGroup]:
    """Every subgroup of W, one representative per W-conjugacy class.

    Upward join closure from the trivial group, extending by prime-power
    element classes; the extending element ranges over one representative
    per conjugation orbit of the current subgroup on the class.
    """
    if W.order > order_bound:
        raise EnumerationBound(
            f"|W| = {W.order} exceeds the subgroup enumeration bound {order_bound}")
    n = W.degree
    eclasses = [(rep, elems) for rep, elems in element_classes(W, order_bound)
                if _is_prime_power(perm_order(rep))]
    found = ClassList(W, budget)
    trivial = trivial_group(n)
    found.insert(trivial)
    frontier = [trivial]
    while frontier:
        new_groups = []
        for K in frontier:
            k_elems = K.element_set() if K.order <= CYCLE_FP_BOUND else None
            for rep, elems in eclasses:
                if K.order * perm_order(rep) > W.order:
                    continue
                seen: set[bytes] = set()
                for x in elems:
                    if x in seen:
                        continue
                    orbit = {x}
                    queue = [x]
                    while queue:
                        z = queue.pop()
                        for g in K.gens:
                            y = conj(z, g)
                            if y not in orbit:
                                orbit.add(y)
                                queue.append(y)
                    seen |= orbit
                    inside = (x in k_elems) if k_elems is not None else (x in K)
                    if inside:
                        continue
                    J = reduce_generators(PermGroup(list(K.gens) + [x], n))
                    _, new = found.insert(J)
                    if new:
                        new_groups.append(J)
        frontier = new_groups
    out = sorted(found.classes, key=lambda g: (g.order, fingerprint(g)))
    if stats is not None:
        stats["classes"] = len(out)
        stats["backtracks"] = found.backtracks
        stats["backtrack_merges"] = found.backtrack_merges
    return out


def total_subgroup_count(classes: list[PermGroup], W: PermGroup) -> int:
    """Sum of class sizes |W : N_W(K)|; cross-checked against brute force."""
    total = 0
    for K in classes:
        N = normalizer(K, ambient=W)
        total += W.order // N.order
    return total


def transitive_subgroup_classes(W: PermGroup,
                                require_top: PermGroup | None = None,
                                block_size: int | None = None,
                                order_bound: int = JOIN_ORDER_BOUND,
                                budget: SearchBudget | None = None) -> list[PermGroup]:
    """Classes of transitive subgroups of W.

    With require_top (and the size of the standard cells), only groups
    whose action on the standard blocks is exactly that top group are kept.
    """
    from .blocks import block_action, standard_blocks

    out = []
    for K in subgroup_classes(W, order_bound, budget):
        if not K.gens or not K.is_transitive():
            continue
        if require_top is not None:
            B = standard_blocks(block_size, W.degree // block_size)
            top, _ = block_action(K, B)
            if not top.same_group(require_top):
                continue
        out.append(K)
    return out


# -- normal subgroups ---------------------------------------------------------------


def _group_key(H: PermGroup) -> tuple:
    return (H.order, tuple(sorted(H.gens)))


def _add_unless_known(groups: list[PermGroup], M: PermGroup) -> bool:
    if any(M.same_group(X) for X in groups if X.order == M.order):
        return False
    groups.append(M)
    return True


def normal_subgroups(G: PermGroup, bound: int = 10**5) -> list[PermGroup]:
    """All normal subgroups (join closure of conjugacy-class closures)."""
    if G.order > bound:
        raise EnumerationBound(f"normal subgroup scan needs order <= {bound}")
    reps = [rep for rep, _ in element_classes(G, bound) if not is_identity(rep)]
    normals = [trivial_group(G.degree)]
    frontier = list(normals)
    while frontier:
        new = []
        for N in frontier:
            for r in reps:
                if r in N:
                    continue
                M = normal_closure(G, list(N.gens) + [r])
                if _add_unless_known(normals, M):
                    new.append(M)
        frontier = new
    return sorted(normals, key=_group_key)


def minimal_normal_subgroups(G: PermGroup, bound: int = 10**5) -> list[PermGroup]:
    """Normal closures of prime-order elements, minimal under containment."""
    if G.order > bound:
        raise EnumerationBound(f"minimal normal scan needs order <= {bound}")
    from .group import prime_order_class_reps

    closures: list[PermGroup] = []
    for _p, reps in sorted(prime_order_class_reps(G, bound).items()):
        for r in reps:
            _add_unless_known(closures, normal_closure(G, [r]))
    out = [M for M in closures
           if not any(N.order < M.order and M.contains_group(N) for N in closures)]
    return sorted(out, key=_group_key)


# -- abstract isomorphisms and automorphisms by generator images ---------------------


def _hom_from_generator_images(G: PermGroup, gens: list[bytes],
                               images: list[bytes], H: PermGroup,
                               element_bound: int = 10**6):
    """The hom G -> H sending gens to images, as a full dict, or None.

    Walks the Cayley graph of G over `gens`, defining the map along a
    spanning tree and checking every other edge (hence every relation).
    """
    m = {identity(G.degree): identity(H.degree)}
    frontier = [identity(G.degree)]
    while frontier:
        nxt = []
        for x in frontier:
            mx = m[x]
            for g, img in zip(gens, images):
                y = mul(x, g)
                my = mul(mx, img)
                got = m.get(y)
                if got is None:
                    if len(m) > element_bound:
                        return None
                    m[y] = my
                    nxt.append(y)
                elif got != my:
                    return None
        frontier = nxt
    return m


def _class_decomposition(G: PermGroup, bound: int):
    """element -> (order, class size) over all of G."""
    out: dict[bytes, tuple[int, int]] = {}
    for rep, size in G.conjugacy_classes(bound):
        orbit = {rep}
        queue = [rep]
        while queue:
            x = queue.pop()
            for g in G.gens:
                y = conj(x, g)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        data = (perm_order(rep), size)
        for x in orbit:
            out[x] = data
    return out


def isomorphisms(G: PermGroup, H: PermGroup, find_all: bool = False,
                 element_bound: int = 20000) -> list[tuple[list[bytes], list[bytes]]]:
    """Isomorphisms G -> H as (generators of G, their images) pairs.

    Candidate images are matched on (order, class size) and verified by a
    full Cayley-graph walk; the generating set is reduced first to keep
    the candidate tuples short.
    """
    if G.order != H.order or G.order > element_bound:
        return []
    gens = list(reduce_generators(G).gens)
    if not gens:
        return [([], [])] if H.order == 1 else []
    g_data = _class_decomposition(G, element_bound)
    h_data = _class_decomposition(H, element_bound)
    if sorted(g_data.values()) != sorted(h_data.values()):
        return []
    h_elems = sorted(H.element_set(element_bound))
    cand = [[x for x in h_elems if h_data[x] == g_data[g]] for g in gens]
    sub_orders = [PermGroup(gens[:i + 1], G.degree).order for i in range(len(gens))]
    out: list[tuple[list[bytes], list[bytes]]] = []

    def rec(idx: int, chosen: list[bytes]) -> bool:
        if idx == len(gens):
            m = _hom_from_generator_images(G, gens, chosen, H, element_bound)
            if m is not None and len(set(m.values())) == G.order:
                out.append((list(gens), list(chosen)))
                return not find_all
            return False
        for x in cand[idx]:
            if PermGroup(chosen + [x], H.degree).order != sub_orders[idx]:
                continue
            if rec(idx + 1, chosen + [x]):
                return True
        return False

    rec(0, [])
    return out


def automorphism_maps(G: PermGroup, element_bound: int = 20000) -> list[dict]:
    """All automorphisms of a small group as full element maps."""
    out = []
    for gens, images in isomorphisms(G, G, find_all=True, element_bound=element_bound):
        m = _hom_from_generator_images(G, gens, images, G)
        if m is not None:
            out.append(m)
    return out


# -- prime-order top: subdirect products ----------------------------------------------


def prime_top_subdirect(k: int, q: int, constituents: list[PermGroup],
                        budget: SearchBudget | None = None) -> list[PermGroup]:
    """Transitive groups of degree k*q with primitive block constituents and
    a block action of prime order q, up to symmetric-group conjugacy.

    The kernel of the block action is a subdirect product inside P x P
    (Goursat: two normal subgroups with isomorphic quotients); the group
    is generated by the kernel and one block-swapping element t with
    t^2 in the kernel.  Only q = 2 is implemented; that covers every
    routing performed here, other prime tops stay on the generic path.
    """
    if q != 2:
        raise EnumerationBound("subdirect construction implemented for q = 2 only")
    budget = budget or SearchBudget(on_exhaustion="raise")
    n = 2 * k
    out: list[PermGroup] = []
    swap_half = bytes(range(k, 2 * k))
    for P in constituents:
        if P.degree != k or not P.is_transitive():
            raise ValueError("constituents must be transitive of degree k")
        p_elems = sorted(P.element_set(10**6))
        for N in _subdirect_kernels(P, budget):
            groups_for_N: list[PermGroup] = []
            for c in p_elems:
                t = swap_half + bytes(c)
                if mul(t, t) not in N:
                    continue
                if any(conj(s, t) not in N for s in N.gens):
                    continue
                if any(t in G for G in groups_for_N):
                    continue
                groups_for_N.append(PermGroup(list(N.gens) + [t], n))
            out.extend(groups_for_N)
    from .blocks import minimal_block_systems

    filtered = []
    for G in out:
        assert G.is_transitive()
        systems = minimal_block_systems(G)
        if systems and systems[0].block_size == k:
            filtered.append(G)
    dedup = ClassList(None, budget)
    result = []
    for G in sorted(filtered, key=lambda g: (g.order, fingerprint(g))):
        _, new = dedup.insert(G)
        if new:
            result.append(G)
    return result


def _subdirect_kernels(P: PermGroup, budget: SearchBudget) -> list[PermGroup]:
    """Subdirect products N <= P x P with both projections equal to P.

    Goursat parametrisation over pairs of normals with isomorphic
    quotients.  Full-diagonal kernels are graphs of automorphisms; only
    automorphism classes not realised by symmetric-group conjugation give
    new kernels, the rest are conjugate to the plain diagonal.
    """
    k = P.degree
    kernels: list[PermGroup] = []
    normals = normal_subgroups(P) if P.order <= 10**5 else _normal_chain_large(P)
    for A in normals:
        for B in normals:
            if A.order != B.order:
                continue
            if A.order == P.order:
                if B.order == P.order:
                    kernels.append(PermGroup(
                        [_left(g, k) for g in P.gens]
                        + [_right(g, k) for g in P.gens], 2 * k))
                continue
            if A.order == 1:
                if B.order != 1:
                    continue
                for amap in _diagonal_automorphism_reps(P):
                    kernels.append(PermGroup(
                        [bytes(g) + bytes(x + k for x in amap[bytes(g)])
                         for g in P.gens], 2 * k))
                continue
            for gens, lifted in _quotient_isomorphisms(P, A, B):
                pair_gens = ([_left(a, k) for a in A.gens]
                             + [_right(b, k) for b in B.gens]
                             + [bytes(g) + bytes(x + k for x in w)
                                for g, w in zip(gens, lifted)])
                N = PermGroup(pair_gens, 2 * k)
                if N.order != P.order * A.order:
                    continue
                kernels.append(N)
    checked = []
    for N in kernels:
        left = PermGroup([bytes(g[:k]) for g in N.gens], k)
        right = PermGroup([bytes(x - k for x in g[k:]) for g in N.gens], k)
        if left.same_group(P) and right.same_group(P):
            checked.append(N)
    return checked


def _left(g: bytes, k: int) -> bytes:
    return bytes(g) + bytes(range(k, 2 * k))


def _right(g: bytes, k: int) -> bytes:
    return bytes(range(k)) + bytes(x + k for x in g)


def _normal_chain_large(P: PermGroup) -> list[PermGroup]:
    # the large constituents used here (alternating/symmetric, degree >= 7)
    # have a chain of normal subgroups given by iterated derived subgroups
    from .group import derived_subgroup

    out = [trivial_group(P.degree), P]
    D = derived_subgroup(P)
    while D.order > 1 and not any(D.same_group(X) for X in out):
        out.append(D)
        D = derived_subgroup(D)
    return sorted(out, key=lambda H: H.order)


def _diagonal_automorphism_reps(P: PermGroup) -> list[dict]:
    """Identity plus representatives of automorphism classes not realised by
    conjugation inside the symmetric group."""
    ident = {x: x for x in P.element_set(10**6)}
    if P.order > 2000:
        # Aut is realised by the symmetric-group normalizer for the big
        # constituents used here (no exceptional outer automorphisms away
        # from degree 6)
        return [ident]
    N = normalizer(P)
    realized_keys = set()
    for r in _coset_reps(N, P):
        realized_keys.add(tuple(sorted(
            (x, conj(x, r)) for x in P.element_set())))
    reps: list[dict] = [ident]
    for m in automorphism_maps(P):
        key = tuple(sorted(m.items()))
        if key in realized_keys:
            continue
        known = False
        for rep in reps:
            rep_inv = {v: kk for kk, v in rep.items()}
            comp = tuple(sorted((x, m[rep_inv[x]]) for x in m))
            if comp in realized_keys:
                known = True
                break
        if not known:
            reps.append(m)
    return reps


def _coset_reps(N: PermGroup, P: PermGroup) -> list[bytes]:
    """Right-coset representatives of P in N."""
    if N.order // P.order > 5000:
        raise EnumerationBound("normalizer transversal too large")
    reps = [identity(N.degree)]
    for g in N.elements(10**6):
        if all(mul(g, inv(r)) not in P for r in reps):
            reps.append(g)
        if len(reps) * P.order == N.order:
            break
    return reps


def _quotient_isomorphisms(P: PermGroup, A: PermGroup, B: PermGroup):
    """All isomorphisms P/A -> P/B, as (P.gens, lifted images in P).

    The quotients are realised as coset actions whose generator lists are
    aligned with P.gens, so an isomorphism lifts by rewriting quotient
    words over P's generators.
    """
    QA, qa_imgs, _ = coset_action_aligned(P, A)
    QB, qb_imgs, _ = coset_action_aligned(P, B)
    out = []
    for iso_gens, iso_images in isomorphisms(QA, QB, find_all=True):
        m = _hom_from_generator_images(QA, iso_gens, iso_images, QB)
        if m is None:
            continue
        lifted = []
        for i, _g in enumerate(P.gens):
            target = m[qa_imgs[i]]
            word = _word_over_generators(QB, qb_imgs, target)
            w = identity(P.degree)
            for idx in word:
                w = mul(w, P.gens[idx])
            lifted.append(w)
        out.append((list(P.gens), lifted))
    return out


_WORD_CACHE: dict[int, tuple[PermGroup, dict]] = {}


def _word_over_generators(Q: PermGroup, gens: list[bytes], x: bytes) -> tuple[int, ...]:
    """x as a product over the given generator list (as indices into it)."""
    got = _WORD_CACHE.get(id(Q))
    if got is None:
        cache = {identity(Q.degree): ()}
        frontier = [identity(Q.degree)]
        while frontier:
            nxt = []
            for z in frontier:
                for i, g in enumerate(gens):
                    y = mul(z, g)
                    if y not in cache:
                        cache[y] = cache[z] + (i,)
                        nxt.append(y)
            frontier = nxt
        # keep a reference to Q so the id key stays unique
        _WORD_CACHE[id(Q)] = (Q, cache)
        got = _WORD_CACHE[id(Q)]
    return got[1][bytes(x)]
