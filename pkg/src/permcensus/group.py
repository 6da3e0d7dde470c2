"""Permutation groups backed by deterministic stabilizer chains.

The chain (base and strong generating set) is built by Schreier-Sims
closure: generators are placed at the level where sifting leaves them,
then levels are re-closed until every Schreier generator sifts to the
identity.  Points and generators are always processed in sorted order,
so a given generator list produces the same base, transversals and
catalogue hashes every time.  Orders are exact Python integers.
"""

from __future__ import annotations

import random

from .perm import (
    Perm,
    conj,
    cycle_string,
    identity,
    inv,
    is_identity,
    mul,
    order as perm_order,
    ppow,
)

DEFAULT_ELEMENT_BOUND = 10**6


class DegreeMismatch(ValueError):
    pass


class EnumerationBound(RuntimeError):
    """Raised when an exhaustive path would exceed its configured bound."""


class _Level:
    __slots__ = ("beta", "gens", "transversal")

    def __init__(self, beta: int, degree: int):
        self.beta = beta
        self.gens: list[bytes] = []
        self.transversal: dict[int, bytes] = {beta: identity(degree)}


class PermGroup:
    """Immutable permutation group with a stabilizer chain.

    Safe to share between parallel workers; all mutation happens during
    construction.
    """

    __slots__ = ("degree", "gens", "_levels", "_order", "_elements", "_classes")

    def __init__(self, gens, degree: int | None = None, base_prefix=()):
        gens = [bytes(g) for g in gens]
        if degree is None:
            if not gens:
                raise ValueError("degree required for a trivial group")
            degree = len(gens[0])
        if any(len(g) != degree for g in gens):
            raise DegreeMismatch("generators of mixed degree")
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise ValueError("generator is not a permutation")
        self.degree = degree
        self.gens = tuple(g for g in gens if not is_identity(g))
        self._levels: list[_Level] = [_Level(b, degree) for b in base_prefix]
        self._order: int | None = None
        self._elements: frozenset[bytes] | None = None
        self._classes = None
        for g in self.gens:
            self._place(g, 0)
        self._close()
        self._order = 1
        for lv in self._levels:
            self._order *= len(lv.transversal)

    # -- chain construction --------------------------------------------------

    def _strip(self, g: bytes, start: int = 0) -> tuple[bytes, int]:
        for idx in range(start, len(self._levels)):
            lv = self._levels[idx]
            gamma = g[lv.beta]
            if gamma == lv.beta:
                continue
            u = lv.transversal.get(gamma)
            if u is None:
                return g, idx
            g = mul(g, inv(u))
        return g, len(self._levels)

    def _place(self, g: bytes, start: int) -> bool:
        g, idx = self._strip(g, start)
        if is_identity(g):
            return False
        if idx == len(self._levels):
            beta = min(i for i in range(self.degree) if g[i] != i)
            self._levels.append(_Level(beta, self.degree))
        self._levels[idx].gens.append(g)
        return True

    def _close(self) -> None:
        # Fixpoint: recompute each level's orbit from the current strong
        # generators and sift all Schreier generators one level down.
        changed = True
        while changed:
            changed = False
            idx = 0
            while idx < len(self._levels):
                if self._close_level(idx):
                    changed = True
                idx += 1

    def _close_level(self, idx: int) -> bool:
        lv = self._levels[idx]
        gens = [g for l2 in self._levels[idx:] for g in l2.gens]
        trans = {lv.beta: identity(self.degree)}
        frontier = [lv.beta]
        while frontier:
            nxt = []
            for gamma in sorted(frontier):
                u = trans[gamma]
                for s in gens:
                    delta = s[gamma]
                    if delta not in trans:
                        trans[delta] = mul(u, s)
                        nxt.append(delta)
            frontier = nxt
        lv.transversal = trans
        changed = False
        for gamma in sorted(trans):
            u = trans[gamma]
            for s in gens:
                residue = mul(mul(u, s), inv(trans[s[gamma]]))
                if self._place(residue, idx + 1):
                    changed = True
        return changed

    # -- basic queries ---------------------------------------------------------

    @property
    def order(self) -> int:
        return self._order

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(lv.beta for lv in self._levels)

    def basic_orbits(self) -> list[list[int]]:
        return [sorted(lv.transversal) for lv in self._levels]

    def strong_generators(self) -> list[bytes]:
        return [g for lv in self._levels for g in lv.gens]

    def transversal_element(self, level: int, point: int) -> bytes:
        return self._levels[level].transversal[point]

    def __contains__(self, g) -> bool:
        g = bytes(g)
        if len(g) != self.degree:
            raise DegreeMismatch(
                f"degree {len(g)} element tested in degree {self.degree} group")
        residue, _ = self._strip(g)
        return is_identity(residue)

    def contains_group(self, other: "PermGroup") -> bool:
        return all(g in self for g in other.gens)

    def same_group(self, other: "PermGroup") -> bool:
        return (
            self.order == other.order
            and self.degree == other.degree
            and self.contains_group(other)
        )

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        queue = [point]
        while queue:
            a = queue.pop()
            for g in self.gens:
                b = g[a]
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return sorted(seen)

    def orbits(self) -> list[list[int]]:
        left = set(range(self.degree))
        out = []
        while left:
            orb = self.orbit(min(left))
            out.append(orb)
            left -= set(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def is_semiregular(self) -> bool:
        """True when only the identity fixes a point."""
        return all(len(o) == self.order for o in self.orbits())

    def is_regular(self) -> bool:
        return self.is_transitive() and self.order == self.degree

    def with_base_prefix(self, prefix) -> "PermGroup":
        """The same group, rebuilt so the chain base starts with ``prefix``."""
        return PermGroup(self.gens, self.degree, base_prefix=tuple(prefix))

    def stabilizer(self, point: int) -> "PermGroup":
        chain = self
        if not chain._levels or chain._levels[0].beta != point:
            chain = self.with_base_prefix([point])
        gens = [g for lv in chain._levels[1:] for g in lv.gens]
        return PermGroup(gens, self.degree)

    def pointwise_stabilizer(self, points) -> "PermGroup":
        points = list(points)
        chain = self.with_base_prefix(points)
        gens = [g for lv in chain._levels[len(points):] for g in lv.gens]
        return PermGroup(gens, self.degree)

    def conjugated(self, g: bytes) -> "PermGroup":
        return PermGroup([conj(s, g) for s in self.gens], self.degree)

    # -- element access --------------------------------------------------------

    def elements(self, bound: int = DEFAULT_ELEMENT_BOUND):
        """Iterate all elements in a deterministic order (bounded)."""
        if self.order > bound:
            raise EnumerationBound(
                f"group of order {self.order} exceeds element bound {bound}")
        n = self.degree
        levels = self._levels

        def rec(idx: int):
            if idx == len(levels):
                yield identity(n)
                return
            trans = [levels[idx].transversal[g] for g in sorted(levels[idx].transversal)]
            for rest in rec(idx + 1):
                for u in trans:
                    yield mul(rest, u)

        return rec(0)

    def element_set(self, bound: int = DEFAULT_ELEMENT_BOUND) -> frozenset[bytes]:
        if self._elements is None:
            self._elements = frozenset(self.elements(bound))
        return self._elements

    def random_stream(self, seed: int):
        """Deterministic product-replacement walk ("rattle")."""
        rng = random.Random(seed)
        n = self.degree
        if not self.gens:
            while True:
                yield identity(n)
        reservoir = list(self.gens) * max(1, 6 // len(self.gens) + 1)
        reservoir += [identity(n)] * 3
        accu = identity(n)
        for _ in range(30 + 5 * len(reservoir)):
            i = rng.randrange(len(reservoir))
            j = rng.randrange(len(reservoir))
            if i != j:
                reservoir[i] = mul(reservoir[i], reservoir[j])
        while True:
            i = rng.randrange(len(reservoir))
            j = rng.randrange(len(reservoir))
            if i == j:
                j = (j + 1) % len(reservoir)
            reservoir[i] = mul(reservoir[i], reservoir[j])
            accu = mul(accu, reservoir[i])
            yield accu

    def random_element(self, seed: int) -> bytes:
        return next(self.random_stream(seed))

    def conjugacy_classes(self, bound: int = 10**5) -> list[tuple[bytes, int]]:
        """(representative, class size) pairs; exhaustive, hence bounded."""
        if self._classes is not None:
            return self._classes
        elems = self.element_set(bound)
        unseen = set(elems)
        gens = self.gens
        out = []
        while unseen:
            rep = min(unseen)
            orbit = {rep}
            queue = [rep]
            while queue:
                x = queue.pop()
                for g in gens:
                    y = conj(x, g)
                    if y not in orbit:
                        orbit.add(y)
                        queue.append(y)
            out.append((rep, len(orbit)))
            unseen -= orbit
        out.sort()
        self._classes = out
        return out

    def __repr__(self) -> str:
        gens = ", ".join(cycle_string(g) for g in self.gens) or "()"
        return f"PermGroup(degree={self.degree}, order={self.order}, <{gens}>)"


def trivial_group(degree: int) -> PermGroup:
    return PermGroup([], degree)


def symmetric_group(n: int) -> PermGroup:
    if n <= 1:
        return trivial_group(max(n, 1))
    gens = [Perm([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(Perm(list(range(1, n)) + [0]))
    return PermGroup(gens, n)


def alternating_group(n: int) -> PermGroup:
    if n <= 2:
        return trivial_group(max(n, 1))
    three_cycle = Perm([1, 2, 0] + list(range(3, n)))
    if n == 3:
        return PermGroup([three_cycle], n)
    if n % 2:
        big = Perm(list(range(1, n)) + [0])
    else:
        big = Perm([0] + list(range(2, n)) + [1])
    return PermGroup([three_cycle, big], n)


def cyclic_group(n: int) -> PermGroup:
    return PermGroup([Perm(list(range(1, n)) + [0])], n)


# -- actions, quotients, closures --------------------------------------------


def action_image_kernel(G: PermGroup, nobjects: int, act):
    """Image and kernel of the action homomorphism g -> (obj -> act(g, obj)).

    The kernel falls out of a chain on the combined action whose base
    visits every object point first.
    """
    n = G.degree
    ext_gens = []
    img_gens = []
    for g in G.gens:
        obj_part = bytes(act(g, o) for o in range(nobjects))
        img_gens.append(obj_part)
        ext_gens.append(obj_part + bytes(nobjects + i for i in g))
    image = PermGroup(img_gens, nobjects)
    ext = PermGroup(ext_gens, nobjects + n, base_prefix=range(nobjects))
    kernel_gens = []
    for lv in ext._levels[nobjects:]:
        kernel_gens.extend(bytes(x - nobjects for x in g[nobjects:]) for g in lv.gens)
    kernel = PermGroup(kernel_gens, n)
    assert image.order * kernel.order == G.order
    return image, kernel


def coset_action(G: PermGroup, U: PermGroup) -> tuple[PermGroup, list[bytes]]:
    """Action of G on the right cosets of U (U must be a subgroup of G)."""
    image, _aligned, reps = coset_action_aligned(G, U)
    return image, reps


def coset_action_aligned(G: PermGroup, U: PermGroup):
    """(image, aligned generator images, coset reps) for the action on right
    cosets of U; aligned[i] is the image of G.gens[i], identities included
    (PermGroup.gens drops identity generators, so zipping G.gens with
    image.gens is unsound)."""
    reps = [identity(G.degree)]

    def locate(x: bytes) -> int | None:
        for i, r in enumerate(reps):
            if mul(x, inv(r)) in U:
                return i
        return None

    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g in G.gens:
                x = mul(reps[i], g)
                if locate(x) is None:
                    reps.append(x)
                    nxt.append(len(reps) - 1)
        frontier = nxt
    m = len(reps)
    img_gens = []
    for g in G.gens:
        images = bytearray(m)
        for i in range(m):
            images[i] = locate(mul(reps[i], g))
        img_gens.append(bytes(images))
    return PermGroup(img_gens, m), img_gens, reps


def normal_closure(G: PermGroup, seeds) -> PermGroup:
    """Smallest subgroup of G containing the seeds and normalized by G."""
    H = PermGroup([bytes(s) for s in seeds], G.degree)
    while True:
        new = []
        for s in H.gens:
            for g in G.gens:
                c = conj(s, g)
                if c not in H:
                    new.append(c)
        if not new:
            return H
        H = PermGroup(list(H.gens) + new, G.degree)


def derived_subgroup(G: PermGroup) -> PermGroup:
    comms = []
    for a in G.gens:
        for b in G.gens:
            c = mul(mul(inv(a), inv(b)), mul(a, b))
            if not is_identity(c):
                comms.append(c)
    if not comms:
        return trivial_group(G.degree)
    return normal_closure(G, comms)


def abelian_invariant_ranks(G: PermGroup) -> dict[int, int]:
    """Prime -> rank of the p-part of G/[G,G]; these lower-bound d(G)."""
    D = derived_subgroup(G)
    m = G.order // D.order
    if m == 1:
        return {}
    image, _ = coset_action(G, D)
    ranks = {}
    for p in _prime_divisors(m):
        cnt = sum(1 for x in image.element_set() if is_identity(ppow(x, p)))
        ranks[p] = _exact_log(cnt, p)
    return ranks


def _exact_log(x: int, p: int) -> int:
    k = 0
    while p ** (k + 1) <= x:
        k += 1
    return k


# -- element orders, Sylow subgroups, class representatives ------------------


def p_part_of(order: int, p: int) -> int:
    pp = 1
    while order % (pp * p) == 0:
        pp *= p
    return pp


def sylow_subgroup(G: PermGroup, p: int, seed: int = 12345,
                   max_rounds: int = 4000) -> PermGroup:
    """A Sylow p-subgroup, grown from random p-elements.

    Random p-elements are adjoined while the join stays a p-group; when
    growth stalls the search climbs through normalizers.
    """
    if G.order % p:
        raise ValueError(f"{p} does not divide the group order {G.order}")
    target = p_part_of(G.order, p)
    P = trivial_group(G.degree)
    for x in G.gens:
        y = _p_element(x, p)
        if y is not None and y not in P:
            cand = PermGroup(list(P.gens) + [y], G.degree)
            if _is_ppower(cand.order, p):
                P = cand
    stream = G.random_stream(seed)
    rounds = 0
    while P.order < target and rounds < max_rounds:
        rounds += 1
        y = _p_element(next(stream), p)
        if y is None or y in P:
            continue
        cand = PermGroup(list(P.gens) + [y], G.degree)
        if _is_ppower(cand.order, p):
            P = cand
    if P.order < target:
        P = _sylow_climb(G, P, p, target)
    if P.order != target:
        raise EnumerationBound(
            f"Sylow {p}-subgroup search stalled at order {P.order} < {target}")
    return P


def _p_element(x: bytes, p: int) -> bytes | None:
    o = perm_order(x)
    pp = p_part_of(o, p)
    if pp == 1:
        return None
    return ppow(x, o // pp)


def _is_ppower(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


def _sylow_climb(G, P, p, target):
    # N_G(P)/P has order divisible by p while P is not yet Sylow, so a
    # larger p-group lives inside the normalizer.
    from .backtrack import normalizer_in_group

    while P.order < target:
        N = normalizer_in_group(G, P)
        grown = False
        if N.order > P.order:
            for x in sorted(N.element_set(10**5)):
                y = _p_element(x, p)
                if y is not None and y not in P:
                    cand = PermGroup(list(P.gens) + [y], G.degree)
                    if _is_ppower(cand.order, p):
                        P = cand
                        grown = True
                        break
        if not grown:
            break
    return P


def prime_order_class_reps(G: PermGroup, bound: int = DEFAULT_ELEMENT_BOUND,
                           budget=None) -> dict[int, list[bytes]]:
    """For each prime p | |G|, class representatives of the order-p elements.

    Every order-p class meets a fixed Sylow p-subgroup, so the order-p
    elements of one Sylow subgroup are grouped into Sylow-local classes
    and fused by transporter searches in G.
    """
    from .backtrack import element_conjugator_in_group

    if G.order > bound:
        raise EnumerationBound(
            f"order {G.order} exceeds class-representative bound {bound}")
    out: dict[int, list[bytes]] = {}
    for p in _prime_divisors(G.order):
        P = sylow_subgroup(G, p)
        elems = [x for x in P.element_set(10**6) if perm_order(x) == p]
        local: list[bytes] = []
        seen: set[bytes] = set()
        for x in sorted(elems):
            if x in seen:
                continue
            orbit = {x}
            queue = [x]
            while queue:
                z = queue.pop()
                for g in P.gens:
                    w = conj(z, g)
                    if w not in orbit:
                        orbit.add(w)
                        queue.append(w)
            seen |= orbit
            local.append(x)
        reps: list[bytes] = []
        for x in local:
            if any(element_conjugator_in_group(G, x, r, budget=budget) is not None
                   for r in reps):
                continue
            reps.append(x)
        out[p] = reps
    return out


def _prime_divisors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return out
