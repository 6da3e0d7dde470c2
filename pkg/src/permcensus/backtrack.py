"""Backtrack searches: subgroup conjugacy, normalizers, minimal set images,
regular subgroups, and automorphism groups of regular groups.

All conjugacy-flavoured searches share one depth-first engine over point
images.  Pruning uses the orbital structure (orbits on ordered pairs,
sharpened by a few rounds of invariant refinement) and, for groups small
enough to enumerate, an arc-consistency filter tracking which target
elements each source element can still map to.  Search effort is metered
by a SearchBudget; exceeding it never produces a wrong answer, only an
explicit "undetermined".
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .perm import conj, cycle_type, identity, inv, is_identity, mul, order as perm_order
from .group import EnumerationBound, PermGroup

MASK_ELEMENT_BOUND = 3000
TRACK_LIMIT = 160


class BudgetExceeded(RuntimeError):
    pass


class _Undetermined:
    __slots__ = ()

    def __repr__(self):
        return "UNDETERMINED"

    def __bool__(self):
        raise TypeError("undetermined search result used as a boolean")


UNDETERMINED = _Undetermined()


@dataclass
class SearchBudget:
    """Node/time limits for a backtrack search.

    on_exhaustion selects between raising BudgetExceeded ("raise") and
    returning the UNDETERMINED sentinel ("undetermined").
    """

    node_limit: int = 10**8
    time_limit: float | None = None
    on_exhaustion: str = "undetermined"
    nodes: int = 0
    started: float = field(default_factory=time.monotonic)

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExceeded(f"node limit {self.node_limit} exceeded")
        if self.time_limit is not None and not self.nodes % 1024:
            if time.monotonic() - self.started > self.time_limit:
                raise BudgetExceeded(f"time limit {self.time_limit}s exceeded")


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# -- orbital (pair-class) structure -------------------------------------------


class PairStructure:
    """Orbits of a group on ordered point pairs, with stable invariants.

    The per-class invariants are refined WL-style so that classes of two
    groups can only be matched when their refined invariants agree.
    """

    def __init__(self, G: PermGroup):
        n = G.degree
        self.n = n
        cls = [[-1] * n for _ in range(n)]
        cid = 0
        reps: list[tuple[tuple[int, int], int]] = []
        for i in range(n):
            for j in range(n):
                if cls[i][j] >= 0:
                    continue
                queue = [(i, j)]
                cls[i][j] = cid
                size = 1
                while queue:
                    a, b = queue.pop()
                    for g in G.gens:
                        a2, b2 = g[a], g[b]
                        if cls[a2][b2] < 0:
                            cls[a2][b2] = cid
                            size += 1
                            queue.append((a2, b2))
                reps.append(((i, j), size))
                cid += 1
        self.classes = cls
        self.count = cid
        paired = [cls[j][i] for (i, j), _ in reps]
        inv: list = [(int(r[0][0] == r[0][1]), r[1]) for r in reps]
        for _ in range(3):
            nxt = []
            for c, ((i, j), _size) in enumerate(reps):
                around = tuple(sorted(
                    (inv[cls[i][k]], inv[cls[k][j]]) for k in range(n)))
                nxt.append(hash((inv[c], inv[paired[c]], around)))
            inv = nxt
        base = [(int(i == j), s) for (i, j), s in reps]
        self.invariant = [hash((b, r)) for b, r in zip(base, inv)]


# -- the shared DFS engine ------------------------------------------------------


class _ConjSearch:
    """Search for g with A^g = B, optionally restricted to an ambient group."""

    def __init__(self, A: PermGroup, B: PermGroup, ambient: PermGroup | None,
                 budget: SearchBudget):
        self.A, self.B = A, B
        self.n = A.degree
        self.budget = budget
        self.ambient = ambient
        self.pa = PairStructure(A)
        self.pb = self.pa if A is B else PairStructure(B)
        self.amb_cls = None
        if ambient is not None and ambient.order < _factorial(self.n):
            self.amb_cls = PairStructure(ambient).classes
        self.order = self._point_order()
        self.use_masks = (A.order <= MASK_ELEMENT_BOUND
                          and B.order <= MASK_ELEMENT_BOUND)
        if self.use_masks:
            self._init_masks()

    def _point_order(self) -> list[int]:
        cls = self.pa.classes
        chosen = [0]
        left = set(range(1, self.n))
        while left:
            best = min(left, key=lambda p: (
                -len({cls[p][q] for q in chosen} | {cls[q][p] for q in chosen}), p))
            chosen.append(best)
            left.remove(best)
        return chosen

    def _init_masks(self) -> None:
        self.b_elems = sorted(self.B.element_set())
        by_type: dict[tuple, int] = {}
        for i, b in enumerate(self.b_elems):
            t = cycle_type(b)
            by_type[t] = by_type.get(t, 0) | (1 << i)
        a_all = [a for a in sorted(self.A.element_set()) if not is_identity(a)]
        if len(a_all) <= TRACK_LIMIT:
            tracked = a_all
        else:
            pool = dict.fromkeys(
                list(self.A.gens)
                + [inv(x) for x in self.A.gens]
                + [mul(x, y) for x in self.A.gens for y in self.A.gens])
            tracked = [a for a in pool if not is_identity(a)][:TRACK_LIMIT]
        self.tracked = tracked
        self.tracked_inv = [inv(a) for a in tracked]
        self.init_masks = [by_type.get(cycle_type(a), 0) for a in tracked]
        n = self.n
        point_mask = [[0] * n for _ in range(n)]
        for i, b in enumerate(self.b_elems):
            bit = 1 << i
            for u in range(n):
                point_mask[u][b[u]] |= bit
        self.point_mask = point_mask

    def run_decision(self):
        if self.A.order != self.B.order:
            return None
        if sorted(map(len, self.A.orbits())) != sorted(map(len, self.B.orbits())):
            return None
        if sorted(self.pa.invariant) != sorted(self.pb.invariant):
            return None
        if self.A.same_group(self.B):
            return identity(self.n)
        # A solution can be right-multiplied by B, so the first image may be
        # normalised to the least point of its B-orbit.
        first = {min(o) for o in self.B.orbits()}
        state = _State(self)
        return self._dfs(state, 0, first)

    def _dfs(self, state: "_State", depth: int, first=None):
        if depth == self.n:
            return self._leaf(state)
        p = self.order[depth]
        if state.img[p] != -1:
            # image already forced by propagation
            return self._dfs(state, depth + 1)
        for y in range(self.n):
            if state.used[y]:
                continue
            if first is not None and y not in first:
                continue
            self.budget.tick()
            if state.try_assign(p, y):
                got = self._dfs(state, depth + 1)
                if got is not None:
                    return got
            state.undo()
        return None

    def _leaf(self, state: "_State"):
        g = bytes(state.img)
        for s in self.A.gens:
            if conj(s, g) not in self.B:
                return None
        if self.ambient is not None and g not in self.ambient:
            return None
        return g


class _State:
    __slots__ = ("sr", "img", "pre", "used", "cls_map", "cls_rev", "masks", "trail")

    def __init__(self, sr: _ConjSearch):
        n = sr.n
        self.sr = sr
        self.img = [-1] * n
        self.pre = [-1] * n
        self.used = [False] * n
        self.cls_map: dict[int, int] = {}
        self.cls_rev: dict[int, int] = {}
        self.masks = list(sr.init_masks) if sr.use_masks else None
        self.trail: list[list[tuple]] = []

    def try_assign(self, p: int, y: int) -> bool:
        frame: list[tuple] = []
        self.trail.append(frame)
        if self._assign(p, y, frame):
            return True
        self._rollback(frame)
        self.trail[-1] = []
        return False

    def undo(self) -> None:
        self._rollback(self.trail.pop())

    def _rollback(self, frame) -> None:
        for kind, a, b in reversed(frame):
            if kind == 0:
                self.img[a] = -1
                self.pre[b] = -1
                self.used[b] = False
            elif kind == 1:
                del self.cls_map[a]
                del self.cls_rev[b]
            else:
                self.masks[a] = b

    def _assign(self, p0: int, y0: int, frame) -> bool:
        sr = self.sr
        queue = [(p0, y0)]
        while queue:
            p, y = queue.pop()
            if self.img[p] == y:
                continue
            if self.img[p] != -1 or self.used[y]:
                return False
            self.img[p] = y
            self.pre[y] = p
            self.used[y] = True
            frame.append((0, p, y))
            CA, CB = sr.pa.classes, sr.pb.classes
            amb = sr.amb_cls
            img = self.img
            for s in range(sr.n):
                ys = img[s]
                if ys == -1:
                    continue
                for ca, cb in ((CA[p][s], CB[y][ys]), (CA[s][p], CB[ys][y])):
                    mapped = self.cls_map.get(ca)
                    if mapped is None:
                        if cb in self.cls_rev:
                            return False
                        if sr.pa.invariant[ca] != sr.pb.invariant[cb]:
                            return False
                        self.cls_map[ca] = cb
                        self.cls_rev[cb] = ca
                        frame.append((1, ca, cb))
                    elif mapped != cb:
                        return False
                if amb is not None:
                    if amb[p][s] != amb[y][ys] or amb[s][p] != amb[ys][y]:
                        return False
            if sr.use_masks and not self._update_masks(p, frame, queue):
                return False
        return True

    def _update_masks(self, p: int, frame, queue) -> bool:
        sr = self.sr
        img = self.img
        pm = sr.point_mask
        yp = img[p]
        for t, a in enumerate(sr.tracked):
            m = self.masks[t]
            ap = a[p]
            if img[ap] != -1:
                m &= pm[yp][img[ap]]
            src = sr.tracked_inv[t][p]
            if img[src] != -1:
                m &= pm[img[src]][yp]
            if m != self.masks[t]:
                if not m:
                    return False
                frame.append((2, t, self.masks[t]))
                self.masks[t] = m
                if m & (m - 1) == 0:
                    b = sr.b_elems[m.bit_length() - 1]
                    for i in range(sr.n):
                        if img[i] != -1 and img[a[i]] == -1:
                            queue.append((a[i], b[img[i]]))
        return True


# -- public conjugacy / normalizer operations -----------------------------------


def are_conjugate(A: PermGroup, B: PermGroup, ambient: PermGroup | None = None,
                  budget: SearchBudget | None = None):
    """A permutation g in the ambient group with A^g = B.

    Returns the witness, None when no conjugator exists, or UNDETERMINED
    when the budget ran out.  The ambient group defaults to the symmetric
    group of matching degree.
    """
    if A.degree != B.degree:
        raise ValueError("conjugacy test needs equal degrees")
    if ambient is not None and ambient.degree != A.degree:
        raise ValueError("ambient degree mismatch")
    budget = budget or SearchBudget()
    try:
        return _ConjSearch(A, B, ambient, budget).run_decision()
    except BudgetExceeded:
        if budget.on_exhaustion == "raise":
            raise
        return UNDETERMINED


def normalizer(H: PermGroup, ambient: PermGroup | None = None,
               budget: SearchBudget | None = None) -> PermGroup:
    """N_ambient(H), exact; ambient defaults to the symmetric group."""
    budget = budget or SearchBudget(on_exhaustion="raise")
    if ambient is not None and ambient.order < _factorial(H.degree):
        return normalizer_in_group(ambient, H, budget)
    K = H
    while True:
        g = _NormalizerDFS(H, K, budget).run()
        if g is None:
            return K
        K = PermGroup(list(K.gens) + [g], H.degree)


class _NormalizerDFS:
    """One round of the symmetric-group normalizer search.

    Finds some g with H^g = H outside the known subgroup K, visiting each
    right K-coset at most once: image sequences are required to be
    lexicographically least under right multiplication by K.
    """

    def __init__(self, H: PermGroup, K: PermGroup, budget: SearchBudget):
        self.sr = _ConjSearch(H, H, None, budget)
        self.K = K
        self._minmaps: dict[tuple, list[int]] = {}

    def run(self):
        return self._dfs(_State(self.sr), 0, ())

    def _min_map(self, img_prefix: tuple) -> list[int]:
        got = self._minmaps.get(img_prefix)
        if got is not None:
            return got
        stab = self.K.pointwise_stabilizer(img_prefix) if img_prefix else self.K
        minmap = list(range(self.K.degree))
        for orb in stab.orbits():
            m = min(orb)
            for x in orb:
                minmap[x] = m
        self._minmaps[img_prefix] = minmap
        return minmap

    def _dfs(self, state: _State, depth: int, img_prefix: tuple):
        sr = self.sr
        if depth == sr.n:
            g = bytes(state.img)
            if g in self.K:
                return None
            if all(conj(s, g) in sr.A for s in sr.A.gens):
                return g
            return None
        p = sr.order[depth]
        if state.img[p] != -1:
            # forced by propagation; a forced value on any branch holding a
            # genuine solution is automatically coset-minimal
            return self._dfs(state, depth + 1, img_prefix + (state.img[p],))
        minmap = self._min_map(img_prefix)
        for y in range(sr.n):
            if state.used[y] or minmap[y] != y:
                continue
            sr.budget.tick()
            if state.try_assign(p, y):
                got = self._dfs(state, depth + 1, img_prefix + (y,))
                if got is not None:
                    return got
            state.undo()
        return None


def normalizer_in_group(G: PermGroup, H: PermGroup,
                        budget: SearchBudget | None = None,
                        element_bound: int = 10**6) -> PermGroup:
    """N_G(H) by scanning G's elements (exact; G must be enumerable)."""
    budget = budget or SearchBudget()
    if G.order > element_bound:
        raise EnumerationBound(
            f"normalizer scan needs |G| <= {element_bound}, got {G.order}")
    found = list(H.gens)
    hgens = H.gens
    for g in G.elements(element_bound):
        budget.tick()
        if all(conj(s, g) in H for s in hgens):
            found.append(g)
    return PermGroup(found, G.degree)


def element_conjugator_in_group(G: PermGroup, x: bytes, y: bytes,
                                budget: SearchBudget | None = None,
                                orbit_cap: int = 200_000):
    """g in G with x^g = y, or None; conjugation-orbit BFS with witnesses."""
    x, y = bytes(x), bytes(y)
    if cycle_type(x) != cycle_type(y):
        return None
    if x == y:
        return identity(G.degree)
    budget = budget or SearchBudget()
    parent: dict[bytes, tuple[bytes, bytes] | None] = {x: None}
    queue = [x]
    while queue:
        nxt = []
        for z in queue:
            for g in G.gens:
                w = conj(z, g)
                if w in parent:
                    continue
                budget.tick()
                if len(parent) >= orbit_cap:
                    raise BudgetExceeded("element conjugacy orbit too large")
                parent[w] = (z, g)
                if w == y:
                    out = identity(G.degree)
                    cur = w
                    while parent[cur] is not None:
                        prev, gen = parent[cur]
                        out = mul(gen, out)
                        cur = prev
                    assert conj(x, out) == y
                    return out
                nxt.append(w)
        queue = nxt
    return None


# -- minimal set images -----------------------------------------------------------


class SetCanonicalizer:
    """Minimal images of point sets under one group, with cached stabilizers.

    The minimal image is the lexicographically least sorted tuple among
    {g(S) : g in G}, found by a prefix-pruned descent: at each step only
    the least reachable point can extend a minimal image.
    """

    def __init__(self, G: PermGroup):
        self.G = G
        self.n = G.degree
        self._nodes: dict[tuple, tuple] = {}

    def _node(self, prefix: tuple):
        got = self._nodes.get(prefix)
        if got is not None:
            return got
        stab = self.G.pointwise_stabilizer(prefix) if prefix else self.G
        n = self.n
        minmap = [-1] * n
        to_min: list[bytes | None] = [None] * n
        for orb in stab.orbits():
            m = min(orb)
            reach = {m: identity(n)}
            frontier = [m]
            while frontier:
                new = []
                for a in frontier:
                    for g in stab.gens:
                        b = g[a]
                        if b not in reach:
                            reach[b] = mul(reach[a], g)
                            new.append(b)
                frontier = new
            for x in orb:
                minmap[x] = m
                to_min[x] = inv(reach[x])
        node = (minmap, to_min)
        self._nodes[prefix] = node
        return node

    def minimal_image(self, points) -> frozenset[int]:
        T = frozenset(points)
        if not T:
            return frozenset()
        best = self._best(tuple(), T, None)
        return frozenset(best)

    def _best(self, prefix: tuple, T: frozenset, cutoff):
        """Least image tail of T under the prefix stabilizer.

        cutoff, when given, is a tail the result must not exceed; branches
        that cannot reach it are cut and None is returned for them.
        """
        if not T:
            return ()
        minmap, to_min = self._node(prefix)
        m = min(minmap[t] for t in T)
        if cutoff is not None:
            if m > cutoff[0]:
                return None
            sub_cut = cutoff[1:] if m == cutoff[0] else None
        else:
            sub_cut = None
        best_tail = None
        seen = set()
        for t in sorted(T):
            if minmap[t] != m:
                continue
            u = to_min[t]
            T2 = frozenset(u[s] for s in T) - {m}
            if T2 in seen:
                continue
            seen.add(T2)
            local_cut = best_tail if best_tail is not None else sub_cut
            tail = self._best(prefix + (m,), T2, local_cut)
            if tail is not None and (best_tail is None or tail < best_tail):
                best_tail = tail
        if best_tail is None:
            return None
        return (m,) + best_tail

    def is_minimal(self, points) -> bool:
        T = frozenset(points)
        if not T:
            return True
        return tuple(sorted(T)) == self._best(tuple(), T, tuple(sorted(T)))


def minimal_set_image(G: PermGroup, points) -> frozenset[int]:
    """Lexicographically least sorted image of the point set under G."""
    return SetCanonicalizer(G).minimal_image(points)


# -- regular subgroups -------------------------------------------------------------


def has_regular_subgroup(A: PermGroup, budget: SearchBudget | None = None,
                         element_bound: int = 10**5):
    """(answer, witness): does the transitive group A contain a regular subgroup?

    answer is True with a witness subgroup, False, or UNDETERMINED (when A
    is too large to enumerate and sampling found nothing).  A regular
    subgroup has order equal to the degree and all point stabilizers
    trivial, so every chain of subgroups below it consists of semiregular
    groups; the exhaustive search closes up semiregular elements.
    """
    if not A.is_transitive():
        raise ValueError("regular subgroups live in transitive groups")
    n = A.degree
    if A.order == n:
        return True, A
    budget = budget or SearchBudget()
    stream = A.random_stream(2024)
    part_gens: list[bytes] = []
    part_elems = {identity(n)}
    for _ in range(120):
        x = next(stream)
        o = perm_order(x)
        if o > 1 and n % o == 0:
            x = x if _is_semiregular_elem(x) else None
        else:
            x = None
        if x is None or x in part_elems:
            continue
        T = _closure_elems(part_gens + [x], n)
        if T is None:
            continue
        part_gens.append(x)
        part_elems = T
        if len(T) == n:
            R = PermGroup(part_gens, n)
            if R.is_transitive():
                return True, R
            part_gens, part_elems = [], {identity(n)}
    if A.order > element_bound:
        return UNDETERMINED, None
    semis = sorted(x for x in A.element_set(element_bound)
                   if not is_identity(x) and _is_semiregular_elem(x)
                   and n % perm_order(x) == 0)
    seen: set[frozenset] = set()
    frontier: list[tuple[frozenset, list[bytes]]] = []
    for x in semis:
        if _is_prime(perm_order(x)):
            S = _closure_elems([x], n)
            if S is not None and frozenset(S) not in seen:
                seen.add(frozenset(S))
                frontier.append((frozenset(S), [x]))
    while frontier:
        nxt = []
        for S, gens in frontier:
            budget.tick()
            if len(S) == n:
                R = PermGroup(gens, n)
                if R.is_transitive():
                    return True, R
                continue
            for y in semis:
                if y in S:
                    continue
                T = _closure_elems(gens + [y], n)
                if T is None:
                    continue
                fT = frozenset(T)
                if fT not in seen:
                    seen.add(fT)
                    nxt.append((fT, gens + [y]))
        frontier = nxt
    return False, None


def _is_semiregular_elem(x: bytes) -> bool:
    return len(set(cycle_type(x))) == 1


def _closure_elems(gens: list[bytes], n: int):
    """Element closure; abandoned over n elements or on a fixed-point element."""
    elems = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = mul(a, g)
                if b not in elems:
                    if len(elems) >= n:
                        return None
                    if not is_identity(b) and not _is_semiregular_elem(b):
                        return None
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return elems


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    p = 2
    while p * p <= m:
        if m % p == 0:
            return False
        p += 1
    return True


# -- automorphisms of regular groups ------------------------------------------------


def abstract_automorphism_group(G: PermGroup,
                                budget: SearchBudget | None = None) -> PermGroup:
    """Aut(G) acting on G's points, for regular G.

    The normalizer of a regular group in the full symmetric group is its
    holomorph; the stabilizer of the identity point realises Aut(G).
    """
    if not G.is_regular():
        raise ValueError("automorphism computation needs a regular group")
    N = normalizer(G, budget=budget)
    stab = N.stabilizer(0)
    assert stab.order * G.degree == N.order
    return stab
