"""Block systems, block actions, signatures, and wreath products.

A block system is stored with its cells sorted by least element, so the
induced action on cells ("the top group") is deterministic and signatures
are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .group import PermGroup, action_image_kernel
from .perm import Perm, identity


@dataclass(frozen=True)
class BlockSystem:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        sizes = {len(b) for b in self.blocks}
        if len(sizes) != 1:
            raise ValueError("blocks of unequal size")
        pts = [x for b in self.blocks for x in b]
        if sorted(pts) != list(range(len(pts))):
            raise ValueError("blocks do not partition the points")
        if list(self.blocks) != sorted(self.blocks, key=min):
            raise ValueError("blocks must be sorted by least element")

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    @property
    def degree(self) -> int:
        return sum(len(b) for b in self.blocks)

    def cell_of(self) -> list[int]:
        out = [0] * self.degree
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x] = i
        return out

    def __str__(self) -> str:
        return "{" + "|".join(",".join(str(x + 1) for x in b) for b in self.blocks) + "}"


def system_from_block(G: PermGroup, block) -> BlockSystem:
    """The G-translates of a block (which must actually be a block)."""
    block = tuple(sorted(block))
    blocks = {block}
    queue = [block]
    while queue:
        b = queue.pop()
        for g in G.gens:
            img = tuple(sorted(g[x] for x in b))
            if img not in blocks:
                blocks.add(img)
                queue.append(img)
    return BlockSystem(tuple(sorted(blocks, key=min)))


def is_invariant(G: PermGroup, B: BlockSystem) -> bool:
    cells = set(B.blocks)
    for g in G.gens:
        for b in B.blocks:
            if tuple(sorted(g[x] for x in b)) not in cells:
                return False
    return True


def _pair_closure_block(G: PermGroup, pairs) -> list[int]:
    """0-based union-find closure: finest G-invariant partition merging the
    given pairs; returns the root array."""
    n = G.degree
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = []
    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            queue.append((a, b))
    while queue:
        a, b = queue.pop()
        for g in G.gens:
            ra, rb = find(g[a]), find(g[b])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
                queue.append((g[a], g[b]))
    return [find(x) for x in range(n)]


def finest_system_merging(G: PermGroup, pairs) -> BlockSystem:
    roots = _pair_closure_block(G, pairs)
    cells: dict[int, list[int]] = {}
    for x, r in enumerate(roots):
        cells.setdefault(r, []).append(x)
    return BlockSystem(tuple(sorted((tuple(sorted(c)) for c in cells.values()), key=min)))


def minimal_block_systems(G: PermGroup) -> list[BlockSystem]:
    """All block systems with minimal (hence prime-free-refinement) blocks.

    Seeding the closure with {0, b} for every b is complete for transitive
    groups; a system is minimal when no other seed closure sits properly
    inside its 0-block.  Primitive groups yield the empty list.
    """
    if not G.is_transitive():
        raise ValueError("block systems are computed for transitive groups")
    n = G.degree
    candidates: dict[tuple, BlockSystem] = {}
    for b in range(1, n):
        system = finest_system_merging(G, [(0, b)])
        if 1 < system.block_size < n:
            candidates.setdefault(system.blocks[0], system)
    zero_blocks = {frozenset(blk) for blk in candidates}
    out = []
    for blk, system in candidates.items():
        fb = frozenset(blk)
        if any(other < fb for other in zero_blocks):
            continue
        out.append(system)
    return sorted(out, key=lambda s: (s.block_size, s.blocks))


def all_block_systems_of_size(G: PermGroup, k: int) -> list[BlockSystem]:
    """Every size-k block system of a transitive group.

    Blocks containing 0 are unions of point-stabilizer orbits; a candidate
    union is a block exactly when the pair closure over it reproduces it.
    """
    if not G.is_transitive():
        raise ValueError("block systems are computed for transitive groups")
    n = G.degree
    if n % k:
        return []
    if k == 1:
        return [BlockSystem(tuple((i,) for i in range(n)))]
    if k == n:
        return [BlockSystem((tuple(range(n)),))]
    suborbits = G.stabilizer(0).orbits()
    zero_orbit = next(o for o in suborbits if 0 in o)
    rest = [o for o in suborbits if 0 not in o]
    out = []
    seen = set()

    def grow(idx: int, acc: list[int], size: int):
        if size == k:
            S = frozenset(acc)
            if S in seen:
                return
            seen.add(S)
            roots = _pair_closure_block(G, [(0, x) for x in acc if x])
            block = frozenset(i for i in range(n) if roots[i] == roots[0])
            if block == S:
                out.append(system_from_block(G, S))
            return
        if idx == len(rest):
            return
        if size + len(rest[idx]) <= k:
            grow(idx + 1, acc + rest[idx], size + len(rest[idx]))
        grow(idx + 1, acc, size)

    if len(zero_orbit) <= k:
        grow(0, list(zero_orbit), len(zero_orbit))
    return sorted(out, key=lambda s: s.blocks)


def block_action(G: PermGroup, B: BlockSystem) -> tuple[PermGroup, PermGroup]:
    """(top, kernel): the induced action on cells and its kernel.

    |G| = |top| * |kernel| exactly; cells act in by-least-element order.
    """
    if not is_invariant(G, B):
        raise ValueError("partition is not preserved by the group")
    cell_of = B.cell_of()
    first = [b[0] for b in B.blocks]

    def act(g, i):
        return cell_of[g[first[i]]]

    top, kernel = action_image_kernel(G, len(B.blocks), act)
    return top, kernel


@dataclass(frozen=True)
class Signature:
    block_size: int
    top_id: int

    def as_pair(self) -> tuple[int, int]:
        return (self.block_size, self.top_id)


def signature(G: PermGroup, identify_top) -> Signature:
    """Least (block size, top id) over the minimal block systems.

    identify_top maps a transitive group of degree n/k to its catalogue
    index; it is supplied by the census layer.
    """
    systems = minimal_block_systems(G)
    if not systems:
        raise ValueError("primitive group has no signature")
    best = None
    for B in systems:
        top, _ = block_action(G, B)
        pair = (B.block_size, identify_top(top))
        if best is None or pair < best:
            best = pair
    return Signature(*best)


def wreath_product(k: int, H: PermGroup, cyclic_base: bool = False) -> PermGroup:
    """S_k wr H (or C_k wr H) in its imprimitive action on k*m points.

    Cell i is {i*k, ..., i*k+k-1}; base generators act on the first cell
    and H permutes cells, which generates the full wreath product because
    H is transitive on cells.
    """
    m = H.degree
    n = k * m
    gens = []
    if k > 1:
        first_cell = []
        if cyclic_base:
            first_cell.append(tuple(range(k)))
        else:
            first_cell.append((0, 1))
            if k > 2:
                first_cell.append(tuple(range(k)))
        for cyc in first_cell:
            images = list(range(n))
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
            gens.append(Perm(images))
    for h in H.gens:
        images = bytearray(n)
        for i in range(m):
            for j in range(k):
                images[i * k + j] = h[i] * k + j
        gens.append(bytes(images))
    if not gens:
        return PermGroup([], n)
    return PermGroup(gens, n)


def standard_blocks(k: int, m: int) -> BlockSystem:
    return BlockSystem(tuple(tuple(range(i * k, (i + 1) * k)) for i in range(m)))
