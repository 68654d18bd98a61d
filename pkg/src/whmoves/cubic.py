"""Connected cubic multigraphs: representation, enumeration, canonical forms.

A cubic graph is a connected multigraph in which every vertex has degree
exactly 3, where a loop at a vertex contributes 2 to its degree.  Loops and
parallel edges are allowed.  Graphs are stored as sorted multisets of
unordered vertex pairs, loops as ``(v, v)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations

from .config import CapExceededError, EnumerationCaps

Edge = tuple[int, int]

DEFAULT_CAPS = EnumerationCaps()


class FormatError(ValueError):
    """Malformed textual graph serialization."""


def _normalize(edges) -> tuple[Edge, ...]:
    return tuple(sorted((u, v) if u <= v else (v, u) for u, v in edges))


@dataclass(frozen=True, order=True)
class CubicGraph:
    """Multigraph on vertex set {0..n-1} with a sorted edge-pair multiset.

    Construction normalizes pair order and edge order; it does not enforce
    the degree/connectivity invariants (see :func:`validate`).
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", _normalize(self.edges))

    # -- structure queries ------------------------------------------------

    def degree(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges)

    def loops_at(self, v: int) -> int:
        return sum(1 for u, w in self.edges if u == v and w == v)

    def num_loops(self) -> int:
        return sum(1 for u, w in self.edges if u == w)

    def multiplicity(self, u: int, v: int) -> int:
        e = (u, v) if u <= v else (v, u)
        return sum(1 for f in self.edges if f == e)

    def has_parallel_pair(self) -> bool:
        seen = set()
        for e in self.edges:
            if e[0] != e[1]:
                if e in seen:
                    return True
                seen.add(e)
        return False

    def simple_neighbors(self, v: int) -> list[int]:
        """Distinct neighbors through non-loop edges, sorted."""
        out = set()
        for u, w in self.edges:
            if u == v and w != v:
                out.add(w)
            elif w == v and u != v:
                out.add(u)
        return sorted(out)

    def is_connected(self) -> bool:
        if self.n <= 0:
            return False
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, w in self.edges:
            if u != w:
                adj[u].append(w)
                adj[w].append(u)
        seen = bytearray(self.n)
        stack = [0]
        seen[0] = 1
        count = 1
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = 1
                    count += 1
                    stack.append(y)
        return count == self.n

    def relabel(self, perm) -> "CubicGraph":
        """Apply the vertex relabeling v -> perm[v]."""
        return CubicGraph(self.n, tuple((perm[u], perm[v]) for u, v in self.edges))

    # -- serialization ----------------------------------------------------

    def text(self) -> str:
        """Wire format ``n;u1-v1,u2-v2,...`` with the edge list sorted."""
        return f"{self.n};" + ",".join(f"{u}-{v}" for u, v in self.edges)

    def key(self) -> bytes:
        """Compact byte encoding of the sorted edge list (order-preserving)."""
        return edges_to_key(self.n, self.edges)

    @classmethod
    def from_text(cls, line: str) -> "CubicGraph":
        line = line.strip()
        try:
            head, _, body = line.partition(";")
            n = int(head)
            edges = []
            if body:
                for part in body.split(","):
                    a, _, b = part.partition("-")
                    edges.append((int(a), int(b)))
        except ValueError as exc:
            raise FormatError(f"bad graph line {line!r}") from exc
        if n <= 0:
            raise FormatError(f"bad vertex count in {line!r}")
        if any(not (0 <= u < n and 0 <= v < n) for u, v in edges):
            raise FormatError(f"vertex out of range in {line!r}")
        return cls(n, tuple(edges))

    @classmethod
    def from_key(cls, n: int, key: bytes) -> "CubicGraph":
        return cls(n, key_to_edges(n, key))


# -- compact byte keys (hot-path representation) ---------------------------


def edges_to_key(n: int, edges) -> bytes:
    if n <= 16:
        return bytes(u * 16 + v for u, v in edges)
    return b"".join(bytes((u, v)) for u, v in edges)


def key_to_edges(n: int, key: bytes) -> tuple[Edge, ...]:
    if n <= 16:
        return tuple((b >> 4, b & 15) for b in key)
    it = iter(key)
    return tuple((u, v) for u, v in zip(it, it))


# -- named small graphs -----------------------------------------------------


def theta_graph() -> CubicGraph:
    return CubicGraph(2, ((0, 1), (0, 1), (0, 1)))


def dumbbell_graph() -> CubicGraph:
    return CubicGraph(2, ((0, 0), (0, 1), (1, 1)))


def petersen_graph() -> CubicGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return CubicGraph(10, tuple(outer + spokes + inner))


def moebius_ladder(n: int) -> CubicGraph:
    """Cycle 0..n-1 plus antipodal chords; a simple connected cubic graph."""
    if n < 4 or n % 2:
        raise ValueError("Moebius ladder needs even n >= 4")
    edges = [(i, (i + 1) % n) for i in range(n)]
    edges += [(i, i + n // 2) for i in range(n // 2)]
    return CubicGraph(n, tuple(edges))


# -- validation --------------------------------------------------------------


def validate(g: CubicGraph) -> str | None:
    """Return None when g satisfies all cubic-graph invariants, else a
    description naming the failing invariant and a witness."""
    if g.n < 2 or g.n % 2:
        return f"order: n={g.n} is not a positive even integer"
    for u, v in g.edges:
        if not (0 <= u < g.n and 0 <= v < g.n):
            return f"range: edge ({u},{v}) leaves vertex set 0..{g.n - 1}"
    deg = [0] * g.n
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1  # a loop hits both branches at v: contributes 2
    for v in range(g.n):
        if deg[v] != 3:
            return f"degree: vertex {v} has degree {deg[v]} != 3"
    if len(g.edges) != 3 * g.n // 2:
        return f"size: {len(g.edges)} edges != 3n/2 = {3 * g.n // 2}"
    if not g.is_connected():
        return "connectivity: graph is disconnected"
    return None


# -- cycles ------------------------------------------------------------------


def has_j_cycle(g: CubicGraph, j: int) -> bool:
    """True iff g contains a cycle of length exactly j.

    A j-cycle is a closed walk with j distinct edges and distinct vertices
    apart from the endpoints; j=1 means a loop, j=2 a pair of parallel edges.
    """
    if j < 1:
        raise ValueError("cycle length must be >= 1")
    if j == 1:
        return g.num_loops() > 0
    if j == 2:
        return g.has_parallel_pair()
    return j in cycle_lengths(g)


def cycle_lengths(g: CubicGraph) -> frozenset[int]:
    """Set of lengths j for which g has a j-cycle."""
    return _cycle_lengths_from_edges(g.n, g.edges)


def _cycle_lengths_from_edges(n: int, edges) -> frozenset[int]:
    out = set()
    loops = False
    mult: dict[Edge, int] = {}
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            loops = True
        else:
            mult[(u, v)] = mult.get((u, v), 0) + 1
            adj[u].add(v)
            adj[v].add(u)
    if loops:
        out.add(1)
    if any(c >= 2 for c in mult.values()):
        out.add(2)
    # simple cycles of length >= 3: DFS over paths anchored at their minimum
    # vertex, extending only through larger vertices
    adj_sorted = [sorted(a) for a in adj]
    for s in range(n):
        stack = [(s, 1 << s, 1)]
        while stack:
            v, visited, depth = stack.pop()
            for w in adj_sorted[v]:
                if w == s and depth >= 3:
                    out.add(depth)
                elif w > s and not (visited >> w) & 1:
                    stack.append((w, visited | (1 << w), depth + 1))
    return frozenset(out)


def girth(g: CubicGraph) -> int:
    return min(cycle_lengths(g))


def _brute_force_has_j_cycle(g: CubicGraph, j: int) -> bool:
    """Independent oracle: scan all vertex subsets of size j for a spanning
    cycle (all cyclic orders tried).  Exponential; test use only."""
    if j == 1:
        return any(u == v for u, v in g.edges)
    if j == 2:
        return g.has_parallel_pair()
    mult = {}
    for u, v in g.edges:
        if u != v:
            mult[(u, v)] = mult.get((u, v), 0) + 1

    def adjacent(a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in mult

    for subset in combinations(range(g.n), j):
        first = subset[0]
        for order in permutations(subset[1:]):
            cyc = (first,) + order
            if all(adjacent(cyc[i], cyc[(i + 1) % j]) for i in range(j)):
                return True
    return False


# -- special edges E'(g) ------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A loop / parallel pair / triangle / 4-cycle touching an excluded edge."""

    kind: str  # "loop" | "multi-edge" | "triangle" | "4-cycle"
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class SpecialEdgePartition:
    special: tuple[Edge, ...]                      # E'(g)
    excluded: tuple[tuple[Edge, Witness], ...]     # complement with witnesses


def special_edges(g: CubicGraph) -> SpecialEdgePartition:
    """Partition edges into E'(g) and its complement.

    E'(g) holds the edges neither contained in nor sharing an endpoint with
    any loop, parallel edge pair, triangle, or 4-cycle.
    """
    structures: list[Witness] = []
    mult: dict[Edge, int] = {}
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in g.edges:
        if u == v:
            structures.append(Witness("loop", (u,)))
        else:
            mult[(u, v)] = mult.get((u, v), 0) + 1
            adj[u].add(v)
            adj[v].add(u)
    for (u, v), c in sorted(mult.items()):
        if c >= 2:
            structures.append(Witness("multi-edge", (u, v)))
    for a, b, c in combinations(range(g.n), 3):
        if b in adj[a] and c in adj[a] and c in adj[b]:
            structures.append(Witness("triangle", (a, b, c)))
    for quad in combinations(range(g.n), 4):
        a = quad[0]
        for b, c, d in permutations(quad[1:]):
            if b < d and b in adj[a] and c in adj[b] and d in adj[c] and a in adj[d]:
                structures.append(Witness("4-cycle", (a, b, c, d)))
                break
    marked = set()
    for s in structures:
        marked.update(s.vertices)
    special = []
    excluded = []
    for e in g.edges:
        u, v = e
        if u in marked or v in marked:
            offender = u if u in marked else v
            witness = next(s for s in structures if offender in s.vertices)
            excluded.append((e, witness))
        else:
            special.append(e)
    return SpecialEdgePartition(tuple(special), tuple(excluded))


# -- enumeration --------------------------------------------------------------


def _check_order(n: int) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"cubic graphs need even n >= 2, got {n}")


def enumerate_labelled_keys(n: int, caps: EnumerationCaps = DEFAULT_CAPS) -> list[bytes]:
    """Byte keys of all connected labelled cubic multigraphs on {0..n-1},
    sorted.  Compact form of :func:`enumerate_labelled` for large n."""
    _check_order(n)
    caps.check(n, "labelled")
    out: list[bytes] = []
    res = [3] * n
    edges: list[Edge] = []
    append = out.append

    def emit() -> None:
        # connectivity over non-loop edges
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u != v:
                adj[u].append(v)
                adj[v].append(u)
        seen = bytearray(n)
        stack = [0]
        seen[0] = 1
        count = 1
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = 1
                    count += 1
                    stack.append(y)
        if count == n:
            append(edges_to_key(n, edges))

    def rec() -> None:
        u = -1
        for v in range(n):
            if res[v]:
                u = v
                break
        if u < 0:
            emit()
            return
        r = res[u]
        res[u] = 0
        later = [w for w in range(u + 1, n) if res[w]]
        for nloops in range(r // 2 + 1):
            need = r - 2 * nloops
            combos = combinations_with_replacement(later, need) if need else ((),)
            for combo in combos:
                ok = True
                cnt: dict[int, int] = {}
                for w in combo:
                    cnt[w] = cnt.get(w, 0) + 1
                    if cnt[w] > res[w]:
                        ok = False
                        break
                if not ok:
                    continue
                for w in combo:
                    res[w] -= 1
                base = len(edges)
                edges.extend([(u, u)] * nloops)
                edges.extend((u, w) for w in combo)
                rec()
                del edges[base:]
                for w in combo:
                    res[w] += 1
        res[u] = r

    rec()
    out.sort()
    # vertex-by-vertex completion builds each labelled multigraph exactly once
    assert len(set(out)) == len(out)
    return out


def enumerate_labelled(n: int, caps: EnumerationCaps = DEFAULT_CAPS) -> list[CubicGraph]:
    """All connected labelled cubic multigraphs on {0..n-1}, each exactly
    once, in a deterministic (sorted) order."""
    return [CubicGraph.from_key(n, k) for k in enumerate_labelled_keys(n, caps)]


def enumerate_unlabelled(n: int, caps: EnumerationCaps = DEFAULT_CAPS) -> list[CubicGraph]:
    """One canonical representative per isomorphism class, sorted.

    Up to the labelled cap this canonicalizes the labelled enumeration; for
    larger n (<= unlabelled cap) the classes are collected by closure under
    Whitehead moves, which reaches every class because the move graph is
    connected (verified against this enumeration at small n).
    """
    _check_order(n)
    caps.check(n, "unlabelled")
    if n <= caps.labelled_max:
        reps = {
            canonical_key(n, key_to_edges(n, k)) for k in enumerate_labelled_keys(n, caps)
        }
        return [CubicGraph.from_key(n, k) for k in sorted(reps)]
    from . import whitehead  # deferred: whitehead imports this module

    seed = canonical_form(moebius_ladder(n)).graph()
    reps = {seed.key()}
    frontier = [seed.key()]
    while frontier:
        next_frontier = []
        for key in sorted(frontier):
            g = CubicGraph.from_key(n, key)
            for code in whitehead.unlabelled_neighbors(g):
                if code.code not in reps:
                    reps.add(code.code)
                    next_frontier.append(code.code)
        frontier = next_frontier
    return [CubicGraph.from_key(n, k) for k in sorted(reps)]


# -- canonical form ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CanonicalCode:
    """Lexicographically minimal serialized edge multiset over all vertex
    relabelings.  Equal codes <=> isomorphic multigraphs."""

    n: int
    code: bytes

    def graph(self) -> CubicGraph:
        return CubicGraph.from_key(self.n, self.code)

    def text(self) -> str:
        return self.graph().text()


@dataclass(frozen=True, order=True)
class LabelledCode:
    """Sorted edge multiset with vertex labels kept fixed."""

    n: int
    code: bytes

    def graph(self) -> CubicGraph:
        return CubicGraph.from_key(self.n, self.code)

    def text(self) -> str:
        return self.graph().text()


def labelled_code(g: CubicGraph) -> LabelledCode:
    return LabelledCode(g.n, g.key())


def canonical_form(g: CubicGraph) -> CanonicalCode:
    return CanonicalCode(g.n, canonical_key(g.n, g.edges))


def decode(code: CanonicalCode | LabelledCode) -> CubicGraph:
    return code.graph()


def canonical_key(n: int, edges) -> bytes:
    """Byte key of the lexicographically minimal sorted edge list over all
    n! relabelings of a connected multigraph.

    Exact branch-and-bound: labels are assigned block by block.  Block b of
    the sorted edge list consists of the edges whose minimum endpoint has
    label b, so the list is built left to right once the neighbors of each
    finalized vertex are labeled greedily (larger multiplicity first, ties
    branched).  Prefixes that already exceed the best complete encoding are
    pruned, which keeps the search fast for bounded-degree graphs.
    """
    loops = [0] * n
    mult = [[0] * n for _ in range(n)]
    nbr: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if u == v:
            loops[u] += 1
        else:
            if not mult[u][v]:
                nbr[u].append(v)
                nbr[v].append(u)
            mult[u][v] += 1
            mult[v][u] += 1
    for lst in nbr:
        lst.sort()

    best: list[int] | None = None  # flat encoding, one int (16*u+v) per edge
    lab = [-1] * n
    order: list[int] = []

    def finalize(b: int, out: list[int]) -> None:
        nonlocal best
        if b == n:
            enc = list(out)
            if best is None or enc < best:
                best = enc
            return
        v = order[b]
        unassigned = [w for w in nbr[v] if lab[w] < 0]
        # group unlabeled neighbors by multiplicity toward v; higher
        # multiplicity must come first for a minimal block, equal
        # multiplicities are tried in every order
        groups: dict[int, list[int]] = {}
        for w in unassigned:
            groups.setdefault(mult[v][w], []).append(w)
        orderings: list[list[int]] = [[]]
        for m in sorted(groups, reverse=True):
            orderings = [o + list(p) for o in orderings for p in permutations(groups[m])]
        base_len = len(order)
        for arrangement in orderings:
            for i, w in enumerate(arrangement):
                lab[w] = base_len + i
                order.append(w)
            block = [b * 17] * loops[v]  # 16*b + b
            rest = sorted(16 * b + lab[w] for w in nbr[v] if lab[w] > b for _ in range(mult[v][w]))
            block.extend(rest)
            out2 = out + block
            if best is None or out2 <= best[: len(out2)]:
                finalize(b + 1, out2)
            for w in arrangement:
                lab[w] = -1
            del order[base_len:]

    # roots in a promising order so pruning bites early
    root_rank = sorted(range(n), key=lambda v: (-loops[v], sorted((-mult[v][w] for w in nbr[v]))))
    for root in root_rank:
        lab[root] = 0
        order.append(root)
        finalize(0, [])
        lab[root] = -1
        order.pop()

    assert best is not None
    if n <= 16:
        return bytes(best)
    return bytes(b for enc in best for b in divmod(enc, 16))


# -- the pairing-model reference enumeration -----------------------------------


def double_factorial(k: int) -> int:
    r = 1
    while k > 1:
        r *= k
        k -= 2
    return r


def pairing_model_multigraphs(n: int) -> tuple[set[tuple[Edge, ...]], int]:
    """Exhaust all (3n-1)!! perfect matchings of the 3n half-edges, collapse
    each to its labelled edge multiset, and dedup.

    Returns (set of edge multisets including disconnected ones, number of
    matchings).  States reached by pairing off half-edges are memoized on the
    residual free-slot counts, which is exact because slots of one vertex are
    interchangeable under collapse; the matching count is tracked alongside
    and always equals (3n-1)!!, which callers should assert.
    """
    _check_order(n)

    @lru_cache(maxsize=None)
    def complete(res: tuple[int, ...]) -> tuple[frozenset, int]:
        u = next((v for v in range(n) if res[v]), None)
        if u is None:
            return frozenset([()]), 1
        out: set[tuple[Edge, ...]] = set()
        total = 0
        for w in range(u, n):
            if w == u:
                if res[u] < 2:
                    continue
                ways = res[u] - 1
            else:
                if res[w] == 0:
                    continue
                ways = res[w]
            nxt = list(res)
            nxt[u] -= 1
            nxt[w] -= 1
            sub, count = complete(tuple(nxt))
            out.update(tuple(sorted(((u, w),) + m)) for m in sub)
            total += ways * count
        return frozenset(out), total

    graphs, count = complete(tuple([3] * n))
    complete.cache_clear()
    return set(graphs), count


def pairing_oracle_connected(n: int) -> list[CubicGraph]:
    """Connected members of the pairing-model enumeration, sorted."""
    graphs, count = pairing_model_multigraphs(n)
    assert count == double_factorial(3 * n - 1)
    kept = [CubicGraph(n, g) for g in sorted(graphs)]
    return [g for g in kept if g.is_connected()]
