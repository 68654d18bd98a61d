"""The graph of graphs: cubic multigraphs joined by Whitehead moves.

Vertices are all connected cubic multigraphs of one order n, labelled or
unlabelled; two distinct vertices are adjacent iff one Whitehead move maps
one to the other.  The result is a simple undirected graph, built here as an
explicit sorted code list plus an edge array.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import whitehead
from .config import EnumerationCaps
from .cubic import (
    CubicGraph,
    DEFAULT_CAPS,
    canonical_key,
    cycle_lengths,
    enumerate_labelled_keys,
    enumerate_unlabelled,
    key_to_edges,
)

FORMAT_NAME = "whmeta"
FORMAT_VERSION = 1


class FormatCorruptionError(Exception):
    """Persisted meta-graph file is damaged or has the wrong version."""


@dataclass(frozen=True)
class DegreeStats:
    minimum: int
    maximum: int
    mean: Fraction
    histogram: tuple[tuple[int, int], ...]  # (degree, count), ascending
    mean_gap_6n: Fraction | None = None    # 6n - mean, labelled mode only
    max_gap_6n: int | None = None          # 6n - max, labelled mode only


class MetaGraph:
    """Simple graph on the cubic graphs of one order, labelled or unlabelled.

    ``codes`` is the sorted tuple of compact byte keys of the member graphs
    (labelled keys or canonical keys depending on mode); ``edge_array`` is an
    (m, 2) int64 array of index pairs i < j, sorted lexicographically.
    """

    def __init__(self, mode: str, n: int, codes: tuple[bytes, ...], edge_array: np.ndarray):
        if mode not in ("labelled", "unlabelled"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.n = n
        self.codes = codes
        edge_array = np.asarray(edge_array, dtype=np.int64).reshape(-1, 2)
        self.edge_array = edge_array
        self._index = None
        self._csr = None
        self._cycle_profiles = None

    # -- basic shape -------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.codes)

    @property
    def num_edges(self) -> int:
        return len(self.edge_array)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MetaGraph)
            and self.mode == other.mode
            and self.n == other.n
            and self.codes == other.codes
            and np.array_equal(self.edge_array, other.edge_array)
        )

    def __repr__(self) -> str:
        return (
            f"MetaGraph(mode={self.mode!r}, n={self.n}, "
            f"|V|={self.num_vertices}, |E|={self.num_edges})"
        )

    # -- members -------------------------------------------------------------

    def member_graph(self, i: int) -> CubicGraph:
        return CubicGraph.from_key(self.n, self.codes[i])

    def code_text(self, i: int) -> str:
        return self.member_graph(i).text()

    def index_of(self, key: bytes) -> int:
        if self._index is None:
            self._index = {c: i for i, c in enumerate(self.codes)}
        return self._index[key]

    def cycle_profiles(self) -> list[frozenset[int]]:
        """Cycle-length sets of all members (cached; used by j-cycle subsets)."""
        if self._cycle_profiles is None:
            self._cycle_profiles = [
                _cycle_lengths_key(self.n, c) for c in self.codes
            ]
        return self._cycle_profiles

    def jcycle_members(self, j: int) -> frozenset[int]:
        """Indices of members whose cubic graph has a j-cycle."""
        if not 1 <= j <= self.n:
            raise ValueError(f"need 1 <= j <= {self.n}, got {j}")
        return frozenset(
            i for i, prof in enumerate(self.cycle_profiles()) if j in prof
        )

    # -- graph structure -------------------------------------------------------

    def degrees(self) -> np.ndarray:
        counts = np.bincount(self.edge_array.reshape(-1), minlength=self.num_vertices)
        return counts

    def _neighbors_csr(self):
        if self._csr is None:
            m = self.edge_array
            both = np.concatenate([m, m[:, ::-1]])
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            indptr = np.searchsorted(both[:, 0], np.arange(self.num_vertices + 1))
            self._csr = (indptr, both[:, 1].copy())
        return self._csr

    def neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self._neighbors_csr()
        return indices[indptr[i]: indptr[i + 1]]

    def is_connected(self) -> bool:
        nv = self.num_vertices
        if nv == 0:
            return False
        indptr, indices = self._neighbors_csr()
        seen = np.zeros(nv, dtype=bool)
        seen[0] = True
        frontier = np.array([0])
        total = 1
        while frontier.size:
            nxt_parts = [indices[indptr[v]: indptr[v + 1]] for v in frontier]
            nxt = np.unique(np.concatenate(nxt_parts)) if nxt_parts else np.array([], dtype=np.int64)
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            total += nxt.size
            frontier = nxt
        return total == nv

    def laplacian(self) -> np.ndarray:
        from .spectral import laplacian

        return laplacian(self.num_vertices, self.edge_array)

    def degree_stats(self) -> DegreeStats:
        deg = self.degrees()
        values, counts = np.unique(deg, return_counts=True)
        mean = Fraction(int(deg.sum()), self.num_vertices)
        mean_gap = max_gap = None
        if self.mode == "labelled":
            mean_gap = Fraction(6 * self.n) - mean
            max_gap = 6 * self.n - int(deg.max())
        return DegreeStats(
            minimum=int(deg.min()),
            maximum=int(deg.max()),
            mean=mean,
            histogram=tuple(
                (int(v), int(c)) for v, c in zip(values.tolist(), counts.tolist())
            ),
            mean_gap_6n=mean_gap,
            max_gap_6n=max_gap,
        )


def _cycle_lengths_key(n: int, key: bytes) -> frozenset[int]:
    from .cubic import _cycle_lengths_from_edges

    return _cycle_lengths_from_edges(n, key_to_edges(n, key))


# -- construction -----------------------------------------------------------------


def _member_keys(n: int, mode: str, caps: EnumerationCaps) -> list[bytes]:
    if mode == "labelled":
        return enumerate_labelled_keys(n, caps)
    return sorted(g.key() for g in enumerate_unlabelled(n, caps))


def _neighbor_keys_for(n: int, mode: str, key: bytes) -> set[bytes]:
    if mode == "labelled":
        return whitehead._neighbor_keys(n, key)
    own = key  # canonical representatives are stored by canonical key
    out = {
        canonical_key(n, key_to_edges(n, k))
        for k in whitehead._neighbor_keys(n, key)
    }
    out.discard(own)
    return out


def _assemble(mode: str, n: int, keys: list[bytes]) -> MetaGraph:
    """Edges of the move relation restricted to ``keys`` (which must be
    closed under it), with deterministic sorted indexing."""
    index = {c: i for i, c in enumerate(keys)}
    nv = len(keys)
    from array import array

    acc = array("q")
    for i, key in enumerate(keys):
        for nk in _neighbor_keys_for(n, mode, key):
            j = index[nk]
            acc.append(i * nv + j if i < j else j * nv + i)
    if acc:
        flat = np.unique(np.frombuffer(acc, dtype=np.int64))
        edge_array = np.column_stack(divmod(flat, nv))
    else:
        edge_array = np.empty((0, 2), dtype=np.int64)
    return MetaGraph(mode, n, tuple(keys), edge_array)


def build(n: int, mode: str, caps: EnumerationCaps = DEFAULT_CAPS) -> MetaGraph:
    """The full meta-graph of order-n cubic graphs in the given mode."""
    keys = _member_keys(n, mode, caps)
    return _assemble(mode, n, keys)


def build_by_closure(
    seed: CubicGraph, mode: str, caps: EnumerationCaps = DEFAULT_CAPS
) -> MetaGraph:
    """The connected component of ``seed`` under Whitehead moves.

    The move graph is connected, so this equals :func:`build` at the seed's
    order; tests assert that equality rather than assuming it.
    """
    n = seed.n
    caps.check(n, mode)
    start = seed.key() if mode == "labelled" else canonical_key(n, seed.edges)
    found = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for key in sorted(frontier):  # deterministic expansion order
            for nk in _neighbor_keys_for(n, mode, key):
                if nk not in found:
                    found.add(nk)
                    nxt.append(nk)
        frontier = nxt
    return _assemble(mode, n, sorted(found))


def neighbor_multiplicity_census(G: MetaGraph) -> dict[int, int]:
    """How many distinct moves realize each (vertex, neighbor) adjacency.

    The meta-graph is simple, so several moves mapping one member onto the
    same neighbor (common in unlabelled mode, where isomorphic results
    collapse) still contribute a single edge; this census counts what was
    discarded.  Keys are multiplicities, values how many ordered adjacent
    pairs have that multiplicity; the values sum to twice the edge count.
    """
    census: dict[int, int] = {}
    for i in range(G.num_vertices):
        g = G.member_graph(i)
        counts: dict[bytes, int] = {}
        for m in whitehead.enumerate_moves(g):
            h = whitehead.apply_move(g, m)
            if G.mode == "labelled":
                key = h.key()
            else:
                key = canonical_key(G.n, h.edges)
            if key != G.codes[i]:
                counts[key] = counts.get(key, 0) + 1
        for mult in counts.values():
            census[mult] = census.get(mult, 0) + 1
    return census


# -- persistence ---------------------------------------------------------------------


def save(G: MetaGraph, path) -> None:
    """Write the versioned text format with a trailing checksum."""
    lines = [
        f"{FORMAT_NAME} {FORMAT_VERSION}",
        f"mode {G.mode}",
        f"order {G.n}",
        f"vertices {G.num_vertices}",
        f"edges {G.num_edges}",
    ]
    lines.extend("g " + G.code_text(i) for i in range(G.num_vertices))
    lines.extend(f"e {i} {j}" for i, j in G.edge_array.tolist())
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    Path(path).write_text(body + f"checksum {digest}\n")


def load(path) -> MetaGraph:
    """Read a saved meta-graph; bit-exact inverse of :func:`save`."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise FormatCorruptionError("empty file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != FORMAT_NAME:
        raise FormatCorruptionError(f"not a {FORMAT_NAME} file: header {lines[0]!r}")
    if head[1] != str(FORMAT_VERSION):
        raise FormatCorruptionError(
            f"version mismatch: file has {head[1]}, reader supports {FORMAT_VERSION}"
        )
    if not lines[-1].startswith("checksum "):
        raise FormatCorruptionError("missing checksum line (truncated file?)")
    stated = lines[-1].split()[1]
    body = "\n".join(lines[:-1]) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    if digest != stated:
        raise FormatCorruptionError("checksum mismatch: file corrupted")
    try:
        mode = lines[1].split()[1]
        n = int(lines[2].split()[1])
        nv = int(lines[3].split()[1])
        ne = int(lines[4].split()[1])
        codes = []
        for line in lines[5: 5 + nv]:
            tag, rest = line.split(" ", 1)
            assert tag == "g"
            codes.append(CubicGraph.from_text(rest).key())
        edges = np.empty((ne, 2), dtype=np.int64)
        for r, line in enumerate(lines[5 + nv: 5 + nv + ne]):
            tag, a, b = line.split()
            assert tag == "e"
            edges[r] = (int(a), int(b))
    except (AssertionError, IndexError, ValueError) as exc:
        raise FormatCorruptionError(f"malformed body: {exc}") from exc
    if 5 + nv + ne != len(lines) - 1:
        raise FormatCorruptionError("wrong number of lines for stated counts")
    return MetaGraph(mode, n, tuple(codes), edges)
