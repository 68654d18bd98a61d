"""Whitehead moves on cubic multigraphs at half-edge granularity.

A move acts on a non-loop edge e = (u1, u2): one chosen half-edge at u1 is
reattached to u2 and one chosen half-edge at u2 is reattached to u1, while e
itself stays in place.  On a labelled graph each non-loop edge supports
2 x 2 = 4 moves; on isomorphism classes those collapse to 2.

Because e survives every move, a path through a detached edge can always be
rerouted across e, so a move never disconnects the graph.  Neighbor
generation therefore skips per-result connectivity checks; the diagnostics
helper re-verifies the claim on demand and tests cover it exhaustively at
small orders.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cubic import (
    CanonicalCode,
    CubicGraph,
    Edge,
    canonical_key,
    edges_to_key,
    key_to_edges,
)

HalfEdge = tuple[int, int]  # (edge index, side 0|1)


class MoveOnLoopError(ValueError):
    """The designated edge of a Whitehead move is a loop."""


class InvalidSlotError(ValueError):
    """A pick references the moved edge itself or sits at the wrong endpoint."""


@dataclass(frozen=True)
class WhiteheadMove:
    """One rewiring: ``edge`` indexes the non-loop edge e in ``g.edges``
    (parallel copies are distinguished by index); ``pick1``/``pick2`` are the
    half-edges to swap, located at the smaller/larger endpoint of e."""

    edge: int
    pick1: HalfEdge
    pick2: HalfEdge


def _half_edges_at(edges) -> dict[int, list[HalfEdge]]:
    at: dict[int, list[HalfEdge]] = {}
    for i, (u, v) in enumerate(edges):
        at.setdefault(u, []).append((i, 0))
        at.setdefault(v, []).append((i, 1))
    return at


def enumerate_moves(g: CubicGraph) -> list[WhiteheadMove]:
    """All Whitehead moves of g: 4 per non-loop edge."""
    at = _half_edges_at(g.edges)
    moves = []
    for i, (u1, u2) in enumerate(g.edges):
        if u1 == u2:
            continue
        picks1 = [h for h in at[u1] if h[0] != i]
        picks2 = [h for h in at[u2] if h[0] != i]
        for p1 in picks1:
            for p2 in picks2:
                moves.append(WhiteheadMove(i, p1, p2))
    return moves


def _check_move(g: CubicGraph, m: WhiteheadMove) -> tuple[int, int]:
    if not 0 <= m.edge < len(g.edges):
        raise InvalidSlotError(f"edge index {m.edge} out of range")
    u1, u2 = g.edges[m.edge]
    if u1 == u2:
        raise MoveOnLoopError(f"edge {m.edge} = ({u1},{u2}) is a loop")
    for pick, home in ((m.pick1, u1), (m.pick2, u2)):
        ei, side = pick
        if not (0 <= ei < len(g.edges) and side in (0, 1)):
            raise InvalidSlotError(f"half-edge {pick} out of range")
        if ei == m.edge:
            raise InvalidSlotError(f"pick {pick} references the moved edge itself")
        if g.edges[ei][side] != home:
            raise InvalidSlotError(f"pick {pick} is not incident to endpoint {home}")
    return u1, u2


def _apply_raw(edges: list[list[int]], m: WhiteheadMove, u1: int, u2: int) -> None:
    e1, s1 = m.pick1
    e2, s2 = m.pick2
    edges[e1][s1] = u2
    edges[e2][s2] = u1


def apply_move(g: CubicGraph, m: WhiteheadMove) -> CubicGraph:
    """Result of performing m on g: a cubic multigraph on the same vertices.

    Degrees are preserved by construction and connectivity is invariant under
    moves (the surviving edge e bypasses both detached half-edges).
    """
    u1, u2 = _check_move(g, m)
    raw = [list(e) for e in g.edges]
    _apply_raw(raw, m, u1, u2)
    return CubicGraph(g.n, tuple((a, b) for a, b in raw))


def inverse_move(g: CubicGraph, m: WhiteheadMove) -> tuple[CubicGraph, WhiteheadMove]:
    """Return (h, m_inv) where h = apply_move(g, m) and applying m_inv to h
    restores g.  The inverse swaps the same two half-edges back across e."""
    u1, u2 = _check_move(g, m)
    raw = [list(e) for e in g.edges]
    _apply_raw(raw, m, u1, u2)
    # positions are stable in raw; normalization permutes them
    keyed = sorted(range(len(raw)), key=lambda i: tuple(sorted(raw[i])))
    new_index = {old: new for new, old in enumerate(keyed)}
    h = CubicGraph(g.n, tuple(tuple(sorted(raw[i])) for i in keyed))

    def translate(old_half: HalfEdge) -> HalfEdge:
        ei, side = old_half
        a, b = raw[ei]
        if a > b:
            side = 1 - side  # pair order flips during normalization
        return (new_index[ei], side)

    # after the move, pick1's half-edge sits at u2 and pick2's at u1
    inv = WhiteheadMove(
        edge=new_index[m.edge],
        pick1=translate(m.pick2),
        pick2=translate(m.pick1),
    )
    # e's endpoints keep their order (u1 < u2), so pick1 of the inverse must
    # sit at u1: that is pick2's half-edge, now reattached there
    return h, inv


def _neighbor_keys(n: int, key: bytes) -> set[bytes]:
    """Byte keys of the distinct labelled move results different from the
    input.  Hot path for meta-graph construction (n <= 16 only)."""
    edges = key_to_edges(n, key)
    m = len(edges)
    at: dict[int, list[int]] = {}
    for i, (u, v) in enumerate(edges):
        at.setdefault(u, []).append(2 * i)
        at.setdefault(v, []).append(2 * i + 1)
    out: set[bytes] = set()
    flat = list(key)  # one byte 16*u+v per edge
    for i, (u1, u2) in enumerate(edges):
        if u1 == u2:
            continue
        picks1 = [h for h in at[u1] if h >> 1 != i]
        picks2 = [h for h in at[u2] if h >> 1 != i]
        for h1 in picks1:
            e1, s1 = divmod(h1, 2)
            for h2 in picks2:
                e2, s2 = divmod(h2, 2)
                if e1 == e2:
                    # both halves of one parallel copy of e swap ends, which
                    # leaves that edge (and the graph) unchanged
                    continue
                work = list(flat)
                a, b = edges[e1]
                na, nb = (u2, b) if s1 == 0 else (a, u2)
                work[e1] = na * 16 + nb if na <= nb else nb * 16 + na
                a, b = edges[e2]
                na, nb = (u1, b) if s2 == 0 else (a, u1)
                work[e2] = na * 16 + nb if na <= nb else nb * 16 + na
                work.sort()
                k = bytes(work)
                if k != key:
                    out.add(k)
    return out


def labelled_neighbors(g: CubicGraph) -> tuple[CubicGraph, ...]:
    """Distinct labelled graphs, different from g, reachable by one move."""
    keys = _neighbor_keys(g.n, g.key())
    return tuple(CubicGraph.from_key(g.n, k) for k in sorted(keys))


def unlabelled_neighbors(g: CubicGraph) -> tuple[CanonicalCode, ...]:
    """Canonical codes of the isomorphism classes, different from g's own,
    reachable by one move.  The 4 labelled picks per edge collapse to 2 move
    classes here because symmetric picks yield isomorphic results."""
    own = canonical_key(g.n, g.edges)
    codes = {
        canonical_key(g.n, key_to_edges(g.n, k)) for k in _neighbor_keys(g.n, g.key())
    }
    codes.discard(own)
    return tuple(CanonicalCode(g.n, c) for c in sorted(codes))


@dataclass(frozen=True)
class MoveDiagnostics:
    """Move census for one graph, with the connectivity claim re-verified."""

    total_moves: int
    distinct_results: int
    self_results: int
    disconnected_results: int  # provably 0; measured anyway


def move_diagnostics(g: CubicGraph) -> MoveDiagnostics:
    moves = enumerate_moves(g)
    results = [apply_move(g, m) for m in moves]
    distinct = {h.key() for h in results if h != g}
    selfs = sum(1 for h in results if h == g)
    disconnected = sum(1 for h in results if not h.is_connected())
    return MoveDiagnostics(len(moves), len(distinct), selfs, disconnected)
