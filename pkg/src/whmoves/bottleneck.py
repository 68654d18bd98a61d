"""Conductance, bottleneck vectors, and the small-eigenvalue machinery.

Counting quantities (subset sizes, boundary sizes, conductance, covariance)
are exact integers and rationals; only spectra and inner products of real
unit vectors use floating point.  Bottleneck vectors are carried as integer
numerators over a common square-root normalizer, so their defining
identities hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .config import EXACT_CONDUCTANCE_CAP
from .metagraph import MetaGraph
from .spectral import Spectrum, jacobi_spectrum, laplacian, rayleigh


class ImproperSubsetError(ValueError):
    """Subset must be nonempty and proper."""


class DegenerateBottleneckError(Exception):
    """A structural subset came out empty or full, so it has no conductance."""


class EpsilonTooLargeError(ValueError):
    """(k-1) * epsilon >= 1, outside the eigenvalue bound's hypothesis."""


class HypothesisViolationError(ValueError):
    """A precondition of the k-small-eigenvalues bound failed."""

    def __init__(self, which: str, detail: str):
        super().__init__(f"hypothesis {which} violated: {detail}")
        self.which = which


class NormTooSmallError(ValueError):
    """Vectors handed to the pair-correlation bound must have norm >= 1."""


GraphLike = MetaGraph  # any object with num_vertices and edge_array works


def _edge_array(G) -> np.ndarray:
    if isinstance(G, MetaGraph):
        return G.edge_array
    nv, edges = G
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def _num_vertices(G) -> int:
    if isinstance(G, MetaGraph):
        return G.num_vertices
    return G[0]


def _check_subset(nv: int, X: Iterable[int]) -> frozenset[int]:
    Xs = frozenset(X)
    if not Xs or len(Xs) >= nv:
        raise ImproperSubsetError(f"|X|={len(Xs)} must satisfy 0 < |X| < {nv}")
    if any(not 0 <= v < nv for v in Xs):
        raise ImproperSubsetError("subset contains out-of-range vertices")
    return Xs


# -- conductance ------------------------------------------------------------------


def boundary_size(G, X: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in X."""
    nv = _num_vertices(G)
    Xs = _check_subset(nv, X)
    mask = np.zeros(nv, dtype=bool)
    mask[list(Xs)] = True
    e = _edge_array(G)
    return int(np.count_nonzero(mask[e[:, 0]] != mask[e[:, 1]]))


def conductance(G, X: Iterable[int]) -> Fraction:
    """phi(X) = |boundary(X)| / min(|X|, |V - X|), exactly."""
    nv = _num_vertices(G)
    Xs = _check_subset(nv, X)
    return Fraction(boundary_size(G, Xs), min(len(Xs), nv - len(Xs)))


@dataclass(frozen=True)
class ConductanceResult:
    phi: Fraction
    minimizer: frozenset[int]
    exact: bool
    candidate_family: str  # "all proper subsets" when exact


def _popcounts(masks: np.ndarray) -> np.ndarray:
    view = masks.astype(np.uint64).view(np.uint8).reshape(len(masks), 8)
    return np.unpackbits(view, axis=1).sum(axis=1).astype(np.int64)


def graph_conductance(
    G,
    exact_cap: int = EXACT_CONDUCTANCE_CAP,
    candidates: Sequence[frozenset[int]] | None = None,
) -> ConductanceResult:
    """phi(G): exact minimum over all proper subsets up to ``exact_cap``
    vertices; beyond that, the best over a declared candidate family,
    flagged as an upper bound."""
    nv = _num_vertices(G)
    e = _edge_array(G)
    if nv <= exact_cap:
        masks = np.arange(1, 2 ** (nv - 1), dtype=np.int64)  # complements halved
        if nv > 1:
            masks = np.concatenate([masks, masks + 2 ** (nv - 1)])
            masks = masks[(masks < 2**nv - 1)]
        crossing = np.zeros(len(masks), dtype=np.int64)
        for u, v in e.tolist():
            crossing += ((masks >> u) & 1) ^ ((masks >> v) & 1)
        sizes = _popcounts(masks)
        side = np.minimum(sizes, nv - sizes)
        ratio = crossing / side
        near = np.flatnonzero(ratio <= ratio.min() + 1e-9)
        best_mask = None
        best = None
        for idx in near.tolist():
            val = Fraction(int(crossing[idx]), int(side[idx]))
            if best is None or val < best:
                best = val
                best_mask = int(masks[idx])
        members = frozenset(v for v in range(nv) if (best_mask >> v) & 1)
        return ConductanceResult(best, members, True, "all proper subsets")
    if not candidates:
        raise ValueError(
            f"|V|={nv} exceeds the exact cap {exact_cap}; pass a candidate family"
        )
    best = None
    best_X: frozenset[int] | None = None
    for X in candidates:
        val = conductance(G, X)
        if best is None or val < best:
            best = val
            best_X = frozenset(X)
    return ConductanceResult(best, best_X, False, f"{len(candidates)} declared candidates")


# -- bottleneck vectors --------------------------------------------------------------


@dataclass(frozen=True)
class BottleneckVector:
    """The mean-zero unit vector that is constant on X and on its complement.

    Entries are -|Y| / sqrt(|X| |Y| |V|) on X and |X| / sqrt(|X| |Y| |V|) on
    Y = V - X.  Stored as integer numerators over sqrt(denom_sq), so the
    identities sum = 0, norm^2 = 1 and the Rayleigh-quotient formula are
    exact in integer arithmetic.
    """

    members: frozenset[int]
    num_vertices: int
    denom_sq: int  # |X| * |Y| * |V|

    @property
    def size_x(self) -> int:
        return len(self.members)

    @property
    def size_y(self) -> int:
        return self.num_vertices - len(self.members)

    def numerator(self, v: int) -> int:
        return -self.size_y if v in self.members else self.size_x

    def numerators(self) -> np.ndarray:
        out = np.full(self.num_vertices, self.size_x, dtype=np.int64)
        out[list(self.members)] = -self.size_y
        return out

    def floats(self) -> np.ndarray:
        return self.numerators() / math.sqrt(self.denom_sq)

    def sum_exact(self) -> int:
        return -self.size_y * self.size_x + self.size_x * self.size_y

    def norm_sq_exact(self) -> Fraction:
        num = self.size_x * self.size_y**2 + self.size_y * self.size_x**2
        return Fraction(num, self.denom_sq)

    def rayleigh_exact(self, G) -> Fraction:
        """J(G, f) = sum over edges of (f(u)-f(v))^2, exactly (unit norm)."""
        g = self.numerators()
        e = _edge_array(G)
        diff = g[e[:, 0]] - g[e[:, 1]]
        return Fraction(int((diff.astype(object) ** 2).sum()), self.denom_sq)

    def scaled_inner(self, other: "BottleneckVector") -> int:
        """<f1, f2> * sqrt(denom_sq_1 * denom_sq_2), an exact integer."""
        g1 = self.numerators().astype(object)
        g2 = other.numerators().astype(object)
        return int((g1 * g2).sum())

    def inner_float(self, other: "BottleneckVector") -> float:
        return self.scaled_inner(other) / math.sqrt(self.denom_sq * other.denom_sq)


def bottleneck_vector(G, X: Iterable[int]) -> BottleneckVector:
    nv = _num_vertices(G)
    Xs = _check_subset(nv, X)
    size_x = len(Xs)
    size_y = nv - size_x
    return BottleneckVector(Xs, nv, size_x * size_y * nv)


# -- Cheeger certificates ----------------------------------------------------------------


@dataclass(frozen=True)
class CheegerCertificate:
    lambda2: float
    phi: Fraction
    bound: float  # 2 phi(X)
    holds: bool


def cheeger_certificate(
    G, X: Iterable[int], spectrum: Spectrum | None = None, tol: float = 1e-9
) -> CheegerCertificate:
    """lambda2(G) <= 2 phi(X) for any proper subset X of a connected graph.

    ``holds`` is always true; a False value indicates a bug in this library,
    not a counterexample."""
    phi = conductance(G, X)
    if spectrum is None:
        spectrum = jacobi_spectrum(laplacian(_num_vertices(G), _edge_array(G)))
    lam2 = float(spectrum.eigenvalues[1])
    bound = 2.0 * float(phi)
    return CheegerCertificate(lam2, phi, bound, lam2 <= bound + tol)


# -- covariance and the inner-product identity -----------------------------------------------


def covariance(G, X1: Iterable[int], X2: Iterable[int]) -> Fraction:
    """Cov(X1, X2) = |X1 n X2|/|V| - (|X1|/|V|)(|X2|/|V|), exactly.

    Zero covariance is the independence ideal; the sign says whether the
    subsets overlap more or less than independent sets of their sizes would.
    """
    nv = _num_vertices(G)
    X1s = _check_subset(nv, X1)
    X2s = _check_subset(nv, X2)
    return Fraction(len(X1s & X2s), nv) - Fraction(len(X1s), nv) * Fraction(len(X2s), nv)


@dataclass(frozen=True)
class Lemma22Report:
    lhs: float          # direct <f1, f2>
    rhs: float          # Cov * sqrt(V^4 / (X1 Y1 X2 Y2))
    agree: bool
    exact_identity: bool  # integer form: scaled inner == Cov * V^3


def lemma22_check(G, X1: Iterable[int], X2: Iterable[int], tol: float = 1e-9) -> Lemma22Report:
    """Both routes to the bottleneck-vector inner product must agree: the
    direct dot product and the closed covariance formula."""
    nv = _num_vertices(G)
    f1 = bottleneck_vector(G, X1)
    f2 = bottleneck_vector(G, X2)
    cov = covariance(G, X1, X2)
    lhs = f1.inner_float(f2)
    rhs = float(cov) * math.sqrt(
        nv**4 / (f1.size_x * f1.size_y * f2.size_x * f2.size_y)
    )
    scaled = f1.scaled_inner(f2)
    exact = Fraction(scaled) == cov * nv**3
    return Lemma22Report(lhs, rhs, abs(lhs - rhs) <= tol, exact)


# -- k nearly-orthogonal low-quotient vectors force k small eigenvalues ------------------------


def theorem23_bound(k: int, eps: float, lam: float) -> float:
    """k * lam / (1 - (k-1) * eps); requires (k-1) * eps < 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if eps < 0:
        raise ValueError("epsilon must be >= 0")
    if (k - 1) * eps >= 1.0:
        raise EpsilonTooLargeError(f"(k-1)*eps = {(k - 1) * eps} >= 1")
    return k * lam / (1.0 - (k - 1) * eps)


@dataclass(frozen=True)
class Theorem23Report:
    k: int
    eps: float
    lam: float
    bound: float
    lambda_k: float
    holds: bool


def theorem23_verify(
    M, W: Sequence, eps: float, lam: float, tol: float = 1e-9
) -> Theorem23Report:
    """Check the hypotheses on (M, W, eps, lam), then verify that the k-th
    smallest eigenvalue of M is at most k*lam / (1 - (k-1)*eps)."""
    M = np.asarray(M, dtype=float)
    vectors = [np.asarray(w, dtype=float) for w in W]
    k = len(vectors)
    if k < 1:
        raise ValueError("need at least one vector")
    spectrum = jacobi_spectrum(M)
    if spectrum.eigenvalues[0] < -tol:
        raise HypothesisViolationError(
            "psd", f"min eigenvalue {spectrum.eigenvalues[0]:.3e} < -tol"
        )
    for i, w in enumerate(vectors):
        q = rayleigh(M, w)
        if q > lam + tol:
            raise HypothesisViolationError(
                "rayleigh-quotient", f"J(w_{i}) = {q} > lam = {lam}"
            )
    for i in range(k):
        for j in range(i + 1, k):
            bound_ij = eps * np.linalg.norm(vectors[i]) * np.linalg.norm(vectors[j])
            got = abs(float(vectors[i] @ vectors[j]))
            if got > bound_ij + tol:
                raise HypothesisViolationError(
                    "pairwise-inner-product",
                    f"|<w_{i}, w_{j}>| = {got} > eps bound {bound_ij}",
                )
    bound = theorem23_bound(k, eps, lam)  # may raise EpsilonTooLargeError
    lambda_k = float(spectrum.eigenvalues[k - 1])
    return Theorem23Report(k, eps, lam, bound, lambda_k, lambda_k <= bound + tol)


@dataclass(frozen=True)
class ClaimWitness:
    i: int
    j: int
    value: float  # |<a_i, a_j>| >= 1/(k-1)


def claim_check(vectors: Sequence, tol: float = 1e-9) -> ClaimWitness:
    """Among k vectors of norm >= 1 in R^(k-1), some pair has inner product
    of magnitude at least 1/(k-1).  Returns a witness pair; existence is a
    theorem, so failure to find one is an implementation bug."""
    A = np.asarray(vectors, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a 2-d array of row vectors")
    k, dim = A.shape
    if k < 2:
        raise ValueError("need at least two vectors")
    if dim != k - 1:
        raise ValueError(f"{k} vectors must live in R^{k - 1}, got R^{dim}")
    norms = np.linalg.norm(A, axis=1)
    if norms.min() < 1.0 - 1e-12:
        raise NormTooSmallError(f"min norm {norms.min()} < 1")
    gram = np.abs(A @ A.T)
    np.fill_diagonal(gram, -np.inf)
    flat = int(np.argmax(gram))
    i, j = divmod(flat, k)
    value = float(gram[i, j])
    threshold = 1.0 / (k - 1)
    assert value >= threshold - tol, (
        f"pair-correlation bound failed: max |<a_i,a_j>| = {value} < {threshold}"
    )
    return ClaimWitness(min(i, j), max(i, j), value)


# -- j-cycle bottlenecks in the meta-graph --------------------------------------------------


@dataclass(frozen=True)
class BottleneckReport:
    descriptor: str
    j: int
    size_x: int
    size_y: int
    boundary: int
    phi: Fraction
    vector: BottleneckVector
    rayleigh: Fraction
    density: Fraction                  # |X| / |V|
    poisson_density: float             # 1 - exp(-2^j / (2j)), the model value
    per_vertex_max_boundary: int
    boundary_bound: int | None         # 8j in labelled mode, None otherwise
    bound_holds: bool | None


def jcycle_subset(G: MetaGraph, j: int) -> frozenset[int]:
    """Meta-vertices whose cubic graph contains a j-cycle."""
    X = G.jcycle_members(j)
    if not X or len(X) == G.num_vertices:
        raise DegenerateBottleneckError(
            f"j={j}: |X|={len(X)} of {G.num_vertices} is empty or full"
        )
    return X


def jcycle_bottleneck(G: MetaGraph, j: int) -> BottleneckReport:
    """Bottleneck induced by the presence of a j-cycle.

    A move can destroy every j-cycle only if it acts on or next to one, so
    in labelled mode each member of X has at most 8j boundary edges, giving
    |boundary| <= 8j |X|; the unlabelled analogue is measured, not asserted.
    """
    X = jcycle_subset(G, j)
    mask = np.zeros(G.num_vertices, dtype=bool)
    mask[list(X)] = True
    e = G.edge_array
    cross = mask[e[:, 0]] != mask[e[:, 1]]
    boundary = int(np.count_nonzero(cross))
    crossing_members = np.concatenate([e[cross, 0], e[cross, 1]])
    crossing_members = crossing_members[mask[crossing_members]]
    per_vertex = (
        int(np.bincount(crossing_members, minlength=G.num_vertices).max())
        if crossing_members.size
        else 0
    )
    vec = bottleneck_vector(G, X)
    phi = Fraction(boundary, min(len(X), G.num_vertices - len(X)))
    bound = 8 * j if G.mode == "labelled" else None
    return BottleneckReport(
        descriptor=f"members with a {j}-cycle",
        j=j,
        size_x=len(X),
        size_y=G.num_vertices - len(X),
        boundary=boundary,
        phi=phi,
        vector=vec,
        rayleigh=vec.rayleigh_exact(G),
        density=Fraction(len(X), G.num_vertices),
        poisson_density=1.0 - math.exp(-(2.0**j) / (2.0 * j)),
        per_vertex_max_boundary=per_vertex,
        boundary_bound=bound,
        bound_holds=None if bound is None else per_vertex <= bound,
    )


@dataclass(frozen=True)
class PipelineReport:
    k: int
    reports: tuple[BottleneckReport, ...]
    lam: float                     # max Rayleigh quotient of the vectors
    eps: float                     # max pairwise |<f_i, f_j>| (unit vectors)
    inner_products: tuple[tuple[int, int, float], ...]
    covariances: tuple[tuple[int, int, str], ...]  # Fractions as "p/q"
    bound: float | None            # k*lam / (1 - (k-1) eps) when defined
    bound_note: str | None
    lambda_k: float
    cheeger_lambda2_bound: float   # 2 min_j phi(X_j)
    holds: bool | None


def theorem11_pipeline(
    G: MetaGraph, k: int, spectrum: Spectrum | None = None, tol: float = 1e-9
) -> PipelineReport:
    """Assemble the j-cycle bottleneck vectors for j = 1..k, measure their
    quotients and pairwise correlations, and compare the resulting
    eigenvalue bound with the true k-th smallest eigenvalue."""
    if k < 1:
        raise ValueError("k must be >= 1")
    reports = tuple(jcycle_bottleneck(G, j) for j in range(1, k + 1))
    vectors = [r.vector for r in reports]
    lam = max(float(r.rayleigh) for r in reports)
    inners = []
    eps = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            val = vectors[i].inner_float(vectors[j])
            inners.append((i + 1, j + 1, val))
            eps = max(eps, abs(val))
    covs = tuple(
        (i + 1, j + 1, str(covariance(G, vectors[i].members, vectors[j].members)))
        for i in range(k)
        for j in range(i + 1, k)
    )
    if spectrum is None:
        spectrum = jacobi_spectrum(G.laplacian())
    lambda_k = float(spectrum.eigenvalues[k - 1])
    lambda_2 = float(spectrum.eigenvalues[1])
    cheeger_bound = 2.0 * min(float(r.phi) for r in reports)
    # every bottleneck vector is mean-zero, so lambda2 <= its quotient
    assert lambda_2 <= 2.0 * min(float(r.phi) for r in reports) + tol
    try:
        bound = theorem23_bound(k, eps, lam)
        note = None
        holds = lambda_k <= bound + tol
        assert holds, f"lambda_{k} = {lambda_k} exceeds bound {bound}"
    except EpsilonTooLargeError as exc:
        bound = None
        note = str(exc)
        holds = None
    return PipelineReport(
        k=k,
        reports=reports,
        lam=lam,
        eps=eps,
        inner_products=tuple(inners),
        covariances=covs,
        bound=bound,
        bound_note=note,
        lambda_k=lambda_k,
        cheeger_lambda2_bound=cheeger_bound,
        holds=holds,
    )
