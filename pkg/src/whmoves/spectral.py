"""Laplacians, a dense Jacobi eigensolver, and Rayleigh-quotient tools.

The Laplacian of a simple graph is Q = D - A, equivalently C^T C for any
orientation of the incidence matrix C; it is symmetric positive semidefinite
with smallest eigenvalue 0 on the constant vector, and its second-smallest
eigenvalue is positive exactly when the graph is connected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig

DEFAULT_SOLVER = SolverConfig()


class NoConvergenceError(Exception):
    """Jacobi sweeps exhausted before the off-diagonal norm target."""

    def __init__(self, achieved: float, target: float, sweeps: int):
        super().__init__(
            f"off-diagonal norm {achieved:.3e} > target {target:.3e} "
            f"after {sweeps} sweeps"
        )
        self.achieved = achieved
        self.target = target
        self.sweeps = sweeps


class ZeroVectorError(ValueError):
    """Rayleigh quotient of the zero vector is undefined."""


@dataclass
class Spectrum:
    """Sorted eigenvalues with optional orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    tol: float
    method: str = "jacobi"
    approximate: bool = False
    sweeps: int = 0

    def residuals(self, Q: np.ndarray) -> np.ndarray:
        """Per-pair residual norms ||Q v - lambda v||; requires eigenvectors."""
        if self.eigenvectors is None:
            raise ValueError("spectrum was computed without eigenvectors")
        R = Q @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(R, axis=0)


# -- Laplacian construction ----------------------------------------------------


def laplacian(num_vertices: int, edges) -> np.ndarray:
    """Q = D - A for a simple undirected graph given as index pairs."""
    Q = np.zeros((num_vertices, num_vertices))
    for u, v in np.asarray(edges, dtype=np.int64).reshape(-1, 2):
        if u == v or not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise ValueError(f"bad simple-graph edge ({u},{v})")
        if Q[u, v] != 0:
            raise ValueError(f"duplicate edge ({u},{v})")
        Q[u, v] = Q[v, u] = -1.0
        Q[u, u] += 1.0
        Q[v, v] += 1.0
    return Q


def incidence_matrix(num_vertices: int, edges) -> np.ndarray:
    """Directed incidence matrix C: one row per edge with a -1 and a +1."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    C = np.zeros((len(edges), num_vertices))
    for r, (u, v) in enumerate(edges):
        C[r, u] = -1.0
        C[r, v] = 1.0
    return C


# -- dense Jacobi solver ---------------------------------------------------------


def _round_robin_rounds(n: int) -> list[np.ndarray]:
    """Chess-tournament schedule: n-1 (n odd: n) rounds of disjoint pairs
    covering every unordered pair exactly once."""
    players = list(range(n)) + ([n] if n % 2 else [])  # n used as a bye
    m = len(players)
    rounds = []
    others = players[1:]
    for _ in range(m - 1):
        lineup = [players[0]] + others
        pairs = [
            (lineup[i], lineup[m - 1 - i])
            for i in range(m // 2)
            if lineup[i] != n and lineup[m - 1 - i] != n
        ]
        rounds.append(np.array(pairs, dtype=np.int64))
        others = others[-1:] + others[:-1]
    return rounds


def off_norm(A: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part.

    Summed over a zero-diagonal copy: subtracting the diagonal squares from
    the total would cancel catastrophically once the off-part is tiny.
    """
    B = np.array(A, dtype=float)
    np.fill_diagonal(B, 0.0)
    return float(np.sqrt((B * B).sum()))


def jacobi_spectrum(
    Q,
    want_vectors: bool = True,
    tol: float = DEFAULT_SOLVER.tol,
    max_sweeps: int = DEFAULT_SOLVER.max_sweeps,
) -> Spectrum:
    """Full spectrum of a symmetric matrix by cyclic Jacobi rotations.

    Rotations are scheduled in rounds of disjoint index pairs so every round
    is applied as a batched two-sided update.  Sweeps continue until the
    off-diagonal Frobenius norm falls below ``tol * max|Q|`` (with a margin
    so that eigenpair residuals land below ``tol * ||Q||``), or
    :class:`NoConvergenceError` is raised after ``max_sweeps``.
    """
    A = np.array(Q, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    n = A.shape[0]
    scale = float(np.abs(A).max()) if n else 0.0
    if scale and np.abs(A - A.T).max() > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    A = (A + A.T) / 2.0
    V = np.eye(n) if want_vectors else None
    if n <= 1 or scale == 0.0:
        vals = np.diag(A).copy()
        order = np.argsort(vals, kind="stable")
        return Spectrum(vals[order], V[:, order] if V is not None else None, tol)

    # max|q_ij| <= ||Q||_2 for symmetric Q, so this target keeps residuals,
    # which are bounded by the final off-diagonal norm, below tol * ||Q||_2
    target = 0.1 * tol * scale
    rounds = _round_robin_rounds(n)
    pair_count = n * (n - 1) // 2
    skip_threshold = target / np.sqrt(2.0 * pair_count)

    sweeps = 0
    current = off_norm(A)
    while current > target:
        if sweeps >= max_sweeps:
            raise NoConvergenceError(current, target, sweeps)
        for pairs in rounds:
            apq = A[pairs[:, 0], pairs[:, 1]]
            active = np.abs(apq) > skip_threshold
            if not active.any():
                continue
            p = pairs[active, 0]
            q = pairs[active, 1]
            apq = apq[active]
            app = A[p, p]
            aqq = A[q, q]
            tau = (aqq - app) / (2.0 * apq)
            t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t[tau == 0.0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # pairs are disjoint, so all rotations of a round commute and can
            # be applied as one orthogonal transform: rows, then columns
            Ap = A[p, :].copy()
            Aq = A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap = A[:, p].copy()
            Aq = A[:, q].copy()
            A[:, p] = Ap * c - Aq * s
            A[:, q] = Ap * s + Aq * c
            A[p, q] = 0.0
            A[q, p] = 0.0
            if V is not None:
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = Vp * c - Vq * s
                V[:, q] = Vp * s + Vq * c
        sweeps += 1
        current = off_norm(A)

    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = V[:, order] if V is not None else None
    return Spectrum(vals, vecs, tol=tol, sweeps=sweeps)


# -- Rayleigh quotients ------------------------------------------------------------


def rayleigh(Q, v) -> float:
    """<Qv, v> / ||v||^2 for a nonzero vector v."""
    v = np.asarray(v, dtype=float)
    nsq = float(v @ v)
    if nsq == 0.0:
        raise ZeroVectorError("Rayleigh quotient needs a nonzero vector")
    return float(v @ (np.asarray(Q, dtype=float) @ v)) / nsq


@dataclass
class RayleighPrincipleReport:
    lambda2: float
    trials: int
    min_quotient: float
    quotient_at_v2: float
    violations: int


def rayleigh_principle_check(
    num_vertices: int,
    edges,
    trials: int,
    seed: int = 0,
    tol: float = 1e-9,
) -> RayleighPrincipleReport:
    """Spot-check lambda2 = min over mean-zero f of the Rayleigh quotient.

    Every random mean-zero vector must have quotient >= lambda2 - tol, and
    the second eigenvector must attain lambda2.  Raises AssertionError on
    violation (a solver or Laplacian bug, not a property of the graph).
    """
    Q = laplacian(num_vertices, edges)
    spec = jacobi_spectrum(Q)
    lam2 = float(spec.eigenvalues[1])
    v2 = spec.eigenvectors[:, 1]
    at_v2 = rayleigh(Q, v2)
    rng = np.random.default_rng(seed)
    worst = np.inf
    violations = 0
    for _ in range(trials):
        f = rng.standard_normal(num_vertices)
        f -= f.mean()
        if not f.any():
            continue
        j = rayleigh(Q, f)
        worst = min(worst, j)
        if j < lam2 - tol:
            violations += 1
    assert violations == 0, f"Rayleigh principle violated {violations} times"
    assert abs(at_v2 - lam2) <= tol, f"J(v2)={at_v2} != lambda2={lam2}"
    return RayleighPrincipleReport(lam2, trials, float(worst), at_v2, violations)


# -- approximate bottom-k for graphs past the dense budget ---------------------------


def _adjacency_matvec(num_vertices: int, edges: np.ndarray):
    u = edges[:, 0]
    v = edges[:, 1]

    def matvec(x: np.ndarray) -> np.ndarray:
        return np.bincount(u, weights=x[v], minlength=num_vertices) + np.bincount(
            v, weights=x[u], minlength=num_vertices
        )

    return matvec


def bottom_k_spectrum(
    num_vertices: int,
    edges,
    k: int,
    tol: float = 1e-8,
    max_iters: int = 20000,
    seed: int = 0,
) -> Spectrum:
    """Approximate k smallest Laplacian eigenpairs by shift-free subspace
    (block power) iteration with Rayleigh-Ritz extraction.

    Iterates x -> (cI - Q) x with c above the spectral radius, which
    amplifies the bottom of Q's spectrum; results are flagged approximate
    and carry the achieved residual bound as ``tol``.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    deg = np.bincount(edges.reshape(-1), minlength=num_vertices).astype(float)
    c = 2.0 * deg.max() + 1.0
    adj = _adjacency_matvec(num_vertices, edges)
    scale = 2.0 * deg.max()  # Gershgorin bound on ||Q||_2

    block = min(num_vertices, 2 * k + 4)
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((num_vertices, block))
    Y[:, 0] = 1.0  # seed the constant eigenvector
    Y, _ = np.linalg.qr(Y)

    def apply_B(X):  # B = cI - Q = (c - deg) I + A
        return (c - deg)[:, None] * X + np.column_stack([adj(X[:, i]) for i in range(X.shape[1])])

    def apply_Q(X):
        return deg[:, None] * X - np.column_stack([adj(X[:, i]) for i in range(X.shape[1])])

    achieved = np.inf
    theta = None
    U = None
    for it in range(max_iters):
        Y = apply_B(Y)
        Y, _ = np.linalg.qr(Y)
        if it % 10 == 9 or it == max_iters - 1:
            QY = apply_Q(Y)
            H = Y.T @ QY
            H = (H + H.T) / 2.0
            small = jacobi_spectrum(H)
            theta = small.eigenvalues[:k]
            U = Y @ small.eigenvectors[:, :k]
            R = apply_Q(U) - U * theta
            achieved = float(np.abs(np.linalg.norm(R, axis=0)).max())
            if achieved <= tol * scale:
                break
    assert theta is not None and U is not None
    return Spectrum(
        eigenvalues=np.array(theta),
        eigenvectors=U,
        tol=achieved / scale if scale else achieved,
        method="subspace",
        approximate=True,
    )
