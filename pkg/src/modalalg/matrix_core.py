"""Dense complex matrix primitives.

Operators are plain ``numpy`` arrays of dtype ``complex128``.  Every
comparison goes through an explicit :class:`ToleranceContext`; nothing in
the package reads global numerical settings.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NotAProjection, NotSelfAdjoint

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class ToleranceContext:
    atol: float = 1e-10
    eig_cluster_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not (self.atol > 0 and self.eig_cluster_tol > 0):
            raise ValueError("tolerances must be strictly positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


DEFAULT_CTX = ToleranceContext()


def as_operator(A) -> np.ndarray:
    """Coerce ``A`` to a square, finite complex matrix."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("operator has non-finite entries")
    return M


def same_dim(*ops) -> int:
    dims = {np.shape(A)[0] for A in ops}
    if len(dims) != 1:
        raise DimensionMismatch(f"operators of differing dimensions {sorted(dims)}")
    return dims.pop()


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def zeros(n: int) -> np.ndarray:
    return np.zeros((n, n), dtype=complex)


def adjoint(A) -> np.ndarray:
    return np.conj(np.asarray(A, dtype=complex)).T


def opnorm(A) -> float:
    """Spectral (operator) norm."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def close(A, B, ctx: ToleranceContext = DEFAULT_CTX, scale: float = 1.0) -> bool:
    return opnorm(np.asarray(A) - np.asarray(B)) <= scale * ctx.atol


def is_self_adjoint(A, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    A = np.asarray(A, dtype=complex)
    return opnorm(A - adjoint(A)) <= ctx.atol


def is_projection(A, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    return is_self_adjoint(A, ctx) and opnorm(A @ A - A) <= ctx.atol


def check_projection(A, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    P = as_operator(A)
    if not is_projection(P, ctx):
        raise NotAProjection("operator is not a self-adjoint idempotent within atol")
    return P


def check_self_adjoint(A, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    Q = as_operator(A)
    if not is_self_adjoint(Q, ctx):
        raise NotSelfAdjoint(f"||A - A^dagger|| = {opnorm(Q - adjoint(Q)):.3e} exceeds atol")
    return Q


def hermitize(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    return 0.5 * (A + adjoint(A))


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def rank_one(v) -> np.ndarray:
    """Projector onto the line through the (not necessarily unit) vector ``v``."""
    v = np.asarray(v, dtype=complex).ravel()
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("cannot project onto the zero vector")
    v = v / nv
    return np.outer(v, v.conj())


def coordinate_projector(indices, n: int) -> np.ndarray:
    d = np.zeros(n, dtype=complex)
    d[list(indices)] = 1.0
    return np.diag(d)


def rank(P, ctx: ToleranceContext = DEFAULT_CTX) -> int:
    """Rank of a projection, read off its trace."""
    return int(round(float(np.trace(P).real)))


@dataclass(frozen=True)
class SpectralResolution:
    """Distinct eigenvalues (descending) with their eigenprojectors."""

    eigenvalues: tuple
    projectors: tuple

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.projectors))

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def reconstruct(self) -> np.ndarray:
        out = zeros(self.dim)
        for lam, P in self:
            out = out + lam * P
        return out

    def ranks(self) -> list:
        return [rank(P) for P in self.projectors]

    def projector_for(self, values, tol: float) -> np.ndarray:
        """Sum of eigenprojectors whose eigenvalue lies within ``tol`` of one of ``values``."""
        out = zeros(self.dim)
        for lam, P in self:
            if any(abs(lam - v) <= tol for v in values):
                out = out + P
        return out


def cluster_sorted(values: Sequence[float], tol: float) -> list:
    """Group a descending sequence into runs whose consecutive gaps are <= tol.

    Returns lists of indices into ``values``.
    """
    groups: list = []
    for i, v in enumerate(values):
        if groups and values[i - 1] - v <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def spectral_resolution(A, ctx: ToleranceContext = DEFAULT_CTX) -> SpectralResolution:
    """Resolve a self-adjoint operator into distinct eigenvalues and eigenprojectors.

    Eigenvalues are returned in descending order.  Eigenvalues closer than
    ``ctx.eig_cluster_tol`` to their sorted neighbour are merged into a single
    degenerate eigenspace, reported at the cluster mean.
    """
    A = check_self_adjoint(A, ctx)
    w, V = np.linalg.eigh(hermitize(A))
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    eigenvalues, projectors = [], []
    for group in cluster_sorted(list(w), ctx.eig_cluster_tol):
        B = V[:, group]
        eigenvalues.append(float(np.mean(w[group])))
        projectors.append(hermitize(B @ B.conj().T))
    return SpectralResolution(tuple(eigenvalues), tuple(projectors))


def nullspace(M, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """Orthonormal basis (as columns) for the kernel of ``M``.

    Singular values at or below ``atol * max(1, s_max)`` are treated as
    zero, so a numerically vanishing matrix has a full kernel.
    """
    M = np.asarray(M, dtype=complex)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    smax = float(s[0]) if s.size else 0.0
    r = int(np.sum(s > ctx.atol * max(smax, 1.0)))
    return Vh[r:].conj().T


def orthonormal_range(vectors, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """Orthonormal basis (columns) for the span of the given columns."""
    M = np.asarray(vectors, dtype=complex)
    if M.size == 0:
        return M.reshape(M.shape[0], 0)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > ctx.atol * max(float(s[0]), 1.0)))
    return U[:, :r]


def projection_onto_span(vectors, ctx: ToleranceContext = DEFAULT_CTX, dim: int | None = None) -> np.ndarray:
    """Orthogonal projector onto the linear span of a list of vectors.

    An empty list gives the zero projection, in which case ``dim`` is required.
    """
    vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not vecs:
        if dim is None:
            raise ValueError("dim is required for an empty vector list")
        return zeros(dim)
    n = vecs[0].shape[0]
    if any(v.shape[0] != n for v in vecs) or (dim is not None and dim != n):
        raise DimensionMismatch("vectors of differing length")
    U = orthonormal_range(np.column_stack(vecs), ctx)
    return hermitize(U @ U.conj().T)


def range_basis(P, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """Orthonormal basis (columns) of ran(P) for a projection ``P``."""
    w, V = np.linalg.eigh(hermitize(P))
    return V[:, w > 0.5]


class LimitResult(NamedTuple):
    operator: np.ndarray
    converged: bool
    iterations: int


def norm_limit(sequence: Callable[[int], np.ndarray], ctx: ToleranceContext = DEFAULT_CTX) -> LimitResult:
    """Operator-norm limit of ``sequence(1), sequence(2), ...``.

    Stops at the first n >= 2 with ``||G_n - G_{n-1}|| <= atol``.  When the
    cap ``max_iter`` is hit the last iterate is returned with
    ``converged=False``.
    """
    prev = np.asarray(sequence(1), dtype=complex)
    for n in range(2, ctx.max_iter + 1):
        cur = np.asarray(sequence(n), dtype=complex)
        if opnorm(cur - prev) <= ctx.atol:
            return LimitResult(cur, True, n)
        prev = cur
    return LimitResult(prev, False, ctx.max_iter)
