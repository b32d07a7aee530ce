"""Deterministic pseudo-random operators, projections and states.

Everything takes a ``numpy.random.Generator`` so callers control seeding.
"""
from __future__ import annotations

import numpy as np

from .matrix_core import coordinate_projector, hermitize, identity, range_basis


def rng_for(seed, *stream) -> np.random.Generator:
    """Independent generator for a named sub-stream of ``seed``."""
    return np.random.default_rng([int(seed), *[int(s) for s in stream]])


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return hermitize(Z)


def random_projection(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Unitarily conjugated coordinate projector of the given (or random) rank."""
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    U = haar_unitary(n, rng)
    return hermitize(U @ coordinate_projector(range(rank), n) @ U.conj().T)


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_density(n: int, rng: np.random.Generator, degenerate: bool = False, rank: int | None = None) -> np.ndarray:
    """Random density matrix.

    With ``degenerate`` the eigenvalues are drawn from a small set of levels so
    that repeated eigenvalues occur; ``rank`` forces a null space.
    """
    if rank is None:
        rank = n
    if degenerate and rank >= 2:
        levels = rng.integers(1, 4, size=rank).astype(float)
        levels[1] = levels[0]
    else:
        levels = rng.uniform(0.05, 1.0, size=rank)
    w = np.zeros(n)
    w[:rank] = levels / levels.sum()
    U = haar_unitary(n, rng)
    return hermitize(U @ np.diag(w) @ U.conj().T)


def adapted_basis(X_list, rng: np.random.Generator):
    """Orthonormal basis adapted to a family of mutually orthogonal projections.

    Returns ``(blocks, complement)``: one column-basis per member of
    ``X_list`` (each randomly rotated inside its range) and a randomly rotated
    basis of the orthogonal complement of their sum.
    """
    n = X_list[0].shape[0]
    blocks = []
    for X in X_list:
        B = range_basis(X)
        k = B.shape[1]
        blocks.append(B @ haar_unitary(k, rng) if k else B)
    C = range_basis(identity(n) - sum(X_list))
    k = C.shape[1]
    complement = C @ haar_unitary(k, rng) if k else C
    return blocks, complement


def extension_element(X_list, rng: np.random.Generator, values=None, basis=None) -> np.ndarray:
    """Self-adjoint operator whose spectral projections resolve every X.

    Each X block receives a single eigenvalue; each complement basis vector
    receives its own.  ``values`` (a finite pool) makes degeneracies likely.
    """
    blocks, complement = basis if basis is not None else adapted_basis(X_list, rng)

    def draw():
        if values is None:
            return float(rng.normal())
        return float(rng.choice(values))

    n = X_list[0].shape[0]
    out = np.zeros((n, n), dtype=complex)
    for B in blocks:
        out += draw() * (B @ B.conj().T)
    for j in range(complement.shape[1]):
        c = complement[:, j:j + 1]
        out += draw() * (c @ c.conj().T)
    return hermitize(out)


def xform_member(X_list, rng: np.random.Generator, basis=None) -> np.ndarray:
    """Random projection P with PX = X or 0 for every X."""
    blocks, complement = basis if basis is not None else adapted_basis(X_list, rng)
    n = X_list[0].shape[0]
    P = np.zeros((n, n), dtype=complex)
    for X in X_list:
        if rng.random() < 0.5:
            P += X
    for j in range(complement.shape[1]):
        if rng.random() < 0.5:
            c = complement[:, j:j + 1]
            P += c @ c.conj().T
    return hermitize(P)
