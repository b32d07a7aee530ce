"""Commutants, von Neumann algebras and definite-valued projection sets.

Operator subspaces are handled as :class:`OperatorSpan` objects holding an
orthonormal basis with respect to the Hilbert-Schmidt inner product.  Sets
of projections that are usually infinite (the restriction of an algebra, an
X-form set) are represented by membership predicates together with finite
generating families.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .matrix_core import (
    DEFAULT_CTX,
    ToleranceContext,
    adjoint,
    as_operator,
    check_self_adjoint,
    hermitize,
    identity,
    is_projection,
    nullspace,
    opnorm,
    orthonormal_range,
    same_dim,
    spectral_resolution,
    zeros,
)
from .rules import XFormSpec, spanning_rank_one_family
from .sampling import random_hermitian, random_projection, rng_for


@dataclass(frozen=True)
class OperatorSpan:
    """Complex linear span of operators on C^dim.

    ``columns`` is an orthonormal basis of row-major vectorised operators,
    shape ``(dim**2, k)``.
    """

    dim: int
    columns: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, operators, ctx: ToleranceContext = DEFAULT_CTX, dim: int | None = None) -> "OperatorSpan":
        ops = [as_operator(A) for A in operators]
        if not ops:
            if dim is None:
                raise ValueError("dim is required for an empty span")
            return cls(dim, np.zeros((dim * dim, 0), dtype=complex))
        n = same_dim(*ops)
        M = np.column_stack([A.reshape(-1) for A in ops])
        return cls(n, orthonormal_range(M, ctx))

    def __len__(self):
        return self.columns.shape[1]

    @property
    def basis(self) -> list:
        n = self.dim
        return [self.columns[:, i].reshape(n, n) for i in range(len(self))]

    def residual(self, Q) -> float:
        """Hilbert-Schmidt distance from ``Q`` to the span."""
        x = np.asarray(Q, dtype=complex).reshape(-1)
        return float(np.linalg.norm(x - self.columns @ (self.columns.conj().T @ x)))

    def contains(self, Q, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
        Q = np.asarray(Q, dtype=complex)
        if Q.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"operator of shape {Q.shape} against span of dim {self.dim}")
        return self.residual(Q) <= ctx.atol * max(1.0, float(np.linalg.norm(Q)))

    @property
    def contains_identity(self) -> bool:
        return self.contains(identity(self.dim))

    def includes(self, other: "OperatorSpan", ctx: ToleranceContext = DEFAULT_CTX) -> bool:
        return all(self.contains(B, ctx) for B in other.basis)

    def equals(self, other: "OperatorSpan", ctx: ToleranceContext = DEFAULT_CTX) -> bool:
        return len(self) == len(other) and self.includes(other, ctx) and other.includes(self, ctx)

    def intersection(self, other: "OperatorSpan", ctx: ToleranceContext = DEFAULT_CTX) -> "OperatorSpan":
        if self.dim != other.dim:
            raise DimensionMismatch("spans of differing dimension")
        if len(self) == 0 or len(other) == 0:
            return OperatorSpan.of([], ctx, dim=self.dim)
        K = nullspace(np.hstack([self.columns, -other.columns]), ctx)
        vecs = self.columns @ K[: len(self)]
        n = self.dim
        return OperatorSpan.of([vecs[:, i].reshape(n, n) for i in range(vecs.shape[1])], ctx, dim=n)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        k = len(self)
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        return (self.columns @ c).reshape(self.dim, self.dim)


def is_self_adjoint_set(operators, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    """True iff the adjoint of every member is (within atol) also a member."""
    ops = [as_operator(A) for A in operators]
    return all(any(opnorm(adjoint(A) - B) <= ctx.atol for B in ops) for A in ops)


def _commutator_map(B: np.ndarray) -> np.ndarray:
    # row-major vec: vec(T B) = (I kron B^T) vec T,  vec(B T) = (B kron I) vec T
    n = B.shape[0]
    I = np.eye(n, dtype=complex)
    return np.kron(I, B.T) - np.kron(B, I)


def commutant(operators, ctx: ToleranceContext = DEFAULT_CTX) -> OperatorSpan:
    """All T with TB = BT for every B in ``operators``."""
    if isinstance(operators, OperatorSpan):
        operators = operators.basis
    ops = [as_operator(A) for A in operators]
    if not ops:
        raise ValueError("commutant of an empty set is not defined here")
    n = same_dim(*ops)
    M = np.vstack([_commutator_map(B) for B in ops])
    K = nullspace(M, ctx)
    return OperatorSpan(n, K)


def double_commutant(operators, ctx: ToleranceContext = DEFAULT_CTX) -> OperatorSpan:
    return commutant(commutant(operators, ctx), ctx)


def is_von_neumann_algebra(A: OperatorSpan, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    """Identity, adjoint- and product-closure, and A = A'' as subspaces."""
    if len(A) == 0 or not A.contains_identity:
        return False
    basis = A.basis
    if not all(A.contains(adjoint(B), ctx) for B in basis):
        return False
    for B in basis:
        for C in basis:
            if not A.contains(B @ C, ctx):
                return False
    return A.equals(double_commutant(A, ctx), ctx)


def star_algebra_closure(generators, ctx: ToleranceContext = DEFAULT_CTX, include_identity: bool = True) -> OperatorSpan:
    """Smallest span containing the generators that is closed under products and adjoints."""
    ops = [as_operator(A) for A in generators]
    n = same_dim(*ops)
    if include_identity:
        ops.append(identity(n))
    ops += [adjoint(A) for A in ops]
    span = OperatorSpan.of(ops, ctx)
    while True:
        basis = span.basis
        extra = [B @ C for B in basis for C in basis] + [adjoint(B) for B in basis]
        grown = OperatorSpan.of(basis + extra, ctx)
        if len(grown) == len(span):
            return span
        span = grown


def self_adjoint_part_contains(A: OperatorSpan, Q, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    Q = check_self_adjoint(Q, ctx)
    return A.contains(Q, ctx)


def restriction_membership(A: OperatorSpan, P, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    return is_projection(P, ctx) and A.contains(P, ctx)


def hermitian_parts(operators) -> list:
    out = []
    for B in operators:
        out.append(hermitize(B))
        out.append(hermitize(-1j * B))
    return out


def algebra_projections(A: OperatorSpan, ctx: ToleranceContext = DEFAULT_CTX) -> list:
    """Spectral projections of the self-adjoint parts of A's basis.

    For a von Neumann algebra these lie in A and generate it.
    """
    out = []
    for H in hermitian_parts(A.basis):
        if opnorm(H) <= ctx.atol:
            continue
        out.extend(spectral_resolution(H, ctx).projectors)
    return out


def random_algebra_projection(A: OperatorSpan, rng: np.random.Generator, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """A projection of A: a random sum of spectral projections of a random self-adjoint element."""
    H = hermitize(A.random_element(rng))
    res = spectral_resolution(H, ctx)
    P = zeros(A.dim)
    for Pi in res.projectors:
        if rng.random() < 0.5:
            P = P + Pi
    return hermitize(P)


# Definite-valued projection sets.  XFormSpec (in rules) shares the same
# duck-typed surface: contains(P, ctx) and generators(ctx).

@dataclass(frozen=True)
class FullLattice:
    """Every projection is definite (naive realism)."""

    dim: int
    kind = "full-lattice"

    def contains(self, P, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
        return is_projection(P, ctx)

    def generators(self, ctx: ToleranceContext = DEFAULT_CTX) -> list:
        return spanning_rank_one_family(identity(self.dim))

    def closure_family(self, ctx: ToleranceContext = DEFAULT_CTX) -> list:
        return [zeros(self.dim), identity(self.dim)]


@dataclass(frozen=True)
class AlgebraRestriction:
    """Projections lying in a given von Neumann algebra."""

    algebra: OperatorSpan
    kind = "algebra-restriction"

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def contains(self, P, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
        return restriction_membership(self.algebra, P, ctx)

    def generators(self, ctx: ToleranceContext = DEFAULT_CTX) -> list:
        return algebra_projections(self.algebra, ctx)

    def closure_family(self, ctx: ToleranceContext = DEFAULT_CTX) -> list:
        return algebra_projections(commutant(self.algebra, ctx), ctx)


@dataclass(frozen=True)
class FiniteProjectionSet:
    """An explicitly listed finite set of projections."""

    elements: tuple
    kind = "finite"

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def contains(self, P, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
        P = np.asarray(P, dtype=complex)
        return any(opnorm(P - E) <= ctx.atol for E in self.elements)

    def generators(self, ctx: ToleranceContext = DEFAULT_CTX) -> list:
        return list(self.elements)

    def closure_family(self, ctx: ToleranceContext = DEFAULT_CTX):
        return None


def xform_closure_family(spec: XFormSpec, ctx: ToleranceContext = DEFAULT_CTX) -> list:
    """Finite stand-in for {P : XP = P for some X}.

    The X's together with rank-1 subprojections spanning the full operator
    algebra on each ran(X); the commutant depends only on this span.
    """
    out = list(spec.X_list)
    for X in spec.X_list:
        out.extend(spanning_rank_one_family(X))
    return out


def closure_family(d, ctx: ToleranceContext = DEFAULT_CTX):
    if isinstance(d, XFormSpec):
        return xform_closure_family(d, ctx)
    return d.closure_family(ctx)


def set_kind(d) -> str:
    return "x-form" if isinstance(d, XFormSpec) else d.kind


def extension_membership(d, Q, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    """True iff every spectral projection of the self-adjoint Q lies in d."""
    Q = check_self_adjoint(Q, ctx)
    return all(d.contains(P, ctx) for P in spectral_resolution(Q, ctx).projectors)


@dataclass
class StarClosureReport:
    kind: str
    passed: bool
    n_samples: int
    n_members: int
    closure_family_size: int | None
    commutant_dim: int | None
    double_commutant_dim: int
    algebra_matches: bool | None
    disagreements: list = field(default_factory=list)
    witness: np.ndarray | None = None

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "n_samples": self.n_samples,
            "n_members": self.n_members,
            "closure_family_size": self.closure_family_size,
            "commutant_dim": self.commutant_dim,
            "double_commutant_dim": self.double_commutant_dim,
            "algebra_matches": self.algebra_matches,
            "n_disagreements": len(self.disagreements),
        }


def _perturb(P, rng, eps=1e-3):
    H = random_hermitian(P.shape[0], rng)
    w, V = np.linalg.eigh(H)
    U = (V * np.exp(1j * eps * w)) @ V.conj().T
    return hermitize(U @ P @ U.conj().T)


def star_closure_check(d, sample_budget: int = 200, ctx: ToleranceContext = DEFAULT_CTX, seed: int = 0) -> StarClosureReport:
    """Test whether d is the restriction of the commutant of a set of projections.

    Two routes.  When d has a recipe for the projection set P (X-form sets,
    the full lattice, restrictions of algebras), A = P' is computed and
    membership in d is compared with membership in A on ``sample_budget``
    deterministic projections: a third drawn from A, a third generic, a
    third small perturbations of members.  Independently, projections are
    drawn from the double commutant of d's generators; any of them outside d
    is a witness that no such P exists.
    """
    rng = rng_for(seed, 7001)
    n = d.dim
    D2 = double_commutant(d.generators(ctx), ctx)
    family = closure_family(d, ctx)
    A = commutant(family, ctx) if family is not None else None

    disagreements = []
    members = 0
    if A is not None:
        for i in range(sample_budget):
            r = i % 3
            if r == 0:
                S = random_algebra_projection(A, rng, ctx)
            elif r == 1:
                S = random_projection(n, rng)
            else:
                S = random_algebra_projection(A, rng, ctx)
                for _ in range(8):
                    if 0.5 < np.trace(S).real < n - 0.5:
                        break
                    S = random_algebra_projection(A, rng, ctx)
                S = _perturb(S, rng)
            in_d = d.contains(S, ctx)
            members += in_d
            if in_d != restriction_membership(A, S, ctx):
                disagreements.append(S)

    witness = None
    for _ in range(max(20, sample_budget // 4)):
        S = random_algebra_projection(D2, rng, ctx)
        if not d.contains(S, ctx):
            witness = S
            break

    matches = A.equals(D2, ctx) if A is not None else None
    passed = A is not None and not disagreements and witness is None and bool(matches)
    return StarClosureReport(
        kind=set_kind(d),
        passed=passed,
        n_samples=sample_budget if A is not None else 0,
        n_members=int(members),
        closure_family_size=None if family is None else len(family),
        commutant_dim=None if A is None else len(A),
        double_commutant_dim=len(D2),
        algebra_matches=matches,
        disagreements=disagreements,
        witness=witness,
    )
