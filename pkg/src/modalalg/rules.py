"""Definite-valued projection sets built from a quantum state.

Every modal rule handled here produces an :class:`XFormSpec`: a family of
mutually orthogonal non-zero projections X, with the definite set being all
projections P such that PX = X or PX = 0 for each X.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllComponentsZero, DimensionMismatch, InvalidXForm, NotDensityOperator, NotInD
from .matrix_core import (
    DEFAULT_CTX,
    SpectralResolution,
    ToleranceContext,
    as_operator,
    hermitize,
    identity,
    is_projection,
    is_self_adjoint,
    opnorm,
    rank_one,
    range_basis,
    spectral_resolution,
    zeros,
)

RULES = ("naive", "orthodox", "clifton", "kochen-dieks", "bub")


@dataclass(frozen=True)
class XFormSpec:
    X_list: tuple
    ctx: ToleranceContext = field(default=DEFAULT_CTX, compare=False)

    def __post_init__(self):
        Xs = tuple(as_operator(X) for X in self.X_list)
        object.__setattr__(self, "X_list", Xs)
        if not Xs:
            raise InvalidXForm("X list must be non-empty")
        n = Xs[0].shape[0]
        atol = self.ctx.atol
        for i, X in enumerate(Xs):
            if X.shape[0] != n:
                raise DimensionMismatch("X list members of differing dimension")
            if not is_projection(X, self.ctx):
                raise InvalidXForm(f"X[{i}] is not a projection")
            if opnorm(X) <= atol:
                raise InvalidXForm(f"X[{i}] is the zero projection")
            for j in range(i):
                if opnorm(X @ Xs[j]) > atol:
                    raise InvalidXForm(f"X[{j}] and X[{i}] are not orthogonal")

    @property
    def dim(self) -> int:
        return self.X_list[0].shape[0]

    @property
    def support(self) -> np.ndarray:
        """Sum of the X's."""
        return hermitize(sum(self.X_list))

    def __len__(self):
        return len(self.X_list)

    def contains(self, P, ctx: ToleranceContext | None = None) -> bool:
        return xform_membership(self, P, ctx or self.ctx)

    def generators(self, ctx: ToleranceContext | None = None) -> list:
        """Finite family of members of d whose double commutant spans the algebra of d.

        The X's, plus rank-1 projectors spanning the full matrix algebra on
        the orthogonal complement of their sum.
        """
        return list(self.X_list) + spanning_rank_one_family(identity(self.dim) - self.support)


def spanning_rank_one_family(P) -> list:
    """Rank-1 subprojections of ``P`` whose linear span is every operator on ran(P).

    For an orthonormal basis e_1..e_k of ran(P) this is the k**2 projectors
    onto e_i, (e_i + e_j)/sqrt2 and (e_i + i e_j)/sqrt2.
    """
    B = range_basis(P)
    k = B.shape[1]
    out = []
    for i in range(k):
        out.append(rank_one(B[:, i]))
        for j in range(i + 1, k):
            out.append(rank_one(B[:, i] + B[:, j]))
            out.append(rank_one(B[:, i] + 1j * B[:, j]))
    return out


def xform_membership(spec: XFormSpec, P, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    P = np.asarray(P, dtype=complex)
    if P.shape != (spec.dim, spec.dim):
        raise DimensionMismatch(f"projection of shape {P.shape} against X-form of dim {spec.dim}")
    if not is_projection(P, ctx):
        return False
    for X in spec.X_list:
        PX = P @ X
        if opnorm(PX - X) > ctx.atol and opnorm(PX) > ctx.atol:
            return False
    return True


def xform_ideal_membership(spec: XFormSpec, P, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    """True iff P (a member of d) annihilates every X."""
    if not xform_membership(spec, P, ctx):
        raise NotInD("projection is not a member of the X-form set")
    return opnorm(np.asarray(P) @ spec.support) <= ctx.atol


@dataclass(frozen=True)
class DensityState:
    W: np.ndarray
    spectral: SpectralResolution
    null_index: int | None = None

    @property
    def dim(self) -> int:
        return self.W.shape[0]

    @property
    def null_projector(self) -> np.ndarray:
        """X0, the projector onto the null space of W (zero if W is invertible)."""
        if self.null_index is None:
            return zeros(self.dim)
        return self.spectral.projectors[self.null_index]

    @property
    def support(self) -> np.ndarray:
        return identity(self.dim) - self.null_projector

    def nonzero_spectrum(self) -> list:
        """(eigenvalue, projector) pairs for the non-zero eigenvalues of W."""
        return [(w, X) for i, (w, X) in enumerate(self.spectral) if i != self.null_index]


def make_density_state(W, ctx: ToleranceContext = DEFAULT_CTX) -> DensityState:
    """Validate a density operator and resolve its spectrum.

    Eigenvalues within ``eig_cluster_tol`` of zero form the null eigenspace X0.
    """
    try:
        W = as_operator(W)
    except ValueError as exc:
        raise NotDensityOperator(str(exc)) from exc
    if not is_self_adjoint(W, ctx):
        raise NotDensityOperator("W is not self-adjoint")
    tr = np.trace(W)
    if abs(tr - 1.0) > ctx.atol:
        raise NotDensityOperator(f"trace of W is {tr.real:.12g}, not 1")
    spec = spectral_resolution(W, ctx)
    if spec.eigenvalues[-1] < -ctx.atol:
        raise NotDensityOperator(f"W has negative eigenvalue {spec.eigenvalues[-1]:.3e}")
    null_index = None
    if abs(spec.eigenvalues[-1]) <= ctx.eig_cluster_tol:
        null_index = len(spec) - 1
    return DensityState(hermitize(W), spec, null_index)


def rule_orthodox(state: DensityState, ctx: ToleranceContext = DEFAULT_CTX) -> XFormSpec:
    """Single X: the support projection of W."""
    return XFormSpec((state.support,), ctx)


def rule_clifton(state: DensityState, ctx: ToleranceContext = DEFAULT_CTX) -> XFormSpec:
    """X list: the eigenprojectors of W for its non-zero eigenvalues."""
    return XFormSpec(tuple(X for _, X in state.nonzero_spectrum()), ctx)


def rule_kochen_dieks(state: DensityState, ctx: ToleranceContext = DEFAULT_CTX) -> XFormSpec:
    """X list: every eigenprojector of W, the null projector included."""
    return XFormSpec(tuple(state.spectral.projectors), ctx)


@dataclass(frozen=True)
class BubRuleInput:
    psi: np.ndarray
    R: np.ndarray

    @classmethod
    def build(cls, psi, R, ctx: ToleranceContext = DEFAULT_CTX) -> "BubRuleInput":
        psi = np.asarray(psi, dtype=complex).ravel()
        R = as_operator(R)
        if R.shape[0] != psi.shape[0]:
            raise DimensionMismatch("psi and R dimensions differ")
        if abs(np.linalg.norm(psi) - 1.0) > ctx.atol:
            raise ValueError(f"psi is not a unit vector (norm {np.linalg.norm(psi):.12g})")
        if not is_self_adjoint(R, ctx):
            raise ValueError("R is not self-adjoint")
        return cls(psi, R)

    def state(self, ctx: ToleranceContext = DEFAULT_CTX) -> DensityState:
        return make_density_state(np.outer(self.psi, self.psi.conj()), ctx)


def rule_bub(inp: BubRuleInput, ctx: ToleranceContext = DEFAULT_CTX) -> XFormSpec:
    """X list: lines through the non-zero components of psi in R's eigenspaces."""
    Xs = []
    for _, Rj in spectral_resolution(inp.R, ctx):
        v = Rj @ inp.psi
        if np.linalg.norm(v) > ctx.atol:
            Xs.append(rank_one(v))
    if not Xs:
        raise AllComponentsZero("psi has no non-zero component in any eigenspace of R")
    return XFormSpec(tuple(Xs), ctx)


def build_rule(rule: str, state: DensityState | None = None, bub: BubRuleInput | None = None,
               ctx: ToleranceContext = DEFAULT_CTX) -> XFormSpec:
    """Dispatch by rule name; the naive rule has no X-form and raises ``ValueError``."""
    if rule == "orthodox":
        return rule_orthodox(state, ctx)
    if rule == "clifton":
        return rule_clifton(state, ctx)
    if rule == "kochen-dieks":
        return rule_kochen_dieks(state, ctx)
    if rule == "bub":
        if bub is None:
            raise ValueError("Bub's rule needs psi and R")
        return rule_bub(bub, ctx)
    if rule == "naive":
        raise ValueError("the naive-realist set is not of X-form")
    raise ValueError(f"unknown rule {rule!r}")
