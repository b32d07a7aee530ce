"""Ortholattice operations on projections and finite sublattices of L(H)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .errors import CapExceeded, ChainNotStrict, NoConvergence, NotALattice
from .matrix_core import (
    DEFAULT_CTX,
    ToleranceContext,
    as_operator,
    hermitize,
    identity,
    is_projection,
    norm_limit,
    nullspace,
    opnorm,
    rank,
    same_dim,
    spectral_resolution,
    zeros,
)


def leq(P, Q, ctx: ToleranceContext = DEFAULT_CTX) -> bool:
    """ran(P) is contained in ran(Q)."""
    same_dim(P, Q)
    return opnorm(Q @ P - P) <= ctx.atol


def complement(P) -> np.ndarray:
    return identity(P.shape[0]) - P


def meet_exact(P, Q, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """Projection onto ran(P) ∩ ran(Q), read off the kernel of (I-P) + (I-Q)."""
    n = same_dim(P, Q)
    I = identity(n)
    K = nullspace((I - P) + (I - Q), ctx)
    return hermitize(K @ K.conj().T)


def join(P, Q, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """Projection onto the span of ran(P) and ran(Q), via de Morgan."""
    n = same_dim(P, Q)
    I = identity(n)
    return I - meet_exact(I - P, I - Q, ctx)


def _contraction_rate(S, ctx):
    # largest |eigenvalue| of S off its eigenvalue-1 eigenspace
    w = np.linalg.eigvalsh(hermitize(S))
    off = np.abs(w[np.abs(w - 1.0) > ctx.eig_cluster_tol])
    return float(off.max()) if off.size else 0.0


def meet_iterative(P, Q, ctx: ToleranceContext = DEFAULT_CTX) -> np.ndarray:
    """P ∧ Q as the norm limit of (½(PQ + QP))**n.

    Raises :class:`NoConvergence` when ``max_iter`` powers do not settle; the
    exception carries the contraction rate r of the symmetrised product off
    the meet, since the error after n steps decays like r**n.
    """
    same_dim(P, Q)
    S = hermitize(0.5 * (P @ Q + Q @ P))
    powers = [S]

    def seq(n):
        while len(powers) < n:
            powers.append(powers[-1] @ S)
        return powers[n - 1]

    # ||G_n - G_inf|| <= r/(1-r) ||G_n - G_{n-1}||, so tighten the step test
    # by (1 - r) to keep the final error below atol
    r = _contraction_rate(S, ctx)
    step_tol = ctx.atol * (1.0 - r) if r < 1 else ctx.atol
    res = norm_limit(seq, replace(ctx, atol=step_tol))
    if not res.converged:
        needed = math.ceil(math.log(step_tol) / math.log(r)) if 0 < r < 1 else None
        raise NoConvergence(
            f"powers of the symmetrised product did not settle in {ctx.max_iter} steps: "
            f"contraction rate {r:.6f} needs about {needed} steps",
            last=hermitize(res.operator), iterations=res.iterations, spectral_radius=r,
        )
    return hermitize(res.operator)


class _ElementIndex:
    """Near-duplicate detection for projections in operator norm."""

    def __init__(self, n, ctx):
        self.ctx = ctx
        self.n = n
        self.items: list = []
        self._stack = np.zeros((0, n, n), dtype=complex)

    def find(self, P):
        if not self.items:
            return None
        frob = np.linalg.norm(self._stack - P, axis=(1, 2))
        for i in np.flatnonzero(frob <= math.sqrt(self.n) * self.ctx.atol):
            if opnorm(self.items[i] - P) <= self.ctx.atol:
                return int(i)
        return None

    def add(self, P):
        self.items.append(P)
        self._stack = np.concatenate([self._stack, P[None]], axis=0)
        return len(self.items) - 1


@dataclass
class FiniteLattice:
    """A finite set of projections closed under ⊥, ∧ and ∨.

    Operations are tabulated over element indices.  Build with
    :meth:`from_elements` (validates closure) or :func:`generate_ortholattice`.
    """

    elements: list
    comp: list
    meet_table: np.ndarray
    join_table: np.ndarray
    leq_table: np.ndarray
    ctx: ToleranceContext = field(default=DEFAULT_CTX, repr=False)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    @property
    def bottom(self) -> int:
        return self._find(zeros(self.dim))

    @property
    def top(self) -> int:
        return self._find(identity(self.dim))

    def _find(self, P):
        for i, E in enumerate(self.elements):
            if opnorm(E - P) <= self.ctx.atol:
                return i
        return None

    def index_of(self, P) -> int:
        i = self._find(np.asarray(P, dtype=complex))
        if i is None:
            raise KeyError("projection is not an element of the lattice")
        return i

    def meet(self, i, j) -> int:
        return int(self.meet_table[i, j])

    def join(self, i, j) -> int:
        return int(self.join_table[i, j])

    def leq(self, i, j) -> bool:
        return bool(self.leq_table[i, j])

    def principal_ideal(self, m) -> frozenset:
        return frozenset(i for i in range(len(self)) if self.leq_table[i, m])

    def ideals(self) -> list:
        """All ideals; in a finite lattice each one is principal, generated by its join."""
        return [self.principal_ideal(m) for m in range(len(self)) if m != self.top]

    def is_ideal(self, ideal) -> bool:
        I = set(ideal)
        if not I or self.top in I:
            return False
        for x in I:
            if any(self.leq_table[y, x] and y not in I for y in range(len(self))):
                return False
            if any(self.join(x, y) not in I for y in I):
                return False
        return True

    @classmethod
    def from_elements(cls, elements, ctx: ToleranceContext = DEFAULT_CTX) -> "FiniteLattice":
        els = [hermitize(as_operator(E)) for E in elements]
        if not els:
            raise NotALattice("empty element list")
        n = same_dim(*els)
        idx = _ElementIndex(n, ctx)
        for k, E in enumerate(els):
            if not is_projection(E, ctx):
                raise NotALattice(f"element {k} is not a projection")
            if idx.find(E) is not None:
                raise NotALattice(f"element {k} duplicates an earlier element")
            idx.add(E)

        def need(P, what):
            i = idx.find(P)
            if i is None:
                raise NotALattice(f"not closed under {what}")
            return i

        need(zeros(n), "bottom (0 missing)")
        need(identity(n), "top (I missing)")
        comp = [need(complement(E), "orthocomplement") for E in els]
        k = len(els)
        M = np.zeros((k, k), dtype=int)
        J = np.zeros((k, k), dtype=int)
        for i in range(k):
            for j in range(i, k):
                M[i, j] = M[j, i] = need(meet_exact(els[i], els[j], ctx), "meet")
                J[i, j] = J[j, i] = need(join(els[i], els[j], ctx), "join")
        return cls(els, comp, M, J, _leq_table(els, ctx), ctx)


def _leq_table(els, ctx):
    k = len(els)
    T = np.zeros((k, k), dtype=bool)
    for i, j in product(range(k), repeat=2):
        T[i, j] = opnorm(els[j] @ els[i] - els[i]) <= ctx.atol
    return T


def generate_ortholattice(generators, cap: int = 512, ctx: ToleranceContext = DEFAULT_CTX) -> FiniteLattice:
    """Close generators ∪ {0, I} under ⊥, ∧, ∨.

    Raises :class:`CapExceeded` once more than ``cap`` distinct elements
    appear, which for generic projections signals an infinite lattice.
    """
    gens = [hermitize(as_operator(G)) for G in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    n = same_dim(*gens)
    idx = _ElementIndex(n, ctx)
    comp: dict = {}
    meets: dict = {}
    joins: dict = {}

    def add(P):
        i = idx.find(P)
        if i is None:
            if len(idx.items) >= cap:
                raise CapExceeded(f"more than {cap} elements generated")
            i = idx.add(P)
        return i

    for P in [zeros(n), identity(n), *gens]:
        add(P)
    done = 0
    while done < len(idx.items):
        k = len(idx.items)
        for i in range(done, k):
            comp[i] = add(complement(idx.items[i]))
        # new elements are paired with everything seen so far
        for j in range(done, k):
            for i in range(j + 1):
                meets[(i, j)] = add(meet_exact(idx.items[i], idx.items[j], ctx))
                joins[(i, j)] = add(join(idx.items[i], idx.items[j], ctx))
        done = k
    els = idx.items
    k = len(els)
    M = np.zeros((k, k), dtype=int)
    J = np.zeros((k, k), dtype=int)
    for (i, j), m in meets.items():
        M[i, j] = M[j, i] = m
        J[i, j] = J[j, i] = joins[(i, j)]
    return FiniteLattice(els, [comp[i] for i in range(k)], M, J, _leq_table(els, ctx), ctx)


def check_ortholattice_axioms(L: FiniteLattice) -> bool:
    """x ∨ x⊥ = 1, x ∧ x⊥ = 0, order reversal and involution of ⊥."""
    top, bot = L.top, L.bottom
    for x in range(len(L)):
        cx = L.comp[x]
        if L.join(x, cx) != top or L.meet(x, cx) != bot or L.comp[cx] != x:
            return False
        for y in range(len(L)):
            if L.leq(x, y) and not L.leq(L.comp[y], cx):
                return False
    return True


def check_orthomodular(L: FiniteLattice) -> bool:
    """x ≤ y implies y = x ∨ (y ∧ x⊥), over all ordered pairs."""
    for x, y in product(range(len(L)), repeat=2):
        if L.leq(x, y) and L.join(x, L.meet(y, L.comp[x])) != y:
            return False
    return True


def check_boolean(L: FiniteLattice) -> bool:
    """Distributivity x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z) over all triples."""
    k = len(L)
    for x, y, z in product(range(k), repeat=3):
        if L.meet(x, L.join(y, z)) != L.join(L.meet(x, y), L.meet(x, z)):
            return False
    return True


def atoms(L: FiniteLattice) -> list:
    """Indices of the minimal non-zero elements."""
    bot = L.bottom
    out = []
    for x in range(len(L)):
        if x == bot:
            continue
        if not any(y != bot and y != x and L.leq(y, x) for y in range(len(L))):
            out.append(x)
    return out


def join_of_atoms_below(L: FiniteLattice, y: int) -> int:
    acc = L.bottom
    for a in atoms(L):
        if L.leq(a, y):
            acc = L.join(acc, a)
    return acc


@dataclass
class ChainDemoResult:
    chain: list
    differences: list
    tail: np.ndarray
    top_complement: np.ndarray
    truncation: int
    operator: np.ndarray
    spectrum: list
    multiplicities: list
    completeness_residual: float
    expected_spectrum: list


def atomicity_demo(chain, N: int | None = None, ctx: ToleranceContext = DEFAULT_CTX) -> ChainDemoResult:
    """Finite truncation of the accumulating-spectrum construction.

    From a strictly decreasing chain P_1 > P_2 > ... > P_k build
    M_n = P_n - P_{n+1}, the tail P_k and the operator
    Q_N = P_1⊥ + sum_{n<=N} e**-n M_n.  ``N`` defaults to k - 1.
    """
    Ps = [hermitize(as_operator(P)) for P in chain]
    if len(Ps) < 2:
        raise ChainNotStrict("a chain needs at least two projections")
    n = same_dim(*Ps)
    for i, (A, B) in enumerate(zip(Ps, Ps[1:])):
        if not (is_projection(A, ctx) and is_projection(B, ctx)):
            raise ChainNotStrict(f"chain element {i} is not a projection")
        if not leq(B, A, ctx) or opnorm(A - B) <= ctx.atol:
            raise ChainNotStrict(f"P_{i + 2} is not strictly below P_{i + 1}")
    if N is None:
        N = len(Ps) - 1
    if not 1 <= N <= len(Ps) - 1:
        raise ValueError(f"truncation N must lie in 1..{len(Ps) - 1}")
    Ms = [Ps[i] - Ps[i + 1] for i in range(len(Ps) - 1)]
    tail = Ps[-1]
    top_c = identity(n) - Ps[0]
    Q = top_c + sum(math.exp(-(i + 1)) * Ms[i] for i in range(N))
    residual = opnorm(sum(Ms) + tail + top_c - identity(n))
    res = spectral_resolution(hermitize(Q), ctx)
    expected = ([1.0] if rank(top_c) else []) + [math.exp(-(i + 1)) for i in range(N)]
    if rank(tail) or N < len(Ms):
        expected.append(0.0)
    return ChainDemoResult(
        chain=Ps, differences=Ms, tail=tail, top_complement=top_c, truncation=N,
        operator=Q, spectrum=list(res.eigenvalues), multiplicities=res.ranks(),
        completeness_residual=residual, expected_spectrum=expected,
    )
