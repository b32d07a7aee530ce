"""Two-valued homomorphisms, functional valuations and the statistics measure."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .errors import (
    AtomNotResolved,
    IdealInvalid,
    IdealMismatch,
    MultipleOnes,
    NoOnes,
    NotCommuting,
    NotDisjoint,
    NotInD,
    NotInExtension,
    OracleDisagreement,
    SequenceNotConvergent,
    TooLarge,
)
from .lattice import FiniteLattice, join, leq, meet_exact
from .matrix_core import (
    DEFAULT_CTX,
    ToleranceContext,
    check_self_adjoint,
    commutator,
    hermitize,
    identity,
    opnorm,
    spectral_resolution,
)
from .rules import DensityState, XFormSpec

# Probability identities are finite sums of traces; only rounding error accrues.
PROB_TOL = 1e-9


# -- two-valued homomorphisms -------------------------------------------------

@dataclass(frozen=True)
class TwoValuedHomomorphism:
    """[x] = 1 if b <= x, 0 if b <= x⊥, for a fixed non-zero atom b."""

    atom: np.ndarray
    domain: object = None

    def __call__(self, P, ctx: ToleranceContext = DEFAULT_CTX) -> int:
        return homomorphism_eval(self, P, ctx)


def homomorphism_eval(h: TwoValuedHomomorphism, P, ctx: ToleranceContext = DEFAULT_CTX) -> int:
    b = h.atom
    if leq(b, P, ctx):
        return 1
    if leq(b, identity(b.shape[0]) - P, ctx):
        return 0
    raise AtomNotResolved("the atom lies neither below P nor below its complement")


@dataclass
class LawReport:
    passed: bool
    violations: list = field(default_factory=list)


def lattice_values(h, L: FiniteLattice, ctx: ToleranceContext = DEFAULT_CTX) -> list:
    if isinstance(h, TwoValuedHomomorphism):
        return [homomorphism_eval(h, E, ctx) for E in L.elements]
    return [int(v) for v in h]


def check_homomorphism_laws(h, L: FiniteLattice, ctx: ToleranceContext = DEFAULT_CTX) -> LawReport:
    """Exhaustively check [x⊥] = 1-[x], [x∧y] = [x][y], [x∨y] = [x]+[y]-[x][y].

    ``h`` is a :class:`TwoValuedHomomorphism` or a 0/1 value per element of L.
    Violations are reported as ``(law, i, j)`` index triples.
    """
    v = lattice_values(h, L, ctx)
    bad = []
    for x in range(len(L)):
        if v[L.comp[x]] != 1 - v[x]:
            bad.append(("complement", x, L.comp[x]))
    for x, y in product(range(len(L)), repeat=2):
        if v[L.meet(x, y)] != v[x] * v[y]:
            bad.append(("meet", x, y))
        if v[L.join(x, y)] != v[x] + v[y] - v[x] * v[y]:
            bad.append(("join", x, y))
    return LawReport(not bad, bad)


def enumerate_homomorphisms(L: FiniteLattice, bound: int = 20) -> list:
    """Every map L -> {0, 1} obeying the three homomorphism laws.

    Complete backtracking search with constraint propagation; a pruned
    branch always contains a law violation, so nothing is missed.
    """
    k = len(L)
    if k > bound:
        raise TooLarge(f"lattice has {k} elements, exhaustive bound is {bound}")
    found = []
    val = [-1] * k

    def assign(x, b, trail):
        stack = [(x, b)]
        while stack:
            x, b = stack.pop()
            if val[x] == b:
                continue
            if val[x] != -1:
                return False
            val[x] = b
            trail.append(x)
            stack.append((L.comp[x], 1 - b))
            for y in range(k):
                if val[y] == -1:
                    continue
                stack.append((L.meet(x, y), b * val[y]))
                stack.append((L.join(x, y), b + val[y] - b * val[y]))
        return True

    def search(start):
        x = next((i for i in range(start, k) if val[i] == -1), None)
        if x is None:
            found.append(tuple(val))
            return
        for b in (0, 1):
            trail: list = []
            if assign(x, b, trail):
                search(x + 1)
            for t in trail:
                val[t] = -1

    search(0)
    for v in found:
        if not check_homomorphism_laws(v, L).passed:
            raise OracleDisagreement("search produced a map that violates the laws")
    return found


@dataclass
class QuasiBooleanResult:
    is_quasiboolean: bool
    atom_set: list | None
    by_characterization: bool
    by_enumeration: bool
    unreached: list
    homomorphism_count: int


def _characterization_route(L: FiniteLattice, ideal) -> list | None:
    """Search for a mutually orthogonal A ∌ 0 with every a resolving every y and I = (∨A)⊥↓."""
    k = len(L)
    bot = L.bottom
    m = bot
    for x in ideal:
        m = L.join(m, x)
    target = L.comp[m]
    resolving = [a for a in range(k) if a != bot
                 and all(L.leq(a, y) or L.leq(a, L.comp[y]) for y in range(k))]
    cands = [a for a in resolving if L.leq(a, target)]

    def search(i, chosen, acc):
        if chosen and acc == target:
            return list(chosen)
        for j in range(i, len(cands)):
            a = cands[j]
            if all(L.leq(a, L.comp[c]) for c in chosen):
                got = search(j + 1, chosen + [a], L.join(acc, a))
                if got is not None:
                    return got
        return None

    # a validated ideal of a finite lattice is the principal ideal of its join m,
    # so I = (∨A)⊥↓ reduces to ∨A = m⊥
    return search(0, [], bot)


def check_quasiboolean(L: FiniteLattice, ideal, ctx: ToleranceContext = DEFAULT_CTX, bound: int = 20) -> QuasiBooleanResult:
    """Decide I-quasiBooleanness two ways and insist they agree.

    Characterization route: a non-empty orthogonal family A, each member
    lying below y or below y⊥ for every y, with I the principal ideal of
    (∨A)⊥.  Definition route: every x outside I is sent to 1 by some
    enumerated homomorphism.
    """
    ideal = frozenset(int(i) for i in ideal)
    if not L.is_ideal(ideal):
        raise IdealInvalid("subset is not an ideal (downward closed, join closed, without 1)")
    A = _characterization_route(L, ideal)
    homs = enumerate_homomorphisms(L, bound)
    unreached = [x for x in range(len(L)) if x not in ideal and not any(h[x] == 1 for h in homs)]
    by_char = A is not None
    by_enum = not unreached
    if by_char != by_enum:
        raise OracleDisagreement(f"characterization says {by_char}, enumeration says {by_enum}")
    return QuasiBooleanResult(by_char, A, by_char, by_enum, unreached, len(homs))


def ideal_where(L: FiniteLattice, predicate) -> frozenset:
    return frozenset(i for i, E in enumerate(L.elements) if predicate(E))


# -- functional valuations ----------------------------------------------------

@dataclass(frozen=True)
class FunctionalValuation:
    """<Q> = the eigenvalue of Q whose eigenprojector contains the selector Y."""

    selector: np.ndarray
    spec: XFormSpec

    def __post_init__(self):
        if not any(opnorm(self.selector - X) <= self.spec.ctx.atol for X in self.spec.X_list):
            raise ValueError("selector must be a member of the X list")

    def __call__(self, Q, ctx: ToleranceContext = DEFAULT_CTX) -> float:
        return valuation_eval(self, Q, ctx)


def valuation_eval(v: FunctionalValuation, Q, ctx: ToleranceContext = DEFAULT_CTX) -> float:
    Q = check_self_adjoint(Q, ctx)
    res = spectral_resolution(Q, ctx)
    Y = v.selector
    ones = []
    for lam, Qi in res:
        if not v.spec.contains(Qi, ctx):
            raise NotInExtension("a spectral projection of Q lies outside the definite set")
        if leq(Y, Qi, ctx):
            ones.append(lam)
    if not ones:
        raise NoOnes("no spectral projection of Q contains the selector")
    if len(ones) > 1:
        raise MultipleOnes("several spectral projections of Q contain the selector")
    return ones[0]


def valuations_of(spec: XFormSpec) -> list:
    return [FunctionalValuation(Y, spec) for Y in spec.X_list]


@dataclass
class FaithfulReport:
    passed: bool
    n_samples: int
    max_linearity_residual: float
    max_square_residual: float
    max_product_residual: float
    spectrum_ok: bool
    failures: list = field(default_factory=list)


def _in_spectrum(value, Q, tol) -> bool:
    return float(np.min(np.abs(np.linalg.eigvalsh(hermitize(Q)) - value))) <= tol


def check_faithful(v: FunctionalValuation, samples, ctx: ToleranceContext = DEFAULT_CTX) -> FaithfulReport:
    """Check <aQ+S> = a<Q>+<S>, <Q²> = <Q>², <½(QS+SQ)> = <Q><S> and spectrum membership.

    ``samples`` holds ``(Q, S, a)`` triples with a real.
    """
    tol = 10 * ctx.atol
    lin = sq = prod = 0.0
    spectrum_ok = True
    failures = []
    for k, (Q, S, a) in enumerate(samples):
        q, s = v(Q, ctx), v(S, ctx)
        scale = max(1.0, abs(a) * abs(q) + abs(s))
        r_lin = abs(v(hermitize(a * Q + S), ctx) - (a * q + s)) / scale
        r_sq = abs(v(hermitize(Q @ Q), ctx) - q * q) / max(1.0, q * q)
        r_prod = abs(v(hermitize(0.5 * (Q @ S + S @ Q)), ctx) - q * s) / max(1.0, abs(q * s))
        spec_ok = _in_spectrum(q, Q, tol * max(1.0, abs(q))) and _in_spectrum(s, S, tol * max(1.0, abs(s)))
        lin, sq, prod = max(lin, r_lin), max(sq, r_sq), max(prod, r_prod)
        spectrum_ok &= spec_ok
        if max(r_lin, r_sq, r_prod) > tol or not spec_ok:
            failures.append(k)
    return FaithfulReport(not failures, len(samples), lin, sq, prod, spectrum_ok, failures)


@dataclass
class RestrictionLawReport:
    passed: bool
    n_pairs: int
    failures: list = field(default_factory=list)


def check_restriction_laws(v: FunctionalValuation, projections, ctx: ToleranceContext = DEFAULT_CTX) -> RestrictionLawReport:
    """On projections of d the valuation obeys the two-valued homomorphism laws."""
    n = v.spec.dim
    I = identity(n)
    vals = [v(P, ctx) for P in projections]
    failures = []
    for i, (P, p) in enumerate(zip(projections, vals)):
        if abs(v(I - P, ctx) - (1 - p)) > PROB_TOL or min(abs(p), abs(p - 1)) > PROB_TOL:
            failures.append(("complement", i, i))
    for (i, P1), (j, P2) in combinations(enumerate(projections), 2):
        p1, p2 = vals[i], vals[j]
        if abs(v(meet_exact(P1, P2, ctx), ctx) - p1 * p2) > PROB_TOL:
            failures.append(("meet", i, j))
        if abs(v(join(P1, P2, ctx), ctx) - (p1 + p2 - p1 * p2)) > PROB_TOL:
            failures.append(("join", i, j))
    pairs = len(projections) * (len(projections) - 1) // 2
    return RestrictionLawReport(not failures, pairs, failures)


@dataclass
class FunctionalReport:
    passed: bool
    converged: bool
    iterations: int
    target_value: float
    values: list
    distances: list
    max_crosscheck_residual: float
    max_continuity_excess: float


def check_functional(v: FunctionalValuation, target, sequence, ctx: ToleranceContext = DEFAULT_CTX) -> FunctionalReport:
    """Continuity of the valuation along F_n -> F.

    Each step checks |<F_n> - <F>| <= ||F_n - F|| and, independently, that
    F_n Y = q_n Y with q_n = <F_n>.  Stops once ||F_n - F|| <= atol;
    otherwise the distances must still be shrinking at the cap.
    """
    F = check_self_adjoint(target, ctx)
    Y = v.selector
    trY = float(np.trace(Y).real)
    f = v(F, ctx)
    tol = 10 * ctx.atol
    values, dists = [], []
    cross = excess = 0.0
    converged = False
    for n in range(1, ctx.max_iter + 1):
        Fn = check_self_adjoint(sequence(n), ctx)
        fn = v(Fn, ctx)
        dist = float(np.linalg.norm(Fn - F, 2))
        qn = float(np.trace(Fn @ Y).real) / trY
        scale = max(1.0, abs(fn))
        cross = max(cross, opnorm(Fn @ Y - qn * Y) / scale, abs(qn - fn) / scale)
        excess = max(excess, abs(fn - f) - dist)
        values.append(fn)
        dists.append(dist)
        if dist <= ctx.atol:
            converged = True
            break
    if not converged:
        tail = dists[len(dists) * 3 // 4:]
        if not (dists[-1] < dists[0] and all(b <= a + ctx.atol for a, b in zip(tail, tail[1:]))):
            raise SequenceNotConvergent("operator sequence is not approaching the target")
    passed = cross <= tol and excess <= tol
    if converged:
        passed &= abs(values[-1] - f) <= tol * max(1.0, abs(f))
    return FunctionalReport(passed, converged, len(values), f, values, dists, cross, excess)


# -- statistics measure -------------------------------------------------------

@dataclass(frozen=True)
class IdealSpec:
    """Pairs an X-form set with a state for which PW = 0 iff P·ΣX = 0 on d.

    On an X-form set that equivalence holds exactly when ran(ΣX) contains
    the image of W, which is what construction checks.
    """

    spec: XFormSpec
    state: DensityState
    ctx: ToleranceContext = DEFAULT_CTX

    def __post_init__(self):
        outside = (identity(self.spec.dim) - self.spec.support) @ self.state.W
        if opnorm(outside) > self.ctx.atol:
            raise IdealMismatch(
                f"span of X misses part of W's image (residual {opnorm(outside):.3e})")


@dataclass(frozen=True)
class StatisticsMeasure:
    spec: XFormSpec
    state: DensityState
    weights: tuple

    @property
    def valuations(self) -> list:
        return valuations_of(self.spec)

    def total(self) -> float:
        return float(sum(self.weights))

    def measure_of(self, P, ctx: ToleranceContext = DEFAULT_CTX) -> float:
        """μ of the valuations sending the d-member P to 1."""
        if not self.spec.contains(P, ctx):
            raise NotInD("projection is not a member of the definite set")
        return float(sum(w for Y, w in zip(self.spec.X_list, self.weights) if leq(Y, P, ctx)))

    def probability(self, P) -> float:
        return float(np.trace(np.asarray(P) @ self.state.W).real)


def build_measure(spec: XFormSpec, state: DensityState, ctx: ToleranceContext = DEFAULT_CTX) -> StatisticsMeasure:
    """Atomic measure putting weight Tr(YW) on the valuation selected by Y."""
    IdealSpec(spec, state, ctx)
    weights = tuple(float(np.trace(Y @ state.W).real) for Y in spec.X_list)
    if min(weights) < -ctx.atol:
        raise IdealMismatch("negative weight; W is not positive on the X's")
    return StatisticsMeasure(spec, state, tuple(max(w, 0.0) for w in weights))


@dataclass
class StatisticsReport:
    passed: bool
    probability: float
    measure: float
    measure_via_joint: float
    difference: float


def _select_projector(A, selection, ctx):
    return spectral_resolution(A, ctx).projector_for(selection, ctx.eig_cluster_tol)


def verify_statistics(measure: StatisticsMeasure, family, selections, ctx: ToleranceContext = DEFAULT_CTX) -> StatisticsReport:
    """Compare Tr(P_α P_β ... W) with μ{<.> : <A> ∈ α, <B> ∈ β, ...}."""
    family = [check_self_adjoint(A, ctx) for A in family]
    if len(family) != len(selections):
        raise ValueError("one eigenvalue selection per observable is required")
    for A, B in combinations(family, 2):
        if opnorm(commutator(A, B)) > ctx.atol * max(1.0, opnorm(A) * opnorm(B)):
            raise NotCommuting("family members do not commute")
    spec = measure.spec
    for A in family:
        if not all(spec.contains(P, ctx) for P in spectral_resolution(A, ctx).projectors):
            raise NotInExtension("family member outside the extension of d")
    joint = identity(spec.dim)
    for A, sel in zip(family, selections):
        joint = joint @ _select_projector(A, sel, ctx)
    joint = hermitize(joint)
    prob = measure.probability(joint)
    mu = 0.0
    for v, w in zip(measure.valuations, measure.weights):
        if all(any(abs(v(A, ctx) - s) <= ctx.eig_cluster_tol for s in sel) for A, sel in zip(family, selections)):
            mu += w
    mu_joint = measure.measure_of(joint, ctx)
    diff = max(abs(prob - mu), abs(prob - mu_joint))
    return StatisticsReport(diff <= PROB_TOL, prob, mu, mu_joint, diff)


@dataclass
class AdditivityReport:
    passed: bool
    measure_of_join: float
    sum_of_measures: float
    operator_residual: float


def check_countable_additivity(measure: StatisticsMeasure, family, ctx: ToleranceContext = DEFAULT_CTX) -> AdditivityReport:
    """μ(S_{∨P_i}) = Σ μ(S_{P_i}) and (∨P_i)W = (ΣP_i)W for pairwise-disjoint members of d."""
    family = [np.asarray(P, dtype=complex) for P in family]
    spec = measure.spec
    for P in family:
        if not spec.contains(P, ctx):
            raise NotInD("family member is not in the definite set")
    for P, Q in combinations(family, 2):
        if opnorm(meet_exact(P, Q, ctx)) > ctx.atol:
            raise NotDisjoint("two family members have a non-zero meet")
    J = family[0]
    for P in family[1:]:
        J = join(J, P, ctx)
    lhs = measure.measure_of(J, ctx)
    rhs = sum(measure.measure_of(P, ctx) for P in family)
    W = measure.state.W
    resid = opnorm(J @ W - sum(family) @ W)
    return AdditivityReport(abs(lhs - rhs) <= PROB_TOL and resid <= ctx.atol, lhs, rhs, resid)
