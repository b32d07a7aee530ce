"""Executable no-go arguments and the matching positive construction."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import FiniteProjectionSet, double_commutant, star_closure_check
from .errors import CapExceeded, PairsNotDistinct, PreconditionViolated
from .lattice import generate_ortholattice, leq
from .matrix_core import (
    DEFAULT_CTX,
    SIGMA_X,
    SIGMA_Y,
    ToleranceContext,
    check_projection,
    commutator,
    identity,
    opnorm,
    rank,
    rank_one,
    spectral_resolution,
    zeros,
)
from .rules import BubRuleInput, DensityState, build_rule
from .sampling import adapted_basis, extension_element, random_projection, rng_for
from .valuations import (
    build_measure,
    check_countable_additivity,
    check_quasiboolean,
    enumerate_homomorphisms,
    ideal_where,
    verify_statistics,
)

# -- spin-1/2 ---------------------------------------------------------------

@dataclass
class SpinDemoResult:
    operators: dict
    assignments: list
    min_residual: float
    spectrum: tuple
    passed: bool


def von_neumann_spin_demo(ctx: ToleranceContext = DEFAULT_CTX) -> SpinDemoResult:
    """Try every ±1 assignment to σx, σy and (σx+σy)/√2 against linearity.

    Each assignment (a, b, c) is scored by |c - (a+b)/√2|; none can vanish.
    """
    C = (SIGMA_X + SIGMA_Y) / np.sqrt(2)
    rows = []
    for a, b, c in product((1, -1), repeat=3):
        rows.append({"a": a, "b": b, "c": c, "residual": abs(c - (a + b) / np.sqrt(2))})
    res = spectral_resolution(C, ctx)
    spectrum = tuple(res.eigenvalues)
    lo = min(r["residual"] for r in rows)
    spec_ok = len(spectrum) == 2 and abs(spectrum[0] - 1) <= ctx.atol and abs(spectrum[1] + 1) <= ctx.atol
    return SpinDemoResult(
        operators={"sigma_x": SIGMA_X, "sigma_y": SIGMA_Y, "diagonal": C},
        assignments=rows,
        min_residual=float(lo),
        spectrum=spectrum,
        passed=bool(spec_ok and lo > 0),
    )


# -- two dimensions ---------------------------------------------------------

def _rank_one_in_2d(P, name, ctx):
    P = check_projection(P, ctx)
    if P.shape != (2, 2) or rank(P) != 1:
        raise PreconditionViolated(f"{name} must be a rank-1 projection on a 2-dimensional space")
    return P


@dataclass
class ObstructionReport:
    resolving_P: list
    resolving_Q: list
    common: list
    lattice_size: int
    homomorphism_count: int
    quasiboolean_ideals: list
    sampled_lines: int
    passed: bool


def h2_quasiboolean_obstruction(P, Q, ctx: ToleranceContext = DEFAULT_CTX, samples: int = 64, seed: int = 0) -> ObstructionReport:
    """No non-zero projection lies in or orthogonal to each of two skew lines in C².

    ``passed`` means the obstruction was confirmed: no common resolving
    element, no homomorphism on the generated lattice, no ideal making it
    quasiBoolean.
    """
    P = _rank_one_in_2d(P, "P", ctx)
    Q = _rank_one_in_2d(Q, "Q", ctx)
    if opnorm(P - Q) <= ctx.atol:
        raise PreconditionViolated("P and Q are parallel")
    if opnorm(P @ Q) <= ctx.atol:
        raise PreconditionViolated("P and Q are orthogonal; the pair generates a Boolean algebra")
    L = generate_ortholattice([P, Q], ctx=ctx)
    I = identity(2)

    def resolves(a, x):
        return leq(a, x, ctx) or leq(a, I - x, ctx)

    nonzero = [i for i in range(len(L)) if i != L.bottom]
    res_P = [i for i in nonzero if resolves(L.elements[i], P)]
    res_Q = [i for i in nonzero if resolves(L.elements[i], Q)]
    common = sorted(set(res_P) & set(res_Q))
    # lines outside the lattice cannot help either
    rng = rng_for(seed, 4101)
    stray = 0
    for _ in range(samples):
        a = random_projection(2, rng, rank=1)
        stray += resolves(a, P) and resolves(a, Q)
    homs = enumerate_homomorphisms(L)
    qb = [sorted(J) for J in L.ideals() if check_quasiboolean(L, J, ctx).is_quasiboolean]
    passed = not common and stray == 0 and not homs and not qb
    return ObstructionReport(res_P, res_Q, common, len(L), len(homs), qb, samples, passed)


@dataclass
class CommutantCounterexample:
    elements: list
    double_commutant_dim: int
    witness: np.ndarray
    witness_in_double_commutant: bool
    witness_min_distance: float
    closure_report: object
    passed: bool


def h2_commutant_counterexample(pair1, pair2, ctx: ToleranceContext = DEFAULT_CTX, seed: int = 0) -> CommutantCounterexample:
    """The six-element lattice of two skew orthogonal pairs in C² is no restricted commutant.

    Its double commutant is all of M₂, so a line outside the six projections
    lies in the restriction of d'' but not in d.
    """
    pairs = []
    for k, pair in enumerate((pair1, pair2)):
        A, B = (_rank_one_in_2d(X, f"pair{k + 1}", ctx) for X in pair)
        if opnorm(A @ B) > ctx.atol:
            raise PreconditionViolated(f"pair{k + 1} is not orthogonal")
        pairs.append((A, B))
    (A1, _), (A2, B2) = pairs
    if opnorm(A1 - A2) <= ctx.atol or opnorm(A1 - B2) <= ctx.atol:
        raise PairsNotDistinct("the two pairs coincide")
    elements = [zeros(2), identity(2), *pairs[0], *pairs[1]]
    d = FiniteProjectionSet(tuple(elements))
    D2 = double_commutant(elements, ctx)
    witness = None
    for v in ([1, 2], [2, 1], [1, 3], [3, 1j]):
        cand = rank_one(v)
        if not d.contains(cand, ctx):
            witness = cand
            break
    dist = min(opnorm(witness - E) for E in elements)
    report = star_closure_check(d, ctx=ctx, seed=seed)
    inside = D2.contains(witness, ctx)
    passed = len(D2) == 4 and inside and dist > ctx.atol and not report.passed
    return CommutantCounterexample(elements, len(D2), witness, inside, float(dist), report, passed)


# -- positive construction --------------------------------------------------

@dataclass
class PositiveDemoReport:
    rule: str
    x_ranks: list
    closure: object
    lattice_size: int
    quasiboolean: object
    weights: tuple
    statistics_checks: int
    max_statistics_difference: float
    additivity: list
    incompatible_pair: tuple | None
    passed: bool
    notes: list = field(default_factory=list)


def finite_sublattice(spec, ctx, bound=20):
    """Finite sublattice generated by the X's, plus a skew pair in the complement when it fits."""
    gens = list(spec.X_list)
    blocks, comp = adapted_basis(list(spec.X_list), rng_for(0, 0))
    if comp.shape[1] >= 2:
        p = rank_one(comp[:, 0])
        q = rank_one(comp[:, 0] + comp[:, 1])
        try:
            return generate_ortholattice(gens + [p, q], cap=bound, ctx=ctx)
        except CapExceeded:
            pass
    return generate_ortholattice(gens, cap=max(bound, 2 ** (len(gens) + 1)), ctx=ctx)


def random_selection(A, rng, ctx):
    vals = list(spectral_resolution(A, ctx).eigenvalues)
    k = int(rng.integers(1, len(vals) + 1))
    return set(float(v) for v in rng.choice(vals, size=k, replace=False))


def commuting_family(spec, size, rng, ctx: ToleranceContext = DEFAULT_CTX) -> list:
    """``size`` operators in the extension of d, diagonal in one shared adapted basis."""
    basis = adapted_basis(list(spec.X_list), rng)
    pool = [-2.0, -1.0, 0.0, 1.0, 2.5]
    return [extension_element(list(spec.X_list), rng, values=pool, basis=basis) for _ in range(size)]


def disjoint_family(spec, rng) -> list:
    """Orthogonal members of d obtained by randomly grouping the X's and complement lines."""
    blocks, comp = adapted_basis(list(spec.X_list), rng)
    pieces = list(spec.X_list) + [rank_one(comp[:, j]) for j in range(comp.shape[1])]
    groups = int(rng.integers(1, len(pieces) + 1))
    out = [zeros(spec.dim) for _ in range(groups)]
    for piece in pieces:
        g = int(rng.integers(groups))
        out[g] = out[g] + piece
    return [P for P in out if opnorm(P) > 0.5]


def positive_existence_demo(state: DensityState, rule: str, observable_count: int = 50, seed: int = 0,
                            ctx: ToleranceContext = DEFAULT_CTX, bub: BubRuleInput | None = None,
                            sample_budget: int = 200) -> PositiveDemoReport:
    """Run closure, quasiBoolean, statistics and additivity checks for one rule and state."""
    if observable_count < 1:
        raise ValueError("observable_count must be positive")
    spec = build_rule(rule, state, bub, ctx)
    closure = star_closure_check(spec, sample_budget=sample_budget, ctx=ctx, seed=seed)
    L = finite_sublattice(spec, ctx)
    W = state.W
    ideal = ideal_where(L, lambda E: opnorm(E @ W) <= ctx.atol)
    qb = check_quasiboolean(L, ideal, ctx)
    measure = build_measure(spec, state, ctx)

    rng = rng_for(seed, 5201)
    worst = 0.0
    stat_ok = True
    checks = 0
    for _ in range(observable_count):
        fam = commuting_family(spec, 3, rng, ctx)
        for size in (1, 2, 3):
            sub = fam[:size]
            rep = verify_statistics(measure, sub, [random_selection(A, rng, ctx) for A in sub], ctx)
            worst = max(worst, rep.difference)
            stat_ok &= rep.passed
            checks += 1

    rng = rng_for(seed, 5202)
    additivity = [check_countable_additivity(measure, disjoint_family(spec, rng), ctx) for _ in range(10)]

    notes = []
    pair = None
    comp = identity(spec.dim) - spec.support
    if rank(comp) >= 2:
        _, cb = adapted_basis(list(spec.X_list), rng_for(seed, 5203))
        p, q = rank_one(cb[:, 0]), rank_one(cb[:, 0] + cb[:, 1])
        if spec.contains(p, ctx) and spec.contains(q, ctx) and opnorm(commutator(p, q)) > ctx.atol:
            pair = (p, q)
    else:
        notes.append("complement of the X's is at most one-dimensional; no incompatible pair inside d")

    passed = (closure.passed and qb.is_quasiboolean and stat_ok
              and all(a.passed for a in additivity)
              and abs(measure.total() - 1.0) <= ctx.atol * len(spec))
    return PositiveDemoReport(
        rule=rule,
        x_ranks=[rank(X) for X in spec.X_list],
        closure=closure,
        lattice_size=len(L),
        quasiboolean=qb,
        weights=measure.weights,
        statistics_checks=checks,
        max_statistics_difference=worst,
        additivity=additivity,
        incompatible_pair=pair,
        passed=bool(passed),
        notes=notes,
    )
