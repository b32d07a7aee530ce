import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from modalalg.errors import CapExceeded, ChainNotStrict, DimensionMismatch, NoConvergence, NotALattice
from modalalg.lattice import (
    FiniteLattice,
    atomicity_demo,
    atoms,
    check_boolean,
    check_orthomodular,
    check_ortholattice_axioms,
    generate_ortholattice,
    join,
    join_of_atoms_below,
    leq,
    meet_exact,
    meet_iterative,
)
from modalalg.matrix_core import (
    ToleranceContext,
    coordinate_projector,
    identity,
    is_projection,
    opnorm,
    rank_one,
    zeros,
)
from modalalg.sampling import random_projection, rng_for

E = coordinate_projector


def oracle_meet(P, Q):
    # intersect the ranges directly: x = Bp a = Bq b
    Bp = scipy.linalg.orth(P, rcond=1e-8)
    Bq = scipy.linalg.orth(Q, rcond=1e-8)
    n = P.shape[0]
    if Bp.shape[1] == 0 or Bq.shape[1] == 0:
        return np.zeros((n, n))
    K = scipy.linalg.null_space(np.hstack([Bp, -Bq]), rcond=1e-8)
    if K.shape[1] == 0:
        return np.zeros((n, n))
    V = scipy.linalg.orth(Bp @ K[: Bp.shape[1]])
    return V @ V.conj().T


def h2_pairs():
    P, Q = E([0], 2), rank_one([1, 1])
    return P, Q


def test_leq_examples():
    assert leq(zeros(3), random_projection(3, rng_for(0)))
    assert leq(E([0], 3), E([0, 1], 3))
    assert not leq(rank_one([1, 1]), E([0], 2))
    with pytest.raises(DimensionMismatch):
        leq(E([0], 2), E([0], 3))


def test_meet_exact_examples():
    P = random_projection(4, rng_for(1), rank=2)
    assert opnorm(meet_exact(P, P) - P) < 1e-10
    assert opnorm(meet_exact(P, identity(4) - P)) < 1e-10
    assert opnorm(meet_exact(*h2_pairs())) < 1e-10


def test_join_examples():
    P = random_projection(3, rng_for(2), rank=1)
    assert opnorm(join(P, zeros(3)) - P) < 1e-10
    assert opnorm(join(P, identity(3) - P) - identity(3)) < 1e-10
    a, b = rank_one([1, 1j, 0]), rank_one([1, -1j, 1])
    assert opnorm(a @ b) < 1e-12
    assert opnorm(join(a, b) - (a + b)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(2, 5))
def test_meet_join_against_range_oracle(seed, n):
    rng = rng_for(seed)
    # share a random subspace so that meets are often non-zero
    common = random_projection(n, rng, rank=int(rng.integers(0, n)))
    P = join(common, random_projection(n, rng))
    Q = join(common, random_projection(n, rng))
    M = meet_exact(P, Q)
    assert is_projection(M) and is_projection(join(P, Q))
    assert opnorm(M - oracle_meet(P, Q)) < 1e-8
    I = identity(n)
    assert opnorm(M - (I - join(I - P, I - Q))) < 1e-10
    assert leq(M, P) and leq(M, Q) and leq(P, join(P, Q)) and leq(Q, join(P, Q))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(2, 5))
def test_leq_antisymmetry(seed, n):
    rng = rng_for(seed)
    P = random_projection(n, rng)
    Q = P + 1e-13 * (np.eye(n) - P)
    if leq(P, Q) and leq(Q, P):
        assert opnorm(P - Q) <= 1e-9


def test_meet_iterative_commuting_gives_product():
    P, Q = E([0, 1], 3), E([1, 2], 3)
    assert opnorm(meet_iterative(P, Q) - P @ Q) <= 1e-10


def test_meet_iterative_45_degrees_is_zero():
    assert opnorm(meet_iterative(*h2_pairs())) <= 1e-9


def test_meet_iterative_self():
    P = random_projection(3, rng_for(5), rank=2)
    assert opnorm(meet_iterative(P, P) - P) <= 1e-9


def test_meet_iterative_small_angle_reports_rate():
    t = 0.05
    P, Q = E([0], 2), rank_one([math.cos(t), math.sin(t)])
    with pytest.raises(NoConvergence) as info:
        meet_iterative(P, Q)
    c = math.cos(t)
    # the symmetrised product restricted to span{P, Q} has eigenvalues c(c ± 1)/2
    assert info.value.spectral_radius == pytest.approx(c * (1 + c) / 2, rel=1e-9)
    assert info.value.iterations == 200
    ok = meet_iterative(P, Q, ToleranceContext(max_iter=20000))
    assert opnorm(ok) <= 1e-8


def test_generate_examples():
    L = generate_ortholattice([E([0], 2)])
    assert len(L) == 4
    L6 = generate_ortholattice(list(h2_pairs()))
    assert len(L6) == 6
    L8 = generate_ortholattice([E([0], 3), E([1], 3)])
    assert len(L8) == 8 and check_boolean(L8)


def test_generate_cap():
    rng = rng_for(3)
    lines = [random_projection(3, rng, rank=1) for _ in range(3)]
    with pytest.raises(CapExceeded):
        generate_ortholattice(lines, cap=64)


def test_from_elements_validation():
    P, Q = h2_pairs()
    I, O = identity(2), zeros(2)
    L = FiniteLattice.from_elements([O, I, P, I - P, Q, I - Q])
    assert len(L) == 6
    with pytest.raises(NotALattice):
        FiniteLattice.from_elements([O, I, P, Q, I - Q])
    with pytest.raises(NotALattice):
        FiniteLattice.from_elements([O, I, P, I - P, P])


def test_structure_checks():
    L6 = generate_ortholattice(list(h2_pairs()))
    assert check_orthomodular(L6)
    assert not check_boolean(L6)
    assert check_ortholattice_axioms(L6)
    assert len(atoms(L6)) == 4
    L2 = generate_ortholattice([identity(3)])
    assert len(L2) == 2 and check_boolean(L2)
    assert [L2.elements[a] for a in atoms(L2)][0].trace().real == pytest.approx(3)
    L4 = generate_ortholattice([E([0], 2)])
    got = sorted(round(L4.elements[a][0, 0].real) for a in atoms(L4))
    assert got == [0, 1]


def test_every_element_is_join_of_atoms_below():
    rng = rng_for(9)
    P, Q = random_projection(2, rng, rank=1), random_projection(2, rng, rank=1)
    for L in (generate_ortholattice([P, Q]), generate_ortholattice([E([0], 3), E([1, 2], 3)])):
        for y in range(len(L)):
            assert join_of_atoms_below(L, y) == y


def test_ideals_are_principal():
    L = generate_ortholattice([E([0], 3), E([1], 3)])
    ideals = L.ideals()
    assert len(ideals) == 7
    assert all(L.is_ideal(J) for J in ideals)
    assert not L.is_ideal({L.top})
    assert not L.is_ideal({L.index_of(E([0], 3))})


def test_atomicity_demo_example():
    chain = [E([0, 1, 2], 4), E([0, 1], 4), E([0], 4)]
    r = atomicity_demo(chain, N=2)
    assert r.completeness_residual <= 1e-10
    expected = [1.0, math.exp(-1), math.exp(-2), 0.0]
    assert np.allclose(r.spectrum, expected, atol=1e-10)
    assert r.multiplicities == [1, 1, 1, 1]
    assert r.expected_spectrum == pytest.approx(expected)


def test_atomicity_demo_length_two():
    r = atomicity_demo([identity(2), E([0], 2)])
    assert np.allclose(r.spectrum, [math.exp(-1), 0.0])
    r = atomicity_demo([E([0], 2), zeros(2)])
    assert np.allclose(r.spectrum, [1.0, math.exp(-1)])


def test_atomicity_demo_rejects_non_strict_chains():
    with pytest.raises(ChainNotStrict):
        atomicity_demo([E([0], 2), E([0], 2)])
    with pytest.raises(ChainNotStrict):
        atomicity_demo([E([0], 2), E([1], 2)])
    with pytest.raises(ChainNotStrict):
        atomicity_demo([E([0], 2)])
