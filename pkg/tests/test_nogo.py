import math

import numpy as np
import pytest

from modalalg.errors import PairsNotDistinct, PreconditionViolated
from modalalg.matrix_core import coordinate_projector as E, identity, opnorm, rank_one
from modalalg.nogo import (
    h2_commutant_counterexample,
    h2_quasiboolean_obstruction,
    positive_existence_demo,
    von_neumann_spin_demo,
)
from modalalg.rules import BubRuleInput, make_density_state


def test_spin_demo():
    r = von_neumann_spin_demo()
    assert len(r.assignments) == 8
    assert r.min_residual == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
    assert r.spectrum == pytest.approx((1.0, -1.0), abs=1e-10)
    assert r.passed
    by_key = {(a["a"], a["b"], a["c"]): a["residual"] for a in r.assignments}
    assert by_key[(1, 1, 1)] == pytest.approx(math.sqrt(2) - 1)
    assert by_key[(1, -1, 1)] == pytest.approx(1)
    assert by_key[(1, -1, -1)] == pytest.approx(1)


def test_h2_obstruction_confirmed():
    r = h2_quasiboolean_obstruction(E([0], 2), rank_one([1, 1]))
    assert r.passed
    assert r.lattice_size == 6 and r.homomorphism_count == 0
    assert not r.common and len(r.resolving_P) == 2 and len(r.resolving_Q) == 2


def test_h2_obstruction_preconditions():
    with pytest.raises(PreconditionViolated):
        h2_quasiboolean_obstruction(E([0], 2), E([0], 2))
    with pytest.raises(PreconditionViolated):
        h2_quasiboolean_obstruction(E([0], 2), E([1], 2))
    with pytest.raises(PreconditionViolated):
        h2_quasiboolean_obstruction(E([0], 3), E([1], 3))


def test_h2_commutant_counterexample():
    r = h2_commutant_counterexample((E([0], 2), E([1], 2)), (rank_one([1, 1]), rank_one([1, -1])))
    assert r.passed and r.double_commutant_dim == 4
    assert opnorm(r.witness - rank_one([1, 2])) < 1e-12
    assert r.witness_min_distance > 1e-10
    assert not r.closure_report.passed


def test_h2_commutant_identical_pairs():
    pair = (E([0], 2), E([1], 2))
    with pytest.raises(PairsNotDistinct):
        h2_commutant_counterexample(pair, pair)
    with pytest.raises(PairsNotDistinct):
        h2_commutant_counterexample(pair, pair[::-1])


@pytest.mark.parametrize("W,rule,incompatible", [
    (np.diag([0.5, 0.3, 0.2, 0]), "clifton", False),
    (np.diag([0.6, 0.4, 0, 0]), "clifton", True),
    (np.diag([1.0, 0, 0]), "orthodox", True),
    (np.diag([0.7, 0.3]), "kochen-dieks", False),
    (np.diag([0.5, 0.5, 0]), "kochen-dieks", False),
])
def test_positive_existence(W, rule, incompatible):
    r = positive_existence_demo(make_density_state(W), rule, observable_count=10)
    assert r.passed
    assert (r.incompatible_pair is not None) == incompatible
    if incompatible:
        p, q = r.incompatible_pair
        assert opnorm(p @ q - q @ p) > 1e-3


def test_positive_existence_bub():
    inp = BubRuleInput.build(np.array([1, 1, 1j]) / math.sqrt(3), np.diag([1.0, 1.0, 2.0]))
    r = positive_existence_demo(inp.state(), "bub", observable_count=10, bub=inp)
    assert r.passed and r.x_ranks == [1, 1]
    assert sum(r.weights) == pytest.approx(1)


def test_positive_existence_dim2_has_no_incompatibility():
    r = positive_existence_demo(make_density_state(identity(2) * 0.5), "clifton", observable_count=5)
    assert r.passed and r.incompatible_pair is None and r.notes
