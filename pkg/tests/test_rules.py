import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modalalg.errors import DimensionMismatch, InvalidXForm, NotDensityOperator, NotInD
from modalalg.lattice import check_boolean, generate_ortholattice
from modalalg.matrix_core import SIGMA_Z, coordinate_projector, identity, opnorm
from modalalg.rules import (
    BubRuleInput,
    XFormSpec,
    build_rule,
    make_density_state,
    rule_bub,
    rule_clifton,
    rule_kochen_dieks,
    rule_orthodox,
    xform_ideal_membership,
    xform_membership,
)
from modalalg.sampling import random_density, random_projection, rng_for, xform_member

E = coordinate_projector


def same_family(spec, expected):
    assert len(spec) == len(expected)
    for X in expected:
        assert any(opnorm(X - Y) < 1e-9 for Y in spec.X_list)


def test_make_density_state_examples():
    s = make_density_state(np.diag([0.7, 0.3]))
    assert s.spectral.eigenvalues == pytest.approx((0.7, 0.3))
    assert opnorm(s.null_projector) == 0
    s = make_density_state(np.diag([0.5, 0.5, 0]))
    assert len(s.spectral) == 2
    assert opnorm(s.spectral.projectors[0] - E([0, 1], 3)) < 1e-12
    assert opnorm(s.null_projector - E([2], 3)) < 1e-12
    with pytest.raises(NotDensityOperator):
        make_density_state(np.diag([0.6, 0.6]))


def test_make_density_state_rejections():
    with pytest.raises(NotDensityOperator):
        make_density_state(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(NotDensityOperator):
        make_density_state(np.diag([1.2, -0.2]))
    with pytest.raises(NotDensityOperator):
        make_density_state(np.zeros((2, 2)))


def test_orthodox_examples():
    same_family(rule_orthodox(make_density_state(np.diag([0.7, 0.3]))), [identity(2)])
    same_family(rule_orthodox(make_density_state(np.diag([0.5, 0.5, 0]))), [E([0, 1], 3)])
    same_family(rule_orthodox(make_density_state(np.diag([1.0, 0]))), [E([0], 2)])


def test_clifton_examples():
    same_family(rule_clifton(make_density_state(np.diag([0.7, 0.3]))), [E([0], 2), E([1], 2)])
    same_family(rule_clifton(make_density_state(np.diag([0.5, 0.5, 0]))), [E([0, 1], 3)])
    same_family(rule_clifton(make_density_state(identity(2) / 2)), [identity(2)])


def test_kochen_dieks_examples():
    same_family(rule_kochen_dieks(make_density_state(np.diag([0.5, 0.5, 0]))), [E([0, 1], 3), E([2], 3)])
    s = make_density_state(np.diag([0.2, 0.3, 0.5]))
    same_family(rule_kochen_dieks(s), list(rule_clifton(s).X_list))
    same_family(rule_kochen_dieks(make_density_state(np.diag([1.0, 0]))), [E([0], 2), E([1], 2)])


def test_bub_examples():
    inp = BubRuleInput.build(np.array([1, 1]) / np.sqrt(2), SIGMA_Z)
    same_family(rule_bub(inp), [E([0], 2), E([1], 2)])
    same_family(rule_bub(BubRuleInput.build([1, 0], SIGMA_Z)), [E([0], 2)])
    psi = np.array([1, 1j, 0]) / np.sqrt(2)
    R = 3 * np.outer(psi, psi.conj()) + np.diag([0, 0, 1])
    same_family(rule_bub(BubRuleInput.build(psi, R)), [np.outer(psi, psi.conj())])


def test_bub_input_validation():
    with pytest.raises(ValueError):
        BubRuleInput.build([1, 1], SIGMA_Z)
    with pytest.raises(ValueError):
        BubRuleInput.build([1, 0], np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        BubRuleInput.build([1, 0, 0], SIGMA_Z)


def test_xform_spec_validation():
    with pytest.raises(InvalidXForm):
        XFormSpec(())
    with pytest.raises(InvalidXForm):
        XFormSpec((E([0, 1], 3), E([1], 3)))
    with pytest.raises(InvalidXForm):
        XFormSpec((np.zeros((2, 2)),))
    with pytest.raises(InvalidXForm):
        XFormSpec((np.diag([0.5, 0.5]),))


def test_xform_membership_examples():
    spec = XFormSpec((E([0, 1], 3),))
    assert xform_membership(spec, E([0, 1], 3))
    assert not xform_membership(spec, E([0], 3))
    assert xform_membership(spec, identity(3))
    with pytest.raises(DimensionMismatch):
        xform_membership(spec, identity(2))


def test_xform_ideal_membership_examples():
    spec = XFormSpec((E([0, 1], 3),))
    assert xform_ideal_membership(spec, E([2], 3))
    assert not xform_ideal_membership(spec, E([0, 1], 3))
    assert xform_ideal_membership(spec, np.zeros((3, 3)))
    with pytest.raises(NotInD):
        xform_ideal_membership(spec, E([0], 3))


def test_build_rule_dispatch():
    s = make_density_state(np.diag([0.5, 0.5, 0]))
    for rule in ("orthodox", "clifton", "kochen-dieks"):
        assert isinstance(build_rule(rule, s), XFormSpec)
    with pytest.raises(ValueError):
        build_rule("naive", s)
    with pytest.raises(ValueError):
        build_rule("bub", s)
    with pytest.raises(ValueError):
        build_rule("copenhagen", s)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(2, 5), degenerate=st.booleans(), null=st.integers(0, 2))
def test_rule_ordering_and_sums(seed, n, degenerate, null):
    rng = rng_for(seed)
    W = random_density(n, rng, degenerate=degenerate, rank=max(1, n - null))
    s = make_density_state(W)
    O, C, K = rule_orthodox(s), rule_clifton(s), rule_kochen_dieks(s)
    assert opnorm(C.support - s.support) < 1e-9
    assert opnorm(K.support - identity(n)) < 1e-9
    samples = [random_projection(n, rng) for _ in range(10)]
    samples += [xform_member(list(K.X_list), rng) for _ in range(10)]
    samples += [xform_member(list(C.X_list), rng) for _ in range(10)]
    samples += [xform_member(list(O.X_list), rng) for _ in range(10)]
    for P in samples:
        # a finer X list makes fewer demands on P, so d_O sits inside d_C
        if xform_membership(O, P):
            assert xform_membership(C, P)
        if xform_membership(K, P):
            assert xform_membership(C, P)


def test_clifton_strictly_larger_than_orthodox():
    s = make_density_state(np.diag([0.7, 0.3]))
    P = E([0], 2)
    assert xform_membership(rule_clifton(s), P)
    assert not xform_membership(rule_orthodox(s), P)


def test_bub_strictly_larger_than_orthodox_when_psi_is_not_an_eigenvector():
    psi = np.array([1, 1, 0]) / np.sqrt(2)
    inp = BubRuleInput.build(psi, np.diag([1.0, 2.0, 3.0]))
    B, O = rule_bub(inp), rule_orthodox(inp.state())
    P = E([0], 3)
    assert xform_membership(B, P) and not xform_membership(O, P)
    # the two sets are not nested: the state's own projector is orthodox-definite only
    W = np.outer(psi, psi.conj())
    assert xform_membership(O, W) and not xform_membership(B, W)


def test_bub_matches_orthodox_for_an_eigenvector():
    inp = BubRuleInput.build([0, 1, 0], np.diag([1.0, 2.0, 3.0]))
    same_family(rule_bub(inp), list(rule_orthodox(inp.state()).X_list))


def test_kochen_dieks_generates_boolean_algebra():
    s = make_density_state(np.diag([0.5, 0.3, 0.2, 0]))
    L = generate_ortholattice(list(rule_kochen_dieks(s).X_list))
    assert len(L) == 16 and check_boolean(L)
