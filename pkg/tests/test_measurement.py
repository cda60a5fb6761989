import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spacsim import errors, fock
from spacsim.fock import CoherentParams, fock_state, inner_product, norm, spacs_state
from spacsim.measurement import (
    MeasurementConfig,
    SelectionConfig,
    analytic_beta,
    branch_superposition,
    final_pointer_state,
    joint_evolution_project,
    joint_unitary_branches,
    joint_unitary_dense,
    naive_postselection_probability,
    postselected_pointer,
    true_postselection_probability,
    weak_value,
)

PI = math.pi


def fidelity(a, b) -> float:
    return abs(inner_product(a, b))


def weak_value_2x2(phi_pre: float, delta: float) -> complex:
    """Independent 2x2 route: <H|sigma_x|psi_i> / <H|psi_i>."""
    psi_i = np.array([math.cos(phi_pre / 2), cmath.exp(1j * delta) * math.sin(phi_pre / 2)])
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    post = np.array([1.0, 0.0])
    return complex(post @ sigma_x @ psi_i) / complex(post @ psi_i)


# ---------------------------------------------------------------- weak values

def test_weak_value_vanishes_at_phi_zero():
    for delta in (0.0, 0.3, 2.0):
        assert weak_value(SelectionConfig(0.0, delta)) == 0.0


def test_weak_value_unity():
    assert weak_value(SelectionConfig(PI / 2, 0.0)) == pytest.approx(1.0, abs=1e-15)


def test_weak_value_complex_case():
    w = weak_value(SelectionConfig(PI / 3, PI / 4))
    assert w == pytest.approx(weak_value_2x2(PI / 3, PI / 4), abs=1e-14)
    assert w.real == pytest.approx(0.40825, abs=1e-5)
    assert w.imag == pytest.approx(0.40825, abs=1e-5)


@given(
    st.floats(min_value=0.0, max_value=0.99 * PI),
    st.floats(min_value=0.0, max_value=2 * PI, exclude_max=True),
)
def test_weak_value_modulus_and_phase(phi_pre, delta):
    w = weak_value(SelectionConfig(phi_pre, delta))
    assert abs(abs(w) - math.tan(phi_pre / 2)) < 1e-12 * max(1.0, abs(w))
    if abs(w) > 1e-12:
        assert cmath.phase(w) == pytest.approx(
            cmath.phase(cmath.exp(1j * delta)), abs=1e-12
        )


def test_selection_rejects_orthogonal():
    with pytest.raises(errors.UndefinedWeakValueError):
        SelectionConfig(PI, 0.0)


def test_selection_rejects_out_of_range():
    with pytest.raises(errors.InvalidParameterError):
        SelectionConfig(-0.1, 0.0)
    with pytest.raises(errors.InvalidParameterError):
        SelectionConfig(1.5 * PI, 0.0)


def test_measurement_config_rejects_negative_strength():
    with pytest.raises(errors.InvalidParameterError):
        MeasurementConfig(-0.5)


# ---------------------------------------------------- postselection probability

def test_naive_probability_endpoints():
    assert naive_postselection_probability(SelectionConfig(0.0)) == 1.0
    assert naive_postselection_probability(SelectionConfig(PI / 2)) == pytest.approx(0.5, abs=1e-15)


def test_naive_probability_near_orthogonal():
    sel = SelectionConfig(8 * PI / 9)
    psi_i = sel.preselected
    explicit = abs(psi_i[0]) ** 2
    assert naive_postselection_probability(sel) == pytest.approx(explicit, abs=1e-15)
    assert naive_postselection_probability(sel) == pytest.approx(0.030153689607045786, abs=1e-12)


def test_true_probability_reduces_to_naive_at_s_zero():
    pointer = spacs_state(CoherentParams(2.0, PI / 9), 60)
    sel = SelectionConfig(PI / 3, PI / 4)
    naive = naive_postselection_probability(sel)
    true = true_postselection_probability(pointer, sel, MeasurementConfig(0.0, fixed_dim=60))
    assert true == pytest.approx(naive, abs=1e-14)


def test_true_probability_frozen_values():
    # frozen from the dense-oracle run at dim 120/160
    pointer = spacs_state(CoherentParams(2.0, PI / 9), 90)
    sel = SelectionConfig(PI / 3, PI / 4)
    p_half = true_postselection_probability(pointer, sel, MeasurementConfig(0.5, fixed_dim=90))
    assert p_half == pytest.approx(0.83423152942618839, abs=1e-9)
    p_flat = true_postselection_probability(
        pointer, SelectionConfig(0.0, 0.0), MeasurementConfig(1.0, fixed_dim=90)
    )
    assert p_flat == pytest.approx(0.46756600857048475, abs=1e-9)
    assert 0.0 < p_flat <= 1.0


def test_true_probability_matches_oracle():
    pointer = spacs_state(CoherentParams(2.0, PI / 9), 90)
    sel = SelectionConfig(PI / 3, PI / 4)
    mconf = MeasurementConfig(0.1, fixed_dim=90)
    _, oracle_prob = joint_evolution_project(pointer, sel, mconf)
    assert true_postselection_probability(pointer, sel, mconf) == pytest.approx(
        oracle_prob, abs=1e-12
    )


# ---------------------------------------------------------------- final state

def test_final_state_unchanged_at_s_zero():
    pointer = spacs_state(CoherentParams(1.3, 0.4), 40)
    final = final_pointer_state(pointer, 0.7 + 0.1j, MeasurementConfig(0.0, fixed_dim=40))
    np.testing.assert_allclose(final.amplitudes, pointer.amplitudes, atol=1e-14)


def test_final_state_single_branch_at_unit_weak_value():
    dim = 60
    pointer = spacs_state(CoherentParams(1.5), dim)
    final = final_pointer_state(pointer, 1.0, MeasurementConfig(0.8, fixed_dim=dim))
    displaced = fock.normalize(
        fock.apply(fock.displacement_matrix(0.4, dim), pointer)
    )
    assert fidelity(final, displaced) > 1 - 1e-12


def test_final_state_requires_normalized_pointer():
    raw = fock.StateVector(np.ones(8, complex))
    with pytest.raises(errors.InvalidParameterError):
        final_pointer_state(raw, 0.0, MeasurementConfig(0.1, fixed_dim=8))


def test_final_state_matches_oracle_reference_point():
    dim = 90
    pointer = spacs_state(CoherentParams(2.0, PI / 9), dim)
    sel = SelectionConfig(PI / 3, PI / 4)
    mconf = MeasurementConfig(0.5, fixed_dim=dim)
    final = final_pointer_state(pointer, weak_value(sel), mconf)
    oracle_state, _ = joint_evolution_project(pointer, sel, mconf)
    assert fidelity(final, oracle_state) > 1 - 1e-9


def test_small_coupling_continuity():
    dim = 50
    pointer = spacs_state(CoherentParams(1.2, 0.3), dim)
    final = final_pointer_state(pointer, 0.5, MeasurementConfig(1e-6, fixed_dim=dim))
    assert fidelity(final, pointer) > 1 - 1e-10


def test_final_state_normalized_for_large_weak_values():
    dim = 70
    pointer = spacs_state(CoherentParams(1.0, 0.2), dim)
    sel = SelectionConfig(0.99 * PI, 0.6)
    final = final_pointer_state(pointer, weak_value(sel), MeasurementConfig(1.5, fixed_dim=dim))
    assert abs(norm(final) - 1.0) < 1e-12


def test_postselected_pointer_consistent_with_individual_ops():
    dim = 60
    pointer = spacs_state(CoherentParams(1.7, 1.0), dim)
    sel = SelectionConfig(PI / 3, 0.9)
    mconf = MeasurementConfig(0.7, fixed_dim=dim)
    combined_state, combined_prob = postselected_pointer(pointer, sel, mconf)
    separate_state = final_pointer_state(pointer, weak_value(sel), mconf)
    separate_prob = true_postselection_probability(pointer, sel, mconf)
    np.testing.assert_array_equal(combined_state.amplitudes, separate_state.amplitudes)
    assert combined_prob == separate_prob


# ---------------------------------------------------------------- beta

def test_beta_at_zero_coupling_zero_weak_value():
    assert analytic_beta(CoherentParams(1.3, 0.2), 0.0, 0.0) == pytest.approx(0.5, abs=1e-15)


def test_beta_vanishing_cross_term():
    # w = 1 kills the (1 - w) branch and the closed form collapses
    for alpha in (CoherentParams(0.7, 0.1), CoherentParams(2.5, 2.0)):
        expected = 1.0 / math.sqrt(2.0 * (1.0 + 1.0))
        assert analytic_beta(alpha, 1.0, 1.1) == pytest.approx(expected, abs=1e-15)


def test_beta_matches_numeric_norm_reference_point():
    alpha = CoherentParams(2.0, PI / 9)
    dim = 90
    pointer = spacs_state(alpha, dim)
    w = weak_value(SelectionConfig(PI / 3, PI / 4))
    numeric = 1.0 / norm(branch_superposition(pointer, w, 0.5))
    assert analytic_beta(alpha, w, 0.5) == pytest.approx(numeric, abs=1e-8)


@given(
    st.floats(min_value=0.0, max_value=3.0),
    st.floats(min_value=0.0, max_value=2 * PI, exclude_max=True),
    st.floats(min_value=0.0, max_value=0.9 * PI),
    st.floats(min_value=0.0, max_value=2 * PI, exclude_max=True),
    st.floats(min_value=0.0, max_value=2.0),
)
def test_beta_positive_and_finite(r, theta, phi_pre, delta, s):
    # branches may interfere destructively, so beta can exceed 1; it is
    # a reciprocal norm and must only stay positive and finite
    beta = analytic_beta(CoherentParams(r, theta), weak_value(SelectionConfig(phi_pre, delta)), s)
    assert beta > 0.0
    assert math.isfinite(beta)


# ---------------------------------------------------------------- oracle

def test_oracle_identity_at_s_zero():
    pointer = spacs_state(CoherentParams(1.1, 0.5), 40)
    sel = SelectionConfig(PI / 3, PI / 5)
    state, prob = joint_evolution_project(pointer, sel, MeasurementConfig(0.0, fixed_dim=40))
    assert prob == pytest.approx(naive_postselection_probability(sel), abs=1e-12)
    assert fidelity(state, pointer) > 1 - 1e-12


@pytest.mark.parametrize("s", [0.1, 1.0, 2.0])
def test_two_branch_decomposition_identity(s):
    # the dense exponential of the coupling equals the displaced-branch form
    dim = 40
    dense = joint_unitary_dense(dim, s)
    branches = joint_unitary_branches(dim, s)
    half = dim // 2
    pointer_part = np.arange(2 * dim) % dim
    mask = (pointer_part[:, None] < half) & (pointer_part[None, :] < half)
    assert np.max(np.abs((dense - branches)[mask])) < 1e-8


def test_oracle_rejects_large_dimension():
    pointer = fock_state(0, 600)
    with pytest.raises(errors.OracleDimensionError):
        joint_evolution_project(pointer, SelectionConfig(0.1), MeasurementConfig(0.1, fixed_dim=600))


def test_oracle_agreement_small_grid():
    # spot grid here; the full 162-point grid runs in the acceptance suite
    for r, theta, delta, phi_pre, s in [
        (0.5, 0.0, 0.0, PI / 9, 0.1),
        (2.0, PI / 9, PI / 4, PI / 3, 1.0),
        (4.0, PI / 2, PI / 4, 2 * PI / 3, 2.0),
    ]:
        alpha = CoherentParams(r, theta)
        dim = fock.adaptive_dim(alpha, s)
        pointer = spacs_state(alpha, dim)
        sel = SelectionConfig(phi_pre, delta)
        mconf = MeasurementConfig(s, fixed_dim=dim)
        final, prob = postselected_pointer(pointer, sel, mconf)
        oracle_state, oracle_prob = joint_evolution_project(pointer, sel, mconf)
        assert fidelity(final, oracle_state) > 1 - 1e-9
        assert prob == pytest.approx(oracle_prob, abs=1e-9)
