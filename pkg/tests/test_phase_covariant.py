import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pure_qubits
from qclone import phase_covariant as pc
from qclone import qmat
from qclone.qmat import PureQubit

F_OPT = math.sqrt(0.5 + 1 / (2 * math.sqrt(2)))


@st.composite
def coeffs(draw):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([1.0, 0.0, 0.0]), 1.0
    v = v / n
    return pc.PCCoeffs(v[0], v[1] / math.sqrt(2), v[2])


def test_unitarity_enforced():
    with pytest.raises(ValueError):
        pc.PCCoeffs(1, 1, 0)


def test_isometry_of_images():
    k = pc.PCCoeffs(0.6, 0.4, math.sqrt(1 - 0.36 - 0.32))
    v0 = pc.joint_state_vector(PureQubit(1, 0), k)
    v1 = pc.joint_state_vector(PureQubit(0, 1), k)
    g = np.array([[np.vdot(a, b) for b in (v0, v1)] for a in (v0, v1)])
    assert np.allclose(g, np.eye(2), atol=1e-15)


def test_identity_machine():
    k = pc.PCCoeffs(1, 0, 0)
    assert pc.fidelity(PureQubit.real(1.0), k) == 1.0


@pytest.mark.parametrize("case, sign", [(pc.PCCase.CASE1, 1), (pc.PCCase.CASE2, -1)])
def test_real_family_optima(case, sign):
    k, f = pc.maximize_fidelity(case)
    s8 = math.sqrt(1 / 8)
    assert np.allclose(k.as_tuple(), (0.5 + s8, s8, sign * (0.5 - s8)), atol=1e-12)
    assert abs(f - F_OPT) < 1e-12
    assert case.relation_residual(k) < 1e-12


def test_fully_complex_optimum():
    k, f = pc.maximize_fidelity(pc.PCCase.CASE3)
    assert np.allclose(k.as_tuple(), (math.sqrt(2 / 3), math.sqrt(1 / 6), 0), atol=1e-12)
    assert abs(f - math.sqrt(5 / 6)) < 1e-12


@pytest.mark.parametrize("case", list(pc.PCCase))
def test_universal_on_own_family(case):
    k, f = pc.maximize_fidelity(case)
    fam = pc.input_family(case, 101)
    assert pc.input_independence_residual(fam, k, case) < 1e-12
    assert all(abs(pc.fidelity_matrix(s, k) - f) < 1e-12 for s in fam)


def test_real_optimum_is_not_universal():
    k, _ = pc.maximize_fidelity(pc.PCCase.CASE1)
    fam = pc.input_family(pc.PCCase.CASE3, 101)
    assert pc.input_independence_residual(fam, k) > 1e-2


def test_seeded_family_is_reproducible():
    a = pc.input_family(pc.PCCase.CASE3, 10, np.random.default_rng(3))
    b = pc.input_family(pc.PCCase.CASE3, 10, np.random.default_rng(3))
    assert a == b


def test_relation_mismatch_raises():
    k, _ = pc.maximize_fidelity(pc.PCCase.CASE1)
    with pytest.raises(ValueError):
        pc.input_independence_residual(pc.input_family(pc.PCCase.CASE2, 5), k, pc.PCCase.CASE2)


def test_parse_case():
    assert pc.PCCase.parse("2") is pc.PCCase.CASE2
    assert pc.PCCase.parse("case3") is pc.PCCase.CASE3
    with pytest.raises(ValueError):
        pc.PCCase.parse("4")


@given(pure_qubits(), coeffs())
@settings(max_examples=300, deadline=None)
def test_fidelity_forms_agree(psi, k):
    m = pc.fidelity_matrix(psi, k)
    assert abs(pc.fidelity(psi, k) - m) < 1e-12
    assert abs(pc.fidelity_amplitude_form(psi, k) - m) < 1e-12


@given(pure_qubits(), coeffs())
@settings(max_examples=300, deadline=None)
def test_reductions(psi, k):
    rab = pc.joint_output_density(psi, k)
    ra = np.asarray(qmat.partial_trace(rab, "b"))
    assert np.allclose(ra, np.asarray(pc.output_density_a(psi, k)), atol=1e-12)
    assert np.allclose(ra, np.asarray(qmat.partial_trace(rab, "a")), atol=1e-12)
