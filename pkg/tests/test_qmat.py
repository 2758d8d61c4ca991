import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pure_qubits
from qclone import qmat
from qclone.exceptions import InvalidStateError
from qclone.qmat import DensityMatrix, PureQubit


def random_density(rng, dim=2, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


class TestPureQubit:
    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidStateError):
            PureQubit(1.0, 1.0)

    def test_normalized_rescales(self):
        s = PureQubit.normalized(3, 4j)
        assert abs(s.alpha - 0.6) < 1e-15 and abs(s.beta - 0.8j) < 1e-15

    def test_real_constructor(self):
        s = PureQubit.real(0.6)
        assert s.is_real and math.isclose(s.beta.real, 0.8)

    def test_real_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            PureQubit.real(1.5)

    def test_density_is_projector(self):
        s = PureQubit.from_angles(1.1, 0.3, 2.0)
        rho = np.asarray(s.density())
        assert np.allclose(rho @ rho, rho, atol=1e-15)
        assert np.allclose(np.asarray(s.product_density()), np.kron(rho, rho))


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.eye(2))

    def test_rejects_bad_shape(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.eye(3) / 3)

    def test_negative_eigenvalue_opt_out(self):
        m = np.array([[1.2, 0], [0, -0.2]])
        with pytest.raises(InvalidStateError):
            DensityMatrix(m)
        d = DensityMatrix(m, check_positive=False)
        assert not d.is_positive and math.isclose(d.min_eigenvalue, -0.2)


class TestPartialTrace:
    def test_product_state(self, rng):
        a, b = random_density(rng), random_density(rng)
        rab = np.kron(a, b)
        assert np.allclose(np.asarray(qmat.partial_trace(rab, "b")), a, atol=1e-15)
        assert np.allclose(np.asarray(qmat.partial_trace(rab, "a")), b, atol=1e-15)

    def test_bell_state_is_maximally_mixed(self):
        v = np.array([1, 0, 0, 1]) / math.sqrt(2)
        red = qmat.partial_trace(np.outer(v, v), "b")
        assert np.allclose(np.asarray(red), np.eye(2) / 2)
        assert math.isclose(qmat.von_neumann_entropy(red), 1.0)

    def test_bad_label(self):
        with pytest.raises(ValueError):
            qmat.partial_trace(np.eye(4) / 4, "c")


def test_reduce_over_machine_orthonormal_matches_outer_product(rng):
    # with an orthonormal machine the reduction is a plain mixture
    branches = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(3)]
    out = qmat.reduce_over_machine(branches, np.eye(3))
    ref = sum(np.outer(b, b.conj()) for b in branches)
    assert np.allclose(out, ref)


class TestSqrt:
    @pytest.mark.parametrize("rank", [1, 2])
    def test_square_root_squares_back(self, rng, rank):
        m = random_density(rng, rank=rank)
        r = qmat.sqrt_2x2(m)
        assert np.allclose(r @ r, m, atol=1e-14)
        assert np.min(np.linalg.eigvalsh(r)) > -1e-14

    def test_zero_matrix(self):
        assert np.allclose(qmat.sqrt_2x2(np.zeros((2, 2))), 0)

    def test_shape_check(self):
        with pytest.raises(ValueError):
            qmat.sqrt_2x2(np.eye(3))


class TestFidelity:
    def test_identical_states(self, rng):
        m = random_density(rng)
        assert math.isclose(qmat.fidelity(m, m), 1.0, abs_tol=1e-12)

    def test_orthogonal_pure_states(self):
        up, down = PureQubit(1, 0), PureQubit(0, 1)
        assert qmat.fidelity(up.density(), down.density()) == 0.0

    def test_matches_eigendecomposition_oracle(self, rng):
        for _ in range(50):
            a, b = random_density(rng), random_density(rng)
            w, v = np.linalg.eigh(a)
            ra = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
            ev = np.linalg.eigvalsh(ra @ b @ ra)
            ref = float(np.sum(np.sqrt(np.clip(ev, 0, None))))
            assert abs(qmat.fidelity(a, b) - ref) < 1e-10

    @given(pure_qubits(), st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_pure_reference_shortcut(self, psi, p):
        # depolarized copy of psi: Uhlmann and <psi|rho|psi> agree
        rho = p * np.asarray(psi.density()) + (1 - p) * np.eye(2) / 2
        assert abs(qmat.fidelity(psi.density(), rho) - qmat.pure_fidelity(psi, rho)) < 1e-12


class TestDistancesAndEntropy:
    def test_hs_distance_known(self):
        assert math.isclose(qmat.hs_distance(np.diag([1, 0]), np.diag([0, 1])), 2.0)

    def test_hs_distance_shape_mismatch(self):
        with pytest.raises(ValueError):
            qmat.hs_distance(np.eye(2), np.eye(4))

    def test_eigenvalues_2x2(self, rng):
        m = random_density(rng)
        lam = qmat.eigenvalues_2x2(m)
        assert np.allclose(sorted(lam), np.linalg.eigvalsh(m))

    def test_entropy_bases(self):
        mixed = np.eye(2) / 2
        assert math.isclose(qmat.von_neumann_entropy(mixed), 1.0)
        assert math.isclose(qmat.von_neumann_entropy(mixed, base=math.e), math.log(2))

    def test_entropy_pure_is_zero(self):
        assert qmat.von_neumann_entropy(PureQubit.from_angles(0.7, 0.2).density()) < 1e-12

    def test_entropy_rejects_negative_spectrum(self):
        with pytest.raises(InvalidStateError):
            qmat.von_neumann_entropy(DensityMatrix(np.diag([1.1, -0.1]), check_positive=False))
