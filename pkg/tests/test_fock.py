import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasespace import fock
from phasespace.errors import (
    CutoffError,
    DensityMatrixError,
    MatrixOverflowError,
    TailMassError,
    TruncationWarning,
)

from conftest import random_density


class TestLadder:
    def test_two_dim_matrix(self):
        a, ad = fock.ladder_operators(2)
        assert np.array_equal(a, np.array([[0, 1], [0, 0]], dtype=complex))
        assert np.array_equal(ad, a.conj().T)

    def test_number_eigenvalue(self):
        a, ad = fock.ladder_operators(3)
        vec = np.array([0, 0, 1.0], dtype=complex)
        assert np.allclose((ad @ a) @ vec, 2.0 * vec)

    def test_commutator_away_from_edge(self):
        n = 40
        a, ad = fock.ladder_operators(n)
        comm = a @ ad - ad @ a
        assert np.abs(comm[: n - 1, : n - 1] - np.eye(n - 1)).max() < 1e-12

    def test_invalid_cutoff(self):
        with pytest.raises(CutoffError):
            fock.ladder_operators(1)


class TestMatrixExponential:
    def test_zero(self):
        assert np.array_equal(fock.matrix_exponential(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        out = fock.matrix_exponential(np.diag([1j * np.pi, 0.0]))
        assert np.allclose(out, np.diag([-1.0, 1.0]), atol=1e-14)

    def test_coherent_column_against_taylor(self):
        # independent oracle: e^{-1/2} / sqrt(n!) amplitudes summed directly
        n = 40
        a, ad = fock.ladder_operators(n)
        col = fock.matrix_exponential(ad - a)[:, 0]
        expected = np.array(
            [math.exp(-0.5) / math.sqrt(math.factorial(k)) for k in range(n)]
        )
        assert np.abs(col - expected).max() < 1e-10

    def test_inverse_pairing(self, rng):
        m = 0.4 * (rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)))
        prod = fock.matrix_exponential(m) @ fock.matrix_exponential(-m)
        assert np.abs(prod - np.eye(12)).max() < 1e-9

    def test_rejects_nonfinite(self):
        bad = np.array([[np.nan, 0], [0, 0]])
        with pytest.raises(MatrixOverflowError):
            fock.matrix_exponential(bad)

    def test_rejects_extreme_norm(self):
        with pytest.raises(MatrixOverflowError):
            fock.matrix_exponential(np.diag([1e9, 0.0]))


class TestDisplacement:
    def test_identity_at_zero(self):
        assert np.allclose(fock.displacement_operator(0.0, 8), np.eye(8))

    def test_vacuum_overlap(self):
        d = fock.displacement_operator(1.0, 40)
        assert abs(d[0, 0] - math.exp(-0.5)) < 1e-12

    def test_product_inverse(self):
        alpha = 0.7 + 0.3j
        d1 = fock.displacement_operator(alpha, 40)
        d2 = fock.displacement_operator(-alpha, 40)
        assert np.abs(d1 @ d2 - np.eye(40)).max() < 1e-9

    def test_unitary_any_amplitude(self):
        with pytest.warns(TruncationWarning):
            d = fock.displacement_operator(5.0, 20)
        assert np.abs(d @ d.conj().T - np.eye(20)).max() < 1e-10

    def test_column_is_coherent_vector(self):
        alpha = 0.8 - 0.4j
        d = fock.displacement_operator(alpha, 40)
        assert np.abs(d[:, 0] - fock.coherent_state_vector(alpha, 40)).max() < 1e-11


class TestSqueeze:
    def test_identity_at_zero(self):
        assert np.allclose(fock.squeeze_operator(0.0, 10), np.eye(10))

    def test_vacuum_amplitude(self):
        # closed form 1/sqrt(cosh r) vs the matrix exponential
        s = fock.squeeze_operator(0.5, 40)
        assert abs(s[0, 0] - 1 / math.sqrt(math.cosh(0.5))) < 1e-12

    def test_quadrature_variance_scaling(self):
        r, n = 0.5, 40
        a, ad = fock.ladder_operators(n)
        x2 = 0.5 * (a + ad) @ (a + ad)
        s = fock.squeeze_operator(r, n)
        rho = s[:, [0]] @ s[:, [0]].conj().T
        var = np.trace(rho @ x2).real
        assert abs(var - 0.5 * math.exp(-2 * r)) < 1e-6

    def test_warning_on_strong_squeeze(self):
        with pytest.warns(TruncationWarning):
            fock.squeeze_operator(1.8, 40)


class TestDoubledSpace:
    def test_identity_state_two_dim(self):
        assert np.array_equal(fock.identity_state(2),
                              np.array([1, 0, 0, 1], dtype=complex))

    def test_trace_pairing(self, rng):
        rho = random_density(rng, 12)
        ident = fock.identity_state(12)
        assert abs(ident.conj() @ fock.tfd_vector(rho) - 1.0) < 1e-10

    def test_lowering_matches_tilde_raising_on_identity(self):
        n = 30
        a, ad = fock.ladder_operators(n)
        ident = fock.identity_state(n)
        lhs = fock.system_embed(a) @ ident
        rhs = fock.tilde_lift(a).conj().T @ ident
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_tfd_vacuum(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        vec = fock.tfd_vector(rho)
        expected = np.zeros(16, dtype=complex)
        expected[0] = 1.0
        assert np.array_equal(vec, expected)

    def test_tfd_coherent_mean(self):
        n = 30
        psi = fock.coherent_state_vector(0.5, n)
        rho = np.outer(psi, psi.conj())
        rho /= np.trace(rho).real
        ident = fock.identity_state(n)
        a, _ = fock.ladder_operators(n)
        mean = ident.conj() @ (fock.system_embed(a) @ fock.tfd_vector(rho))
        assert abs(mean - 0.5) < 1e-10

    def test_tfd_thermal_entries(self):
        n, f = 20, 0.4
        p = (1 - f) * f ** np.arange(n)
        rho = np.diag(p).astype(complex)
        rho /= np.trace(rho).real
        vec = fock.tfd_vector(rho)
        for k in range(n):
            assert abs(vec[fock.pair_index(k, k, n)] - rho[k, k]) == 0.0
        off = vec.reshape(n, n) - np.diag(np.diag(vec.reshape(n, n)))
        assert np.abs(off).max() == 0.0

    def test_tilde_lift_identity(self):
        assert np.array_equal(fock.tilde_lift(np.eye(5)), np.eye(25))

    @settings(max_examples=16, deadline=None)
    @given(p=st.integers(0, 4), q=st.integers(0, 4))
    def test_tilde_rule_monomials(self, p, q):
        if p + q > 4:
            return
        n = 12
        a, ad = fock.ladder_operators(n)
        op = np.linalg.matrix_power(ad, p) @ np.linalg.matrix_power(a, q)
        ident = fock.identity_state(n)
        lhs = fock.system_embed(op) @ ident
        rhs = fock.tilde_lift(op).conj().T @ ident
        assert np.abs(lhs - rhs).max() < 1e-12


class TestDensityContracts:
    def test_rejects_nonhermitian(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 1] = 1e-6
        with pytest.raises(DensityMatrixError):
            fock.validate_density_matrix(bad)

    def test_rejects_bad_trace(self):
        with pytest.raises(DensityMatrixError):
            fock.validate_density_matrix(2.0 * np.eye(4) / 4.0 * 1.5)

    def test_rejects_negative(self):
        bad = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
        with pytest.raises(DensityMatrixError):
            fock.validate_density_matrix(bad)

    def test_tail_mass_gate(self):
        p = np.zeros(10)
        p[-1] = 1.0
        with pytest.raises(TailMassError):
            fock.check_tail_mass(np.diag(p))
