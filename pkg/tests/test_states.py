import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasespace import distributions as dist
from phasespace import fock, states
from phasespace.errors import (
    ClosedFormUnavailableError,
    OutOfFamilyError,
    SingularOrderError,
    TailMassError,
)
from phasespace.su11 import OrderingParameter, disentangle, materialize

# frozen from the generating-series oracle at cutoff 50 / evaluation cutoff 90
GOLDEN_SQUEEZED_Q = 0.1649802556262697  # alpha0=0, r=0.5, theta=0, f=0.3, a=0, alpha=0.4


class TestDensityMatrices:
    def test_coherent_vacuum(self):
        rho = states.density_matrix(states.Coherent(0.0), 12)
        expected = np.zeros((12, 12), dtype=complex)
        expected[0, 0] = 1.0
        assert np.abs(rho - expected).max() < 1e-15

    def test_thermal_diagonal(self):
        f = 0.4
        rho = states.density_matrix(states.ThermalCoherent(0.0, f), 40)
        expected = (1 - f) * f ** np.arange(40)
        assert np.abs(np.diag(rho).real - expected).max() < 1e-12
        assert np.abs(rho - np.diag(np.diag(rho))).max() < 1e-15

    def test_squeezed_purity_invariance(self):
        # purity of a squeezed displaced thermal state equals the thermal purity
        f = 0.2
        spec = states.SqueezedThermalCoherent(0.5, 0.3, f)
        rho = states.density_matrix(spec, 40)
        assert abs(np.trace(rho).real - 1.0) < 1e-12
        purity = np.trace(rho @ rho).real
        assert abs(purity - (1 - f) / (1 + f)) < 1e-8

    def test_number_diagonal(self):
        rho = states.density_matrix(states.NumberDiagonal((0.25, 0.75)), 8)
        assert abs(rho[0, 0] - 0.25) < 1e-15 and abs(rho[1, 1] - 0.75) < 1e-15

    def test_tail_mass_failure(self):
        with pytest.raises(TailMassError):
            states.density_matrix(states.ThermalCoherent(0.0, 0.9), 16)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            states.ThermalCoherent(0.0, 1.0)
        with pytest.raises(ValueError):
            states.NumberDiagonal((0.5, 0.4))
        with pytest.raises(ValueError):
            states.SqueezedThermalCoherent(0.0, 2.0, 0.1)


class TestThermalExponent:
    def test_vacuum(self):
        e = states.thermal_tfd_exponent(0.0)
        assert (e.gamma_plus, e.gamma3, e.gamma_minus) == (0, 0, 0)

    def test_disentangled_weights(self):
        nf = disentangle(states.thermal_tfd_exponent(1.0))
        assert abs(nf.gamma_plus - 0.5) < 1e-14
        assert abs(nf.sqrt_gamma3 - 0.5) < 1e-14

    def test_materialized_matches_tfd_vector(self):
        n, nbar = 30, 0.25
        f = nbar / (1 + nbar)
        nf = disentangle(states.thermal_tfd_exponent(nbar))
        vac = np.zeros(n * n, dtype=complex)
        vac[0] = 1.0
        produced = materialize(nf, n) @ vac
        expected = np.diag((1 - f) * f ** np.arange(n)).astype(complex).ravel()
        assert np.abs(produced - expected).max() < 1e-10


class TestClosedForms:
    def test_coherent_q_peak(self):
        val = states.closed_form_phi(states.Coherent(0.3 + 0.1j),
                                     OrderingParameter(0.0), 0.3 + 0.1j)
        assert abs(val - 1 / math.pi) < 1e-15

    def test_coherent_wigner_one_sigma(self):
        val = states.closed_form_phi(states.Coherent(0.0),
                                     OrderingParameter(0.5), 1.0)
        assert abs(val - 2 / math.pi * math.exp(-2)) < 1e-15

    def test_thermal_peak(self):
        val = states.closed_form_phi(states.ThermalCoherent(0.0, 0.5),
                                     OrderingParameter(0.0), 0.0)
        assert abs(val - 0.5 / math.pi) < 1e-15

    def test_squeezed_golden_value(self):
        spec = states.SqueezedThermalCoherent(0.0, 0.5, 0.3)
        val = states.closed_form_phi(spec, OrderingParameter(0.0), 0.4)
        assert abs(val - GOLDEN_SQUEEZED_Q) < 1e-10

    def test_oracle_agreement_all_specs(self):
        probe = [0.0, 0.4, -0.6 + 0.9j, 1.1j]
        cases = [
            (states.Coherent(0.7 + 0.3j), (-1.0, -0.5, 0.0, 0.5)),
            (states.ThermalCoherent(0.5, 0.4), (-0.5, 0.0, 0.5)),
            (states.SqueezedThermalCoherent(0.3, 0.5 * np.exp(0.7j), 0.2),
             (0.0, 0.5)),
        ]
        for spec, orders in cases:
            rho = states.density_matrix(spec, states.recommended_cutoff(spec))
            for a_val in orders:
                a = OrderingParameter(a_val)
                for alpha in probe:
                    clo = states.closed_form_phi(spec, a, alpha)
                    ora = dist.phi_from_density(rho, a, alpha)
                    assert abs(clo - ora) < 1e-8, (spec, a_val, alpha)

    def test_zero_squeeze_reduction_exact(self):
        a = OrderingParameter(-0.5)
        for alpha in (0.2, 0.7 - 0.4j):
            th = states.closed_form_phi(states.ThermalCoherent(0.1, 0.3), a, alpha)
            sq = states.closed_form_phi(
                states.SqueezedThermalCoherent(0.1, 0.0, 0.3), a, alpha)
            assert th == sq

    def test_zero_temperature_reduction_exact(self):
        a = OrderingParameter(0.5)
        for alpha in (0.2, 0.7 - 0.4j):
            co = states.closed_form_phi(states.Coherent(0.1), a, alpha)
            th = states.closed_form_phi(states.ThermalCoherent(0.1, 0.0), a, alpha)
            assert co == th

    @settings(max_examples=30, deadline=None)
    @given(re=st.floats(-1.5, 1.5), im=st.floats(-1.5, 1.5),
           a_val=st.sampled_from([-1.0, -0.5, 0.0, 0.5]))
    def test_displacement_covariance(self, re, im, a_val):
        beta = complex(re, im)
        a = OrderingParameter(a_val)
        spec = states.ThermalCoherent(0.2 - 0.1j, 0.35)
        alpha = 0.4 + 0.25j
        lhs = states.closed_form_phi(states.shift(spec, beta), a, alpha)
        rhs = states.closed_form_phi(spec, a, alpha - beta)
        assert abs(lhs - rhs) <= 1e-12 * max(lhs, rhs, 1e-30)

    def test_delta_descriptor_at_singular_order(self):
        out = states.closed_form_phi(states.Coherent(0.7j),
                                     OrderingParameter(1.0), 0.0)
        assert isinstance(out, states.DeltaDistribution)
        assert out.center == 0.7j

    def test_singular_order_on_mixed_states(self):
        with pytest.raises(SingularOrderError):
            states.closed_form_phi(states.ThermalCoherent(0.0, 0.3),
                                   OrderingParameter(1.0), 0.0)

    def test_out_of_family_denominator(self):
        # lam = -3 (a = 0.75) with strong squeezing leaves the Gaussian family
        spec = states.SqueezedThermalCoherent(0.0, 1.45, 0.0)
        with pytest.raises(OutOfFamilyError):
            states.closed_form_phi(spec, OrderingParameter(0.75), 0.1)

    def test_number_diagonal_has_no_closed_form(self):
        with pytest.raises(ClosedFormUnavailableError):
            states.closed_form_phi(states.NumberDiagonal((1.0,)),
                                   OrderingParameter(0.0), 0.0)


class TestSerialization:
    def test_roundtrip_all_kinds(self):
        specs = [
            states.Coherent(0.5 - 0.25j),
            states.ThermalCoherent(1.0, 0.3),
            states.SqueezedThermalCoherent(0.2j, 0.4 * np.exp(1j), 0.1),
            states.NumberDiagonal((0.5, 0.25, 0.25)),
        ]
        for spec in specs:
            assert states.spec_from_dict(states.spec_to_dict(spec)) == spec

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            states.spec_from_dict({"kind": "cat"})

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError):
            states.spec_from_dict({"kind": "coherent", "alpha": 1.0})

    def test_complex_parsing_forms(self):
        assert states.parse_complex("0.5+0.3j") == 0.5 + 0.3j
        assert states.parse_complex([0.5, 0.3]) == 0.5 + 0.3j
        assert states.parse_complex(2) == 2.0 + 0.0j
