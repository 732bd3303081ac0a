import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasespace import fock
from phasespace.errors import SingularElementError, SingularOrderError
from phasespace.su11 import (
    IDENTITY_NORMAL_FORM,
    OrderingParameter,
    SU11Exponent,
    SU11NormalForm,
    apply_smoothing,
    compose,
    conjugate_order_matrix,
    disentangle,
    kernel_coefficients,
    materialize,
    materialize_exponent,
    normal_form_from_matrix,
    normal_form_matrix,
    smoothing_form,
    smoothing_matrix,
    su11_generators,
)


def dissipative_exponent(rng, scale=2.0):
    g = rng.uniform(0.05, 1.5)
    nb = rng.uniform(0.0, 1.5)
    chik = rng.uniform(-3.0, 3.0)
    t = rng.uniform(0.05, 2.0)
    gp, gm = g * nb * t, g * (nb + 1.0) * t
    g3 = -(g * (2 * nb + 1) + 2j * chik) * t
    norm = np.linalg.norm([abs(gp), abs(g3), abs(gm)])
    if norm > scale:
        gp, g3, gm = (x * scale / norm for x in (gp, g3, gm))
    return SU11Exponent(gp, g3, gm)


def random_normal_form(rng):
    return SU11NormalForm(
        0.6 * (rng.normal() + 1j * rng.normal()),
        0.5 + 0.8 * rng.random() + 0.25j * rng.normal(),
        0.6 * (rng.normal() + 1j * rng.normal()),
    )


class TestOrderingParameter:
    def test_lambda_values(self):
        assert OrderingParameter(0.0).lam == 0.0
        assert OrderingParameter(0.5).lam == -1.0
        assert OrderingParameter(-1.0).lam == 0.5

    def test_singular_end(self):
        p = OrderingParameter(1.0)
        assert p.is_singular
        with pytest.raises(SingularOrderError):
            p.lam

    def test_rejects_above_one(self):
        with pytest.raises(ValueError):
            OrderingParameter(1.2)

    @settings(max_examples=40, deadline=None)
    @given(a=st.floats(-20.0, 0.99))
    def test_lambda_inverse(self, a):
        lam = OrderingParameter(a).lam
        assert abs(-lam / (1 - lam) - a) < 1e-12 * max(1.0, abs(a))


class TestDisentangle:
    def test_identity(self):
        nf = disentangle(SU11Exponent(0, 0, 0))
        assert nf.tuple3() == (0, 1, 0)

    def test_pure_k3(self):
        c = 0.8 - 0.3j
        nf = disentangle(SU11Exponent(0, c, 0))
        assert nf.gamma_plus == 0 and nf.gamma_minus == 0
        assert abs(nf.sqrt_gamma3 - np.exp(c / 2)) < 1e-14

    def test_thermal_degenerate_branch(self):
        # nbar(K+ + K- - 2 K3) has phi^2 = 0 exactly
        nbar = 1.0
        nf = disentangle(SU11Exponent(nbar, -2 * nbar, nbar))
        f = nbar / (1 + nbar)
        assert abs(nf.gamma_plus - f) < 1e-14
        assert abs(nf.gamma_minus - f) < 1e-14
        assert abs(nf.sqrt_gamma3 - (1 - f)) < 1e-14

    def test_matrix_identity_protected_block(self, rng):
        n = 16
        keep = np.zeros((n, n), dtype=bool)
        keep[:6, :6] = True
        keep = keep.ravel()
        for _ in range(4):
            exp = dissipative_exponent(rng)
            diff = materialize(disentangle(exp), n) - materialize_exponent(exp, n)
            assert np.linalg.norm(diff[keep][:, keep], 2) < 1e-8

    def test_singular_element(self):
        # gp = gm = pi/2, g3 = 0: phi = i pi/2 makes the denominator cos(pi/2) = 0
        with pytest.raises(SingularElementError):
            disentangle(SU11Exponent(np.pi / 2, 0.0, np.pi / 2))


class TestCompose:
    def test_identity_neutral(self, rng):
        nf = random_normal_form(rng)
        out = compose(nf, IDENTITY_NORMAL_FORM)
        assert max(abs(x - y) for x, y in zip(out.tuple3(), nf.tuple3())) < 1e-14

    def test_raising_coefficients_add(self):
        a = SU11NormalForm(0.3, 1.0, 0.0)
        b = SU11NormalForm(0.45, 1.0, 0.0)
        out = compose(a, b)
        assert abs(out.gamma_plus - 0.75) < 1e-14
        assert abs(out.sqrt_gamma3 - 1.0) < 1e-14
        assert abs(out.gamma_minus) < 1e-14

    def test_against_materialized_product(self):
        # raise-after-lower products stay inside the truncation: exact identity
        n = 16
        raise_only = SU11NormalForm(0.3, 1.0, 0.0)
        lower_only = SU11NormalForm(0.0, 1.0, -0.4)
        composed = compose(raise_only, lower_only)
        lhs = materialize(composed, n)
        rhs = materialize(raise_only, n) @ materialize(lower_only, n)
        assert np.abs(lhs - rhs).max() < 1e-10

    def test_scalars_and_k0_add(self):
        a = SU11NormalForm(0.1, 1.0, 0.2, gamma0=0.25j, scalar=0.5)
        b = SU11NormalForm(0.0, 0.9, 0.1, gamma0=-0.125j, scalar=0.25)
        out = compose(a, b)
        assert out.gamma0 == 0.125j and out.scalar == 0.75

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 31))
    def test_associativity(self, seed):
        rng = np.random.default_rng(seed)
        f1, f2, f3 = (random_normal_form(rng) for _ in range(3))
        lhs = compose(compose(f1, f2), f3)
        rhs = compose(f1, compose(f2, f3))
        assert max(abs(x - y) for x, y in zip(lhs.tuple3(), rhs.tuple3())) < 1e-10


class TestCoefficientTransforms:
    def test_smoothing_neutral_at_zero(self, rng):
        nf = random_normal_form(rng)
        out = apply_smoothing(0.0, nf)
        assert max(abs(x - y) for x, y in zip(out.tuple3(), nf.tuple3())) < 1e-15

    def test_wigner_smoothing_of_identity(self):
        # frozen golden from the composition oracle: lam = -1, identity input
        out = apply_smoothing(-1.0, IDENTITY_NORMAL_FORM)
        assert out.tuple3() == (-1.0, 2.0, -1.0)

    def test_smoothing_matches_compose_on_thermal(self):
        from phasespace.states import thermal_tfd_exponent

        nf = disentangle(thermal_tfd_exponent(0.3 / 0.7))  # f = 0.3
        lam = -0.5
        via_formula = apply_smoothing(lam, nf)
        via_compose = compose(smoothing_form(lam), nf)
        assert max(abs(x - y) for x, y in
                   zip(via_formula.tuple3(), via_compose.tuple3())) < 1e-12

    def test_smoothing_matches_compose_random(self, rng):
        for _ in range(100):
            nf = random_normal_form(rng)
            lam = rng.uniform(-1.0, 0.6)
            via_formula = apply_smoothing(lam, nf)
            mat = smoothing_matrix(lam) @ normal_form_matrix(nf)
            via_compose = normal_form_from_matrix(mat)
            assert max(abs(x - y) for x, y in
                       zip(via_formula.tuple3(), via_compose.tuple3())) < 1e-10

    def test_kernel_matches_compose_random(self, rng):
        for _ in range(100):
            nf = random_normal_form(rng)
            lam = rng.uniform(-1.0, 0.6)
            try:
                via_formula = kernel_coefficients(lam, nf)
            except SingularElementError:
                continue
            mat = (smoothing_matrix(lam) @ normal_form_matrix(nf)
                   @ conjugate_order_matrix(lam))
            via_compose = normal_form_from_matrix(mat)
            assert max(abs(x - y) for x, y in
                       zip(via_formula.tuple3(), via_compose.tuple3())) < 1e-10

    def test_kernel_linear_oscillator_case(self):
        # gamma t = 0.5, nbar = 0 damped oscillator against the matrix oracle
        gt = 0.5
        nf = disentangle(SU11Exponent(0.0, -gt, gt))
        lam = -1.0
        via_formula = kernel_coefficients(lam, nf)
        mat = (smoothing_matrix(lam) @ normal_form_matrix(nf)
               @ conjugate_order_matrix(lam))
        via_compose = normal_form_from_matrix(mat)
        assert max(abs(x - y) for x, y in
                   zip(via_formula.tuple3(), via_compose.tuple3())) < 1e-12

    def test_kernel_singular_at_zero_time(self):
        # the zero-time kernel is a delta: the two-sided sandwich is singular
        with pytest.raises(SingularElementError):
            kernel_coefficients(-0.5, IDENTITY_NORMAL_FORM)


class TestMaterialize:
    def test_identity(self):
        assert np.allclose(materialize(IDENTITY_NORMAL_FORM, 6), np.eye(36))

    def test_thermal_state_reproduction(self):
        from phasespace.states import thermal_tfd_exponent

        n, f = 30, 0.5
        nbar = f / (1 - f)
        nf = disentangle(thermal_tfd_exponent(nbar))
        vac = np.zeros(n * n, dtype=complex)
        vac[0] = 1.0
        produced = materialize(nf, n) @ vac
        p = (1 - f) * f ** np.arange(n)
        expected = fock.tfd_vector(np.diag(p / p.sum()).astype(complex))
        # compare against the unnormalized construction (tail renorm is ~f^n)
        direct = np.diag((1 - f) * f ** np.arange(n)).astype(complex).ravel()
        assert np.abs(produced - direct).max() < 1e-10
        assert np.abs(produced - expected).max() < 1e-9

    def test_k0_annihilates_identity_state(self):
        n = 10
        nf = SU11NormalForm(0.0, 1.0, 0.0, gamma0=0.7 - 0.2j)
        ident = fock.identity_state(n)
        assert np.abs(materialize(nf, n) @ ident - ident).max() < 1e-12

    def test_generator_commutators_interior(self):
        n = 12
        kp, k3, km, k0 = su11_generators(n)
        keep = np.zeros((n, n), dtype=bool)
        keep[: n - 1, : n - 1] = True
        keep = keep.ravel()
        c1 = (km @ kp - kp @ km - 2 * k3)[keep][:, keep]
        c2 = (k3 @ kp - kp @ k3 - kp)[keep][:, keep]
        c3 = (k3 @ km - km @ k3 + km)[keep][:, keep]
        for c in (c1, c2, c3):
            assert np.abs(c).max() < 1e-10
        for k in (kp, k3, km):
            assert np.abs(k0 @ k - k @ k0).max() < 1e-12
