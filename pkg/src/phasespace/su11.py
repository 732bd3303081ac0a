"""Exact manipulation of su(1,1) group elements on the doubled Fock space.

The generators are K+ = a_dag tilde_a_dag, K- = a tilde_a,
K3 = (a_dag a + tilde_a_dag tilde_a + 1)/2, with the conserved
K0 = a_dag a - tilde_a_dag tilde_a commuting with all three.  A group element

    exp(gamma0 K0 + scalar) * exp(gp K+ + g3 K3 + gm K-)

is represented either by its exponent coefficients (``SU11Exponent``) or by
the normal-ordered factorization

    exp(Gp K+) * exp((2 log s3) K3) * exp(Gm K-)        (``SU11NormalForm``)

where s3 = sqrt(Gamma3) is carried directly so no square-root branch is ever
taken: the K3 factor acts diagonally as s3^(n + m + 1), an integer power.

All coefficient arithmetic happens in the faithful 2x2 representation

    K3 -> [[1/2, 0], [0, -1/2]],  K+ -> [[0, 1], [0, 0]],  K- -> [[0, 0], [-1, 0]]

for which the commutation relations hold exactly, so composition and
disentangling reduce to 2x2 matrix identities:

    exp(gp K+ + g3 K3 + gm K-)  <->  cosh(phi) I + sinhc(phi) M,
    phi^2 = g3^2/4 - gp gm,      M = [[g3/2, gp], [-gm, -g3/2]],

and a normal form corresponds to [[s3 - Gp Gm / s3, Gp / s3], [-Gm / s3, 1/s3]].
cosh(phi) and sinhc(phi) = sinh(phi)/phi are even in phi, so they are
evaluated as functions of phi^2 alone (series near zero); the branch of
sqrt(phi^2) cancels identically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularElementError, SingularOrderError
from .fock import ladder_operators, matrix_exponential, system_embed, tilde_lift

_SERIES_THRESHOLD = 1e-6
_SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class SU11Exponent:
    """Coefficients of gp K+ + g3 K3 + gm K- plus the commuting gamma0 K0 + scalar."""
    gamma_plus: complex
    gamma3: complex
    gamma_minus: complex
    gamma0: complex = 0.0
    scalar: complex = 0.0

    def __post_init__(self):
        for name in ("gamma_plus", "gamma3", "gamma_minus", "gamma0", "scalar"):
            v = complex(getattr(self, name))
            if not np.isfinite(v.real) or not np.isfinite(v.imag):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class SU11NormalForm:
    """Normal-ordered coefficients (Gp, s3, Gm); s3 is sqrt of the K3 weight."""
    gamma_plus: complex
    sqrt_gamma3: complex
    gamma_minus: complex
    gamma0: complex = 0.0
    scalar: complex = 0.0

    def __post_init__(self):
        for name in ("gamma_plus", "sqrt_gamma3", "gamma_minus", "gamma0", "scalar"):
            v = complex(getattr(self, name))
            if not np.isfinite(v.real) or not np.isfinite(v.imag):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.sqrt_gamma3 == 0:
            raise SingularElementError("normal form requires sqrt_gamma3 != 0")

    def tuple3(self):
        return (self.gamma_plus, self.sqrt_gamma3, self.gamma_minus)


IDENTITY_NORMAL_FORM = SU11NormalForm(0.0, 1.0, 0.0)


@dataclass(frozen=True)
class OrderingParameter:
    """Label a <= 1 of the distribution family; a = 1, 1/2, 0 give P, Wigner, Q."""
    a: float

    def __post_init__(self):
        a = float(self.a)
        if not np.isfinite(a) or a > 1.0:
            raise ValueError(f"ordering parameter must satisfy a <= 1, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def is_singular(self) -> bool:
        return self.a == 1.0

    @property
    def certified(self) -> bool:
        """|lam| <= 1; the generating series is certified only here."""
        return self.a <= 0.5

    @property
    def lam(self) -> float:
        if self.is_singular:
            raise SingularOrderError("a = 1 has no finite generating-series argument")
        return -self.a / (1.0 - self.a)


def _cosh_even(phi2: complex) -> complex:
    if abs(phi2) < _SERIES_THRESHOLD:
        return 1.0 + phi2 / 2.0 + phi2 * phi2 / 24.0 + phi2 ** 3 / 720.0
    return np.cosh(np.sqrt(phi2))


def _sinhc_even(phi2: complex) -> complex:
    if abs(phi2) < _SERIES_THRESHOLD:
        return 1.0 + phi2 / 6.0 + phi2 * phi2 / 120.0 + phi2 ** 3 / 5040.0
    phi = np.sqrt(phi2)
    return np.sinh(phi) / phi


def disentangle(exponent: SU11Exponent) -> SU11NormalForm:
    """Normal-ordered factorization of exp(gp K+ + g3 K3 + gm K-).

    Gp = gp sinhc(phi) / d,  Gm = gm sinhc(phi) / d,  s3 = 1/d with
    d = cosh(phi) - (g3/2) sinhc(phi) and phi^2 = g3^2/4 - gp gm.
    """
    gp, g3, gm = exponent.gamma_plus, exponent.gamma3, exponent.gamma_minus
    phi2 = g3 * g3 / 4.0 - gp * gm
    c = _cosh_even(phi2)
    s = _sinhc_even(phi2)
    d = c - 0.5 * g3 * s
    if abs(d) < _SINGULAR_TOL * max(1.0, abs(c), abs(0.5 * g3 * s)):
        raise SingularElementError(
            f"singular group element: normal-form denominator {d:.3g} vanishes"
        )
    return SU11NormalForm(
        gamma_plus=gp * s / d,
        sqrt_gamma3=1.0 / d,
        gamma_minus=gm * s / d,
        gamma0=exponent.gamma0,
        scalar=exponent.scalar,
    )


def exponent_matrix(exponent: SU11Exponent) -> np.ndarray:
    """2x2 image of exp(gp K+ + g3 K3 + gm K-): cosh(phi) I + sinhc(phi) M."""
    gp, g3, gm = exponent.gamma_plus, exponent.gamma3, exponent.gamma_minus
    phi2 = g3 * g3 / 4.0 - gp * gm
    c = _cosh_even(phi2)
    s = _sinhc_even(phi2)
    return np.array(
        [[c + 0.5 * g3 * s, gp * s], [-gm * s, c - 0.5 * g3 * s]], dtype=complex
    )


def normal_form_matrix(nf: SU11NormalForm) -> np.ndarray:
    gp, s3, gm = nf.tuple3()
    return np.array(
        [[s3 - gp * gm / s3, gp / s3], [-gm / s3, 1.0 / s3]], dtype=complex
    )


def normal_form_from_matrix(mat: np.ndarray, gamma0: complex = 0.0,
                            scalar: complex = 0.0) -> SU11NormalForm:
    d = mat[1, 1]
    if abs(d) < _SINGULAR_TOL * max(1.0, abs(mat[0, 0]), abs(mat[0, 1]), abs(mat[1, 0])):
        raise SingularElementError(
            "group element has no normal form (vanishing lower-right entry)"
        )
    return SU11NormalForm(
        gamma_plus=mat[0, 1] / d,
        sqrt_gamma3=1.0 / d,
        gamma_minus=-mat[1, 0] / d,
        gamma0=gamma0,
        scalar=scalar,
    )


def compose(first: SU11NormalForm, second: SU11NormalForm) -> SU11NormalForm:
    """Normal form of the operator product first . second.

    K0 coefficients and scalars add since both commute with the su(1,1) part.
    """
    mat = normal_form_matrix(first) @ normal_form_matrix(second)
    return normal_form_from_matrix(
        mat, gamma0=first.gamma0 + second.gamma0, scalar=first.scalar + second.scalar
    )


def smoothing_matrix(lam: complex) -> np.ndarray:
    """2x2 image of the order-smoothing element exp(-a (K+ + K- - 2 K3)).

    The exponent is nilpotent in the 2x2 representation, so the image is
    I + [[a, -a], [a, -a]] with a = -lam/(1 - lam); it is finite for every lam.
    """
    a = -lam / (1.0 - lam)
    return np.array([[1.0 + a, -a], [a, 1.0 - a]], dtype=complex)


def conjugate_order_matrix(lam: complex) -> np.ndarray:
    """2x2 image of exp(-(1-a)(K+ + K- - 2 K3)), the complementary-order element.

    Its own normal form is singular at a = 0, but the matrix is always finite,
    which is why kernel coefficients are assembled at the matrix level.
    """
    b = 1.0 / (1.0 - lam)   # b = 1 - a
    return np.array([[1.0 + b, -b], [b, 1.0 - b]], dtype=complex)


def smoothing_form(lam: complex) -> SU11NormalForm:
    """Normal form of the order-smoothing element: Gp = Gm = lam, s3 = 1 - lam."""
    return SU11NormalForm(lam, 1.0 - lam, lam)


def apply_smoothing(lam: complex, nf: SU11NormalForm) -> SU11NormalForm:
    """Left-compose the order-smoothing element: normal form of smooth(lam) . nf.

    Closed form (all three coefficients share the denominator 1 - lam*Gp):

        Gp' = 1 - (1 - lam)(1 - Gp) / (1 - lam Gp)
        Gm' = 1 - ((1 - Gm)(1 - lam Gp) - lam Gamma3) / (1 - lam Gp)
        s3' = (1 - lam) s3 / (1 - lam Gp)

    Must agree (and is continuously tested) with compose(smoothing_form, nf).
    """
    gp, s3, gm = nf.tuple3()
    g3 = s3 * s3
    den = 1.0 - lam * gp
    if abs(den) < _SINGULAR_TOL * max(1.0, abs(lam * gp)):
        raise SingularElementError("smoothing transform hit a singular denominator")
    return SU11NormalForm(
        gamma_plus=1.0 - (1.0 - lam) * (1.0 - gp) / den,
        sqrt_gamma3=(1.0 - lam) * s3 / den,
        gamma_minus=1.0 - ((1.0 - gm) * den - lam * g3) / den,
        gamma0=nf.gamma0,
        scalar=nf.scalar,
    )


def kernel_coefficients(lam: complex, nf: SU11NormalForm) -> SU11NormalForm:
    """Two-sided sandwich smooth(lam) . nf . conjugate_order(lam) in normal form.

    Closed form, with D = (lam - Gm)(1 - lam Gp) - lam Gamma3:

        Gp'' = 1 - (1 - lam)((1 - Gp)(lam - Gm) - Gamma3) / D
        Gm'' = 1 + (1 - lam)((1 - Gm)(1 - lam Gp) - lam Gamma3) / D
        s3'' = -(1 - lam)^2 s3 / D

    D -> 0 is the propagator's delta-kernel limit (e.g. zero evolution time).
    """
    gp, s3, gm = nf.tuple3()
    g3 = s3 * s3
    den = (lam - gm) * (1.0 - lam * gp) - lam * g3
    if abs(den) < _SINGULAR_TOL * max(1.0, abs(lam - gm), abs(lam * g3)):
        raise SingularElementError(
            f"kernel coefficients singular (denominator {den:.3g}); "
            "the kernel is delta-like at these parameters"
        )
    return SU11NormalForm(
        gamma_plus=1.0 - (1.0 - lam) * ((1.0 - gp) * (lam - gm) - g3) / den,
        sqrt_gamma3=-(1.0 - lam) ** 2 * s3 / den,
        gamma_minus=1.0 + (1.0 - lam) * ((1.0 - gm) * (1.0 - lam * gp) - lam * g3) / den,
        gamma0=nf.gamma0,
        scalar=nf.scalar,
    )


def su11_generators(n: int):
    """Doubled-space matrices (K+, K3, K-, K0) at cutoff n."""
    a, ad = ladder_operators(n)
    num = ad @ a
    kp = system_embed(ad) @ tilde_lift(ad)   # a_dag tilde_a_dag = a_dag ⊗ a_dag
    km = kp.conj().T
    n_l = system_embed(num)
    n_r = tilde_lift(num)                    # I ⊗ num (real diagonal)
    k3 = 0.5 * (n_l + n_r + np.eye(n * n))
    k0 = n_l - n_r
    return kp, k3, km, k0


def _k3_diagonal(n: int) -> np.ndarray:
    ks = np.arange(n, dtype=float)
    return (ks[:, None] + ks[None, :]).ravel() + 1.0


def materialize(nf: SU11NormalForm, n: int) -> np.ndarray:
    """Dense doubled-space matrix of the group element at cutoff n.

    exp(Gp K+) and exp(Gm K-) are exponentials of nilpotent matrices; the K3
    factor is the exact diagonal s3^(n+m+1) and exp(gamma0 K0) the exact
    diagonal e^(gamma0 (n-m)), so no square-root branch enters.
    """
    kp, _, km, _ = su11_generators(n)
    gp, s3, gm = nf.tuple3()
    k3fac = s3 ** _k3_diagonal(n)
    ks = np.arange(n, dtype=float)
    k0fac = np.exp(nf.gamma0 * (ks[:, None] - ks[None, :]).ravel())
    left = matrix_exponential(gp * kp)
    right = matrix_exponential(gm * km)
    out = (left * k3fac[None, :]) @ right
    return np.exp(nf.scalar) * (k0fac[:, None] * out)


def materialize_exponent(exponent: SU11Exponent, n: int) -> np.ndarray:
    """Direct matrix exponential of the full exponent (oracle counterpart)."""
    kp, k3, km, k0 = su11_generators(n)
    m = (exponent.gamma_plus * kp + exponent.gamma3 * k3 + exponent.gamma_minus * km
         + exponent.gamma0 * k0)
    return np.exp(exponent.scalar) * matrix_exponential(m)
