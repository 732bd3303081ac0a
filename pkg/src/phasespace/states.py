"""Standard bosonic states: symbolic specs, truncated density matrices, and
closed-form phase-space distributions.

The squeezed-thermal-coherent density operator is

    rho = (1 - f) D(alpha0) S(z) exp(-beta n) S(z)^dag D(alpha0)^dag,   f = e^{-beta}

with the squeeze convention of :func:`phasespace.fock.squeeze_operator`
(x-quadrature squeezed for real z > 0).  The closed-form Phi^(a) below are
written in lam = -a/(1-a); two sign choices that appear ambiguous in older
literature are fixed here by the built-in generating-series oracle (see
tests/test_states.py and the `states` verification suite):

  * the thermal-coherent exponent is negative (normalizability also forces it),
  * the squeeze cross term enters X with a plus sign for this S(z) convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from . import fock
from .errors import OutOfFamilyError, SingularOrderError
from .su11 import OrderingParameter, SU11Exponent


@dataclass(frozen=True)
class Coherent:
    alpha0: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha0", complex(self.alpha0))


@dataclass(frozen=True)
class ThermalCoherent:
    alpha0: complex = 0.0
    f: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        f = float(self.f)
        if not 0.0 <= f < 1.0:
            raise ValueError(f"thermal weight f must lie in [0, 1), got {f}")
        object.__setattr__(self, "f", f)


@dataclass(frozen=True)
class SqueezedThermalCoherent:
    alpha0: complex = 0.0
    z: complex = 0.0
    f: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        z = complex(self.z)
        if abs(z) > 1.5:
            raise ValueError(f"squeeze strength |z| = {abs(z):.3g} exceeds the 1.5 guard")
        object.__setattr__(self, "z", z)
        f = float(self.f)
        if not 0.0 <= f < 1.0:
            raise ValueError(f"thermal weight f must lie in [0, 1), got {f}")
        object.__setattr__(self, "f", f)

    @property
    def r(self) -> float:
        return abs(self.z)

    @property
    def theta(self) -> float:
        return math.atan2(self.z.imag, self.z.real)


@dataclass(frozen=True)
class NumberDiagonal:
    probabilities: tuple

    def __post_init__(self):
        p = tuple(float(x) for x in self.probabilities)
        if len(p) == 0:
            raise ValueError("empty probability vector")
        if min(p) < 0:
            raise ValueError("negative probability")
        if abs(sum(p) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(p)!r}, not 1")
        object.__setattr__(self, "probabilities", p)


StateSpec = Union[Coherent, ThermalCoherent, SqueezedThermalCoherent, NumberDiagonal]


@dataclass(frozen=True)
class DeltaDistribution:
    """Tagged singular result: Phi^(1) of a coherent state is delta^2(alpha - center)."""
    center: complex


def shift(spec: StateSpec, beta: complex) -> StateSpec:
    """Displace a spec's center by beta (number-diagonal states cannot be shifted)."""
    if isinstance(spec, NumberDiagonal):
        raise ValueError("number-diagonal states have no displacement parameter")
    return replace(spec, alpha0=spec.alpha0 + beta)


def _thermal_diagonal(f: float, n: int) -> np.ndarray:
    ks = np.arange(n)
    if f == 0.0:
        p = np.zeros(n)
        p[0] = 1.0
    else:
        p = (1.0 - f) * f ** ks
    return p


def density_matrix(spec: StateSpec, n: int = fock.DEFAULT_CUTOFF) -> np.ndarray:
    """Truncated density matrix of a spec; fails if tail mass is non-negligible."""
    if isinstance(spec, Coherent):
        vec = fock.coherent_state_vector(spec.alpha0, n)
        rho = np.outer(vec, vec.conj())
    elif isinstance(spec, NumberDiagonal):
        if len(spec.probabilities) > n:
            raise ValueError("probability vector longer than the cutoff")
        p = np.zeros(n)
        p[: len(spec.probabilities)] = spec.probabilities
        rho = np.diag(p).astype(complex)
    elif isinstance(spec, (ThermalCoherent, SqueezedThermalCoherent)):
        rho = np.diag(_thermal_diagonal(spec.f, n)).astype(complex)
        if isinstance(spec, SqueezedThermalCoherent) and spec.z != 0:
            s = fock.squeeze_operator(spec.z, n)
            rho = s @ rho @ s.conj().T
        if spec.alpha0 != 0:
            d = fock.displacement_operator(spec.alpha0, n)
            rho = d @ rho @ d.conj().T
    else:
        raise TypeError(f"unknown state spec {spec!r}")
    fock.check_tail_mass(rho)
    # renormalize away the (checked-tiny) truncation loss so downstream
    # density-matrix contracts hold exactly
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return rho


def recommended_cutoff(spec: StateSpec, start: int = fock.DEFAULT_CUTOFF,
                       ceiling: int = 160) -> int:
    """Smallest cutoff (in steps of 8 from ``start``) passing the tail-mass gate."""
    n = start
    while n <= ceiling:
        try:
            density_matrix(spec, n)
            return n
        except fock.TailMassError:
            n += 8
    raise fock.TailMassError(
        f"no cutoff below {ceiling} holds the tail of {type(spec).__name__}"
    )


def thermal_tfd_exponent(nbar: float) -> SU11Exponent:
    """Exponent with e^(nbar (K+ + K- - 2 K3)) |0,0> equal to the thermal vector."""
    nbar = float(nbar)
    if nbar < 0:
        raise ValueError("mean occupation must be nonnegative")
    return SU11Exponent(gamma_plus=nbar, gamma3=-2.0 * nbar, gamma_minus=nbar)


def coverage_radius(spec: StateSpec) -> float:
    """Half-width a grid must reach to cover the state support: |alpha0| + 4 sigma.

    sigma is the widest Husimi quadrature spread, floored at the coherent
    value so plain coherent states require exactly |alpha0| + 4.
    """
    if isinstance(spec, Coherent):
        return abs(spec.alpha0) + 4.0
    if isinstance(spec, ThermalCoherent):
        sigma2 = 0.5 * (1.0 + spec.f) / (1.0 - spec.f) + 0.5
        return abs(spec.alpha0) + 4.0 * max(1.0, math.sqrt(sigma2))
    if isinstance(spec, SqueezedThermalCoherent):
        sigma2 = 0.5 * math.exp(2 * spec.r) * (1.0 + spec.f) / (1.0 - spec.f) + 0.5
        return abs(spec.alpha0) + 4.0 * max(1.0, math.sqrt(sigma2))
    if isinstance(spec, NumberDiagonal):
        n_top = len(spec.probabilities) - 1
        return math.sqrt(n_top + 1.0) + 4.0
    raise TypeError(f"unknown state spec {spec!r}")


def closed_form_phi_grid(spec: StateSpec, a: OrderingParameter, alphas) -> np.ndarray:
    """Vectorized closed-form Phi^(a) over an array of phase-space points."""
    alphas = np.asarray(alphas, dtype=complex)
    if isinstance(spec, Coherent):
        if a.is_singular:
            raise SingularOrderError(
                "a = 1 coherent distribution is a point mass; no sampled values"
            )
        # shared path with the f -> 0 thermal form keeps the reduction exact
        return _thermal_coherent_phi(spec.alpha0, 0.0, a.lam, alphas)
    if a.is_singular:
        raise SingularOrderError(
            f"{type(spec).__name__} has no pointwise distribution at a = 1"
        )
    lam = a.lam
    if isinstance(spec, ThermalCoherent):
        return _thermal_coherent_phi(spec.alpha0, spec.f, lam, alphas)
    if isinstance(spec, SqueezedThermalCoherent):
        if spec.z == 0:
            return _thermal_coherent_phi(spec.alpha0, spec.f, lam, alphas)
        return _squeezed_thermal_phi(spec, lam, alphas)
    from .errors import ClosedFormUnavailableError

    raise ClosedFormUnavailableError(
        f"no closed-form distribution for {type(spec).__name__}"
    )


def closed_form_phi(spec: StateSpec, a: OrderingParameter, alpha: complex):
    """Closed-form Phi^(a)(alpha) for coherent / thermal / squeezed specs.

    Returns a float, or a DeltaDistribution descriptor for the singular a = 1
    coherent case.  Number-diagonal states have no closed form here.
    """
    if a.is_singular and isinstance(spec, Coherent):
        return DeltaDistribution(center=spec.alpha0)
    return float(closed_form_phi_grid(spec, a, np.asarray(complex(alpha))))


def _thermal_coherent_phi(alpha0: complex, f: float, lam: float, alpha):
    # exponent sign is negative (normalizability; oracle-confirmed)
    c = (1.0 - f) * (1.0 - lam) / (1.0 - lam * f)
    return c / math.pi * np.exp(-c * np.abs(alpha - alpha0) ** 2)


def _squeezed_thermal_phi(spec: SqueezedThermalCoherent, lam: float, alpha):
    f, r, theta = spec.f, spec.r, spec.theta
    th = math.tanh(r)
    den = (1.0 - lam * f) ** 2 - (lam - f) ** 2 * th * th
    if den <= 0.0:
        raise OutOfFamilyError(
            f"squeezed-thermal distribution not pointwise representable at "
            f"lam = {lam:.6g} (denominator {den:.3g})"
        )
    d = np.asarray(alpha, dtype=complex) - spec.alpha0
    # cross term enters with + for this squeeze convention (oracle-arbitrated)
    x = ((1.0 - lam * f) - (lam - f) * th * th) * np.abs(d) ** 2 \
        + (1.0 + f) * (1.0 - lam) * th * (d * d * np.exp(-1j * theta)).real
    pref = (1.0 - f) * (1.0 - lam) / (math.cosh(r) * math.pi * math.sqrt(den))
    return pref * np.exp(-(1.0 - f) * (1.0 - lam) / den * x)


# ---------------------------------------------------------------------------
# canonical structured-text serialization (used by the CLI config)

_KIND_MAP = {
    "coherent": Coherent,
    "thermal_coherent": ThermalCoherent,
    "squeezed_thermal_coherent": SqueezedThermalCoherent,
    "number_diagonal": NumberDiagonal,
}


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def parse_complex(value) -> complex:
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    raise ValueError(f"cannot parse complex number from {value!r}")


def spec_to_dict(spec: StateSpec) -> dict:
    if isinstance(spec, Coherent):
        return {"kind": "coherent", "alpha0": format_complex(spec.alpha0)}
    if isinstance(spec, ThermalCoherent):
        return {"kind": "thermal_coherent", "alpha0": format_complex(spec.alpha0),
                "f": spec.f}
    if isinstance(spec, SqueezedThermalCoherent):
        return {"kind": "squeezed_thermal_coherent",
                "alpha0": format_complex(spec.alpha0),
                "z": format_complex(spec.z), "f": spec.f}
    if isinstance(spec, NumberDiagonal):
        return {"kind": "number_diagonal", "probabilities": list(spec.probabilities)}
    raise TypeError(f"unknown state spec {spec!r}")


def spec_from_dict(data: dict) -> StateSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError(f"state spec must be a mapping with a 'kind' key, got {data!r}")
    kind = data["kind"]
    if kind not in _KIND_MAP:
        raise ValueError(f"unknown state kind {kind!r}; expected one of {sorted(_KIND_MAP)}")
    fields = {k: v for k, v in data.items() if k != "kind"}
    cls = _KIND_MAP[kind]
    allowed = {
        Coherent: {"alpha0"},
        ThermalCoherent: {"alpha0", "f"},
        SqueezedThermalCoherent: {"alpha0", "z", "f"},
        NumberDiagonal: {"probabilities"},
    }[cls]
    unknown = set(fields) - allowed
    if unknown:
        raise ValueError(f"unknown state fields {sorted(unknown)} for kind {kind!r}")
    for key in ("alpha0", "z"):
        if key in fields:
            fields[key] = parse_complex(fields[key])
    if "probabilities" in fields:
        fields["probabilities"] = tuple(fields["probabilities"])
    return cls(**fields)
