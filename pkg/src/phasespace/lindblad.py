"""Brute-force master-equation integration on the truncated Fock space.

Fixed-step RK4 is used deliberately: reproducible golden values matter more
than speed at this scale.  The step validator follows the stability heuristic
dt <= 0.01 / max(gamma (nbar+1), kappa, |omega| + 2 N |chi|); the default step
is additionally derated by the chi N^2 spectral growth of the Kerr term.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import fock
from .errors import StabilityError
from .evolution import KerrDamped, MasterEquationParams, PhaseInsensitive

TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8


def max_stable_step(params: MasterEquationParams, n: int) -> float:
    if isinstance(params, PhaseInsensitive):
        rate = params.kappa
    else:
        rate = max(params.gamma * (params.nbar + 1.0),
                   abs(params.omega) + 2.0 * n * abs(params.chi))
    return 0.01 / max(rate, 1e-12)


def default_step(params: MasterEquationParams, n: int) -> float:
    if isinstance(params, PhaseInsensitive):
        rate = params.kappa
    else:
        rate = max(params.gamma * (params.nbar + 1.0),
                   abs(params.omega) + 2.0 * n * abs(params.chi),
                   abs(params.chi) * n * n)
    return 0.01 / max(rate, 1e-12)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    record_times: tuple = ()

    def __post_init__(self):
        if not self.dt > 0:
            raise StabilityError(f"time step must be positive, got {self.dt}")
        times = tuple(sorted(float(t) for t in self.record_times)) or (float(self.t_end),)
        if times and times[-1] > self.t_end + 1e-12:
            raise ValueError("record time beyond t_end")
        object.__setattr__(self, "record_times", times)

    def validate_for(self, params: MasterEquationParams, n: int) -> None:
        limit = max_stable_step(params, n)
        if self.dt > limit * (1 + 1e-12):
            raise StabilityError(
                f"dt = {self.dt:g} exceeds the stability heuristic {limit:g}"
            )


@lru_cache(maxsize=32)
def _operator_bundle(params: MasterEquationParams, n: int):
    a, ad = fock.ladder_operators(n)
    num = ad @ a
    if isinstance(params, PhaseInsensitive):
        k = params.kappa
        # drift = -kappa (num + 1/2); jumps a and a_dag with equal rate
        drift = -k * (num + 0.5 * np.eye(n))
        jumps = ((k, a, ad), (k, ad, a))
    else:
        h = params.omega * num + params.chi * (num @ num)
        aad = a @ ad
        drift = (-1j * h
                 - 0.5 * params.gamma * (params.nbar + 1.0) * num
                 - 0.5 * params.gamma * params.nbar * aad)
        jumps = ((params.gamma * (params.nbar + 1.0), a, ad),
                 (params.gamma * params.nbar, ad, a))
    return drift, jumps


def lindblad_rhs(params: MasterEquationParams, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation; traceless, hermiticity-preserving."""
    rho = np.asarray(rho, dtype=complex)
    drift, jumps = _operator_bundle(params, rho.shape[0])
    out = drift @ rho + rho @ drift.conj().T
    for rate, left, right in jumps:
        if rate != 0.0:
            out += rate * (left @ rho @ right)
    return out


def integrate(params: MasterEquationParams, rho0: np.ndarray,
              config: IntegratorConfig):
    """RK4-evolve rho0, returning [(t, rho)] at the recorded times.

    Each snapshot is contract-checked (trace within 1e-8, min eigenvalue
    >= -1e-8); violations abort with diagnostics rather than returning junk.
    """
    rho = fock.validate_density_matrix(rho0).copy()
    config.validate_for(params, rho.shape[0])
    dt = config.dt
    out = []
    t = 0.0
    for t_rec in config.record_times:
        span = t_rec - t
        steps = max(int(round(span / dt)), 1) if span > 1e-15 else 0
        step = span / steps if steps else 0.0
        for _ in range(steps):
            k1 = lindblad_rhs(params, rho)
            k2 = lindblad_rhs(params, rho + 0.5 * step * k1)
            k3 = lindblad_rhs(params, rho + 0.5 * step * k2)
            k4 = lindblad_rhs(params, rho + step * k3)
            rho = rho + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t_rec
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise StabilityError(
                f"trace drifted to {tr:.10g} at t = {t:g} (dt = {dt:g})"
            )
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
        if min_eig < -POSITIVITY_TOL:
            raise StabilityError(
                f"min eigenvalue {min_eig:.3g} at t = {t:g} (dt = {dt:g})"
            )
        out.append((t, rho.copy()))
    return out


@dataclass(frozen=True)
class Moments:
    trace: float
    purity: float
    mean_a: complex
    mean_n: float
    min_eig: float


def moments(rho: np.ndarray) -> Moments:
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    a, _ = fock.ladder_operators(n)
    return Moments(
        trace=float(np.trace(rho).real),
        purity=float(np.trace(rho @ rho).real),
        mean_a=complex(np.trace(a @ rho)),
        mean_n=float(np.real(np.trace(fock.number_operator(n) @ rho))),
        min_eig=float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()),
    )
