"""Truncated Fock-space linear algebra for one mode and its thermofield double.

Operators are plain complex ndarrays on the number basis {|0>, ..., |N-1>}.
The doubled (tilde) space has dimension N^2 with the row-major pairing
convention ``index(n, m) = n*N + m`` for |n, m>, so the thermofield vector of a
density matrix is literally ``rho.ravel()`` and operator identities of the
doubled space reduce to exact matrix identities of the truncation:

    (A ⊗ I) vec(rho) = vec(A rho)        left multiplication
    tilde_lift(A)    = I ⊗ conj(A)        right multiplication via the tilde mode

All functions are pure and never mutate their arguments; everything is safe
for concurrent use.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
import scipy.linalg

from .errors import (
    CutoffError,
    DensityMatrixError,
    MatrixOverflowError,
    TailMassError,
    TruncationWarning,
)

DEFAULT_CUTOFF = 40

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
TAIL_MASS_TOL = 1e-10
TAIL_MASS_LEVELS = 5

# scipy's Pade/scaling-squaring keeps ~1e-12 relative accuracy well past this
_EXPM_NORM_LIMIT = 700.0


def _check_cutoff(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise CutoffError(f"Fock cutoff must be an integer >= 2, got {n!r}")
    return int(n)


def ladder_operators(n: int):
    """Annihilation and creation matrices (a, a_dag) on an n-dim number basis."""
    n = _check_cutoff(n)
    a = np.zeros((n, n), dtype=complex)
    ks = np.arange(1, n)
    a[ks - 1, ks] = np.sqrt(ks)
    return a, a.conj().T


def number_operator(n: int) -> np.ndarray:
    return np.diag(np.arange(_check_cutoff(n), dtype=float)).astype(complex)


def matrix_exponential(m: np.ndarray) -> np.ndarray:
    """exp(m) by scaling-and-squaring; refuses non-finite input and output.

    Accuracy is ~1e-12 relative for norms up to a few tens; extreme norms fail
    loudly instead of returning inf/NaN entries.
    """
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise MatrixOverflowError("matrix exponential of non-finite input")
    if np.linalg.norm(m, np.inf) > _EXPM_NORM_LIMIT:
        raise MatrixOverflowError(
            f"matrix norm {np.linalg.norm(m, np.inf):.3g} too large for a "
            "trustworthy exponential"
        )
    out = scipy.linalg.expm(m)
    if not np.all(np.isfinite(out)):
        raise MatrixOverflowError("matrix exponential overflowed")
    return out


def displacement_operator(alpha: complex, n: int) -> np.ndarray:
    """D(alpha) = exp(alpha a_dag - conj(alpha) a) on the truncated basis.

    The generator is anti-hermitian, so the result is exactly unitary at any
    cutoff; it only *represents* the displacement faithfully while
    |alpha|^2 <= n/4 (heuristic), beyond which a TruncationWarning is issued.
    """
    n = _check_cutoff(n)
    alpha = complex(alpha)
    if abs(alpha) ** 2 > n / 4:
        warnings.warn(
            f"displacement |alpha|^2 = {abs(alpha)**2:.3g} exceeds cutoff/4 = "
            f"{n / 4:.3g}; matrix is unitary but truncation-biased",
            TruncationWarning,
            stacklevel=2,
        )
    a, ad = ladder_operators(n)
    return matrix_exponential(alpha * ad - np.conj(alpha) * a)


def squeeze_operator(z: complex, n: int) -> np.ndarray:
    """S(z) = exp((conj(z) a^2 - z a_dag^2)/2), z = r e^{i theta}.

    For theta = 0 and r > 0 this squeezes the x = Re(alpha) quadrature:
    <x^2> scales by e^{-2r} on the squeezed vacuum.
    """
    n = _check_cutoff(n)
    z = complex(z)
    r = abs(z)
    if r > 1.5 * math.sqrt(n / 40.0):
        warnings.warn(
            f"squeeze strength r = {r:.3g} unsafe for cutoff {n}",
            TruncationWarning,
            stacklevel=2,
        )
    a, ad = ladder_operators(n)
    return matrix_exponential(0.5 * (np.conj(z) * (a @ a) - z * (ad @ ad)))


def coherent_state_vector(alpha: complex, n: int) -> np.ndarray:
    """Amplitudes e^{-|alpha|^2/2} alpha^k / sqrt(k!) of |alpha> up to the cutoff."""
    n = _check_cutoff(n)
    alpha = complex(alpha)
    out = np.empty(n, dtype=complex)
    out[0] = 1.0
    for k in range(1, n):
        out[k] = out[k - 1] * alpha / math.sqrt(k)
    return out * math.exp(-abs(alpha) ** 2 / 2)


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Return rho as a complex ndarray after checking the density-matrix contract."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
        raise DensityMatrixError(f"expected a square matrix of dim >= 2, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise DensityMatrixError("density matrix has non-finite entries")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITICITY_TOL:
        raise DensityMatrixError(f"hermiticity violated by {herm:.3g}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise DensityMatrixError(f"trace {tr:.12g} deviates from 1")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if min_eig < -POSITIVITY_TOL:
        raise DensityMatrixError(f"minimum eigenvalue {min_eig:.3g} below tolerance")
    return rho


def tail_mass(rho: np.ndarray, levels: int = TAIL_MASS_LEVELS) -> float:
    """Population in the top ``levels`` number states."""
    diag = np.real(np.diag(np.asarray(rho)))
    return float(diag[-levels:].sum())


def check_tail_mass(rho: np.ndarray, levels: int = TAIL_MASS_LEVELS,
                    tol: float = TAIL_MASS_TOL) -> None:
    mass = tail_mass(rho, levels)
    if mass > tol:
        raise TailMassError(
            f"population {mass:.3g} within {levels} levels of the cutoff "
            f"(limit {tol:g}); raise the cutoff"
        )


def pair_index(n: int, m: int, cutoff: int) -> int:
    """Row-major index of |n, m> in the doubled space."""
    return n * cutoff + m


def identity_state(n: int) -> np.ndarray:
    """The unnormalized vector sum_k |k, k> (norm^2 = n); vec of the identity."""
    n = _check_cutoff(n)
    return np.eye(n, dtype=complex).ravel()


def tfd_vector(rho: np.ndarray) -> np.ndarray:
    """Vector of the doubled space whose pair-(n, m) entry is rho[n, m]."""
    rho = validate_density_matrix(rho)
    return rho.ravel().copy()


def system_embed(op: np.ndarray) -> np.ndarray:
    """op acting on the system factor: op ⊗ I."""
    op = np.asarray(op, dtype=complex)
    return np.kron(op, np.eye(op.shape[0], dtype=complex))


def tilde_lift(op: np.ndarray) -> np.ndarray:
    """The tilde image I ⊗ conj(op).

    With this embedding the conjugation rule A|I> = tilde(A)^dag |I> is an
    exact matrix identity at any cutoff (both sides equal vec(A)).
    """
    op = np.asarray(op, dtype=complex)
    return np.kron(np.eye(op.shape[0], dtype=complex), op.conj())
