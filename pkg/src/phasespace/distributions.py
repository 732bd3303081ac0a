"""Phi^(a) evaluation engine.

The ground-truth route ("oracle") evaluates the generating series of the
displaced number distribution,

    Phi^(a)(alpha) = (1 - lam)/pi * sum_n lam^n <n| D(alpha)^dag rho D(alpha) |n>,
    lam = -a/(1 - a),

with D built from the anti-hermitian generator so it is exactly unitary at any
cutoff.  For grids this is evaluated through one eigendecomposition of the
quadrature generator: writing alpha = r e^{i phi},

    D(alpha) = R(phi) exp(-i r H) R(phi)^dag,   H = i(a_dag - a) = V L V^dag,

so each grid point costs two dense matvec-batches instead of a fresh matrix
exponential.  The evaluation cutoff is chosen from the displaced support and
then *certified*: if the displaced occupation near the cutoff edge is not
negligible the cutoff is raised and the evaluation repeated.

Equivalently Phi^(a) = (1/pi) Tr[rho Delta^(a)(alpha)] with the hermitian
kernel Delta^(a) = D(alpha) (1-lam) lam^n D(alpha)^dag; `delta_operator`
materializes that kernel directly and is used to cross-check realness.
"""
from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import fock, states
from .errors import (
    CoverageWarning,
    GridCoverageError,
    GridMismatchError,
    OrderMismatchError,
    SingularOrderError,
    TruncationError,
    UncertifiedOrderWarning,
)
from .su11 import OrderingParameter

NORMALIZATION_TOL = 5e-3
_EDGE_GUARD_LEVELS = 8
_EDGE_GUARD_TOL = 1e-12
_MAX_EVAL_CUTOFF = 768
_CHUNK_POINTS = 2048


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform square grid over |Re alpha|, |Im alpha| <= half_width.

    Odd point count keeps the origin on the lattice.  values[iy, ix]
    corresponds to alpha = axis[ix] + 1j * axis[iy].
    """
    half_width: float
    points: int

    def __post_init__(self):
        hw = float(self.half_width)
        pts = int(self.points)
        if not (hw > 0 and np.isfinite(hw)):
            raise ValueError(f"half width must be positive, got {hw}")
        if pts < 3 or pts % 2 == 0:
            raise ValueError(f"point count must be odd and >= 3, got {pts}")
        object.__setattr__(self, "half_width", hw)
        object.__setattr__(self, "points", pts)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points)

    @property
    def alphas(self) -> np.ndarray:
        ax = self.axis
        return ax[None, :] + 1j * ax[:, None]

    @property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w[:, None] * w[None, :]


@dataclass
class DistributionField:
    """Sampled Phi^(a) with provenance and the recorded imaginary residue."""
    grid: PhaseSpaceGrid
    values: np.ndarray
    a: OrderingParameter
    provenance: dict = field(default_factory=dict)
    max_imag_residue: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.points, self.grid.points):
            raise ValueError(
                f"values shape {vals.shape} does not match grid {self.grid.points}^2"
            )
        self.values = vals


def integrate(field: DistributionField) -> float:
    """Trapezoidal d^2 alpha integral of the field."""
    return float(np.sum(field.values * field.grid.trapezoid_weights))


def field_mean(field: DistributionField) -> complex:
    """First moment integral(alpha Phi) / integral(Phi)."""
    w = field.grid.trapezoid_weights
    norm = np.sum(field.values * w)
    return complex(np.sum(field.grid.alphas * field.values * w) / norm)


def check_normalization(field: DistributionField, tol: float = NORMALIZATION_TOL) -> float:
    total = integrate(field)
    if abs(total - 1.0) > tol:
        warnings.warn(
            f"field integrates to {total:.6g}; grid likely under-covers the state",
            CoverageWarning,
            stacklevel=2,
        )
    return total


# ---------------------------------------------------------------------------
# oracle core

def displaced_number_diagonals(rho: np.ndarray, alphas, n_eval: int,
                               chunk: int = _CHUNK_POINTS) -> np.ndarray:
    """Occupations d[p, n] = <n| D(alpha_p)^dag rho D(alpha_p) |n> on n_eval levels.

    rho is eigendecomposed once; each eigenvector is displaced through the
    one-time eigendecomposition of i(a_dag - a).  All factors are unitary, so
    the result is accurate to rounding for states supported away from the
    evaluation edge (certified by the caller).
    """
    rho = np.asarray(rho, dtype=complex)
    n_rho = rho.shape[0]
    if n_eval < n_rho:
        raise ValueError("evaluation cutoff below the state cutoff")
    alphas = np.asarray(alphas, dtype=complex).ravel()
    evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = evals > max(1e-16, float(evals.max()) * 1e-15)
    weights = evals[keep]
    vectors = evecs[:, keep]

    a, ad = fock.ladder_operators(n_eval)
    lam, v = scipy.linalg.eigh(1j * (ad - a))
    vt = v.T.copy()
    vc = v.conj().copy()

    ns = np.arange(n_eval)
    r = np.abs(alphas)
    phi = np.where(alphas == 0, 0.0, np.angle(alphas))
    out = np.zeros((alphas.size, n_eval))
    for lo in range(0, alphas.size, chunk):
        sl = slice(lo, min(lo + chunk, alphas.size))
        row_phase = np.exp(-1j * np.outer(phi[sl], ns))
        rot_phase = np.exp(1j * np.outer(r[sl], lam))
        for i in range(weights.size):
            psi = np.zeros(n_eval, dtype=complex)
            psi[:n_rho] = vectors[:, i]
            s = row_phase * psi[None, :]
            w = s @ vc
            w *= rot_phase
            u = w @ vt
            u *= row_phase.conj()
            out[sl] += weights[i] * np.abs(u) ** 2
    return out


def estimate_eval_cutoff(rho: np.ndarray, alphas) -> int:
    """Poisson-style estimate of the cutoff needed for the displaced supports."""
    rho = np.asarray(rho)
    pop = np.real(np.diag(rho))
    csum = np.cumsum(pop)
    n_state = int(np.searchsorted(csum, 1.0 - 1e-13)) + 1
    r_max = float(np.abs(np.asarray(alphas, dtype=complex)).max(initial=0.0))
    mu = (r_max + math.sqrt(n_state)) ** 2
    guess = int(math.ceil(mu + 12.0 * math.sqrt(mu) + 25.0))
    return max(guess, rho.shape[0])


def _lam_weights(lam: float, n_eval: int) -> np.ndarray:
    if lam == 0.0:
        w = np.zeros(n_eval)
        w[0] = 1.0
        return w
    return np.power(float(lam), np.arange(n_eval))


def oracle_values(rho: np.ndarray, a: OrderingParameter, alphas,
                  n_eval: int | None = None) -> np.ndarray:
    """Generating-series Phi^(a) at the given points, with certified cutoff.

    Raises TruncationError if the edge-occupancy certificate cannot be met
    below the hard cutoff ceiling.  Orders a > 1/2 (|lam| > 1) evaluate but
    carry an UncertifiedOrderWarning: the series is divergent in the
    infinite-dimensional limit for many states.
    """
    if a.is_singular:
        raise SingularOrderError("a = 1 distributions are singular; no series value")
    if not a.certified:
        warnings.warn(
            f"ordering a = {a.a:.4g} is above the certified range a <= 1/2",
            UncertifiedOrderWarning,
            stacklevel=2,
        )
    rho = np.asarray(rho, dtype=complex)
    alphas = np.asarray(alphas, dtype=complex)
    flat = alphas.ravel()
    lam = a.lam
    n_eval = n_eval or estimate_eval_cutoff(rho, flat)
    while True:
        d = displaced_number_diagonals(rho, flat, n_eval)
        # |lam|^n <= 1 in the certified range, so raw edge occupancy bounds the
        # series tail as well as the truncated-rotation bias
        edge = float(d[:, -_EDGE_GUARD_LEVELS:].sum(axis=1).max())
        if edge < _EDGE_GUARD_TOL or not a.certified:
            break
        if n_eval >= _MAX_EVAL_CUTOFF:
            raise TruncationError(
                f"displaced support reaches the evaluation edge (occupancy "
                f"{edge:.3g}) even at cutoff {n_eval}"
            )
        n_eval = min(_MAX_EVAL_CUTOFF, int(n_eval * 1.4) + 16)
    vals = (1.0 - lam) / math.pi * (d @ _lam_weights(lam, n_eval))
    return vals.reshape(alphas.shape)


def phi_from_density(rho: np.ndarray, a: OrderingParameter, alpha: complex,
                     n_eval: int | None = None) -> float:
    """Single-point generating-series Phi^(a)."""
    return float(oracle_values(rho, a, np.array([complex(alpha)]), n_eval)[0])


def delta_operator(a: OrderingParameter, alpha: complex, n: int) -> np.ndarray:
    """Hermitian kernel D(alpha) (1-lam) lam^{n} D(alpha)^dag with trace -> 1."""
    if a.is_singular:
        raise SingularOrderError("a = 1 kernel is singular")
    lam = a.lam
    d = fock.displacement_operator(alpha, n)
    core = (1.0 - lam) * _lam_weights(lam, n)
    return (d * core[None, :]) @ d.conj().T


# ---------------------------------------------------------------------------
# grid evaluation

def _rho_digest(rho: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(rho).tobytes()).hexdigest()[:16]


def _closed_form_values(spec, a: OrderingParameter, grid: PhaseSpaceGrid):
    vals = states.closed_form_phi_grid(spec, a, grid.alphas)
    return np.asarray(vals, dtype=float), 0.0


def evaluate_grid(source, a: OrderingParameter, grid: PhaseSpaceGrid,
                  method: str = "closed-form", cutoff: int = fock.DEFAULT_CUTOFF,
                  enforce_coverage: bool = True, threads: int = 1) -> DistributionField:
    """Sample Phi^(a) of a state spec or density matrix on a grid.

    method "closed-form" dispatches on the spec (raises for states without
    one); "oracle" goes through the generating series.  Coverage: the grid
    must reach the state support (half_width >= coverage radius).
    """
    if method not in ("closed-form", "oracle"):
        raise ValueError(f"unknown method {method!r}")
    is_spec = not isinstance(source, np.ndarray)
    if is_spec:
        required = states.coverage_radius(source)
        prov_state = states.spec_to_dict(source)
    else:
        rho = fock.validate_density_matrix(source)
        mean_alpha = complex(np.trace(fock.ladder_operators(rho.shape[0])[0] @ rho))
        mean_n = float(np.real(np.trace(fock.number_operator(rho.shape[0]) @ rho)))
        spread = max(1.0, math.sqrt(max(mean_n - abs(mean_alpha) ** 2, 0.0) + 1.0))
        required = abs(mean_alpha) + 4.0 * spread
        prov_state = {"kind": "density-matrix", "sha256": _rho_digest(rho)}
    if enforce_coverage and grid.half_width < required - 1e-12:
        raise GridCoverageError(
            f"grid half-width {grid.half_width:.3g} below the coverage "
            f"radius {required:.3g}"
        )

    if method == "closed-form":
        if not is_spec:
            raise ValueError("closed-form evaluation requires a state spec")
        vals, residue = _closed_form_values(source, a, grid)
    else:
        if is_spec:
            rho = states.density_matrix(source, cutoff)
        vals = _oracle_grid_values(rho, a, grid, threads)
        residue = 0.0  # series assembled from |amplitude|^2: exactly real

    return DistributionField(
        grid=grid,
        values=vals,
        a=a,
        provenance={
            "method": method,
            "state": prov_state,
            "time": None,
            "certified": a.certified,
        },
        max_imag_residue=residue,
    )


def _oracle_grid_values(rho: np.ndarray, a: OrderingParameter,
                        grid: PhaseSpaceGrid, threads: int = 1) -> np.ndarray:
    flat = grid.alphas.ravel()
    if threads <= 1:
        return oracle_values(rho, a, flat).reshape(grid.points, grid.points)
    # deterministic assembly: fixed chunking by index regardless of pool order
    from concurrent.futures import ThreadPoolExecutor

    n_eval = estimate_eval_cutoff(rho, flat)
    chunks = np.array_split(np.arange(flat.size), threads * 4)
    out = np.empty(flat.size)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {
            pool.submit(oracle_values, rho, a, flat[idx], n_eval): idx
            for idx in chunks if idx.size
        }
        for fut, idx in futures.items():
            out[idx] = fut.result()
    return out.reshape(grid.points, grid.points)


# ---------------------------------------------------------------------------
# order conversion and pairings

def convolve_to_lower_order(fld: DistributionField, b: float) -> DistributionField:
    """Gaussian smoothing Phi^(a-b)(alpha) = (1/pi b) int d^2beta Phi^(a)(beta) e^{-|alpha-beta|^2/b}.

    The Gaussian factorizes over the two axes, so the quadrature is two dense
    matrix products.  The grid must keep a 4*sqrt(b) margin beyond the field's
    own support.
    """
    if not b > 0:
        raise ValueError("smoothing width b must be positive")
    ax = fld.grid.axis
    support = np.abs(fld.values) > 1e-6 * max(np.abs(fld.values).max(), 1e-300)
    if support.any():
        iy, ix = np.nonzero(support)
        reach = max(np.abs(ax[ix]).max(), np.abs(ax[iy]).max())
    else:
        reach = 0.0
    if fld.grid.half_width < reach + 4.0 * math.sqrt(b) - 1e-12:
        raise GridCoverageError(
            f"grid margin {fld.grid.half_width - reach:.3g} below the "
            f"4*sqrt(b) = {4 * math.sqrt(b):.3g} smoothing margin"
        )
    w = np.full(fld.grid.points, fld.grid.spacing)
    w[0] = w[-1] = 0.5 * fld.grid.spacing
    kern = np.exp(-np.subtract.outer(ax, ax) ** 2 / b)
    smoothed = (kern * w[None, :]) @ fld.values @ (kern * w[None, :]).T
    smoothed /= math.pi * b
    prov = dict(fld.provenance)
    prov["method"] = "convolved"
    return DistributionField(
        grid=fld.grid,
        values=smoothed,
        a=OrderingParameter(fld.a.a - b),
        provenance=prov,
        max_imag_residue=fld.max_imag_residue,
    )


@dataclass(frozen=True)
class OrderCheckReport:
    a: float
    b: float
    max_residual: float
    coefficient: float   # max_residual / (a-b)^2: finite for smooth fields


def differential_order_check(field_b: DistributionField,
                             field_a: DistributionField) -> OrderCheckReport:
    """First-order check of Phi^(a) = exp[-(a-b) d^2/(dalpha dalpha*)] Phi^(b).

    Uses d^2/(dalpha dalpha*) = (1/4) Laplacian and central differences on the
    grid interior; the residual of the first-order expansion must scale as
    (a-b)^2.
    """
    if field_a.grid != field_b.grid:
        raise GridMismatchError("order check requires a common grid")
    da = field_a.a.a - field_b.a.a
    if abs(da) > 0.05:
        raise ValueError("differential check is first-order; need |a - b| <= 0.05")
    h = field_b.grid.spacing
    f = field_b.values
    lap = np.zeros_like(f)
    lap[1:-1, 1:-1] = (
        f[1:-1, 2:] + f[1:-1, :-2] + f[2:, 1:-1] + f[:-2, 1:-1] - 4 * f[1:-1, 1:-1]
    ) / h ** 2
    predicted = f - da * 0.25 * lap
    residual = np.abs(field_a.values - predicted)[2:-2, 2:-2]
    max_res = float(residual.max()) if residual.size else 0.0
    coeff = max_res / da ** 2 if da != 0 else 0.0
    return OrderCheckReport(a=field_a.a.a, b=field_b.a.a,
                            max_residual=max_res, coefficient=coeff)


def overlap_trace(field_rho: DistributionField, field_a: DistributionField) -> float:
    """Tr(A rho) = pi int d^2beta Phi^(a)_rho Phi^(1-a)_A for complementary orders."""
    if abs(field_rho.a.a + field_a.a.a - 1.0) > 1e-12:
        raise OrderMismatchError(
            f"orders {field_rho.a.a} and {field_a.a.a} are not complementary"
        )
    if field_rho.grid != field_a.grid:
        raise GridMismatchError("overlap requires a common grid")
    w = field_rho.grid.trapezoid_weights
    return float(math.pi * np.sum(field_rho.values * field_a.values * w))


# ---------------------------------------------------------------------------
# CSV + sidecar serialization

CSV_HEADER = "re_alpha,im_alpha,phi"


def field_to_csv_text(fld: DistributionField) -> str:
    """17-significant-digit CSV, rows in (im, re) lexicographic order."""
    ax = fld.grid.axis
    lines = [CSV_HEADER]
    for iy in range(fld.grid.points):
        for ix in range(fld.grid.points):
            lines.append(
                f"{ax[ix]:.17g},{ax[iy]:.17g},{fld.values[iy, ix]:.17g}"
            )
    return "\n".join(lines) + "\n"


def write_field_csv(fld: DistributionField, path, sidecar: dict | None = None) -> None:
    import yaml

    with open(path, "w", newline="") as fh:
        fh.write(field_to_csv_text(fld))
    meta = {
        "order_a": fld.a.a,
        "state": fld.provenance.get("state"),
        "time": fld.provenance.get("time"),
        "method": fld.provenance.get("method"),
        "certified": fld.provenance.get("certified"),
        "grid": {"half_width": fld.grid.half_width, "points": fld.grid.points},
        "max_imag_residue": fld.max_imag_residue,
        "normalization": integrate(fld),
    }
    if sidecar:
        meta.update(sidecar)
    with open(str(path) + ".meta.yaml", "w") as fh:
        yaml.safe_dump(meta, fh, sort_keys=True)


def read_field_csv(path, a: OrderingParameter) -> DistributionField:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    res = np.unique(data[:, 0])
    pts = res.size
    vals = data[:, 2].reshape(pts, pts)
    grid = PhaseSpaceGrid(half_width=float(res.max()), points=pts)
    return DistributionField(grid=grid, values=vals, a=a,
                             provenance={"method": "loaded"})
