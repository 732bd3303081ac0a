"""Exception and warning taxonomy.

Every error carries a short machine-readable ``code`` so the CLI can emit a
stable one-line diagnostic (``error: <code>: <message>``) and map it to exit
status 2.
"""


class PhaseSpaceError(Exception):
    code = "error"


class CutoffError(PhaseSpaceError):
    """Invalid Fock-space truncation dimension."""
    code = "invalid-cutoff"


class DensityMatrixError(PhaseSpaceError):
    """Operator fails the density-matrix contract (hermiticity/trace/positivity)."""
    code = "invalid-density-matrix"


class TailMassError(PhaseSpaceError):
    """State puts non-negligible population near the truncation edge."""
    code = "tail-mass"


class MatrixOverflowError(PhaseSpaceError):
    """Matrix exponential left the representable range."""
    code = "matrix-overflow"


class SingularElementError(PhaseSpaceError):
    """Group element has no normal-ordered factorization (vanishing denominator)."""
    code = "singular-element"


class SingularOrderError(PhaseSpaceError):
    """Requested ordering lies at the singular end of the family."""
    code = "singular-order"


class OutOfFamilyError(PhaseSpaceError):
    """Distribution is not pointwise representable at the requested ordering."""
    code = "out-of-family"


class ClosedFormUnavailableError(PhaseSpaceError):
    """No closed-form distribution for this state; use the oracle instead."""
    code = "no-closed-form"


class GridCoverageError(PhaseSpaceError):
    """Phase-space grid does not cover the state support or kernel margin."""
    code = "grid-coverage"


class OrderMismatchError(PhaseSpaceError):
    """Field pair does not satisfy the complementary-order requirement."""
    code = "order-mismatch"


class GridMismatchError(PhaseSpaceError):
    code = "grid-mismatch"


class TruncationError(PhaseSpaceError):
    """Requested evaluation cannot be certified at any affordable cutoff."""
    code = "truncation"


class TailBoundError(PhaseSpaceError):
    """Series truncation bound cannot be met."""
    code = "tail-bound"


class StabilityError(PhaseSpaceError):
    """Integrator step violates the stability heuristic or drifted off contract."""
    code = "integrator-stability"


class KernelUnsupportedError(PhaseSpaceError):
    """Propagator kernel not available for this model (sector-dependent coefficients)."""
    code = "kernel-unsupported"


class ConfigError(PhaseSpaceError):
    """Malformed or inconsistent scenario configuration."""
    code = "config"


class TruncationWarning(UserWarning):
    """Parameters are outside the truncation-safety heuristic; results may be biased."""


class UncertifiedOrderWarning(UserWarning):
    """Ordering parameter above the certified range; generating series not certified."""


class CoverageWarning(UserWarning):
    """Field normalization deviates beyond the quadrature tolerance."""
