"""Quasiprobability distributions of bosonic states and their exact
dissipative evolution, cross-checked against brute-force Fock-space oracles."""

from .su11 import (
    OrderingParameter,
    SU11Exponent,
    SU11NormalForm,
    apply_smoothing,
    compose,
    disentangle,
    kernel_coefficients,
    materialize,
)
from .states import (
    Coherent,
    DeltaDistribution,
    NumberDiagonal,
    SqueezedThermalCoherent,
    StateSpec,
    ThermalCoherent,
    closed_form_phi,
    density_matrix,
    thermal_tfd_exponent,
)
from .distributions import (
    DistributionField,
    PhaseSpaceGrid,
    convolve_to_lower_order,
    delta_operator,
    differential_order_check,
    evaluate_grid,
    integrate,
    overlap_trace,
    phi_from_density,
)
from .evolution import (
    KerrDamped,
    MasterEquationParams,
    PhaseInsensitive,
    phi_evolved_coherent,
    phi_evolved_from_field,
    propagator_kernel,
    solution_exponent,
    sweep_order,
    tfd_liouvillian,
)
from .lindblad import IntegratorConfig, lindblad_rhs, moments
from .lindblad import integrate as integrate_master_equation

__version__ = "0.1.0"

__all__ = [
    "OrderingParameter", "SU11Exponent", "SU11NormalForm", "apply_smoothing",
    "compose", "disentangle", "kernel_coefficients", "materialize",
    "Coherent", "DeltaDistribution", "NumberDiagonal", "SqueezedThermalCoherent",
    "StateSpec", "ThermalCoherent", "closed_form_phi", "density_matrix",
    "thermal_tfd_exponent",
    "DistributionField", "PhaseSpaceGrid", "convolve_to_lower_order",
    "delta_operator", "differential_order_check", "evaluate_grid", "integrate",
    "overlap_trace", "phi_from_density",
    "KerrDamped", "MasterEquationParams", "PhaseInsensitive",
    "phi_evolved_coherent", "phi_evolved_from_field", "propagator_kernel",
    "solution_exponent", "sweep_order", "tfd_liouvillian",
    "IntegratorConfig", "lindblad_rhs", "moments", "integrate_master_equation",
    "__version__",
]
