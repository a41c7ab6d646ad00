"""Two-qubit state estimation toolkit.

Tomographic measurement models for photon-pair counting, Poisson
maximum-likelihood and minimum-AIC state estimation, Fisher-information
error bounds, and a Monte Carlo simulator for error scaling against
the quantum limit.
"""

from .exceptions import (
    CountsParseError,
    DegenerateModelError,
    InconsistentDirectionError,
    InvariantViolation,
    InversionError,
    TomographyError,
    UnboundedInformationError,
)
from .states import (
    CholeskyModel,
    RANK_NPARAMS,
    bures_distance_sq,
    check_density,
    cholesky_from_density,
    concurrence,
    density_from_cholesky,
    density_from_pauli,
    entanglement_of_formation,
    fidelity,
    pauli_basis,
    pauli_coefficients,
    von_neumann_entropy,
)
from .projectors import (
    ProjectorSet,
    b_matrix,
    check_counts,
    completeness_check,
    inseparable_projector_set,
    linear_tomography,
    local_projector_set,
    mean_counts,
    mean_counts_of_density,
    product_ket,
    projector_set_from_kets,
)
from .estimation import (
    EstimationResult,
    aic,
    kl_divergence,
    log_likelihood,
    log_likelihood_gradient,
    maice,
    mle,
)
from .fisher import (
    BoundReport,
    FisherMatrix,
    SldFisherMatrix,
    bound_coefficient,
    bures_quadratic_form,
    fisher_analytic,
    fisher_mc,
    score,
    sld,
    sld_fisher,
)
from .simulate import (
    BasisComparison,
    SimulationConfig,
    SweepResult,
    TrialRecord,
    compare_bases,
    emit_results,
    preset_state,
    read_counts,
    run_sweep,
    sample_counts,
    tile_estimates,
    true_model,
)

__version__ = "0.1.0"

__all__ = [
    "BasisComparison",
    "BoundReport",
    "CholeskyModel",
    "CountsParseError",
    "DegenerateModelError",
    "EstimationResult",
    "FisherMatrix",
    "InconsistentDirectionError",
    "InvariantViolation",
    "InversionError",
    "ProjectorSet",
    "RANK_NPARAMS",
    "SimulationConfig",
    "SldFisherMatrix",
    "SweepResult",
    "TomographyError",
    "TrialRecord",
    "UnboundedInformationError",
    "aic",
    "b_matrix",
    "bound_coefficient",
    "bures_distance_sq",
    "bures_quadratic_form",
    "check_counts",
    "check_density",
    "cholesky_from_density",
    "compare_bases",
    "completeness_check",
    "concurrence",
    "density_from_cholesky",
    "density_from_pauli",
    "emit_results",
    "entanglement_of_formation",
    "fidelity",
    "fisher_analytic",
    "fisher_mc",
    "inseparable_projector_set",
    "kl_divergence",
    "linear_tomography",
    "local_projector_set",
    "log_likelihood",
    "log_likelihood_gradient",
    "maice",
    "mean_counts",
    "mean_counts_of_density",
    "mle",
    "pauli_basis",
    "pauli_coefficients",
    "preset_state",
    "product_ket",
    "projector_set_from_kets",
    "read_counts",
    "run_sweep",
    "sample_counts",
    "score",
    "sld",
    "sld_fisher",
    "tile_estimates",
    "true_model",
    "von_neumann_entropy",
    "__version__",
]
