"""Entropy and second-law computations on generalized probabilistic theories."""

from .decomposition import (
    ClassicalDecomposition,
    DoublyStochasticMatrix,
    Frame,
    birkhoff_decomposition,
    classical_decomposition,
    frame_overlap_matrix,
    frame_sums_to_order_unit,
    is_frame,
    majorizes,
)
from .egg import egg_beta, egg_decompose, egg_g, egg_nonuniqueness_witness
from .entropy import (
    EntropyReport,
    LogState,
    decomposition_entropy_search,
    gbit_entropy_inconsistency,
    log_state,
    measurement_entropy_search,
    orthogonal_mixture_relation,
    relative_entropy,
    renyi_entropy,
    spectral_entropy,
)
from .errors import DecompositionError, DomainError, GPTError, LinalgError, NotSelfDualError
from .linalg import SpectralData, bisection_root, projector_onto_span, symmetric_eigendecomposition
from .measurements import (
    Effect,
    Measurement,
    Observable,
    ProjectiveMeasurement,
    apply_projective,
    distinguishing_measurement,
    gbit_repeatability_check,
    gbit_side_operation,
    observable_apply_function,
    observable_eigendata_roundtrip,
    observable_from_spectral_data,
    pfister_discrimination,
    projective_measurement_from_faces,
    projective_measurement_from_frame,
)
from .models import (
    StateSpaceModel,
    StateVector,
    ball,
    classical,
    contains_cone,
    egg,
    gbit,
    inner_product,
    order_unit_value,
    probability_embedding,
    make_state,
    quantum,
    quantum_state,
    random_pure_state,
    random_state,
    state_from_dict,
)
from .second_law import SecondLawReport, mixing_concavity_check, second_law_projective, swap_entropy_decrease_demo
from .thermo import (
    GasConfig,
    ThermoLedger,
    isothermal_compression_work,
    mixing_protocol,
    run_petz_protocol,
    run_von_neumann_protocol,
    stirling_multiplicity_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "ClassicalDecomposition",
    "DecompositionError",
    "DomainError",
    "DoublyStochasticMatrix",
    "Effect",
    "EntropyReport",
    "Frame",
    "GPTError",
    "GasConfig",
    "LinalgError",
    "LogState",
    "Measurement",
    "NotSelfDualError",
    "Observable",
    "ProjectiveMeasurement",
    "SecondLawReport",
    "SpectralData",
    "StateSpaceModel",
    "StateVector",
    "ThermoLedger",
    "apply_projective",
    "ball",
    "birkhoff_decomposition",
    "bisection_root",
    "classical",
    "classical_decomposition",
    "contains_cone",
    "decomposition_entropy_search",
    "distinguishing_measurement",
    "egg",
    "egg_beta",
    "egg_decompose",
    "egg_g",
    "egg_nonuniqueness_witness",
    "frame_overlap_matrix",
    "frame_sums_to_order_unit",
    "gbit",
    "gbit_entropy_inconsistency",
    "gbit_repeatability_check",
    "gbit_side_operation",
    "inner_product",
    "is_frame",
    "isothermal_compression_work",
    "log_state",
    "majorizes",
    "make_state",
    "measurement_entropy_search",
    "mixing_concavity_check",
    "mixing_protocol",
    "observable_apply_function",
    "observable_eigendata_roundtrip",
    "observable_from_spectral_data",
    "order_unit_value",
    "orthogonal_mixture_relation",
    "pfister_discrimination",
    "probability_embedding",
    "projective_measurement_from_faces",
    "projective_measurement_from_frame",
    "projector_onto_span",
    "quantum",
    "quantum_state",
    "random_pure_state",
    "random_state",
    "relative_entropy",
    "renyi_entropy",
    "run_petz_protocol",
    "run_von_neumann_protocol",
    "second_law_projective",
    "spectral_entropy",
    "state_from_dict",
    "stirling_multiplicity_entropy",
    "swap_entropy_decrease_demo",
    "symmetric_eigendecomposition",
]
