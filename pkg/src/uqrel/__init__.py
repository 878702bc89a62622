"""State-dependent error, disturbance and uncertainty relations for finite quantum systems."""
from .processes import (
    ClassicalChannel,
    Instrument,
    KrausChannel,
    Povm,
    TransferMap,
    adjoint_channel,
    adjoint_classical,
    adjoint_measurement,
    apply_channel,
    apply_classical,
    apply_measurement,
    compose_channels,
    compose_classical_after_measurement,
    compose_measurement_after_channel,
    induced_channel,
    induced_povm,
    joint_distribution,
)
from .sampling import (
    SeedSpec,
    non_informative_povm,
    random_channel,
    random_density,
    random_instrument,
    random_observable,
    random_povm,
)
from .systems import (
    TangentC,
    TangentQ,
    canonical_rep,
    gram_q,
    hermitian_basis,
    inner_c,
    inner_q,
    riesz_solve,
    seminorm_q,
)
from .transport import (
    compose_check,
    pullback_channel,
    pullback_measurement,
    pushforward_channel,
    pushforward_measurement,
)
from .uncertainty import (
    BoundTerms,
    RelationReport,
    bound_I_error_disturbance,
    bound_terms_joint,
    check_relation_error_disturbance,
    check_relation_errors,
    classical_loss,
    decomposition_check,
    disturbance,
    disturbanceless_predicate,
    error,
    errorless_predicate,
    no_free_measurement_demo,
    optimal_secondary,
    ozawa_chain_check,
    ozawa_disturbance,
    ozawa_error,
    robertson_reduction,
)

__version__ = "0.1.0"

__all__ = [
    "BoundTerms",
    "ClassicalChannel",
    "Instrument",
    "KrausChannel",
    "Povm",
    "RelationReport",
    "SeedSpec",
    "TangentC",
    "TangentQ",
    "TransferMap",
    "adjoint_channel",
    "adjoint_classical",
    "adjoint_measurement",
    "apply_channel",
    "apply_classical",
    "apply_measurement",
    "bound_I_error_disturbance",
    "bound_terms_joint",
    "canonical_rep",
    "check_relation_error_disturbance",
    "check_relation_errors",
    "classical_loss",
    "compose_channels",
    "compose_check",
    "compose_classical_after_measurement",
    "compose_measurement_after_channel",
    "decomposition_check",
    "disturbance",
    "disturbanceless_predicate",
    "error",
    "errorless_predicate",
    "gram_q",
    "hermitian_basis",
    "induced_channel",
    "induced_povm",
    "inner_c",
    "inner_q",
    "joint_distribution",
    "no_free_measurement_demo",
    "non_informative_povm",
    "optimal_secondary",
    "ozawa_chain_check",
    "ozawa_disturbance",
    "ozawa_error",
    "pullback_channel",
    "pullback_measurement",
    "pushforward_channel",
    "pushforward_measurement",
    "random_channel",
    "random_density",
    "random_instrument",
    "random_observable",
    "random_povm",
    "riesz_solve",
    "robertson_reduction",
    "seminorm_q",
]
