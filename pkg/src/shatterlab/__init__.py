"""shatterlab: executable checks for a chain of learning-theory guarantees.

Robust online learning over finite real-valued concept classes, global
stability, private PAC learning, one-way communication reductions, and
Holevo-information bounds for small quantum state classes, with every
guarantee the library claims wired to a test or an experiment.
"""

from .concepts import (
    Concept,
    ConceptClass,
    Cover,
    Distribution,
    DomainPoint,
    LabeledExample,
    binary_entropy,
    cover_new,
    function_ball,
    loss,
    round_to_grid,
    superbin_members,
)
from .dimensions import (
    DimensionResult,
    SfatCache,
    ShatterTree,
    fat,
    ldim_oracle,
    sfat,
    sfat_empty_convention,
    validate_tree,
)
from .online import (
    MistakeOnly,
    StrongFeedback,
    Transcript,
    gentle_sample_complexity,
    prediction_grid,
    rsoa_mistake_only_step,
    rsoa_predict,
    rsoa_update,
    run_online_game,
    run_shadow_stream,
    run_weak_forcing_game,
    weak_adversary_from_tree,
)
from .stability import (
    ExtSample,
    Fail,
    StabilityReport,
    sample_ext,
    stability_experiment,
    stable_learner_G,
)
from .privacy import (
    DpTestReport,
    HypothesisCollection,
    build_probabilistic_representation,
    discretize_hypotheses,
    dp_test,
    generic_private_learner,
)
from .communication import (
    AugIndexInstance,
    BaselineEvalProtocol,
    ProtocolRun,
    augindex_via_eval,
    cc_lower_bound,
)
from .quantum import (
    DensityMatrix,
    Ensemble,
    Measurement,
    SracCode,
    audenaert_bound,
    depolarizing_capacity_bound,
    expectation,
    holevo_chi,
    junta_bound,
    materialize_concept_class,
    max_holevo,
    nayak_inequality_check,
    quantum_ball_member,
    sfat_holevo_bound,
    srac_from_tree,
    von_neumann_entropy,
)

__all__ = [
    "Concept",
    "ConceptClass",
    "Cover",
    "Distribution",
    "DomainPoint",
    "LabeledExample",
    "binary_entropy",
    "cover_new",
    "function_ball",
    "loss",
    "round_to_grid",
    "superbin_members",
    "DimensionResult",
    "SfatCache",
    "ShatterTree",
    "fat",
    "ldim_oracle",
    "sfat",
    "sfat_empty_convention",
    "validate_tree",
    "MistakeOnly",
    "StrongFeedback",
    "Transcript",
    "gentle_sample_complexity",
    "prediction_grid",
    "rsoa_mistake_only_step",
    "rsoa_predict",
    "rsoa_update",
    "run_online_game",
    "run_shadow_stream",
    "run_weak_forcing_game",
    "weak_adversary_from_tree",
    "ExtSample",
    "Fail",
    "StabilityReport",
    "sample_ext",
    "stability_experiment",
    "stable_learner_G",
    "DpTestReport",
    "HypothesisCollection",
    "build_probabilistic_representation",
    "discretize_hypotheses",
    "dp_test",
    "generic_private_learner",
    "AugIndexInstance",
    "BaselineEvalProtocol",
    "ProtocolRun",
    "augindex_via_eval",
    "cc_lower_bound",
    "DensityMatrix",
    "Ensemble",
    "Measurement",
    "SracCode",
    "audenaert_bound",
    "depolarizing_capacity_bound",
    "expectation",
    "holevo_chi",
    "junta_bound",
    "materialize_concept_class",
    "max_holevo",
    "nayak_inequality_check",
    "quantum_ball_member",
    "sfat_holevo_bound",
    "srac_from_tree",
    "von_neumann_entropy",
]
