"""Classical decision-tree representations of quantum measurement statistics."""
from .errors import InvariantError, PermutationError, QubitCountError
from .qstate import (
    DensityMatrix,
    ProbabilityVector,
    PureState,
    SeparabilityReport,
    density_of,
    diag_probs,
    factor_test,
    outcome_probs,
    partial_trace,
    tensor,
)
from .dtree import (
    ConstrainedFit,
    DecisionTree,
    DivergenceKind,
    TreeNode,
    divergence,
    fit_constrained,
    leaf_probs,
    reconstruct_tree,
    reorder_tree,
)
from .sampler import SampleReport, UrnSpec, sample_tree, sample_urn, urn_event_probs
from .discriminator import (
    Label,
    RatioEstimate,
    TripleStream,
    Verdict,
    classify,
    estimate_ratio,
    gen_triples,
    r_separable_threshold,
)

__version__ = "0.1.0"
