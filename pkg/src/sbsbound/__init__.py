"""Bounds on the distance to spectrum broadcast structures under measurement-type dynamics."""

from .bounds import (
    BoundReport,
    check_rescale,
    conjectured_bound,
    distance_to_sbs,
    rescale_lemma,
    telescopic_bound,
    theorem4_bound,
)
from .dynamics import (
    DegenerateSpectrumWarning,
    Environment,
    SBSApproximant,
    VonNeumannModel,
    diag_state,
    gamma,
    gamma_total,
    reduced_state,
    sbs_approximant,
)
from .errors import (
    ArityError,
    BoundViolationError,
    CapabilityError,
    DegeneracyError,
    DimensionLimitError,
    PreconditionError,
    ShapeError,
    ValidationError,
)
from .gram import (
    GramBasis,
    flatten_mixed,
    gram_schmidt,
    overlap_via_determinant,
    theorem3_bound,
    theorem5_bound,
)
from .kernels import BACKEND
from .linalg import fidelity, partial_trace, trace_distance, trace_norm
from .qsd import (
    POVM,
    PVM,
    Ensemble,
    SBSState,
    helstrom_error,
    knill_barnum_upper,
    montanaro_lower,
    probability_error,
)
from .scenario import EnsembleSpec, Scenario

__version__ = "0.1.0"
