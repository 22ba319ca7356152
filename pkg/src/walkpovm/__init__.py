"""Compile discrete POVMs into one-dimensional coined quantum-walk programs and simulate them."""

from .alt_synthesis import a_max, build_coin1_alt, synthesize_alt
from .errors import (
    ConsistencyError,
    FormatError,
    InfeasibleError,
    InvalidInputError,
    NoAmplitudeError,
    WalkPovmError,
)
from .linalg import complete_unitary, numerical_rank, pseudo_inverse
from .povm import Povm, Rank1Povm, ValidationReport, born_probabilities, decompose_rank1, validate
from .program import CoinLayer, WalkProgram
from .synthesis import advance_K, coin1, coin2_params, extend_post_measurement, synthesize
from .walk import (
    InducedPovm,
    WalkState,
    conditional_state,
    induced_povm,
    outcome_elements,
    run,
    sample,
    step,
)

__version__ = "0.1.0"
