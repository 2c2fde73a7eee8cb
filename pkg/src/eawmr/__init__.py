"""Environment-assisted quantum state restoration via weak measurement reversal."""

from .channels import (
    DecayParams,
    DecayProfile,
    KrausChannel,
    NotRu,
    RuDecomposition,
    amplitude_damping,
    apply,
    dephasing,
    detect_ru,
    identity_channel,
    transform,
    two_qubit_dissipative,
)
from .linalg import DensityMatrix, PureState
from .restoration import (
    ReversalPovm,
    build_reversal,
    env_probabilities,
    fidelity,
    normalization_constant,
    p_ew,
    p_success_conditional,
)

__version__ = "0.1.0"
