"""Separability, relative entropy of entanglement and genuine entanglement of
three-qubit GHZ-diagonal states."""

from .errors import ConvergenceFailure, GhzError
from .ghz_core import (
    GhzDiagonalState,
    canonicalize,
    from_density_entries,
    from_pauli_coefficients,
    from_probabilities,
    to_density_entries,
    to_pauli_coefficients,
)
from .noise_models import PauliChannelSpec, apply_pauli_channel, white_noise_mixture
from .ree import genuine_ree, is_biseparable, ree, ree_numeric
from .separability import is_fully_separable, witness_bound

__all__ = [
    "ConvergenceFailure",
    "GhzError",
    "GhzDiagonalState",
    "PauliChannelSpec",
    "apply_pauli_channel",
    "canonicalize",
    "from_density_entries",
    "from_pauli_coefficients",
    "from_probabilities",
    "genuine_ree",
    "is_biseparable",
    "is_fully_separable",
    "ree",
    "ree_numeric",
    "to_density_entries",
    "to_pauli_coefficients",
    "white_noise_mixture",
    "witness_bound",
]
__version__ = "0.1.0"
