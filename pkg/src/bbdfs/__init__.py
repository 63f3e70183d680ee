"""Bang-bang pulse sequences that symmetrize system-bath couplings into DFS-friendly form."""

from .bath import (
    BathVector,
    InteractionTerm,
    SBHamiltonian,
    build_bilinear_nn,
    build_hnn,
    build_linear,
    canonicalize,
    restrict_mqe_example,
)
from .groups import ErrorGroup, dfs_dimension, from_hamiltonian, is_abelian, order
from .pauli import PauliString, commutes, format_pauli, multiply, parse
from .pulses import Pulse, conjugate
from .sequences import (
    Apply,
    CycleClosureError,
    Evolve,
    Sequence,
    average_hamiltonian,
    parity_kick,
    seq_collective14_block3,
    seq_collective6,
    seq_full_elim16,
    seq_linear_elim4,
    seq_mqe16_qx,
    seq_mqe8,
    toggling_frames,
)

__version__ = "0.1.0"
