"""
Error-group analysis for the multiple-qubit-error (MQE) model.

Surviving system operators generate a group under multiplication.  Working
modulo global phase, each Pauli is a row ``x | z`` over GF(2); the group
order is ``2**rank`` and an Abelian group of order ``|G|`` on ``N`` qubits
leaves a ``2**N / |G|`` dimensional decoherence-free subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import SBHamiltonian
from .pauli import PauliString, commutes, format_pauli

__all__ = [
    "ErrorGroup",
    "NonAbelianError",
    "dfs_dimension",
    "from_hamiltonian",
    "gf2_rank",
    "is_abelian",
    "order",
]


class NonAbelianError(ValueError):
    pass


def gf2_rank(rows: list[int]) -> int:
    """Rank over GF(2) of rows packed into integers (bit-parallel XOR elimination)."""
    pivots: dict[int, int] = {}  # leading bit -> reduced row
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = r
                break
            r ^= pivots[lead]
    return len(pivots)


@dataclass(frozen=True)
class ErrorGroup:
    n_qubits: int
    generators: tuple[PauliString, ...]

    def __post_init__(self):
        seen = {}
        for g in self.generators:
            if g.n_qubits != self.n_qubits:
                raise ValueError("generator has the wrong number of qubits")
            if not g.is_identity:
                seen.setdefault(g.key(), g.unsigned())
        object.__setattr__(self, "generators", tuple(seen.values()))

    @property
    def packed_rows(self) -> list[int]:
        return [g.x | (g.z << self.n_qubits) for g in self.generators]

    @property
    def gf2_matrix(self) -> np.ndarray:
        """One row per generator, columns ``x_1..x_N, z_1..z_N``."""
        n = self.n_qubits
        m = np.zeros((len(self.generators), 2 * n), dtype=np.uint8)
        for r, g in enumerate(self.generators):
            for q in range(n):
                m[r, q] = (g.x >> q) & 1
                m[r, n + q] = (g.z >> q) & 1
        return m

    @property
    def rank(self) -> int:
        return gf2_rank(self.packed_rows)

    def labels(self) -> list[str]:
        return [format_pauli(g) for g in self.generators]

    def report(self) -> dict:
        abelian = is_abelian(self)
        out = {"abelian": abelian, "generators": self.labels(), "n_qubits": self.n_qubits}
        if abelian:
            out["order_log2"] = self.rank
            out["dfs_dim_log2"] = self.n_qubits - self.rank
        out["signs_discarded"] = True
        return out


def from_hamiltonian(h: SBHamiltonian) -> ErrorGroup:
    """Group generated by the system operators that appear in ``h``."""
    return ErrorGroup(h.n_qubits, tuple(t.system for t in h.terms))


def is_abelian(g: ErrorGroup) -> bool:
    gens = g.generators
    return all(commutes(a, b) for i, a in enumerate(gens) for b in gens[i + 1 :])


def _require_abelian(g: ErrorGroup) -> None:
    if not is_abelian(g):
        raise NonAbelianError("order and DFS dimension are defined here for Abelian groups only")


def order(g: ErrorGroup) -> int:
    """``2**rank`` of the generator matrix, counting elements modulo phase."""
    _require_abelian(g)
    return 1 << g.rank


def dfs_dimension(g: ErrorGroup) -> int:
    _require_abelian(g)
    return 1 << (g.n_qubits - g.rank)
