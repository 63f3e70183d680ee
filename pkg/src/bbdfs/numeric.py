"""
Dense-matrix oracle for the symbolic engine.

Formal bath labels are instantiated as Hermitian matrices on one shared bath
space, pulses become unitaries, and whole cycles are multiplied out exactly.
Qubit 1 is the most significant tensor factor and the bath is the last one.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence as _Seq
from dataclasses import dataclass, field

import numpy as np

from .bath import SBHamiltonian
from .pauli import PauliString
from .pulses import Pulse
from .sequences import Apply, Evolve, Sequence, average_hamiltonian

__all__ = [
    "BathModel",
    "CollectiveDFS",
    "DEFAULT_CAP",
    "DimensionCapError",
    "ErrorSweep",
    "block_dfs_basis",
    "collective_dfs_basis",
    "collective_operators",
    "cycle_phase",
    "effective_error",
    "expm_hermitian",
    "fit_slope",
    "leakage",
    "max_joint_eigenspace_dim",
    "pauli_matrix",
    "realize",
    "realize_pulse",
    "simulate_cycle",
]

DEFAULT_CAP = 4096
SLOPE_FLOOR = 1e-12
HERMITIAN_TOL = 1e-12


class DimensionCapError(RuntimeError):
    """Dense dimension ``2**N * bath_dim`` exceeds the configured cap."""


def _check_cap(n_qubits: int, bath_dim: int, cap: int) -> int:
    dim = (1 << n_qubits) * bath_dim
    if dim > cap:
        raise DimensionCapError(
            f"dense dimension 2^{n_qubits} x {bath_dim} = {dim} exceeds cap {cap}"
        )
    return dim


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense ``2**N`` matrix of ``p`` including its phase."""
    n = p.n_qubits
    dim = 1 << n
    # qubit q (1-based) sits at bit n - q of the computational index
    xm = zm = 0
    for q in range(n):
        if (p.x >> q) & 1:
            xm |= 1 << (n - 1 - q)
        if (p.z >> q) & 1:
            zm |= 1 << (n - 1 - q)
    cols = np.arange(dim)
    rows = cols ^ xm
    # X^x Z^z |b> = (-1)^{b.z} |b ^ x>, then textbook Y = i X Z
    parity = np.array([bin(c & zm).count("1") & 1 for c in range(dim)])
    phase = 1j ** ((p.phase + bin(p.x & p.z).count("1")) % 4)
    out = np.zeros((dim, dim), dtype=complex)
    out[rows, cols] = phase * (1 - 2 * parity)
    return out


@dataclass
class BathModel:
    """Concrete Hermitian matrices for every bath label, on one shared space."""

    bath_dim: int
    assignment: dict[str, np.ndarray]
    rng_seed: int | None = None

    def __post_init__(self):
        if self.bath_dim < 1:
            raise ValueError("bath_dim must be >= 1")
        clean = {}
        for label, m in self.assignment.items():
            m = np.asarray(m, dtype=complex)
            if m.shape != (self.bath_dim, self.bath_dim):
                raise ValueError(f"bath operator {label} has shape {m.shape}")
            if np.abs(m - m.conj().T).max() > 1e-8:
                raise ValueError(f"bath operator {label} is not Hermitian")
            clean[label] = (m + m.conj().T) / 2
        self.assignment = clean

    @classmethod
    def random(cls, labels: Iterable[str], bath_dim: int = 2, seed: int = 0) -> "BathModel":
        """Independent complex-normal Hermitian matrices with unit operator norm."""
        rng = np.random.default_rng(seed)
        assignment = {}
        for label in sorted(set(labels)):
            g = rng.standard_normal((bath_dim, bath_dim)) + 1j * rng.standard_normal(
                (bath_dim, bath_dim)
            )
            m = (g + g.conj().T) / 2
            assignment[label] = m / np.linalg.norm(m, 2)
        return cls(bath_dim, assignment, seed)

    @classmethod
    def constant(cls, labels: Iterable[str], matrix) -> "BathModel":
        """Every label mapped to the same matrix."""
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(m.shape[0], {lab: m for lab in labels})

    def operator(self, bath) -> np.ndarray:
        out = np.zeros((self.bath_dim, self.bath_dim), dtype=complex)
        for label, coeff in bath.items():
            try:
                out += float(coeff) * self.assignment[label]
            except KeyError:
                raise KeyError(f"bath label {label!r} has no matrix in the bath model") from None
        return out


def realize(h: SBHamiltonian, bm: BathModel, cap: int = DEFAULT_CAP) -> np.ndarray:
    """``sum_terms P (x) B`` as a dense Hermitian matrix."""
    dim = _check_cap(h.n_qubits, bm.bath_dim, cap)
    out = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        out += np.kron(pauli_matrix(t.system), bm.operator(t.bath))
    return out


def expm_hermitian(a: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t A)`` through the eigendecomposition of Hermitian ``A``."""
    a = np.asarray(a, dtype=complex)
    if a.size and np.abs(a - a.conj().T).max() > 1e-10 * max(1.0, np.abs(a).max()):
        raise ValueError("expm_hermitian needs a Hermitian matrix")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def _layer_unitary(gens: tuple[PauliString, ...], theta: float) -> np.ndarray:
    gen = sum(pauli_matrix(g) for g in gens)
    return expm_hermitian(gen, theta)


def _synthesize(p: Pulse) -> np.ndarray:
    """Unitary with the given tableau, up to global phase.

    ``U^dag |0..0>`` is the joint +1 eigenvector of the Z images and
    ``U^dag |b> = prod_q X'_q^{b_q} U^dag |0..0>``.
    """
    n = p.n_qubits
    dim = 1 << n
    proj = np.eye(dim, dtype=complex)
    for zi in p.z_images:
        proj = proj @ (np.eye(dim) + pauli_matrix(zi)) / 2
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    phi = proj[:, col] / np.linalg.norm(proj[:, col])
    xmats = [pauli_matrix(xi) for xi in p.x_images]
    udag = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        vec = phi
        for q in range(n):
            if (b >> (n - 1 - q)) & 1:
                vec = xmats[q] @ vec
        udag[:, b] = vec
    return udag.conj().T


def realize_pulse(p: Pulse, n_qubits: int | None = None, bath_dim: int = 1,
                  cap: int = DEFAULT_CAP) -> np.ndarray:
    """Pulse unitary tensored with the bath identity."""
    n = p.n_qubits if n_qubits is None else n_qubits
    if n != p.n_qubits:
        raise ValueError("pulse acts on a different number of qubits")
    _check_cap(n, bath_dim, cap)
    if p.program is None:
        u = _synthesize(p)
    else:
        u = np.eye(1 << n, dtype=complex)
        for gens, theta in p.program:
            u = _layer_unitary(gens, theta) @ u
    return np.kron(u, np.eye(bath_dim)) if bath_dim > 1 else u


def simulate_cycle(seq: Sequence, h: SBHamiltonian, bm: BathModel, tau: float,
                   cap: int = DEFAULT_CAP) -> np.ndarray:
    """Exact cycle propagator, events multiplied in time order."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    hm = realize(h, bm, cap)
    w, v = np.linalg.eigh(hm)
    vh = v.conj().T
    dim = hm.shape[0]
    u = np.eye(dim, dtype=complex)
    pulse_cache: dict[int, np.ndarray] = {}
    for ev in seq.time_order():
        if isinstance(ev, Evolve):
            step = (v * np.exp(-1j * float(ev.weight) * tau * w)) @ vh
        else:
            key = id(ev.pulse)
            if key not in pulse_cache:
                pulse_cache[key] = realize_pulse(ev.pulse, seq.n_qubits, bm.bath_dim, cap)
            step = pulse_cache[key]
        u = step @ u
    return u


def cycle_phase(seq: Sequence) -> complex:
    """Scalar ``c`` with (product of realised pulses) ``= c * I``."""
    dim = 1 << seq.n_qubits
    u = np.eye(dim, dtype=complex)
    for ev in seq.time_order():
        if isinstance(ev, Apply):
            u = realize_pulse(ev.pulse) @ u
    c = np.trace(u) / dim
    return c / abs(c)


def fit_slope(xs: _Seq[float], ys: _Seq[float], floor: float = SLOPE_FLOOR) -> float | None:
    """Least-squares slope of ``log y`` against ``log x``; ``None`` if < 2 usable points."""
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if y >= floor]
    if len(pts) < 2:
        return None
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


@dataclass
class ErrorSweep:
    taus: list[float]
    errors: list[float]
    slope: float | None
    total_weight: float
    classification: str = field(init=False)

    def __post_init__(self):
        self.classification = "exact" if self.slope is None else "slope"

    def to_json(self) -> dict:
        return {
            "classification": self.classification,
            "slope": self.slope,
            "points": [{"tau": t, "norm_error": e} for t, e in zip(self.taus, self.errors)],
        }


def effective_error(seq: Sequence, h: SBHamiltonian, bm: BathModel, taus: _Seq[float],
                    cap: int = DEFAULT_CAP) -> ErrorSweep:
    """Distance between the true cycle and ``exp(-i W tau Hbar)`` across ``taus``.

    The global phase left by the pulse product is divided out before taking
    the spectral norm.
    """
    taus = [float(t) for t in taus]
    if len(taus) < 4:
        raise ValueError("effective_error needs at least 4 tau values")
    if any(a <= b for a, b in zip(taus, taus[1:])):
        raise ValueError("tau values must be strictly descending")
    hbar = realize(average_hamiltonian(seq, h), bm, cap)
    weight = float(seq.total_weight)
    phase = cycle_phase(seq)
    errors = []
    for tau in taus:
        u = simulate_cycle(seq, h, bm, tau, cap) / phase
        errors.append(float(np.linalg.norm(u - expm_hermitian(hbar, weight * tau), 2)))
    return ErrorSweep(taus, errors, fit_slope(taus, errors), weight)


# collective decoherence ------------------------------------------------------


def collective_operators(n_qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``S^a = sum_i sigma_i^a`` for ``a = x, y, z``."""
    return tuple(
        sum(pauli_matrix(PauliString.single(n_qubits, i, a)) for i in range(1, n_qubits + 1))
        for a in "XYZ"
    )


@dataclass
class CollectiveDFS:
    """Joint null space of the collective operators plus the total-spin sectors."""

    n_qubits: int
    basis: np.ndarray
    sectors: dict[float, int]
    _spin_basis: dict[float, np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def sector_basis(self, spin: float) -> np.ndarray:
        """Orthonormal basis of the total-spin-``spin`` subspace (all multiplets)."""
        return self._spin_basis[spin]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def collective_dfs_basis(n_qubits: int) -> CollectiveDFS:
    """States with ``S^x = S^y = S^z = 0`` and the multiplicity of every spin sector.

    ``S^2 = sum_a (S^a)^2`` has eigenvalue ``4 s (s + 1)``; its kernel is the
    joint kernel of the three ``S^a``.
    """
    if n_qubits < 2:
        raise ValueError("collective DFS needs n_qubits >= 2")
    sx, sy, sz = collective_operators(n_qubits)
    s2 = sx @ sx + sy @ sy + sz @ sz
    w, v = np.linalg.eigh(s2)
    spins = np.round(2 * (-1 + np.sqrt(1 + np.clip(w, 0, None))) / 2) / 2
    sectors: dict[float, int] = {}
    spin_basis = {}
    for s in sorted(set(spins.tolist())):
        idx = np.flatnonzero(spins == s)
        sectors[s] = len(idx) // int(2 * s + 1)
        spin_basis[s] = v[:, idx]
    basis = spin_basis.get(0.0, np.zeros((1 << n_qubits, 0), dtype=complex))
    return CollectiveDFS(n_qubits, basis, sectors, spin_basis)


def block_dfs_basis(n_qubits: int, block: int) -> np.ndarray:
    """Tensor product of the collective DFS of each consecutive ``block``."""
    if n_qubits % block:
        raise ValueError(f"{n_qubits} qubits do not split into blocks of {block}")
    one = collective_dfs_basis(block).basis
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n_qubits // block):
        out = np.kron(out, one)
    return out


def leakage(seq: Sequence, h: SBHamiltonian, bm: BathModel, tau: float, n_cycles: int,
            basis: np.ndarray, initial_state: np.ndarray | None = None,
            cap: int = DEFAULT_CAP) -> float:
    """Probability of leaving ``span(basis)`` after ``n_cycles`` cycles.

    Starts from ``initial_state`` (default: the first basis vector) times the
    first bath basis state.  Computed as ``||(1 - Pi) U psi||^2``, which equals
    ``1 - ||Pi U psi||^2`` but keeps precision for tiny leakage.
    """
    basis = np.asarray(basis, dtype=complex)
    sys_dim = 1 << seq.n_qubits
    if basis.shape[0] != sys_dim or basis.shape[1] == 0:
        raise ValueError("basis does not span a nonempty subspace of the system space")
    psi_s = basis[:, 0] if initial_state is None else np.asarray(initial_state, dtype=complex)
    if psi_s.shape != (sys_dim,):
        raise ValueError("initial state has the wrong dimension")
    psi_s = psi_s / np.linalg.norm(psi_s)
    bath_ref = np.zeros(bm.bath_dim, dtype=complex)
    bath_ref[0] = 1
    psi = np.kron(psi_s, bath_ref)
    u = simulate_cycle(seq, h, bm, tau, cap)
    for _ in range(n_cycles):
        psi = u @ psi
    amp = psi.reshape(sys_dim, bm.bath_dim)
    inside = basis @ (basis.conj().T @ amp)
    return float(min(1.0, np.linalg.norm(amp - inside) ** 2))


def max_joint_eigenspace_dim(generators: _Seq[PauliString], seed: int = 0) -> int:
    """Largest common eigenspace of commuting Paulis, found numerically.

    A random real combination of the generators is diagonalised; each
    eigenvector is tagged with its expectation value under every generator
    and identical tags are counted.
    """
    if not generators:
        raise ValueError("need at least one generator")
    mats = [pauli_matrix(g) for g in generators]
    rng = np.random.default_rng(seed)
    mix = sum(c * m for c, m in zip(rng.uniform(1, 2, len(mats)), mats))
    _, v = np.linalg.eigh(mix)
    tags: dict[tuple, int] = {}
    for k in range(v.shape[1]):
        vec = v[:, k]
        tag = tuple(int(np.rint(np.real(vec.conj() @ m @ vec))) for m in mats)
        tags[tag] = tags.get(tag, 0) + 1
    return max(tags.values())
