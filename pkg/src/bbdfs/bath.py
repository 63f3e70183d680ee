"""
Formal system-bath Hamiltonians with exact rational coefficients.

Bath operators are opaque labels (``"B1x"``, ``"B2_3yz"``); a
:class:`BathVector` is a sparse rational combination of labels and an
:class:`SBHamiltonian` is a canonical sum of ``PauliString (x) BathVector``
terms.  Nothing here ever builds a matrix, so pulse averaging cancels terms
exactly instead of leaving floating-point residue.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .pauli import PauliString, format_pauli, parse

__all__ = [
    "BathVector",
    "InteractionTerm",
    "SBHamiltonian",
    "build_bilinear_nn",
    "build_hnn",
    "build_linear",
    "canonicalize",
    "hamiltonian_from_json",
    "hamiltonian_to_json",
    "restrict_mqe_example",
]

log = logging.getLogger(__name__)

AXES = ("x", "y", "z")
_AXIS_LETTER = {"x": "X", "y": "Y", "z": "Z"}


def _to_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("use exact rationals (int, Fraction or 'p/q' string), not float")
    return Fraction(value)


class BathVector:
    """Immutable sparse map ``label -> Fraction`` with no stored zeros."""

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Mapping[str, object] | Iterable[tuple[str, object]] = ()):
        acc: dict[str, Fraction] = {}
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        for label, coeff in pairs:
            if not label:
                raise ValueError("bath label must be nonempty")
            acc[label] = acc.get(label, Fraction(0)) + _to_fraction(coeff)
        self._items = tuple(sorted((k, v) for k, v in acc.items() if v != 0))
        self._hash = hash(self._items)

    @classmethod
    def of(cls, label: str, coeff=1) -> "BathVector":
        return cls({label: coeff})

    @property
    def entries(self) -> dict[str, Fraction]:
        return dict(self._items)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self._items)

    def items(self):
        return iter(self._items)

    def is_zero(self) -> bool:
        return not self._items

    def __getitem__(self, label: str) -> Fraction:
        return dict(self._items).get(label, Fraction(0))

    def __add__(self, other: "BathVector") -> "BathVector":
        return BathVector(self._items + other._items)

    def __sub__(self, other: "BathVector") -> "BathVector":
        return self + (-other)

    def __neg__(self) -> "BathVector":
        return BathVector((k, -v) for k, v in self._items)

    def __mul__(self, scalar) -> "BathVector":
        s = _to_fraction(scalar)
        return BathVector((k, v * s) for k, v in self._items)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "BathVector":
        return self * (1 / _to_fraction(scalar))

    def __eq__(self, other) -> bool:
        return isinstance(other, BathVector) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._items)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in self._items)
        return f"BathVector({{{inner}}})"

    def to_json(self) -> dict[str, str]:
        return {k: str(v) for k, v in self._items}


@dataclass(frozen=True)
class InteractionTerm:
    system: PauliString
    bath: BathVector

    def __repr__(self) -> str:
        return f"({format_pauli(self.system)}, {self.bath!r})"


@dataclass(frozen=True)
class SBHamiltonian:
    """Canonical interaction Hamiltonian; build it with :func:`canonicalize`."""

    n_qubits: int
    terms: tuple[InteractionTerm, ...] = ()

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def operators(self) -> list[PauliString]:
        return [t.system for t in self.terms]

    def labels(self) -> set[str]:
        return {lab for t in self.terms for lab in t.bath.labels}

    def as_dict(self) -> dict[str, BathVector]:
        """``{pauli label: bath vector}``, handy in tests."""
        return {t.system.label(): t.bath for t in self.terms}

    @property
    def coupling_order(self) -> int:
        """Largest Pauli weight present (``p``)."""
        return max((t.system.weight for t in self.terms), default=0)

    @property
    def interaction_range(self) -> int:
        """Largest distance between qubits coupled by one term (``r``)."""
        spans = (t.system.support for t in self.terms)
        return max((s[-1] - s[0] for s in spans), default=0)

    def __add__(self, other: "SBHamiltonian") -> "SBHamiltonian":
        return canonicalize(self.terms + other.terms, self.n_qubits)

    def scale(self, factor) -> "SBHamiltonian":
        f = _to_fraction(factor)
        return canonicalize(
            [InteractionTerm(t.system, t.bath * f) for t in self.terms], self.n_qubits
        )

    def to_json(self) -> dict:
        return hamiltonian_to_json(self)


def _sort_key(p: PauliString) -> str:
    # I < X < Y < Z per position, qubit 1 most significant
    return p.label()


def canonicalize(terms: Iterable, n_qubits: int) -> SBHamiltonian:
    """Merge, sign-fold and sort raw ``(PauliString, BathVector)`` terms.

    Terms may be :class:`InteractionTerm` instances or plain pairs.  A ``-1``
    phase on the system operator is folded into the bath coefficients; an
    imaginary phase raises ``ValueError``.  Identity-system terms only shift
    the bath and are dropped with a warning.
    """
    acc: dict[tuple[int, int], BathVector] = {}
    dropped_identity = False
    for term in terms:
        system, bath = (term.system, term.bath) if isinstance(term, InteractionTerm) else term
        if system.n_qubits != n_qubits:
            raise ValueError(
                f"term on {system.n_qubits} qubits in a {n_qubits}-qubit Hamiltonian"
            )
        if not system.is_hermitian:
            raise ValueError(
                f"term {format_pauli(system)} has an imaginary phase; "
                "the coupling would not be Hermitian"
            )
        if system.phase == 2:
            bath = -bath
        if system.is_identity:
            if not bath.is_zero():
                dropped_identity = True
            continue
        k = system.key()
        acc[k] = acc[k] + bath if k in acc else bath
    if dropped_identity:
        log.warning("dropping pure-bath (identity system) term")
    out = [
        InteractionTerm(PauliString(n_qubits, x, z), b)
        for (x, z), b in acc.items()
        if not b.is_zero()
    ]
    out.sort(key=lambda t: _sort_key(t.system))
    return SBHamiltonian(n_qubits, tuple(out))


# builders -------------------------------------------------------------------


def build_linear(n_qubits: int) -> SBHamiltonian:
    """Sum over qubits and axes of ``sigma_i^a (x) B_i^a`` with labels ``B{i}{a}``."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    terms = [
        (PauliString.single(n_qubits, i, _AXIS_LETTER[a]), BathVector.of(f"B{i}{a}"))
        for i in range(1, n_qubits + 1)
        for a in AXES
    ]
    return canonicalize(terms, n_qubits)


def _bilinear_pair(n_qubits: int, i: int, j: int) -> list:
    return [
        (
            PauliString.from_sparse(n_qubits, {i: _AXIS_LETTER[a], j: _AXIS_LETTER[b]}),
            BathVector.of(f"B{i}_{j}{a}{b}"),
        )
        for a in AXES
        for b in AXES
    ]


def build_bilinear_nn(n_qubits: int, periodic: bool = False) -> SBHamiltonian:
    """All nine tensor components on each nearest-neighbour pair.

    The chain is open unless ``periodic`` is set, in which case the pair
    ``(N, 1)`` is added for ``N > 2``.
    """
    if n_qubits < 2:
        raise ValueError("bilinear coupling needs n_qubits >= 2")
    pairs = [(i, i + 1) for i in range(1, n_qubits)]
    if periodic and n_qubits > 2:
        pairs.append((n_qubits, 1))
    terms = [t for i, j in pairs for t in _bilinear_pair(n_qubits, i, j)]
    return canonicalize(terms, n_qubits)


def build_hnn(n_qubits: int, periodic: bool = False) -> SBHamiltonian:
    """Linear plus nearest-neighbour bilinear coupling."""
    return build_linear(n_qubits) + build_bilinear_nn(n_qubits, periodic)


def restrict_mqe_example(kind: str, n_qubits: int) -> SBHamiltonian:
    """The two textbook Hamiltonians whose system parts already form an Abelian group.

    ``zz_chain``: ``sum_i Z_i Z_{i+1} (x) B_i``.
    ``pairwise_isotropic``: ``sum_i sum_a s_{2i-1}^a s_{2i}^a (x) B_i^a``.
    """
    if kind == "zz_chain":
        if n_qubits < 2:
            raise ValueError("zz_chain needs n_qubits >= 2")
        terms = [
            (PauliString.from_sparse(n_qubits, {i: "Z", i + 1: "Z"}), BathVector.of(f"B{i}"))
            for i in range(1, n_qubits)
        ]
    elif kind == "pairwise_isotropic":
        if n_qubits % 2:
            raise ValueError("pairwise_isotropic needs an even number of qubits")
        terms = [
            (
                PauliString.from_sparse(
                    n_qubits, {2 * i - 1: _AXIS_LETTER[a], 2 * i: _AXIS_LETTER[a]}
                ),
                BathVector.of(f"B{i}{a}"),
            )
            for i in range(1, n_qubits // 2 + 1)
            for a in AXES
        ]
    else:
        raise ValueError(f"unknown MQE example {kind!r}")
    return canonicalize(terms, n_qubits)


# JSON ------------------------------------------------------------------------


def hamiltonian_to_json(h: SBHamiltonian) -> dict:
    return {
        "n_qubits": h.n_qubits,
        "terms": [
            {"pauli": t.system.label(), "bath": t.bath.to_json()} for t in h.terms
        ],
    }


def hamiltonian_from_json(data: dict) -> SBHamiltonian:
    """Inverse of :func:`hamiltonian_to_json`; coefficients are ``"p/q"`` strings or ints."""
    try:
        n = int(data["n_qubits"])
        raw = data["terms"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Hamiltonian JSON: {exc}") from None
    terms = []
    for entry in raw:
        system = parse(entry["pauli"], n)
        bath = BathVector({k: Fraction(str(v)) for k, v in entry["bath"].items()})
        terms.append((system, bath))
    return canonicalize(terms, n)
