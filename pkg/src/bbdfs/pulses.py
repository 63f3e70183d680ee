"""
Ideal bang-bang pulses as automorphisms of the Pauli group.

A :class:`Pulse` with unitary ``U`` is stored as the images of every ``X_i``
and ``Z_i`` under ``A -> U^dag A U`` (a signed Clifford tableau).  Global
phases of ``U`` are invisible here, which is exactly what decoupling needs.

Pulses built from a physical generating Hamiltonian also carry a
``program``: a tuple of layers ``(generators, theta)`` meaning
``exp(-i * theta * sum(generators))``, applied in time order.  The numeric
verifier uses it to build the dense unitary.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .bath import InteractionTerm, SBHamiltonian, canonicalize
from .pauli import PauliString, commutes, format_pauli, multiply, parse

__all__ = [
    "Pulse",
    "R",
    "R_O",
    "R_OO",
    "R_O_from_products",
    "R_from_products",
    "O_O",
    "O_OO",
    "O_pairs",
    "conjugate",
    "exchange",
    "identity_pulse",
    "named_pulse",
    "pauli_pulse",
    "product_pulse",
    "pulse_from_tableau",
    "single_qubit_pulse",
    "swap_decomposed",
    "swap_layer",
    "z_pair_pulse",
]

Layer = tuple[tuple[PauliString, ...], float]


class TableauError(ValueError):
    """Images do not define a valid Clifford action."""


@dataclass(frozen=True, eq=False)
class Pulse:
    name: str
    n_qubits: int
    x_images: tuple[PauliString, ...]
    z_images: tuple[PauliString, ...]
    program: tuple[Layer, ...] | None = None
    # set for pulses whose unitary is (proportional to) a Pauli string
    pauli: PauliString | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.n_qubits
        if len(self.x_images) != n or len(self.z_images) != n:
            raise TableauError("tableau needs one X image and one Z image per qubit")

    # tableau action -----------------------------------------------------

    def conjugate_pauli(self, p: PauliString) -> PauliString:
        """``U^dag p U`` for this pulse's unitary ``U``."""
        if p.n_qubits != self.n_qubits:
            raise ValueError(
                f"dimension mismatch: pulse on {self.n_qubits} qubits, "
                f"operator on {p.n_qubits}"
            )
        # p = i^(phase + |x&z|) * prod_q X_q^x_q Z_q^z_q
        out = PauliString(p.n_qubits, 0, 0, p.phase + bin(p.x & p.z).count("1"))
        bits = p.x | p.z
        q = 0
        while bits:
            if bits & 1:
                if (p.x >> q) & 1:
                    out = multiply(out, self.x_images[q])
                if (p.z >> q) & 1:
                    out = multiply(out, self.z_images[q])
            bits >>= 1
            q += 1
        return out

    def __eq__(self, other) -> bool:
        """Same automorphism (names, programs and global phase ignored)."""
        return (
            isinstance(other, Pulse)
            and self.x_images == other.x_images
            and self.z_images == other.z_images
        )

    def __hash__(self) -> int:
        return hash((self.x_images, self.z_images))

    @property
    def is_identity(self) -> bool:
        return self == identity_pulse(self.n_qubits)

    @property
    def is_involution(self) -> bool:
        return self.then(self).is_identity

    # composition --------------------------------------------------------

    def then(self, other: "Pulse") -> "Pulse":
        """Pulse equivalent to applying ``self`` first and ``other`` second."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("dimension mismatch in pulse composition")
        # act_{V U} = act_U o act_V
        xs = tuple(self.conjugate_pauli(p) for p in other.x_images)
        zs = tuple(self.conjugate_pauli(p) for p in other.z_images)
        program = None
        if self.program is not None and other.program is not None:
            program = self.program + other.program
        pauli = None
        if self.pauli is not None and other.pauli is not None:
            pauli = multiply(other.pauli, self.pauli).unsigned()
        name = _pauli_name(pauli) if pauli is not None else f"{other.name}*{self.name}"
        return Pulse(name, self.n_qubits, xs, zs, program, pauli)

    def dagger(self) -> "Pulse":
        """Inverse automorphism.

        The pre-image of ``T`` has x-bit ``j`` equal to the symplectic product
        of ``T`` with the image of ``Z_j`` and z-bit ``j`` equal to the product
        with the image of ``X_j``; the sign is then fixed by one forward
        conjugation.
        """
        n = self.n_qubits

        def preimage(target: PauliString) -> PauliString:
            x = z = 0
            for j in range(n):
                if not commutes(target, self.z_images[j]):
                    x |= 1 << j
                if not commutes(target, self.x_images[j]):
                    z |= 1 << j
            cand = PauliString(n, x, z)
            image = self.conjugate_pauli(cand)
            return cand if image.phase == target.phase else -cand

        xs = tuple(preimage(PauliString(n, 1 << j, 0)) for j in range(n))
        zs = tuple(preimage(PauliString(n, 0, 1 << j)) for j in range(n))
        program = None
        if self.program is not None:
            program = tuple((gens, -theta) for gens, theta in reversed(self.program))
        if self.pauli is not None:
            name = self.name
        elif self.name.endswith("†"):
            name = self.name[:-1]
        else:
            name = self.name + "†"
        return Pulse(name, n, xs, zs, program, self.pauli)

    def validate(self) -> "Pulse":
        """Check Hermitian images and the canonical commutation table."""
        n = self.n_qubits
        images = self.x_images + self.z_images
        for p in images:
            if p.n_qubits != n:
                raise TableauError(f"image {format_pauli(p)} has wrong qubit count")
            if not p.is_hermitian or p.is_identity:
                raise TableauError(f"image {format_pauli(p)} is not a Hermitian non-identity Pauli")
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                should_anticommute = b == a + n
                if commutes(images[a], images[b]) == should_anticommute:
                    raise TableauError(
                        f"images {format_pauli(images[a])} and {format_pauli(images[b])} "
                        "break the Pauli commutation table"
                    )
        return self

    def describe(self) -> dict[str, str]:
        """Tableau as ``{"X1": "+ZII", ...}`` (the JSON custom-pulse form)."""
        out = {}
        for j in range(self.n_qubits):
            for tag, img in (("X", self.x_images[j]), ("Z", self.z_images[j])):
                s = format_pauli(img)
                out[f"{tag}{j + 1}"] = s if s.startswith("-") else "+" + s
        return out


def _pauli_name(p: PauliString) -> str:
    letters = set(p.label()) - {"I"}
    if len(letters) == 1 and p.weight == p.n_qubits:
        return letters.pop()
    return p.label()


def conjugate(pulse: Pulse, h: SBHamiltonian) -> SBHamiltonian:
    """``U^dag H U`` term by term; signs fold into the bath coefficients."""
    if pulse.n_qubits != h.n_qubits:
        raise ValueError(
            f"dimension mismatch: pulse on {pulse.n_qubits} qubits, "
            f"Hamiltonian on {h.n_qubits}"
        )
    return canonicalize(
        [InteractionTerm(pulse.conjugate_pauli(t.system), t.bath) for t in h.terms],
        h.n_qubits,
    )


# constructors ------------------------------------------------------------------


def identity_pulse(n_qubits: int) -> Pulse:
    xs = tuple(PauliString(n_qubits, 1 << j, 0) for j in range(n_qubits))
    zs = tuple(PauliString(n_qubits, 0, 1 << j) for j in range(n_qubits))
    return Pulse("I", n_qubits, xs, zs, (), PauliString(n_qubits))


def pauli_pulse(p: PauliString, name: str | None = None) -> Pulse:
    """Pulse ``P = i exp(-i pi P / 2)``; conjugation flips every odd operator."""
    n = p.n_qubits
    p = p.unsigned()
    xs, zs = [], []
    for j in range(n):
        for images, gen in ((xs, PauliString(n, 1 << j, 0)), (zs, PauliString(n, 0, 1 << j))):
            images.append(gen if commutes(p, gen) else -gen)
    program = () if p.is_identity else (((p,), math.pi / 2),)
    return Pulse(name or _pauli_name(p), n, tuple(xs), tuple(zs), program, p)


def _axis_letter(axis: str) -> str:
    letter = axis.upper()
    if letter not in ("X", "Y", "Z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    return letter


def _check_qubit(q: int, n: int) -> None:
    if not 1 <= q <= n:
        raise ValueError(f"qubit {q} out of range 1..{n}")


def single_qubit_pulse(axis: str, qubit: int, n_qubits: int) -> Pulse:
    a = _axis_letter(axis)
    _check_qubit(qubit, n_qubits)
    return pauli_pulse(PauliString.single(n_qubits, qubit, a), f"{a}{qubit}")


def _collective(axis: str, qubits, n_qubits: int, name: str) -> Pulse:
    a = _axis_letter(axis)
    return pauli_pulse(PauliString.from_sparse(n_qubits, {q: a for q in qubits}), name)


def R(axis: str, n_qubits: int) -> Pulse:
    """Collective rotation ``R_1 R_2 ... R_N``."""
    return _collective(axis, range(1, n_qubits + 1), n_qubits, _axis_letter(axis))


def R_O(axis: str, n_qubits: int) -> Pulse:
    """``R`` on every odd-numbered qubit."""
    return _collective(axis, range(1, n_qubits + 1, 2), n_qubits, _axis_letter(axis) + "_O")


def R_OO(axis: str, n_qubits: int) -> Pulse:
    """``R`` on qubits 1, 5, 9, 13, ..."""
    return _collective(axis, range(1, n_qubits + 1, 4), n_qubits, _axis_letter(axis) + "_OO")


def z_pair_pulse(n_qubits: int) -> Pulse:
    """``Z_3 Z_4 Z_7 Z_8 ...``, i.e. Z on qubits ``4k+3`` and ``4k+4``."""
    if n_qubits % 2 or n_qubits < 4:
        raise ValueError("z_pair_pulse needs an even number of qubits >= 4")
    qubits = [q for k in range(n_qubits // 4 + 1) for q in (4 * k + 3, 4 * k + 4) if q <= n_qubits]
    return _collective("z", qubits, n_qubits, "Z_pairs")


def product_pulse(axis: str, i: int, j: int, n_qubits: int) -> Pulse:
    """Two-qubit product gate ``s_i^a s_j^a = i exp(-i pi s_i^a s_j^a / 2)``."""
    a = _axis_letter(axis)
    _check_qubit(i, n_qubits)
    _check_qubit(j, n_qubits)
    if i == j:
        raise ValueError("product pulse needs two distinct qubits")
    return pauli_pulse(PauliString.from_sparse(n_qubits, {i: a, j: a}), f"{a}{i}{a}{j}")


def _product_layer(axis: str, pairs, n_qubits: int, name: str) -> Pulse:
    """All product gates in ``pairs`` switched on at once."""
    a = _axis_letter(axis)
    gens = tuple(PauliString.from_sparse(n_qubits, {i: a, j: a}) for i, j in pairs)
    total = PauliString(n_qubits)
    for g in gens:
        total = multiply(total, g)
    pulse = pauli_pulse(total.unsigned(), name)
    return Pulse(name, n_qubits, pulse.x_images, pulse.z_images, ((gens, math.pi / 2),), pulse.pauli)


def R_from_products(axis: str, n_qubits: int) -> Pulse:
    """``R`` realised by nearest-neighbour product gates on pairs ``(2j-1, 2j)``."""
    if n_qubits % 2:
        raise ValueError("R_from_products needs an even number of qubits")
    pairs = [(2 * j - 1, 2 * j) for j in range(1, n_qubits // 2 + 1)]
    return _product_layer(axis, pairs, n_qubits, _axis_letter(axis) + "[nn]")


def R_O_from_products(axis: str, n_qubits: int) -> Pulse:
    """``R_O`` realised by next-nearest-neighbour product gates ``(1,3), (5,7), ...``."""
    if n_qubits % 4:
        raise ValueError("R_O_from_products needs a multiple of 4 qubits")
    pairs = [(4 * k + 1, 4 * k + 3) for k in range(n_qubits // 4)]
    return _product_layer(axis, pairs, n_qubits, _axis_letter(axis) + "_O[nnn]")


def _swap_images(n_qubits: int, pairs) -> tuple[tuple, tuple]:
    perm = list(range(n_qubits))
    for i, j in pairs:
        perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    xs = tuple(PauliString(n_qubits, 1 << perm[q], 0) for q in range(n_qubits))
    zs = tuple(PauliString(n_qubits, 0, 1 << perm[q]) for q in range(n_qubits))
    return xs, zs


def swap_layer(pairs, n_qubits: int, name: str) -> Pulse:
    """Simultaneous exchange pulses ``O_ij`` on disjoint pairs.

    ``O_ij = exp(-i pi s_i . s_j / 4)`` is a SWAP up to phase, so the tableau
    is the qubit transposition.
    """
    pairs = [tuple(p) for p in pairs]
    seen: set[int] = set()
    for i, j in pairs:
        _check_qubit(i, n_qubits)
        _check_qubit(j, n_qubits)
        if i == j or i in seen or j in seen:
            raise ValueError(f"exchange pairs must be disjoint, got {pairs}")
        seen.update((i, j))
    xs, zs = _swap_images(n_qubits, pairs)
    gens = tuple(
        PauliString.from_sparse(n_qubits, {i: a, j: a}) for i, j in pairs for a in "XYZ"
    )
    program = ((gens, math.pi / 4),) if gens else ()
    return Pulse(name, n_qubits, xs, zs, program)


def exchange(i: int, j: int, n_qubits: int) -> Pulse:
    """Single Heisenberg exchange pulse ``O_ij``."""
    return swap_layer([(i, j)], n_qubits, f"O{i},{j}")


def O_pairs(n_qubits: int) -> Pulse:
    """``O = prod_j O_{2j-1,2j}``."""
    if n_qubits % 2 or n_qubits < 2:
        raise ValueError("O_pairs needs an even number of qubits")
    return swap_layer([(2 * j - 1, 2 * j) for j in range(1, n_qubits // 2 + 1)], n_qubits, "O")


def O_O(n_qubits: int) -> Pulse:
    """Next-nearest-neighbour exchange within consecutive blocks of four.

    Block ``b`` (qubits ``4b+1 .. 4b+4``) gets ``O_{4b+1,4b+3} O_{4b+2,4b+4}``;
    a trailing incomplete block is left alone.
    """
    if n_qubits < 4:
        raise ValueError("O_O needs n_qubits >= 4")
    pairs = []
    for b in range(n_qubits // 4):
        s = 4 * b
        pairs += [(s + 1, s + 3), (s + 2, s + 4)]
    return swap_layer(pairs, n_qubits, "O_O")


def O_OO(n_qubits: int) -> Pulse:
    """Exchange between the two 4-qubit halves of each block of eight."""
    if n_qubits < 8:
        raise ValueError("O_OO needs n_qubits >= 8")
    pairs = []
    for b in range(n_qubits // 8):
        s = 8 * b
        pairs += [(s + k, s + k + 4) for k in range(1, 5)]
    return swap_layer(pairs, n_qubits, "O_OO")


def swap_decomposed(i: int, k: int, n_qubits: int) -> Pulse:
    """``O_{i,i+2}`` from local exchanges: ``O_{i+1,i+2}^dag O_{i,i+1} O_{i+1,i+2}``."""
    if k != i + 2:
        raise ValueError("swap_decomposed realises O_{i,i+2} only")
    mid = exchange(i + 1, i + 2, n_qubits)
    p = mid.then(exchange(i, i + 1, n_qubits)).then(mid.dagger())
    return Pulse(f"O{i},{k}:local", n_qubits, p.x_images, p.z_images, p.program)


def pulse_from_tableau(images: dict[str, str], n_qubits: int, name: str = "custom") -> Pulse:
    """Custom pulse from ``{"X1": "+ZII", ...}``; unspecified generators map to themselves.

    No generating Hamiltonian is attached; the numeric verifier synthesises
    a unitary from the tableau when needed.
    """
    ident = identity_pulse(n_qubits)
    xs, zs = list(ident.x_images), list(ident.z_images)
    for key, text in images.items():
        m = re.fullmatch(r"([XZ])(\d+)", key)
        if not m:
            raise TableauError(f"bad tableau key {key!r}; expected X<i> or Z<i>")
        q = int(m.group(2))
        _check_qubit(q, n_qubits)
        (xs if m.group(1) == "X" else zs)[q - 1] = parse(text, n_qubits)
    return Pulse(name, n_qubits, tuple(xs), tuple(zs)).validate()


_NAMED = {
    "O": O_pairs,
    "O_O": O_O,
    "O_OO": O_OO,
    "Z_pairs": z_pair_pulse,
}


def named_pulse(name: str, n_qubits: int) -> Pulse:
    """Resolve the pulse mini-language used in sequence JSON.

    ``I``, ``X``/``Y``/``Z`` (collective), ``X_O``, ``X_OO``, ``Z_pairs``,
    ``O``, ``O_O``, ``O_OO``, ``X3`` (single qubit), ``X1X2`` (product gate),
    ``O1,2`` (exchange), ``O1,3:local`` (decomposed), ``pauli:XIZI``; a
    trailing ``†`` or ``^dag`` takes the inverse.
    """
    base = name.strip()
    inverse = False
    for suffix in ("†", "^dag"):
        if base.endswith(suffix):
            base, inverse = base[: -len(suffix)], True
    pulse = _resolve(base, n_qubits)
    return pulse.dagger() if inverse else pulse


def _resolve(name: str, n: int) -> Pulse:
    if name in ("I", "identity"):
        return identity_pulse(n)
    if name in _NAMED:
        return _NAMED[name](n)
    if name.startswith("pauli:"):
        return pauli_pulse(parse(name[6:], n))
    m = re.fullmatch(r"([XYZ])(_OO|_O)?", name)
    if m:
        builder = {None: R, "_O": R_O, "_OO": R_OO}[m.group(2)]
        return builder(m.group(1), n)
    m = re.fullmatch(r"([XYZ])(\d+)", name)
    if m:
        return single_qubit_pulse(m.group(1), int(m.group(2)), n)
    m = re.fullmatch(r"([XYZ])(\d+)\1(\d+)", name)
    if m:
        return product_pulse(m.group(1), int(m.group(2)), int(m.group(3)), n)
    m = re.fullmatch(r"O(\d+),(\d+)(:local)?", name)
    if m:
        i, j = int(m.group(1)), int(m.group(2))
        return swap_decomposed(i, j, n) if m.group(3) else exchange(i, j, n)
    raise ValueError(f"unknown pulse name {name!r}")
