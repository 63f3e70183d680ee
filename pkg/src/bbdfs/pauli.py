"""
Exact algebra of N-qubit Pauli strings in symplectic form.

A :class:`PauliString` stores one x-bit and one z-bit per qubit packed into
Python integers (bit ``i`` belongs to qubit ``i + 1``), plus a phase exponent
``k`` so that the represented matrix is ``i**k`` times the tensor product of
textbook single-qubit Paulis::

    (x, z) = (0, 0) -> I    (1, 0) -> X    (0, 1) -> Z    (1, 1) -> Y

With textbook matrices the multiplication rules are ``X Z = -iY``,
``Z X = iY`` and ``X Y = iZ`` (cyclic).  The string syntax is an optional
phase token (``+``, ``-``, ``i``, ``+i``, ``-i``) followed by one letter per
qubit, qubit 1 first.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "PauliString",
    "commutes",
    "format_pauli",
    "multiply",
    "parse",
    "same_operator",
]

_PHASE_TOKENS = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PHASE_PREFIX = ("", "i", "-", "-i")
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PAIR_LETTER = {f"{x}{z}": k for (x, z), k in _BITS_LETTER.items()}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """Phase times a tensor product of single-qubit Pauli operators.

    Equality is exact (phase included).  Use :func:`same_operator` or
    :meth:`key` for comparisons modulo phase.
    """

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bit-vector does not fit in n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliString":
        """Pauli ``letter`` on 1-based ``qubit``, identity elsewhere."""
        if not 1 <= qubit <= n_qubits:
            raise ValueError(f"qubit {qubit} out of range 1..{n_qubits}")
        xb, zb = _LETTER_BITS[letter.upper()]
        bit = 1 << (qubit - 1)
        return cls(n_qubits, bit * xb, bit * zb)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: dict[int, str]) -> "PauliString":
        """Build from ``{qubit: letter}`` with 1-based qubit indices."""
        x = z = 0
        for q, letter in ops.items():
            if not 1 <= q <= n_qubits:
                raise ValueError(f"qubit {q} out of range 1..{n_qubits}")
            xb, zb = _LETTER_BITS[letter.upper()]
            x |= xb << (q - 1)
            z |= zb << (q - 1)
        return cls(n_qubits, x, z)

    # queries ------------------------------------------------------------

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> tuple[int, ...]:
        """1-based qubit indices carrying a non-identity factor."""
        s = self.x | self.z
        return tuple(i + 1 for i in range(self.n_qubits) if (s >> i) & 1)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def letter(self, qubit: int) -> str:
        b = qubit - 1
        return _BITS_LETTER[((self.x >> b) & 1, (self.z >> b) & 1)]

    def key(self) -> tuple[int, int]:
        """Phaseless identity of the operator."""
        return (self.x, self.z)

    def label(self) -> str:
        """Letters only, no phase token."""
        n = self.n_qubits
        bx = format(self.x, f"0{n}b")[::-1]
        bz = format(self.z, f"0{n}b")[::-1]
        return "".join(map(_PAIR_LETTER.__getitem__, map(str.__add__, bx, bz)))

    def unsigned(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, 0)

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, phase)

    # algebra ------------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return self.with_phase(self.phase + 2)

    def __str__(self) -> str:
        return format_pauli(self)


def _check_dims(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product ``a @ b``.

    Each factor is written as ``i**k * i**|x&z| * X^x Z^z``; moving ``Z^z1``
    past ``X^x2`` costs ``(-1)**|z1 & x2|`` and the result is converted back
    to the textbook basis by removing ``i**|x3&z3|``.
    """
    _check_dims(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    k = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliString(a.n_qubits, x, z, k)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff ``[a, b] = 0``; every pair of Paulis either commutes or anticommutes."""
    _check_dims(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def same_operator(a: PauliString, b: PauliString) -> bool:
    """Equality modulo phase."""
    return a.n_qubits == b.n_qubits and a.key() == b.key()


def parse(text: str, n_qubits: int | None = None) -> PauliString:
    """Parse ``"-iXIZY"`` style strings; ``n_qubits`` is checked if given."""
    s = text.strip()
    i = 0
    while i < len(s) and s[i] not in _LETTER_BITS:
        i += 1
    token, body = s[:i], s[i:]
    if token not in _PHASE_TOKENS:
        raise ValueError(f"bad phase token {token!r} in {text!r}")
    if not body:
        raise ValueError(f"empty Pauli string {text!r}")
    if n_qubits is not None and len(body) != n_qubits:
        raise ValueError(
            f"length mismatch: {text!r} has {len(body)} letters, expected {n_qubits}"
        )
    x = z = 0
    for q, ch in enumerate(body):
        if ch not in _LETTER_BITS:
            raise ValueError(f"bad character {ch!r} in {text!r}")
        xb, zb = _LETTER_BITS[ch]
        x |= xb << q
        z |= zb << q
    return PauliString(len(body), x, z, _PHASE_TOKENS[token])


def format_pauli(p: PauliString) -> str:
    """Canonical text: phase prefix omitted for +1, then the letters."""
    return _PHASE_PREFIX[p.phase] + p.label()
