"""
Decoupling cycles and their first-order (toggling-frame) average Hamiltonians.

A :class:`Sequence` is written in bracket notation: the *last* event acts
first, so ``[tau, X, tau, X]`` means "pulse X, wait, pulse X, wait" and its
propagator is literally ``exp(-iH tau) X exp(-iH tau) X``.

If ``G_k`` is the product of all pulses applied before free-evolution
segment ``k``, the cycle propagator is ``G_final * T prod_k
exp(-i w_k tau G_k^dag H G_k)`` and cycle closure (``G_final ~ I``) leaves
the average ``sum_k w_k G_k^dag H G_k / sum_k w_k`` at first order.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence as _Seq
from dataclasses import dataclass
from fractions import Fraction

from .bath import InteractionTerm, SBHamiltonian, canonicalize
from .pulses import (
    Pulse,
    R,
    R_O,
    O_O,
    O_OO,
    O_pairs,
    exchange,
    identity_pulse,
    named_pulse,
    pulse_from_tableau,
    z_pair_pulse,
)

__all__ = [
    "Apply",
    "CycleClosureError",
    "Evolve",
    "Sequence",
    "average_hamiltonian",
    "cycle",
    "merge_adjacent",
    "parity_kick",
    "seq_collective14_block3",
    "seq_collective6",
    "seq_collective_block8",
    "seq_full_elim16",
    "seq_linear_elim4",
    "seq_mqe16_qx",
    "seq_mqe8",
    "sequence_from_json",
    "sequence_to_json",
    "toggling_frames",
]


class CycleClosureError(ValueError):
    """The pulses of a sequence do not multiply to the identity."""

    def __init__(self, residual: Pulse):
        self.residual = residual
        moved = {k: v for k, v in residual.describe().items() if v[1:] != _unit_label(k, residual.n_qubits)}
        super().__init__(f"pulses do not close the cycle; residual automorphism {moved}")


def _unit_label(key: str, n: int) -> str:
    q = int(key[1:])
    return "I" * (q - 1) + key[0] + "I" * (n - q)


@dataclass(frozen=True)
class Apply:
    pulse: Pulse


@dataclass(frozen=True)
class Evolve:
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        w = Fraction(self.weight)
        if w <= 0:
            raise ValueError(f"evolution weight must be positive, got {w}")
        object.__setattr__(self, "weight", w)


Event = Apply | Evolve


@dataclass(frozen=True)
class Sequence:
    """Closed decoupling cycle in bracket (right-to-left) order."""

    name: str
    n_qubits: int
    events: tuple[Event, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for ev in self.events:
            if isinstance(ev, Apply) and ev.pulse.n_qubits != self.n_qubits:
                raise ValueError(
                    f"pulse {ev.pulse.name} acts on {ev.pulse.n_qubits} qubits, "
                    f"sequence on {self.n_qubits}"
                )
        if self.total_weight <= 0:
            raise ValueError("sequence needs at least one free-evolution segment")
        residual = self.net_pulse()
        if not residual.is_identity:
            raise CycleClosureError(residual)

    @property
    def n_pulses(self) -> int:
        return sum(isinstance(ev, Apply) for ev in self.events)

    @property
    def n_segments(self) -> int:
        return sum(isinstance(ev, Evolve) for ev in self.events)

    @property
    def total_weight(self) -> Fraction:
        return sum((ev.weight for ev in self.events if isinstance(ev, Evolve)), Fraction(0))

    def time_order(self) -> list[Event]:
        return list(reversed(self.events))

    def net_pulse(self) -> Pulse:
        net = identity_pulse(self.n_qubits)
        for ev in self.time_order():
            if isinstance(ev, Apply):
                net = net.then(ev.pulse)
        return net

    def notation(self) -> str:
        parts = []
        for ev in self.events:
            if isinstance(ev, Apply):
                parts.append(ev.pulse.name)
            else:
                parts.append("τ" if ev.weight == 1 else f"{ev.weight}τ")
        return "[" + ", ".join(parts) + "]"


def toggling_frames(seq: Sequence) -> list[tuple[Pulse, Fraction]]:
    """``(G_k, w_k)`` for every free-evolution segment, listed in bracket order.

    ``G_k`` composes every pulse that acts before segment ``k``; the
    toggling-frame Hamiltonian of the segment is ``conjugate(G_k, H)``.
    """
    net = seq.net_pulse()
    if not net.is_identity:
        raise CycleClosureError(net)
    frame = identity_pulse(seq.n_qubits)
    frames = []
    for ev in seq.time_order():
        if isinstance(ev, Apply):
            frame = frame.then(ev.pulse)
        else:
            frames.append((frame, ev.weight))
    frames.reverse()
    return frames


def average_hamiltonian(seq: Sequence, h: SBHamiltonian) -> SBHamiltonian:
    """First-order average ``sum_k w_k G_k^dag H G_k / sum_k w_k``, exact."""
    if seq.n_qubits != h.n_qubits:
        raise ValueError(
            f"dimension mismatch: sequence on {seq.n_qubits} qubits, "
            f"Hamiltonian on {h.n_qubits}"
        )
    total = seq.total_weight
    by_weight: dict[Fraction, list] = {}
    for frame, w in toggling_frames(seq):
        by_weight.setdefault(w, []).extend(
            (frame.conjugate_pauli(t.system), t.bath) for t in h.terms
        )
    terms: list[InteractionTerm] = []
    for w, raw in by_weight.items():
        merged = canonicalize(raw, h.n_qubits)
        terms.extend(InteractionTerm(t.system, t.bath * (w / total)) for t in merged.terms)
    return canonicalize(terms, h.n_qubits)


def parity_kick(h: SBHamiltonian, pulse: Pulse) -> SBHamiltonian:
    """Average over ``[tau, P, tau, P]``: odd terms vanish, even ones are untouched."""
    if not pulse.is_involution:
        raise ValueError(
            f"pulse {pulse.name} is not self-inverse; build an explicit cycle instead"
        )
    seq = Sequence(f"kick[{pulse.name}]", h.n_qubits, cycle([Evolve()], pulse))
    return average_hamiltonian(seq, h)


# composition helpers ----------------------------------------------------------


def cycle(inner: _Seq[Event], pulse: Pulse) -> list[Event]:
    """``U P^dag U P``: the inner block once plain and once conjugated by ``P``."""
    inner = list(inner)
    return inner + [Apply(pulse.dagger())] + inner + [Apply(pulse)]


def _sandwich(inner: _Seq[Event], pulse: Pulse) -> list[Event]:
    """``P U P^dag U``, the ordering used by the collective schemes."""
    inner = list(inner)
    return [Apply(pulse)] + inner + [Apply(pulse.dagger())] + inner


def merge_adjacent(events: Iterable[Event]) -> list[Event]:
    """Fuse back-to-back pulses into one (e.g. ``X`` after ``Z`` becomes ``Y``)."""
    out: list[Event] = []
    for ev in events:
        if isinstance(ev, Apply) and out and isinstance(out[-1], Apply):
            # bracket order: ev acts before the pulse already on the left
            out[-1] = Apply(ev.pulse.then(out[-1].pulse))
        else:
            out.append(ev)
    return out


def _scaled(events: _Seq[Event], factor) -> list[Event]:
    f = Fraction(factor)
    return [Evolve(ev.weight * f) if isinstance(ev, Evolve) else ev for ev in events]


# built-in sequences -------------------------------------------------------------


def _even(n: int, what: str) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"{what} needs an even number of qubits >= 2, got {n}")


def _linear_elim_events(n: int) -> list[Event]:
    u1 = cycle([Evolve()], R("x", n))
    return merge_adjacent(cycle(u1, R("z", n)))


def _mqe8_events(n: int) -> list[Event]:
    return merge_adjacent(cycle(_linear_elim_events(n), R_O("x", n)))


def seq_linear_elim4(n_qubits: int) -> Sequence:
    """Collective X then collective Z averaging: all linear couplings vanish."""
    return Sequence("linear_elim4", n_qubits, _linear_elim_events(n_qubits))


def seq_mqe8(n_qubits: int) -> Sequence:
    """Leaves only ``X_j X_{j+1}`` errors from nearest-neighbour couplings."""
    _even(n_qubits, "mqe8")
    return Sequence("mqe8", n_qubits, _mqe8_events(n_qubits))


def seq_mqe16_qx(n_qubits: int) -> Sequence:
    """Reduces the surviving error group to ``<X_{2j-1} X_{2j}>``."""
    _even(n_qubits, "mqe16_qx")
    if n_qubits < 4:
        raise ValueError("mqe16_qx needs n_qubits >= 4")
    events = merge_adjacent(cycle(_mqe8_events(n_qubits), z_pair_pulse(n_qubits)))
    return Sequence("mqe16_qx", n_qubits, events)


def seq_full_elim16(n_qubits: int) -> Sequence:
    """Removes every linear and nearest-neighbour bilinear coupling."""
    _even(n_qubits, "full_elim16")
    events = merge_adjacent(cycle(_mqe8_events(n_qubits), R_O("z", n_qubits)))
    return Sequence("full_elim16", n_qubits, events)


def _collective6_events(n: int) -> list[Event]:
    o = O_pairs(n)
    inner = [Apply(o), Evolve(), Apply(o.dagger()), Evolve()]
    return _sandwich(inner, O_O(n))


def seq_collective6(n_qubits: int) -> Sequence:
    """``[O_O, O, tau, O^dag, tau, O_O^dag, O, tau, O^dag, tau]``.

    Six exchange pulses, four segments; linear couplings become collective
    on each block of four consecutive qubits.
    """
    _even(n_qubits, "collective6")
    if n_qubits < 4:
        raise ValueError("collective6 needs n_qubits >= 4")
    return Sequence("collective6", n_qubits, _collective6_events(n_qubits))


def seq_collective_block8(n_qubits: int) -> Sequence:
    """``collective6`` symmetrized once more under ``O_OO``: blocks of eight."""
    if n_qubits < 8 or n_qubits % 2:
        raise ValueError("collective_block8 needs an even n_qubits >= 8")
    events = _sandwich(_collective6_events(n_qubits), O_OO(n_qubits))
    return Sequence("collective_block8", n_qubits, events)


def seq_collective14_block3() -> Sequence:
    """Three-qubit scheme: ``U2 O12^dag U2 O12`` with ``U2 = U1(tau/2) O23^dag U1(tau) O23``."""
    n = 3
    u1 = cycle([Evolve()], exchange(1, 2, n))
    u2 = _scaled(u1, Fraction(1, 2)) + [Apply(exchange(2, 3, n).dagger())] + u1 + [
        Apply(exchange(2, 3, n))
    ]
    return Sequence("collective14", n, cycle(u2, exchange(1, 2, n)))


# JSON ---------------------------------------------------------------------------


def sequence_to_json(seq: Sequence) -> dict:
    events = []
    for ev in seq.events:
        if isinstance(ev, Evolve):
            events.append({"evolve": str(ev.weight)})
        else:
            events.append({"pulse_tableau": ev.pulse.describe(), "name": ev.pulse.name})
    return {"name": seq.name, "n_qubits": seq.n_qubits, "events": events}


def sequence_from_json(data: dict, n_qubits: int | None = None) -> Sequence:
    """Events are ``{"pulse": name}``, ``{"evolve": "p/q"}`` or ``{"pulse_tableau": {...}}``."""
    n = int(data.get("n_qubits", n_qubits or 0))
    if n < 1:
        raise ValueError("sequence JSON needs n_qubits (in the file or from the Hamiltonian)")
    events: list[Event] = []
    for entry in data["events"]:
        if "evolve" in entry:
            events.append(Evolve(Fraction(str(entry["evolve"]))))
        elif "pulse" in entry:
            events.append(Apply(named_pulse(entry["pulse"], n)))
        elif "pulse_tableau" in entry:
            events.append(
                Apply(pulse_from_tableau(entry["pulse_tableau"], n, entry.get("name", "custom")))
            )
        else:
            raise ValueError(f"unrecognised sequence event {entry!r}")
    return Sequence(data.get("name", "custom"), n, events)
