import itertools
from functools import reduce

import numpy as np
import pytest

from bbdfs.pauli import PauliString, parse

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
LETTERS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_oracle(p: PauliString) -> np.ndarray:
    """Dense matrix from textbook 2x2 Paulis, independent of the package's bit tricks."""
    mat = reduce(np.kron, [LETTERS[ch] for ch in p.label()])
    return (1j ** p.phase) * mat


def all_labels(n):
    return ["".join(t) for t in itertools.product("IXYZ", repeat=n)]


def all_paulis(n):
    return [parse(s) for s in all_labels(n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, text in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}")
