import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdfs import groups
from bbdfs.bath import SBHamiltonian, build_hnn
from bbdfs.groups import ErrorGroup, NonAbelianError, dfs_dimension, gf2_rank, is_abelian, order
from bbdfs.pauli import PauliString, multiply, parse
from bbdfs.sequences import average_hamiltonian, seq_mqe16_qx, seq_mqe8

from conftest import kron_oracle


def closure_size(gens):
    """Multiplicative closure modulo phase by breadth-first search."""
    n = gens[0].n_qubits
    seen = {PauliString.identity(n).key()}
    frontier = [PauliString.identity(n)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = multiply(a, g)
                if b.key() not in seen:
                    seen.add(b.key())
                    nxt.append(b)
        frontier = nxt
    return len(seen)


def q2x(n):
    return ErrorGroup(n, tuple(PauliString.from_sparse(n, {j: "X", j + 1: "X"}) for j in range(1, n)))


def qx(n):
    return ErrorGroup(n, tuple(PauliString.from_sparse(n, {2 * j - 1: "X", 2 * j: "X"}) for j in range(1, n // 2 + 1)))


class TestRank:
    def test_basic(self):
        assert gf2_rank([]) == 0
        assert gf2_rank([0b11, 0b01, 0b10]) == 2
        assert gf2_rank([1, 2, 4, 8]) == 4

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 2**10 - 1), max_size=8))
    def test_matches_numpy_gf2(self, rows):
        # naive elimination over a uint8 matrix as an independent reference
        m = np.array([[(r >> b) & 1 for b in range(10)] for r in rows], dtype=np.uint8).reshape(-1, 10)
        rank, col = 0, 0
        m = m.copy()
        while rank < m.shape[0] and col < 10:
            piv = np.flatnonzero(m[rank:, col])
            if piv.size:
                p = rank + piv[0]
                m[[rank, p]] = m[[p, rank]]
                for r in range(m.shape[0]):
                    if r != rank and m[r, col]:
                        m[r] ^= m[rank]
                rank += 1
            col += 1
        assert gf2_rank(rows) == rank


class TestErrorGroup:
    def test_dedup_and_identity_dropped(self):
        g = ErrorGroup(2, (parse("XX"), parse("-XX"), parse("II"), parse("iZZ")))
        assert g.labels() == ["XX", "ZZ"]
        assert g.gf2_matrix.shape == (2, 4)
        assert g.gf2_matrix.tolist() == [[1, 1, 0, 0], [0, 0, 1, 1]]

    def test_empty_hamiltonian_trivial(self):
        g = groups.from_hamiltonian(SBHamiltonian(3, ()))
        assert g.generators == ()
        assert order(g) == 1
        assert dfs_dimension(g) == 8

    def test_report_fragment(self):
        r = qx(4).report()
        assert r == {"abelian": True, "order_log2": 2, "dfs_dim_log2": 2,
                     "generators": ["XXII", "IIXX"], "n_qubits": 4, "signs_discarded": True}


class TestAbelian:
    def test_disjoint(self):
        assert is_abelian(ErrorGroup(4, (parse("XXII"), parse("IIXX"))))

    def test_anticommuting(self):
        g = ErrorGroup(1, (parse("X"), parse("Z")))
        assert not is_abelian(g)
        with pytest.raises(NonAbelianError):
            order(g)
        with pytest.raises(NonAbelianError):
            dfs_dimension(g)
        assert "order_log2" not in g.report()

    def test_overlapping_xx_matrix_oracle(self):
        a, b = parse("XXI"), parse("IXX")
        ma, mb = kron_oracle(a), kron_oracle(b)
        assert np.allclose(ma @ mb, mb @ ma)
        assert is_abelian(ErrorGroup(3, (a, b)))


class TestOrder:
    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_q2x(self, n):
        assert order(q2x(n)) == 2 ** (n - 1) == closure_size(q2x(n).generators)
        assert dfs_dimension(q2x(n)) == 2

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_qx(self, n):
        assert order(qx(n)) == 2 ** (n // 2) == closure_size(qx(n).generators)
        assert dfs_dimension(qx(n)) == 2 ** (n // 2)

    def test_largest_enumerated_order(self):
        # 12 independent commuting generators mixing X and Z type
        n = 12
        gens = [PauliString.from_sparse(n, {q: "Z", q % n + 1: "Z"}) for q in range(1, n)]
        gens.append(PauliString.from_sparse(n, {q: "X" for q in range(1, n + 1)}))
        g = ErrorGroup(n, tuple(gens))
        assert is_abelian(g)
        assert order(g) == closure_size(g.generators) == 2**12

    def test_dependent_generators(self):
        g = ErrorGroup(3, (parse("XXI"), parse("IXX"), parse("XIX")))
        assert g.rank == 2
        assert order(g) == 4 == closure_size(g.generators)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 63), st.integers(0, 63)), min_size=1, max_size=12))
    def test_matches_closure_for_random_abelian(self, bits):
        # keep only generators commuting with all earlier ones
        gens = []
        for x, z in bits:
            p = PauliString(6, x, z)
            if p.is_identity:
                continue
            if all(multiply(p, q).key() == multiply(q, p).key() and
                   multiply(p, q).phase == multiply(q, p).phase for q in gens):
                gens.append(p)
        if not gens:
            return
        g = ErrorGroup(6, tuple(gens))
        assert order(g) == closure_size(g.generators)
        assert order(g) * dfs_dimension(g) == 2**6

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 6), st.integers(0, 6))
    def test_row_operation_invariance(self, i, j):
        g = q2x(8)
        gens = list(g.generators)
        if i == j:
            return
        gens[i] = multiply(gens[i], gens[j])
        assert order(ErrorGroup(8, tuple(gens))) == order(g)


class TestPipeline:
    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_mqe16_to_qx(self, n):
        g = groups.from_hamiltonian(average_hamiltonian(seq_mqe16_qx(n), build_hnn(n)))
        assert is_abelian(g)
        assert order(g) == 2 ** (n // 2)
        assert dfs_dimension(g) == 2 ** (n // 2)

    def test_mqe8_generators(self):
        g = groups.from_hamiltonian(average_hamiltonian(seq_mqe8(4), build_hnn(4)))
        assert set(g.labels()) == {"XXII", "IXXI", "IIXX"}

    def test_mqe16_generators(self):
        g = groups.from_hamiltonian(average_hamiltonian(seq_mqe16_qx(4), build_hnn(4)))
        assert set(g.labels()) == {"XXII", "IIXX"}
