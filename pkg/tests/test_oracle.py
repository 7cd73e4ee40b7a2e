"""The dense oracle checked against hand-computable facts before anything is compared to it."""
import numpy as np
import pytest

from topocert import oracle
from topocert.topology import NetworkSpec, NoiseSpec, Phase

from conftest import ghz


def test_ghz_projector_is_rank_one_projector():
    for n in (1, 2, 5):
        for ph in Phase:
            p = oracle.ghz_projector(n, ph)
            assert np.allclose(p @ p, p)
            assert np.isclose(np.trace(p), 1)


def test_projector_splits_into_diagonal_and_antidiagonal():
    for n in (2, 3, 4):
        assert np.allclose(oracle.ghz_projector(n, Phase.PLUS),
                           (oracle.build_diagonal(n) + oracle.build_antidiagonal(n)) / 2)
        assert np.allclose(oracle.ghz_projector(n, Phase.MINUS),
                           (oracle.build_diagonal(n) - oracle.build_antidiagonal(n)) / 2)


def test_xy_observable_endpoints():
    assert np.allclose(oracle.xy_observable(0), oracle.SX)
    assert np.allclose(oracle.xy_observable(np.pi / 2), oracle.SY)


def test_antidiagonal_of_one_qubit_is_sigma_x():
    assert np.allclose(oracle.build_antidiagonal(1), oracle.SX)


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    a = oracle.random_density_matrix(1, rng)
    b = oracle.random_density_matrix(2, rng)
    joint = np.kron(a, b)
    assert np.allclose(oracle.partial_trace(joint, [0], 3), a)
    assert np.allclose(oracle.partial_trace(joint, [1, 2], 3), b)


def test_reduced_state_permutes_to_index_order():
    spec = NetworkSpec(3, (ghz([1, 3]), ghz([2], noise=NoiseSpec.werner(0.0))))
    rho = oracle.reduced_state(spec, [1, 2, 3])
    expected = np.zeros((8, 8), dtype=complex)
    # Bell pair on qubits 1,3 and maximally mixed qubit 2: basis |q1 q2 q3>
    bell = oracle.ghz_projector(2)
    for i in range(4):
        for j in range(4):
            for m in (0, 1):
                r = ((i >> 1) << 2) | (m << 1) | (i & 1)
                c = ((j >> 1) << 2) | (m << 1) | (j & 1)
                expected[r, c] = bell[i, j] / 2
    assert np.allclose(rho, expected)


def test_source_state_werner_fidelity_closed_form():
    for n in (1, 2, 4):
        for v in (0.0, 0.3, 1.0):
            rho = oracle.source_state(n, Phase.PLUS, NoiseSpec.werner(v))
            f = np.real(np.trace(oracle.ghz_projector(n) @ rho))
            assert f == pytest.approx(v + (1 - v) / 2**n, abs=1e-12)


def test_full_depolarizing_gives_maximally_mixed():
    rho = oracle.source_state(3, Phase.PLUS, NoiseSpec.local_depolarizing(1.0))
    assert np.allclose(rho, np.eye(8) / 8)


def test_dephasing_kills_coherence_only():
    rho = oracle.source_state(2, Phase.PLUS, NoiseSpec.dephasing(1.0))
    assert np.allclose(rho, oracle.build_diagonal(2) / 2)


def test_lstsq_coefficients_reconstruct():
    for n, M in [(1, 1), (2, 3), (3, 3), (2, 6)]:
        a = oracle.lstsq_coefficients(n, M)
        lhs = sum(a[k] * oracle.build_setting_operator(k, n, M) for k in range(M))
        assert np.abs(lhs - oracle.build_antidiagonal(n)).max() < 1e-10


def test_dense_mermin_three_qubits_by_hand():
    X, Y = oracle.SX, oracle.SY
    k = oracle.kron_all
    by_hand = k([X, X, X]) - k([X, Y, Y]) - k([Y, X, Y]) - k([Y, Y, X])
    assert np.allclose(oracle.build_mermin(3), by_hand)


def test_verify_all_passes():
    rows = oracle.verify_all(quick=True)
    assert all(ok for _, ok, _ in rows), rows
