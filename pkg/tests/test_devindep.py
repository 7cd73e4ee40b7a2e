import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topocert import oracle
from topocert.devindep import (MerminValue, analytic_max_violation, mermin_expansion,
                               mermin_expectation, mermin_spectrum, numeric_violation_curve,
                               required_settings, semi_di_fidelity_bound, top_eigenvalues,
                               trusted_basis_fidelity_bound, violation_threshold)
from topocert.errors import MissingSettingError
from topocert.simulator import MeasurementSetting, grid_settings, sample_dataset
from topocert.topology import NetworkSpec, NoiseSpec

from conftest import ghz


def test_expansion_small_cases():
    assert [(t.axes, t.sign) for t in mermin_expansion(2)] == [("XX", 1), ("YY", -1)]
    assert [(t.axes, t.sign) for t in mermin_expansion(3)] == [
        ("XXX", 1), ("XYY", -1), ("YXY", -1), ("YYX", -1)]
    four = mermin_expansion(4)
    assert len(four) == 8
    assert sum(t.sign for t in four) == 1 - 6 + 1


def test_expansion_range():
    for bad in (1, 11):
        with pytest.raises(ValueError):
            mermin_expansion(bad)


def test_expansion_term_count():
    for N in range(2, 11):
        assert len(mermin_expansion(N)) == 2 ** (N - 1)


def test_ghz3_reaches_four():
    assert mermin_expectation(NetworkSpec(3, (ghz([1, 2, 3]),))).S == pytest.approx(4, abs=1e-12)


def test_ideal_ghz_value_for_larger_n():
    for N in (2, 4, 5):
        assert mermin_expectation(NetworkSpec(N, (ghz(range(1, N + 1)),))).S == pytest.approx(2 ** (N - 1))


def test_maximally_mixed_gives_zero():
    spec = NetworkSpec(3, (ghz([1, 2, 3], noise=NoiseSpec.werner(0.0)),))
    assert mermin_expectation(spec).S == pytest.approx(0, abs=1e-12)


def test_value_range_check():
    with pytest.raises(ValueError):
        MerminValue(9.0, 3)


def test_required_settings_pad_with_x():
    assert required_settings(3, [[1, 2, 3]]) == ["XXX", "XYY", "YXY", "YYX"]
    assert required_settings(4, [[1, 2], [3, 4]]) == ["XXXX", "XXYY", "YYXX"]


def test_sampled_mermin_on_subset_and_missing_settings():
    spec = NetworkSpec(4, (ghz([1, 2, 3]), ghz([4])))
    plan = {MeasurementSetting.pauli(a): 4000 for a in required_settings(4, [[1, 2, 3]])}
    ds = sample_dataset(spec, plan, seed=9)
    assert mermin_expectation(ds, [1, 2, 3]).S == pytest.approx(4, abs=0.15)
    with pytest.raises(MissingSettingError):
        mermin_expectation(sample_dataset(spec, {s: 10 for s in grid_settings(4)}, seed=0), [1, 2, 3])


def test_semi_di_examples():
    assert semi_di_fidelity_bound(4, 3) == 1.0
    assert semi_di_fidelity_bound(violation_threshold(3), 3) == pytest.approx(0.5)
    assert semi_di_fidelity_bound(3.5, 3) == pytest.approx(0.5 + math.sqrt(0.765625 - 0.5) / math.sqrt(2))
    assert semi_di_fidelity_bound(2.0, 3) is None
    with pytest.raises(ValueError):
        semi_di_fidelity_bound(-1, 3)
    assert trusted_basis_fidelity_bound(4, 3) == 0.5


def test_misaligned_ghz3_bounds_below_true_fidelity():
    spec = NetworkSpec(3, (ghz([1, 2, 3]),), misalignment=[0.1, 0.1, 0.1])
    S = mermin_expectation(spec).S
    assert S < 4
    true_f = oracle.exact_fidelity(spec, [1, 2, 3])
    assert semi_di_fidelity_bound(S, 3) <= true_f + 1e-12


def test_exact_mermin_matches_dense_operator_with_misalignment():
    rng = np.random.default_rng(1)
    delta = rng.uniform(-0.3, 0.3, 3)
    spec = NetworkSpec(3, (ghz([1, 2, 3], noise=NoiseSpec.local_depolarizing(0.1)),), misalignment=list(delta))
    rho = oracle.reduced_state(spec, [1, 2, 3])
    X = [oracle.xy_observable(d) for d in delta]
    Y = [oracle.xy_observable(np.pi / 2 + d) for d in delta]
    k = oracle.kron_all
    B = k([X[0], X[1], X[2]]) - k([X[0], Y[1], Y[2]]) - k([Y[0], X[1], Y[2]]) - k([Y[0], Y[1], X[2]])
    assert mermin_expectation(spec).S == pytest.approx(np.real(np.trace(B @ rho)), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.lists(st.floats(-1.6, 1.6), min_size=n, max_size=n)))
def test_fast_spectrum_equals_dense(thetas):
    dense = np.linalg.eigvalsh(oracle.build_mermin(len(thetas), thetas))[::-1]
    assert np.allclose(mermin_spectrum(thetas), dense, atol=1e-10)


def test_aligned_top_eigenvalues():
    assert top_eigenvalues(np.zeros(3)) == (4.0, 0.0)


def test_small_numeric_curve_matches_closed_form():
    pts = numeric_violation_curve(3, [0.6, 0.9], starts=4, seed=1)
    for p in pts:
        assert p.S == pytest.approx(analytic_max_violation(p.fidelity, 3), abs=1e-6)
        assert p.inverted(3) == pytest.approx(p.fidelity, abs=1e-4)
    assert numeric_violation_curve(3, [0.7], starts=3, seed=5) == numeric_violation_curve(3, [0.7], starts=3, seed=5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]).flatmap(lambda n: st.lists(st.floats(-1.5708, 1.5708), min_size=n, max_size=n)))
def test_odd_n_positive_spectrum_norm(thetas):
    N = len(thetas)
    spec = mermin_spectrum(thetas)
    assert np.sum(spec[spec > 0] ** 2) == pytest.approx(4 ** (N - 1), rel=1e-9)
    l1, l2 = top_eigenvalues(thetas)
    assert l1 >= l2 >= 0
    assert l1**2 + l2**2 <= 4 ** (N - 1) + 1e-8
