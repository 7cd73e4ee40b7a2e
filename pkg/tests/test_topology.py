import pytest
from hypothesis import given, strategies as st

from topocert.errors import CoverError, EmptyBlockError, OverlapError
from topocert.topology import (NetworkSpec, NoiseSpec, Phase, QubitSet, Source,
                               check_pairwise_exclusivity, find_nonexclusive_pair,
                               partitions_exclusive, relevant_supersets, validate_partition)


def test_qubitset_is_sorted_and_labelled():
    s = QubitSet.of([3, 1, 2])
    assert s.indices == (1, 2, 3)
    assert s.label == "123"
    assert QubitSet.of([1, 2]).is_proper_subset(s)
    assert not s.is_proper_subset(s)


def test_qubitset_rejects_duplicates_and_zero():
    with pytest.raises(ValueError):
        QubitSet.of([1, 1])
    with pytest.raises(ValueError):
        QubitSet.of([0, 1])


def test_validate_partition_orders_blocks():
    p = validate_partition([[5, 6], [1, 2, 3, 4]], 6)
    assert [b.indices for b in p.blocks] == [(1, 2, 3, 4), (5, 6)]
    assert p.block_of(5) == QubitSet.of([5, 6])


@pytest.mark.parametrize("blocks, err", [
    ([[1, 2], [2, 3]], OverlapError),
    ([[1, 2]], CoverError),
    ([[1, 2, 3, 4]], CoverError),
    ([[1, 2, 3], []], EmptyBlockError),
])
def test_validate_partition_errors(blocks, err):
    with pytest.raises(err):
        validate_partition(blocks, 3)


def test_relevant_supersets_match_six_qubit_example():
    parts = [validate_partition(b, 6) for b in (
        [[1, 2, 3, 4, 5, 6]], [[1, 2, 3, 4], [5, 6]], [[1, 2], [3, 4, 5, 6]], [[1, 2], [3, 4], [5, 6]])]
    labels = lambda s: [g.label for g in relevant_supersets(QubitSet.of(s), parts)]
    assert labels([3, 4]) == ["1234", "3456", "123456"]
    assert labels([5, 6]) == ["3456", "123456"]
    assert labels([1, 2, 3, 4]) == ["123456"]
    assert labels([1, 2, 3, 4, 5, 6]) == []


def test_exclusivity_detects_identical_and_crossing_partitions():
    a = validate_partition([[1, 2], [3, 4]], 4)
    b = validate_partition([[1, 3], [2, 4]], 4)
    c = validate_partition([[1, 2, 3, 4]], 4)
    assert not partitions_exclusive(a, a)
    assert not partitions_exclusive(a, b)
    assert partitions_exclusive(a, c)
    assert find_nonexclusive_pair([c, a, b]) == (1, 2)
    assert check_pairwise_exclusivity([a, c])


def test_phase_parse():
    assert Phase.parse("-") is Phase.MINUS
    assert Phase.parse(1) is Phase.PLUS
    with pytest.raises(ValueError):
        Phase.parse("x")


@pytest.mark.parametrize("kind, value", [("werner", 1.2), ("local_depolarizing", -0.1), ("dephasing", 2)])
def test_noise_parameter_range(kind, value):
    with pytest.raises(ValueError):
        NoiseSpec(kind, value)


def test_network_spec_defaults_and_grid_check():
    spec = NetworkSpec(4, (Source(QubitSet.of([1, 2, 3, 4]), Phase.PLUS),))
    assert spec.grid_size == 4
    assert spec.partition.blocks == (QubitSet.of([1, 2, 3, 4]),)
    with pytest.raises(ValueError):
        NetworkSpec(4, (Source(QubitSet.of([1, 2, 3, 4]), Phase.PLUS),), grid_size=3)
    with pytest.raises(OverlapError):
        NetworkSpec(3, (Source(QubitSet.of([1, 2]), Phase.PLUS), Source(QubitSet.of([2, 3]), Phase.PLUS)))


@st.composite
def partitions(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    groups = {}
    for q, lab in enumerate(labels, start=1):
        groups.setdefault(lab, []).append(q)
    return n, list(groups.values())


@given(partitions())
def test_any_grouping_is_a_valid_partition(data):
    n, blocks = data
    p = validate_partition(blocks, n)
    assert sorted(q for b in p.blocks for q in b) == list(range(1, n + 1))


@given(partitions(), partitions())
def test_exclusivity_is_symmetric(a, b):
    if a[0] != b[0]:
        return
    pa, pb = validate_partition(a[1], a[0]), validate_partition(b[1], b[0])
    assert partitions_exclusive(pa, pb) == partitions_exclusive(pb, pa)
    assert not partitions_exclusive(pa, pa)
