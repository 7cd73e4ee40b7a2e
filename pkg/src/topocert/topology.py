"""Qubit sets, partitions and the declarative network description.

Qubit indices are 1-based everywhere a user can see them (labels, configs,
serialized files).  Internally a block is still stored by its 1-based
indices; code that needs array columns subtracts one at the point of use.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CoverError, EmptyBlockError, OverlapError


@dataclass(frozen=True, order=False)
class QubitSet:
    """Non-empty, strictly increasing tuple of 1-based qubit indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise EmptyBlockError("a qubit set must not be empty")
        if any(i < 1 for i in idx):
            raise ValueError(f"qubit indices are 1-based, got {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"qubit indices must be strictly increasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, items: Iterable[int]) -> "QubitSet":
        items = [int(i) for i in items]
        if len(set(items)) != len(items):
            raise ValueError(f"duplicate qubit index in {items}")
        return cls(tuple(sorted(items)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, item) -> bool:
        return item in self.indices

    def issubset(self, other: "QubitSet") -> bool:
        return set(self.indices) <= set(other.indices)

    def is_proper_subset(self, other: "QubitSet") -> bool:
        return len(self) < len(other) and self.issubset(other)

    def sort_key(self) -> tuple:
        return (len(self.indices), self.indices)

    @property
    def label(self) -> str:
        """Compact label as in "F_1234"; falls back to dotted form for indices >= 10."""
        if all(i < 10 for i in self.indices):
            return "".join(str(i) for i in self.indices)
        return ".".join(str(i) for i in self.indices)

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"


def as_qubit_set(obj) -> QubitSet:
    return obj if isinstance(obj, QubitSet) else QubitSet.of(obj)


@dataclass(frozen=True)
class Partition:
    blocks: tuple[QubitSet, ...]
    total_qubits: int

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def block_of(self, qubit: int) -> QubitSet:
        for b in self.blocks:
            if qubit in b:
                return b
        raise KeyError(qubit)

    def __str__(self) -> str:
        return "{" + ",".join(str(b) for b in self.blocks) + "}"


def validate_partition(blocks: Sequence, total_qubits: int) -> Partition:
    """Check that ``blocks`` partition {1..N}; blocks are returned ordered by smallest index."""
    raw = [list(b) for b in blocks]
    if any(len(b) == 0 for b in raw):
        raise EmptyBlockError("partition contains an empty block")
    sets = [as_qubit_set(b) for b in raw]
    seen: dict[int, QubitSet] = {}
    for s in sets:
        for i in s:
            if i in seen:
                raise OverlapError(f"blocks {seen[i]} and {s} share qubit {i}")
            seen[i] = s
    expected = set(range(1, total_qubits + 1))
    if set(seen) != expected:
        missing = sorted(expected - set(seen))
        extra = sorted(set(seen) - expected)
        raise CoverError(
            f"blocks do not cover {{1..{total_qubits}}}: missing {missing}, out of range {extra}"
        )
    return Partition(tuple(sorted(sets, key=lambda s: s.indices[0])), total_qubits)


def relevant_supersets(subset: QubitSet, candidates: Sequence[Partition]) -> list[QubitSet]:
    """Blocks of any candidate that strictly contain ``subset``.

    Deduplicated and ordered by size, then lexicographically, so reports
    come out identical across runs.
    """
    found = {b for p in candidates for b in p.blocks if subset.is_proper_subset(b)}
    return sorted(found, key=QubitSet.sort_key)


def partitions_exclusive(p: Partition, q: Partition) -> bool:
    for a in p.blocks:
        for b in q.blocks:
            if a.is_proper_subset(b) or b.is_proper_subset(a):
                return True
    return False


def find_nonexclusive_pair(candidates: Sequence[Partition]) -> tuple[int, int] | None:
    for i, j in itertools.combinations(range(len(candidates)), 2):
        if not partitions_exclusive(candidates[i], candidates[j]):
            return i, j
    return None


def check_pairwise_exclusivity(candidates: Sequence[Partition]) -> bool:
    """True iff every pair of candidates has some block strictly nested in a block of the other."""
    return find_nonexclusive_pair(candidates) is None


class Phase(enum.IntEnum):
    """Relative sign between |0...0> and |1...1> in a GHZ state."""

    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, value) -> "Phase":
        if isinstance(value, Phase):
            return value
        if value in ("+", "plus", 1, "+1"):
            return cls.PLUS
        if value in ("-", "minus", -1, "-1"):
            return cls.MINUS
        raise ValueError(f"unknown phase {value!r}; expected '+' or '-'")

    @property
    def symbol(self) -> str:
        return "+" if self is Phase.PLUS else "-"


NOISE_PARAMS = {"none": None, "werner": "v", "local_depolarizing": "p", "dephasing": "lambda"}


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_PARAMS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind != "none" and not 0.0 <= self.param <= 1.0:
            raise ValueError(f"{self.kind} parameter must lie in [0, 1], got {self.param}")

    @classmethod
    def werner(cls, v: float) -> "NoiseSpec":
        return cls("werner", float(v))

    @classmethod
    def local_depolarizing(cls, p: float) -> "NoiseSpec":
        return cls("local_depolarizing", float(p))

    @classmethod
    def dephasing(cls, lam: float) -> "NoiseSpec":
        return cls("dephasing", float(lam))

    def to_dict(self) -> dict:
        if self.kind == "none":
            return {"kind": "none"}
        return {"kind": self.kind, NOISE_PARAMS[self.kind]: self.param}


@dataclass(frozen=True)
class Source:
    block: QubitSet
    phase: Phase = Phase.PLUS
    noise: NoiseSpec = field(default_factory=NoiseSpec)


@dataclass(frozen=True)
class NetworkSpec:
    """Sources distributing noisy GHZ states over ``total_qubits`` nodes.

    ``grid_size`` is the number M of x-y plane settings (defaults to N);
    ``misalignment`` holds one angle offset in radians per qubit and only
    affects x-y plane measurements.
    """

    total_qubits: int
    sources: tuple[Source, ...]
    grid_size: int | None = None
    misalignment: tuple[float, ...] | None = None

    def __post_init__(self):
        n = int(self.total_qubits)
        if n < 2:
            raise ValueError("a network needs at least two qubits")
        srcs = tuple(sorted(self.sources, key=lambda s: s.block.indices[0]))
        partition = validate_partition([s.block for s in srcs], n)
        m = n if self.grid_size is None else int(self.grid_size)
        largest = max(len(b) for b in partition.blocks)
        if m < largest:
            raise ValueError(f"grid size M={m} is smaller than the largest source ({largest} qubits)")
        mis = (0.0,) * n if self.misalignment is None else tuple(float(t) for t in self.misalignment)
        if len(mis) != n or not all(math.isfinite(t) for t in mis):
            raise ValueError(f"misalignment needs {n} finite angles, got {len(mis)}")
        object.__setattr__(self, "total_qubits", n)
        object.__setattr__(self, "sources", srcs)
        object.__setattr__(self, "grid_size", m)
        object.__setattr__(self, "misalignment", mis)

    @property
    def partition(self) -> Partition:
        return Partition(tuple(s.block for s in self.sources), self.total_qubits)

    def to_dict(self) -> dict:
        return {
            "total_qubits": self.total_qubits,
            "grid_size": self.grid_size,
            "misalignment": list(self.misalignment),
            "sources": [
                {"qubits": list(s.block.indices), "phase": s.phase.symbol, "noise": s.noise.to_dict()}
                for s in self.sources
            ],
        }
