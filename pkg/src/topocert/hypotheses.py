"""Mutually exclusive topology hypotheses and Hoeffding p-value upper bounds.

A candidate topology is a partition of the qubits with a target GHZ phase per
block.  Its hypothesis requires, for every block I,

    d_I = F_I - max_{G in supersets(I)} F_G > 1/2

where the supersets are blocks of other candidates strictly containing I.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ExclusivityError
from .estimator import FidelityEstimate, estimate_fidelity
from .topology import (Partition, Phase, QubitSet, find_nonexclusive_pair,
                       relevant_supersets)

THRESHOLD = 0.5
SUPERSET_POLICIES = ("declared", "both")


@dataclass(frozen=True)
class Candidate:
    """A partition plus the GHZ phase targeted on each of its blocks."""

    partition: Partition
    phases: tuple[Phase, ...] = ()
    label: str = ""

    def __post_init__(self):
        phases = tuple(Phase.parse(p) for p in self.phases) or (Phase.PLUS,) * len(self.partition)
        if len(phases) != len(self.partition):
            raise ValueError(f"{len(phases)} phases for {len(self.partition)} blocks")
        object.__setattr__(self, "phases", phases)

    def phase_of(self, block: QubitSet) -> Phase:
        return self.phases[self.partition.blocks.index(block)]


def as_candidates(items: Sequence) -> list[Candidate]:
    out = []
    for i, item in enumerate(items, start=1):
        cand = item if isinstance(item, Candidate) else Candidate(item)
        if not cand.label:
            cand = Candidate(cand.partition, cand.phases, f"H{i}")
        out.append(cand)
    return out


@dataclass(frozen=True)
class Condition:
    block: QubitSet
    phase: Phase
    supersets: tuple[tuple[QubitSet, Phase], ...]

    def describe(self) -> str:
        lhs = f"F{self.phase.symbol}_{self.block.label}"
        if not self.supersets:
            return f"{lhs} > 1/2"
        terms = ", ".join(f"F{p.symbol}_{g.label}" for g, p in self.supersets)
        return f"{lhs} - max{{{terms}}} > 1/2"


@dataclass(frozen=True)
class Hypothesis:
    label: str
    partition: Partition
    conditions: tuple[Condition, ...]


def _superset_phases(candidates: Sequence[Candidate], policy: str) -> dict[QubitSet, tuple[Phase, ...]]:
    if policy not in SUPERSET_POLICIES:
        raise ValueError(f"superset phase policy must be one of {SUPERSET_POLICIES}")
    declared: dict[QubitSet, set] = {}
    for cand in candidates:
        for block, phase in zip(cand.partition.blocks, cand.phases):
            declared.setdefault(block, set()).add(phase)
    if policy == "both":
        return {b: (Phase.PLUS, Phase.MINUS) for b in declared}
    return {b: tuple(sorted(ps, reverse=True)) for b, ps in declared.items()}


def build_hypotheses(candidates: Sequence, superset_phases: str = "declared") -> list[Hypothesis]:
    """One hypothesis per candidate, in candidate order.

    With ``superset_phases="declared"`` a superset G is compared at every
    phase some candidate targets on G; ``"both"`` compares at + and -.
    """
    cands = as_candidates(candidates)
    pair = find_nonexclusive_pair([c.partition for c in cands])
    if pair is not None:
        i, j = pair
        raise ExclusivityError(
            f"candidates {cands[i].label} {cands[i].partition} and {cands[j].label} "
            f"{cands[j].partition} have no strictly nested blocks; the hypotheses would not be exclusive")
    phases = _superset_phases(cands, superset_phases)
    partitions = [c.partition for c in cands]
    out = []
    for cand in cands:
        conds = []
        for block, phase in zip(cand.partition.blocks, cand.phases):
            sups = tuple((g, p) for g in relevant_supersets(block, partitions) for p in phases[g])
            conds.append(Condition(block, phase, sups))
        out.append(Hypothesis(cand.label, cand.partition, tuple(conds)))
    return out


# ------------------------------------------------------------------ bounds

def _grid_factor(M: int) -> float:
    return 1.0 + 8.0 / M


def hoeffding_delta_single(eps: float, mu: int, M: int) -> float:
    """P[F_hat - F > eps] <= exp(-8 mu eps^2 / (1 + 8/M))."""
    return math.exp(-8.0 * mu * eps**2 / _grid_factor(M))


def hoeffding_epsilon_single(delta: float, mu: int, M: int) -> float:
    return math.sqrt(-_grid_factor(M) / (8.0 * mu) * math.log(delta))


def hoeffding_delta_difference(eps: float, mu: int, M: int) -> float:
    """Tail bound for a difference of two fidelity estimates."""
    return math.exp(-2.0 * eps**2 * mu / _grid_factor(M))


def hoeffding_epsilon_difference(delta: float, mu: int, M: int) -> float:
    return math.sqrt(-_grid_factor(M) / (2.0 * mu) * math.log(delta))


def _below_bound(d: float, mu: int, M: int) -> float:
    """Bound used when the hypothesis says the statistic exceeds 1/2."""
    d = min(d, THRESHOLD)
    return hoeffding_delta_difference(THRESHOLD - d, mu, M)


def _above_bound(d: float, mu: int, M: int) -> float:
    """Bound used when the hypothesis says the statistic is at most 1/2."""
    return hoeffding_delta_difference(d - THRESHOLD, mu, M) if d > THRESHOLD else 1.0


@dataclass(frozen=True)
class BlockStatistic:
    block: QubitSet
    phase: Phase
    fidelity: float
    superset_max: float
    argmax: tuple[QubitSet, Phase] | None
    mu: int

    @property
    def d(self) -> float:
        return self.fidelity - self.superset_max


def hypothesis_pvalue_bound(stats: Sequence, mu: int, M: int) -> float:
    """exp(-2 (1/2 - d)^2 mu / (1 + 8/M)) with d = min(all d, 1/2).

    ``stats`` may hold BlockStatistic objects or raw d values.
    """
    if not stats:
        raise ValueError("a hypothesis needs at least one block statistic")
    ds = [s.d if isinstance(s, BlockStatistic) else float(s) for s in stats]
    return _below_bound(min(ds + [THRESHOLD]), mu, M)


@dataclass(frozen=True)
class NullBound:
    exact: float
    simplified: float


def null_pvalue_bound(grouped: Sequence[Sequence], mu: int, M: int) -> NullBound:
    """Upper bound on the p-value of "no candidate holds".

    ``exact`` is min over candidates of max over their blocks of f(d), f as in
    ``_above_bound``; ``simplified`` is f(min{d_i : d_i > 1/2}) over the
    per-candidate worst blocks d_i = min_I d_I (1 when that set is empty).
    """
    if not grouped or any(len(g) == 0 for g in grouped):
        raise ValueError("every candidate needs block statistics")
    per_cand = [[s.d if isinstance(s, BlockStatistic) else float(s) for s in g] for g in grouped]
    exact = min(max(_above_bound(d, mu, M) for d in ds) for ds in per_cand)
    worst = [min(ds) for ds in per_cand]
    above = [d for d in worst if d > THRESHOLD]
    simplified = _above_bound(min(above), mu, M) if above else 1.0
    return NullBound(exact, simplified)


# --------------------------------------------------------------- certify

@dataclass
class HypothesisResult:
    hypothesis: Hypothesis
    statistics: list[BlockStatistic]
    bound: float

    @property
    def satisfied(self) -> bool:
        return all(s.d > THRESHOLD for s in self.statistics)

    @property
    def margin(self) -> float:
        return min(s.d for s in self.statistics) - THRESHOLD


@dataclass
class CertificationReport:
    results: list[HypothesisResult]
    null_bound: NullBound
    decision: str  # "accepted" | "null" | "ambiguous"
    accepted: str | None
    qualifying: list[str]
    fidelities: dict[tuple[QubitSet, Phase], FidelityEstimate] = field(repr=False)
    mu: int
    M: int
    exact: bool

    def radar_rows(self) -> list[tuple[str, str, float]]:
        """(label, kind, value) per direction: block fidelities, then block differences."""
        fid, diff, seen = [], [], set()
        for res in self.results:
            for s in res.statistics:
                key = (s.block, s.phase)
                if key in seen:
                    continue
                seen.add(key)
                lab = f"{s.block.label}{'' if s.phase is Phase.PLUS else '-'}"
                fid.append((lab, "fidelity", s.fidelity))
                diff.append((lab, "difference", s.d))
        return fid + diff


def certify(data, candidates: Sequence, superset_phases: str = "declared") -> CertificationReport:
    """Evaluate every hypothesis and the null hypothesis on one dataset.

    ``data`` is a Dataset or ExactData.  Each needed (subset, phase) fidelity
    is estimated once and shared by every hypothesis.
    """
    cands = as_candidates(candidates)
    hyps = build_hypotheses(cands, superset_phases)
    table: dict[tuple[QubitSet, Phase], FidelityEstimate] = {}

    def fid(block, phase) -> FidelityEstimate:
        if (block, phase) not in table:
            table[(block, phase)] = estimate_fidelity(data, block, phase)
        return table[(block, phase)]

    results = []
    for hyp in hyps:
        stats = []
        for cond in hyp.conditions:
            own = fid(cond.block, cond.phase)
            best, arg, mus = 0.0, None, [own.mu]
            for g, p in cond.supersets:
                other = fid(g, p)
                mus.append(other.mu)
                if arg is None or other.fidelity > best:
                    best, arg = other.fidelity, (g, p)
            stats.append(BlockStatistic(cond.block, cond.phase, own.fidelity, best, arg, min(mus)))
        results.append(HypothesisResult(hyp, stats, 0.0))
    mu = min(s.mu for r in results for s in r.statistics)
    for r in results:
        r.bound = hypothesis_pvalue_bound(r.statistics, mu, data.M)
    null = null_pvalue_bound([r.statistics for r in results], mu, data.M)

    qualifying = [r.hypothesis.label for r in results if r.satisfied]
    if not qualifying:
        decision, accepted = "null", None
    elif len(qualifying) == 1:
        decision, accepted = "accepted", qualifying[0]
    else:
        decision = "ambiguous"
        best = max((r for r in results if r.satisfied), key=lambda r: r.margin)
        accepted = best.hypothesis.label
    return CertificationReport(results, null, decision, accepted, qualifying, table, mu, data.M,
                               bool(getattr(data, "exact", False)))
