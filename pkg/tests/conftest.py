from pathlib import Path

import pytest

from topocert.hypotheses import Candidate
from topocert.topology import NetworkSpec, NoiseSpec, Phase, QubitSet, Source, validate_partition

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"

P, M = Phase.PLUS, Phase.MINUS


def six_qubit_candidates() -> list[Candidate]:
    """GHZ6+, GHZ4-(1234) x Bell(56), Bell(12) x GHZ4-(3456), three Bell pairs."""
    def cand(blocks, phases, label):
        return Candidate(validate_partition(blocks, 6), phases, label)

    return [
        cand([[1, 2, 3, 4, 5, 6]], (P,), "H1"),
        cand([[1, 2, 3, 4], [5, 6]], (M, P), "H2"),
        cand([[1, 2], [3, 4, 5, 6]], (P, M), "H3"),
        cand([[1, 2], [3, 4], [5, 6]], (P, P, P), "H4"),
    ]


def network_for(candidate: Candidate, noise: NoiseSpec = NoiseSpec()) -> NetworkSpec:
    srcs = tuple(Source(b, p, noise) for b, p in zip(candidate.partition.blocks, candidate.phases))
    return NetworkSpec(candidate.partition.total_qubits, srcs)


def ghz(qubits, phase=P, noise=NoiseSpec()) -> Source:
    return Source(QubitSet.of(qubits), phase, noise)


@pytest.fixture
def six_qubit_cands():
    return six_qubit_candidates()


ACCEPTANCE_LINES: list[str] = []


def acceptance_line(number: int, ok: bool, title: str, detail: str = "") -> None:
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
