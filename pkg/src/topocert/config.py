"""JSON run configuration: networks to simulate, candidate topologies, shot budget.

Example (all keys except ``networks``/``network`` and ``candidates`` optional)::

    {
      "networks": [
        {"name": "ghz6", "total_qubits": 6, "grid_size": 6,
         "sources": [{"qubits": [1, 2, 3, 4, 5, 6], "phase": "+",
                      "noise": {"kind": "werner", "v": 0.95}}]}
      ],
      "candidates": [
        {"label": "H1", "blocks": [{"qubits": [1, 2, 3, 4, 5, 6], "phase": "+"}]}
      ],
      "shots": 1000, "seed": 1, "mode": "sampled",
      "superset_phases": "declared", "out_dir": "out",
      "devindep": {"subsets": [[1, 2, 3]], "shots": 1000}
    }

Noise entries: ``"none"``, ``{"kind": "werner", "v": ...}``,
``{"kind": "local_depolarizing", "p": ...}``, ``{"kind": "dephasing", "lambda": ...}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, TopoCertError
from .hypotheses import SUPERSET_POLICIES, Candidate, build_hypotheses
from .topology import (NOISE_PARAMS, NetworkSpec, NoiseSpec, Phase, QubitSet, Source,
                       validate_partition)

MODES = ("sampled", "exact")


@dataclass
class RunConfig:
    networks: list[tuple[str, NetworkSpec]]
    candidates: list[Candidate]
    shots: int = 1000
    seed: int = 0
    mode: str = "sampled"
    superset_phases: str = "declared"
    out_dir: str = "out"
    devindep: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "networks": [{"name": name, **spec.to_dict()} for name, spec in self.networks],
            "candidates": [
                {"label": c.label,
                 "blocks": [{"qubits": list(b.indices), "phase": p.symbol}
                            for b, p in zip(c.partition.blocks, c.phases)]}
                for c in self.candidates
            ],
            "shots": self.shots,
            "seed": self.seed,
            "mode": self.mode,
            "superset_phases": self.superset_phases,
            "out_dir": self.out_dir,
            "devindep": self.devindep,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _req(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    if key not in obj:
        raise ConfigError(f"{where}: missing field '{key}'")
    return obj[key]


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _noise(obj, where: str) -> NoiseSpec:
    if obj is None or obj == "none":
        return NoiseSpec()
    kind = _req(obj, "kind", where)
    if kind not in NOISE_PARAMS:
        raise ConfigError(f"{where}.kind: unknown noise kind {kind!r}")
    if kind == "none":
        return NoiseSpec()
    key = NOISE_PARAMS[kind]
    try:
        return NoiseSpec(kind, float(_req(obj, key, where)))
    except ValueError as exc:
        raise ConfigError(f"{where}.{key}: {exc}") from exc


def _qubits(obj, where: str) -> list[int]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{where}: expected a non-empty list of qubit indices")
    return [_int(q, f"{where}[{i}]", 1) for i, q in enumerate(obj)]


def _phase(obj, where: str) -> Phase:
    try:
        return Phase.parse(obj)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _network(obj: dict, where: str, default_name: str) -> tuple[str, NetworkSpec]:
    n = _int(_req(obj, "total_qubits", where), f"{where}.total_qubits", 2)
    raw_sources = _req(obj, "sources", where)
    if not isinstance(raw_sources, list) or not raw_sources:
        raise ConfigError(f"{where}.sources: expected a non-empty list")
    sources = []
    for i, s in enumerate(raw_sources):
        w = f"{where}.sources[{i}]"
        qubits = _qubits(_req(s, "qubits", w), f"{w}.qubits")
        try:
            block = QubitSet.of(qubits)
        except ValueError as exc:
            raise ConfigError(f"{w}.qubits: {exc}") from exc
        sources.append(Source(block, _phase(s.get("phase", "+"), f"{w}.phase"), _noise(s.get("noise"), f"{w}.noise")))
    grid = obj.get("grid_size")
    if grid is not None:
        grid = _int(grid, f"{where}.grid_size", 1)
    try:
        spec = NetworkSpec(n, tuple(sources), grid, obj.get("misalignment"))
    except TopoCertError as exc:
        raise type(exc)(f"{where}.sources: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return str(obj.get("name", default_name)), spec


def _candidate(obj: dict, where: str, n: int, index: int) -> Candidate:
    blocks = _req(obj, "blocks", where)
    if not isinstance(blocks, list) or not blocks:
        raise ConfigError(f"{where}.blocks: expected a non-empty list")
    qubit_lists, phases = [], []
    for i, b in enumerate(blocks):
        w = f"{where}.blocks[{i}]"
        if isinstance(b, list):
            qubit_lists.append(_qubits(b, w))
            phases.append(Phase.PLUS)
        else:
            qubit_lists.append(_qubits(_req(b, "qubits", w), f"{w}.qubits"))
            phases.append(_phase(b.get("phase", "+"), f"{w}.phase"))
    try:
        part = validate_partition(qubit_lists, n)
    except TopoCertError as exc:
        raise type(exc)(f"{where}.blocks: {exc}") from exc
    by_block = {QubitSet.of(q): p for q, p in zip(qubit_lists, phases)}
    return Candidate(part, tuple(by_block[b] for b in part.blocks), str(obj.get("label", f"H{index}")))


def parse_config(obj: dict) -> RunConfig:
    if not isinstance(obj, dict):
        raise ConfigError("top level: expected an object")
    if "networks" in obj:
        raw = obj["networks"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("networks: expected a non-empty list")
        networks = [_network(x, f"networks[{i}]", f"network{i + 1}") for i, x in enumerate(raw)]
    else:
        networks = [_network(_req(obj, "network", "top level"), "network", "network")]
    names = [n for n, _ in networks]
    if len(set(names)) != len(names):
        raise ConfigError(f"networks: duplicate names {names}")
    n_qubits = networks[0][1].total_qubits
    if any(s.total_qubits != n_qubits for _, s in networks):
        raise ConfigError("networks: all networks must have the same number of qubits")
    raw_c = _req(obj, "candidates", "top level")
    if not isinstance(raw_c, list) or not raw_c:
        raise ConfigError("candidates: expected a non-empty list")
    cands = [_candidate(c, f"candidates[{i}]", n_qubits, i + 1) for i, c in enumerate(raw_c)]
    build_hypotheses(cands)  # raises ExclusivityError naming the offending pair
    mode = obj.get("mode", "sampled")
    if mode not in MODES:
        raise ConfigError(f"mode: expected one of {MODES}, got {mode!r}")
    policy = obj.get("superset_phases", "declared")
    if policy not in SUPERSET_POLICIES:
        raise ConfigError(f"superset_phases: expected one of {SUPERSET_POLICIES}, got {policy!r}")
    dev = obj.get("devindep", {})
    if not isinstance(dev, dict):
        raise ConfigError("devindep: expected an object")
    return RunConfig(
        networks=networks,
        candidates=cands,
        shots=_int(obj.get("shots", 1000), "shots", 1),
        seed=_int(obj.get("seed", 0), "seed", 0),
        mode=mode,
        superset_phases=policy,
        out_dir=str(obj.get("out_dir", "out")),
        devindep=dev,
    )


def loads_config(text: str) -> RunConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(obj)


def load_config(path) -> RunConfig:
    return loads_config(Path(path).read_text())
