"""Noisy GHZ sources, exact outcome distributions and seeded shot sampling.

The global network state is a tensor product of per-source states and every
measurement setting is a product of single-qubit observables, so nothing here
ever builds a 2^N matrix: distributions and samples are produced per source
and stitched together column-wise.

Outcome alphabets
-----------------
* ``Z`` shots are stored as bits, 0 meaning the +1 eigenvalue of sigma_z.
* x-y plane shots (grid settings ``XY(k)`` and Mermin settings) are stored
  as the eigenvalues +1 / -1.

Random streams
--------------
Each (setting, source) pair draws from its own ``numpy.random.PCG64``
generator seeded with ``SeedSequence(seed, spawn_key=setting.stream_key +
(source_index,))``.  ``stream_key`` is ``(0, 0)`` for Z, ``(1, k)`` for
XY(k) and ``(2, int("1" + bits, 2))`` for a Mermin string (Y -> 1).  Outcome
indices come from ``Generator.choice(2**n, size=shots, p=probs)``; bit
order within a source is big-endian (lowest qubit index = most significant
bit).  Sequential and threaded sampling therefore give identical datasets.
"""
from __future__ import annotations

import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import DimensionCapError, MissingSettingError
from .topology import NetworkSpec, NoiseSpec, Phase, QubitSet, as_qubit_set

MAX_SOURCE_QUBITS = 12


@dataclass(frozen=True)
class MeasurementSetting:
    """A global product measurement: ``Z``, grid setting ``XY(k)`` or a Mermin X/Y string."""

    kind: str
    k: int = 0
    axes: str = ""

    def __post_init__(self):
        if self.kind not in ("Z", "XY", "PAULI"):
            raise ValueError(f"unknown setting kind {self.kind!r}")
        if self.kind == "XY" and self.k < 0:
            raise ValueError("grid index must be non-negative")
        if self.kind == "PAULI" and (not self.axes or set(self.axes) - {"X", "Y"}):
            raise ValueError(f"Mermin settings are X/Y strings, got {self.axes!r}")

    @classmethod
    def z(cls) -> "MeasurementSetting":
        return cls("Z")

    @classmethod
    def xy(cls, k: int) -> "MeasurementSetting":
        return cls("XY", int(k))

    @classmethod
    def pauli(cls, axes: str) -> "MeasurementSetting":
        return cls("PAULI", 0, axes)

    @property
    def label(self) -> str:
        return {"Z": "Z", "XY": f"XY{self.k}", "PAULI": self.axes}[self.kind]

    @property
    def stream_key(self) -> tuple[int, int]:
        if self.kind == "Z":
            return (0, 0)
        if self.kind == "XY":
            return (1, self.k)
        return (2, int("1" + self.axes.replace("X", "0").replace("Y", "1"), 2))

    def sort_key(self) -> tuple:
        return (*self.stream_key, self.axes)

    def to_json(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "XY":
            return {"xy": self.k}
        return {"mermin": self.axes}

    @classmethod
    def from_json(cls, obj) -> "MeasurementSetting":
        if obj == "Z":
            return cls.z()
        if isinstance(obj, dict) and set(obj) == {"xy"}:
            return cls.xy(int(obj["xy"]))
        if isinstance(obj, dict) and set(obj) == {"mermin"}:
            return cls.pauli(str(obj["mermin"]))
        raise ValueError(f"cannot parse measurement setting {obj!r}")

    def angles(self, spec: NetworkSpec, block: QubitSet) -> np.ndarray | None:
        """Per-qubit x-y plane angles (misalignment included) for ``block``; None for Z."""
        if self.kind == "Z":
            return None
        offsets = np.array([spec.misalignment[q - 1] for q in block])
        if self.kind == "XY":
            if self.k >= spec.grid_size:
                raise ValueError(f"XY({self.k}) outside grid of size {spec.grid_size}")
            return self.k * np.pi / spec.grid_size + offsets
        if len(self.axes) != spec.total_qubits:
            raise ValueError(f"Mermin setting {self.axes} does not have {spec.total_qubits} letters")
        nominal = np.array([0.0 if self.axes[q - 1] == "X" else np.pi / 2 for q in block])
        return nominal + offsets


def grid_settings(grid_size: int) -> list[MeasurementSetting]:
    """Z followed by the M x-y plane settings."""
    return [MeasurementSetting.z()] + [MeasurementSetting.xy(k) for k in range(grid_size)]


# ---------------------------------------------------------------- states

def _ghz(n: int, phase: Phase) -> np.ndarray:
    d = 2**n
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = rho[-1, -1] = 0.5
    rho[0, -1] = rho[-1, 0] = 0.5 * int(phase)
    return rho


def _depolarize_qubit(rho: np.ndarray, n: int, q: int, p: float) -> np.ndarray:
    left, right = 2**q, 2 ** (n - q - 1)
    t = rho.reshape(left, 2, right, left, 2, right)
    traced = t[:, 0, :, :, 0, :] + t[:, 1, :, :, 1, :]
    mixed = np.zeros_like(t)
    mixed[:, 0, :, :, 0, :] = traced / 2
    mixed[:, 1, :, :, 1, :] = traced / 2
    return ((1 - p) * t + p * mixed).reshape(rho.shape)


def build_source_state(n: int, phase: Phase = Phase.PLUS, noise: NoiseSpec | None = None) -> np.ndarray:
    """Density matrix of an n-qubit GHZ source after the configured noise channel."""
    if n > MAX_SOURCE_QUBITS:
        raise DimensionCapError(f"sources are capped at {MAX_SOURCE_QUBITS} qubits, got {n}")
    if n < 1:
        raise ValueError("a source needs at least one qubit")
    noise = noise or NoiseSpec()
    rho = _ghz(n, Phase.parse(phase))
    if noise.kind == "werner":
        rho = noise.param * rho + (1 - noise.param) * np.eye(2**n) / 2**n
    elif noise.kind == "local_depolarizing":
        for q in range(n):
            rho = _depolarize_qubit(rho, n, q, noise.param)
    elif noise.kind == "dephasing":
        damp = (1 - noise.param) ** n
        rho[0, -1] *= damp
        rho[-1, 0] *= damp
    return rho


def check_density_matrix(rho: np.ndarray) -> None:
    """Raise ValueError unless ``rho`` is Hermitian, unit-trace and PSD (to 1e-12 / 1e-10)."""
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-12:
        raise ValueError(f"trace is {np.trace(rho).real}, not 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("state is not positive semidefinite")


def outcome_distribution(rho: np.ndarray, angles=None) -> np.ndarray:
    """Probabilities of the 2^n outcome strings for a local product measurement.

    ``angles=None`` measures sigma_z on every qubit; otherwise qubit q is
    measured along cos(a_q) sigma_x + sin(a_q) sigma_y, bit 0 meaning +1.
    """
    d = rho.shape[0]
    n = d.bit_length() - 1
    if angles is None:
        probs = np.real(np.diag(rho)).copy()
    else:
        angles = np.broadcast_to(np.asarray(angles, dtype=float), (n,))
        t = rho.reshape((2,) * (2 * n))
        for q, a in enumerate(angles):
            u = np.array([[1, np.exp(-1j * a)], [1, -np.exp(-1j * a)]]) / np.sqrt(2)
            t = np.moveaxis(np.tensordot(u, t, axes=([1], [q])), 0, q)
            t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [n + q])), 0, n + q)
        probs = np.real(np.diag(t.reshape(d, d))).copy()
    probs[probs < 0] = 0.0
    return probs / probs.sum()


def _marginal_tensor(probs: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    t = probs.reshape((2,) * n)
    drop = tuple(i for i in range(n) if i not in keep)
    return t.sum(axis=drop) if drop else t


def _parity(probs: np.ndarray, n: int, positions: list[int]) -> float:
    t = _marginal_tensor(probs, n, positions)
    sign = np.array([1.0, -1.0])
    for _ in positions:
        t = np.tensordot(sign, t, axes=([0], [0]))
    return float(t)


def _all_equal(probs: np.ndarray, n: int, positions: list[int]) -> tuple[float, float]:
    t = _marginal_tensor(probs, n, positions)
    k = len(positions)
    return float(t[(0,) * k]), float(t[(1,) * k])


def _split(spec: NetworkSpec, subset: QubitSet | None):
    """Yield (source index, local positions) for every source touched by ``subset``."""
    wanted = set(range(1, spec.total_qubits + 1)) if subset is None else set(as_qubit_set(subset))
    if not wanted <= set(range(1, spec.total_qubits + 1)):
        raise ValueError(f"subset {sorted(wanted)} exceeds {spec.total_qubits} qubits")
    for i, src in enumerate(spec.sources):
        pos = [j for j, q in enumerate(src.block) if q in wanted]
        if pos:
            yield i, pos


def spec_hash(spec: NetworkSpec) -> str:
    blob = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class ExactData:
    """Infinite-shot stand-in for a Dataset: every mean is an exact expectation.

    ``nominal_shots`` is what ``shots()`` reports, so p-value bounds can still
    be computed for a planned shot budget.
    """

    exact = True

    def __init__(self, spec: NetworkSpec, nominal_shots: int = 1000, distributions=None):
        self.spec = spec
        self.N = spec.total_qubits
        self.M = spec.grid_size
        self.nominal_shots = int(nominal_shots)
        self._states = [build_source_state(len(s.block), s.phase, s.noise) for s in spec.sources]
        self._dist: dict[tuple[MeasurementSetting, int], np.ndarray] = dict(distributions or {})

    def distribution(self, setting: MeasurementSetting, source_index: int) -> np.ndarray:
        key = (setting, source_index)
        if key not in self._dist:
            block = self.spec.sources[source_index].block
            self._dist[key] = outcome_distribution(self._states[source_index], setting.angles(self.spec, block))
        return self._dist[key]

    def settings(self) -> list[MeasurementSetting]:
        return grid_settings(self.M)

    def has_setting(self, setting: MeasurementSetting) -> bool:
        return setting.kind != "XY" or setting.k < self.M

    def shots(self, setting: MeasurementSetting) -> int:
        if not self.has_setting(setting):
            raise MissingSettingError(f"setting {setting.label} is outside the grid")
        return self.nominal_shots

    def all_equal_fraction(self, subset) -> float:
        z = MeasurementSetting.z()
        p0 = p1 = 1.0
        for i, pos in _split(self.spec, subset):
            a, b = _all_equal(self.distribution(z, i), len(self.spec.sources[i].block), pos)
            p0 *= a
            p1 *= b
        return p0 + p1

    def parity_mean(self, setting: MeasurementSetting, subset) -> float:
        if not self.has_setting(setting):
            raise MissingSettingError(f"setting {setting.label} is outside the grid")
        value = 1.0
        for i, pos in _split(self.spec, subset):
            value *= _parity(self.distribution(setting, i), len(self.spec.sources[i].block), pos)
        return value

    def find_setting(self, restriction: Mapping[int, str]) -> list[MeasurementSetting]:
        axes = "".join(restriction.get(q, "X") for q in range(1, self.N + 1))
        return [MeasurementSetting.pauli(axes)]

    def to_json(self) -> dict:
        out = []
        for setting in self.settings():
            for i, src in enumerate(self.spec.sources):
                out.append({
                    "setting": setting.to_json(),
                    "qubits": list(src.block.indices),
                    "probabilities": [float(p) for p in self.distribution(setting, i)],
                })
        return {
            "format": "topocert-distributions",
            "version": 1,
            "N": self.N,
            "M": self.M,
            "spec_hash": spec_hash(self.spec),
            "nominal_shots": self.nominal_shots,
            "spec": self.spec.to_dict(),
            "distributions": out,
        }


def exact_expectation(spec: NetworkSpec, setting: MeasurementSetting, subset=None) -> float:
    """Tr(rho O) for the product of the setting's observables over ``subset`` (all qubits if None)."""
    return ExactData(spec).parity_mean(setting, subset)


class Dataset:
    """Shot records grouped by setting; ``records[s]`` is a (shots, N) int8 array."""

    exact = False

    def __init__(self, N: int, M: int, records: Mapping[MeasurementSetting, np.ndarray],
                 seed: int | None = None, spec_hash: str | None = None):
        self.N = int(N)
        self.M = int(M)
        self.seed = seed
        self.spec_hash = spec_hash
        self.records = {s: np.asarray(records[s], dtype=np.int8) for s in sorted(records, key=MeasurementSetting.sort_key)}
        for s, arr in self.records.items():
            if arr.ndim != 2 or arr.shape[1] != self.N or arr.shape[0] < 1:
                raise ValueError(f"records for {s.label} must have shape (shots>=1, {self.N})")
            alphabet = {0, 1} if s.kind == "Z" else {-1, 1}
            if not set(np.unique(arr).tolist()) <= alphabet:
                raise ValueError(f"records for {s.label} contain values outside {sorted(alphabet)}")

    def settings(self) -> list[MeasurementSetting]:
        return list(self.records)

    def has_setting(self, setting: MeasurementSetting) -> bool:
        return setting in self.records

    def counts(self) -> dict[MeasurementSetting, int]:
        return {s: len(a) for s, a in self.records.items()}

    @property
    def mu(self) -> int:
        return min(self.counts().values())

    def shots(self, setting: MeasurementSetting) -> int:
        if setting not in self.records:
            raise MissingSettingError(f"dataset has no {setting.label} records")
        return len(self.records[setting])

    def _columns(self, subset) -> list[int]:
        cols = list(range(self.N)) if subset is None else [q - 1 for q in as_qubit_set(subset)]
        if cols and cols[-1] >= self.N:
            raise ValueError(f"subset exceeds {self.N} qubits")
        return cols

    def all_equal_fraction(self, subset) -> float:
        z = MeasurementSetting.z()
        if z not in self.records:
            raise MissingSettingError("dataset has no Z records")
        bits = self.records[z][:, self._columns(subset)]
        same = np.all(bits == 0, axis=1) | np.all(bits == 1, axis=1)
        return float(same.mean())

    def parity_mean(self, setting: MeasurementSetting, subset) -> float:
        if setting not in self.records:
            raise MissingSettingError(f"dataset has no {setting.label} records")
        vals = self.records[setting][:, self._columns(subset)]
        return float(np.prod(vals, axis=1, dtype=np.int64).mean())

    def find_setting(self, restriction: Mapping[int, str]) -> list[MeasurementSetting]:
        """Mermin settings whose letters agree with ``restriction`` (1-based qubit -> 'X'/'Y')."""
        return [s for s in self.records if s.kind == "PAULI"
                and all(s.axes[q - 1] == a for q, a in restriction.items())]

    # ------------------------------------------------------------ serialization

    def header(self) -> dict:
        return {"format": "topocert-dataset", "version": 1, "N": self.N, "M": self.M,
                "spec_hash": self.spec_hash, "seed": self.seed}

    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write(json.dumps(self.header(), sort_keys=True, separators=(",", ":")) + "\n")
        for s, arr in self.records.items():
            tag = json.dumps(s.to_json(), separators=(",", ":"))
            for row in arr.tolist():
                buf.write('{"setting":%s,"outcomes":%s}\n' % (tag, json.dumps(row, separators=(",", ":"))))
        return buf.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Dataset":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty dataset file")
        head = json.loads(lines[0])
        if head.get("format") != "topocert-dataset":
            raise ValueError("first line is not a topocert dataset header")
        grouped: dict[MeasurementSetting, list] = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                setting = MeasurementSetting.from_json(rec["setting"])
                grouped.setdefault(setting, []).append(rec["outcomes"])
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"line {lineno}: malformed shot record ({exc})") from exc
        records = {s: np.array(rows, dtype=np.int8) for s, rows in grouped.items()}
        return cls(head["N"], head["M"], records, seed=head.get("seed"), spec_hash=head.get("spec_hash"))

    @classmethod
    def load(cls, path) -> "Dataset":
        return cls.loads(Path(path).read_text())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.header() == other.header() and list(self.records) == list(other.records)
                and all(np.array_equal(self.records[s], other.records[s]) for s in self.records))


def _sample_setting(spec: NetworkSpec, setting: MeasurementSetting, shots: int, seed: int,
                    states: list[np.ndarray]) -> np.ndarray:
    out = np.empty((shots, spec.total_qubits), dtype=np.int8)
    for i, src in enumerate(spec.sources):
        n = len(src.block)
        probs = outcome_distribution(states[i], setting.angles(spec, src.block))
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(*setting.stream_key, i))))
        idx = rng.choice(2**n, size=shots, p=probs)
        bits = ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)
        cols = [q - 1 for q in src.block]
        out[:, cols] = bits if setting.kind == "Z" else 1 - 2 * bits
    return out


def sample_dataset(spec: NetworkSpec, shots_per_setting, seed: int,
                   max_workers: int | None = None) -> Dataset:
    """Draw seeded shot records.

    ``shots_per_setting`` is either one count applied to Z and every XY(k),
    or a mapping from MeasurementSetting to count.
    """
    if isinstance(shots_per_setting, Mapping):
        plan = dict(shots_per_setting)
    else:
        plan = {s: int(shots_per_setting) for s in grid_settings(spec.grid_size)}
    for s, m in plan.items():
        if int(m) < 1:
            raise ValueError(f"setting {s.label} needs at least one shot, got {m}")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    states = [build_source_state(len(s.block), s.phase, s.noise) for s in spec.sources]
    order = sorted(plan, key=MeasurementSetting.sort_key)

    def job(s):
        return _sample_setting(spec, s, int(plan[s]), seed, states)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            arrays = list(pool.map(job, order))
    else:
        arrays = [job(s) for s in order]
    return Dataset(spec.total_qubits, spec.grid_size, dict(zip(order, arrays)),
                   seed=seed, spec_hash=spec_hash(spec))
