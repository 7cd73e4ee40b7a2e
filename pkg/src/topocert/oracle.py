"""Brute-force ground truth for the test-suite and the ``verify`` command.

Deliberately written against dense matrices built with ``np.kron`` and
without reusing the estimator's helpers: noise channels go through Kraus
operators, coefficients through a least-squares solve, reduced states
through an explicit partial trace.  Slow by design.
"""
from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from .errors import DimensionCapError
from .simulator import ExactData, MeasurementSetting
from .topology import NetworkSpec, NoiseSpec, Phase, QubitSet, as_qubit_set

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
CAP = 12


def _cap(n: int) -> None:
    if n > CAP:
        raise DimensionCapError(f"dense oracle limited to {CAP} qubits, got {n}")


def kron_all(ops) -> np.ndarray:
    return reduce(np.kron, ops, np.eye(1, dtype=complex))


def ghz_vector(n: int, phase=Phase.PLUS) -> np.ndarray:
    _cap(n)
    v = np.zeros(2**n, dtype=complex)
    v[0] = 1 / np.sqrt(2)
    v[-1] = int(Phase.parse(phase)) / np.sqrt(2)
    return v


def ghz_projector(n: int, phase=Phase.PLUS) -> np.ndarray:
    v = ghz_vector(n, phase)
    return np.outer(v, v.conj())


def build_diagonal(n: int) -> np.ndarray:
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    one = np.array([[0, 0], [0, 1]], dtype=complex)
    return kron_all([zero] * n) + kron_all([one] * n)


def build_antidiagonal(n: int) -> np.ndarray:
    up = np.array([[0, 1], [0, 0]], dtype=complex)
    return kron_all([up] * n) + kron_all([up.T] * n)


def xy_observable(angle: float) -> np.ndarray:
    return np.cos(angle) * SX + np.sin(angle) * SY


def build_setting_operator(k: int, n: int, M: int) -> np.ndarray:
    _cap(n)
    return kron_all([xy_observable(k * np.pi / M)] * n)


def build_mermin(N: int, thetas=None) -> np.ndarray:
    """[(X+iY)^{(x)N} + (X-iY)^{(x)N}]/2 with X = sigma_x, Y = sin(t) sigma_x + cos(t) sigma_y."""
    thetas = np.zeros(N) if thetas is None else np.asarray(thetas, dtype=float)
    ys = [np.sin(t) * SX + np.cos(t) * SY for t in thetas]
    return (kron_all([SX + 1j * y for y in ys]) + kron_all([SX - 1j * y for y in ys])) / 2


def build_pauli_string(axes: str) -> np.ndarray:
    return kron_all([SX if a == "X" else SY for a in axes])


# ----------------------------------------------------------------- states

def source_state(n: int, phase=Phase.PLUS, noise: NoiseSpec | None = None) -> np.ndarray:
    noise = noise or NoiseSpec()
    rho = ghz_projector(n, phase)
    d = 2**n
    if noise.kind == "werner":
        rho = noise.param * rho + (1 - noise.param) * np.eye(d) / d
    elif noise.kind == "local_depolarizing":
        p = noise.param
        kraus = [np.sqrt(1 - 3 * p / 4) * I2, np.sqrt(p / 4) * SX, np.sqrt(p / 4) * SY, np.sqrt(p / 4) * SZ]
        for q in range(n):
            ks = [kron_all([I2] * q + [k] + [I2] * (n - q - 1)) for k in kraus]
            rho = sum(k @ rho @ k.conj().T for k in ks)
    elif noise.kind == "dephasing":
        rho = rho.copy()
        rho[0, d - 1] *= (1 - noise.param) ** n
        rho[d - 1, 0] *= (1 - noise.param) ** n
    return rho


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    d = 2**n
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def partial_trace(rho: np.ndarray, keep, n: int) -> np.ndarray:
    """Reduced state on the 0-based positions ``keep`` (kept in the given order)."""
    keep = list(keep)
    t = rho.reshape([2] * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = [letters[i] for i in range(n)]
    cols = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 2 ** len(keep)
    return red.reshape(d, d)


def reduced_state(spec: NetworkSpec, subset) -> np.ndarray:
    """Reduced state on ``subset`` with qubits in increasing index order."""
    subset = as_qubit_set(subset)
    _cap(len(subset))
    parts, order = [], []
    for src in spec.sources:
        pos = [j for j, q in enumerate(src.block) if q in subset]
        if not pos:
            continue
        rho = source_state(len(src.block), src.phase, src.noise)
        parts.append(partial_trace(rho, pos, len(src.block)))
        order += [src.block.indices[j] for j in pos]
    joint = kron_all(parts)
    n = len(order)
    perm = sorted(range(n), key=lambda i: order[i])
    t = joint.reshape([2] * (2 * n)).transpose(perm + [n + p for p in perm])
    return t.reshape(2**n, 2**n)


def exact_fidelity(spec: NetworkSpec, subset, phase=Phase.PLUS) -> float:
    subset = as_qubit_set(subset)
    rho = reduced_state(spec, subset)
    return float(np.real(np.trace(ghz_projector(len(subset), phase) @ rho)))


def lstsq_coefficients(n: int, M: int) -> np.ndarray:
    """Minimum-norm real solution of sum_k a_k M_k^{(x)n} = A_n by least squares."""
    cols = [build_setting_operator(k, n, M).ravel() for k in range(M)]
    mat = np.array(cols).T
    target = build_antidiagonal(n).ravel()
    real_mat = np.vstack([mat.real, mat.imag])
    real_target = np.concatenate([target.real, target.imag])
    a, *_ = np.linalg.lstsq(real_mat, real_target, rcond=None)
    return a


def _global_distribution(data: ExactData, setting: MeasurementSetting) -> np.ndarray:
    """Joint probability tensor over all N qubits (axis q-1 = qubit q)."""
    spec = data.spec
    t = np.ones(())
    order = []
    for i, src in enumerate(spec.sources):
        t = np.multiply.outer(t, data.distribution(setting, i).reshape([2] * len(src.block)))
        order += list(src.block.indices)
    perm = sorted(range(len(order)), key=lambda i: order[i])
    return t.transpose(perm)


def reference_estimates(spec: NetworkSpec, subset, phase=Phase.PLUS, data: ExactData | None = None) -> dict:
    """Estimator formulas evaluated by enumerating every global outcome string."""
    subset = as_qubit_set(subset)
    data = data or ExactData(spec)
    N, M = spec.total_qubits, spec.grid_size
    cols = [q - 1 for q in subset]
    strings = np.array(list(itertools.product([0, 1], repeat=N)))
    restricted = strings[:, cols]
    equal = np.all(restricted == 0, axis=1) | np.all(restricted == 1, axis=1)
    parity = (-1.0) ** restricted.sum(axis=1)
    pz = _global_distribution(data, MeasurementSetting.z()).ravel()
    D = float(pz[equal].sum())
    a = lstsq_coefficients(len(subset), M)
    A = 0.0
    for k in range(M):
        pk = _global_distribution(data, MeasurementSetting.xy(k)).ravel()
        A += a[k] * float(pk @ parity)
    F = (D + int(Phase.parse(phase)) * A) / 2
    return {"D": D, "A": A, "F": F}


# ----------------------------------------------------------------- verify

def verify_all(quick: bool = False) -> list[tuple[str, bool, str]]:
    """Run the identity suite; returns (name, passed, detail) rows."""
    from . import devindep, estimator

    rows = []
    worst = 0.0
    norms_ok = True
    for M in range(1, 9):
        for n in range(1, M + 1):
            c = estimator.min_norm_coefficients(n, M)
            lhs = sum(c.a[k] * build_setting_operator(k, n, M) for k in range(M))
            worst = max(worst, np.abs(lhs - build_antidiagonal(n)).max())
            target = 1 / M if n == M else 2 / M
            norms_ok &= abs(c.norm_squared - target) <= 1e-12
    rows.append(("coefficient identity, 1<=n<=M<=8", worst <= 1e-10, f"max dev {worst:.2e}"))
    rows.append(("minimal norms 2/M and 1/M", bool(norms_ok), ""))

    dev = max(np.abs(lstsq_coefficients(n, M) - estimator.min_norm_coefficients(n, M).a).max()
              for M in range(1, 7) for n in range(1, M + 1))
    rows.append(("least-squares coefficients = closed form", dev <= 1e-9, f"max dev {dev:.2e}"))

    dev = 0.0
    for N in range(2, 9):
        dev = max(dev, np.abs(build_mermin(N) - 2 ** (N - 1) * build_antidiagonal(N)).max())
        terms = sum(t.sign * build_pauli_string(t.axes) for t in devindep.mermin_expansion(N))
        dev = max(dev, np.abs(terms - build_mermin(N)).max())
    rows.append(("Mermin operator = 2^(N-1) A_N, N<=8", dev <= 1e-10, f"max dev {dev:.2e}"))

    rng = np.random.default_rng(2024)
    dev = 0.0
    for N in (2, 3, 4, 5):
        th = rng.uniform(-np.pi / 2, np.pi / 2, N)
        dense = np.linalg.eigvalsh(build_mermin(N, th))[::-1]
        dev = max(dev, np.abs(dense - devindep.mermin_spectrum(th)).max())
    rows.append(("misaligned Mermin spectrum fast path", dev <= 1e-10, f"max dev {dev:.2e}"))

    from .topology import Source, NetworkSpec as Spec
    kinds = [NoiseSpec(), NoiseSpec.werner(0.7), NoiseSpec.local_depolarizing(0.2), NoiseSpec.dephasing(0.3)]
    dev = 0.0
    for trial in range(10 if quick else 40):
        n1 = int(rng.integers(1, 4))
        n2 = int(rng.integers(1, 4))
        srcs = (Source(QubitSet(tuple(range(1, n1 + 1))), Phase(rng.choice([1, -1])), kinds[trial % 4]),
                Source(QubitSet(tuple(range(n1 + 1, n1 + n2 + 1))), Phase(rng.choice([1, -1])), kinds[(trial // 4) % 4]))
        spec = Spec(n1 + n2, srcs)
        data = ExactData(spec)
        for _ in range(3):
            k = int(rng.integers(1, n1 + n2 + 1))
            sub = QubitSet.of(rng.choice(np.arange(1, n1 + n2 + 1), size=k, replace=False))
            for ph in (Phase.PLUS, Phase.MINUS):
                f = estimator.estimate_fidelity(data, sub, ph).fidelity
                dev = max(dev, abs(f - exact_fidelity(spec, sub, ph)))
    rows.append(("exact estimator = dense fidelity", dev <= 1e-10, f"max dev {dev:.2e}"))
    return rows
