"""Mermin operator evaluation and (semi-)device-independent fidelity bounds.

B_N = [(X + iY)^{(x)N} + (X - iY)^{(x)N}] / 2 expands into the X/Y strings
with an even number of Y, signed (-1)^{#Y/2}.  With X = sigma_x and
Y = sigma_y, X + iY = 2|0><1|, hence B_N = 2^{N-1} A_N and an ideal GHZ
state reaches <B_N> = 2^{N-1}.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import MissingSettingError
from .simulator import ExactData, MeasurementSetting
from .topology import NetworkSpec, QubitSet, as_qubit_set

MAX_MERMIN_QUBITS = 10


@dataclass(frozen=True)
class MerminTerm:
    axes: str
    sign: int
    weight: float = 1.0


def _check_range(N: int) -> None:
    if not 2 <= N <= MAX_MERMIN_QUBITS:
        raise ValueError(f"Mermin operator supported for 2 <= N <= {MAX_MERMIN_QUBITS}, got {N}")


def mermin_expansion(N: int) -> list[MerminTerm]:
    """The 2^{N-1} signed X/Y strings of B_N, ordered by number of Y then lexicographically."""
    _check_range(N)
    terms = []
    for ny in range(0, N + 1, 2):
        strings = ("".join("Y" if i in ys else "X" for i in range(N)) for ys in itertools.combinations(range(N), ny))
        terms += [MerminTerm(axes, (-1) ** (ny // 2)) for axes in sorted(strings)]
    return terms


@dataclass(frozen=True)
class MerminValue:
    S: float
    N: int

    def __post_init__(self):
        if abs(self.S) > 2**self.N + 1e-9:
            raise ValueError(f"|S|={abs(self.S)} exceeds the algebraic maximum 2^{self.N}")


def _term_setting(axes: str, subset: QubitSet, total: int) -> MeasurementSetting:
    letters = dict(zip(subset, axes))
    return MeasurementSetting.pauli("".join(letters.get(q, "X") for q in range(1, total + 1)))


def mermin_expectation(source, subset=None) -> MerminValue:
    """<B> restricted to ``subset``.

    ``source`` is a NetworkSpec or ExactData (exact, misalignment from the
    spec: X at angle delta_q, Y at pi/2 + delta_q) or a sampled Dataset
    holding Mermin settings.  Padding qubits outside the subset are ignored.
    """
    if isinstance(source, NetworkSpec):
        source = ExactData(source)
    subset = QubitSet(tuple(range(1, source.N + 1))) if subset is None else as_qubit_set(subset)
    total = 0.0
    for term in mermin_expansion(len(subset)):
        restriction = dict(zip(subset, term.axes))
        matches = source.find_setting(restriction)
        if not matches:
            raise MissingSettingError(f"no Mermin setting matches {term.axes} on {subset}")
        if getattr(source, "exact", False):
            value = source.parity_mean(matches[0], subset)
        else:
            shots = sum(source.shots(s) for s in matches)
            value = sum(source.parity_mean(s, subset) * source.shots(s) for s in matches) / shots
        total += term.sign * term.weight * value
    return MerminValue(total, len(subset))


def required_settings(N: int, subsets: Sequence) -> list[str]:
    """Global X/Y strings covering B on every subset, padding other qubits with X."""
    found = set()
    for sub in subsets:
        sub = as_qubit_set(sub)
        if sub.indices[-1] > N:
            raise ValueError(f"subset {sub} exceeds {N} qubits")
        for term in mermin_expansion(len(sub)):
            found.add(_term_setting(term.axes, sub, N).axes)
    return sorted(found, key=lambda s: (s.count("Y"), s))


# --------------------------------------------------------------- bounds

def semi_di_fidelity_bound(S: float, N: int) -> float | None:
    """Lower bound on the GHZ fidelity for qubit measurements in the x-y plane.

    Proven for odd N.  Returns None below the threshold S = 2^{N-1}/sqrt(2).
    """
    if S < 0:
        raise ValueError("S must be non-negative")
    r2 = (S / 2 ** (N - 1)) ** 2
    # S = 2^{N-1}/sqrt(2) rounds to r2 = 0.5 - 1ulp; treat it as the threshold itself
    if r2 < 0.5 - 1e-12:
        return None
    return 0.5 + math.sqrt(max(r2 - 0.5, 0.0)) / math.sqrt(2)


def violation_threshold(N: int) -> float:
    return 2 ** (N - 1) / math.sqrt(2)


def trusted_basis_fidelity_bound(S: float, N: int) -> float:
    """F >= S / 2^N when every party measures exactly sigma_x and sigma_y."""
    return S / 2**N


def analytic_max_violation(F: float, N: int) -> float:
    return 2 ** (N - 1) * math.sqrt(F**2 + (1 - F) ** 2)


# ------------------------------------------------ misaligned spectrum

def _pair_moduli(thetas: np.ndarray) -> np.ndarray:
    """|<x_bar|B|x>| over x with leading bit 0, for X = sigma_x, Y = sin(t) sigma_x + cos(t) sigma_y.

    B only couples |x> with its complement, so its spectrum is {+-|b_x|}.
    """
    thetas = np.asarray(thetas, dtype=float)
    N = thetas.size
    alpha = 1 + np.cos(thetas) + 1j * np.sin(thetas)   # <0|X+iY|1>
    beta = 1 - np.cos(thetas) + 1j * np.sin(thetas)    # <1|X+iY|0>
    bits = ((np.arange(2 ** (N - 1))[:, None] >> np.arange(N - 1, -1, -1)) & 1).astype(bool)
    p = np.where(bits, alpha, beta).prod(axis=1)
    q = np.where(bits, beta.conj(), alpha.conj()).prod(axis=1)
    return np.abs(p + q) / 2


def top_eigenvalues(thetas) -> tuple[float, float]:
    """Two largest eigenvalues (lambda_1 >= lambda_2) of the misaligned Mermin operator."""
    m = np.sort(_pair_moduli(thetas))[::-1]
    return float(m[0]), float(m[1])


def mermin_spectrum(thetas) -> np.ndarray:
    m = _pair_moduli(thetas)
    return np.sort(np.concatenate([m, -m]))[::-1]


@dataclass(frozen=True)
class CurvePoint:
    fidelity: float
    S: float
    lambda1: float
    lambda2: float
    thetas: tuple[float, ...]

    def inverted(self, N: int) -> float | None:
        return semi_di_fidelity_bound(self.S, N)


def _maximize(F: float, N: int, rng: np.random.Generator, starts: int, tol: float):
    def neg(th):
        l1, l2 = top_eigenvalues(th)
        return -(l1 * F + l2 * (1 - F))

    best = None
    for _ in range(starts):
        x0 = rng.uniform(-np.pi / 2, np.pi / 2, N)
        res = minimize(neg, x0, method="Powell", bounds=[(-np.pi / 2, np.pi / 2)] * N,
                       options={"xtol": 1e-10, "ftol": tol, "maxfev": 20000})
        if best is None or res.fun < best.fun:
            best = res
    return best


def numeric_violation_curve(N: int, grid: Sequence[float], starts: int = 20, seed: int = 0,
                            tol: float = 1e-12) -> list[CurvePoint]:
    """Largest Mermin value compatible with fidelity F, maximised over misalignment angles.

    Multi-start Powell search (coordinate-direction, gradient-free) over
    theta in [-pi/2, pi/2]^N; each grid point gets its own seeded stream.
    """
    _check_range(N)
    if starts < 1:
        raise ValueError("need at least one start")
    out = []
    for i, F in enumerate(grid):
        if not 0.5 <= F <= 1.0:
            raise ValueError(f"fidelity grid values must lie in [1/2, 1], got {F}")
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(N, i)))
        res = _maximize(float(F), N, rng, starts, tol)
        l1, l2 = top_eigenvalues(res.x)
        out.append(CurvePoint(float(F), float(-res.fun), l1, l2, tuple(float(t) for t in res.x)))
    return out
