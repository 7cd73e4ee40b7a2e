"""GHZ fidelity estimates for arbitrary qubit subsets from one shared set of settings.

The projector onto a GHZ state splits as (D_n + A_n)/2, where D_n is the
population part and A_n = |0..0><1..1| + h.c. the coherence part.  D_n is
read off the Z records; A_n is a real linear combination of the grid
observables M_k^{(x)n}, M_k = cos(k pi/M) sigma_x + sin(k pi/M) sigma_y.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, MissingSettingError, ShapeError
from .simulator import MeasurementSetting
from .topology import Phase, QubitSet, as_qubit_set


@dataclass(frozen=True)
class CoefficientVector:
    a: np.ndarray
    n: int
    M: int

    @property
    def norm_squared(self) -> float:
        return float(np.dot(self.a, self.a))


def _check_grid(n: int, M: int) -> None:
    if not 1 <= n <= M:
        raise GridError(f"need 1 <= n <= M, got n={n}, M={M}")


def min_norm_coefficients(n: int, M: int) -> CoefficientVector:
    """Coefficients of smallest 2-norm with sum_k a_k M_k^{(x)n} = A_n."""
    _check_grid(n, M)
    k = np.arange(M)
    if n == M:
        a = (-1.0) ** k / M
    else:
        a = 2.0 * np.cos(np.pi * k * n / M) / M
    return CoefficientVector(a, n, M)


def coefficients_via_dft(n: int, M: int, tail=()) -> CoefficientVector:
    """General coefficient vector from its free Fourier components.

    ``tail`` fills c_{n+1..M-1} of c = (1, 0, ..., 0, 1, tail); a zero tail
    gives the minimal-norm vector.  Complex results are reduced to their
    real part, which still reconstructs A_n since both sides are Hermitian.
    """
    _check_grid(n, M)
    tail = np.asarray(tail, dtype=complex).ravel()
    expected = max(M - n - 1, 0)
    if tail.size != expected:
        raise ShapeError(f"tail must have length {expected} for n={n}, M={M}, got {tail.size}")
    c = np.zeros(M, dtype=complex)
    c[0] = 1.0
    if n < M:
        c[n] = 1.0
        c[n + 1:] = tail
    k = np.arange(M)
    a = np.exp(-1j * np.pi * k * n / M) * np.fft.ifft(c)
    return CoefficientVector(np.real(a).copy(), n, M)


@dataclass(frozen=True)
class FidelityEstimate:
    subset: QubitSet
    phase: Phase
    diagonal: float
    antidiagonal: float
    fidelity: float
    mu: int

    @property
    def label(self) -> str:
        return f"F{self.phase.symbol}_{self.subset.label}"


def estimate_diagonal(data, subset) -> tuple[float, int]:
    """Fraction of Z shots that are all-0 or all-1 on ``subset``, and the Z shot count."""
    z = MeasurementSetting.z()
    if not data.has_setting(z):
        raise MissingSettingError("no Z records")
    return data.all_equal_fraction(as_qubit_set(subset)), data.shots(z)


def estimate_antidiagonal(data, subset, coeffs: CoefficientVector | None = None) -> tuple[float, int]:
    subset = as_qubit_set(subset)
    if coeffs is None:
        coeffs = min_norm_coefficients(len(subset), data.M)
    if coeffs.n != len(subset) or coeffs.M != data.M:
        raise ShapeError(f"coefficients built for (n={coeffs.n}, M={coeffs.M}), "
                         f"need (n={len(subset)}, M={data.M})")
    value = 0.0
    counts = []
    for k in range(data.M):
        setting = MeasurementSetting.xy(k)
        if not data.has_setting(setting):
            raise MissingSettingError(f"missing x-y setting k={k}")
        counts.append(data.shots(setting))
        value += coeffs.a[k] * data.parity_mean(setting, subset)
    return float(value), min(counts)


def estimate_fidelity(data, subset, phase=Phase.PLUS, coeffs: CoefficientVector | None = None) -> FidelityEstimate:
    """F = (D + sign * A) / 2 for the GHZ state of the given phase on ``subset``.

    ``data`` is a sampled Dataset or an ExactData (infinite-shot) view.
    """
    subset = as_qubit_set(subset)
    phase = Phase.parse(phase)
    d, m_z = estimate_diagonal(data, subset)
    a, mu_xy = estimate_antidiagonal(data, subset, coeffs)
    return FidelityEstimate(subset, phase, d, a, (d + int(phase) * a) / 2, min(m_z, mu_xy))


def fidelity_from_parts(diagonal: float, antidiagonal: float, phase=Phase.PLUS) -> float:
    return (diagonal + int(Phase.parse(phase)) * antidiagonal) / 2
