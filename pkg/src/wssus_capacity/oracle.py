"""Finite block-Toeplitz covariances and the Szegő-limit penalty check.

The channel penalty of the bounds is the large-``K`` limit of
``(1/(K T)) log det(I + (gamma rho T / M) R_h)``, where ``R_h`` is the
``KM x KM`` covariance of the channel gains on the lattice. This module
evaluates the finite-``K`` quantity with dense linear algebra and compares it
with the closed-form integral.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from .bounds import log_integral
from .channel_model import GridParams, PowerBudget, ScatteringSpec, correlation, validate_grid
from .errors import ConfigError, NumericalFailure, SizeExceeded

__all__ = [
    "MAX_DIMENSION",
    "CovarianceSpec",
    "critical_lattice",
    "build_covariance",
    "penalty_finite",
    "penalty_asymptotic",
    "SzegoRow",
    "SzegoReport",
    "szego_check",
]

MAX_DIMENSION = 4096


def critical_lattice(sf: ScatteringSpec, time_oversampling: float = 1.0) -> GridParams:
    """``T = a / (2 nu0)``, ``F = 1 / (2 tau0)``; ``a = 1`` is the critical lattice.

    For the brick shape at ``a = 1`` the sampled correlation is the identity,
    so finite and asymptotic penalties coincide for every ``K``. ``a < 1``
    oversamples in time and gives a genuine Toeplitz structure.
    """
    if not 0 < time_oversampling <= 1:
        raise ValueError("time_oversampling must lie in (0, 1]")
    return GridParams(T=time_oversampling / (2 * sf.nu0), F=1 / (2 * sf.tau0))


@dataclass(frozen=True)
class CovarianceSpec:
    """``K`` OFDM symbols by ``M`` subcarriers on ``grid`` for channel ``sf``."""

    K: int
    M: int
    grid: GridParams
    sf: ScatteringSpec

    def __post_init__(self):
        if self.K < 1 or self.M < 1:
            raise ConfigError("K and M must be >= 1")
        if self.K * self.M > MAX_DIMENSION:
            raise SizeExceeded(f"K*M = {self.K * self.M} exceeds the cap of {MAX_DIMENSION}")
        violations = validate_grid(self.grid, self.sf)
        if violations:
            raise ConfigError(f"lattice violates {', '.join(violations)}")


def build_covariance(spec: CovarianceSpec) -> np.ndarray:
    """Hermitian ``KM x KM`` channel covariance, time-major ordering.

    Entry ``((k, m), (k', m'))`` is ``R_H((k - k') T, (m - m') F)``.
    """
    K, M = spec.K, spec.M
    dk = np.arange(-(K - 1), K)
    dm = np.arange(-(M - 1), M)
    if spec.sf.mesh is None:
        table = correlation(spec.sf, dk[:, None] * spec.grid.T, dm[None, :] * spec.grid.F)
    else:
        table = np.empty((dk.size, dm.size), dtype=complex)
        for i, a in enumerate(dk):
            for j, b in enumerate(dm):
                if (i, j) > (dk.size - 1 - i, dm.size - 1 - j):
                    table[i, j] = np.conj(table[dk.size - 1 - i, dm.size - 1 - j])
                else:
                    table[i, j] = correlation(spec.sf, a * spec.grid.T, b * spec.grid.F)
    k = np.repeat(np.arange(K), M)
    m = np.tile(np.arange(M), K)
    R = table[k[:, None] - k[None, :] + K - 1, m[:, None] - m[None, :] + M - 1]
    return 0.5 * (R + R.conj().T)


def penalty_finite(spec: CovarianceSpec, power: PowerBudget, gamma: float = 1.0,
                   covariance: np.ndarray | None = None) -> float:
    """``(1/(K T)) log det(I + (gamma rho T / M) R_h)`` via Cholesky.

    ``covariance`` overrides the matrix built from ``spec``.

    Raises
    ------
    NumericalFailure
        If the matrix argument is not numerically positive definite.
    """
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    scale = gamma * power.rho * spec.grid.T / spec.M
    if scale == 0:
        return 0.0
    R = build_covariance(spec) if covariance is None else np.asarray(covariance)
    A = np.eye(R.shape[0]) + scale * R
    try:
        L = cholesky(A, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Cholesky factorization failed: {exc}") from exc
    logdet = 2.0 * float(np.sum(np.log(np.real(np.diag(L)))))
    return logdet / (spec.K * spec.grid.T)


def penalty_asymptotic(M: int, grid: GridParams, sf: ScatteringSpec, power: PowerBudget,
                       gamma: float = 1.0) -> float:
    """``W int int log(1 + gamma rho C_H / W)`` with ``W = M F``."""
    W = M * grid.F
    return W * log_integral(sf, gamma * power.rho / W)


@dataclass(frozen=True)
class SzegoRow:
    K: int
    finite: float
    asymptotic: float
    rel_error: float


@dataclass
class SzegoReport:
    rows: list[SzegoRow]

    HEADER = ("K", "finite", "asymptotic", "rel_error")

    def rel_errors(self) -> np.ndarray:
        return np.array([r.rel_error for r in self.rows])

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO() if fh is None else fh
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.HEADER)
        for r in self.rows:
            writer.writerow([r.K, f"{r.finite:.17g}", f"{r.asymptotic:.17g}", f"{r.rel_error:.17g}"])
        return buf.getvalue() if fh is None else ""


def szego_check(K_list: Sequence[int] | Iterable[int], M: int, grid: GridParams, sf: ScatteringSpec,
                power: PowerBudget, gamma: float = 1.0) -> SzegoReport:
    """Finite-``K`` penalty against its Szegő limit for each ``K`` in ``K_list``."""
    K_list = [int(K) for K in K_list]
    if any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise ValueError("K_list must be strictly increasing")
    asymptotic = penalty_asymptotic(M, grid, sf, power, gamma)
    rows = []
    for K in K_list:
        finite = penalty_finite(CovarianceSpec(K, M, grid, sf), power, gamma)
        if asymptotic == 0:
            rel = 0.0 if finite == 0 else math.inf
        else:
            rel = abs(finite - asymptotic) / abs(asymptotic)
        rows.append(SzegoRow(K, finite, asymptotic, rel))
    return SzegoReport(rows)
