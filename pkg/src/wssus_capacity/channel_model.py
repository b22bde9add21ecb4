"""WSSUS scattering functions, lattice parameters and power budgets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .quadrature import DEFAULT_TOLERANCE, Tolerance, integrate_1d, integrate_2d

__all__ = [
    "ScatteringSpec",
    "GridParams",
    "PowerBudget",
    "brick",
    "from_mesh",
    "density",
    "power_doppler_profile",
    "correlation",
    "validate_grid",
    "db_to_linear",
]

DEFAULT_TAU0 = 0.5e-6
DEFAULT_NU0 = 500.0


def db_to_linear(value_db):
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True, eq=False)
class ScatteringSpec:
    """Scattering function supported on ``[-tau0, tau0] x [-nu0, nu0]``.

    ``mesh`` is ``None`` for the brick shape (constant density). Otherwise it
    holds nonnegative node values on a uniform ``tau x nu`` mesh spanning the
    support (rows index delay); the density is their bilinear interpolant,
    rescaled so that it integrates to ``sigma2``.
    """

    tau0: float
    nu0: float
    sigma2: float
    mesh: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("tau0", "nu0", "sigma2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        if self.spread > 1:
            raise ConfigError(
                f"channel is overspread: spread 4*tau0*nu0 = {self.spread:.6g} > 1"
            )
        if self.mesh is not None:
            mesh = np.array(self.mesh, dtype=float)
            if mesh.ndim != 2 or min(mesh.shape) < 2:
                raise ConfigError("mesh must be a 2-D array with at least 2 nodes per axis")
            if not np.all(np.isfinite(mesh)) or np.any(mesh < 0):
                raise ConfigError("mesh values must be finite and nonnegative")
            # Exact integral of the bilinear interpolant is the trapezoid rule.
            taus, nus = self.mesh_axes(mesh.shape)
            mass = np.trapezoid(np.trapezoid(mesh, nus, axis=1), taus)
            if not mass > 0:
                raise ConfigError("mesh integrates to zero")
            mesh = mesh * (self.sigma2 / mass)
            mesh.setflags(write=False)
            object.__setattr__(self, "mesh", mesh)

    @property
    def shape(self) -> str:
        return "brick" if self.mesh is None else "grid"

    @property
    def spread(self) -> float:
        return 4.0 * self.tau0 * self.nu0

    def mesh_axes(self, shape=None):
        n_tau, n_nu = self.mesh.shape if shape is None else shape
        return (
            np.linspace(-self.tau0, self.tau0, n_tau),
            np.linspace(-self.nu0, self.nu0, n_nu),
        )

    @property
    def rect(self):
        return (-self.tau0, self.tau0, -self.nu0, self.nu0)

    def breakpoints(self):
        """Mesh lines as ``(tau_points, nu_points)``; empty for a brick."""
        if self.mesh is None:
            return (), ()
        taus, nus = self.mesh_axes()
        return tuple(taus[1:-1]), tuple(nus[1:-1])


def brick(tau0=DEFAULT_TAU0, nu0=DEFAULT_NU0, sigma2=1e-9):
    return ScatteringSpec(tau0=tau0, nu0=nu0, sigma2=sigma2)


def from_mesh(mesh, tau0=DEFAULT_TAU0, nu0=DEFAULT_NU0, sigma2=1e-9):
    return ScatteringSpec(tau0=tau0, nu0=nu0, sigma2=sigma2, mesh=np.asarray(mesh, dtype=float))


@dataclass(frozen=True)
class GridParams:
    """Time-frequency lattice: OFDM symbol duration ``T`` and subcarrier spacing ``F``."""

    T: float
    F: float

    @property
    def TF(self) -> float:
        return self.T * self.F


@dataclass(frozen=True)
class PowerBudget:
    """Average receive power ``P`` (W), noise density ``N0`` (W/Hz), peak-to-average ratio ``beta``."""

    P: float
    N0: float
    beta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.P) and self.P >= 0):
            raise ConfigError(f"P must be finite and >= 0, got {self.P!r}")
        if not (math.isfinite(self.N0) and self.N0 > 0):
            raise ConfigError(f"N0 must be finite and > 0, got {self.N0!r}")
        if not (math.isfinite(self.beta) and self.beta >= 1):
            raise ConfigError(f"beta must be >= 1, got {self.beta!r}")

    @property
    def rho(self) -> float:
        """Receive power over noise density, in Hz."""
        return self.P / self.N0

    @property
    def peak(self) -> float:
        return self.beta * self.P


def _bilinear(sf, tau, nu):
    taus, nus = sf.mesh_axes()
    n_tau, n_nu = sf.mesh.shape
    u = (tau + sf.tau0) / (2 * sf.tau0) * (n_tau - 1)
    v = (nu + sf.nu0) / (2 * sf.nu0) * (n_nu - 1)
    i = np.clip(np.floor(u).astype(int), 0, n_tau - 2)
    j = np.clip(np.floor(v).astype(int), 0, n_nu - 2)
    du = np.clip(u - i, 0.0, 1.0)
    dv = np.clip(v - j, 0.0, 1.0)
    m = sf.mesh
    return (
        m[i, j] * (1 - du) * (1 - dv)
        + m[i + 1, j] * du * (1 - dv)
        + m[i, j + 1] * (1 - du) * dv
        + m[i + 1, j + 1] * du * dv
    )


def density(sf: ScatteringSpec, tau, nu):
    """Scattering function value ``C_H(tau, nu)``; zero outside the support."""
    tau, nu = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(nu, dtype=float))
    inside = (np.abs(tau) <= sf.tau0) & (np.abs(nu) <= sf.nu0)
    if sf.mesh is None:
        out = np.where(inside, sf.sigma2 / sf.spread, 0.0)
    else:
        out = np.where(inside, _bilinear(sf, tau, nu), 0.0)
    return out[()] if out.ndim == 0 else out


def power_doppler_profile(sf: ScatteringSpec, nu):
    """Delay marginal of the scattering function, ``int C_H(tau, nu) dtau``."""
    nu = np.asarray(nu, dtype=float)
    inside = np.abs(nu) <= sf.nu0
    if sf.mesh is None:
        out = np.where(inside, sf.sigma2 / (2 * sf.nu0), 0.0)
    else:
        # Piecewise linear in tau at fixed nu, so the trapezoid rule over the
        # tau nodes is exact.
        taus, _ = sf.mesh_axes()
        tt, nn = np.meshgrid(taus, np.ravel(nu), indexing="ij")
        values = _bilinear(sf, tt, nn)
        out = np.where(inside, np.trapezoid(values, taus, axis=0).reshape(nu.shape), 0.0)
    return out[()] if out.ndim == 0 else out


def correlation(sf: ScatteringSpec, dt, df, method: str = "auto", tol: Tolerance = DEFAULT_TOLERANCE):
    """Time-frequency correlation ``R_H(dt, df)``.

    Uses ``R_H(dt, df) = int int C_H(tau, nu) exp(j 2 pi (nu dt - tau df)) dtau dnu``.
    Only ``|R_H|`` and ``R_H(0, 0) = sigma2`` are convention independent.

    ``method="closed"`` is only available for the brick shape, where the
    transform is ``sigma2 sinc(2 nu0 dt) sinc(2 tau0 df)``. ``"quadrature"``
    evaluates the Fourier integral numerically (scalar lags only).
    """
    if method == "auto":
        method = "closed" if sf.mesh is None else "quadrature"
    if method == "closed":
        if sf.mesh is not None:
            raise ValueError("closed-form correlation exists only for the brick shape")
        dt = np.asarray(dt, dtype=float)
        df = np.asarray(df, dtype=float)
        out = sf.sigma2 * np.sinc(2 * sf.nu0 * dt) * np.sinc(2 * sf.tau0 * df) + 0j
        return out[()] if out.ndim == 0 else out
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")

    dt = float(dt)
    df = float(df)
    tau_pts, nu_pts = sf.breakpoints()
    # Absolute target keeps the near-zero component of a real-valued
    # correlation from demanding relative accuracy on rounding noise.
    qtol = Tolerance(rel=tol.rel, abs=max(tol.abs, tol.rel * sf.sigma2), max_subdivisions=tol.max_subdivisions)

    def phase(tau, nu):
        return 2 * np.pi * (nu * dt - tau * df)

    real = integrate_2d(
        lambda t, n: density(sf, t, n) * np.cos(phase(t, n)), sf.rect, qtol, tau_pts, nu_pts
    )
    imag = integrate_2d(
        lambda t, n: density(sf, t, n) * np.sin(phase(t, n)), sf.rect, qtol, tau_pts, nu_pts
    )
    return complex(real, imag)


def validate_grid(grid: GridParams, sf: ScatteringSpec) -> list[str]:
    """Violated lattice constraints; an empty list means the lattice is admissible."""
    violations = []
    # Relative slack absorbs rounding in boundary choices like T = 1/(2 nu0).
    slack = 1e-12
    if grid.T * grid.F < 1 - slack:
        violations.append("TF>=1")
    if grid.T > (1 + slack) / (2 * sf.nu0):
        violations.append("T<=1/(2nu0)")
    if grid.F > (1 + slack) / (2 * sf.tau0):
        violations.append("F<=1/(2tau0)")
    return violations


def total_variance(sf: ScatteringSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Numerical integral of the density over its support."""
    tau_pts, nu_pts = sf.breakpoints()
    return integrate_2d(lambda t, n: density(sf, t, n), sf.rect, tol, tau_pts, nu_pts)


def doppler_variance(sf: ScatteringSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Numerical integral of the power-Doppler profile."""
    _, nu_pts = sf.breakpoints()
    return integrate_1d(lambda n: power_doppler_profile(sf, n), -sf.nu0, sf.nu0, tol, points=nu_pts)
