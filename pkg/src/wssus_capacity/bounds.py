"""Capacity bounds for underspread WSSUS Rayleigh fading under peak constraints.

Rates are in nat/s. Power enters only through ``rho = P / N0`` (Hz), so every
bound is invariant under a common rescaling of ``P`` and ``N0``.

Peak constraint per time-frequency slot (finite bandwidth ``W``):

* :func:`ub1` -- upper bound with the optimal fraction ``alpha`` of the power,
* :func:`ub2` -- perfect receive CSI, peak constraint dropped,
* :func:`lb` -- constant-modulus lower bound with time-sharing factor ``gamma``,
* :func:`lb_approx` -- its second-order low-SNR expansion.

Peak constraint per OFDM symbol only (infinite bandwidth): :func:`viterbi_lb`.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

import numpy as np

from .channel_model import PowerBudget, ScatteringSpec, density, power_doppler_profile
from .coherent_mi import Constellation, get_constellation, rayleigh_cm_mi
from .errors import Boundary, ConfigError, NonConvergence
from .optimize import grid_then_golden
from .quadrature import DEFAULT_TOLERANCE, Tolerance, expect_exponential, integrate_1d, integrate_2d

__all__ = [
    "LinkConfig",
    "BoundPoint",
    "BoundCurve",
    "log_integral",
    "penalty_A",
    "ub1",
    "ub2",
    "lb",
    "lb_approx",
    "viterbi_lb",
    "awgn_inf_capacity",
    "coherent_term",
    "bound_function",
    "critical_bandwidth",
    "evaluate_point",
    "sweep",
    "bandwidth_grid",
    "resolve_workers",
]

logger = logging.getLogger(__name__)

GAMMA_GRID_POINTS = 32
GAMMA_REL_TOL = 1e-4
CRITICAL_LOG_TOL = 1e-6


@dataclass(frozen=True)
class LinkConfig:
    """Scattering function, power budget and lattice product ``TF``."""

    sf: ScatteringSpec
    power: PowerBudget
    TF: float = 1.25

    def __post_init__(self):
        if not self.TF >= 1:
            raise ConfigError(f"TF must be >= 1, got {self.TF!r}")
        if self.TF > (1 + 1e-12) / self.sf.spread:
            raise ConfigError(
                f"TF = {self.TF!r} exceeds 1/spread = {1 / self.sf.spread:.6g}; "
                "no lattice satisfies T <= 1/(2 nu0) and F <= 1/(2 tau0)"
            )

    @property
    def rho(self) -> float:
        return self.power.rho

    @property
    def beta(self) -> float:
        return self.power.beta

    @property
    def received_snr(self) -> float:
        """``(P / N0) * sigma2`` in nat/s, the wideband AWGN capacity."""
        return self.power.rho * self.sf.sigma2


def _check_bandwidth(W):
    W = float(W)
    if not (W > 0 and math.isfinite(W)):
        raise ValueError(f"bandwidth must be positive and finite, got {W!r}")
    return W


def log_integral(sf: ScatteringSpec, scale, method="auto", tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """``int int log(1 + scale * C_H(tau, nu)) dtau dnu`` over the support."""
    if scale == 0:
        return 0.0
    if method == "auto":
        method = "closed" if sf.mesh is None else "quadrature"
    if method == "closed":
        if sf.mesh is not None:
            raise ValueError("closed-form penalty exists only for the brick shape")
        return sf.spread * math.log1p(scale * sf.sigma2 / sf.spread)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    tau_pts, nu_pts = sf.breakpoints()
    return integrate_2d(lambda t, n: np.log1p(scale * density(sf, t, n)), sf.rect, tol, tau_pts, nu_pts)


def _penalty(W, gamma, cfg, method="auto", tol=DEFAULT_TOLERANCE):
    """``(W/gamma) * int int log(1 + gamma rho C_H / W)``."""
    return W / gamma * log_integral(cfg.sf, gamma * cfg.rho / W, method, tol)


def penalty_A(W, beta, cfg: LinkConfig, method="auto", tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Channel-memory penalty ``(W/beta) int int log(1 + beta rho C_H / W) dtau dnu``.

    The brick shape uses the exact closed form unless ``method="quadrature"``.
    """
    W = _check_bandwidth(W)
    if beta < 1:
        raise ValueError("beta must be >= 1")
    return _penalty(W, float(beta), cfg, method, tol)


def ub1(W, cfg: LinkConfig, method="auto") -> tuple[float, float]:
    """Upper bound for the per-slot peak constraint; returns ``(value, alpha_star)``.

    The unconstrained stationary point
    ``alpha = (W/TF) (1/A - 1/(rho sigma2))`` is clamped to ``[0, 1]``. A clamp
    at 0 happens at very small bandwidths, where the bound degenerates to 0.
    """
    W = _check_bandwidth(W)
    c = cfg.received_snr
    if c == 0:
        return 0.0, 1.0
    A = _penalty(W, cfg.beta, cfg, method)
    alpha_raw = (W / cfg.TF) * (1.0 / A - 1.0 / c)
    alpha = min(1.0, max(0.0, alpha_raw))
    value = (W / cfg.TF) * math.log1p(alpha * c * cfg.TF / W) - alpha * A
    return value, alpha


def ub1_objective(alpha, W, cfg: LinkConfig, method="auto") -> float:
    """The concave function of ``alpha`` that :func:`ub1` maximizes."""
    A = _penalty(_check_bandwidth(W), cfg.beta, cfg, method)
    return (W / cfg.TF) * math.log1p(alpha * cfg.received_snr * cfg.TF / W) - alpha * A


def ub2(W, cfg: LinkConfig, order: int = 128) -> float:
    """Perfect receive CSI upper bound ``(W/TF) E[log(1 + rho TF |h|^2 / W)]``."""
    W = _check_bandwidth(W)
    k = cfg.rho * cfg.TF / W
    if k == 0:
        return 0.0
    return (W / cfg.TF) * expect_exponential(lambda g: np.log1p(k * g), cfg.sf.sigma2, order)


def coherent_term(constellation: Constellation | str = "qpsk") -> Callable[[float], float]:
    """Perfect-CSI mutual information (nat/symbol) as a function of average SNR."""
    if isinstance(constellation, str):
        constellation = get_constellation(constellation)
    return partial(rayleigh_cm_mi, constellation)


def _maximize_gamma(objective, beta):
    if beta == 1:
        return objective(1.0), 1.0
    gamma, value, _ = grid_then_golden(
        objective, 1.0, beta, GAMMA_GRID_POINTS, math.log10(1 + GAMMA_REL_TOL), log=True
    )
    return value, gamma


def lb(W, cfg: LinkConfig, mi: Optional[Callable[[float], float]] = None, method="auto") -> tuple[float, float]:
    """Constant-modulus lower bound; returns ``(value, gamma_star)``.

    ``mi`` maps the per-symbol average SNR ``gamma rho sigma2 TF / W`` to the
    perfect-CSI mutual information in nat/symbol (QPSK over Rayleigh fading
    by default). The raw value may be negative at small bandwidths.
    """
    W = _check_bandwidth(W)
    mi = coherent_term() if mi is None else mi
    snr_per_gamma = cfg.received_snr * cfg.TF / W

    def objective(gamma):
        coherent = W / (gamma * cfg.TF) * mi(gamma * snr_per_gamma)
        return coherent - _penalty(W, gamma, cfg, method)

    return _maximize_gamma(objective, cfg.beta)


def lb_approx(W, cfg: LinkConfig, method="auto") -> tuple[float, float]:
    """Low-SNR expansion of :func:`lb`: ``rho s2 - gamma (rho s2)^2 TF / W - penalty``."""
    W = _check_bandwidth(W)
    c = cfg.received_snr

    def objective(gamma):
        return c - gamma * c * c * cfg.TF / W - _penalty(W, gamma, cfg, method)

    return _maximize_gamma(objective, cfg.beta)


def viterbi_lb(beta, cfg: LinkConfig, method="auto", tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Infinite-bandwidth lower bound under a per-OFDM-symbol peak constraint.

    ``rho sigma2 - (1/beta) int log(1 + beta rho S(nu)) dnu`` with ``S`` the
    power-Doppler profile; ``beta = 1`` is the classical FSK rate.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    sf = cfg.sf
    c = cfg.received_snr
    if c == 0:
        return 0.0
    if method == "auto":
        method = "closed" if sf.mesh is None else "quadrature"
    if method == "closed":
        if sf.mesh is not None:
            raise ValueError("closed-form Doppler integral exists only for the brick shape")
        width = 2 * sf.nu0
        integral = width * math.log1p(beta * c / width)
    elif method == "quadrature":
        _, nu_pts = sf.breakpoints()
        integral = integrate_1d(
            lambda n: np.log1p(beta * cfg.rho * power_doppler_profile(sf, n)),
            -sf.nu0,
            sf.nu0,
            tol,
            points=nu_pts,
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return c - integral / beta


def awgn_inf_capacity(cfg: LinkConfig) -> float:
    """Infinite-bandwidth AWGN capacity ``(P/N0) sigma2`` in nat/s."""
    return cfg.received_snr


@dataclass(frozen=True)
class BoundPoint:
    """All bounds evaluated at one bandwidth (rates in nat/s)."""

    W: float
    ub1: float
    ub2: float
    lb_raw: float
    lb_approx: float
    alpha_star: float
    gamma_star: float

    @property
    def lb(self) -> float:
        """Lower bound clipped at zero, since rate 0 is always achievable."""
        return max(0.0, self.lb_raw) if not math.isnan(self.lb_raw) else math.nan

    @property
    def small_w(self) -> bool:
        """True where alpha clamps to 0 and the upper bound is only vacuous."""
        return self.alpha_star == 0.0


_NAN_POINT = dict(ub1=math.nan, ub2=math.nan, lb_raw=math.nan, lb_approx=math.nan,
                  alpha_star=math.nan, gamma_star=math.nan)


@dataclass
class BoundCurve:
    """Bound evaluations ordered by bandwidth, plus any points that failed."""

    points: list[BoundPoint]
    failures: list[tuple[float, str]] = field(default_factory=list)

    COLUMNS = ("bandwidth_hz", "ub1", "ub2", "lb_raw", "lb", "lb_approx", "alpha_star", "gamma_star")
    RATE_COLUMNS = ("ub1", "ub2", "lb_raw", "lb", "lb_approx")

    def __len__(self):
        return len(self.points)

    def column(self, name) -> np.ndarray:
        if name == "bandwidth_hz":
            name = "W"
        return np.array([getattr(p, name) for p in self.points], dtype=float)

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.column(c) for c in self.COLUMNS])

    def argmax(self, name) -> int:
        return int(np.nanargmax(self.column(name)))


def evaluate_point(W, cfg: LinkConfig, mi=None) -> BoundPoint:
    mi = coherent_term() if mi is None else mi
    u1, alpha = ub1(W, cfg)
    u2 = ub2(W, cfg)
    low, gamma = lb(W, cfg, mi)
    approx, _ = lb_approx(W, cfg)
    return BoundPoint(float(W), u1, u2, low, approx, alpha, gamma)


def bandwidth_grid(W_min, W_max, points_per_decade) -> np.ndarray:
    """Log-spaced bandwidths from ``W_min`` to ``W_max`` inclusive."""
    if not 0 < W_min < W_max:
        raise ValueError("need 0 < W_min < W_max")
    decades = math.log10(W_max / W_min)
    n = max(2, int(math.ceil(decades * points_per_decade - 1e-9)) + 1)
    return np.logspace(math.log10(W_min), math.log10(W_max), n)


def resolve_workers(workers=None) -> int:
    """Worker count; ``None`` reads ``WSSUS_THREADS`` where 0 means one per CPU."""
    if workers is None:
        workers = int(os.environ.get("WSSUS_THREADS", "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


_POINT_ERRORS = (NonConvergence, FloatingPointError, ArithmeticError, np.linalg.LinAlgError)


def sweep(cfg: LinkConfig, bandwidths, mi=None, workers=None) -> BoundCurve:
    """Evaluate every bound on ``bandwidths``; rows keep the input order.

    A numerical failure at one bandwidth yields a NaN row and an entry in
    ``failures`` instead of aborting the sweep.
    """
    mi = coherent_term() if mi is None else mi

    def one(W):
        try:
            return evaluate_point(W, cfg, mi), None
        except _POINT_ERRORS as exc:
            logger.warning("bound evaluation failed at W=%g Hz: %s", W, exc)
            return BoundPoint(float(W), **_NAN_POINT), (float(W), str(exc))

    n_workers = min(resolve_workers(workers), max(1, len(bandwidths)))
    if n_workers == 1:
        results = [one(W) for W in bandwidths]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(one, bandwidths))
    curve = BoundCurve([r[0] for r in results], [r[1] for r in results if r[1] is not None])
    for p in curve.points:
        if p.small_w:
            logger.info("W=%g Hz: small-bandwidth regime, alpha clamped to 0", p.W)
    return curve


def bound_function(bound, cfg, mi):
    if callable(bound):
        return bound
    if bound == "ub1":
        return lambda W: ub1(W, cfg)[0]
    if bound == "ub2":
        return lambda W: ub2(W, cfg)
    if bound == "lb":
        mi = coherent_term() if mi is None else mi
        return lambda W: lb(W, cfg, mi)[0]
    if bound == "lb_approx":
        return lambda W: lb_approx(W, cfg)[0]
    raise ValueError(f"unknown bound {bound!r}; choose ub1, ub2, lb or lb_approx")


def critical_bandwidth(bound, cfg: LinkConfig, W_range=(1e7, 1e12), points_per_decade=40,
                       mi=None, workers=None) -> tuple[float, float]:
    """Bandwidth maximizing ``bound`` over ``W_range``; returns ``(W_star, value)``.

    A log-spaced grid locates the best sample and golden-section search on
    its two neighbouring cells refines it.

    Raises
    ------
    Boundary
        If the best grid sample is an endpoint of ``W_range``.
    """
    lo, hi = (float(v) for v in W_range)
    if not 0 < lo < hi:
        raise ValueError("W_range must satisfy 0 < W_min < W_max")
    if math.log10(hi / lo) < 2 - 1e-12:
        raise ValueError("W_range must span at least two decades")
    if points_per_decade < 40:
        raise ValueError("points_per_decade must be >= 40")
    f = bound_function(bound, cfg, mi)
    n = len(bandwidth_grid(lo, hi, points_per_decade))
    n_workers = resolve_workers(workers)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            W_star, value, index = grid_then_golden(f, lo, hi, n, CRITICAL_LOG_TOL, mapper=pool.map)
    else:
        W_star, value, index = grid_then_golden(f, lo, hi, n, CRITICAL_LOG_TOL)
    if index == 0:
        raise Boundary("lower", lo, f(lo))
    if index == n - 1:
        raise Boundary("upper", hi, f(hi))
    return W_star, value
