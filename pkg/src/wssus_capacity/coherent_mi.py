"""Perfect-CSI mutual information of constant-modulus constellations.

The scalar channel is ``y = h x + z`` with ``z ~ CN(0, 1)``. Conditioned on
``h`` it is an AWGN channel at SNR ``|h|^2``; for Rayleigh fading ``|h|^2`` is
exponential, and by circular symmetry nothing else about ``h`` matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .quadrature import expect_exponential, hermite_rule

_BLOCK_ELEMENTS = 1 << 21

__all__ = [
    "Constellation",
    "psk",
    "get_constellation",
    "awgn_cm_mi",
    "rayleigh_cm_mi",
    "mc_mi_oracle",
    "mc_rayleigh_mi_oracle",
]


@dataclass(frozen=True, eq=False)
class Constellation:
    """Equiprobable unit-modulus symbols."""

    points: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size < 2:
            raise ValueError("a constellation needs at least two points")
        if np.max(np.abs(np.abs(pts) - 1.0)) > 1e-12:
            raise ValueError("constellation points must have unit modulus")
        gaps = np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.size)
        if np.min(gaps) < 1e-9:
            raise ValueError("constellation points must be distinct")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @cached_property
    def geometrically_uniform(self) -> bool:
        """True when rotations mapping one point onto another preserve the set.

        The noise is circularly symmetric, so every symbol then contributes the
        same conditional term and one representative suffices.
        """
        pts = self.points
        for k in range(1, pts.size):
            image = pts * (pts[k] / pts[0])
            if np.max(np.min(np.abs(image[:, None] - pts[None, :]), axis=1)) > 1e-9:
                return False
        return True

    def __len__(self):
        return self.points.size

    def rotated(self, angle):
        return Constellation(self.points * np.exp(1j * angle), name=f"{self.name}-rot")


def psk(order, offset=None, name=None):
    """Phase-shift keying with ``order`` points; QPSK defaults to the ``(±1±j)/sqrt(2)`` layout."""
    if offset is None:
        offset = math.pi / 4 if order == 4 else 0.0
    k = np.arange(order)
    return Constellation(np.exp(1j * (offset + 2 * math.pi * k / order)), name=name or f"{order}psk")


_NAMED = {
    "bpsk": lambda: psk(2, name="bpsk"),
    "qpsk": lambda: psk(4, name="qpsk"),
    "8psk": lambda: psk(8, name="8psk"),
    "16psk": lambda: psk(16, name="16psk"),
}


def get_constellation(name):
    try:
        return _NAMED[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown constellation {name!r}; choose from {sorted(_NAMED)}") from None


def awgn_cm_mi(c: Constellation, snr, order: int = 32):
    """I(y; x) in nats for ``y = sqrt(snr) x + z``, x uniform on ``c``.

    Accepts a scalar or an array of SNR values; the expectation over the
    noise is a tensor Gauss-Hermite rule of the given order per axis.
    """
    snr_arr = np.asarray(snr, dtype=float)
    flat = snr_arr.ravel()
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise ValueError("snr must be finite and nonnegative")

    nodes, weights = hermite_rule(order)
    re, im = np.meshgrid(nodes, nodes, indexing="ij")
    z = (re + 1j * im).ravel()
    wz = (np.outer(weights, weights) / math.pi).ravel()

    pts = c.points
    sent = pts[:1] if c.geometrically_uniform else pts
    # z is circularly symmetric, so each sent symbol may be rotated onto 1;
    # this makes the tensor rule see the same geometry for any rotation of c.
    diff = (sent[:, None] - pts[None, :]) * np.conj(sent)[:, None]  # (x, x')
    zz = z[None, :, None, None]
    avg = np.empty(flat.size)
    block = max(1, _BLOCK_ELEMENTS // (z.size * diff.size))
    for start in range(0, flat.size, block):
        amp = np.sqrt(flat[start:start + block])[:, None, None, None]
        d = amp * diff[None, None, :, :]  # (snr, 1, x, x')
        # |d + z|^2 - |z|^2 = |d|^2 + 2 Re(conj(d) z)
        expo = -(np.abs(d) ** 2 + 2 * np.real(np.conj(d) * zz))
        lse = logsumexp(expo, axis=3)  # (snr, z, x)
        avg[start:start + block] = np.einsum("z,szx->s", wz, lse) / sent.size
    out = np.clip(math.log(len(c)) - avg, 0.0, math.log(len(c)))
    out = out.reshape(snr_arr.shape)
    return float(out) if out.ndim == 0 else out


def rayleigh_cm_mi(c: Constellation, avg_snr: float, order: int = 128, hermite_order: int = 32) -> float:
    """E over Rayleigh fading of :func:`awgn_cm_mi` at SNR ``avg_snr * |h|^2 / E|h|^2``."""
    avg_snr = float(avg_snr)
    if avg_snr < 0 or not math.isfinite(avg_snr):
        raise ValueError("avg_snr must be finite and nonnegative")
    if avg_snr == 0:
        return 0.0
    return expect_exponential(lambda g: awgn_cm_mi(c, avg_snr * g, hermite_order), 1.0, order)


def _mc_chunks(n, chunk=500_000):
    while n > 0:
        size = min(n, chunk)
        yield size
        n -= size


def mc_mi_oracle(c: Constellation, snr: float, n: int = 1_000_000, seed: int = 0):
    """Monte-Carlo estimate of :func:`awgn_cm_mi` and its standard error.

    Uses ``I = log|c| - E[log sum_x' exp(-|y - a x'|^2 + |y - a x|^2)]`` with
    ``a = sqrt(snr)`` over random symbols and noise.
    """
    if n < 10_000:
        raise ValueError("mc_mi_oracle needs n >= 1e4 samples")
    rng = np.random.default_rng(seed)
    amp = math.sqrt(snr)
    pts = c.points
    total = 0.0
    total_sq = 0.0
    for size in _mc_chunks(int(n)):
        idx = rng.integers(len(c), size=size)
        z = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2)
        y = amp * pts[idx] + z
        expo = -np.abs(y[:, None] - amp * pts[None, :]) ** 2 + np.abs(z)[:, None] ** 2
        sample = math.log(len(c)) - logsumexp(expo, axis=1)
        total += sample.sum()
        total_sq += np.dot(sample, sample)
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0)
    return mean, math.sqrt(var / (n - 1))


def mc_rayleigh_mi_oracle(c: Constellation, avg_snr: float, n: int = 1_000_000, seed: int = 0):
    """Joint Monte-Carlo over fading and noise for :func:`rayleigh_cm_mi`."""
    if n < 10_000:
        raise ValueError("mc_rayleigh_mi_oracle needs n >= 1e4 samples")
    rng = np.random.default_rng(seed)
    pts = c.points
    total = 0.0
    total_sq = 0.0
    for size in _mc_chunks(int(n)):
        idx = rng.integers(len(c), size=size)
        h = math.sqrt(avg_snr) * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2)
        z = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2)
        y = h * pts[idx] + z
        expo = -np.abs(y[:, None] - h[:, None] * pts[None, :]) ** 2 + np.abs(z)[:, None] ** 2
        sample = math.log(len(c)) - logsumexp(expo, axis=1)
        total += sample.sum()
        total_sq += np.dot(sample, sample)
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0)
    return mean, math.sqrt(var / (n - 1))
