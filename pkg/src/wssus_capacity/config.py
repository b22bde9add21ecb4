"""Run configuration: flat ``key = value`` files, JSON sidecars and overrides.

Every default reproduces the IEEE 802.11a-like numerical experiment: TF =
1.25, 1 mW receive power, N0 = 4.14e-21 W/Hz, brick scattering with spread
1e-3 and -90 dB path loss, beta = 1, QPSK, 1e7 to 1e12 Hz.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bounds import LinkConfig
from .channel_model import PowerBudget, ScatteringSpec, db_to_linear
from .coherent_mi import get_constellation
from .errors import ConfigError

__all__ = ["RunConfig", "load_config", "parse_assignment"]


@dataclass
class RunConfig:
    shape: str = "brick"
    tau0_s: float = 0.5e-6
    nu0_hz: float = 500.0
    sigma2_db: float = -90.0
    mesh_path: Optional[str] = None
    P_w: float = 1e-3
    N0_w_per_hz: float = 4.14e-21
    beta: float = 1.0
    TF: float = 1.25
    W_min_hz: float = 1e7
    W_max_hz: float = 1e12
    points_per_decade: int = 40
    constellation: str = "qpsk"
    unit: str = "nat"
    seed: int = 0
    out: Optional[str] = None
    plot: Optional[str] = None
    bound: str = "lb"
    K_list: list = field(default_factory=lambda: [16, 32, 64])
    M: int = 8
    gamma: float = 1.0
    time_oversampling: float = 1.0
    snr: float = 1.0
    mc_samples: int = 1_000_000

    def validate(self):
        """Raise :class:`ConfigError` naming the first violated invariant."""
        if not self.W_min_hz < self.W_max_hz:
            raise ConfigError("invariant W_min < W_max violated")
        if not self.W_min_hz > 0:
            raise ConfigError("invariant W_min > 0 violated")
        if self.points_per_decade < 10:
            raise ConfigError("invariant points_per_decade >= 10 violated")
        if self.unit not in ("nat", "bit"):
            raise ConfigError("invariant unit in {nat, bit} violated")
        if self.shape not in ("brick", "grid"):
            raise ConfigError("invariant shape in {brick, grid} violated")
        if self.shape == "grid" and not self.mesh_path:
            raise ConfigError("shape = grid needs mesh_path")
        if self.bound not in ("ub1", "ub2", "lb", "lb_approx"):
            raise ConfigError("invariant bound in {ub1, ub2, lb, lb_approx} violated")
        try:
            get_constellation(self.constellation)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.link_config()
        return self

    def scattering(self) -> ScatteringSpec:
        mesh = None
        if self.shape == "grid":
            try:
                mesh = np.atleast_2d(np.loadtxt(self.mesh_path, dtype=float))
            except OSError as exc:
                raise ConfigError(f"cannot read mesh file: {exc}") from None
        return ScatteringSpec(self.tau0_s, self.nu0_hz, db_to_linear(self.sigma2_db), mesh)

    def power(self) -> PowerBudget:
        return PowerBudget(self.P_w, self.N0_w_per_hz, self.beta)

    def link_config(self) -> LinkConfig:
        return LinkConfig(self.scattering(), self.power(), self.TF)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(key, raw):
    if key not in _FIELDS:
        raise ConfigError(f"unknown configuration key {key!r}")
    default = _FIELDS[key].default
    if isinstance(raw, str):
        text = raw.strip()
        if key == "K_list":
            return [int(v) for v in text.replace(",", " ").split()]
        if text.lower() in ("", "none", "null"):
            return None
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(float(text))
        if isinstance(default, float):
            return float(text)
        return text
    if key == "K_list":
        return [int(v) for v in raw]
    return raw


def parse_assignment(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"expected key=value, got {text!r}")
    return key.strip(), value


def _read_file(path):
    text = Path(path).read_text()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON config: {exc}") from None
        return dict(data)
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = parse_assignment(line)
        entries[key] = value
    return entries


def load_config(path=None, overrides=()) -> RunConfig:
    """Defaults, then the file at ``path`` (key = value or JSON), then ``key=value`` overrides."""
    values = {}
    if path is not None:
        values.update(_read_file(path))
    for item in overrides:
        key, value = parse_assignment(item)
        values[key] = value
    try:
        kwargs = {k: _coerce(k, v) for k, v in values.items()}
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad configuration value: {exc}") from None
    return RunConfig(**kwargs)
