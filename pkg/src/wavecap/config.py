"""Physical configuration shared by the channel, capacity and CLI layers."""

import dataclasses
import json
import math
from dataclasses import dataclass

from .power import ETA
from .wavefunctions import n_modes

C_LIGHT = 299_792_458.0
BANDWIDTH_FRACTION = 1e-3
MAX_DIPOLE_FRACTION = 0.1

CONFIG_KEYS = (
    "k",
    "r_v",
    "r_s",
    "alpha",
    "n_max",
    "power_w",
    "n0_w_per_hz",
    "bandwidth_hz",
    "dipole_len_over_lambda",
    "seed",
)


class ConfigError(ValueError):
    """Raised for inconsistent or out-of-range physical inputs."""


def round_to_three(x):
    """Nearest positive multiple of 3 (keeps the orientation cycle balanced)."""
    return max(3, 3 * int(round(x / 3.0)))


@dataclass(frozen=True)
class PhysicalConfig:
    k: float = 2.0 * math.pi
    r_v: float = 0.5
    r_s: float = 17.8
    alpha: float = 0.1
    n_max: int = 3
    power_w: float = 1.0
    n0_w_per_hz: float = 1e-6
    bandwidth_hz: float = 1e5
    dipole_len_over_lambda: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if not (self.k > 0 and self.r_v > 0):
            raise ConfigError("k and r_v must be positive")
        if not self.r_s > self.r_v:
            raise ConfigError(f"need r_s > r_v, got r_s={self.r_s}, r_v={self.r_v}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ConfigError("n_max must be a non-negative integer")
        if not (self.power_w > 0 and self.n0_w_per_hz > 0 and self.bandwidth_hz > 0):
            raise ConfigError("power, noise density and bandwidth must be positive")
        if self.bandwidth_hz > BANDWIDTH_FRACTION * self.frequency_hz:
            raise ConfigError(
                f"bandwidth {self.bandwidth_hz:g} Hz is not narrowband for carrier "
                f"{self.frequency_hz:g} Hz"
            )
        if not 0 < self.dipole_len_over_lambda < MAX_DIPOLE_FRACTION:
            raise ConfigError("dipole length must satisfy 0 < L < lambda/10")

    @property
    def wavelength(self):
        return 2.0 * math.pi / self.k

    @property
    def omega(self):
        return C_LIGHT * self.k

    @property
    def frequency_hz(self):
        return self.omega / (2.0 * math.pi)

    @property
    def eta(self):
        return ETA

    @property
    def dipole_length(self):
        return self.dipole_len_over_lambda * self.wavelength

    @property
    def n_dipoles(self):
        return round_to_three(8.0 * self.alpha * (self.k * self.r_s) ** 2)

    @property
    def density(self):
        """Receiver density N / (8 k^2 R_S^2) after rounding N."""
        return self.n_dipoles / (8.0 * (self.k * self.r_s) ** 2)

    @property
    def n_modes(self):
        return n_modes(self.n_max)

    @property
    def noise_power(self):
        return self.n0_w_per_hz * self.bandwidth_hz

    def with_dipoles(self, N):
        """Same density alpha, with r_s chosen so that the array holds N dipoles."""
        N = round_to_three(N)
        r_s = math.sqrt(N / (8.0 * self.alpha)) / self.k
        return dataclasses.replace(self, r_s=r_s)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)
