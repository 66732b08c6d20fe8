"""Spherical-wave model of the capacity of a volume source observed by a dense dipole array."""

__version__ = "0.1.0"

from .capacity import capacity_NM, closed_form_rate, capacity_limit, waterfill
from .channel import assemble
from .config import PhysicalConfig
from .dof import dof_count, dof_sweep
from .power import ETA, mode_table, transmit_coeff, radiation_resistance

__all__ = [
    "ETA",
    "PhysicalConfig",
    "assemble",
    "capacity_NM",
    "capacity_limit",
    "closed_form_rate",
    "dof_count",
    "dof_sweep",
    "mode_table",
    "radiation_resistance",
    "transmit_coeff",
    "waterfill",
]
