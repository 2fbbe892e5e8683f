"""Visible lattice points along random and periodic walks."""

__version__ = "0.1.0"

from .constants import b_poly, c_level, c_value, run_exact_limit, visibility_change_limit
from .lattice import (
    LatticePoint,
    StepSequence,
    count_admissible_classes,
    is_p_visible,
    is_visible,
    is_visible_at_level,
    residue_obstructions,
)
from .numtheory import Interval, euler_product, mobius, primes_below, weighted_mobius_sum
from .polynomial import RationalPolynomial
from .rational import PeriodicBinary, limit_density, m_offsets, parse_periodic_binary
from .simulator import WalkConfig, WalkStats, deterministic_walk, merge, simulate
