"""Central numerical tolerances.

Every validation threshold used by the package lives here so that tests and
callers can tighten or relax them in one place. Functions take a Tolerances
instance and default to DEFAULT_TOLERANCES.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10
    trace: float = 1e-10
    positivity: float = 1e-10
    unit_norm: float = 1e-10
    trace_preservation: float = 1e-12
    unitarity: float = 1e-9
    purity: float = 1e-9
    purification_roundtrip: float = 1e-9
    purification_rank_cut: float = 1e-12
    coherent_tail: float = 1e-8
    entropy_eig_floor: float = 1e-14
    projector_residual: float = 1e-12
    discord_branch_floor: float = 1e-12
    discord_negative_clamp: float = 1e-9
    detection_threshold: float = 1e-6
    quadrature_slack: float = 1e-9
    truncation_guard_rel: float = 1e-6

    def replaced(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOLERANCES = Tolerances()

# Entropy logarithm base used when none is requested. Base 2 reproduces the
# published witness integral for the damped-qubit scenario (0.094 bits);
# natural log is the other supported choice.
DEFAULT_LOG_BASE = 2.0


def resolve_log_base(spec) -> float:
    """Turn 'e', '2', 2, or a float into the log base as a float."""
    if isinstance(spec, str):
        name = spec.strip().lower()
        if name == "e":
            return math.e
        spec = float(name)
    base = float(spec)
    if not math.isfinite(base) or base <= 1.0:
        raise ValueError(f"log base must be finite and > 1, got {base!r}")
    return base
