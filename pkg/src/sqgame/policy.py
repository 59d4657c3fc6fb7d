"""Central numeric tolerances.

Every validation in the package pulls its tolerance from a NumericPolicy so
acceptance runs have a single tuning point. The three tiers:

- structural: exact-by-construction properties (Hermiticity, unit norm, trace
  preservation under partial trace).
- spectral: eigensolver-limited properties (orthonormality, PSD floors).
- reconstruction: multi-step round trips (spectral resynthesis, Schmidt
  reconstruction, witness decomposition residuals).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    structural: float = 1e-12
    spectral: float = 1e-10
    reconstruction: float = 1e-9


DEFAULT_POLICY = NumericPolicy()
