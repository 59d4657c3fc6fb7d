"""Game evaluation: effective elements, average scores, and the ideal strategy.

A strategy is a shared two-qubit state rho on (A, B) plus one joint
measurement element per player, mA on (A0, A) and mB on (B, B0). The referee
only ever sees the effective element

    M = Tr_AB[(I (x) rho (x) I)(mA (x) mB)]

on (A0, B0). Scores are computed along two independent routes, the explicit
input-state sum and Tr[W M], and cross-checked on every call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import effective_element_kernel
from .policy import DEFAULT_POLICY, NumericPolicy
from .qlin import KetVector, Operator, qubits
from .witness import ScoreTable, Witness

GAME_LABELS = ("A0", "A", "B", "B0")


class ScorePathMismatch(RuntimeError):
    """The input-sum score and the operator-trace score disagree; contraction bug."""


@dataclass(frozen=True)
class Strategy:
    """Shared state plus one measurement element per player."""

    rho: Operator
    ma: Operator
    mb: Operator

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "Strategy":
        for name, op in (("rho", self.rho), ("ma", self.ma), ("mb", self.mb)):
            if op.dim != 4:
                raise ValueError(f"{name} must act on two qubits")
            ev = np.linalg.eigvalsh(op.entries)
            if ev[0] < -policy.spectral:
                raise ValueError(f"{name} not PSD: min eigenvalue {ev[0]:.3e}")
            if name == "rho":
                if abs(np.trace(op.entries).real - 1.0) > 1e-10:
                    raise ValueError(f"rho trace {np.trace(op.entries)!r} != 1")
            elif ev[-1] > 1.0 + policy.spectral:
                raise ValueError(f"{name} exceeds identity: max eigenvalue {ev[-1]:.12f}")
        return self


@dataclass(frozen=True)
class EffectiveElement:
    """Sub-normalized operator the referee reconstructs on (A0, B0)."""

    operator: Operator
    weight: float

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "EffectiveElement":
        ev = np.linalg.eigvalsh(self.operator.entries)
        if ev[0] < -policy.spectral:
            raise ValueError(f"effective element not PSD: min eigenvalue {ev[0]:.3e}")
        if not -policy.spectral <= self.weight <= 1.0 + policy.spectral:
            raise ValueError(f"effective-element weight {self.weight!r} outside [0, 1]")
        return self


@dataclass(frozen=True)
class SemiQuantumGame:
    """Score operator together with its input-state decomposition."""

    witness: Witness
    scores: ScoreTable
    target_chi: float

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "SemiQuantumGame":
        self.witness.validate(policy)
        if self.scores.residual > policy.reconstruction:
            raise ValueError(f"score table residual {self.scores.residual:.3e}")
        return self


def effective_element(strategy: Strategy) -> EffectiveElement:
    """Contract the strategy down to the referee's operator on (A0, B0)."""
    m = effective_element_kernel(strategy.rho.entries, strategy.ma.entries, strategy.mb.entries)
    m = 0.5 * (m + m.conj().T)
    op = Operator(m, qubits(("A0", "B0")), hermitian=True)
    return EffectiveElement(op, float(np.trace(m).real))


def _score_from_inputs(game: SemiQuantumGame, strategy: Strategy) -> float:
    ens_a, ens_b = game.scores.ensembles
    meas = np.kron(strategy.ma.entries, strategy.mb.entries)
    total = 0.0
    for x, psi_x in enumerate(ens_a.states):
        for y, psi_y in enumerate(ens_b.states):
            inputs = np.kron(np.kron(psi_x.entries, strategy.rho.entries), psi_y.entries)
            total += game.scores.beta[x, y] * float(np.einsum("ij,ji->", inputs, meas).real)
    return total


def score(
    game: SemiQuantumGame,
    strategy: Strategy,
    policy: NumericPolicy = DEFAULT_POLICY,
    cross_check: bool = True,
) -> float:
    """Average score for outcome (0, 0), computed along both routes.

    Returns the input-sum value; raises ScorePathMismatch if it deviates from
    Tr[W M] by more than the spectral tolerance.
    """
    s_inputs = _score_from_inputs(game, strategy)
    if cross_check:
        m = effective_element(strategy)
        s_operator = float(np.trace(game.witness.operator.entries @ m.operator.entries).real)
        if abs(s_inputs - s_operator) > policy.spectral * max(1.0, abs(s_operator)):
            raise ScorePathMismatch(
                f"input-sum score {s_inputs!r} vs operator score {s_operator!r}"
            )
    return s_inputs


def phi_plus_ket(labels) -> KetVector:
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = amps[3] = 1.0 / np.sqrt(2.0)
    return KetVector(amps, qubits(tuple(labels)), "unit")


def ideal_strategy(psi1: KetVector) -> Strategy:
    """Transposed target projector as the shared state, Bell projectors as measurements."""
    rho = Operator(psi1.projector().entries.T, qubits(("A", "B")), hermitian=True)
    ma = phi_plus_ket(("A0", "A")).projector()
    mb = phi_plus_ket(("B", "B0")).projector()
    return Strategy(rho, ma, mb)
