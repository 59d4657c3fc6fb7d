"""Certification score operators and their decomposition into quantum inputs.

The certification operator for a two-qubit entangled target |t> is

    W = l1 |t><t| - L (I - |t><t|),    l1 > 0,  L >> l1,

so any effective-element weight outside span{|t>} is penalized at scale L.
decompose_witness expresses any 4x4 Hermitian operator as a real combination
sum_{x,y} beta[x,y] psi_x (x) psi_y over tomographically complete qubit input
ensembles, which is what turns the operator into a playable game.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .policy import DEFAULT_POLICY, NumericPolicy
from .qlin import (
    KetVector,
    Operator,
    Spectrum,
    SubsystemShape,
    qubits,
    schmidt_angle,
)

SIGMA_I = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z)

ENTANGLEMENT_ANGLE_TOL = 1e-6


class NotEntangledError(ValueError):
    """Target vector is a product state (Schmidt angle at or below tolerance)."""


class CompletenessError(ValueError):
    """Input ensemble is not tomographically complete."""


@dataclass(frozen=True)
class Witness:
    """Score operator on the two input ports, with its fixed spectral data."""

    operator: Operator
    spectrum: Spectrum
    target: KetVector
    l_negative: float
    warnings: tuple[str, ...] = ()

    @property
    def l1(self) -> float:
        return float(self.spectrum.eigenvalues[0])

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "Witness":
        ev = self.spectrum.eigenvalues
        if not (ev[0] > 0.0 > ev[1] >= ev[2] >= ev[3]):
            raise ValueError(f"eigenvalues violate the design ordering: {ev}")
        res = float(np.abs(self.spectrum.reconstruct() - self.operator.entries).max())
        if res > policy.reconstruction:
            raise ValueError(f"spectral reconstruction residual {res:.3e}")
        if schmidt_angle(self.target.amplitudes) <= ENTANGLEMENT_ANGLE_TOL:
            raise NotEntangledError("witness target is a product state")
        return self


@dataclass(frozen=True)
class InputEnsemble:
    """Qubit input states handed to one player."""

    states: tuple[Operator, ...]
    name: str

    def bloch_vectors(self) -> np.ndarray:
        """Rows (Tr[rho sigma_k]) for sigma_k in (I, X, Y, Z)."""
        return np.array(
            [[float(np.trace(s.entries @ p).real) for p in PAULIS] for s in self.states]
        )

    def gram_rank(self, tol: float = 1e-10) -> int:
        b = self.bloch_vectors()
        return int(np.linalg.matrix_rank(b @ b.T, tol=tol))

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "InputEnsemble":
        for s in self.states:
            if s.dim != 2:
                raise ValueError("input states must be single qubits")
            ev = np.linalg.eigvalsh(s.entries)
            if ev[0] < -policy.spectral:
                raise ValueError(f"input state not PSD: min eigenvalue {ev[0]:.3e}")
            if abs(np.trace(s.entries) - 1.0) > policy.structural:
                raise ValueError("input state trace != 1")
        if self.gram_rank() != 4:
            raise CompletenessError(
                f"ensemble {self.name!r} has Bloch Gram rank {self.gram_rank()} < 4"
            )
        return self


@dataclass(frozen=True)
class ScoreTable:
    """Score coefficients beta[x, y] over a pair of input ensembles."""

    beta: np.ndarray
    ensembles: tuple[InputEnsemble, InputEnsemble]
    residual: float = 0.0

    def __post_init__(self):
        b = np.ascontiguousarray(self.beta, dtype=np.float64)
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)


def _qubit_state(bloch: np.ndarray) -> Operator:
    m = 0.5 * (SIGMA_I + bloch[0] * SIGMA_X + bloch[1] * SIGMA_Y + bloch[2] * SIGMA_Z)
    return Operator(m, SubsystemShape((2,), ("q",)), hermitian=True)


def tetrahedral_states() -> InputEnsemble:
    """Four pure states at tetrahedral Bloch directions; minimal complete set."""
    vs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / sqrt(3.0)
    return InputEnsemble(tuple(_qubit_state(v) for v in vs), "tetrahedral")


def pauli6_states() -> InputEnsemble:
    """Eigenstates of X, Y, Z; overcomplete six-state set."""
    vs = np.array(
        [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float
    )
    return InputEnsemble(tuple(_qubit_state(v) for v in vs), "pauli6")


ENSEMBLES = {"tetrahedral": tetrahedral_states, "pauli6": pauli6_states}


def _gram_schmidt_completion(first: np.ndarray) -> np.ndarray:
    """Orthonormal 4x4 basis starting from `first`, completed from e_0..e_3 in order."""
    basis = [first / np.linalg.norm(first)]
    for i in range(4):
        e = np.zeros(4, dtype=np.complex128)
        e[i] = 1.0
        w = e - sum(b * np.vdot(b, e) for b in basis)
        n = np.linalg.norm(w)
        if n > 1e-7:
            w = w / n
            idx = np.flatnonzero(np.abs(w) > 1e-8)[0]
            w = w / (w[idx] / abs(w[idx]))
            basis.append(w)
        if len(basis) == 4:
            break
    return np.stack(basis, axis=1)


def build_certification_witness(
    psi1: KetVector,
    L: float = 100.0,
    l1: float = 1.0,
    dominance_ratio: float = 100.0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Witness:
    """W = l1 |psi1><psi1| - L (I - |psi1><psi1|) with a deterministic eigenbasis."""
    if L <= 0 or l1 <= 0:
        raise ValueError("L and l1 must be positive")
    psi1.validate(policy)
    if psi1.shape.dims != (2, 2):
        raise ValueError(f"target must be a two-qubit vector, got dims {psi1.shape.dims}")
    if schmidt_angle(psi1.amplitudes) <= ENTANGLEMENT_ANGLE_TOL:
        raise NotEntangledError("target state is a product state")
    warnings = ()
    if L / l1 < dominance_ratio:
        warnings = (f"penalty ratio L/l1 = {L / l1:.3g} below dominance ratio {dominance_ratio:g}",)
    p = psi1.projector().entries
    w = l1 * p - L * (np.eye(4) - p)
    basis = _gram_schmidt_completion(psi1.amplitudes)
    eigvals = np.array([l1, -L, -L, -L])
    vecs = tuple(KetVector(basis[:, k], psi1.shape, "unit") for k in range(4))
    witness = Witness(
        operator=Operator(w, psi1.shape, hermitian=True),
        spectrum=Spectrum(eigvals, vecs),
        target=psi1,
        l_negative=float(L),
        warnings=warnings,
    )
    return witness.validate(policy)


def _real_vec(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def decompose_witness(
    w,
    ens_a: InputEnsemble | None = None,
    ens_b: InputEnsemble | None = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> ScoreTable:
    """Solve W = sum_{x,y} beta[x,y] psi_x (x) psi_y in the least-squares sense.

    Square systems (tetrahedral x tetrahedral) are solved exactly; overcomplete
    ensembles give the minimum-norm solution. Accepts a Witness or a plain
    Operator.
    """
    ens_a = tetrahedral_states() if ens_a is None else ens_a
    ens_b = tetrahedral_states() if ens_b is None else ens_b
    for ens in (ens_a, ens_b):
        rank = ens.gram_rank()
        if rank != 4:
            raise CompletenessError(f"ensemble {ens.name!r} has Bloch Gram rank {rank} < 4")
    target = w.operator.entries if isinstance(w, Witness) else w.entries
    na, nb = len(ens_a.states), len(ens_b.states)
    cols = [
        _real_vec(np.kron(ens_a.states[x].entries, ens_b.states[y].entries))
        for x in range(na)
        for y in range(nb)
    ]
    design = np.stack(cols, axis=1)
    beta_flat, *_ = np.linalg.lstsq(design, _real_vec(target), rcond=None)
    beta = beta_flat.reshape(na, nb)
    table = ScoreTable(beta, (ens_a, ens_b))
    residual = float(np.linalg.norm(reconstruct(table).entries - target))
    return ScoreTable(beta, (ens_a, ens_b), residual)


def reconstruct(table: ScoreTable) -> Operator:
    """sum_{x,y} beta[x,y] psi_x (x) psi_y on the input-port pair."""
    ens_a, ens_b = table.ensembles
    out = np.zeros((4, 4), dtype=np.complex128)
    for x in range(len(ens_a.states)):
        for y in range(len(ens_b.states)):
            out += table.beta[x, y] * np.kron(ens_a.states[x].entries, ens_b.states[y].entries)
    return Operator(out, qubits(("A0", "B0")), hermitian=True)


def target_ket(chi: float, labels=("A0", "B0")) -> KetVector:
    """cos(chi)|00> + sin(chi)|11> on a two-qubit space."""
    if not 0.0 <= chi <= pi / 4 + 1e-12:
        raise ValueError(f"chi must lie in [0, pi/4], got {chi}")
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = np.cos(chi)
    amps[3] = np.sin(chi)
    return KetVector(amps, qubits(tuple(labels)), "unit")
