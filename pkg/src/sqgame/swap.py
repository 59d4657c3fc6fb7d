"""Source-independent entanglement swapping as the dual certification game.

Two uncharacterized two-qubit sources feed an uncharacterized joint
measurement on the middle pair; conditioning on outcome i leaves the
sub-normalized operator

    rho_i = Tr_AB[(I (x) M_i (x) I)(rho_A0A (x) rho_BB0)]

on the outer pair (A0, B0). This is the same contraction as the game's
effective element with the state and measurement roles exchanged, so scoring
and optimization reuse the certify engine on the relabelled variables
(middle slot: joint measurement element; side slots: the two sources).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .certify import SeeSawConfig, OptResult, optimize_dual
from .game import EffectiveElement, SemiQuantumGame, Strategy
from .kernels import effective_element_kernel
from .policy import DEFAULT_POLICY, NumericPolicy
from .qlin import (
    KetVector,
    Operator,
    haar_unitary,
    qubits,
    schmidt,
    schmidt_angle,
    schmidt_coefficients,
)
from .witness import (
    ENTANGLEMENT_ANGLE_TOL,
    NotEntangledError,
    build_certification_witness,
    decompose_witness,
)

BELL_AMPLITUDES = (
    np.array([1, 0, 0, 1], dtype=np.complex128) / sqrt(2.0),   # (|00> + |11>)/sqrt(2)
    np.array([1, 0, 0, -1], dtype=np.complex128) / sqrt(2.0),  # (|00> - |11>)/sqrt(2)
    np.array([0, 1, 1, 0], dtype=np.complex128) / sqrt(2.0),   # (|01> + |10>)/sqrt(2)
    np.array([0, 1, -1, 0], dtype=np.complex128) / sqrt(2.0),  # (|01> - |10>)/sqrt(2)
)


@dataclass(frozen=True)
class SwapInstance:
    """Two source states and the joint measurement between them."""

    rho_a0a: Operator
    rho_bb0: Operator
    joint_povm: tuple[Operator, ...]

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "SwapInstance":
        for name, op in (("rho_a0a", self.rho_a0a), ("rho_bb0", self.rho_bb0)):
            if op.dim != 4:
                raise ValueError(f"{name} must act on two qubits")
            ev = np.linalg.eigvalsh(op.entries)
            if ev[0] < -policy.spectral:
                raise ValueError(f"{name} not PSD: min eigenvalue {ev[0]:.3e}")
            if abs(np.trace(op.entries).real - 1.0) > 1e-10:
                raise ValueError(f"{name} trace != 1")
        total = np.zeros((4, 4), dtype=np.complex128)
        for k, m in enumerate(self.joint_povm):
            if m.dim != 4:
                raise ValueError(f"joint_povm[{k}] must act on two qubits")
            ev = np.linalg.eigvalsh(m.entries)
            if ev[0] < -policy.spectral:
                raise ValueError(f"joint_povm[{k}] not PSD: min eigenvalue {ev[0]:.3e}")
            total += m.entries
        if np.abs(total - np.eye(4)).max() > 1e-10:
            raise ValueError("joint POVM does not sum to identity")
        return self


@dataclass(frozen=True)
class SwapGame:
    """Score operator V on the outer pair with an entangled projector target."""

    v_operator: Operator
    target: KetVector
    penalty: float

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "SwapGame":
        p = self.target.projector().entries
        v = p - self.penalty * (np.eye(4) - p)
        if np.abs(v - self.v_operator.entries).max() > policy.structural:
            raise ValueError("V does not reconstruct from its target and penalty")
        if schmidt_angle(self.target.amplitudes) <= ENTANGLEMENT_ANGLE_TOL:
            raise NotEntangledError("swap target is a product state")
        return self


def swap_game_operator(psi: KetVector, l: float = 100.0) -> SwapGame:
    """V = |psi><psi| - l (I - |psi><psi|) for an entangled projector target."""
    if l <= 0:
        raise ValueError("penalty l must be positive")
    psi.validate()
    if schmidt_angle(psi.amplitudes) <= ENTANGLEMENT_ANGLE_TOL:
        raise NotEntangledError("swap target is a product state")
    p = psi.projector().entries
    v = p - l * (np.eye(4) - p)
    game = SwapGame(Operator(v, psi.shape, hermitian=True), psi, float(l))
    return game.validate()


def swap_effective(inst: SwapInstance, i: int) -> EffectiveElement:
    """Sub-normalized conditional operator on (A0, B0) for outcome i."""
    if not 0 <= i < len(inst.joint_povm):
        raise IndexError(f"outcome {i} out of range for {len(inst.joint_povm)} POVM elements")
    m = effective_element_kernel(
        inst.joint_povm[i].entries, inst.rho_a0a.entries, inst.rho_bb0.entries
    )
    m = 0.5 * (m + m.conj().T)
    return EffectiveElement(Operator(m, qubits(("A0", "B0")), hermitian=True),
                            float(np.trace(m).real))


def swap_score(game: SwapGame, inst: SwapInstance) -> float:
    """Tr[V rho_1] for the first outcome."""
    rho1 = swap_effective(inst, 0)
    return float(np.trace(game.v_operator.entries @ rho1.operator.entries).real)


def bsm_projectors() -> list[Operator]:
    """The four Bell projectors; rank one, mutually orthogonal, summing to I."""
    shape = qubits(("A", "B"))
    return [
        Operator(np.outer(b, b.conj()), shape, hermitian=True) for b in BELL_AMPLITUDES
    ]


def ideal_swap_instance(psi: KetVector | None = None) -> SwapInstance:
    """Bell sources and a complete Bell measurement, outcome 0 targeting psi.

    With psi omitted the measurement is the standard Bell projector set; with
    an explicit target the first element becomes the transposed target
    projector, completed to a projective measurement on its orthocomplement.
    """
    src_a = Operator(
        np.outer(BELL_AMPLITUDES[0], BELL_AMPLITUDES[0].conj()), qubits(("A0", "A")), hermitian=True
    )
    src_b = Operator(
        np.outer(BELL_AMPLITUDES[0], BELL_AMPLITUDES[0].conj()), qubits(("B", "B0")), hermitian=True
    )
    if psi is None:
        povm = tuple(m.relabel(("A", "B")) for m in bsm_projectors())
    else:
        m1 = psi.projector().entries.T
        w, v = np.linalg.eigh(np.eye(4) - m1)
        comp = v[:, w > 0.5]
        shape = qubits(("A", "B"))
        povm = (Operator(m1, shape, hermitian=True),) + tuple(
            Operator(np.outer(comp[:, k], comp[:, k].conj()), shape, hermitian=True)
            for k in range(comp.shape[1])
        )
    return SwapInstance(src_a, src_b, povm)


def werner_source(visibility: float, labels) -> Operator:
    """visibility * |Phi+><Phi+| + (1 - visibility) * I/4."""
    p = np.outer(BELL_AMPLITUDES[0], BELL_AMPLITUDES[0].conj())
    m = visibility * p + (1.0 - visibility) * np.eye(4) / 4.0
    return Operator(m, qubits(tuple(labels)), hermitian=True)


def dualize(game: SwapGame) -> SemiQuantumGame:
    """Recast the swap game as a certification game over the same contraction.

    Variable mapping between the two problems:
        certification rho  (middle slot)  <->  swap joint element M_1
        certification mA   (side slot)    <->  swap source rho_A0A
        certification mB   (side slot)    <->  swap source rho_BB0
    The score functional is identical, so the certify engine runs unchanged;
    only the feasible-set roles (unit trace vs below identity) are exchanged,
    which optimize_swap accounts for.
    """
    w = build_certification_witness(game.target, L=game.penalty, l1=1.0)
    table = decompose_witness(w)
    return SemiQuantumGame(w, table, schmidt_angle(game.target.amplitudes))


def optimize_swap(
    game: SwapGame,
    cfg: SeeSawConfig = SeeSawConfig(),
    initial: SwapInstance | None = None,
) -> OptResult:
    """Maximize Tr[V rho_1] over sources and the first joint element.

    Runs the certify coordinate ascent on the dual variable layout. The
    returned OptResult stores the swapped-role variables in Strategy slots:
    rho holds M_1, ma holds rho_A0A, mb holds rho_BB0.
    """
    dual = dualize(game)
    init = None
    if initial is not None:
        init = (
            initial.joint_povm[0].entries,
            initial.rho_a0a.entries,
            initial.rho_bb0.entries,
        )
    best, idx = optimize_dual(dual.witness.operator, cfg, init)
    m1, src_a, src_b = best.variables
    strategy = Strategy(
        Operator(m1, qubits(("A", "B")), hermitian=True),
        Operator(src_a, qubits(("A0", "A")), hermitian=True),
        Operator(src_b, qubits(("B", "B0")), hermitian=True),
    )
    return OptResult(strategy, best.trajectory, best.score, best.converged, idx)


# ---------------------------------------------------------------------------
# complete-measurement checker


@dataclass(frozen=True)
class OutcomeDiagnostic:
    index: int
    probability: float
    top_eigenvalue: float
    schmidt_coefficients: tuple[float, float]
    bell_match: int | None
    bell_distance: float | None
    messages: tuple[str, ...]


@dataclass(frozen=True)
class CorollaryReport:
    passed: bool
    clauses: dict
    outcomes: tuple[OutcomeDiagnostic, ...]
    verdict: str


def _align_to_bell_frame(vectors: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Local unitaries (U_A0, U_B0) sending near-Bell vectors onto the Bell basis.

    Constructive, no search: outcome 0 is Schmidt-aligned onto (|00>+|11>)/sqrt(2);
    the leftover degenerate-Schmidt gauge (any R (x) conj(R) stabilizes that
    vector) is fixed deterministically with outcomes 1 and 2.
    """
    a0 = vectors[0].reshape(2, 2)
    u, _, vh = np.linalg.svd(a0)
    ua = u.conj().T
    ub = vh.conj()

    def frame_matrix(vec: np.ndarray) -> np.ndarray:
        return sqrt(2.0) * (ua @ vec.reshape(2, 2) @ ub.T)

    # outcome 1 fixes the diagonal Pauli direction
    n2 = frame_matrix(vectors[1])
    mu = np.trace(n2 @ n2) / 2.0
    phase = np.sqrt(mu) if abs(mu) > 1e-12 else 1.0
    h2 = n2 / phase
    h2 = 0.5 * (h2 + h2.conj().T)
    _, r = np.linalg.eigh(h2)
    r = r[:, ::-1]
    ua = r.conj().T @ ua
    ub = r.T @ ub

    # outcome 2 fixes the azimuthal gauge (diagonal rotations)
    n3 = frame_matrix(vectors[2])
    if abs(n3[0, 1]) > 1e-9 and abs(n3[1, 0]) > 1e-9:
        theta = 0.5 * (np.angle(n3[1, 0]) - np.angle(n3[0, 1]))
        rz = np.diag([np.exp(-1j * theta / 2.0), np.exp(1j * theta / 2.0)])
        ua = rz.conj().T @ ua
        ub = rz.T @ ub
    return ua, ub


def corollary_check(inst: SwapInstance, tol: float = 1e-6) -> CorollaryReport:
    """Decide whether a four-outcome instance realizes a complete Bell measurement
    on Bell sources, up to one shared pair of local bases on (A0, B0).

    Clauses: (a) every outcome has probability 1/4; (b) every conditional state
    is pure with Schmidt coefficients (1/sqrt(2), 1/sqrt(2)); (c) one pair of
    local unitaries, built constructively from the conditional states, maps all
    four of them onto the four Bell projectors up to phase.
    """
    if len(inst.joint_povm) != 4:
        raise ValueError(f"corollary check needs a 4-outcome POVM, got {len(inst.joint_povm)}")
    inst.validate()

    probs: list[float] = []
    vecs: list[np.ndarray] = []
    tops: list[float] = []
    coeffs: list[tuple[float, float]] = []
    messages: list[list[str]] = [[] for _ in range(4)]
    eq = 1.0 / sqrt(2.0)

    for i in range(4):
        rt = swap_effective(inst, i)
        p = rt.weight
        probs.append(p)
        if abs(p - 0.25) > tol:
            messages[i].append(f"probability {p:.8f} deviates from 1/4")
        normalized = rt.operator.entries / max(p, 1e-300)
        w, v = np.linalg.eigh(normalized)
        tops.append(float(w[-1]))
        vecs.append(v[:, -1])
        if w[-1] < 1.0 - tol:
            messages[i].append(f"purity: top eigenvalue {w[-1]:.8f} < 1 - {tol:g}")
        s = schmidt_coefficients(v[:, -1])
        coeffs.append((float(s[0]), float(s[1])))
        if abs(s[0] - eq) > tol or abs(s[1] - eq) > tol:
            messages[i].append(f"Schmidt coefficients ({s[0]:.8f}, {s[1]:.8f}) not maximally entangled")

    clause_prob = all(abs(p - 0.25) <= tol for p in probs)
    clause_pure = all(
        tops[i] >= 1.0 - tol and abs(coeffs[i][0] - eq) <= tol and abs(coeffs[i][1] - eq) <= tol
        for i in range(4)
    )

    matches: list[int | None] = [None] * 4
    dists: list[float | None] = [None] * 4
    clause_align: bool | None = None
    if clause_pure:
        ua, ub = _align_to_bell_frame(vecs)
        g = np.kron(ua, ub)
        bell_projs = [np.outer(b, b.conj()) for b in BELL_AMPLITUDES]
        used: set[int] = set()
        clause_align = True
        for i, v in enumerate(vecs):
            pv = g @ v
            proj = np.outer(pv, pv.conj())
            d = [float(np.linalg.norm(proj - bp)) for bp in bell_projs]
            j = int(np.argmin(d))
            matches[i], dists[i] = j, d[j]
            if d[j] > tol:
                clause_align = False
                messages[i].append(f"aligned state is {d[j]:.3e} from the nearest Bell projector")
            if j in used:
                clause_align = False
                messages[i].append(f"outcome maps to Bell state {j} already claimed")
            used.add(j)
    else:
        for i in range(4):
            messages[i].append("alignment skipped (purity clause failed)")

    passed = clause_prob and clause_pure and bool(clause_align)
    outcomes = tuple(
        OutcomeDiagnostic(i, probs[i], tops[i], coeffs[i], matches[i], dists[i], tuple(messages[i]))
        for i in range(4)
    )
    verdict = (
        "joint measurement is a complete Bell-state measurement and both sources are Bell states"
        if passed
        else "instance is not a Bell-source / complete-Bell-measurement realization"
    )
    return CorollaryReport(
        passed=passed,
        clauses={
            "probabilities": clause_prob,
            "purity_schmidt": clause_pure,
            "local_alignment": clause_align,
        },
        outcomes=outcomes,
        verdict=verdict,
    )


def rotated_ideal_instance(seed: int) -> SwapInstance:
    """Ideal instance conjugated by seeded local unitaries on all four factors."""
    rng = np.random.default_rng(seed)
    u_a0, u_a, u_b, u_b0 = (haar_unitary(2, rng) for _ in range(4))
    base = ideal_swap_instance()
    ga = np.kron(u_a0, u_a)
    gb = np.kron(u_b, u_b0)
    gm = np.kron(u_a, u_b)
    return SwapInstance(
        Operator(ga @ base.rho_a0a.entries @ ga.conj().T, base.rho_a0a.shape, hermitian=True),
        Operator(gb @ base.rho_bb0.entries @ gb.conj().T, base.rho_bb0.shape, hermitian=True),
        tuple(
            Operator(gm @ m.entries @ gm.conj().T, m.shape, hermitian=True)
            for m in base.joint_povm
        ),
    )
