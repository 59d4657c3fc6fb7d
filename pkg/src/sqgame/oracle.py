"""Brute-force and sampling verification: the package's independent ground truth.

naive_effective_element re-implements the partial-trace sandwich with literal
index loops and no shared machinery; the optimized kernels must match it
exactly. The probes sample the structural claims behind the certification
argument (separability propagation, rank collapse, the bipartite overlap
inequality, the single-variable bound function) and report violations against
fixed tolerances. Every probe derives the sample-i seed as seed + i, so a
recorded worst_seed reproduces its sample bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .game import Strategy
from .kernels import effective_element_kernel
from .qlin import (
    KetVector,
    Operator,
    SubsystemShape,
    haar_density,
    haar_ket,
    haar_unitary,
    qubits,
    rng_for,
    schmidt_angle,
)
from .swap import SwapInstance
from .witness import build_certification_witness, target_ket


@dataclass(frozen=True)
class ProbeReport:
    n_samples: int
    violations: int
    worst_value: float
    worst_seed: int
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class Lemma3Instance:
    dims: tuple[int, int]
    psi: KetVector
    phi_a: KetVector
    phi_a_bar: KetVector
    phi_b: KetVector
    phi_b_bar: KetVector
    theta: float
    gamma: float

    def overlap_sum(self) -> float:
        """|<psi|phi_a phi_b>|^2 + |<psi|phi_a_bar phi_b_bar>|^2."""
        p = self.psi.amplitudes
        t1 = np.vdot(p, np.kron(self.phi_a.amplitudes, self.phi_b.amplitudes))
        t2 = np.vdot(p, np.kron(self.phi_a_bar.amplitudes, self.phi_b_bar.amplitudes))
        return float(abs(t1) ** 2 + abs(t2) ** 2)

    def constraint_residual(self) -> float:
        """Largest violated cross-orthogonality |<psi|phi_a phi_b_bar>|, |<psi|phi_a_bar phi_b>|."""
        p = self.psi.amplitudes
        r1 = abs(np.vdot(p, np.kron(self.phi_a.amplitudes, self.phi_b_bar.amplitudes)))
        r2 = abs(np.vdot(p, np.kron(self.phi_a_bar.amplitudes, self.phi_b.amplitudes)))
        return float(max(r1, r2))

    def validate(self, tol: float = 1e-10) -> "Lemma3Instance":
        if self.constraint_residual() > tol:
            raise ValueError(f"cross-orthogonality residual {self.constraint_residual():.3e}")
        for k in (self.psi, self.phi_a, self.phi_a_bar, self.phi_b, self.phi_b_bar):
            if abs(k.norm() - 1.0) > tol:
                raise ValueError("instance vectors must be unit norm")
        return self


# ---------------------------------------------------------------------------
# literal reference contraction


def naive_effective_element(rho: np.ndarray, ma: np.ndarray, mb: np.ndarray) -> np.ndarray:
    """Partial-trace sandwich written out index by index.

    Builds X = I (x) rho (x) I and Y = mA (x) mB entrywise on the ordered
    basis |a0 a b b0>, multiplies them with explicit loops, and traces out the
    middle pair. Shares no code with the optimized kernels.
    """

    def idx(a0, a, b, b0):
        return ((a0 * 2 + a) * 2 + b) * 2 + b0

    def pair(i, j):
        return i * 2 + j

    x = np.zeros((16, 16), dtype=np.complex128)
    y = np.zeros((16, 16), dtype=np.complex128)
    for a0 in range(2):
        for a in range(2):
            for b in range(2):
                for b0 in range(2):
                    for c0 in range(2):
                        for c in range(2):
                            for d in range(2):
                                for d0 in range(2):
                                    r = idx(a0, a, b, b0)
                                    s = idx(c0, c, d, d0)
                                    if a0 == c0 and b0 == d0:
                                        x[r, s] = rho[pair(a, b), pair(c, d)]
                                    y[r, s] = ma[pair(a0, a), pair(c0, c)] * mb[pair(b, b0), pair(d, d0)]
    z = np.zeros((16, 16), dtype=np.complex128)
    for r in range(16):
        for s in range(16):
            acc = 0.0 + 0.0j
            for t in range(16):
                acc += x[r, t] * y[t, s]
            z[r, s] = acc
    out = np.zeros((4, 4), dtype=np.complex128)
    for a0 in range(2):
        for b0 in range(2):
            for c0 in range(2):
                for d0 in range(2):
                    acc = 0.0 + 0.0j
                    for a in range(2):
                        for b in range(2):
                            acc += z[idx(a0, a, b, b0), idx(c0, a, b, d0)]
                    out[pair(a0, b0), pair(c0, d0)] = acc
    return out


# ---------------------------------------------------------------------------
# separability test at two qubits


def _pt_second(m: np.ndarray) -> np.ndarray:
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_entangled(op: Operator | np.ndarray) -> bool:
    """Exact entanglement decision for a 4x4 PSD operator via partial transpose."""
    m = op.entries if isinstance(op, Operator) else np.asarray(op)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got shape {m.shape}")
    return bool(np.linalg.eigvalsh(_pt_second(m))[0] < -1e-10)


# ---------------------------------------------------------------------------
# samplers


def sample_strategy(seed) -> Strategy:
    """Random valid strategy: mixed-or-pure state, scaled rank-one measurements."""
    rng = rng_for(seed)
    rank = int(rng.integers(1, 5))
    rho = haar_density(4, rank, rng)
    scale_a = float(rng.uniform(0.5, 1.0))
    scale_b = float(rng.uniform(0.5, 1.0))
    va, vb = haar_ket(4, rng), haar_ket(4, rng)
    return Strategy(
        Operator(rho, qubits(("A", "B")), hermitian=True),
        Operator(scale_a * np.outer(va, va.conj()), qubits(("A0", "A")), hermitian=True),
        Operator(scale_b * np.outer(vb, vb.conj()), qubits(("B", "B0")), hermitian=True),
    )


def sample_swap_instance(seed, outcomes: int = 4) -> SwapInstance:
    """Random sources and a random full-rank POVM with the given outcome count."""
    rng = rng_for(seed)
    src_a = haar_density(4, int(rng.integers(1, 5)), rng)
    src_b = haar_density(4, int(rng.integers(1, 5)), rng)
    gs = []
    for _ in range(outcomes):
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        gs.append(z @ z.conj().T)
    total = sum(gs)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    shape = qubits(("A", "B"))
    povm = tuple(Operator(inv_sqrt @ g @ inv_sqrt, shape, hermitian=True) for g in gs)
    return SwapInstance(
        Operator(src_a, qubits(("A0", "A")), hermitian=True),
        Operator(src_b, qubits(("B", "B0")), hermitian=True),
        povm,
    )


def _entangled_projector_vector(rng: np.random.Generator, min_angle: float) -> np.ndarray:
    """cos(a)|0 u0> + sin(a)|1 u1> with Haar local bases, a in [min_angle, pi/2 - min_angle]."""
    a = rng.uniform(min_angle, pi / 2 - min_angle)
    u = haar_unitary(2, rng)
    v = haar_unitary(2, rng)
    base = np.zeros(4, dtype=np.complex128)
    base[0], base[3] = np.cos(a), np.sin(a)
    return np.kron(u, v) @ base


def _random_psd2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return z @ z.conj().T


def sample_separable_measurement(rng: np.random.Generator, terms: int = 3) -> tuple[np.ndarray, list]:
    """sum_k N_k (x) N'_k from PSD qubit factors, scaled so the sum is below identity."""
    factors = [(_random_psd2(rng), _random_psd2(rng)) for _ in range(terms)]
    m = sum(np.kron(f, g) for f, g in factors)
    top = float(np.linalg.eigvalsh(m)[-1])
    if top > 1.0:
        m = m / top
        factors = [(f / top, g) for f, g in factors]
    return m, factors


def _mixed_density(rng: np.random.Generator, min_mix: float) -> np.ndarray:
    """Random 4x4 density whose second eigenvalue is at least min_mix."""
    lam = np.sort(rng.dirichlet(np.ones(4)))[::-1]
    if lam[1] < min_mix:
        w = (min_mix - lam[1]) / (0.5 - lam[1])
        lam = (1.0 - w) * lam + w * np.array([0.5, 0.5, 0.0, 0.0])
    u = haar_unitary(4, rng)
    return (u * lam) @ u.conj().T


# ---------------------------------------------------------------------------
# probes


def theorem1_probe(n: int, seed: int = 0, side: str = "A") -> ProbeReport:
    """Separable-measurement propagation: the effective element of a separable
    joint measurement must itself be separable across the input ports.

    Each sample draws a separable element on the chosen side, an arbitrary
    state and an arbitrary element on the other side; a violation is a
    negative partial-transpose eigenvalue below -1e-9 or a failure of the
    explicit product decomposition of the result (terms must recombine to the
    effective element with PSD second factors).
    """
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    violations = 0
    worst = np.inf
    worst_seed = seed
    tr_lo, tr_hi = np.inf, -np.inf
    w_probe = build_certification_witness(target_ket(pi / 4)).operator.entries
    for i in range(n):
        s = seed + i
        rng = np.random.default_rng(s)
        sep, factors = sample_separable_measurement(rng)
        rho = haar_density(4, int(rng.integers(1, 5)), rng)
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        other = z @ z.conj().T
        other = other / (float(np.linalg.eigvalsh(other)[-1]) * float(rng.uniform(1.0, 3.0)))
        ma, mb = (sep, other) if side == "A" else (other, sep)
        eff = effective_element_kernel(rho, ma, mb)
        eff = 0.5 * (eff + eff.conj().T)
        min_pt = float(np.linalg.eigvalsh(_pt_second(eff))[0])
        ok = min_pt >= -1e-9
        rebuilt = np.zeros((4, 4), dtype=np.complex128)
        rho4 = rho.reshape(2, 2, 2, 2)
        for f, g in factors:
            if side == "A":
                t = np.einsum("abpq,pa,qwbz->wz", rho4, g, mb.reshape(2, 2, 2, 2))
                term_ok = float(np.linalg.eigvalsh(0.5 * (t + t.conj().T))[0]) >= -1e-10
                rebuilt += np.kron(f, t)
            else:
                t = np.einsum("abpq,xpya,qb->xy", rho4, ma.reshape(2, 2, 2, 2), f)
                term_ok = float(np.linalg.eigvalsh(0.5 * (t + t.conj().T))[0]) >= -1e-10
                rebuilt += np.kron(t, g)
            ok = ok and term_ok
        ok = ok and float(np.abs(rebuilt - eff).max()) <= 1e-12
        if not ok:
            violations += 1
        if min_pt < worst:
            worst, worst_seed = min_pt, s
        val = float(np.trace(w_probe @ eff).real)
        tr_lo, tr_hi = min(tr_lo, val), max(tr_hi, val)
    notes = f"side={side}; witness trace values in [{tr_lo:.6f}, {tr_hi:.6f}]"
    return ProbeReport(n, violations, worst, worst_seed, notes)


def lemma1_probe(
    n: int, seed: int = 0, min_mix: float = 0.1, min_angle: float = pi / 8
) -> ProbeReport:
    """Rank collapse needs purity: a genuinely mixed shared state contracted
    against rank-one entangled measurement projectors never yields a rank-one
    effective element. Violation: second eigenvalue at or below 1e-8."""
    if not 0.0 < min_mix <= 0.5:
        raise ValueError("min_mix must lie in (0, 0.5]")
    if not 0.0 < min_angle <= pi / 4:
        raise ValueError("min_angle must lie in (0, pi/4]")
    violations = 0
    worst = np.inf
    worst_seed = seed
    for i in range(n):
        s = seed + i
        rng = np.random.default_rng(s)
        rho = _mixed_density(rng, min_mix)
        va = _entangled_projector_vector(rng, min_angle)
        vb = _entangled_projector_vector(rng, min_angle)
        eff = effective_element_kernel(rho, np.outer(va, va.conj()), np.outer(vb, vb.conj()))
        second = float(np.linalg.eigvalsh(0.5 * (eff + eff.conj().T))[-2])
        if second <= 1e-8:
            violations += 1
        if second < worst:
            worst, worst_seed = second, s
    return ProbeReport(n, violations, worst, worst_seed,
                       f"min_mix={min_mix:g}, min_angle={min_angle:g}")


def lemma2_probe(
    n: int, seed: int = 0, min_angle: float = pi / 8, side: str = "A"
) -> ProbeReport:
    """Rank collapse needs rank-one measurements: with a pure entangled shared
    state, a rank-two projective element on one side forces a higher-rank
    effective element. Violation: second eigenvalue at or below 1e-8."""
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    violations = 0
    worst = np.inf
    worst_seed = seed
    for i in range(n):
        s = seed + i
        rng = np.random.default_rng(s)
        psi = _entangled_projector_vector(rng, min_angle)
        rho = np.outer(psi, psi.conj())
        pair = _orthonormal_entangled_pair(rng, min_angle)
        rank2 = np.outer(pair[0], pair[0].conj()) + np.outer(pair[1], pair[1].conj())
        v1 = _entangled_projector_vector(rng, min_angle)
        rank1 = np.outer(v1, v1.conj())
        ma, mb = (rank2, rank1) if side == "A" else (rank1, rank2)
        eff = effective_element_kernel(rho, ma, mb)
        second = float(np.linalg.eigvalsh(0.5 * (eff + eff.conj().T))[-2])
        if second <= 1e-8:
            violations += 1
        if second < worst:
            worst, worst_seed = second, s
    return ProbeReport(n, violations, worst, worst_seed,
                       f"side={side}, min_angle={min_angle:g}")


def _orthonormal_entangled_pair(rng: np.random.Generator, min_angle: float, tries: int = 500):
    """Two orthonormal two-qubit vectors, each with Schmidt angle in range."""
    for _ in range(tries):
        u = haar_unitary(4, rng)
        ok = True
        for col in (0, 1):
            ang = schmidt_angle(u[:, col])
            if not min_angle <= ang:
                ok = False
                break
        if ok:
            return u[:, 0], u[:, 1]
    raise RuntimeError("could not sample an orthonormal entangled pair; widen min_angle")


def lemma3_sample(d_a: int, d_b: int, seed) -> Lemma3Instance:
    """Haar local vectors plus a joint vector drawn from the orthogonal
    complement of the two cross product directions."""
    if d_a < 2 or d_b < 2:
        raise ValueError("local dimensions must be at least 2")
    rng = rng_for(seed)
    phi_a, phi_a_bar = haar_ket(d_a, rng), haar_ket(d_a, rng)
    phi_b, phi_b_bar = haar_ket(d_b, rng), haar_ket(d_b, rng)
    cross = np.stack([np.kron(phi_a, phi_b_bar), np.kron(phi_a_bar, phi_b)], axis=1)
    q, _ = np.linalg.qr(cross)
    psi = haar_ket(d_a * d_b, rng)
    psi = psi - q @ (q.conj().T @ psi)
    nrm = np.linalg.norm(psi)
    assert nrm > 1e-12, "complement is empty; impossible for d_a * d_b >= 4"
    psi = psi / nrm
    sa = SubsystemShape((d_a,), ("A",))
    sb = SubsystemShape((d_b,), ("B",))
    sab = SubsystemShape((d_a, d_b), ("A", "B"))
    theta = float(np.arccos(np.clip(abs(np.vdot(phi_a, phi_a_bar)), 0.0, 1.0)))
    gamma = float(np.arccos(np.clip(abs(np.vdot(phi_b, phi_b_bar)), 0.0, 1.0)))
    return Lemma3Instance(
        (d_a, d_b),
        KetVector(psi, sab, "unit"),
        KetVector(phi_a, sa, "unit"),
        KetVector(phi_a_bar, sa, "unit"),
        KetVector(phi_b, sb, "unit"),
        KetVector(phi_b_bar, sb, "unit"),
        theta,
        gamma,
    )


def lemma3_equality_instance(d_a: int, d_b: int, seed, outside_weight: float = 0.0) -> Lemma3Instance:
    """Orthogonal local pairs with the joint vector in (or partly outside, for
    outside_weight > 0) the span of the two aligned product directions."""
    rng = rng_for(seed)
    ua, ub = haar_unitary(d_a, rng), haar_unitary(d_b, rng)
    phi_a, phi_a_bar = ua[:, 0], ua[:, 1]
    phi_b, phi_b_bar = ub[:, 0], ub[:, 1]
    c = rng.normal(size=2) + 1j * rng.normal(size=2)
    c = c / np.linalg.norm(c)
    psi = c[0] * np.kron(phi_a, phi_b) + c[1] * np.kron(phi_a_bar, phi_b_bar)
    if outside_weight > 0.0:
        if d_a < 3:
            raise ValueError("outside-support construction needs d_a >= 3")
        extra = np.kron(ua[:, 2], phi_b)
        psi = sqrt(1.0 - outside_weight) * psi + sqrt(outside_weight) * extra
    sa = SubsystemShape((d_a,), ("A",))
    sb = SubsystemShape((d_b,), ("B",))
    sab = SubsystemShape((d_a, d_b), ("A", "B"))
    return Lemma3Instance(
        (d_a, d_b),
        KetVector(psi, sab, "unit"),
        KetVector(phi_a, sa, "unit"),
        KetVector(phi_a_bar, sa, "unit"),
        KetVector(phi_b, sb, "unit"),
        KetVector(phi_b_bar, sb, "unit"),
        pi / 2,
        pi / 2,
    )


def lemma3_check(n: int, dims=((2, 2), (2, 3), (3, 3), (4, 4)), seed: int = 0) -> ProbeReport:
    """Sampled overlap inequality: under the two cross-orthogonality
    constraints, |<psi|phi_a phi_b>|^2 + |<psi|phi_a_bar phi_b_bar>|^2 <= 1.

    Also builds one equality instance per dimension pair and counts it as a
    violation if it misses 1 by more than 1e-12."""
    dims = tuple(tuple(d) for d in dims)
    violations = 0
    worst = -np.inf
    worst_seed = seed
    for i in range(n):
        s = seed + i
        d_a, d_b = dims[i % len(dims)]
        inst = lemma3_sample(d_a, d_b, s)
        val = inst.overlap_sum()
        if val > 1.0 + 1e-9 or inst.constraint_residual() > 1e-10:
            violations += 1
        if val > worst:
            worst, worst_seed = val, s
    eq_results = []
    for k, (d_a, d_b) in enumerate(dims):
        val = lemma3_equality_instance(d_a, d_b, seed + n + k).overlap_sum()
        eq_results.append(val)
        if abs(val - 1.0) > 1e-12:
            violations += 1
    notes = "equality constructions: " + ", ".join(f"{v:.15f}" for v in eq_results)
    return ProbeReport(n, violations, worst, worst_seed, notes)


# ---------------------------------------------------------------------------
# single-variable bound function


class BoundaryError(ValueError):
    """Coefficient c diverges (an overlap angle sits at 0); use the
    exact-orthogonality construction instead."""


@dataclass(frozen=True)
class AppendixDReport:
    theta: float
    gamma: float
    coefficients: tuple[float, float, float, float]
    grid_max: float
    x_at_grid_max: float
    candidates: dict
    grid_tolerance: float
    below_unit: bool
    candidates_dominate: bool
    agreement: bool

    @property
    def passed(self) -> bool:
        return self.below_unit and self.candidates_dominate and self.agreement


def appendixD_scan(theta: float, gamma: float, grid_n: int = 400) -> AppendixDReport:
    """Scan f(x) = a x^2 + b x sqrt(1 - c x^2) + d over x in [0, 1/sqrt(c)]
    and compare against the closed-form candidate points.

    Candidates are the interval endpoint x = sqrt(1/c) and both roots of the
    stationarity condition, x^2 = 1/(2c) -+ (a/(2c)) / sqrt(a^2 + b^2 c); only
    the + root solves f'(x) = 0 on the interval (the - root is introduced by
    squaring), so the candidate maximum is max over all three values.
    """
    if grid_n < 10:
        raise ValueError("grid_n must be >= 10")
    st, sg = np.sin(theta), np.sin(gamma)
    if min(abs(st), abs(sg)) < 1e-9:
        raise BoundaryError("overlap angle at 0: coefficient c diverges")
    ct, cg = np.cos(theta), np.cos(gamma)
    a = 2.0 * ct**2 * cg**2
    b = 2.0 * st * ct * sg * cg
    c = 1.0 + cg**2 / sg**2 + ct**2 / st**2
    d = st**2 * sg**2

    def f(x):
        return a * x**2 + b * x * np.sqrt(np.maximum(0.0, 1.0 - c * x**2)) + d

    xs = np.linspace(0.0, 1.0 / sqrt(c), grid_n)
    vals = f(xs)
    k = int(np.argmax(vals))
    grid_max = float(vals[k])

    s = sqrt(a * a + b * b * c)
    endpoint = a / c + d
    endpoint_closed = (1.0 + ct**2 * cg**2) / c
    x_minus2 = max(0.0, 1.0 / (2.0 * c) - (a / (2.0 * c)) / s)
    x_plus2 = 1.0 / (2.0 * c) + (a / (2.0 * c)) / s
    candidates = {
        "endpoint": float(endpoint),
        "endpoint_closed_form": float(endpoint_closed),
        "stationary_minus": float(f(np.sqrt(x_minus2))),
        "stationary_plus": float(f(np.sqrt(x_plus2))),
    }
    cand_max = max(candidates.values())

    lo, hi = max(0, k - 3), min(len(xs) - 1, k + 3)
    local_step = float(np.max(np.abs(np.diff(vals[lo:hi + 1])))) if hi > lo else 0.0
    grid_tol = max(1e-9, 3.0 * local_step)

    below_unit = grid_max <= 1.0 + 1e-9 and cand_max <= 1.0 + 1e-9
    dominate = grid_max <= cand_max + 1e-9
    agreement = abs(cand_max - grid_max) <= grid_tol
    return AppendixDReport(
        theta, gamma, (float(a), float(b), float(c), float(d)),
        grid_max, float(xs[k]), candidates, grid_tol,
        below_unit, dominate, agreement,
    )
