"""Score maximization and certification verdicts.

The optimizer is plain coordinate ascent: with two of (rho, mA, mB) fixed,
the score is Tr[H v] for an explicitly buildable Hermitian H, so each update
is an exact largest-eigenvalue problem. Every sweep therefore cannot decrease
the score, which gives the monotone-trajectory invariant for free.

Certification compares only local-unitary invariants of the recovered
strategy (Schmidt coefficients and angles) against the target, never raw
matrix entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Callable, Sequence

import numpy as np

from .backend import parallel_map
from .kernels import (
    effective_element_kernel,
    meas_a_update_kernel,
    meas_b_update_kernel,
    state_update_kernel,
)
from .policy import DEFAULT_POLICY, NumericPolicy
from .game import SemiQuantumGame, Strategy, effective_element
from .qlin import (
    KetVector,
    Operator,
    SchmidtForm,
    haar_ket,
    qubits,
    schmidt,
    schmidt_angle,
)
from .witness import NotEntangledError

MODES = ("rank_one", "psd_relaxed")


@dataclass(frozen=True)
class SeeSawConfig:
    restarts: int = 32
    max_iters: int = 500
    tol_score: float = 1e-10
    mode: str = "rank_one"
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if self.tol_score <= 0:
            raise ValueError("tol_score must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class OptResult:
    strategy: Strategy
    score_trajectory: np.ndarray
    final_score: float
    converged: bool
    restart_index: int

    def __post_init__(self):
        t = np.ascontiguousarray(self.score_trajectory, dtype=np.float64)
        t.setflags(write=False)
        object.__setattr__(self, "score_trajectory", t)


@dataclass(frozen=True)
class CertificationReport:
    final_score: float
    gap: float
    rho_schmidt: SchmidtForm
    ma_schmidt: SchmidtForm
    mb_schmidt: SchmidtForm
    target_chi: float
    verdict: str
    diagnostics: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


# ---------------------------------------------------------------------------
# closed-form score ceiling for rank-one strategies


def theorem2_bound(alpha: float, beta: float, chi: float) -> float:
    """Score ceiling for measurement Schmidt angles (alpha, beta) and target angle chi.

    Valid for rank-one strategies whose effective element is parallel to the
    target direction; equality is attainable.
    """
    if chi <= 1e-12:
        raise NotEntangledError("chi must be positive (entangled target)")
    if not 0.0 < chi <= pi / 4 + 1e-12:
        raise ValueError(f"chi must lie in (0, pi/4], got {chi}")
    if not (0.0 <= alpha <= pi / 2 and 0.0 <= beta <= pi / 2):
        raise ValueError("alpha and beta must lie in [0, pi/2]")
    sa2, ca2 = np.sin(alpha) ** 2, np.cos(alpha) ** 2
    sb2, cb2 = np.sin(beta) ** 2, np.cos(beta) ** 2
    num = sa2 * sb2 * ca2 * cb2
    den = sa2 * sb2 * np.cos(chi) ** 2 + ca2 * cb2 * np.sin(chi) ** 2
    # den = 0 needs sin and cos factors to vanish simultaneously; impossible here
    assert den > 0.0
    return float(num / den)


@dataclass(frozen=True)
class BoundScan:
    chi: float
    grid: np.ndarray
    values: np.ndarray
    max_value: float
    argmax: tuple[float, float]

    def rows(self):
        """(alpha, beta, bound) rows in sorted order."""
        for i, a in enumerate(self.grid):
            for j, b in enumerate(self.grid):
                yield float(a), float(b), float(self.values[i, j])


def bound_scan(chi: float, grid_n: int) -> BoundScan:
    """Evaluate the score ceiling on the interior nodes of a grid_n-cell grid.

    The axis [0, pi/2] is split into grid_n cells; the ceiling is evaluated at
    the grid_n - 1 interior nodes per axis (the formula is 0/0 at two corners,
    so boundaries are excluded).
    """
    if grid_n < 3:
        raise ValueError("grid_n must be >= 3")
    if chi <= 1e-12:
        raise NotEntangledError("chi must be positive (entangled target)")
    h = (pi / 2) / grid_n
    grid = h * np.arange(1, grid_n)
    a = grid[:, None]
    b = grid[None, :]
    num = (np.sin(a) * np.cos(a) * np.sin(b) * np.cos(b)) ** 2
    den = (np.sin(a) * np.sin(b)) ** 2 * np.cos(chi) ** 2 + (np.cos(a) * np.cos(b)) ** 2 * np.sin(chi) ** 2
    values = num / den
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    return BoundScan(chi, grid, values, float(values[i, j]), (float(grid[i]), float(grid[j])))


# ---------------------------------------------------------------------------
# coordinate-ascent optimizer


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _top_projector(h: np.ndarray) -> np.ndarray:
    _, v = np.linalg.eigh(_hermitize(h))
    top = v[:, -1]
    return np.outer(top, top.conj())


def _positive_projector(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(_hermitize(h))
    keep = v[:, w > 0.0]
    if keep.shape[1] == 0:
        top = v[:, -1]
        return np.outer(top, top.conj())
    return keep @ keep.conj().T


# constraint kinds: a density update always stays a rank-one projector (the
# exact argmax over unit-trace PSD); a measurement update may relax to the
# positive-eigenspace projector, which is the exact argmax over 0 <= m <= I.
_DENSITY = "density"
_POVM = "povm"


def _update(h: np.ndarray, kind: str, mode: str) -> np.ndarray:
    if mode == "rank_one" or kind == _DENSITY:
        return _top_projector(h)
    return _positive_projector(h)


def _random_rank_one(rng: np.random.Generator) -> np.ndarray:
    v = haar_ket(4, rng)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class _RestartOutcome:
    score: float
    trajectory: np.ndarray
    variables: tuple[np.ndarray, np.ndarray, np.ndarray]
    converged: bool


def _seesaw_restart(
    w_op: np.ndarray,
    cfg: SeeSawConfig,
    kinds: tuple[str, str, str],
    restart: int,
    initial: tuple[np.ndarray, np.ndarray, np.ndarray] | None,
) -> _RestartOutcome:
    if initial is not None:
        rho, ma, mb = (np.array(x, dtype=np.complex128) for x in initial)
    else:
        rng = np.random.default_rng(cfg.seed + restart)
        rho, ma, mb = _random_rank_one(rng), _random_rank_one(rng), _random_rank_one(rng)

    def current_score() -> float:
        m = effective_element_kernel(rho, ma, mb)
        return float(np.trace(w_op @ m).real)

    s = current_score()
    trajectory = [s]
    converged = False
    for it in range(cfg.max_iters):
        rho = _update(state_update_kernel(w_op, ma, mb), kinds[0], cfg.mode)
        ma = _update(meas_a_update_kernel(w_op, rho, mb), kinds[1], cfg.mode)
        mb = _update(meas_b_update_kernel(w_op, rho, ma), kinds[2], cfg.mode)
        s_new = current_score()
        if not np.isfinite(s_new):
            raise RuntimeError(
                "non-finite score in coordinate ascent "
                f"(restart {restart}, iteration {it}, trajectory tail {trajectory[-5:]})"
            )
        trajectory.append(s_new)
        if s_new - s < cfg.tol_score:
            converged = True
            break
        s = s_new
    return _RestartOutcome(trajectory[-1], np.array(trajectory), (rho, ma, mb), converged)


def _run_seesaw(
    w_op: np.ndarray,
    cfg: SeeSawConfig,
    kinds: tuple[str, str, str],
    initial: tuple[np.ndarray, np.ndarray, np.ndarray] | None,
) -> tuple[_RestartOutcome, int]:
    def run(r: int) -> _RestartOutcome:
        return _seesaw_restart(w_op, cfg, kinds, r, initial if r == 0 else None)

    outcomes = parallel_map(run, range(cfg.restarts))
    best_idx = 0
    for r in range(1, cfg.restarts):
        if outcomes[r].score > outcomes[best_idx].score:
            best_idx = r
    return outcomes[best_idx], best_idx


def seesaw_optimize(
    game: SemiQuantumGame,
    cfg: SeeSawConfig = SeeSawConfig(),
    initial: Strategy | None = None,
) -> OptResult:
    """Maximize the game score over strategies by exact coordinate ascent.

    Each restart starts from a Haar-random pure state and rank-one measurement
    projectors (or from `initial` for restart 0) and sweeps (rho, mA, mB)
    updates until the score improvement drops below tol_score. The best
    restart wins; ties go to the lowest restart index.
    """
    init = None
    if initial is not None:
        init = (initial.rho.entries, initial.ma.entries, initial.mb.entries)
    best, idx = _run_seesaw(
        game.witness.operator.entries, cfg, (_DENSITY, _POVM, _POVM), init
    )
    rho, ma, mb = best.variables
    strategy = Strategy(
        Operator(rho, qubits(("A", "B")), hermitian=True),
        Operator(ma, qubits(("A0", "A")), hermitian=True),
        Operator(mb, qubits(("B", "B0")), hermitian=True),
    )
    return OptResult(strategy, best.trajectory, best.score, best.converged, idx)


def optimize_dual(
    score_operator: Operator,
    cfg: SeeSawConfig = SeeSawConfig(),
    initial: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> tuple[_RestartOutcome, int]:
    """Coordinate ascent with swapped constraint roles (middle POVM, sides densities).

    Used by the swapping dual, where the joint measurement element sits in the
    middle slot and the two sources are the side variables.
    """
    return _run_seesaw(score_operator.entries, cfg, (_POVM, _DENSITY, _DENSITY), initial)


# ---------------------------------------------------------------------------
# verdicts


def lu_equivalent_pure(u: KetVector, v: KetVector, tol: float) -> bool:
    """Pure bipartite states are locally unitarily equivalent iff their
    Schmidt coefficient vectors agree."""
    if u.shape.dims != v.shape.dims:
        raise ValueError(f"shape mismatch: {u.shape.dims} vs {v.shape.dims}")
    cu = schmidt(u, u.shape.labels[:1]).coefficients
    cv = schmidt(v, v.shape.labels[:1]).coefficients
    return bool(np.all(np.abs(np.sort(cu)[::-1] - np.sort(cv)[::-1]) <= tol))


def _top_eigvec(op: Operator) -> tuple[float, KetVector]:
    w, v = np.linalg.eigh(op.entries)
    return float(w[-1]), KetVector(v[:, -1], op.shape, "unit")


def certification_report(
    opt: OptResult,
    game: SemiQuantumGame,
    tol: float = 1e-6,
) -> CertificationReport:
    """Check a see-saw result against the certification target.

    The verdict is 'certified' iff all of: score gap within tol * l1; shared
    state pure; both measurements rank one with Schmidt angle pi/4; state
    vector locally unitarily equivalent to the target. Diagnostics list every
    failed check in order, the first entry naming the first failure.
    """
    l1 = game.witness.l1
    gap = l1 / 4.0 - opt.final_score
    diagnostics: list[str] = []

    if gap > tol * l1:
        diagnostics.append(f"score gap {gap:.3e} exceeds {tol * l1:.1e}")

    rho_top, rho_vec = _top_eigvec(opt.strategy.rho)
    if rho_top < 1.0 - tol:
        diagnostics.append(f"state purity: top eigenvalue {rho_top:.8f} < 1 - {tol:g}")

    schmidts = {}
    for name, m in (("mA", opt.strategy.ma), ("mB", opt.strategy.mb)):
        top, vec = _top_eigvec(m)
        tr = float(np.trace(m.entries).real)
        if top < (1.0 - tol) * tr:
            diagnostics.append(
                f"measurement rank ({name}): top eigenvalue {top:.8f} below trace {tr:.8f}"
            )
        form = schmidt(vec, vec.shape.labels[:1])
        schmidts[name] = form
        if abs(form.angle - pi / 4) > tol:
            diagnostics.append(
                f"measurement Schmidt angle ({name}): {form.angle:.8f} vs pi/4"
            )

    rho_schmidt = schmidt(rho_vec, rho_vec.shape.labels[:1])
    target = game.witness.target
    if not lu_equivalent_pure(rho_vec, target.relabel(rho_vec.shape.labels), tol):
        diagnostics.append("state LU equivalence: Schmidt coefficients differ from target")

    verdict = "certified" if not diagnostics else "not_certified"
    return CertificationReport(
        final_score=opt.final_score,
        gap=gap,
        rho_schmidt=rho_schmidt,
        ma_schmidt=schmidts["mA"],
        mb_schmidt=schmidts["mB"],
        target_chi=game.target_chi,
        verdict=verdict,
        diagnostics=tuple(diagnostics),
    )
