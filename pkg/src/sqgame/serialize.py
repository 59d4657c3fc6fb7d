"""JSON encoding for every structured artifact the CLI reads or writes.

Complex scalars become [re, im] pairs; matrices are row-major nested lists
with explicit shape metadata. Documents are dumped with sorted keys and no
timestamps, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .certify import CertificationReport, OptResult
from .game import EffectiveElement, SemiQuantumGame, Strategy
from .oracle import AppendixDReport, ProbeReport
from .qlin import KetVector, Operator, SubsystemShape
from .swap import CorollaryReport, SwapInstance
from .witness import ENSEMBLES, InputEnsemble, ScoreTable, Witness
from . import qlin

FORMAT_VERSION = 1


def _c(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix(m: np.ndarray) -> list:
    return [[_c(z) for z in row] for row in np.asarray(m)]


def _vector(v: np.ndarray) -> list:
    return [_c(z) for z in np.asarray(v)]


def _from_matrix(data: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=np.complex128)


def _from_vector(data: list) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=np.complex128)


def shape_to_json(s: SubsystemShape) -> dict:
    return {"dims": list(s.dims), "labels": list(s.labels)}


def shape_from_json(d: dict) -> SubsystemShape:
    return SubsystemShape(tuple(d["dims"]), tuple(d["labels"]))


def operator_to_json(op: Operator) -> dict:
    return {
        "shape": shape_to_json(op.shape),
        "hermitian": bool(op.hermitian),
        "entries": _matrix(op.entries),
    }


def operator_from_json(d: dict) -> Operator:
    return Operator(_from_matrix(d["entries"]), shape_from_json(d["shape"]), bool(d["hermitian"]))


def ket_to_json(k: KetVector) -> dict:
    return {
        "shape": shape_to_json(k.shape),
        "norm_kind": k.norm_kind,
        "amplitudes": _vector(k.amplitudes),
    }


def ket_from_json(d: dict) -> KetVector:
    return KetVector(_from_vector(d["amplitudes"]), shape_from_json(d["shape"]), d["norm_kind"])


def witness_to_json(w: Witness) -> dict:
    return {
        "operator": operator_to_json(w.operator),
        "eigenvalues": [float(x) for x in w.spectrum.eigenvalues],
        "eigenvectors": [ket_to_json(v) for v in w.spectrum.eigenvectors],
        "target": ket_to_json(w.target),
        "l_negative": float(w.l_negative),
        "warnings": list(w.warnings),
    }


def witness_from_json(d: dict) -> Witness:
    return Witness(
        operator=operator_from_json(d["operator"]),
        spectrum=qlin.Spectrum(
            np.array(d["eigenvalues"], dtype=float),
            tuple(ket_from_json(v) for v in d["eigenvectors"]),
        ),
        target=ket_from_json(d["target"]),
        l_negative=float(d["l_negative"]),
        warnings=tuple(d["warnings"]),
    )


def score_table_to_json(t: ScoreTable) -> dict:
    return {
        "beta": [[float(x) for x in row] for row in t.beta],
        "ensemble_a": t.ensembles[0].name,
        "ensemble_b": t.ensembles[1].name,
        "residual": float(t.residual),
    }


def score_table_from_json(d: dict) -> ScoreTable:
    ens_a = ENSEMBLES[d["ensemble_a"]]()
    ens_b = ENSEMBLES[d["ensemble_b"]]()
    return ScoreTable(np.array(d["beta"], dtype=float), (ens_a, ens_b), float(d["residual"]))


def game_to_json(g: SemiQuantumGame) -> dict:
    return {
        "kind": "certification_game",
        "format_version": FORMAT_VERSION,
        "witness": witness_to_json(g.witness),
        "score_table": score_table_to_json(g.scores),
        "target_chi": float(g.target_chi),
    }


def game_from_json(d: dict) -> SemiQuantumGame:
    if d.get("kind") != "certification_game":
        raise ValueError(f"not a certification game document: kind={d.get('kind')!r}")
    return SemiQuantumGame(
        witness_from_json(d["witness"]),
        score_table_from_json(d["score_table"]),
        float(d["target_chi"]),
    )


def strategy_to_json(s: Strategy) -> dict:
    return {
        "rho": operator_to_json(s.rho),
        "ma": operator_to_json(s.ma),
        "mb": operator_to_json(s.mb),
    }


def strategy_from_json(d: dict) -> Strategy:
    return Strategy(
        operator_from_json(d["rho"]), operator_from_json(d["ma"]), operator_from_json(d["mb"])
    )


def effective_element_to_json(e: EffectiveElement) -> dict:
    return {"operator": operator_to_json(e.operator), "weight": float(e.weight)}


def opt_result_to_json(r: OptResult) -> dict:
    return {
        "strategy": strategy_to_json(r.strategy),
        "score_trajectory": [float(x) for x in r.score_trajectory],
        "final_score": float(r.final_score),
        "converged": bool(r.converged),
        "restart_index": int(r.restart_index),
    }


def _schmidt_to_json(form) -> dict:
    return {
        "coefficients": [float(x) for x in form.coefficients],
        "angle": float(form.angle),
    }


def certification_report_to_json(r: CertificationReport) -> dict:
    return {
        "kind": "certification_report",
        "format_version": FORMAT_VERSION,
        "final_score": float(r.final_score),
        "gap": float(r.gap),
        "rho_schmidt": _schmidt_to_json(r.rho_schmidt),
        "ma_schmidt": _schmidt_to_json(r.ma_schmidt),
        "mb_schmidt": _schmidt_to_json(r.mb_schmidt),
        "target_chi": float(r.target_chi),
        "verdict": r.verdict,
        "diagnostics": list(r.diagnostics),
    }


def swap_instance_to_json(inst: SwapInstance) -> dict:
    return {
        "kind": "swap_instance",
        "format_version": FORMAT_VERSION,
        "rho_a0a": operator_to_json(inst.rho_a0a),
        "rho_bb0": operator_to_json(inst.rho_bb0),
        "joint_povm": [operator_to_json(m) for m in inst.joint_povm],
    }


def swap_instance_from_json(d: dict) -> SwapInstance:
    if d.get("kind") != "swap_instance":
        raise ValueError(f"not a swap instance document: kind={d.get('kind')!r}")
    return SwapInstance(
        operator_from_json(d["rho_a0a"]),
        operator_from_json(d["rho_bb0"]),
        tuple(operator_from_json(m) for m in d["joint_povm"]),
    )


def probe_report_to_json(r: ProbeReport) -> dict:
    return {
        "kind": "probe_report",
        "format_version": FORMAT_VERSION,
        "n_samples": int(r.n_samples),
        "violations": int(r.violations),
        "worst_value": float(r.worst_value),
        "worst_seed": int(r.worst_seed),
        "notes": r.notes,
        "passed": r.passed,
    }


def appendix_d_report_to_json(r: AppendixDReport) -> dict:
    return {
        "kind": "bound_function_scan",
        "format_version": FORMAT_VERSION,
        "theta": float(r.theta),
        "gamma": float(r.gamma),
        "coefficients": {k: float(v) for k, v in zip("abcd", r.coefficients)},
        "grid_max": float(r.grid_max),
        "x_at_grid_max": float(r.x_at_grid_max),
        "candidates": {k: float(v) for k, v in r.candidates.items()},
        "grid_tolerance": float(r.grid_tolerance),
        "passed": r.passed,
    }


def corollary_report_to_json(r: CorollaryReport) -> dict:
    return {
        "kind": "corollary_report",
        "format_version": FORMAT_VERSION,
        "passed": bool(r.passed),
        "clauses": {k: (None if v is None else bool(v)) for k, v in r.clauses.items()},
        "outcomes": [
            {
                "index": o.index,
                "probability": float(o.probability),
                "top_eigenvalue": float(o.top_eigenvalue),
                "schmidt_coefficients": [float(x) for x in o.schmidt_coefficients],
                "bell_match": o.bell_match,
                "bell_distance": None if o.bell_distance is None else float(o.bell_distance),
                "messages": list(o.messages),
            }
            for o in r.outcomes
        ],
        "verdict": r.verdict,
    }


def dumps(doc: Any, meta: dict | None = None) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    payload = dict(doc)
    if meta is not None:
        payload["meta"] = meta
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)
