"""Command-line surface.

Subcommands: design, certify, swap, corollary, probe, bound. Global flags
--seed, --out, --config, --tol. Exit codes: 0 pass, 1 checked-and-failed
verdict, 2 invalid input, 3 non-convergence. Runs are deterministic for a
fixed seed; reports carry no timestamps, so identical configs give
byte-identical files. SQGAME_THREADS caps internal worker counts.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from math import pi
from pathlib import Path

import numpy as np

from . import serialize
from .certify import (
    SeeSawConfig,
    bound_scan,
    certification_report,
    seesaw_optimize,
)
from .game import SemiQuantumGame
from .oracle import (
    appendixD_scan,
    lemma1_probe,
    lemma2_probe,
    lemma3_check,
    theorem1_probe,
)
from .qlin import KetVector, qubits
from .swap import (
    corollary_check,
    ideal_swap_instance,
    optimize_swap,
    swap_game_operator,
    swap_score,
    werner_source,
    SwapInstance,
)
from .witness import (
    ENSEMBLES,
    NotEntangledError,
    build_certification_witness,
    decompose_witness,
    target_ket,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3

PROBE_NAMES = ("theorem1", "lemma1", "lemma2", "lemma3", "appendixD")


class ConfigError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _take(cfg: dict, key: str, kind, default):
    if key not in cfg:
        return default
    val = cfg.pop(key)
    try:
        return kind(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config field {key!r}: {exc}")


def _reject_unknown(cfg: dict, command: str):
    if cfg:
        raise ConfigError(f"unknown config fields for {command}: {sorted(cfg)}")


def _target_from_config(cfg: dict, args) -> KetVector:
    chi = _take(cfg, "chi", float, None if args.chi is None else float(args.chi))
    amps = cfg.pop("amplitudes", None)
    if amps is not None:
        vec = np.array([complex(re, im) for re, im in amps], dtype=np.complex128)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise ConfigError("target amplitudes are all zero")
        return KetVector(vec / nrm, qubits(("A0", "B0")), "unit")
    if chi is None:
        raise ConfigError("no target: pass --chi or config chi/amplitudes")
    if not 0.0 <= chi <= pi / 4 + 1e-12:
        raise ConfigError(f"chi must lie in [0, pi/4], got {chi}")
    return target_ket(chi)


def _write(path: str | None, text: str, default_name: str) -> Path:
    out = Path(path) if path else Path(default_name)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    return out


def _seesaw_config(cfg: dict, seed: int) -> SeeSawConfig:
    sub = cfg.pop("seesaw", {})
    if not isinstance(sub, dict):
        raise ConfigError("config field 'seesaw' must be an object")
    sub = dict(sub)
    out = SeeSawConfig(
        restarts=_take(sub, "restarts", int, 32),
        max_iters=_take(sub, "max_iters", int, 500),
        tol_score=_take(sub, "tol_score", float, 1e-10),
        mode=_take(sub, "mode", str, "rank_one"),
        seed=_take(sub, "seed", int, seed),
    )
    _reject_unknown(sub, "seesaw")
    return out


def _build_game(target: KetVector, penalty: float, l1: float, ensemble: str) -> SemiQuantumGame:
    from .qlin import schmidt_angle

    witness = build_certification_witness(target, L=penalty, l1=l1)
    if ensemble not in ENSEMBLES:
        raise ConfigError(f"ensemble must be one of {sorted(ENSEMBLES)}, got {ensemble!r}")
    ens = ENSEMBLES[ensemble]()
    table = decompose_witness(witness, ens, ens)
    return SemiQuantumGame(witness, table, schmidt_angle(target.amplitudes))


def cmd_design(args) -> int:
    cfg = _load_config(args.config)
    target = _target_from_config(cfg, args)
    penalty = _take(cfg, "L", float, 100.0)
    l1 = _take(cfg, "l1", float, 1.0)
    ensemble = _take(cfg, "ensemble", str, "tetrahedral")
    _reject_unknown(cfg, "design")
    game = _build_game(target, penalty, l1, ensemble)
    doc = serialize.game_to_json(game)
    meta = {"seed": args.seed, "command": "design"}
    out = _write(args.out, serialize.dumps(doc, meta), "game.json")
    print(f"design: wrote {out} (eigenvalues {[float(x) for x in game.witness.spectrum.eigenvalues]})")
    return EXIT_PASS


def cmd_certify(args) -> int:
    cfg = _load_config(args.config)
    game_path = _take(cfg, "game", str, args.game)
    if game_path is not None:
        game = serialize.game_from_json(serialize.loads(Path(game_path).read_text()))
        for key in ("chi", "amplitudes", "L", "l1", "ensemble"):
            cfg.pop(key, None)
    else:
        target = _target_from_config(cfg, args)
        penalty = _take(cfg, "L", float, 100.0)
        l1 = _take(cfg, "l1", float, 1.0)
        ensemble = _take(cfg, "ensemble", str, "tetrahedral")
        game = _build_game(target, penalty, l1, ensemble)
    ss_cfg = _seesaw_config(cfg, args.seed)
    _reject_unknown(cfg, "certify")

    opt = seesaw_optimize(game, ss_cfg)
    report = certification_report(opt, game, tol=args.tol)
    doc = serialize.certification_report_to_json(report)
    doc["optimization"] = serialize.opt_result_to_json(opt)
    meta = {"seed": ss_cfg.seed, "command": "certify"}
    out = _write(args.out, serialize.dumps(doc, meta), "certify.json")

    traj_path = out.with_name(out.stem + "_trajectory.csv")
    with open(traj_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "score"])
        for i, s in enumerate(opt.score_trajectory):
            w.writerow([i, repr(float(s))])

    print(
        f"certify: verdict={report.verdict} final_score={report.final_score:.12f} "
        f"gap={report.gap:.3e} -> {out}"
    )
    if not opt.converged:
        print(f"certify: no restart converged; best gap {report.gap:.3e}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_PASS if report.certified else EXIT_FAIL


def _swap_target(cfg: dict, args) -> KetVector:
    chi = _take(cfg, "chi", float, None if args.chi is None else float(args.chi))
    if chi is None:
        chi = pi / 4
    return target_ket(chi)


def cmd_swap(args) -> int:
    cfg = _load_config(args.config)
    target = _swap_target(cfg, args)
    penalty = _take(cfg, "l", float, 100.0)
    instance_path = _take(cfg, "instance", str, args.instance)
    optimize = bool(cfg.pop("optimize", False) or args.optimize)
    ss_cfg = _seesaw_config(cfg, args.seed)
    _reject_unknown(cfg, "swap")
    game = swap_game_operator(target, l=penalty)

    if optimize:
        opt = optimize_swap(game, ss_cfg)
        doc = {
            "kind": "swap_optimization",
            "target_chi": float(np.arccos(np.clip(abs(target.amplitudes[0]), 0, 1))),
            "penalty": penalty,
            "best_score": float(opt.final_score),
            "converged": bool(opt.converged),
            "restart_index": int(opt.restart_index),
            "optimization": serialize.opt_result_to_json(opt),
        }
        out = _write(args.out, serialize.dumps(doc, {"seed": ss_cfg.seed, "command": "swap"}), "swap.json")
        print(f"swap: best score {opt.final_score:.12f} -> {out}")
        if not opt.converged:
            return EXIT_NO_CONVERGENCE
        return EXIT_PASS if abs(opt.final_score - 0.25) <= args.tol else EXIT_FAIL

    if args.ideal or instance_path is None:
        inst = ideal_swap_instance()
    else:
        inst = serialize.swap_instance_from_json(serialize.loads(Path(instance_path).read_text()))
    inst.validate()
    s = swap_score(game, inst)
    probabilities = [float(np.trace(m.entries).real) for m in inst.joint_povm]
    doc = {
        "kind": "swap_evaluation",
        "score": float(s),
        "penalty": penalty,
        "ideal_instance": bool(args.ideal or instance_path is None),
        "povm_traces": probabilities,
    }
    out = _write(args.out, serialize.dumps(doc, {"seed": args.seed, "command": "swap"}), "swap.json")
    print(f"swap: score {s:.12f} -> {out}")
    if args.ideal or instance_path is None:
        return EXIT_PASS if abs(s - 0.25) <= args.tol else EXIT_FAIL
    return EXIT_PASS if s <= 0.25 + 1e-9 else EXIT_FAIL


def cmd_corollary(args) -> int:
    cfg = _load_config(args.config)
    instance_path = _take(cfg, "instance", str, args.instance)
    werner = _take(cfg, "werner", float, args.werner)
    tol = _take(cfg, "tol", float, args.tol)
    _reject_unknown(cfg, "corollary")

    if instance_path is not None:
        inst = serialize.swap_instance_from_json(serialize.loads(Path(instance_path).read_text()))
    elif werner is not None:
        base = ideal_swap_instance()
        inst = SwapInstance(
            werner_source(werner, ("A0", "A")),
            werner_source(werner, ("B", "B0")),
            base.joint_povm,
        )
    else:
        inst = ideal_swap_instance()
    report = corollary_check(inst, tol=tol)
    doc = serialize.corollary_report_to_json(report)
    out = _write(args.out, serialize.dumps(doc, {"seed": args.seed, "command": "corollary"}), "corollary.json")
    print(f"corollary: {'pass' if report.passed else 'fail'} -> {out}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_probe(args) -> int:
    cfg = _load_config(args.config)
    name = args.name
    n = _take(cfg, "n", int, args.n)
    seed = _take(cfg, "seed", int, args.seed)
    if name == "theorem1":
        side = _take(cfg, "side", str, "A")
        _reject_unknown(cfg, "probe")
        report = theorem1_probe(n, seed, side=side)
        doc = serialize.probe_report_to_json(report)
    elif name == "lemma1":
        min_mix = _take(cfg, "min_mix", float, 0.1)
        min_angle = _take(cfg, "min_angle", float, pi / 8)
        _reject_unknown(cfg, "probe")
        report = lemma1_probe(n, seed, min_mix=min_mix, min_angle=min_angle)
        doc = serialize.probe_report_to_json(report)
    elif name == "lemma2":
        min_angle = _take(cfg, "min_angle", float, pi / 8)
        side = _take(cfg, "side", str, "A")
        _reject_unknown(cfg, "probe")
        report = lemma2_probe(n, seed, min_angle=min_angle, side=side)
        doc = serialize.probe_report_to_json(report)
    elif name == "lemma3":
        dims = cfg.pop("dims", [[2, 2], [2, 3], [3, 3], [4, 4]])
        _reject_unknown(cfg, "probe")
        report = lemma3_check(n, tuple(tuple(d) for d in dims), seed)
        doc = serialize.probe_report_to_json(report)
    elif name == "appendixD":
        theta = _take(cfg, "theta", float, pi / 3 if args.theta is None else args.theta)
        gamma = _take(cfg, "gamma", float, pi / 3 if args.gamma is None else args.gamma)
        grid_n = _take(cfg, "grid", int, args.grid or 400)
        _reject_unknown(cfg, "probe")
        report = appendixD_scan(theta, gamma, grid_n)
        doc = serialize.appendix_d_report_to_json(report)
    else:
        print(f"probe: unknown probe name {name!r}; valid: {PROBE_NAMES}", file=sys.stderr)
        return EXIT_INVALID
    out = _write(args.out, serialize.dumps(doc, {"seed": seed, "command": f"probe:{name}"}),
                 f"probe_{name}.json")
    passed = doc["passed"]
    print(f"probe {name}: {'pass' if passed else 'fail'} -> {out}")
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_bound(args) -> int:
    cfg = _load_config(args.config)
    chi = _take(cfg, "chi", float, pi / 4 if args.chi is None else float(args.chi))
    grid_n = _take(cfg, "grid", int, args.grid or 400)
    _reject_unknown(cfg, "bound")
    scan = bound_scan(chi, grid_n)
    out = Path(args.out) if args.out else Path("bound.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "beta", "bound"])
        for a, b, v in scan.rows():
            w.writerow([repr(a), repr(b), repr(v)])
    print(
        f"bound: chi={chi:.6f} grid={grid_n} max={scan.max_value:.12f} "
        f"argmax=({scan.argmax[0]:.6f}, {scan.argmax[1]:.6f}) -> {out}"
    )
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqgame", description=__doc__)
    p.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    p.add_argument("--out", type=str, default=None, help="output path")
    p.add_argument("--config", type=str, default=None, help="JSON config file")
    p.add_argument("--tol", type=float, default=1e-6, help="verdict tolerance (default 1e-6)")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="build a certification game from a target state")
    d.add_argument("--chi", type=float, default=None, help="target Schmidt angle")
    d.set_defaults(func=cmd_design)

    c = sub.add_parser("certify", help="optimize a game and certify the optimum")
    c.add_argument("--chi", type=float, default=None)
    c.add_argument("--game", type=str, default=None, help="game JSON from the design command")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("swap", help="evaluate or optimize the swapping dual game")
    s.add_argument("--chi", type=float, default=None, help="target angle (default pi/4)")
    s.add_argument("--instance", type=str, default=None, help="swap instance JSON")
    s.add_argument("--ideal", action="store_true", help="use the ideal Bell instance")
    s.add_argument("--optimize", action="store_true", help="run the dual coordinate ascent")
    s.set_defaults(func=cmd_swap)

    co = sub.add_parser("corollary", help="complete-measurement check on a swap instance")
    co.add_argument("--instance", type=str, default=None)
    co.add_argument("--ideal", action="store_true")
    co.add_argument("--werner", type=float, default=None, help="replace sources by this visibility")
    co.set_defaults(func=cmd_corollary)

    pr = sub.add_parser("probe", help="run a named sampling probe")
    pr.add_argument("name", choices=PROBE_NAMES, metavar="name",
                    help=f"one of {PROBE_NAMES}")
    pr.add_argument("--n", type=int, default=1000, help="sample count")
    pr.add_argument("--theta", type=float, default=None)
    pr.add_argument("--gamma", type=float, default=None)
    pr.add_argument("--grid", type=int, default=None)
    pr.set_defaults(func=cmd_probe)

    b = sub.add_parser("bound", help="scan the closed-form score ceiling on a grid")
    b.add_argument("--chi", type=float, default=None)
    b.add_argument("--grid", type=int, default=None)
    b.set_defaults(func=cmd_bound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad input, which matches the contract
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (ConfigError, NotEntangledError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
