"""File formats for recorded runs.

Three artifacts per run: a JSON-lines trajectory (one object per accepted
move, fixed keys), a JSON summary (final state, termination, assumption
statistics, config echo), and a plottable CSV with columns k, u, f, b.
Serialization is deterministic: identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .core import MoveRecord, StatePoint, Trajectory
from .solvers import SolveReport

TRAJECTORY_NAME = "trajectory.jsonl"
SUMMARY_NAME = "summary.json"
CSV_NAME = "trajectory.csv"

_MOVE_KEYS = ("k", "from", "to", "f", "e", "b", "c", "u_from", "u_to", "delta")


def move_to_dict(move: MoveRecord) -> dict:
    return {
        "k": move.step_index,
        "from": list(move.from_point.coords),
        "to": list(move.to_point.coords),
        "f": move.f_value,
        "e": move.e_value,
        "b": move.b_value,
        "c": move.c_value,
        "u_from": move.u_from,
        "u_to": move.u_to,
        "delta": move.threshold_at_move,
    }


def write_trajectory_jsonl(path, trajectory: Trajectory) -> None:
    with open(path, "w") as fh:
        for move in trajectory.moves:
            fh.write(json.dumps(move_to_dict(move)) + "\n")


def read_trajectory_jsonl(path) -> list[MoveRecord]:
    moves = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            extra = set(rec) - set(_MOVE_KEYS)
            if extra:
                raise ValueError(f"unexpected trajectory keys {sorted(extra)}")
            moves.append(MoveRecord(
                step_index=rec["k"],
                from_point=StatePoint(tuple(rec["from"])),
                to_point=StatePoint(tuple(rec["to"])),
                f_value=rec["f"],
                e_value=rec["e"],
                b_value=rec["b"],
                c_value=rec["c"],
                u_from=rec["u_from"],
                u_to=rec["u_to"],
                threshold_at_move=rec["delta"],
            ))
    return moves


def trajectory_from_moves(moves: list[MoveRecord],
                          initial: StatePoint | None = None) -> Trajectory:
    """Rebuild a Trajectory good enough for audits from saved moves."""
    if initial is None:
        if not moves:
            raise ValueError("cannot infer the initial state of an empty run")
        initial = moves[0].from_point
    trajectory = Trajectory(initial=initial)
    trajectory.moves.extend(moves)
    return trajectory


def write_trajectory_csv(path, trajectory: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "u", "f", "b"])
        for move in trajectory.moves:
            writer.writerow([move.step_index, repr(move.u_to),
                             repr(move.f_value), repr(move.b_value)])


def build_summary(report: SolveReport, config: dict) -> dict:
    trajectory = report.trajectory
    return {
        "final_state": list(report.final_state.coords),
        "final_threshold": report.final_threshold,
        "termination": trajectory.termination.value,
        "residual_estimate": report.residual_estimate,
        "moves": len(trajectory.moves),
        "evaluations_used": report.evaluations_used,
        "rng_seed": report.rng_seed,
        "stationary_points": [
            {"level": sp.level, "state": list(sp.point.coords),
             "delta": sp.threshold}
            for sp in trajectory.stationary_points
        ],
        "assumption_report": report.assumption_report.to_dict(),
        "config": config,
    }


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")


def read_summary(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_run_files(out_dir, report: SolveReport, config: dict) -> dict:
    """Write the three run artifacts into out_dir; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "trajectory": out / TRAJECTORY_NAME,
        "summary": out / SUMMARY_NAME,
        "csv": out / CSV_NAME,
    }
    write_trajectory_jsonl(paths["trajectory"], report.trajectory)
    write_summary(paths["summary"], build_summary(report, config))
    write_trajectory_csv(paths["csv"], report.trajectory)
    return paths
