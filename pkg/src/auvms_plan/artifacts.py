"""Delimited-text and JSON exports of plans, trees and trajectories."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .kinematics import eef_positions

PATH_HEADER = "# auvms-plan path v1"
TREE_HEADER = "# auvms-plan tree v1"
TRAJ_HEADER = "# auvms-plan trajectory v1"
RESULT_VERSION = "auvms-plan result v1"

CONFIG_COLS = ["x", "y", "z", "yaw", "q1", "q2", "q3", "q4"]
EEF_COLS = ["eef_x", "eef_y", "eef_z"]


def _fmt(v):
    return repr(float(v))


def _write(path, header, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    return path


def _read(path, header):
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != header:
            raise ValueError(f"{path}: expected header {header!r}, got {first!r}")
        reader = csv.DictReader(fh)
        return list(reader)


def write_path(path, configs, dh):
    configs = np.atleast_2d(np.asarray(configs, dtype=float))
    eef = eef_positions(configs, dh) if len(configs) else np.empty((0, 3))
    rows = [[i] + [_fmt(v) for v in q] + [_fmt(v) for v in p] for i, (q, p) in enumerate(zip(configs, eef))]
    return _write(path, PATH_HEADER, ["index"] + CONFIG_COLS + EEF_COLS, rows)


def read_path(path) -> np.ndarray:
    rows = _read(path, PATH_HEADER)
    return np.array([[float(r[c]) for c in CONFIG_COLS] for r in rows]).reshape(-1, 8)


def write_tree(path, tree):
    """One row per edge: child and parent indices followed by both configurations."""
    nodes = tree.nodes
    cols = ["child", "parent"] + [f"child_{c}" for c in CONFIG_COLS] + [f"parent_{c}" for c in CONFIG_COLS]
    rows = [
        [c, p] + [_fmt(v) for v in nodes[c]] + [_fmt(v) for v in nodes[p]]
        for c, p in tree.edges()
    ]
    return _write(path, TREE_HEADER, cols, rows)


def read_tree(path):
    """List of ``(child, parent, child_config, parent_config)``."""
    out = []
    for r in _read(path, TREE_HEADER):
        out.append((
            int(r["child"]), int(r["parent"]),
            np.array([float(r[f"child_{c}"]) for c in CONFIG_COLS]),
            np.array([float(r[f"parent_{c}"]) for c in CONFIG_COLS]),
        ))
    return out


def write_trajectory(path, table):
    rows = [[_fmt(v) for v in row] for row in table]
    return _write(path, TRAJ_HEADER, ["t"] + CONFIG_COLS + EEF_COLS, rows)


def read_trajectory(path) -> np.ndarray:
    rows = _read(path, TRAJ_HEADER)
    cols = ["t"] + CONFIG_COLS + EEF_COLS
    return np.array([[float(r[c]) for c in cols] for r in rows]).reshape(-1, len(cols))


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def path_length(configs, dh) -> float:
    """Arm-tip polyline length through the given configurations."""
    configs = np.atleast_2d(np.asarray(configs, dtype=float))
    if len(configs) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(eef_positions(configs, dh), axis=0), axis=1).sum())
