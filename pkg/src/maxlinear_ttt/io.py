"""JSON and CSV formats used by the command line.

Graph:   {"nodes": [1, 2, 3], "edges": [{"from": 1, "to": 2}, ...]}
Weights: {"weights": [{"from": 1, "to": 2, "c": 0.5}, ...]}
Laws and measures: CSV with one column per node label, then ``mass``.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Mapping, TextIO

import numpy as np

from .graph import Edge, TttGraph, build_ttt
from .laws import DiscreteLaw

MASS_COLUMN = "mass"


def fmt(x: float) -> str:
    """17 significant digits: lossless for doubles."""
    return f"{float(x):.17g}"


def _load(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def graph_from_dict(data: Mapping) -> TttGraph:
    edges = [(int(e["from"]), int(e["to"])) for e in data.get("edges", [])]
    return build_ttt([int(v) for v in data["nodes"]], edges)


def graph_to_dict(g: TttGraph) -> dict:
    return {"nodes": list(g.nodes), "edges": [{"from": a, "to": b} for a, b in sorted(g.edges)]}


def read_graph(path: str | Path) -> TttGraph:
    return graph_from_dict(_load(path))


def weights_from_dict(data: Mapping) -> dict[Edge, float]:
    return {(int(w["from"]), int(w["to"])): float(w["c"]) for w in data["weights"]}


def weights_to_dict(theta: Mapping[Edge, float]) -> dict:
    return {"weights": [{"from": a, "to": b, "c": float(c)} for (a, b), c in sorted(theta.items())]}


def read_weights(path: str | Path) -> dict[Edge, float]:
    return weights_from_dict(_load(path))


def write_json(obj, fh: TextIO) -> None:
    json.dump(obj, fh, indent=2, sort_keys=False)
    fh.write("\n")


def law_to_csv(law: DiscreteLaw, fh: TextIO, header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow([str(l) for l in law.labels] + [MASS_COLUMN])
    for atom, m in zip(law.atoms, law.masses):
        w.writerow([fmt(x) for x in atom] + [fmt(m)])


def law_to_csv_string(law: DiscreteLaw) -> str:
    buf = io.StringIO()
    law_to_csv(law, buf)
    return buf.getvalue()


def law_to_json(law: DiscreteLaw) -> dict:
    return {
        "labels": list(law.labels),
        "atoms": [{"atom": [float(x) for x in a], "mass": float(m)} for a, m in zip(law.atoms, law.masses)],
    }


def read_law_csv(path: str | Path) -> DiscreteLaw:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    if not rows or rows[0][-1] != MASS_COLUMN:
        raise ValueError(f"{path}: expected a header ending in '{MASS_COLUMN}'")
    labels = tuple(int(x) for x in rows[0][:-1])
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float).reshape(-1, len(labels) + 1)
    return DiscreteLaw(labels, data[:, :-1], data[:, -1])
