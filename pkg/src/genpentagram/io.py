"""JSON and CSV readers and writers for polygons, schemas and reports."""

import csv
import json
from pathlib import Path

import numpy as np

from .maps import IndexSchema
from .projective import LiftedPolygon


class InputError(ValueError):
    """A file is missing or does not follow the expected format."""


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def write_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2, default=_default) + "\n")


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return str(obj)


def polygon_to_json(P):
    return {"dim": P.dim, "period": P.period, "vertices": P.vertices.tolist(),
            "monodromy": P.monodromy.tolist(), "normalized": bool(P.normalized)}


def polygon_from_json(data):
    """Polygon from {"vertices", "monodromy"?, "normalized"?} or {"affine_vertices"}."""
    try:
        if "affine_vertices" in data:
            P = LiftedPolygon.from_affine(data["affine_vertices"], data.get("monodromy"))
        else:
            P = LiftedPolygon(np.asarray(data["vertices"], float), data.get("monodromy"),
                              bool(data.get("normalized", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed polygon: {exc}") from None
    if "dim" in data and int(data["dim"]) != P.dim:
        raise InputError(f"polygon declares dim {data['dim']} but vertices have dim {P.dim}")
    if "period" in data and int(data["period"]) != P.period:
        raise InputError(f"polygon declares period {data['period']} but has {P.period} vertices")
    return P


def schema_from_json(data):
    return IndexSchema.from_json(data)
