"""File formats: OBJ meshes and polylines, curve CSV, JSON scene configs."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .expr import evaluate, is_constant, parse_expression
from .loxodrome import Branch, Family, LoxodromeSpec
from .numerics import IntegratorConfig, Polyline
from .surface import TwistedSurface, surface_from_record

__all__ = [
    "SceneConfig", "load_scene", "spec_from_record", "parse_number",
    "export_surface_mesh", "export_curve", "read_curve_csv", "format_number",
]

CSV_HEADER = ("u", "v", "x", "y", "z", "s")


def format_number(value: float) -> str:
    """Nine significant digits, without a negative zero."""
    text = f"{float(value):.9g}"
    return "0" if text == "-0" else text


def parse_number(value) -> float:
    """A float from a number or a constant expression such as ``"pi/6"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        e = parse_expression(value)
        if not is_constant(e):
            raise ValidationError(f"{value!r} must not depend on y")
        return evaluate(e, 0.0)
    raise ValidationError(f"expected a number, got {value!r}")


def spec_from_record(record: dict, config: IntegratorConfig | None = None) -> LoxodromeSpec:
    """``{"family", "angle", "start": [x0, y0], "span": [lo, hi], "branch"?}``."""
    try:
        return LoxodromeSpec(
            family=Family(record["family"]),
            angle=parse_number(record["angle"]),
            start=tuple(parse_number(t) for t in record["start"]),
            span=tuple(parse_number(t) for t in record["span"]),
            branch=Branch(record.get("branch", "minus")),
            config=config,
        )
    except KeyError as exc:
        raise ValidationError(f"loxodrome record is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad loxodrome record: {exc}") from None


@dataclass
class SceneConfig:
    surface: TwistedSurface
    loxodromes: list = field(default_factory=list)
    nx: int = 65
    ny: int = 65
    mesh_path: str | None = None
    curve_paths: list = field(default_factory=list)
    curve_format: str = "csv"

    def __post_init__(self):
        if int(self.nx) < 2 or int(self.ny) < 2:
            raise ValidationError("mesh resolution must be at least 2 x 2")
        if self.curve_format not in ("csv", "obj"):
            raise ValidationError(f"unknown curve format {self.curve_format!r}")


def _resolve(path, base):
    if path is None:
        return None
    p = Path(path)
    return str(p if p.is_absolute() else Path(base) / p)


def load_scene(path, config: IntegratorConfig | None = None) -> SceneConfig:
    """Read a JSON scene; relative output paths resolve against its folder.

    Layout::

        {"surface": {"a": 0, "b": "1/2", "f": "y", "g": "0",
                     "y_domain": [0.01, 25], "x_domain": [-6.3, 6.3]},
         "loxodromes": [{"family": "meridian", "angle": "pi/6",
                         "start": [0, 1], "span": ["-2*pi", "2*pi"]}],
         "export": {"nx": 65, "ny": 65, "mesh": "surface.obj",
                    "curves": ["lox0.csv"], "curve_format": "csv"}}
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read scene {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scene {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or "surface" not in data:
        raise ValidationError("scene must be an object with a 'surface' record")
    record = dict(data["surface"])
    for key in ("a", "b"):
        if key in record:
            record[key] = parse_number(record[key])
    for key in ("y_domain", "x_domain"):
        if key in record:
            record[key] = [parse_number(t) for t in record[key]]
    surface = surface_from_record(record)
    specs = [spec_from_record(r, config) for r in data.get("loxodromes", [])]
    export = data.get("export", {})
    base = os.path.dirname(os.path.abspath(path))
    curves = [_resolve(p, base) for p in export.get("curves", [])]
    if curves and len(curves) != len(specs):
        raise ValidationError("export.curves must name one file per loxodrome")
    return SceneConfig(surface, specs, int(export.get("nx", 65)), int(export.get("ny", 65)),
                       _resolve(export.get("mesh"), base), curves,
                       export.get("curve_format", "csv"))


def _open_out(path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from None


def export_surface_mesh(surface: TwistedSurface, nx: int, ny: int, path) -> tuple:
    """Write the (nx x ny) parameter grid as a triangulated Wavefront OBJ.

    Vertices run row by row with x varying fastest. Each grid cell gives two
    triangles, wound counter-clockwise about ``T_x x T_y``. Returns
    ``(n_vertices, n_faces)``.
    """
    nx, ny = int(nx), int(ny)
    if nx < 2 or ny < 2:
        raise ValidationError("mesh resolution must be at least 2 x 2")
    xs = np.linspace(*surface.x_domain, nx)
    ys = np.linspace(*surface.y_domain, ny)
    lines = [f"# twisted surface a={format_number(surface.a)} b={format_number(surface.b)} "
             f"grid {nx}x{ny}"]
    for y in ys:
        for x in xs:
            p = surface.point(float(x), float(y))
            lines.append("v " + " ".join(format_number(c) for c in p))
    faces = 0
    for j in range(ny - 1):
        for i in range(nx - 1):
            k00 = j * nx + i + 1
            k10, k01, k11 = k00 + 1, k00 + nx, k00 + nx + 1
            lines.append(f"f {k00} {k10} {k11}")
            lines.append(f"f {k00} {k11} {k01}")
            faces += 2
    with _open_out(path) as fh:
        fh.write("\n".join(lines) + "\n")
    return nx * ny, faces


def export_curve(curve: Polyline, path, fmt: str = "csv") -> int:
    """Write a polyline as CSV (``u,v,x,y,z,s``) or an OBJ ``v``/``l`` record."""
    n = len(curve)
    if n == 0:
        raise ValidationError("cannot export an empty polyline")
    fmt = fmt.lower()
    if fmt == "csv":
        with _open_out(path) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for i in range(n):
                row = (curve.u[i], curve.v[i], *curve.points[i], curve.s[i])
                writer.writerow([format_number(c) for c in row])
    elif fmt == "obj":
        with _open_out(path) as fh:
            fh.write(f"# {curve.family.value} loxodrome, {n} samples\n")
            for p in curve.points:
                fh.write("v " + " ".join(format_number(c) for c in p) + "\n")
            fh.write("l " + " ".join(str(i + 1) for i in range(n)) + "\n")
    else:
        raise ValidationError(f"unknown curve format {fmt!r}")
    return n


def read_curve_csv(path, family=Family.MERIDIAN) -> Polyline:
    """Load a curve written by :func:`export_curve` (no direction field attached)."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            rows = [[float(c) for c in row] for row in reader if row]
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    except (StopIteration, ValueError):
        raise ValidationError(f"{path} is not a curve CSV") from None
    if header != CSV_HEADER:
        raise ValidationError(f"{path}: expected header {','.join(CSV_HEADER)}")
    if any(len(row) != len(CSV_HEADER) for row in rows):
        raise ValidationError(f"{path}: every row needs {len(CSV_HEADER)} columns")
    data = np.array(rows, float).reshape(-1, 6)
    if not np.all(np.isfinite(data)):
        raise ValidationError(f"{path} contains non-finite values")
    return Polyline(Family(family), data[:, 0], data[:, 1], data[:, 2:5], data[:, 5])
