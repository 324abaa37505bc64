"""JSON set specifications: schema validation and construction."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from . import axisym
from . import graph_geometry as gg
from . import sharp_family as sf
from .harmonics import synthesize
from .sphere_core import ScalarField, make_grid

_NUM = {"type": "number"}
_NUMS = {"type": "array", "items": _NUM, "minItems": 3}
_GRID = {
    "n": {"type": "integer", "minimum": 1, "maximum": 8},
    "mode": {"enum": ["full", "axisym"]},
    "resolution": {"type": "integer", "minimum": 8, "maximum": 1024},
    "band_limit": {"type": "integer", "minimum": 1, "maximum": 1023},
    "margin": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
}
_CURVE = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["type", "radius"],
         "properties": {"type": {"const": "circle"}, "radius": {"type": "number", "exclusiveMinimum": 0},
                        "center": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}},
        {"type": "object", "additionalProperties": False, "required": ["type", "x", "y"],
         "properties": {"type": {"enum": ["fourier", "polygon"]}, "x": _NUMS, "y": _NUMS}},
    ]
}


def _kind(name, required, extra, grid=True):
    props = {"kind": {"const": name}}
    if grid:
        props.update(_GRID)
    props.update(extra)
    return {"type": "object", "additionalProperties": False, "required": ["kind", *required],
            "properties": props}


SET_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "oneOf": [
        _kind("constant", ["n", "t"], {"t": {"type": "number", "exclusiveMinimum": -0.9}}),
        _kind("harmonic", ["n", "bands"], {"bands": {"type": "array", "minItems": 1, "items": {
            "type": "object", "additionalProperties": False, "required": ["degree", "coeff"],
            "properties": {"degree": {"type": "integer", "minimum": 0}, "coeff": _NUM,
                           "order": {"oneOf": [{"const": "zonal"}, {"type": "integer"}]},
                           "axis": {"type": "integer", "minimum": 1}}}}}),
        _kind("samples", ["n", "values"], {"values": {"type": "array", "items": _NUM, "minItems": 8}}),
        _kind("profile", ["n"], {"name": {"type": "string"}, "r": _NUMS, "z": _NUMS}),
        _kind("sharp_family", ["n", "r0", "sigma", "t"], {
            "K": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "auto"}]},
            "r0": {"type": "number", "exclusiveMinimum": 0}, "sigma": {"type": "number", "exclusiveMinimum": 0},
            "t": {"type": "number", "exclusiveMinimum": 0}}),
        _kind("planar", ["outer"], {"outer": _CURVE, "holes": {"type": "array", "items": _CURVE}}, grid=False),
        _kind("dimple", ["n", "depth"], {"depth": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.9},
                                          "width": {"type": "number", "exclusiveMinimum": 0}}),
    ],
}


class SpecError(ValueError):
    """Malformed set specification (schema or cross-field check)."""


def load_spec(text_or_path: str) -> dict:
    """Inline JSON (starting with ``{``) or a path to a JSON file."""
    text = text_or_path.strip()
    if not text.startswith("{"):
        text = Path(text_or_path).read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"set spec is not valid JSON: {exc}") from exc
    validate(spec)
    return spec


def validate(spec: dict):
    if not isinstance(spec, dict):
        raise SpecError("set spec must be a JSON object")
    branches = {b["properties"]["kind"]["const"]: b for b in SET_SCHEMA["oneOf"]}
    kind = spec.get("kind")
    if kind not in branches:
        raise SpecError(f"unknown set kind {kind!r}; choose from {sorted(branches)}")
    try:
        jsonschema.validate(spec, branches[kind])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "spec"
        raise SpecError(f"set spec rejected by schema at {where}: {exc.message}") from exc
    if spec.get("kind") == "profile" and ("name" in spec) == ("r" in spec or "z" in spec):
        raise SpecError("profile specs need either a registry name or r/z samples")
    if spec.get("kind") == "profile" and "r" in spec and len(spec["r"]) != len(spec.get("z", [])):
        raise SpecError("profile samples r and z must have equal length")


def grid_config(spec: dict, resolution: int | None = None, band_limit: int | None = None) -> dict:
    n = spec["n"]
    zonal = spec["kind"] in ("dimple", "sharp_family") and n >= 2
    mode = spec.get("mode", "axisym" if zonal or n > 2 else "full")
    return {"n": n, "mode": mode, "resolution": resolution or spec.get("resolution"),
            "band_limit": band_limit or spec.get("band_limit")}


def build_grid(cfg: dict):
    return make_grid(cfg["n"], cfg["resolution"], cfg["mode"], cfg["band_limit"])


def build_graph(spec: dict, resolution: int | None = None, band_limit: int | None = None) -> gg.NormalGraphSet:
    """Normal-graph set for the grid-based kinds."""
    kind = spec["kind"]
    if kind not in ("constant", "harmonic", "samples", "dimple", "sharp_family"):
        raise SpecError(f"kind {kind!r} does not describe a normal graph")
    cfg = grid_config(spec, resolution, band_limit)
    if kind == "sharp_family":
        cfg["mode"] = "axisym"
    grid = build_grid(cfg)
    margin = spec.get("margin")
    if kind == "constant":
        return gg.build_set(ScalarField.constant(grid, spec["t"]), margin)
    if kind == "harmonic":
        return gg.build_set(synthesize(spec["bands"], grid), margin)
    if kind == "samples":
        values = np.asarray(spec["values"], dtype=float)
        if values.size != grid.size:
            raise SpecError(f"samples hold {values.size} values but the grid has {grid.size} nodes")
        return gg.build_set(ScalarField.from_values(grid, values), margin)
    if kind == "dimple":
        from .obstacle import dimple_set
        return dimple_set(grid, spec["depth"], spec.get("width", 0.3))
    return gg.build_set(build_sharp(spec).to_graph(grid), margin)


def build_sharp(spec: dict, samples: int = 10000) -> sf.SharpFamilySet:
    K = spec.get("K", "auto")
    if K == "auto":
        K, _ = sf.auto_K(spec["n"], spec["r0"], spec["sigma"], spec["t"], samples=samples)
    return sf.build_set(sf.SharpParams(spec["n"], float(K), spec["r0"], spec["sigma"], spec["t"]), samples=samples)


def build_profile(spec: dict) -> axisym.AxisymProfile:
    if spec["kind"] != "profile":
        raise SpecError("expected a profile spec")
    if "name" in spec:
        return axisym.registry_profile(spec["n"], spec["name"])
    return axisym.sampled_profile(spec["n"], np.asarray(spec["r"]), np.asarray(spec["z"]))


def _curve(c: dict) -> axisym.ClosedCurve:
    if c["type"] == "circle":
        return axisym.circle(c["radius"], tuple(c.get("center", (0.0, 0.0))))
    pts = np.column_stack([c["x"], c["y"]])
    if c["type"] == "polygon":
        return axisym.polygon_curve(pts)
    return axisym.fourier_curve(pts[:, 0], pts[:, 1])


def build_planar(spec: dict) -> axisym.PlanarRegion:
    if spec["kind"] != "planar":
        raise SpecError("expected a planar spec")
    return axisym.PlanarRegion(_curve(spec["outer"]), tuple(_curve(h) for h in spec.get("holes", [])))
