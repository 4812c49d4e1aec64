"""JSON configuration documents and canonical serialization.

A document has ``"version": 1``, at most one source section (``pairs``,
``family``, ``ends``, ``counterexample`` or ``fatset``) and an ``options``
block.  Complex numbers are ``[re, im]`` pairs (plain numbers are accepted
on input) and matrices are ``[[a, b], [c, d]]``.  Unknown fields are
rejected.  Serialization sorts keys and prints floats with 17 significant
digits, so parse -> serialize is idempotent.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .config import CirclePair, CircleSystem, ConjugatedFamily, FamilySpec, TailFamily
from .errors import IoError, ParseError, SchemaError
from .moebius import Moebius, OrientedCircle

VERSION = 1
SOURCES = ("pairs", "family", "ends", "counterexample", "fatset")

DEFAULT_OPTIONS = {
    "depth": 3,
    "budget": 10_000_000,
    "threshold": 1e-2,
    "census_threshold": 1e-3,
    "workers": 1,
    "seed": 0,
    "trials": 1000,
    "samples": 64,
}

_NUM = {"type": "number"}
_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_MATRIX = {
    "type": "array",
    "minItems": 2,
    "maxItems": 2,
    "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _COMPLEX},
}
_CIRCLE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["cx", "cy", "r"],
    "properties": {"cx": _NUM, "cy": _NUM, "r": {"type": "number", "exclusiveMinimum": 0}},
}
_PAIR = {
    "type": "object",
    "additionalProperties": False,
    "required": ["c", "c_prime"],
    "properties": {
        "c": _CIRCLE,
        "c_prime": _CIRCLE,
        "map": {"oneOf": [{"const": "canonical"}, _MATRIX]},
        "twist": _NUM,
    },
}
_TAIL = {
    "type": "object",
    "additionalProperties": False,
    "required": ["point"],
    "properties": {"point": _COMPLEX, "direction": _COMPLEX, "scale": {"type": "number", "exclusiveMinimum": 0}, "twist": _NUM},
}
_INT = {"type": "integer"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version"],
    "properties": {
        "version": {"const": VERSION},
        "pairs": {"type": "array", "items": _PAIR},
        "family": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "families": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["base", "conjugator"],
                        "properties": {"base": _PAIR, "conjugator": _MATRIX, "prime_conjugator": _MATRIX},
                    },
                },
                "pairs": {"type": "array", "items": _PAIR},
                "tails": {"type": "array", "items": _TAIL},
                "radius": {"type": "integer", "minimum": 0},
            },
        },
        "ends": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "points": {"type": "array", "items": _NUM},
                "cantor_depth": {"type": ["integer", "null"], "minimum": 0},
                "handles": {"type": "integer", "minimum": 0},
                "N": {"type": "integer", "minimum": 1},
                "margin": _NUM,
            },
        },
        "counterexample": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rule": {"enum": ["geometric", "explicit"]},
                "N": {"type": "integer", "minimum": 2},
                "first": _NUM,
                "ratio": _NUM,
                "lengths": {"type": "array", "items": _NUM},
                "tail": _NUM,
                "pair_distance": _NUM,
                "growth": _NUM,
            },
        },
        "fatset": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"n": {"type": "integer", "minimum": 1}, "delta": _NUM},
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "depth": {"type": "integer", "minimum": 0},
                "budget": {"type": "integer", "minimum": 1},
                "threshold": {"type": "number", "exclusiveMinimum": 0},
                "census_threshold": {"type": "number", "exclusiveMinimum": 0},
                "workers": {"type": "integer", "minimum": 1},
                "seed": _INT,
                "trials": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 1},
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

_DEFAULTS = {
    "ends": {"points": [0.0, 1.0], "cantor_depth": None, "handles": 0, "N": 5, "margin": 3.0},
    "counterexample": {"rule": "geometric", "N": 12, "first": 0.5, "ratio": 0.5, "pair_distance": 1.0, "growth": 1.5},
    "fatset": {"n": 8, "delta": 1.0},
    "family": {"families": [], "pairs": [], "tails": [], "radius": 2},
}


# ----------------------------------------------------------------- serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Canonical JSON: sorted keys, 17 significant digits, stable layout."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(dumps(x, indent, _level + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(x, indent, _level + 1) for x in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path, text: str) -> None:
    """Write ``text`` via a temporary file in the same directory and rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# ------------------------------------------------------------- value encodings


def _complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    return complex(float(v[0]), float(v[1]))


def _enc_complex(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _moebius(m) -> Moebius:
    return Moebius(_complex(m[0][0]), _complex(m[0][1]), _complex(m[1][0]), _complex(m[1][1]))


def encode_moebius(g: Moebius) -> list:
    return [[_enc_complex(g.a), _enc_complex(g.b)], [_enc_complex(g.c), _enc_complex(g.d)]]


def _circle(d) -> OrientedCircle:
    return OrientedCircle(complex(float(d["cx"]), float(d["cy"])), float(d["r"]))


def encode_circle(c: OrientedCircle) -> dict:
    return {"cx": float(c.center.real) + 0.0, "cy": float(c.center.imag) + 0.0, "r": float(c.radius)}


def _norm_pair(d) -> dict:
    out = {"c": encode_circle(_circle(d["c"])), "c_prime": encode_circle(_circle(d["c_prime"]))}
    m = d.get("map", "canonical")
    if m == "canonical":
        out["map"] = "canonical"
        out["twist"] = float(d.get("twist", 0.0))
    else:
        out["map"] = [[_enc_complex(_complex(x)) for x in row] for row in m]
    return out


def _pair(d, label=0) -> CirclePair:
    c, cp = _circle(d["c"]), _circle(d["c_prime"])
    if d.get("map", "canonical") == "canonical":
        return CirclePair.canonical(c, cp, float(d.get("twist", 0.0)), label)
    return CirclePair(c, cp, _moebius(d["map"]), label)


def encode_pair(p: CirclePair) -> dict:
    return {"c": encode_circle(p.c), "c_prime": encode_circle(p.c_prime), "map": encode_moebius(p.map)}


def encode_system(sys: CircleSystem) -> dict:
    """Explicit-pairs document for a finite system."""
    return {"version": VERSION, "pairs": [encode_pair(p) for p in sys.pairs]}


def _norm_family(d) -> dict:
    out = {
        "families": [],
        "pairs": [_norm_pair(p) for p in d.get("pairs", [])],
        "tails": [],
        "radius": int(d.get("radius", _DEFAULTS["family"]["radius"])),
    }
    for f in d.get("families", []):
        g = {"base": _norm_pair(f["base"]), "conjugator": [[_enc_complex(_complex(x)) for x in row] for row in f["conjugator"]]}
        if "prime_conjugator" in f:
            g["prime_conjugator"] = [[_enc_complex(_complex(x)) for x in row] for row in f["prime_conjugator"]]
        out["families"].append(g)
    for t in d.get("tails", []):
        out["tails"].append(
            {
                "point": _enc_complex(_complex(t["point"])),
                "direction": _enc_complex(_complex(t.get("direction", 1.0))),
                "scale": float(t.get("scale", 1.0)),
                "twist": float(t.get("twist", 0.0)),
            }
        )
    return out


def _norm_section(name: str, d: dict) -> dict:
    if name == "family":
        return _norm_family(d)
    out = dict(_DEFAULTS[name])
    out.update(d)
    if name == "ends":
        out["points"] = [float(x) for x in out["points"]]
        out["margin"] = float(out["margin"])
    elif name == "counterexample":
        for k in ("first", "ratio", "pair_distance", "growth"):
            out[k] = float(out[k])
        if "lengths" in out:
            out["lengths"] = [float(x) for x in out["lengths"]]
            out["rule"] = "explicit" if "rule" not in d else out["rule"]
        if "tail" in out:
            out["tail"] = float(out["tail"])
    elif name == "fatset":
        out["delta"] = float(out["delta"])
    return out


# -------------------------------------------------------------------- documents


@dataclass
class ConfigDocument:
    source: str | None = None
    spec: dict = field(default_factory=dict)
    options: dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))
    version: int = VERSION

    @classmethod
    def from_dict(cls, data) -> "ConfigDocument":
        _validate_schema(data)
        present = [s for s in SOURCES if s in data]
        if len(present) > 1:
            raise SchemaError(f"at most one source section allowed, got {present}", present[1])
        source = present[0] if present else None
        if source == "pairs":
            spec = {"pairs": [_norm_pair(p) for p in data["pairs"]]}
        elif source is not None:
            spec = _norm_section(source, data[source])
        else:
            spec = {}
        options = dict(DEFAULT_OPTIONS)
        options.update(data.get("options", {}))
        for k in ("threshold", "census_threshold"):
            options[k] = float(options[k])
        return cls(source, spec, options)

    def to_dict(self) -> dict:
        out = {"version": self.version, "options": dict(self.options)}
        if self.source == "pairs":
            out["pairs"] = self.spec["pairs"]
        elif self.source is not None:
            out[self.source] = self.spec
        return out

    def serialize(self) -> str:
        return dumps(self.to_dict()) + "\n"

    def section(self, name: str) -> dict:
        """The named source section, or its defaults when the document has none."""
        if self.source == name:
            return self.spec
        if self.source is None and name in _DEFAULTS:
            return _norm_section(name, {})
        raise SchemaError(f"document has no '{name}' section (source is {self.source!r})", name)

    # building domain objects

    def family_spec(self) -> FamilySpec:
        d = self.section("family")
        fams = []
        for f in d["families"]:
            k = _moebius(f["prime_conjugator"]) if "prime_conjugator" in f else None
            fams.append(ConjugatedFamily(_pair(f["base"]), _moebius(f["conjugator"]), k))
        tails = [TailFamily(_complex(t["point"]), _complex(t["direction"]), t["scale"], t["twist"]) for t in d["tails"]]
        return FamilySpec(tuple(fams), tuple(_pair(p) for p in d["pairs"]), tuple(tails), d["radius"])

    def build(self):
        """The described object: a system, a family spec or a construction result."""
        from . import construct

        if self.source == "pairs":
            return CircleSystem(tuple(_pair(p) for p in self.spec["pairs"])).relabeled()
        if self.source == "family":
            return self.family_spec()
        if self.source == "ends":
            d = self.spec
            spec = construct.EndSetSpec(tuple(d["points"]), d["cantor_depth"], d["handles"])
            return construct.realize_end_space(spec, d["N"], d["margin"])
        if self.source == "counterexample":
            return construct.build_nested_counterexample(recipe_from(self.spec))
        if self.source == "fatset":
            return construct.build_fat_limit_set(self.spec["n"], self.spec["delta"])
        raise SchemaError("document has no configuration section", "")

    def system(self) -> CircleSystem:
        """Finite circle system for orbit computations."""
        obj = self.build()
        if isinstance(obj, FamilySpec):
            return obj.materialize()
        if isinstance(obj, CircleSystem):
            return obj
        return obj.sys


def recipe_from(d: dict):
    from .construct import CounterexampleRecipe

    extra = {"pair_distance": d["pair_distance"], "growth": d["growth"]}
    if d["rule"] == "explicit":
        if "lengths" not in d:
            raise SchemaError("explicit rule needs 'lengths'", "counterexample/lengths")
        r = CounterexampleRecipe(tuple(d["lengths"]), d.get("tail", 0.0), rule="explicit", **extra)
        return r
    g = CounterexampleRecipe.geometric(d["N"], d["first"], d["ratio"])
    return CounterexampleRecipe(g.lengths, g.tail, g.rule, **extra)


def _validate_schema(data):
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if not errors:
        return
    err = jsonschema.exceptions.best_match(errors)
    path = "/".join(str(p) for p in err.absolute_path)
    if err.validator == "required" and isinstance(err.instance, dict):
        missing = [k for k in err.validator_value if k not in err.instance]
        if missing:
            path = f"{path}/{missing[0]}" if path else missing[0]
            raise SchemaError(f"missing required field '{missing[0]}'", path)
    if err.validator == "additionalProperties" and isinstance(err.instance, dict):
        allowed = set(err.schema.get("properties", {}))
        extra = sorted(k for k in err.instance if k not in allowed)
        if extra:
            path = f"{path}/{extra[0]}" if path else extra[0]
            raise SchemaError(f"unknown field '{extra[0]}'", path)
    raise SchemaError(err.message, path or "<root>")


def loads_config(text: str) -> ConfigDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return ConfigDocument.from_dict(data)


def load_config(path) -> ConfigDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return loads_config(text)


def serialize(doc: ConfigDocument) -> str:
    return doc.serialize()
