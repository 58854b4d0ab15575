"""JSON configuration: schema validation, then construction of the mathematical objects.

Numeric fields accept numbers or formula strings; formulas may reference
sweep-axis names, which are substituted per cell.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError
from .expressions import parse
from .ifs import AffineMap, CantorFamily, Ifs, PerturbationField, family_at
from .intervals import IntervalUnion
from .measures import BernoulliWeights, moran_dimension, pushforward_histogram
from .transversality import EtaMeasure, VerifySettings

MAX_CELLS = 10**6
TASKS = ("classify", "sum-measure", "verify")

_NUM = {"type": ["number", "string"]}
_NUMS = {"type": "array", "items": _NUM, "minItems": 2}
_MAP = {
    "type": "object",
    "properties": {"c": _NUM, "b": _NUM, "g": {"type": ["number", "string", "null"]},
                   "c2_bound": {"type": ["number", "null"]}},
    "required": ["c", "b"],
    "additionalProperties": False,
}
_IFS = {
    "type": "object",
    "properties": {
        "middle_alpha": _NUM,
        "ratios": _NUMS,
        "offsets": _NUMS,
        "maps": {"type": "array", "items": _MAP, "minItems": 2},
        "lam": _NUM,
    },
    "additionalProperties": False,
}
_COMPACT = {
    "type": "object",
    "properties": {**_IFS["properties"], "interval": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                   "family_at": _NUM},
    "additionalProperties": False,
}
_FAMILY = {
    "type": "object",
    "properties": {
        "c": {"type": "array", "items": _NUM, "minItems": 2},
        "b": {"type": "array", "items": _NUM, "minItems": 2},
        "J": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "g": {"type": "array", "items": {"type": ["number", "string", "null"]}},
        "dc": {"type": "array", "items": {"type": ["number", "string", "null"]}},
        "db": {"type": "array", "items": {"type": ["number", "string", "null"]}},
        "c2_bounds": {"type": "array", "items": {"type": ["number", "null"]}},
        "delta": {"type": ["number", "null"]},
    },
    "required": ["c", "b", "J"],
    "additionalProperties": False,
}
_MEASURE = {
    "type": "object",
    "properties": {
        "weights": {"oneOf": [{"enum": ["uniform", "equilibrium"]}, _NUMS]},
        "depth": {"type": "integer", "minimum": 1},
        "depths": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2},
        "bin_width": {"type": "number", "exclusiveMinimum": 0},
        "d": _NUM,
        "C": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_OPT_NUM = {"type": ["number", "string", "null"]}
_VERIFY = {
    "type": "object",
    "properties": {
        "lambda0": _OPT_NUM,
        "window": {"type": ["array", "null"], "items": _NUM, "minItems": 2, "maxItems": 2},
        "grid": {"type": "integer", "minimum": 3},
        "depth": {"type": "integer", "minimum": 1},
        "n_range": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2},
        "pairs_per_depth": {"type": "integer", "minimum": 1},
        "k0": {"type": "integer", "minimum": 1},
        "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "margin": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "alpha": _OPT_NUM, "beta": _OPT_NUM, "gamma": _OPT_NUM,
        "C1": {"type": "number", "exclusiveMinimum": 0},
        "C2": {"type": "number", "exclusiveMinimum": 0},
        "C3": {"type": "number", "exclusiveMinimum": 0},
        "delta_min": {"type": "number", "minimum": 0},
        "r_grid": {"type": ["array", "null"], "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
    },
    "additionalProperties": False,
}
_AXIS = {
    "type": "object",
    "properties": {"name": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"},
                   "lo": {"type": "number"}, "hi": {"type": "number"},
                   "steps": {"type": "integer", "minimum": 2}},
    "required": ["name", "lo", "hi", "steps"],
    "additionalProperties": False,
}
_SWEEP = {
    "type": "object",
    "properties": {"axes": {"type": "array", "items": _AXIS, "minItems": 1},
                   "task": {"enum": list(TASKS)},
                   "depth": {"type": "integer", "minimum": 1}},
    "required": ["axes", "task"],
    "additionalProperties": False,
}
SCHEMA = {
    "type": "object",
    "properties": {"ifs": _IFS, "family": _FAMILY, "compact_set": _COMPACT, "measure": _MEASURE,
                   "verify": _VERIFY, "sweep": _SWEEP,
                   "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1}},
    "additionalProperties": False,
}

_RESERVED = {"x", "lam", "pi", "E", "sin", "cos", "exp"}


def _path(err: jsonschema.ValidationError) -> str:
    out = ""
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple
    task: str
    depth: int = 8

    @property
    def cells(self) -> int:
        return math.prod(a.steps for a in self.axes)

    def points(self):
        """Cell parameter dicts in row-major order (last axis fastest)."""
        grids = np.meshgrid(*[a.values for a in self.axes], indexing="ij")
        flat = [g.ravel() for g in grids]
        for k in range(self.cells):
            yield {a.name: float(v[k]) for a, v in zip(self.axes, flat)}


class Config:
    """A validated configuration document."""

    def __init__(self, doc: dict):
        validator = jsonschema.Draft202012Validator(SCHEMA)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
        if errors:
            err = errors[0]
            raise ConfigError(err.message, _path(err))
        self.doc = doc
        self.seed = int(doc.get("seed", 0))
        self.sweep = self._sweep_spec() if "sweep" in doc else None

    @classmethod
    def load(cls, path) -> Config:
        text = Path(path).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls(doc)

    def section(self, name: str) -> dict:
        return self.doc.get(name, {})

    def has(self, name: str) -> bool:
        return name in self.doc

    # --- builders -----------------------------------------------------------

    def num(self, value, field: str, params=None, variables=()) -> float:
        expr = parse(value, variables, params, field)
        if expr.free_symbols:
            raise ConfigError("expected a constant", field)
        out = float(expr)
        if not math.isfinite(out):
            raise ConfigError(f"value {out} is not finite", field)
        return out

    def build_ifs(self, params=None, section: str = "ifs") -> Ifs:
        spec = self.doc.get(section)
        if spec is None:
            raise ConfigError("section is required for this command", section)
        return _build_ifs(self, spec, section, params)

    def build_compact(self, params=None):
        """The second set: an Ifs, an IntervalUnion, or (absent) None."""
        spec = self.doc.get("compact_set")
        if spec is None:
            return None
        if "interval" in spec:
            lo, hi = (self.num(v, f"compact_set.interval[{i}]", params) for i, v in enumerate(spec["interval"]))
            if not lo < hi:
                raise ConfigError("need lo < hi", "compact_set.interval")
            return IntervalUnion.from_pairs([(lo, hi)])
        if "family_at" in spec:
            lam = self.num(spec["family_at"], "compact_set.family_at", params)
            return _at(self.build_family(params), lam, "compact_set.family_at")
        return _build_ifs(self, spec, "compact_set", params)

    def build_family(self, params=None) -> CantorFamily:
        spec = self.doc.get("family")
        if spec is None:
            raise ConfigError("section is required for this command", "family")
        m = len(spec["c"])
        for key in ("b", "g", "dc", "db", "c2_bounds"):
            if key in spec and len(spec[key]) != m:
                raise ConfigError(f"expected {m} entries to match family.c", f"family.{key}")
        J = tuple(self.num(v, f"family.J[{i}]", params) for i, v in enumerate(spec["J"]))
        if not J[0] < J[1]:
            raise ConfigError(f"need J[0] < J[1], got {J}", "family.J")
        for key in ("c", "b", "g", "dc", "db"):
            for i, v in enumerate(spec.get(key, [])):
                if v is not None:
                    parse(v, ("x", "lam") if key == "g" else ("lam",), params, f"family.{key}[{i}]")
        try:
            fam = CantorFamily(spec["c"], spec["b"], J, g=spec.get("g"), delta=spec.get("delta"),
                               dc=spec.get("dc"), db=spec.get("db"), c2_bounds=spec.get("c2_bounds"),
                               params=params)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc), "family") from None
        # monotonicity is a hypothesis the verifier reports on, so only separation is enforced here
        for lam in fam.grid(33):
            _at(fam, lam, "family")
        return fam

    def weights(self, m: int, ratios=None, params=None) -> BernoulliWeights:
        w = self.section("measure").get("weights", "uniform")
        if w == "uniform":
            return BernoulliWeights.uniform(m)
        if w == "equilibrium":
            if ratios is None:
                raise ConfigError("equilibrium weights need an IFS", "measure.weights")
            from .measures import equilibrium_weights
            return equilibrium_weights(np.abs(ratios))
        p = [self.num(v, f"measure.weights[{i}]", params) for i, v in enumerate(w)]
        if len(p) != m:
            raise ConfigError(f"expected {m} weights, got {len(p)}", "measure.weights")
        try:
            return BernoulliWeights(tuple(p))
        except ValueError as exc:
            raise ConfigError(str(exc), "measure.weights") from None

    def build_eta(self, family: CantorFamily, params=None) -> EtaMeasure:
        """The measure on K for verification; K defaults to the family's own set at J[0]."""
        ms = self.section("measure")
        if self.has("compact_set"):
            K = self.build_compact(params)
            label = "compact_set"
        else:
            K = _at(family, family.J[0], "family.J")
            label = f"family at lam={family.J[0]!r}"
        if isinstance(K, IntervalUnion):
            raise ConfigError("verification needs a self-similar compact set, not an interval", "compact_set")
        w = self.weights(K.m, K.ratios, params)
        depth = ms.get("depth", 12)
        bin_width = ms.get("bin_width", 2.0**-depth)
        hist = pushforward_histogram(K, w, depth, bin_width)
        if "d" in ms:
            d = self.num(ms["d"], "measure.d", params)
        else:
            d = moran_dimension(np.abs(K.ratios))
        return EtaMeasure(hist, d, ms.get("C", 4.0), label)

    def verify_settings(self, params=None) -> VerifySettings:
        raw = dict(self.section("verify"))
        for key in ("lambda0", "alpha", "beta", "gamma"):
            if raw.get(key) is not None:
                raw[key] = self.num(raw[key], f"verify.{key}", params)
        if raw.get("window") is not None:
            raw["window"] = tuple(self.num(v, f"verify.window[{i}]", params) for i, v in enumerate(raw["window"]))
        if "n_range" in raw:
            lo, hi = raw["n_range"]
            if lo > hi:
                raise ConfigError("need n_range[0] <= n_range[1]", "verify.n_range")
            raw["n_range"] = (lo, hi)
        known = {f.name for f in fields(VerifySettings)}
        return VerifySettings(**{k: v for k, v in raw.items() if k in known}, seed=self.seed)

    def _sweep_spec(self) -> SweepSpec:
        spec = self.doc["sweep"]
        axes, seen = [], set()
        for i, a in enumerate(spec["axes"]):
            field = f"sweep.axes[{i}]"
            if a["name"] in _RESERVED or a["name"] in seen:
                raise ConfigError(f"axis name {a['name']!r} is reserved or repeated", f"{field}.name")
            if not a["lo"] < a["hi"]:
                raise ConfigError(f"need lo < hi, got {a['lo']} >= {a['hi']}", field)
            seen.add(a["name"])
            axes.append(Axis(a["name"], float(a["lo"]), float(a["hi"]), int(a["steps"])))
        out = SweepSpec(tuple(axes), spec["task"], spec.get("depth", 8))
        if out.cells > MAX_CELLS:
            raise ConfigError(f"{out.cells} cells exceed the limit of {MAX_CELLS}", "sweep.axes")
        return out


def _at(family, lam, field):
    try:
        return family_at(family, lam)
    except Exception as exc:
        raise ConfigError(str(exc), field) from None


def _build_ifs(cfg: Config, spec: dict, section: str, params) -> Ifs:
    keys = {k for k in ("middle_alpha", "ratios", "maps") if k in spec}
    if len(keys) != 1:
        raise ConfigError("give exactly one of middle_alpha, ratios (+offsets) or maps", section)
    lam = cfg.num(spec.get("lam", 0), f"{section}.lam", params)
    if "middle_alpha" in spec:
        a = cfg.num(spec["middle_alpha"], f"{section}.middle_alpha", params)
        if not 0 < a < 0.5:
            raise ConfigError(f"middle_alpha = {a} must lie in (0, 1/2)", f"{section}.middle_alpha")
        return Ifs.middle_alpha(a)
    if "ratios" in spec:
        if "offsets" not in spec or len(spec["offsets"]) != len(spec["ratios"]):
            raise ConfigError("offsets must be given, one per ratio", f"{section}.offsets")
        raw = [(spec["ratios"][i], spec["offsets"][i], None, None) for i in range(len(spec["ratios"]))]
        names = [(f"{section}.ratios[{i}]", f"{section}.offsets[{i}]") for i in range(len(raw))]
    else:
        raw = [(mp["c"], mp["b"], mp.get("g"), mp.get("c2_bound")) for mp in spec["maps"]]
        names = [(f"{section}.maps[{i}].c", f"{section}.maps[{i}].b") for i in range(len(raw))]
    maps, perts = [], []
    for (c, b, g, bound), (fc, fb) in zip(raw, names):
        c, b = cfg.num(c, fc, params), cfg.num(b, fb, params)
        if not 0 < abs(c) < 1:
            raise ConfigError(f"|c| = {abs(c):g} must lie in (0, 1)", fc)
        lo, hi = sorted((b, b + c))
        if lo < -1e-12 or hi > 1 + 1e-12:
            raise ConfigError(f"map image [{lo:g}, {hi:g}] leaves [0, 1]", fb)
        maps.append(AffineMap(c, b))
        perts.append(None if g is None else PerturbationField(g, bound, (lam, lam), params, fc[:-2] + ".g"))
    try:
        return Ifs(maps, perts, lam)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), section) from None
