"""JSON run configuration with strict validation.

One JSON document per run.  Unknown keys anywhere are errors, and every error
names the offending field (and its line in the file when it can be located).
See ``docs/config.md`` for the schema.
"""
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..core2d import ShearParams
from ..errors import ConfigError, ShearKickError
from ..ndim import FourierProfile, NDParams

DEFAULT_N_STEPS = 100_000
FULL_N_STEPS = 4_000_000
GRID_DECIMALS = 12

MODELS = ("shear2d", "ndim")
SWEEPABLE = {"shear2d": ("sigma", "lambda", "A", "tau"), "ndim": ("A", "tau")}

_NUM = (int, float)
_REQ = object()

# section -> {key: (types, default)}
SECTIONS = {
    "ensemble": {
        "n_orbits": (int, 10), "n_steps": (int, DEFAULT_N_STEPS), "burn_in": (int, 1000),
        "zero_band": (_NUM, 0.005), "gap": (_NUM, 0.01), "workers": (int, 1),
    },
    "sweep": {
        "name": (str, _REQ), "start": (_NUM, None), "stop": (_NUM, None),
        "step": (_NUM, None), "values": (list, None),
    },
    "output": {"csv": (str, None), "json": (str, None), "svg": (str, None)},
    "simulate": {"n_kicks": (int, 100), "initial": (list, None), "lifted": (bool, False)},
    "cycle_image": {
        "n_kicks": (int, 1), "resolution": (int, 256), "arc_tol": (_NUM, 0.01),
        "budget": (int, 2 ** 20), "sigmas": (list, None),
    },
    "attractor": {"n_points": (int, 1000), "burn_in": (int, 1000), "n_record": (int, 10)},
    "invariant_curve": {
        "tol": (_NUM, 1e-8), "max_iters": (int, 10_000), "resolution": (int, 4096),
        "slope_tol": (_NUM, 1e-3),
    },
    "staircase": {
        "B": (_NUM, _REQ), "a_start": (_NUM, 0.0), "a_stop": (_NUM, 1.0),
        "n_points": (int, 512), "n": (int, 20_000), "n_init": (int, 32),
    },
    "singular_compare": {
        "k_values": (list, _REQ), "a_values": (list, _REQ), "n": (int, 100_000),
        "n_orbits": (int, 3), "burn_in": (int, 1000),
    },
}
PARAM_KEYS = {
    "shear2d": {"sigma": (_NUM, _REQ), "lambda": (_NUM, _REQ), "A": (_NUM, _REQ), "tau": (_NUM, _REQ)},
    "ndim": {"sigma": (list, _REQ), "Lambda": (list, _REQ), "A": (_NUM, _REQ), "tau": (_NUM, _REQ),
             "v": (list, None), "H": (dict, None)},
}
TOP_KEYS = {"model", "params", "seed", *SECTIONS}


def _line_of(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Checker:
    def __init__(self, text):
        self.text = text

    def fail(self, where, message):
        line = _line_of(self.text, where.split(".")[-1])
        loc = f"{where} (line {line})" if line else where
        raise ConfigError(message, where=loc)

    def section(self, name, raw, schema):
        if not isinstance(raw, dict):
            self.fail(name, "must be a JSON object")
        for k in raw:
            if k not in schema:
                self.fail(f"{name}.{k}", f"unknown key (allowed: {', '.join(sorted(schema))})")
        out = {}
        for k, (types, default) in schema.items():
            where = f"{name}.{k}"
            if k not in raw:
                if default is _REQ:
                    self.fail(where, "required key is missing")
                out[k] = default
                continue
            val = raw[k]
            # bool is an int subclass; never accept it for numbers
            if isinstance(val, bool) and types is not bool:
                self.fail(where, f"expected {_type_name(types)}, got a boolean")
            if not isinstance(val, types):
                self.fail(where, f"expected {_type_name(types)}, got {type(val).__name__}")
            if isinstance(val, float) and not math.isfinite(val):
                self.fail(where, "must be finite")
            out[k] = val
        return out


def _type_name(types):
    if isinstance(types, tuple):
        return "number"
    return {int: "integer", str: "string", list: "array", dict: "object", bool: "boolean"}[types]


@dataclass
class RunConfig:
    """Validated run configuration.  ``params`` holds the raw parameter dict."""

    model: str
    params: dict
    seed: int
    ensemble: dict
    sweep: dict = None
    output: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)
    source: str = None

    def require_params(self, model=None):
        if self.params is None:
            raise ConfigError("required key is missing", where="params")
        if model is not None and self.model != model:
            raise ConfigError(f"this command needs model {model!r}", where="model")
        return build_params(self.model, self.params)

    def section(self, name):
        """Settings of a command section, falling back to defaults when absent."""
        if name in self.sections:
            return self.sections[name]
        if any(d is _REQ for _, d in SECTIONS[name].values()):
            raise ConfigError("section is required for this command", where=name)
        return {k: d for k, (_, d) in SECTIONS[name].items()}

    def grid(self):
        """Swept values, or ``None`` when no sweep is configured."""
        return None if self.sweep is None else self.sweep["grid"]

    def with_value(self, name, value):
        """Copy of the parameter dict with ``name`` set to ``value``."""
        p = dict(self.params)
        p[name] = value
        return p


def make_grid(start, stop, step):
    """Inclusive grid start, start + step, ... <= stop, rounded to 12 decimals.

    Rounding keeps e.g. 5 + 3 * 0.05 at the double nearest 5.15.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, GRID_DECIMALS) for i in range(n + 1)]


def build_params(model, p):
    """Parameter record for ``model`` from a plain dict (config field names)."""
    if model == "shear2d":
        return ShearParams(float(p["sigma"]), float(p["lambda"]), float(p["A"]), float(p["tau"]))
    H = FourierProfile.from_dict(p["H"]) if p.get("H") is not None else FourierProfile()
    return NDParams(np.asarray(p["sigma"], dtype=float), np.asarray(p["Lambda"], dtype=float),
                    float(p["A"]), float(p["tau"]), v=p.get("v"), H=H)


def parse_config(text, source=None, seed_override=None):
    """Parse and validate a JSON configuration string."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", where=f"line {exc.lineno}, column {exc.colno}") from None
    chk = _Checker(text)
    if not isinstance(raw, dict):
        chk.fail("<root>", "top level must be a JSON object")
    for k in raw:
        if k not in TOP_KEYS:
            chk.fail(k, f"unknown key (allowed: {', '.join(sorted(TOP_KEYS))})")
    model = raw.get("model", "shear2d")
    if model not in MODELS:
        chk.fail("model", f"must be one of {MODELS}")
    # staircase needs no model parameters; commands that do call require_params
    params = None
    if "params" in raw:
        params = chk.section("params", raw["params"], PARAM_KEYS[model])
    if params is not None and model == "ndim" and params.get("H") is not None:
        chk.section("params.H", params["H"], {"const": (_NUM, 0.0), "cos": (list, ()), "sin": (list, ())})
    seed = seed_override if seed_override is not None else raw.get("seed")
    if seed is None:
        chk.fail("seed", "a seed is required (set it in the config or pass --seed)")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        chk.fail("seed", "must be a non-negative integer")
    ensemble = chk.section("ensemble", raw.get("ensemble", {}), SECTIONS["ensemble"])
    for k in ("n_orbits", "n_steps", "workers"):
        if ensemble[k] < 1:
            chk.fail(f"ensemble.{k}", "must be >= 1")
    if ensemble["n_orbits"] < 3:
        chk.fail("ensemble.n_orbits", "must be >= 3 (one max and one min are dropped)")
    if ensemble["burn_in"] < 0:
        chk.fail("ensemble.burn_in", "must be >= 0")
    if ensemble["zero_band"] <= 0 or ensemble["gap"] <= 0:
        chk.fail("ensemble.zero_band", "zero_band and gap must be positive")
    sweep = None
    if "sweep" in raw:
        if params is None:
            chk.fail("params", "a sweep needs a params section")
        sweep = chk.section("sweep", raw["sweep"], SECTIONS["sweep"])
        sweep["grid"] = _sweep_grid(chk, model, sweep)
    output = chk.section("output", raw.get("output", {}), SECTIONS["output"])
    sections = {}
    for name in ("simulate", "cycle_image", "attractor", "invariant_curve", "staircase", "singular_compare"):
        if name in raw:
            sections[name] = chk.section(name, raw[name], SECTIONS[name])
    cfg = RunConfig(model, params, int(seed), ensemble, sweep, output, sections, source)
    # construct once so parameter errors surface as config errors
    for value in (cfg.grid() or [None]) if params is not None else ():
        p = params if value is None else cfg.with_value(sweep["name"], value)
        try:
            build_params(model, p)
        except (ShearKickError, ValueError, TypeError) as exc:
            where = "params" if value is None else f"sweep.{sweep['name']}={value!r}"
            chk.fail(where, f"invalid parameters: {exc}")
    return cfg


def _sweep_grid(chk, model, sweep):
    name = sweep["name"]
    if name not in SWEEPABLE[model]:
        chk.fail("sweep.name", f"cannot sweep {name!r} for model {model} (allowed: {SWEEPABLE[model]})")
    ranged = [sweep[k] is not None for k in ("start", "stop", "step")]
    if sweep["values"] is not None:
        if any(ranged):
            chk.fail("sweep.values", "give either values or start/stop/step, not both")
        grid = sweep["values"]
        if not all(isinstance(v, _NUM) and not isinstance(v, bool) for v in grid):
            chk.fail("sweep.values", "values must be numbers")
        grid = [float(v) for v in grid]
    else:
        if not all(ranged):
            chk.fail("sweep", "needs values or all of start, stop and step")
        if sweep["step"] <= 0:
            chk.fail("sweep.step", "must be positive")
        grid = make_grid(float(sweep["start"]), float(sweep["stop"]), float(sweep["step"])) \
            if sweep["stop"] >= sweep["start"] else []
    if not grid:
        chk.fail("sweep", "grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        chk.fail("sweep.values", "grid must be strictly increasing")
    return grid


def load_config(path, seed_override=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", where=str(path)) from None
    return parse_config(text, source=str(path), seed_override=seed_override)
