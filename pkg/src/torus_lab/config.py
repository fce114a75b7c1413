"""Experiment configuration: one TOML file per experiment, strictly validated.

Example::

    experiment = "decay"
    seed = 0
    output = "decay.csv"
    n = 256
    family = [[0, 0, 1]]
    N_list = [8, 16, 32, 64, 128, 256, 512]
    functions = ["e:1", "e:-1"]

Function specs are either preset strings or lists of ``[xi, re, im]``
triples:

``one``            the constant 1
``e:<xi>``         the character ``e(xi x)``
``bump``           ``(1 + cos 2 pi x) / 2``
``random``         seeded random trig polynomial of degree ``band``, 1-bounded
``random0``        the same with its mean removed (rescaled to stay 1-bounded)
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import tomli

from .errors import ConfigError, TorusLabError
from .oscillatory import validate_family
from .torus_fn import _from_coeff_array, from_fourier, random_trig

EXPERIMENTS = ("norms", "counting", "decay", "vdc", "fractal", "nu", "progression", "ergodic", "deviation")

# key -> (accepted python types, default); None default means "required" only
# where listed in _REQUIRED
_SCHEMA = {
    "experiment": ((str,), None),
    "seed": ((int,), 0),
    "output": ((str,), "out.csv"),
    "n": ((int,), 256),
    "band": ((int,), 4),
    "family": ((list,), None),
    "N": ((int, float), None),
    "N_list": ((list,), None),
    "tau": ((int, float), 0.5),
    "l_range": ((list,), [0, 20]),
    "functions": ((list,), None),
    "method": ((str,), "auto"),
    "density": ((int, float), 1.0),
    "s_list": ((list,), [2, 3]),
    "box_H": ((list,), None),
    "xis": ((list,), None),
    "t": ((int, float), 0.5),
    "j_max": ((int,), 10),
    "lp_tau": ((int, float), 0.05),
    "M_list": ((list,), None),
    "l": ((int,), 0),
    "y_range": ((list,), [0.01, 1.0]),
    "y_step": ((int, float), 1e-3),
    "pieces": ((int,), 8),
    "limit": ((int,), 1000),
    "intervals": ((str,), None),
    "x_points": ((int,), 64),
    "delta": ((int, float), 0.05),
    "l0": ((int,), 0),
    "measure": ((dict,), None),
    "cutoff": ((dict,), None),
}
_MEASURE_KEYS = {"b": int, "D": list, "L": int, "M": int}
_CUTOFF_KEYS = {"a": (int, float), "b": (int, float)}

# what each experiment needs beyond the common keys
_REQUIRED = {
    "norms": ("functions",),
    "counting": ("family", "functions"),
    "decay": ("family", "functions", "N_list"),
    "vdc": ("family", "xis", "N_list"),
    "fractal": ("measure",),
    "nu": ("family", "measure", "N"),
    "progression": ("family",),
    "ergodic": ("family", "functions"),
    "deviation": ("family", "functions"),
}


@dataclass
class ExperimentConfig:
    """Validated configuration; ``text`` is the verbatim source."""

    values: dict
    text: str = ""
    source: str = "<string>"
    family: object = field(default=None, repr=False)

    def __getattr__(self, key):
        values = self.__dict__.get("values", {})
        if key in values:
            return values[key]
        if key in _SCHEMA:
            return _SCHEMA[key][1]
        raise AttributeError(key)

    @property
    def digest(self):
        return hashlib.sha256(self.text.encode()).hexdigest()


def _check_type(key, value, types):
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f"{key}: expected {types}, got a boolean")
    if not isinstance(value, types):
        names = "/".join(t.__name__ for t in types)
        raise ConfigError(f"{key}: expected {names}, got {type(value).__name__}")


def _check_table(name, table, spec):
    unknown = set(table) - set(spec)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    for key, value in table.items():
        types = spec[key] if isinstance(spec[key], tuple) else (spec[key],)
        _check_type(f"{name}.{key}", value, types)


def validate(values, text="", source="<string>"):
    """Check a parsed config against the schema; returns :class:`ExperimentConfig`."""
    unknown = set(values) - set(_SCHEMA)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    for key, value in values.items():
        _check_type(key, value, _SCHEMA[key][0])
    exp = values.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}; got {exp!r}")
    missing = [k for k in _REQUIRED[exp] if k not in values]
    if missing:
        raise ConfigError(f"experiment {exp!r} needs: {', '.join(missing)}")
    if "measure" in values:
        _check_table("measure", values["measure"], _MEASURE_KEYS)
        if not {"b", "D"} <= set(values["measure"]):
            raise ConfigError("measure needs at least b and D")
    if "cutoff" in values:
        _check_table("cutoff", values["cutoff"], _CUTOFF_KEYS)
    n = values.get("n", _SCHEMA["n"][1])
    if n < 8 or n & (n - 1):
        raise ConfigError(f"n must be a power of two >= 8, got {n}")
    if values.get("method", "auto") not in ("auto", "grid", "spectral"):
        raise ConfigError("method must be auto, grid or spectral")
    if "N_list" in values:
        Ns = values["N_list"]
        if not Ns or any(isinstance(v, bool) or not isinstance(v, (int, float)) or v < 1 for v in Ns):
            raise ConfigError("N_list must be a nonempty list of numbers >= 1")
    if "l_range" in values and (len(values["l_range"]) != 2 or not all(isinstance(v, int) for v in values["l_range"])):
        raise ConfigError("l_range must be [l_min, l_max] integers")
    family = None
    if "family" in values:
        try:
            family = validate_family(values["family"])
        except (TorusLabError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid family: {exc}") from exc
    if "functions" in values:
        for spec in values["functions"]:
            _check_function_spec(spec)
    return ExperimentConfig(dict(values), text, source, family)


def loads(text, source="<string>"):
    try:
        values = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return validate(values, text, source)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return loads(text, str(path))


# -- function specs ------------------------------------------------------------


def _check_function_spec(spec):
    if isinstance(spec, str):
        if spec in ("one", "bump", "random", "random0"):
            return
        if spec.startswith("e:"):
            try:
                int(spec[2:])
                return
            except ValueError:
                pass
        raise ConfigError(f"unknown function preset {spec!r}")
    if isinstance(spec, list) and all(
        isinstance(t, list) and len(t) == 3 and isinstance(t[0], int) for t in spec
    ):
        return
    raise ConfigError(f"function spec must be a preset or [[xi, re, im], ...], got {spec!r}")


def build_function(spec, n, band, rng):
    """Turn one function spec into a TorusFunction on grid ``n``."""
    if spec == "one":
        return from_fourier({0: 1.0}, n)
    if spec == "bump":
        return from_fourier({0: 0.5, 1: 0.25, -1: 0.25}, n)
    if spec == "random":
        return random_trig(rng, n, band)
    if spec == "random0":
        f = random_trig(rng, n, band, one_bounded=False)
        c = f.coeffs.copy()
        c[0] = 0.0
        g = _from_coeff_array(c)
        peak = np.abs(g.samples).max()
        return _from_coeff_array(c / peak, one_bounded=True) if peak > 0 else g
    if isinstance(spec, str) and spec.startswith("e:"):
        return from_fourier({int(spec[2:]): 1.0}, n)
    return from_fourier({int(xi): complex(re, im) for xi, re, im in spec}, n)


def build_functions(cfg):
    rng = np.random.default_rng(cfg.seed)
    return [build_function(spec, cfg.n, cfg.band, rng) for spec in cfg.functions]
