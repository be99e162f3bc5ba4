"""JSON state documents, search configs and report encoding.

Complex numbers travel as ``[re, im]`` pairs. Parsing is strict: unknown
kinds, unknown fields, missing required fields and non-finite numbers are all
rejected with a diagnostic that names the offending field.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from ..errors import InvalidSpecError, NumericalError
from ..search import SearchConfig
from ..states import (
    CircularEigenstate,
    DegenerateRotation,
    ExplicitFourier,
    FockPhase,
    Oscillator,
    RandomPeriodic,
    StateSpec,
)

# required and optional fields per kind
SCHEMA = {
    "circular": (("m",), ("K",)),
    "fock_phase": (("n",), ("K",)),
    "oscillator": (("n",), ("I", "omega", "hbar", "N")),
    "degenerate": (("l", "c"), ()),
    "random": (("K", "seed"), ()),
    "fourier": (("a",), ()),
}
INT_FIELDS = {"m", "n", "l", "K", "N", "seed"}
FLOAT_FIELDS = {"I", "omega", "hbar"}

SEARCH_FIELDS = {f.name for f in dataclasses.fields(SearchConfig)}


class DocumentError(InvalidSpecError):
    """Malformed input document; ``field`` names the offending key when known."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


def read_json_argument(arg: str, what: str = "document"):
    """Decode ``arg`` as ``-`` (stdin), inline JSON, or a path to a JSON file."""
    if arg == "-":
        text, source = sys.stdin.read(), "<stdin>"
    elif arg.lstrip().startswith(("{", "[")):
        text, source = arg, "<inline>"
    else:
        path = Path(arg)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DocumentError(f"cannot read {what} file {arg!r}: {exc.strerror}") from None
        source = str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"malformed JSON in {source}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def _int(doc: dict, key: str) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"field {key!r} must be an integer, got {v!r}", key)
    return v


def _float(doc: dict, key: str) -> float:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise DocumentError(f"field {key!r} must be a finite number, got {v!r}", key)
    return float(v)


def _complex_list(doc: dict, key: str) -> tuple[complex, ...]:
    v = doc[key]
    if not isinstance(v, list) or not v:
        raise DocumentError(f"field {key!r} must be a non-empty list of [re, im] pairs", key)
    out = []
    for i, pair in enumerate(v):
        ok = (
            isinstance(pair, list)
            and len(pair) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
            and all(math.isfinite(x) for x in pair)
        )
        if not ok:
            raise DocumentError(f"field {key!r} entry {i} must be a finite [re, im] pair", key)
        out.append(complex(pair[0], pair[1]))
    return tuple(out)


def parse_state_document(doc, default_hbar: float = 1.0) -> tuple[StateSpec, float]:
    """Validate a state document; return the state spec and the hbar in effect.

    An oscillator's own ``hbar`` field wins over ``default_hbar``.
    """
    if not isinstance(doc, dict):
        raise DocumentError("state document must be a JSON object")
    if "kind" not in doc:
        raise DocumentError("missing required field 'kind'", "kind")
    kind = doc["kind"]
    if kind not in SCHEMA:
        raise DocumentError(f"unknown kind {kind!r}; expected one of {sorted(SCHEMA)}", "kind")
    required, optional = SCHEMA[kind]
    for key in required:
        if key not in doc:
            raise DocumentError(f"kind {kind!r} requires field {key!r}", key)
    extra = sorted(set(doc) - {"kind", *required, *optional})
    if extra:
        raise DocumentError(f"unexpected field {extra[0]!r} for kind {kind!r}", extra[0])

    vals = {}
    for key in (*required, *optional):
        if key not in doc:
            continue
        if key in INT_FIELDS:
            vals[key] = _int(doc, key)
        elif key in FLOAT_FIELDS:
            vals[key] = _float(doc, key)
        else:
            vals[key] = _complex_list(doc, key)

    hbar = float(default_hbar)
    if kind == "circular":
        return CircularEigenstate(vals["m"], vals.get("K")), hbar
    if kind == "fock_phase":
        return FockPhase(vals["n"], vals.get("K")), hbar
    if kind == "oscillator":
        hbar = vals.get("hbar", hbar)
        spec = Oscillator(vals["n"], vals.get("I", 1.0), vals.get("omega", 1.0), hbar, vals.get("N"))
        return spec, hbar
    if kind == "degenerate":
        return DegenerateRotation(vals["l"], vals["c"]), hbar
    if kind == "random":
        return RandomPeriodic(vals["K"], vals["seed"]), hbar
    return ExplicitFourier(vals["a"]), hbar


def _pairs(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def state_document(spec: StateSpec) -> dict:
    """Inverse of :func:`parse_state_document`; optional fields left unset are omitted."""
    if isinstance(spec, CircularEigenstate):
        doc = {"kind": "circular", "m": spec.m, "K": spec.K}
    elif isinstance(spec, FockPhase):
        doc = {"kind": "fock_phase", "n": spec.n, "K": spec.K}
    elif isinstance(spec, Oscillator):
        doc = {"kind": "oscillator", "n": spec.n, "I": spec.I, "omega": spec.omega,
               "hbar": spec.hbar, "N": spec.N}
    elif isinstance(spec, DegenerateRotation):
        doc = {"kind": "degenerate", "l": spec.l, "c": _pairs(spec.c)}
    elif isinstance(spec, RandomPeriodic):
        doc = {"kind": "random", "K": spec.K, "seed": spec.seed}
    elif isinstance(spec, ExplicitFourier):
        doc = {"kind": "fourier", "a": _pairs(spec.a)}
    else:
        raise DocumentError(f"no document form for {spec!r}")
    return {k: v for k, v in doc.items() if v is not None}


def parse_search_config(doc, default_seed: int, default_hbar: float) -> SearchConfig:
    if not isinstance(doc, dict):
        raise DocumentError("search config must be a JSON object")
    if "l" not in doc:
        raise DocumentError("search config requires field 'l'", "l")
    extra = sorted(set(doc) - SEARCH_FIELDS)
    if extra:
        raise DocumentError(f"unexpected search config field {extra[0]!r}", extra[0])
    vals = {}
    for key, v in doc.items():
        if key == "objective":
            if not isinstance(v, str):
                raise DocumentError("field 'objective' must be a string", key)
            vals[key] = v
        elif key in ("l", "restarts", "max_iter", "seed", "workers"):
            vals[key] = _int(doc, key)
        else:
            vals[key] = _float(doc, key)
    vals.setdefault("seed", default_seed)
    vals.setdefault("hbar", default_hbar)
    return SearchConfig(**vals)


# ------------------------------------------------------------------ encoding


def to_jsonable(obj):
    """Recursively convert numpy, complex and dataclass values to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [_finite(z.real), _finite(z.imag)]
    if isinstance(obj, (float, np.floating)):
        return _finite(float(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _finite(x: float) -> float:
    if not math.isfinite(x):
        raise NumericalError(f"non-finite value {x!r} in report")
    return x


def dumps_report(report: dict) -> str:
    """Byte-stable JSON: sorted keys, fixed indentation, ``repr`` floats."""
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"
