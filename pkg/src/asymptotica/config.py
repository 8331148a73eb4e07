"""Strict parsing of experiment configurations and operator expressions.

A configuration is one JSON document::

    {"schema": 1, "operator": "volterra(64)", "experiment": "orbit",
     "vectors": ["e1", {"random": 3}], "n_max": 200}

Operators are either call strings (``"identity(4)"``, ``"example2"``) or
objects ``{"op": "compose", "args": [...]}``. Bare names take their size from
the top-level ``dim`` / ``M`` / ``blocks`` / ``block_dim`` keys.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import zoo
from .errors import AsymptoticaError, ConfigError
from .linalg import basis, random_unit_vector

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "orbit",
    "classify",
    "gram",
    "decompose",
    "kerchy",
    "backward",
    "mt-membership",
    "inverse-growth",
    "verify",
)

CASES = (
    "example1",
    "example2",
    "example3",
    "example4",
    "example5",
    "corollary2",
    "theorem3",
    "theorem4",
    "corollary5",
    "lemma6",
    "theorem7",
)

_OPTIONAL = {
    "dim": int,
    "M": int,
    "blocks": int,
    "block_dim": int,
    "case": str,
    "vectors": list,
    "direction": str,
    "mode": str,
    "n_max": int,
    "N": int,
    "horizon": int,
    "m": int,
    "lookahead": int,
    "bound_cap": float,
    "decay_tol": float,
    "floor_frac": float,
    "growth_factor": float,
    "seed": int,
    "output": str,
}


@dataclass
class ExperimentConfig:
    experiment: str
    operator: Any = None
    schema: int = SCHEMA_VERSION
    params: dict = field(default_factory=dict)
    vectors: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)


def _num(v, path):
    if isinstance(v, bool):
        raise ConfigError("expected a number, got a boolean", path)
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"expected a number or [re, im] pair, got {v!r}", path)


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a decoded JSON document; unknown keys are rejected."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be an object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"schema must be {SCHEMA_VERSION}", "$.schema")
    exp = doc.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}", "$.experiment")
    params = {}
    for key, val in doc.items():
        if key in ("schema", "experiment", "operator"):
            continue
        if key not in _OPTIONAL:
            raise ConfigError(f"unknown key {key!r}", f"$.{key}")
        want = _OPTIONAL[key]
        if want is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if not isinstance(val, want) or isinstance(val, bool):
            raise ConfigError(f"expected {want.__name__}", f"$.{key}")
        params[key] = val
    if exp == "verify":
        if params.get("case") not in CASES:
            raise ConfigError(f"case must be one of {', '.join(CASES)}", "$.case")
    elif "operator" not in doc:
        raise ConfigError("missing operator", "$.operator")
    if params.get("direction", "forward") not in ("forward", "adjoint"):
        raise ConfigError("direction must be 'forward' or 'adjoint'", "$.direction")
    if params.get("mode", "stepwise") not in ("stepwise", "joint", "both"):
        raise ConfigError("mode must be 'stepwise', 'joint' or 'both'", "$.mode")
    cfg = ExperimentConfig(exp, doc.get("operator"), SCHEMA_VERSION, params, params.pop("vectors", []), doc)
    if cfg.operator is not None:
        # dimension validation happens here, before anything runs
        build_operator(cfg.operator, cfg.params)
    return cfg


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc
    return parse_config(doc)


# --------------------------------------------------------------------------
# operator expressions
# --------------------------------------------------------------------------

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def _split_args(s):
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


def _atom(tok):
    for cast in (int, float):
        try:
            return cast(tok)
        except ValueError:
            pass
    if _CALL.match(tok) and "(" in tok:
        return tok  # nested call string, resolved recursively
    return tok


def _weights(spec, path):
    if spec == "example1":
        return None  # resolved once dim is known
    if spec == "unit":
        return zoo.unit_weights()
    if isinstance(spec, str) and spec.startswith("example3:"):
        return zoo.example3_weights(int(spec.split(":", 1)[1]))
    if isinstance(spec, dict) and set(spec) == {"example3"}:
        return zoo.example3_weights(int(spec["example3"]))
    if isinstance(spec, list):
        try:
            return zoo.custom_weights(spec)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), path) from exc
    raise ConfigError(f"unknown weight schedule {spec!r}", path)


def _need_int(v, path, what):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(f"{what} must be a positive integer", path)
    return v


def build_operator(expr, params: dict | None = None, path: str = "$.operator") -> zoo.OperatorHandle:
    """Construct an operator from a call string or expression object."""
    params = params or {}
    if isinstance(expr, str):
        m = _CALL.match(expr)
        if not m:
            raise ConfigError(f"cannot parse operator expression {expr!r}", path)
        name, argstr = m.group(1), m.group(2)
        args = [_atom(t) for t in _split_args(argstr)] if argstr else []
        kwargs = {}
    elif isinstance(expr, dict):
        extra = set(expr) - {"op", "args"} - {"dim", "M", "blocks", "block_dim", "scheme", "weights", "c", "entries"}
        if extra:
            raise ConfigError(f"unknown keys {sorted(extra)}", path)
        if "op" not in expr:
            raise ConfigError("expression object needs 'op'", path)
        name = expr["op"]
        args = list(expr.get("args", []))
        kwargs = {k: v for k, v in expr.items() if k not in ("op", "args")}
    else:
        raise ConfigError(f"operator expression must be a string or object, got {type(expr).__name__}", path)
    if name not in zoo.ZOO:
        raise ConfigError(f"unknown operator {name!r}", path)
    try:
        return _construct(name, args, kwargs, params, path)
    except ConfigError:
        raise
    except (AsymptoticaError, ValueError, TypeError, IndexError) as exc:
        raise ConfigError(str(exc), path) from exc


def _pick(args, kwargs, i, key, params, pkey=None):
    if len(args) > i:
        return args[i]
    if key in kwargs:
        return kwargs[key]
    return params.get(pkey or key)


def _construct(name, args, kwargs, params, path):
    sub = lambda e, j: build_operator(e, params, f"{path}.args[{j}]")  # noqa: E731
    if name in ("example1", "example2", "identity", "jordan"):
        d = _need_int(_pick(args, kwargs, 0, "dim", params), path, "dim")
        return {"example1": zoo.example1, "example2": zoo.example2_op, "identity": zoo.identity, "jordan": zoo.jordan}[name](d)
    if name == "example3":
        b = _need_int(_pick(args, kwargs, 0, "blocks", params) or 64, path, "blocks")
        bd = _need_int(_pick(args, kwargs, 1, "block_dim", params) or 64, path, "block_dim")
        return zoo.example3(b, bd)
    if name in ("volterra", "mult_exp", "projection_constants"):
        m = _need_int(_pick(args, kwargs, 0, "M", params), path, "M")
        if name == "projection_constants":
            return zoo.projection_constants(m)
        scheme = _pick(args, kwargs, 1, "scheme", {}) or "midpoint"
        return (zoo.volterra if name == "volterra" else zoo.mult_exp)(m, scheme)
    if name in ("forward_shift", "backward_shift"):
        d = _need_int(_pick(args, kwargs, 1, "dim", params), path, "dim")
        spec = _pick(args, kwargs, 0, "weights", {})
        w = _weights(spec, f"{path}.weights")
        if w is None:
            w = zoo.example1_weights(d)
        return (zoo.forward_shift if name == "forward_shift" else zoo.backward_shift)(w, d)
    if name == "diag":
        entries = args[0] if args else kwargs.get("entries")
        if not isinstance(entries, list) or not entries:
            raise ConfigError("diag needs a nonempty list of entries", path)
        return zoo.diag([_num(v, f"{path}.entries[{i}]") for i, v in enumerate(entries)])
    if name == "dense":
        rows = args[0] if args else kwargs.get("entries")
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise ConfigError("dense needs a list of rows", path)
        mat = np.array([[_num(v, f"{path}.entries[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)], dtype=complex)
        return zoo.from_matrix(mat)
    if name in ("sum", "compose", "direct_sum"):
        if not args:
            raise ConfigError(f"{name} needs at least one operand", path)
        ops = [sub(e, j) for j, e in enumerate(args)]
        return {"sum": zoo.op_sum, "compose": zoo.compose}[name](*ops) if name != "direct_sum" else zoo.direct_sum(ops)
    if name in ("inverse", "adjoint"):
        if len(args) != 1:
            raise ConfigError(f"{name} takes exactly one operand", path)
        return (zoo.inverse_op if name == "inverse" else zoo.adjoint_op)(sub(args[0], 0))
    if name == "scale":
        if len(args) < 1:
            raise ConfigError("scale needs an operand", path)
        c = args[1] if len(args) > 1 else kwargs.get("c")
        if c is None:
            raise ConfigError("scale needs a factor c", path)
        return zoo.scale(sub(args[0], 0), _num(c, f"{path}.c"))
    if name == "similarity":
        if len(args) != 2:
            raise ConfigError("similarity takes (T, S)", path)
        return zoo.similarity(sub(args[0], 0), sub(args[1], 1))
    if name == "block_lower_2x2":
        if len(args) != 3:
            raise ConfigError("block_lower_2x2 takes (T11, T21, T22)", path)
        t11, t22 = sub(args[0], 0), sub(args[2], 2)
        t21 = args[1]
        if isinstance(t21, list):
            t21 = np.array([[_num(v, f"{path}.args[1]") for v in r] for r in t21], dtype=complex)
        else:
            t21 = sub(t21, 1)
        return zoo.block_lower_2x2(t11, t21, t22)
    raise ConfigError(f"operator {name!r} not constructible", path)


# --------------------------------------------------------------------------
# vectors
# --------------------------------------------------------------------------


def build_vector(spec, dim: int, path: str) -> tuple[str, np.ndarray]:
    """Return (identifier, vector) for ``"e3"``, ``"random:7"``, or an object spec."""
    if isinstance(spec, str):
        if re.fullmatch(r"e\d+", spec):
            spec = {"basis": int(spec[1:])}
        elif re.fullmatch(r"random:\d+", spec):
            spec = {"random": int(spec.split(":")[1])}
        else:
            raise ConfigError(f"unknown vector shorthand {spec!r}", path)
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError("vector spec must have exactly one of basis/random/entries", path)
    (key, val), = spec.items()
    if key == "basis":
        i = _need_int(val, path, "basis index")
        if i > dim:
            raise ConfigError(f"basis index {i} exceeds dimension {dim}", path)
        return f"e{i}", basis(dim, i)
    if key == "random":
        if isinstance(val, bool) or not isinstance(val, int) or val < 0:
            raise ConfigError("random seed must be a nonnegative integer", path)
        return f"random:{val}", random_unit_vector(dim, np.random.default_rng(val))
    if key == "entries":
        if not isinstance(val, list) or len(val) > dim:
            raise ConfigError(f"entries must be a list of at most {dim} numbers", path)
        v = np.zeros(dim, dtype=complex)
        v[: len(val)] = [_num(t, f"{path}.entries[{i}]") for i, t in enumerate(val)]
        return "entries", v
    raise ConfigError(f"unknown vector spec key {key!r}", path)
