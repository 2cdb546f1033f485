"""Config parsing and bit-stable report serialization for the command line."""

import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import CanonicalForm
from .errors import ConfigError, GaussNetError
from .network import RULES, Designed, NetworkSpec, Operation, Source, Squeezer
from .symplectic import require_symplectic

COMMANDS = ("ggqc", "classify", "design", "verify-network", "sweep")

_TOP_KEYS = {"command", "sources", "operations", "options", "node_assignment", "matrix", "design"}
_SOURCE_KEYS = {
    "two_mode_pure": {"gamma"},
    "two_mode_standard": {"a", "b", "c", "d"},
    "tritter": {"gamma"},
    "explicit": {"cm", "mean"},
    "random": {"n", "seed", "pure"},
}
_REQUIRED_SOURCE_KEYS = {
    "two_mode_pure": {"gamma"},
    "two_mode_standard": {"a", "b", "c", "d"},
    "tritter": {"gamma"},
    "explicit": {"cm"},
    "random": {"n", "seed"},
}
_OPTION_KEYS = {"full_table", "max_modes", "sweep_type", "grid", "search", "sampler", "design_rules"}
_DESIGN_KEYS = {"type", "gamma1", "gamma2", "rule", "margin"}


@dataclass(frozen=True)
class RunConfig:
    """Validated command line run.

    ``payload`` is the parsed document; ``spec`` is set for network commands
    and ``matrix`` for ``classify``.
    """

    command: str
    payload: dict
    spec: NetworkSpec = None
    matrix: np.ndarray = None
    options: dict = field(default_factory=dict)
    tol: float = 1e-9
    seed: int = 0
    samples: int = 200
    full_table: bool = False


# -- parsing ----------------------------------------------------------------


def _reject_unknown(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ConfigError(f"expected an object at {path}", path=path)
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown field {path}.{key}", path=f"{path}.{key}")


def _number(obj, key, path, integer=False):
    value = obj[key]
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok or not math.isfinite(value):
        kind = "an integer" if integer else "a finite number"
        raise ConfigError(f"{path}.{key} must be {kind}", path=f"{path}.{key}")
    return value


def _matrix(value, shape, path):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{path} must be a numeric matrix", path=path) from None
    if shape is not None and M.shape != shape:
        raise ConfigError(f"{path} must have shape {shape}, got {M.shape}", path=path)
    if not np.all(np.isfinite(M)):
        raise ConfigError(f"{path} has non-finite entries", path=path)
    return M


def _parse_source(obj, path):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"{path} needs a 'kind' field", path=path)
    kind = obj["kind"]
    if kind not in _SOURCE_KEYS:
        raise ConfigError(f"{path}.kind: unknown source kind {kind!r}", path=f"{path}.kind")
    _reject_unknown(obj, _SOURCE_KEYS[kind] | {"kind"}, path)
    missing = _REQUIRED_SOURCE_KEYS[kind] - set(obj)
    if missing:
        raise ConfigError(f"{path} is missing {sorted(missing)}", path=path)
    params = {}
    if kind == "explicit":
        cm = _matrix(obj["cm"], None, f"{path}.cm")
        if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or cm.shape[0] % 2:
            raise ConfigError(f"{path}.cm must be square with even size", path=f"{path}.cm")
        params["cm"] = cm
        if "mean" in obj:
            params["mean"] = _matrix(obj["mean"], (cm.shape[0],), f"{path}.mean")
    elif kind == "random":
        params["n"] = _number(obj, "n", path, integer=True)
        params["seed"] = _number(obj, "seed", path, integer=True)
        if params["n"] < 1:
            raise ConfigError(f"{path}.n must be >= 1", path=f"{path}.n")
        if "pure" in obj:
            if not isinstance(obj["pure"], bool):
                raise ConfigError(f"{path}.pure must be a boolean", path=f"{path}.pure")
            params["pure"] = obj["pure"]
    else:
        for key in _SOURCE_KEYS[kind]:
            params[key] = float(_number(obj, key, path))
        if kind == "tritter" and params["gamma"] < 0:
            raise ConfigError(f"{path}.gamma must be >= 0, got {params['gamma']}", path=f"{path}.gamma")
        if kind == "two_mode_pure" and params["gamma"] < 1:
            raise ConfigError(f"{path}.gamma must be >= 1, got {params['gamma']}", path=f"{path}.gamma")
        if kind == "two_mode_standard" and (params["a"] < 1 or params["b"] < 1):
            raise ConfigError(f"{path}: a and b must be >= 1", path=path)
    return Source(kind, params)


def _parse_unitary(obj, path, tol):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path} must be an object", path=path)
    if "rows" in obj:
        _reject_unknown(obj, {"rows"}, path)
        S = _matrix(obj["rows"], (4, 4), f"{path}.rows")
        require_symplectic(S, tol, what=path)
        return S
    if "xi" in obj:
        _reject_unknown(obj, {"xi"}, path)
        return Squeezer(float(_number(obj, "xi", path)))
    if "design" in obj:
        _reject_unknown(obj, {"design", "rule", "margin"}, path)
        kind = obj["design"]
        if kind not in ("I", "II", "III", "IV"):
            raise ConfigError(f"{path}.design must be one of I, II, III, IV", path=f"{path}.design")
        rule = obj.get("rule", "table")
        if rule not in RULES:
            raise ConfigError(f"{path}.rule must be one of {list(RULES)}", path=f"{path}.rule")
        if rule == "attain" and kind != "I":
            raise ConfigError(f"{path}: rule 'attain' designs type I only", path=f"{path}.rule")
        margin = float(_number(obj, "margin", path)) if "margin" in obj else Designed.margin
        return Designed(kind, rule, margin)
    if "type" in obj:
        _reject_unknown(obj, {"type", "lambda", "lambda2"}, path)
        kind = obj["type"]
        params = tuple(float(_number(obj, k, path)) for k in ("lambda", "lambda2") if k in obj)
        try:
            form = CanonicalForm(kind, params)
        except GaussNetError as exc:
            raise ConfigError(f"{path}: {exc}", path=path) from None
        return form
    raise ConfigError(f"{path} needs one of 'type', 'xi', 'rows' or 'design'", path=path)


def _parse_operation(obj, path, n, tol):
    _reject_unknown(obj, {"modes", "unitary"}, path)
    if "modes" not in obj or "unitary" not in obj:
        raise ConfigError(f"{path} needs 'modes' and 'unitary'", path=path)
    modes = obj["modes"]
    if not isinstance(modes, list) or len(modes) != 2 or not all(isinstance(m, int) and not isinstance(m, bool) for m in modes):
        raise ConfigError(f"{path}.modes must be a pair of integers", path=f"{path}.modes")
    if modes[0] == modes[1]:
        raise ConfigError(f"{path}.modes repeats mode {modes[0]}", path=f"{path}.modes")
    for m in modes:
        if not 1 <= m <= n:
            raise ConfigError(f"{path}.modes: mode {m} out of range 1..{n}", path=f"{path}.modes")
    return Operation((modes[0] - 1, modes[1] - 1), _parse_unitary(obj["unitary"], f"{path}.unitary", tol))


def _parse_options(obj, command):
    _reject_unknown(obj, _OPTION_KEYS, "$.options")
    opts = dict(obj)
    if "max_modes" in opts:
        _number(opts, "max_modes", "$.options", integer=True)
    if command == "sweep":
        for key in ("sweep_type", "grid"):
            if key not in opts:
                raise ConfigError(f"sweep needs $.options.{key}", path=f"$.options.{key}")
        if opts["sweep_type"] not in ("I", "II", "III", "VI"):
            raise ConfigError("$.options.sweep_type must be one of I, II, III, VI", path="$.options.sweep_type")
        grid = opts["grid"]
        if isinstance(grid, dict):
            _reject_unknown(grid, {"start", "stop", "num"}, "$.options.grid")
            num = _number(grid, "num", "$.options.grid", integer=True)
            if num < 1:
                raise ConfigError("$.options.grid.num must be >= 1", path="$.options.grid.num")
            opts["grid"] = np.linspace(_number(grid, "start", "$.options.grid"), _number(grid, "stop", "$.options.grid"), num).tolist()
        elif isinstance(grid, list) and grid:
            opts["grid"] = [float(_number({"v": v}, "v", f"$.options.grid[{k}]")) for k, v in enumerate(grid)]
        else:
            raise ConfigError("$.options.grid must be a nonempty list or {start, stop, num}", path="$.options.grid")
    return opts


def load_json(text):
    """Parse JSON text, mapping syntax errors to :class:`ConfigError` with line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None


def parse_config(text, command=None, tol=1e-9, seed=0, samples=200, full_table=False):
    """Validate a config document and build the objects it describes.

    A bare 4x4 JSON array is accepted as a ``classify`` payload. ``command``
    from the command line overrides a missing ``command`` field and must
    agree with a present one.

    Raises:
        ConfigError: syntax, unknown fields, or semantic problems.
    """
    doc = load_json(text)
    if isinstance(doc, list):
        doc = {"command": command or "classify", "matrix": doc}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object or a 4x4 array", path="$")
    _reject_unknown(doc, _TOP_KEYS, "$")
    cmd = doc.get("command", command)
    if cmd is None:
        raise ConfigError("no command given", path="$.command")
    if command is not None and cmd != command:
        raise ConfigError(f"command line asks for {command!r} but config says {cmd!r}", path="$.command")
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; choose from {list(COMMANDS)}", path="$.command")
    options = _parse_options(doc.get("options", {}), cmd)
    common = dict(command=cmd, payload=doc, options=options, tol=tol, seed=seed, samples=samples,
                  full_table=full_table or bool(options.get("full_table", False)))

    if cmd == "classify":
        if "matrix" not in doc:
            raise ConfigError("classify needs $.matrix", path="$.matrix")
        return RunConfig(matrix=_matrix(doc["matrix"], (4, 4), "$.matrix"), **common)
    if cmd == "design":
        d = doc.get("design")
        if d is None:
            raise ConfigError("design needs $.design", path="$.design")
        _reject_unknown(d, _DESIGN_KEYS, "$.design")
        for key in ("type", "gamma1", "gamma2"):
            if key not in d:
                raise ConfigError(f"$.design.{key} is required", path=f"$.design.{key}")
        for key in ("gamma1", "gamma2"):
            if _number(d, key, "$.design") < 1:
                raise ConfigError(f"$.design.{key} must be >= 1", path=f"$.design.{key}")
        return RunConfig(**common)

    if "sources" not in doc:
        raise ConfigError(f"{cmd} needs $.sources", path="$.sources")
    if not isinstance(doc["sources"], list) or not doc["sources"]:
        raise ConfigError("$.sources must be a nonempty list", path="$.sources")
    sources = [_parse_source(s, f"$.sources[{k}]") for k, s in enumerate(doc["sources"])]
    n = sum(_source_modes(s) for s in sources)
    ops_doc = doc.get("operations", [])
    if not isinstance(ops_doc, list):
        raise ConfigError("$.operations must be a list", path="$.operations")
    ops = [_parse_operation(o, f"$.operations[{k}]", n, tol) for k, o in enumerate(ops_doc)]
    nodes = doc.get("node_assignment", {})
    if not isinstance(nodes, dict):
        raise ConfigError("$.node_assignment must be an object", path="$.node_assignment")
    return RunConfig(spec=NetworkSpec(sources, ops, dict(nodes)), **common)


def _source_modes(src):
    fixed = {"two_mode_pure": 2, "two_mode_standard": 2, "tritter": 3}
    if src.kind in fixed:
        return fixed[src.kind]
    if src.kind == "random":
        return src.params["n"]
    return src.params["cm"].shape[0] // 2


# -- serialization ----------------------------------------------------------


def _to_plain(obj):
    if isinstance(obj, dict):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def format_float(x):
    """17 significant digits; non-finite values become ``null``."""
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _write(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for k, key in enumerate(sorted(obj)):
            out.write(f"{pad}{json.dumps(key, ensure_ascii=False)}: ")
            _write(obj[key], out, indent, level + 1)
            out.write(",\n" if k < len(obj) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for k, v in enumerate(obj):
            out.write(pad)
            _write(v, out, indent, level + 1)
            out.write(",\n" if k < len(obj) - 1 else "\n")
        out.write(end + "]")
    elif isinstance(obj, bool) or obj is None:
        out.write(json.dumps(obj))
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format_float(obj))
    else:
        out.write(json.dumps(obj, ensure_ascii=False))


def dumps(obj, indent=2):
    """Deterministic JSON text with sorted keys, ``.17g`` floats and a trailing newline."""
    out = io.StringIO()
    _write(_to_plain(obj), out, indent, 0)
    out.write("\n")
    return out.getvalue()


def sweep_csv(rows):
    """CSV text for sweep rows with header ``lambda,ggqc,eq9,gap``."""
    lines = ["lambda,ggqc,eq9,gap"]
    for r in rows:
        lines.append(f"{format_float(r.lam)},{format_float(r.ggqc)},{str(bool(r.eq9)).lower()},{format_float(r.gap)}")
    return "\n".join(lines) + "\n"


def inputs_digest(cfg):
    """sha256 over the canonical config document and the run flags."""
    blob = dumps({
        "config": cfg.payload,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tol": cfg.tol,
        "full_table": cfg.full_table,
    })
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def error_object(exc):
    err = {"code": getattr(exc, "code", "error"), "message": str(exc), "type": type(exc).__name__}
    for attr in ("path", "line", "column", "eigenvalue"):
        value = getattr(exc, attr, None)
        if value is not None:
            err[attr] = value
    return {"error": err}
