"""Experiment configuration: JSON schema, number parsing and validation."""

import ast
import json
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

OUTPUT_KINDS = (
    "probability_map",
    "amplitude_series",
    "eigenvalues",
    "unitary_avg",
    "ipr",
    "mtt_curve",
    "diagnostics",
)

_number = {"anyOf": [{"type": "number"}, {"type": "string"}]}
_index = {"anyOf": [{"type": "integer", "minimum": 1}, {"const": "all"}]}
_positive = {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "string"}]}

SCHEMA = {
    "type": "object",
    "required": ["n", "basis", "spectrum", "j_tau", "m_max", "outputs"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "basis": {
            "anyOf": [
                {"enum": ["identity", "localized", "plane_wave"]},
                {
                    "type": "object",
                    "required": ["custom"],
                    "additionalProperties": False,
                    "properties": {"custom": {"type": "string"}},
                },
            ]
        },
        "spectrum": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "linear": _number,
                "custom": {"type": "array", "items": _number},
            },
        },
        "j_tau": {"anyOf": [_number, {"type": "array", "items": _number, "minItems": 1}]},
        "measured": _index,
        "initial": _index,
        "m_max": {"type": "integer", "minimum": 1},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                k: _positive for k in ("orthonormality", "eos", "degeneracy", "tail")
            },
        },
        "outputs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "path"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": list(OUTPUT_KINDS)},
                    "path": {"type": "string", "minLength": 1},
                },
            },
        },
        "seedless": {"const": True},
    },
}


class ConfigError(ValueError):
    """Schema or semantic violation; ``field`` is a JSON-pointer-like path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    raise ValueError("only numbers, pi and + - * / are allowed")


def parse_number(value):
    """Number literal or an arithmetic string in ``pi`` such as ``"pi/2+0.002"``."""
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, (int, float)):
        out = float(value)
    else:
        text = str(value).strip().replace("π", "pi")
        try:
            out = _eval(ast.parse(text, mode="eval"))
        except (SyntaxError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {value!r}: {exc}") from None
    if not math.isfinite(out):
        raise ValueError(f"{value!r} is not finite")
    return out


@dataclass
class Tolerances:
    orthonormality: float = 1e-10
    eos: float = 1e-12
    degeneracy: float | None = None
    tail: float = 1e-10


@dataclass
class OutputSpec:
    kind: str
    path: str


@dataclass
class ExperimentConfig:
    n: int
    basis: str
    custom_basis_path: str | None
    spectrum_kind: str
    j_coupling: float
    energies: list | None
    j_tau: list
    measured: list
    initial: list
    m_max: int
    tolerances: Tolerances
    outputs: list
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def taus(self):
        """Measurement intervals; ``j_tau`` divided by the coupling."""
        return [jt / self.j_coupling for jt in self.j_tau]


def _field_path(error):
    parts = [str(p) for p in error.absolute_path]
    return "/" + "/".join(parts) if parts else "/"


def _indices(value, n, name):
    if value == "all":
        return list(range(1, n + 1))
    if not 1 <= value <= n:
        raise ConfigError(f"/{name}", f"index {value} outside 1..{n}")
    return [int(value)]


def parse_config(raw, base_dir=None):
    """Validate a decoded JSON document and build an :class:`ExperimentConfig`."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_field_path(err), err.message)

    n = raw["n"]

    def num(value, path):
        try:
            return parse_number(value)
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None

    basis = raw["basis"]
    custom_path = None
    if isinstance(basis, dict):
        custom_path = basis["custom"]
        if base_dir is not None and not Path(custom_path).is_absolute():
            custom_path = str(Path(base_dir) / custom_path)
        basis = "custom"
    elif basis == "localized" and n < 2:
        raise ConfigError("/n", "localized basis needs n >= 2")

    spectrum = raw["spectrum"]
    if "linear" in spectrum:
        j_coupling = num(spectrum["linear"], "/spectrum/linear")
        if j_coupling == 0:
            raise ConfigError("/spectrum/linear", "coupling must be nonzero")
        energies = None
        kind = "linear"
    else:
        energies = [num(v, f"/spectrum/custom/{i}") for i, v in enumerate(spectrum["custom"])]
        if len(energies) != n:
            raise ConfigError("/spectrum/custom", f"expected {n} energies, got {len(energies)}")
        j_coupling = 1.0
        kind = "custom"

    jt = raw["j_tau"]
    jt_list = jt if isinstance(jt, list) else [jt]
    j_tau = []
    for i, v in enumerate(jt_list):
        path = f"/j_tau/{i}" if isinstance(jt, list) else "/j_tau"
        value = num(v, path)
        if value < 0:
            raise ConfigError(path, "must be non-negative")
        j_tau.append(value)

    tol_raw = raw.get("tolerances", {})
    tols = Tolerances()
    for key, value in tol_raw.items():
        v = num(value, f"/tolerances/{key}")
        if not v > 0:
            raise ConfigError(f"/tolerances/{key}", "must be > 0")
        setattr(tols, key, v)

    outputs = [OutputSpec(o["kind"], o["path"]) for o in raw["outputs"]]
    return ExperimentConfig(
        n=n,
        basis=basis,
        custom_basis_path=custom_path,
        spectrum_kind=kind,
        j_coupling=j_coupling,
        energies=energies,
        j_tau=j_tau,
        measured=_indices(raw.get("measured", "all"), n, "measured"),
        initial=_indices(raw.get("initial", "all"), n, "initial"),
        m_max=raw["m_max"],
        tolerances=tols,
        outputs=outputs,
        raw=raw,
    )


def load_config(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("/", f"invalid JSON: {exc}") from None
    return parse_config(raw, base_dir=path.parent)
