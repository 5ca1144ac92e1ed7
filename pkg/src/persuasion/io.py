"""JSON formats for instances, schemes, MFS matrices and reports.

Numbers may be written as JSON numbers or as strings such as ``"1/3"`` or
``"-0.25"``.  On output every number goes through :func:`format_number`, so
parse followed by serialize is byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .core import DirectScheme, Instance, SenderObjective, ValidationError, make_scheme, validate_instance
from .mfs import MfsInstance
from .voting import KVotingObjective


def parse_number(value: Any) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"cannot parse number {value!r}") from None
    raise ValidationError(f"expected a number, got {value!r}")


def format_number(x: float) -> int | float | str:
    """Canonical JSON form: integers as ints, short decimals as floats and
    other small-denominator rationals as ``"p/q"`` strings."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot serialise {x}")
    f = Fraction(x).limit_denominator(10**6)
    if float(f) != x:
        return x
    if f.denominator == 1:
        return int(f.numerator)
    q = f.denominator
    for p in (2, 5):
        while q % p == 0:
            q //= p
    return x if q == 1 else f"{f.numerator}/{f.denominator}"


def dumps(obj: Any) -> str:
    """Indented JSON with flat lists kept on one line."""
    return _dump(obj, 0) + "\n"


def _dump(obj: Any, level: int) -> str:
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not any(isinstance(v, (dict, list, tuple)) for v in obj):
            return json.dumps(list(obj))
        return "[\n" + ",\n".join(inner + _dump(v, level + 1) for v in obj) + "\n" + pad + "]"
    return json.dumps(obj)


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


# ---------------------------------------------------------------- instances

def instance_from_dict(doc: dict) -> tuple[Instance, SenderObjective | None]:
    """Parse ``{states, receivers, objective?}``; returns the instance and the
    objective (None when the document has no objective)."""
    try:
        states = doc["states"]
        receivers = doc["receivers"]
        inst = validate_instance(
            states=[s["name"] for s in states],
            prior=[parse_number(s["prior"]) for s in states],
            receivers=[r["name"] for r in receivers],
            actions=[r["actions"] for r in receivers],
            utilities=[[[parse_number(u) for u in row] for row in r["utilities"]] for r in receivers],
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance document: missing or bad field {exc}") from None
    objective = objective_from_dict(inst, doc["objective"]) if doc.get("objective") else None
    return inst, objective


def objective_from_dict(instance: Instance, doc: dict) -> SenderObjective:
    kind = doc.get("type")
    params = doc.get("params", {})
    if kind != "k-voting":
        raise ValidationError(f"unknown objective type {kind!r}")
    if "threshold" not in params:
        raise ValidationError("k-voting objective needs a threshold")
    return KVotingObjective.for_instance(instance, int(params["threshold"]), params.get("preferred_action"))


def objective_to_dict(instance: Instance, objective: SenderObjective) -> dict:
    if not isinstance(objective, KVotingObjective):
        raise ValidationError("only k-voting objectives can be serialised")
    names = instance.profile_names(objective.preferred)
    preferred: str | list[str] = names[0] if len(set(names)) == 1 else names
    return {"type": "k-voting", "params": {"threshold": objective.threshold, "preferred_action": preferred}}


def instance_to_dict(instance: Instance, objective: SenderObjective | None = None) -> dict:
    doc: dict[str, Any] = {
        "states": [
            {"name": s, "prior": format_number(p)} for s, p in zip(instance.states, instance.prior)
        ],
        "receivers": [
            {
                "name": name,
                "actions": list(acts),
                "utilities": [[format_number(u) for u in row] for row in U],
            }
            for name, acts, U in zip(instance.receivers, instance.actions, instance.utilities)
        ],
    }
    if objective is not None:
        doc["objective"] = objective_to_dict(instance, objective)
    return doc


def load_instance(path: str | Path) -> tuple[Instance, SenderObjective | None]:
    return instance_from_dict(read_json(path))


# ------------------------------------------------------------------ schemes

def scheme_from_dict(instance: Instance, doc: dict) -> DirectScheme:
    try:
        signals = []
        for sig in doc["signals"]:
            profile = instance.profile_from_names(sig["profile"])
            probs = sig["prob_per_state"]
            unknown = set(probs) - set(instance.states)
            if unknown:
                raise ValidationError(f"unknown states in scheme: {sorted(unknown)}")
            signals.append((profile, [parse_number(probs.get(s, 0)) for s in instance.states]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scheme document: missing or bad field {exc}") from None
    return make_scheme(instance, signals)


def scheme_to_dict(instance: Instance, scheme: DirectScheme) -> dict:
    return {
        "signals": [
            {
                "profile": instance.profile_names(a),
                "prob_per_state": {s: format_number(p) for s, p in zip(instance.states, scheme.probs[i])},
            }
            for i, a in enumerate(scheme.profiles)
        ]
    }


# --------------------------------------------------------------------- MFS

def mfs_from_dict(doc: dict) -> MfsInstance:
    try:
        A = [[parse_number(v) for v in row] for row in doc["matrix"]]
        lo, hi = (parse_number(v) for v in doc.get("range", [-1, 1]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix document: {exc}") from None
    if len({len(row) for row in A}) > 1:
        raise ValidationError("matrix rows have different lengths")
    return MfsInstance(np.array(A, dtype=float), lo, hi)


def mfs_to_dict(inst: MfsInstance) -> dict:
    return {
        "matrix": [[format_number(v) for v in row] for row in inst.A],
        "range": [format_number(inst.lo), format_number(inst.hi)],
    }
