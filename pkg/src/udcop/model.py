"""Problem model for agreement-style distributed constraint optimization.

An instance holds n agents, one variable per agent with a domain drawn from
{1..d}, a per-agent unary cost table (absent values cost 0), a per-agent
privacy table pricing revelations, and a single global all-equal constraint
with a positive (possibly infinite) violation penalty.

Three problem kinds share this shape:

* ``dcop``    -- costs only, no privacy tables.
* ``udcop``   -- privacy costs keyed by domain value: the price of first
  proposing that value to the neighbors.
* ``udcoppc`` -- privacy costs keyed by constraint id ``c<v>`` (the unary
  cost entry for value v): the price of exposing that constraint's weight.
  The shared all-equal constraint is public and never charged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

KINDS = ("dcop", "udcop", "udcoppc")

#: Finite stand-in for an infinite all-equal penalty, used by local-search
#: arithmetic and metrics. Exact optimization keeps the true infinity.
DEFAULT_PENALTY_SURROGATE = 10_000.0


class InstanceFormatError(ValueError):
    """An instance file could not be parsed."""


class InstanceValidationError(ValueError):
    """A parsed instance violates model invariants."""

    def __init__(self, violations: Sequence[str]):
        super().__init__("invalid instance: " + "; ".join(violations))
        self.violations = list(violations)


class IncompleteAssignmentError(ValueError):
    """An assignment is missing a value for some agent."""


@dataclass(frozen=True)
class GlobalConstraint:
    """All-equal constraint over every variable, with violation penalty > 0."""

    penalty: float = math.inf
    type: str = "all_equal"


@dataclass(frozen=True)
class Instance:
    """Validated problem instance. Treat as immutable and share freely."""

    kind: str
    n: int
    d: int
    domains: tuple[tuple[int, ...], ...]
    unary: tuple[dict, ...]
    privacy: tuple[dict, ...] = ()
    global_constraint: GlobalConstraint = field(default_factory=GlobalConstraint)

    def unary_cost(self, agent: int, value: int) -> float:
        return float(self.unary[agent].get(value, 0.0))

    def reveal_entry(self, agent: int, value: int):
        """Ledger key charged when `agent` first proposes `value`."""
        if self.kind == "udcoppc":
            return f"c{value}"
        return value

    def reveal_cost(self, agent: int, value: int) -> float:
        """Privacy cost of the revelation triggered by proposing `value`."""
        if not self.privacy:
            return 0.0
        return float(self.privacy[agent].get(self.reveal_entry(agent, value), 0.0))

    def entry_cost(self, agent: int, entry) -> float:
        if not self.privacy:
            return 0.0
        return float(self.privacy[agent].get(entry, 0.0))

    def penalty_surrogate(self) -> float:
        """Finite penalty used by solvers when the true penalty is infinite."""
        p = self.global_constraint.penalty
        return float(p) if math.isfinite(p) else DEFAULT_PENALTY_SURROGATE


def validate_instance(inst: Instance) -> list[str]:
    """Return all invariant violations, each naming the offending field.

    An empty list means the instance is well-formed.
    """
    out: list[str] = []
    if inst.kind not in KINDS:
        out.append(f"kind: must be one of {'/'.join(KINDS)}, got {inst.kind!r}")
    if inst.n < 1:
        out.append(f"n: n ≥ 1 required, got {inst.n}")
    if inst.d < 1:
        out.append(f"d: d ≥ 1 required, got {inst.d}")
    if len(inst.domains) != inst.n:
        out.append(f"domains: expected {inst.n} domains, got {len(inst.domains)}")
    for i, dom in enumerate(inst.domains):
        if len(dom) == 0:
            out.append(f"domains[{i}]: domain must be non-empty")
            continue
        if len(set(dom)) != len(dom):
            out.append(f"domains[{i}]: duplicate values")
        bad = [v for v in dom if not isinstance(v, int) or v < 1 or v > inst.d]
        if bad:
            out.append(f"domains[{i}]: values must be integers in [1, {inst.d}], got {bad}")

    if len(inst.unary) != inst.n:
        out.append(f"unary: expected {inst.n} tables, got {len(inst.unary)}")
    for i, table in enumerate(inst.unary[: inst.n]):
        dom = set(inst.domains[i]) if i < len(inst.domains) else set()
        extra = [v for v in table if v not in dom]
        if extra:
            out.append(f"unary[{i}]: keys must lie in the agent's domain, got {extra}")
        neg = {v: c for v, c in table.items() if c < 0}
        if neg:
            out.append(f"unary[{i}]: costs ≥ 0 required, got {neg}")

    if inst.kind == "dcop":
        if any(table for table in inst.privacy):
            out.append("privacy: must be empty for kind=dcop")
    else:
        if len(inst.privacy) != inst.n:
            out.append("privacy: privacy table required (one per agent) for "
                        f"kind={inst.kind}")
        for i, table in enumerate(inst.privacy[: inst.n]):
            dom = set(inst.domains[i]) if i < len(inst.domains) else set()
            for key, cost in table.items():
                if cost < 0:
                    out.append(f"privacy[{i}]: costs ≥ 0 required, got {key}: {cost}")
                if inst.kind == "udcop":
                    if key not in dom:
                        out.append(f"privacy[{i}]: key {key!r} not in the agent's domain")
                else:
                    v = _constraint_id_value(key)
                    if v is None or v not in dom:
                        out.append(f"privacy[{i}]: key {key!r} is not a constraint id "
                                    "of the form c<value> over the agent's domain")

    gc = inst.global_constraint
    if gc.type != "all_equal":
        out.append(f"global.type: must be 'all_equal', got {gc.type!r}")
    if not (gc.penalty > 0):
        out.append(f"global.penalty: penalty > 0 required, got {gc.penalty}")
    return out


def _constraint_id_value(key) -> int | None:
    if not isinstance(key, str) or not key.startswith("c"):
        return None
    try:
        return int(key[1:])
    except ValueError:
        return None


def solution_cost(inst: Instance, assignment: Sequence[int]) -> float:
    """Total cost of a complete assignment: unary costs plus the all-equal
    penalty when the agents disagree. May be infinite."""
    if len(assignment) != inst.n:
        raise IncompleteAssignmentError(
            f"assignment has {len(assignment)} values, instance has {inst.n} agents")
    total = 0.0
    first = None
    equal = True
    for i, v in enumerate(assignment):
        if v is None:
            raise IncompleteAssignmentError(f"agent {i} has no assigned value")
        if v not in inst.domains[i]:
            raise ValueError(f"agent {i}: value {v} not in its domain")
        if first is None:
            first = v
        elif v != first:
            equal = False
        total += inst.unary_cost(i, v)
    if not equal:
        total += inst.global_constraint.penalty
    return total


# ---------------------------------------------------------------------------
# File format
#
# A single JSON document:
#   kind     "dcop" | "udcop" | "udcoppc"
#   n, d     integers
#   domains  array of n arrays of values
#   unary    array of n {value: cost} maps
#   privacy  array of n maps; keys are values (udcop) or "c<value>" ids
#            (udcoppc); omitted or empty for dcop
#   global   {"type": "all_equal", "penalty": number | "inf"}
# ---------------------------------------------------------------------------


def instance_to_json(inst: Instance) -> str:
    """Canonical JSON text for an instance (stable bytes for equal inputs)."""
    def unary_map(table: dict) -> dict:
        return {str(v): float(table[v]) for v in sorted(table)}

    def privacy_map(table: dict) -> dict:
        if inst.kind == "udcoppc":
            keys = sorted(table, key=lambda k: _constraint_id_value(k) or 0)
            return {str(k): float(table[k]) for k in keys}
        return {str(v): float(table[v]) for v in sorted(table)}

    penalty = inst.global_constraint.penalty
    doc = {
        "kind": inst.kind,
        "n": inst.n,
        "d": inst.d,
        "domains": [list(dom) for dom in inst.domains],
        "unary": [unary_map(t) for t in inst.unary],
        "privacy": [privacy_map(t) for t in inst.privacy],
        "global": {
            "type": inst.global_constraint.type,
            "penalty": "inf" if math.isinf(penalty) else float(penalty),
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(instance_to_json(inst), encoding="utf-8")


def instance_from_json(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"not valid JSON: {e.msg} (line {e.lineno})") from e
    if not isinstance(doc, dict):
        raise InstanceFormatError("top-level value must be an object")

    for name in ("kind", "n", "d", "domains", "unary", "global"):
        if name not in doc:
            raise InstanceFormatError(f"missing field '{name}'")

    kind = doc["kind"]
    if kind not in KINDS:
        raise InstanceFormatError(f"field 'kind': expected one of {'/'.join(KINDS)}, "
                                  f"got {kind!r}")
    n, d = doc["n"], doc["d"]
    if not isinstance(n, int) or not isinstance(d, int):
        raise InstanceFormatError("fields 'n' and 'd' must be integers")

    def parse_domains(raw) -> tuple:
        if not isinstance(raw, list):
            raise InstanceFormatError("field 'domains': expected an array")
        return tuple(tuple(int(v) for v in dom) for dom in raw)

    def parse_tables(raw, name: str, key_parser) -> tuple:
        if not isinstance(raw, list):
            raise InstanceFormatError(f"field '{name}': expected an array of maps")
        tables = []
        for i, table in enumerate(raw):
            if not isinstance(table, dict):
                raise InstanceFormatError(f"field '{name}[{i}]': expected a map")
            parsed = {}
            for k, c in table.items():
                try:
                    key = key_parser(k)
                except ValueError as e:
                    raise InstanceFormatError(f"field '{name}[{i}]': bad key {k!r}") from e
                if not isinstance(c, (int, float)):
                    raise InstanceFormatError(
                        f"field '{name}[{i}]': cost for {k!r} must be a number")
                parsed[key] = float(c)
            tables.append(parsed)
        return tuple(tables)

    privacy_key = str if kind == "udcoppc" else int
    gc_doc = doc["global"]
    if not isinstance(gc_doc, dict) or "type" not in gc_doc or "penalty" not in gc_doc:
        raise InstanceFormatError("field 'global': expected {type, penalty}")
    raw_penalty = gc_doc["penalty"]
    if raw_penalty == "inf":
        penalty = math.inf
    elif isinstance(raw_penalty, (int, float)):
        penalty = float(raw_penalty)
    else:
        raise InstanceFormatError("field 'global.penalty': expected a number or \"inf\"")

    inst = Instance(
        kind=kind,
        n=n,
        d=d,
        domains=parse_domains(doc["domains"]),
        unary=parse_tables(doc["unary"], "unary", int),
        privacy=parse_tables(doc.get("privacy", []), "privacy", privacy_key),
        global_constraint=GlobalConstraint(penalty=penalty, type=gc_doc["type"]),
    )
    violations = validate_instance(inst)
    if violations:
        raise InstanceValidationError(violations)
    return inst


def load_instance(path) -> Instance:
    """Load and validate an instance file.

    Raises InstanceFormatError on parse problems (naming the field) and
    InstanceValidationError when the document parses but breaks invariants.
    """
    return instance_from_json(Path(path).read_text(encoding="utf-8"))
