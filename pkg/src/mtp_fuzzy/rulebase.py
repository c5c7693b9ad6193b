"""JSON documents for rules and rule bases.

Triangular sets are written by their endpoints::

    {"left": -4, "center": -2, "right": 0}

Single rule::

    {"antecedent": <set>, "consequent": <set>, "universe": [lo, hi]}

Mamdani rule base (``method`` mamdani_mtp or mamdani_classic)::

    {"method": "mamdani_mtp", "signs": [1, -1],
     "delta_map": {"kind": "linear", "k": 1}, "defuzz_mode": "centroid",
     "rules": [{"antecedents": [<set>, <set>], "consequent": <set>}, ...]}

T-S rule base (``method`` ts_mtp, sugeno or wang_distance)::

    {"method": "ts_mtp", "epsilon": 0.0, "and_op": "min",
     "rules": [{"antecedents": [<set>], "coefficients": [c0, c1]}, ...]}

``universe``, ``delta_map``, ``defuzz_mode``, ``epsilon`` and ``and_op`` are
optional.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from .errors import FuzzyInputError
from .inference import DeltaMap, SingleRule
from .mamdani import MamdaniRule, MamdaniSystem
from .sets import TriangularSet
from .takagi_sugeno import TSRule, TSSystem

MAMDANI_METHODS = ("mamdani_mtp", "mamdani_classic")
TS_METHODS = ("ts_mtp", "sugeno", "wang_distance")
METHODS = MAMDANI_METHODS + TS_METHODS


def _get(doc, key, where):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise FuzzyInputError(f"{where}: missing field {key!r}") from None


def set_from_json(doc, where="set") -> TriangularSet:
    try:
        return TriangularSet.from_endpoints(
            float(_get(doc, "left", where)), float(_get(doc, "center", where)), float(_get(doc, "right", where))
        )
    except (TypeError, ValueError) as exc:
        raise FuzzyInputError(f"{where}: {exc}") from None


def set_to_json(s: TriangularSet) -> dict:
    return {"left": s.left, "center": s.center, "right": s.right}


def _universe(doc, where):
    u = doc.get("universe")
    if u is None:
        return None
    if not isinstance(u, list) or len(u) != 2:
        raise FuzzyInputError(f"{where}: universe must be [lo, hi]")
    lo, hi = float(u[0]), float(u[1])
    if not lo < hi:
        raise FuzzyInputError(f"{where}: empty universe [{lo}, {hi}]")
    return lo, hi


def single_rule_from_json(doc) -> tuple[SingleRule, Optional[tuple[float, float]]]:
    rule = SingleRule(
        set_from_json(_get(doc, "antecedent", "rule"), "antecedent"),
        set_from_json(_get(doc, "consequent", "rule"), "consequent"),
    )
    return rule, _universe(doc, "rule")


def mamdani_from_json(doc) -> MamdaniSystem:
    rules = []
    for j, r in enumerate(_get(doc, "rules", "rulebase")):
        where = f"rule {j}"
        rules.append(
            MamdaniRule(
                [set_from_json(a, where) for a in _get(r, "antecedents", where)],
                set_from_json(_get(r, "consequent", where), where),
            )
        )
    signs = doc.get("signs")
    if signs is None:
        signs = [1] * (len(rules[0].antecedents) if rules else 0)
    dm = doc.get("delta_map") or {}
    delta_map = DeltaMap(dm.get("kind", "linear"), float(dm.get("k", 1.0)), dm.get("limit"))
    return MamdaniSystem(rules, signs, delta_map, doc.get("defuzz_mode", "centroid"))


def mamdani_to_json(system: MamdaniSystem, method: str = "mamdani_mtp") -> dict:
    dm = system.delta_map
    return {
        "method": method,
        "signs": list(system.signs),
        "delta_map": {"kind": dm.kind, "k": dm.k, "limit": dm.limit},
        "defuzz_mode": system.defuzz_mode,
        "rules": [
            {"antecedents": [set_to_json(a) for a in r.antecedents], "consequent": set_to_json(r.consequent)}
            for r in system.rules
        ],
    }


def ts_from_json(doc) -> TSSystem:
    rules = []
    for j, r in enumerate(_get(doc, "rules", "rulebase")):
        where = f"rule {j}"
        rules.append(
            TSRule(
                [set_from_json(a, where) for a in _get(r, "antecedents", where)],
                [float(c) for c in _get(r, "coefficients", where)],
            )
        )
    return TSSystem(rules, float(doc.get("epsilon", 0.0)), doc.get("and_op", "min"))


def ts_to_json(system: TSSystem, method: str = "ts_mtp") -> dict:
    return {
        "method": method,
        "epsilon": system.epsilon,
        "and_op": system.and_op,
        "rules": [
            {"antecedents": [set_to_json(a) for a in r.antecedents], "coefficients": list(r.coefficients)}
            for r in system.rules
        ],
    }


def rulebase_from_json(doc, method: Optional[str] = None) -> tuple[str, Union[MamdaniSystem, TSSystem]]:
    """(method, system); ``method`` overrides the document's own field."""
    method = method or doc.get("method")
    if method in MAMDANI_METHODS:
        return method, mamdani_from_json(doc)
    if method in TS_METHODS:
        return method, ts_from_json(doc)
    raise FuzzyInputError(f"unknown or missing method {method!r}; choose from {METHODS}")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FuzzyInputError(f"{path}: invalid JSON ({exc})") from None
