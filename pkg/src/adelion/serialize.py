"""Versioned JSON schemas for adeles, open sets and transition tables.

Schemas: "adele/1", "cadele/1", "uopen/1", "td/1" (tower tables carry
"gtower/1" in ``towerdata``, local-context caches "lctx/1" in
``localfield``).  Rationals serialize as "num/den" strings, places in
their stable text form.  ``dumps_canonical`` fixes key order and
separators so equal objects produce byte-identical documents.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .adeles import Adele, BasicOpen, ClassicalAdele, CylinderBall
from .cyclotomic import CycloElement, GaloisElement, Tower
from .places import FinitePlace
from .transition import CyclotomicTowerView, TransitionDiagram


def dumps_canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fraction_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fraction_from_str(s: str) -> Fraction:
    return Fraction(s)


def cyclo_to_json(x: CycloElement) -> dict:
    return {"level": x.level, "coeffs": [fraction_to_str(c) for c in x.coeffs]}


def cyclo_from_json(doc: dict) -> CycloElement:
    return CycloElement(int(doc["level"]), tuple(Fraction(c) for c in doc["coeffs"]))


def tower_to_json(t: Tower) -> dict:
    return {"conductors": list(t.conductors), "base_index": t.base_index}


def tower_from_json(doc: dict) -> Tower:
    return Tower(tuple(int(n) for n in doc["conductors"]), int(doc.get("base_index", 0)))


# --------------------------------------------------------------------------


def adele_to_json(a: Adele) -> dict:
    slices = []
    for p in sorted(a.slices):
        for place in sorted(a.slices[p], key=lambda pl: pl.coset_rep):
            slices.append(
                {"place": place.serialize(), "value": cyclo_to_json(a.slices[p][place])}
            )
    return {
        "schema": "adele/1",
        "tower": tower_to_json(a.tower),
        "depth": a.depth,
        "support": sorted(a.slices),
        "slices": slices,
        "default": cyclo_to_json(a.default),
    }


def adele_from_json(doc: dict) -> Adele:
    if doc.get("schema") != "adele/1":
        raise ValueError("not an adele/1 document")
    tower = tower_from_json(doc["tower"])
    slices: dict[int, dict[FinitePlace, CycloElement]] = {}
    for item in doc["slices"]:
        place = FinitePlace.parse(item["place"])
        slices.setdefault(place.base, {})[place] = cyclo_from_json(item["value"])
    return Adele(tower, int(doc["depth"]), slices, cyclo_from_json(doc["default"]))


def cadele_to_json(c: ClassicalAdele) -> dict:
    return {
        "schema": "cadele/1",
        "tower": tower_to_json(c.tower),
        "level_index": c.level_index,
        "entries": [
            {"place": place.serialize(), "value": cyclo_to_json(value)}
            for place, value in sorted(
                c.entries.items(), key=lambda kv: (str(kv[0].base), kv[0].coset_rep)
            )
        ],
        "default": cyclo_to_json(c.default),
    }


def cadele_from_json(doc: dict) -> ClassicalAdele:
    if doc.get("schema") != "cadele/1":
        raise ValueError("not a cadele/1 document")
    return ClassicalAdele(
        tower_from_json(doc["tower"]),
        int(doc["level_index"]),
        {
            FinitePlace.parse(item["place"]): cyclo_from_json(item["value"])
            for item in doc["entries"]
        },
        cyclo_from_json(doc["default"]),
    )


def basic_open_to_json(U: BasicOpen) -> dict:
    finite = []
    for p in sorted(U.finite):
        balls = [
            {
                "cylinder": ball.cylinder.serialize(),
                "center": cyclo_to_json(ball.center),
                "p": p,
                "k": ball.k,
            }
            for ball in sorted(U.finite[p], key=lambda b: (b.cylinder.level, b.cylinder.coset_rep))
        ]
        finite.append({"prime": p, "balls": balls})
    return {
        "schema": "uopen/1",
        "tower": tower_to_json(U.tower),
        "finite": finite,
        "arch": {
            "center": cyclo_to_json(U.arch_center),
            "radius": fraction_to_str(U.arch_radius),
        },
    }


def basic_open_from_json(doc: dict) -> BasicOpen:
    if doc.get("schema") != "uopen/1":
        raise ValueError("not a uopen/1 document")
    finite = {}
    for group in doc["finite"]:
        balls = tuple(
            CylinderBall(
                FinitePlace.parse(item["cylinder"]),
                cyclo_from_json(item["center"]),
                int(item["k"]),
            )
            for item in group["balls"]
        )
        finite[int(group["prime"])] = balls
    return BasicOpen(
        tower_from_json(doc["tower"]),
        finite,
        cyclo_from_json(doc["arch"]["center"]),
        Fraction(doc["arch"]["radius"]),
    )


def td_to_json(td: TransitionDiagram) -> dict:
    tower = td.tower
    if tower is None:
        raise TypeError("only cyclotomic transition tables serialize to td/1")
    entries = [
        {"x": x.serialize(), "y": y.serialize(), "unit": g.unit}
        for (x, y), g in sorted(
            td.table.items(), key=lambda kv: (kv[0][0].coset_rep, kv[0][1].coset_rep)
        )
    ]
    return {
        "schema": "td/1",
        "tower": tower_to_json(tower),
        "v": td.base_place.serialize(),
        "d": td.depth,
        "base_point": td.base_point.serialize(),
        "entries": entries,
    }


def td_from_json(doc: dict) -> TransitionDiagram:
    if doc.get("schema") != "td/1":
        raise ValueError("not a td/1 document")
    tower = tower_from_json(doc["tower"])
    view = CyclotomicTowerView(tower)
    depth = int(doc["d"])
    n_d = tower.conductors[depth]
    table = {}
    places = set()
    for item in doc["entries"]:
        x = FinitePlace.parse(item["x"])
        y = FinitePlace.parse(item["y"])
        places.add(x)
        places.add(y)
        table[(x, y)] = GaloisElement(n_d, int(item["unit"]))
    ordered = tuple(sorted(places, key=lambda pl: pl.coset_rep))
    return TransitionDiagram(
        view,
        FinitePlace.parse(doc["v"]),
        depth,
        ordered,
        table,
        FinitePlace.parse(doc["base_point"]),
    )


LOADERS = {
    "adele/1": adele_from_json,
    "cadele/1": cadele_from_json,
    "uopen/1": basic_open_from_json,
    "td/1": td_from_json,
}


def load_document(doc: dict):
    """Dispatch on the schema field."""
    schema = doc.get("schema")
    if schema not in LOADERS:
        raise ValueError(f"unknown schema {schema!r}")
    return LOADERS[schema](doc)
