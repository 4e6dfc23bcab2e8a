"""Ingestion and validation of generic finite Galois tower tables.

A tower table lists, per level, a finite group as elements plus a
multiplication table; between adjacent levels, a restriction map; and,
per named base place, per-level fiber lists with the group action and
the fiber restriction.  Validation is exhaustive: group axioms, the
homomorphism and surjectivity laws for restrictions, transitivity of
the fiber actions, and action/restriction compatibility.

Validated tables drive the same transition-table builder as the
built-in cyclotomic towers, through ``TableTowerView``.  The built-in
towers can be exported to this format (``export_tower_data``), which
anchors the validator and exercises the generic code path.

JSON schema "gtower/1":
  {"schema": "gtower/1",
   "levels": [{"name": str, "elements": [str], "mul": [[int]]}],
   "restrictions": [[int]],            # level i+1 element -> level i element
   "fibers": {"<place-label>": [       # one entry per level
       {"elements": [str], "action": [[int]], "res": [int]}]}}

``action[g][x]`` is the index of g(x); ``res`` sends a fiber element to
its restriction one level down (level 0 entries carry res = [0, ...]).
"""

from __future__ import annotations

from dataclasses import dataclass

from .cyclotomic import Tower, restrict as restrict_unit, unit_group
from .places import FinitePlace, act_on_place, fiber as place_fiber, places_above, restrict_place


@dataclass(frozen=True)
class LevelTable:
    name: str
    elements: tuple[str, ...]
    mul: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FiberTable:
    elements: tuple[str, ...]
    action: tuple[tuple[int, ...], ...]
    res: tuple[int, ...]


@dataclass
class GaloisTowerData:
    levels: list[LevelTable]
    restrictions: list[list[int]]
    fibers: dict[str, list[FiberTable]]


@dataclass(frozen=True)
class ValidationFailure:
    code: str
    detail: str


@dataclass
class ValidationReport:
    failures: tuple[ValidationFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first(self) -> ValidationFailure | None:
        return self.failures[0] if self.failures else None


def _check_group(level: LevelTable, idx: int, notes: list[ValidationFailure], cap: int):
    n = len(level.elements)
    mul = level.mul
    if len(mul) != n or any(len(row) != n for row in mul):
        notes.append(ValidationFailure("MALFORMED", f"level {idx}: mul table shape"))
        return None
    for row in mul:
        for v in row:
            if not (0 <= v < n):
                notes.append(ValidationFailure("MALFORMED", f"level {idx}: index {v} out of range"))
                return None
    identity = None
    for e in range(n):
        if all(mul[e][x] == x == mul[x][e] for x in range(n)):
            identity = e
            break
    if identity is None:
        notes.append(ValidationFailure("NO_IDENTITY", f"level {idx}"))
        return None
    for a in range(n):
        if len(notes) >= cap:
            return identity
        for b in range(n):
            for c in range(n):
                if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                    notes.append(
                        ValidationFailure("ASSOCIATIVITY", f"level {idx}: triple ({a},{b},{c})")
                    )
                    if len(notes) >= cap:
                        return identity
    for a in range(n):
        if not any(mul[a][b] == identity == mul[b][a] for b in range(n)):
            notes.append(ValidationFailure("NO_INVERSE", f"level {idx}: element {a}"))
    return identity


def validate_tower_data(data: GaloisTowerData, max_failures: int = 16) -> ValidationReport:
    """Exhaustive structural validation; returns failures, never raises."""
    notes: list[ValidationFailure] = []
    identities = []
    for idx, level in enumerate(data.levels):
        identities.append(_check_group(level, idx, notes, max_failures))
        if len(notes) >= max_failures:
            return ValidationReport(tuple(notes))

    if len(data.restrictions) != len(data.levels) - 1:
        notes.append(ValidationFailure("MALFORMED", "need one restriction per adjacent pair"))
        return ValidationReport(tuple(notes))
    for i, res in enumerate(data.restrictions):
        upper, lower = data.levels[i + 1], data.levels[i]
        if len(res) != len(upper.elements):
            notes.append(ValidationFailure("MALFORMED", f"restriction {i}: wrong length"))
            continue
        if set(res) != set(range(len(lower.elements))):
            notes.append(ValidationFailure("NOT_SURJECTIVE", f"restriction {i}"))
        for a in range(len(upper.elements)):
            for b in range(len(upper.elements)):
                if res[upper.mul[a][b]] != lower.mul[res[a]][res[b]]:
                    notes.append(
                        ValidationFailure("NOT_HOMOMORPHISM", f"restriction {i}: pair ({a},{b})")
                    )
                    break
            else:
                continue
            break

    for label, chain in data.fibers.items():
        if len(chain) != len(data.levels):
            notes.append(ValidationFailure("MALFORMED", f"fiber {label}: wrong level count"))
            continue
        for i, fib in enumerate(chain):
            group_n = len(data.levels[i].elements)
            m = len(fib.elements)
            if len(fib.action) != group_n or any(len(row) != m for row in fib.action):
                notes.append(ValidationFailure("MALFORMED", f"fiber {label} level {i}: action shape"))
                continue
            ident = identities[i]
            if ident is not None and any(fib.action[ident][x] != x for x in range(m)):
                notes.append(
                    ValidationFailure("NOT_ACTION", f"fiber {label} level {i}: identity moves a point")
                )
            mul = data.levels[i].mul
            for g in range(group_n):
                bad = False
                for h in range(group_n):
                    for x in range(m):
                        if fib.action[mul[g][h]][x] != fib.action[g][fib.action[h][x]]:
                            notes.append(
                                ValidationFailure(
                                    "NOT_ACTION", f"fiber {label} level {i}: ({g},{h},{x})"
                                )
                            )
                            bad = True
                            break
                    if bad:
                        break
                if bad:
                    break
            orbit = {0}
            frontier = [0]
            while frontier:
                x = frontier.pop()
                for g in range(group_n):
                    y = fib.action[g][x]
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)
            if len(orbit) != m:
                notes.append(
                    ValidationFailure("NOT_TRANSITIVE", f"fiber {label} level {i}")
                )
            if i > 0:
                prev = chain[i - 1]
                if len(fib.res) != m:
                    notes.append(ValidationFailure("MALFORMED", f"fiber {label} level {i}: res length"))
                    continue
                if set(fib.res) != set(range(len(prev.elements))):
                    notes.append(
                        ValidationFailure("NOT_SURJECTIVE", f"fiber {label} level {i}: res")
                    )
                rmap = data.restrictions[i - 1]
                for g in range(group_n):
                    ok = True
                    for x in range(m):
                        if fib.res[fib.action[g][x]] != prev.action[rmap[g]][fib.res[x]]:
                            notes.append(
                                ValidationFailure(
                                    "RES_ACTION_MISMATCH",
                                    f"fiber {label} level {i}: ({g},{x})",
                                )
                            )
                            ok = False
                            break
                    if not ok:
                        break
    return ValidationReport(tuple(notes[:max_failures]))


# --------------------------------------------------------------------------
# export of the built-in towers


def export_tower_data(tower: Tower, bases: list) -> GaloisTowerData:
    """Export a cyclotomic tower (groups, restrictions, fibers above the
    given rational places) to the generic table format."""
    levels = []
    unit_lists = []
    for n in tower.conductors:
        units = unit_group(n)
        unit_lists.append(units)
        index = {g.unit: i for i, g in enumerate(units)}
        mul = tuple(
            tuple(index[g.compose(h).unit] for h in units) for g in units
        )
        levels.append(LevelTable(f"Q(zeta_{n})", tuple(str(g.unit) for g in units), mul))
    restrictions = []
    for i in range(len(tower.conductors) - 1):
        lower_index = {g.unit: j for j, g in enumerate(unit_lists[i])}
        restrictions.append(
            [
                lower_index[restrict_unit(g, tower.conductors[i]).unit]
                for g in unit_lists[i + 1]
            ]
        )
    fibers: dict[str, list[FiberTable]] = {}
    for base in bases:
        base_place = places_above(1, base)[0]
        chain = []
        prev_places: list[FinitePlace] = []
        for i, n in enumerate(tower.conductors):
            pls = place_fiber(base_place, n)
            place_index = {pl: j for j, pl in enumerate(pls)}
            action = tuple(
                tuple(place_index[act_on_place(g, pl)] for pl in pls)
                for g in unit_lists[i]
            )
            if i == 0:
                res = tuple(0 for _ in pls)
            else:
                prev_index = {pl: j for j, pl in enumerate(prev_places)}
                res = tuple(
                    prev_index[restrict_place(pl, tower.conductors[i - 1])] for pl in pls
                )
            chain.append(FiberTable(tuple(pl.serialize() for pl in pls), action, res))
            prev_places = pls
        fibers[base_place.serialize()] = chain
    return GaloisTowerData(levels, restrictions, fibers)


# --------------------------------------------------------------------------
# tower view over validated tables


@dataclass(frozen=True)
class TableElement:
    level_idx: int
    index: int


@dataclass(frozen=True)
class TablePlace:
    level_idx: int
    index: int
    label: str


class TableTowerView:
    """Transition-builder view over a validated tower table and one of its
    named base places.  The base level is always 0."""

    def __init__(self, data: GaloisTowerData, base_label: str):
        report = validate_tower_data(data)
        if not report.ok:
            raise ValueError(f"tower table invalid: {report.first}")
        if base_label not in data.fibers:
            raise KeyError(f"no fiber data for {base_label!r}")
        self.data = data
        self.base_label = base_label
        self.chain = data.fibers[base_label]
        self._identities = []
        for level in data.levels:
            n = len(level.elements)
            ident = next(
                e for e in range(n) if all(level.mul[e][x] == x for x in range(n))
            )
            self._identities.append(ident)

    @property
    def depth(self) -> int:
        return len(self.data.levels) - 1

    @property
    def base_index(self) -> int:
        return 0

    def base_place(self) -> TablePlace:
        return TablePlace(0, 0, self.chain[0].elements[0])

    def group(self, idx: int) -> list[TableElement]:
        return [TableElement(idx, i) for i in range(len(self.data.levels[idx].elements))]

    def identity_element(self, idx: int) -> TableElement:
        return TableElement(idx, self._identities[idx])

    def mul(self, g: TableElement, h: TableElement) -> TableElement:
        return TableElement(g.level_idx, self.data.levels[g.level_idx].mul[g.index][h.index])

    def inv(self, g: TableElement) -> TableElement:
        mul = self.data.levels[g.level_idx].mul
        ident = self._identities[g.level_idx]
        for b in range(len(mul)):
            if mul[g.index][b] == ident:
                return TableElement(g.level_idx, b)
        raise ArithmeticError("element has no inverse (table invalid)")

    def restrict_group(self, g: TableElement, idx: int) -> TableElement:
        cur = g
        while cur.level_idx > idx:
            cur = TableElement(
                cur.level_idx - 1, self.data.restrictions[cur.level_idx - 1][cur.index]
            )
        return cur

    def in_kernel(self, g: TableElement, idx: int) -> bool:
        return self.restrict_group(g, idx).index == self._identities[idx]

    def places_above(self, v: TablePlace, idx: int) -> list[TablePlace]:
        fib = self.chain[idx]
        return [
            TablePlace(idx, i, fib.elements[i])
            for i in range(len(fib.elements))
            if self.restrict_place(TablePlace(idx, i, fib.elements[i]), v.level_idx) == v
        ]

    def restrict_place(self, place: TablePlace, idx: int) -> TablePlace:
        cur = place
        while cur.level_idx > idx:
            down = self.chain[cur.level_idx].res[cur.index]
            cur = TablePlace(cur.level_idx - 1, down, self.chain[cur.level_idx - 1].elements[down])
        return cur

    def act(self, g: TableElement, place: TablePlace) -> TablePlace:
        if g.level_idx != place.level_idx:
            raise ValueError("action needs matching levels")
        fib = self.chain[place.level_idx]
        j = fib.action[g.index][place.index]
        return TablePlace(place.level_idx, j, fib.elements[j])

    def level_index_of(self, place: TablePlace) -> int:
        return place.level_idx


# --------------------------------------------------------------------------
# JSON (schema gtower/1)


def tower_data_to_json(data: GaloisTowerData) -> dict:
    return {
        "schema": "gtower/1",
        "levels": [
            {"name": lv.name, "elements": list(lv.elements), "mul": [list(r) for r in lv.mul]}
            for lv in data.levels
        ],
        "restrictions": [list(r) for r in data.restrictions],
        "fibers": {
            label: [
                {
                    "elements": list(f.elements),
                    "action": [list(r) for r in f.action],
                    "res": list(f.res),
                }
                for f in chain
            ]
            for label, chain in data.fibers.items()
        },
    }


def tower_data_from_json(doc: dict) -> GaloisTowerData:
    if doc.get("schema") != "gtower/1":
        raise ValueError("not a gtower/1 document")
    levels = [
        LevelTable(
            lv["name"],
            tuple(lv["elements"]),
            tuple(tuple(int(v) for v in row) for row in lv["mul"]),
        )
        for lv in doc["levels"]
    ]
    restrictions = [[int(v) for v in row] for row in doc["restrictions"]]
    fibers = {
        label: [
            FiberTable(
                tuple(f["elements"]),
                tuple(tuple(int(v) for v in row) for row in f["action"]),
                tuple(int(v) for v in f["res"]),
            )
            for f in chain
        ]
        for label, chain in doc["fibers"].items()
    }
    return GaloisTowerData(levels, restrictions, fibers)
