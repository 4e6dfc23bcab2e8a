"""Transition tables: coherent choices of Galois elements moving places.

A transition table at depth d assigns to every ordered pair (x, y) of
depth-d places above a base place a group element carrying x to y,
subject to three laws (identity on the diagonal, transport, cocycle)
plus level containment: pairs sharing a level-i restriction receive
elements that fix the level-i subfield pointwise.  Level containment
is the finite-depth form of continuity: the table is constant on
cylinder pairs.

The builder follows a two-stage recursion: a base table from one
transport element per place, then one refinement sweep per tower level
that conjugates the previous table into the kernel of that level.  All
choices are broken deterministically (first or last candidate in the
canonical order), so rebuilding yields bit-identical tables.

Everything is written against a small tower-view interface so that
ingested multiplication-table towers (see ``towerdata``) run through
the same code path as the built-in cyclotomic towers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .cyclotomic import (
    CycloElement,
    GaloisElement,
    Tower,
    apply_automorphism,
    embed,
    identity,
    restrict,
    restrict_element,
    unit_group,
)
from .errors import InvalidDepthError, KeyMismatchError, NotLocallyConstantError
from .places import FinitePlace, act_on_place, fiber, places_above, restrict_place


class CyclotomicTowerView:
    """Tower-view adapter for the built-in cyclotomic towers.

    Group elements are unit automorphisms, places are decomposition
    cosets; both come in a canonical ascending order.
    """

    def __init__(self, tower: Tower):
        self.tower = tower

    @property
    def depth(self) -> int:
        return self.tower.depth

    @property
    def base_index(self) -> int:
        return self.tower.base_index

    def conductor(self, idx: int) -> int:
        return self.tower.conductors[idx]

    def group(self, idx: int) -> list[GaloisElement]:
        return unit_group(self.conductor(idx))

    def identity_element(self, idx: int) -> GaloisElement:
        return identity(self.conductor(idx))

    def mul(self, g: GaloisElement, h: GaloisElement) -> GaloisElement:
        return g.compose(h)

    def inv(self, g: GaloisElement) -> GaloisElement:
        return g.inverse()

    def restrict_group(self, g: GaloisElement, idx: int) -> GaloisElement:
        return restrict(g, self.conductor(idx))

    def in_kernel(self, g: GaloisElement, idx: int) -> bool:
        return self.restrict_group(g, idx).is_identity()

    def places_above(self, v: FinitePlace, idx: int) -> list[FinitePlace]:
        return fiber(v, self.conductor(idx))

    def restrict_place(self, place: FinitePlace, idx: int) -> FinitePlace:
        return restrict_place(place, self.conductor(idx))

    def act(self, g: GaloisElement, place: FinitePlace) -> FinitePlace:
        return act_on_place(g, place)

    def level_index_of(self, place: FinitePlace) -> int:
        return self.tower.level_of(place.level)


@dataclass
class TransitionDiagram:
    """A verified-or-verifiable transition table at a fixed depth."""

    view: object
    base_place: FinitePlace | Hashable
    depth: int
    places: tuple
    table: dict
    base_point: Hashable

    def entry(self, x, y):
        return self.table[(x, y)]

    @property
    def tower(self):
        return getattr(self.view, "tower", None)


def build_transition(view, v, depth: int, tie_break: str = "least") -> TransitionDiagram:
    """Construct a transition table above v at the given depth.

    ``tie_break`` selects among equally valid transport elements and
    anchor places ("least" or "greatest" in canonical order); any choice
    yields a valid table, so two tie-break rules give two independently
    built charts.
    """
    if not (0 <= depth <= view.depth):
        raise InvalidDepthError(f"depth {depth} outside tower range")
    base_idx = view.base_index
    if view.level_index_of(v) != base_idx:
        raise InvalidDepthError("base place must live at the tower's base level")
    if tie_break == "least":
        pick = lambda seq: seq[0]
    elif tie_break == "greatest":
        pick = lambda seq: seq[-1]
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")

    Y = tuple(view.places_above(v, depth))
    G = view.group(depth)
    r = pick(Y)

    def transporter(x, target, kernel_idx):
        cands = [
            g
            for g in G
            if view.in_kernel(g, kernel_idx) and view.act(g, x) == target
        ]
        if not cands:
            raise ArithmeticError("no transport element; fiber action not transitive")
        return pick(cands)

    sigma = {x: transporter(x, r, base_idx) for x in Y}
    table = {
        (x, y): view.mul(view.inv(sigma[y]), sigma[x]) for x in Y for y in Y
    }

    for i in range(base_idx + 1, depth + 1):
        W = view.places_above(v, i)
        anchors = {}
        for w in W:
            block = [x for x in Y if view.restrict_place(x, i) == w]
            anchors[w] = pick(block)
        tau = {x: transporter(x, anchors[view.restrict_place(x, i)], i) for x in Y}
        table = {
            (x, y): view.mul(
                view.inv(tau[y]),
                view.mul(table[(anchors[view.restrict_place(x, i)], anchors[view.restrict_place(y, i)])], tau[x]),
            )
            for x in Y
            for y in Y
        }

    return TransitionDiagram(view, v, depth, Y, table, r)


@dataclass(frozen=True)
class TDReport:
    ok: bool
    checked_pairs: int
    checked_triples: int
    failures: tuple[str, ...]


def verify_td(td: TransitionDiagram, max_failures: int = 10) -> TDReport:
    """Exhaustively check the three table laws plus level containment."""
    view = td.view
    Y = td.places
    failures: list[str] = []

    def note(msg: str):
        if len(failures) < max_failures:
            failures.append(msg)

    pairs = 0
    for x in Y:
        for y in Y:
            pairs += 1
            g = td.table.get((x, y))
            if g is None:
                note(f"missing entry ({x}, {y})")
                continue
            if x == y and g != view.identity_element(td.depth):
                note(f"identity law fails at {x}")
            if view.act(g, x) != y:
                note(f"transport law fails at ({x}, {y})")
            ginv = view.inv(g)
            if td.table.get((y, x)) != ginv:
                note(f"inverse symmetry fails at ({x}, {y})")
    triples = 0
    for x in Y:
        for y in Y:
            gxy = td.table[(x, y)]
            for z in Y:
                triples += 1
                if view.mul(td.table[(y, z)], gxy) != td.table[(x, z)]:
                    note(f"cocycle fails at ({x}, {y}, {z})")
    base_idx = view.base_index
    for i in range(base_idx, td.depth + 1):
        for x in Y:
            rx = view.restrict_place(x, i)
            for y in Y:
                if view.restrict_place(y, i) == rx:
                    if not view.in_kernel(td.table[(x, y)], i):
                        note(f"level containment fails at level {i} for ({x}, {y})")
    return TDReport(not failures, pairs, triples, tuple(failures))


# --------------------------------------------------------------------------
# transport of value slices and open families (cyclotomic views only)


def _require_cyclotomic(td: TransitionDiagram) -> Tower:
    tower = td.tower
    if tower is None:
        raise TypeError("value transport requires a cyclotomic tower view")
    return tower


def transport_slice(
    td: TransitionDiagram, r: FinitePlace, slice_map: dict[FinitePlace, CycloElement]
) -> dict[FinitePlace, CycloElement]:
    """y -> table[(y, r)] applied to the value at y.

    When the input is constant on level-i cylinders with values in the
    level-i subfield, the output is constant on those cylinders.
    """
    _require_cyclotomic(td)
    if set(slice_map) != set(td.places):
        raise KeyMismatchError("slice keys must be exactly the diagram's places")
    if r not in td.places:
        raise KeyMismatchError("anchor place is not in the diagram")
    return {
        y: apply_automorphism(td.table[(y, r)], slice_map[y]) for y in td.places
    }


def constancy_level(
    tower: Tower, mapping: dict[FinitePlace, CycloElement], from_level: int = 0
) -> int:
    """Least tower level index at which the mapping is constant on every
    cylinder block of its key set."""
    keys = list(mapping)
    for idx in range(from_level, tower.depth + 1):
        n = tower.conductors[idx]
        blocks: dict[FinitePlace, object] = {}
        ok = True
        for y in keys:
            b = restrict_place(y, n)
            if b in blocks:
                if blocks[b] != mapping[y]:
                    ok = False
                    break
            else:
                blocks[b] = mapping[y]
        if ok:
            return idx
    return tower.depth


@dataclass(frozen=True)
class ChartAgreementReport:
    ok: bool
    compare_from: int
    profile_a: int
    profile_b: int
    detail: str = ""


def chart_independence_check(
    slice_map: dict[FinitePlace, CycloElement],
    charts_a: list[TransitionDiagram],
    charts_b: list[TransitionDiagram],
) -> ChartAgreementReport:
    """Transport one slice through two chart families and compare the least
    cylinder level at which both transports are locally constant.

    Each family must cover the slice's places with disjoint fibers (one
    diagram per base place).  Levels below a family's base field see
    only whole fibers, so profiles are compared from the deeper of the
    two base levels upward.
    """

    def family_profile(charts: list[TransitionDiagram]) -> tuple[int, int]:
        base_idx = max(c.view.base_index for c in charts)
        covered: set[FinitePlace] = set()
        level = 0
        for td in charts:
            tower = _require_cyclotomic(td)
            sub = {y: slice_map[y] for y in td.places}
            if set(sub) & covered:
                raise KeyMismatchError("chart fibers overlap")
            covered.update(sub)
            out = transport_slice(td, td.base_point, sub)
            level = max(level, constancy_level(tower, out))
        if covered != set(slice_map):
            raise KeyMismatchError("charts do not cover the slice")
        return base_idx, level

    base_a, prof_a = family_profile(charts_a)
    base_b, prof_b = family_profile(charts_b)
    floor = max(base_a, base_b)
    a_eff = max(prof_a, floor)
    b_eff = max(prof_b, floor)
    return ChartAgreementReport(
        a_eff == b_eff,
        floor,
        a_eff,
        b_eff,
        "" if a_eff == b_eff else f"profiles differ: {a_eff} vs {b_eff}",
    )


# --------------------------------------------------------------------------
# open-family transport (J-form)


@dataclass(frozen=True)
class BallSpec:
    """A p-adic ball given globally: center in E, radius p^(-k)."""

    center: CycloElement
    k: int


@dataclass(frozen=True)
class JForm:
    """Normalized transported open family: one ball per maximal cylinder."""

    level: int
    entries: tuple[tuple[FinitePlace, CycloElement, int], ...]
    open_verdict: bool


def transport_open(
    td: TransitionDiagram,
    r: FinitePlace,
    ball_map: dict[FinitePlace, BallSpec],
    expected_level: int | None = None,
) -> JForm:
    """Transport a cylinder-structured family of balls through the chart.

    Radii are preserved exactly (the group acts isometrically), centers
    are moved by the table, and identical transported balls are grouped
    by maximal cylinders.  ``expected_level`` asserts the input is
    cylinder-structured at that level with centers in that level's
    subfield; violations raise NOT_LOCALLY_CONSTANT.
    """
    tower = _require_cyclotomic(td)
    if set(ball_map) != set(td.places):
        raise KeyMismatchError("ball keys must be exactly the diagram's places")
    top = tower.top

    if expected_level is not None:
        n_exp = tower.conductors[expected_level]
        struct = constancy_level(
            tower, {y: (b.center, b.k) for y, b in ball_map.items()}
        )
        if struct > expected_level:
            raise NotLocallyConstantError(
                f"family varies below cylinder level {expected_level}"
            )
        for b in set(ball_map.values()):
            if restrict_element(embed(b.center, top), n_exp) is None:
                raise NotLocallyConstantError(
                    f"center not in the level-{n_exp} subfield"
                )

    transported: dict[FinitePlace, tuple[CycloElement, int]] = {}
    for y, ball in ball_map.items():
        center = embed(ball.center, top)
        transported[y] = (apply_automorphism(td.table[(y, r)], center), ball.k)

    level = constancy_level(tower, transported)
    n_level = tower.conductors[level]
    grouped: dict[FinitePlace, tuple[CycloElement, int]] = {}
    for y, val in transported.items():
        grouped[restrict_place(y, n_level)] = val
    entries = tuple(
        (cyl, center, k) for cyl, (center, k) in sorted(grouped.items(), key=lambda kv: kv[0].coset_rep)
    )
    return JForm(level, entries, True)


def j_independence_check(
    ball_map: dict[FinitePlace, BallSpec],
    charts_a: list[TransitionDiagram],
    charts_b: list[TransitionDiagram],
    expected_level: int | None = None,
) -> ChartAgreementReport:
    """Compare openness verdicts and grouping levels across two chart
    families, clamped to the deeper base level as in the slice check."""

    def family(charts: list[TransitionDiagram]) -> tuple[int, int, bool]:
        base_idx = max(c.view.base_index for c in charts)
        level = 0
        verdict = True
        covered: set[FinitePlace] = set()
        for td in charts:
            sub = {y: ball_map[y] for y in td.places}
            covered.update(sub)
            j = transport_open(td, td.base_point, sub, expected_level)
            level = max(level, j.level)
            verdict = verdict and j.open_verdict
        if covered != set(ball_map):
            raise KeyMismatchError("charts do not cover the family")
        return base_idx, level, verdict

    base_a, lvl_a, open_a = family(charts_a)
    base_b, lvl_b, open_b = family(charts_b)
    floor = max(base_a, base_b)
    a_eff = max(lvl_a, floor)
    b_eff = max(lvl_b, floor)
    ok = (a_eff == b_eff) and (open_a == open_b)
    return ChartAgreementReport(
        ok, floor, a_eff, b_eff, "" if ok else f"J-forms differ: {(a_eff, open_a)} vs {(b_eff, open_b)}"
    )


# --------------------------------------------------------------------------
# depth coherence (recorded, not asserted)


@dataclass(frozen=True)
class DepthCoherenceReport:
    pairs: int
    matching: int

    @property
    def rate(self) -> float:
        return self.matching / self.pairs if self.pairs else 1.0


def depth_coherence_report(view, v, shallow_depth: int, tie_break: str = "least") -> DepthCoherenceReport:
    """Compare the depth-(d+1) table, restricted down, with the depth-d
    table on restricted pairs.  Agreement is not guaranteed by the laws;
    the observed rate is recorded for study."""
    td_small = build_transition(view, v, shallow_depth, tie_break)
    td_big = build_transition(view, v, shallow_depth + 1, tie_break)
    pairs = 0
    matching = 0
    for (x, y), g in td_big.table.items():
        rx = view.restrict_place(x, shallow_depth)
        ry = view.restrict_place(y, shallow_depth)
        pairs += 1
        if view.restrict_group(g, shallow_depth) == td_small.table[(rx, ry)]:
            matching += 1
    return DepthCoherenceReport(pairs, matching)
