"""Semi-invariant counters and flat-form group machinery.

Each documented counter is an integer diagram function that every catalog
move except its namesake preserves; the independence harness in
:mod:`sbl.independence` exercises exactly that.  Counters for M3 and M12
are not documented here and must be registered as plugins.

The blocked crossing pair rule
------------------------------

For a bond ``i``, an unordered pair of distinct bond-bond crossings
``{c1, c2}`` on its course (self-crossings of ``i`` excluded) is a
*blocked under-pair* of ``i`` when:

* ``i`` is the over strand at both crossings; let ``j`` and ``k`` be the
  bonds crossed (possibly ``j == k``, neither equal to ``i``);
* travelling along ``j``, the crossing ``c1`` lies strictly between two
  crossings at which ``j`` is the over strand (again ignoring
  self-crossings of ``j``), and likewise ``c2`` along ``k``.

The *blocked over-pair* notion swaps every "over" with "under".  The
enclosing pairs are not themselves required to be blocked, and the two
enclosing crossings may involve any bonds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .build import DiagramBuilder
from .diagram import (BB, BL, BONDED, E, M, X, Diagram, ModeError,
                      require_mode)
from .resolutions import NEGATIVE, POSITIVE, resolve

DOCUMENTED = ("M1", "M2", "M4", "M5", "M6", "M7", "M8", "M9", "M10", "M11")
PLUGIN_ONLY = ("M3", "M12")


class PluginMissingError(ModeError):
    pass


_plugins: dict[str, Callable[[Diagram], int]] = {}


def register_plugin(name: str, fn: Callable[[Diagram], int]) -> None:
    """Register a counter for a move without a documented one."""
    _plugins[name] = fn


def unregister_plugin(name: str) -> None:
    _plugins.pop(name, None)


def registered_plugins() -> dict[str, Callable[[Diagram], int]]:
    return dict(_plugins)


@dataclass(frozen=True)
class SemiInvariantProfile:
    values: dict[str, int]
    plugin_values: dict[str, int]

    def as_dict(self) -> dict[str, int]:
        out = dict(self.values)
        out.update(self.plugin_values)
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, SemiInvariantProfile)
                and self.values == other.values
                and self.plugin_values == other.plugin_values)


def _with_colors_shifted(d: Diagram, delta: int) -> Diagram:
    b = DiagramBuilder.from_diagram(d, f"{d.name}+{delta}")
    for bid in b.bond_ids():
        b.set_bond_color(bid, b.bond_color(bid) + delta)
    return b.freeze(validate=False)


def semi_invariant(d: Diagram, k: str) -> int:
    """The counter separating move ``k``; exact integer."""
    require_mode(d, BONDED)
    if k in PLUGIN_ONLY:
        if k in _plugins:
            return _plugins[k](d)
        raise PluginMissingError(
            f"no documented counter for {k}; register a plugin")
    if k == "M1":
        crossings = d.crossing_count((X,))
        colors = sum(b.color for b in d.bonds.values())
        return (crossings + colors) % 2
    if k == "M2":
        return d.projection_component_count()
    if k == "M4":
        return sum(1 for v in d.vertices.values()
                   if v.kind == BL and v.bond_over) % 2
    if k == "M5":
        return sum(1 for v in d.vertices.values()
                   if v.kind == BL and not v.bond_over) % 2
    if k == "M6":
        return sum(1 for bid in d.bonds
                   if blocked_pairs(d, bid, "under"))
    if k == "M7":
        return sum(1 for bid in d.bonds
                   if blocked_pairs(d, bid, "over"))
    if k == "M8":
        return sum(b.color for b in d.bonds.values())
    if k == "M9":
        return resolve(d, POSITIVE).link_component_count()
    if k == "M10":
        return resolve(d, NEGATIVE).link_component_count()
    if k == "M11":
        return resolve(_with_colors_shifted(d, 1),
                       POSITIVE).link_component_count()
    raise ValueError(f"unknown move name {k!r}")


def profile(d: Diagram) -> SemiInvariantProfile:
    """All documented counters plus any registered plugins."""
    require_mode(d, BONDED)
    values = {k: semi_invariant(d, k) for k in DOCUMENTED}
    plugin_values = {name: fn(d) for name, fn in sorted(_plugins.items())}
    return SemiInvariantProfile(values, plugin_values)


# -- blocked crossing pairs --------------------------------------------------


def _bond_crossing_course(d: Diagram, bid: str):
    """BB crossings along a bond in path order.

    Returns a list of (vertex_id, over_here, other_bond) triples, one per
    passage; a self-crossing appears twice with other_bond == bid.
    """
    course = []
    for dart_id in d.bonds[bid].dart_path:
        t = d.darts[d.darts[dart_id].twin]
        v = d.vertices[t.vertex]
        if v.kind != BB:
            continue
        over_here = t.slot % 2 == v.over_slot
        other = d.dart_at(t.vertex, (t.slot + 1) % 4).bond
        course.append((t.vertex, over_here, other))
    return course


def blocked_pairs(d: Diagram, bid: str, side: str) -> list[tuple[str, str]]:
    """All blocked pairs of one bond, as sorted vertex-id pairs.

    ``side="under"`` asks for blocked under-pairs (the bond passes over
    at both crossings); ``side="over"`` for the reflected notion.
    """
    require_mode(d, BONDED)
    if bid not in d.bonds:
        raise ModeError(f"unknown bond {bid}")
    if side not in ("under", "over"):
        raise ValueError("side must be 'under' or 'over'")
    owner_over = side == "under"

    course = _bond_crossing_course(d, bid)
    candidates = [(v, other) for v, over_here, other in course
                  if over_here == owner_over and other != bid]

    def enclosed(other_bid: str, vertex: str) -> bool:
        # along the other bond, is this crossing strictly between two
        # crossings where the other bond plays the owner's role?
        line = _bond_crossing_course(d, other_bid)
        pos = [i for i, (v, _o, _x) in enumerate(line) if v == vertex]
        strong = [i for i, (v, over_here, x) in enumerate(line)
                  if over_here == owner_over and x != other_bid]
        for p in pos:
            if any(i < p for i in strong) and any(i > p for i in strong):
                return True
        return False

    out = []
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            (v1, b1), (v2, b2) = candidates[i], candidates[j]
            if v1 == v2:
                continue
            if enclosed(b1, v1) and enclosed(b2, v2):
                pair = tuple(sorted((v1, v2)))
                if pair not in out:
                    out.append(pair)
    return sorted(out)


# -- flat forms, presentations, homology --------------------------------------


def is_flat_form(d: Diagram) -> bool:
    """True when no two link strands cross; bond crossings are allowed."""
    require_mode(d, BONDED)
    return d.crossing_count((X,)) == 0


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[tuple[tuple[str, int], ...], ...]

    def words(self) -> list[str]:
        out = []
        for rel in self.relators:
            parts = []
            for g, e in rel:
                parts.append(g if e == 1 else f"{g}^{e}")
            out.append("*".join(parts) if parts else "1")
        return out


@dataclass(frozen=True)
class AbelianInvariants:
    rank: int
    torsion: tuple[int, ...]


def group_presentation(d: Diagram) -> Presentation:
    """Generators and relators read off a flat form.

    One generator per link component; each bond contributes the relator
    ``g_i * g_j^(-e)`` where its endpoints sit on components i and j, and
    e is +1 exactly when the bond is even-colored and its band joins the
    strands coherently under the canonical orientation.
    """
    if not is_flat_form(d):
        raise ModeError("group presentations need a flat form")
    from .resolutions import _orientation_forward_darts, bond_attachment_data
    comp, forward = _orientation_forward_darts(d)
    ncomp = (max(comp.values()) + 1) if comp else 0
    gens = [f"x{i}" for i in range(ncomp)]
    for idx, _lid in enumerate(sorted(d.free_loops)):
        gens.append(f"x{ncomp + idx}")
    relators = []
    for bid in sorted(d.bonds):
        cu, cw, base = bond_attachment_data(d, bid, comp, forward)
        coherent = base and d.bonds[bid].color % 2 == 0
        eps = 1 if coherent else -1
        relators.append(((f"x{cu}", 1), (f"x{cw}", -eps)))
    return Presentation(tuple(gens), tuple(relators))


def first_homology(p: Presentation) -> AbelianInvariants:
    """Smith normal form of the abelianized relator matrix."""
    from .homology import abelian_invariants
    index = {g: i for i, g in enumerate(p.generators)}
    rows = []
    for rel in p.relators:
        row = [0] * len(p.generators)
        for g, e in rel:
            row[index[g]] += e
        rows.append(row)
    return abelian_invariants(len(p.generators), rows)
