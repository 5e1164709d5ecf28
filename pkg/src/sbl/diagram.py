"""Planar-map data model for bonded link diagrams.

A diagram is stored as a combinatorial map: vertices carry their incident
darts in counterclockwise order (the rotation system), and each edge is a
pair of twinned darts.  Crossing-free, vertex-free circles are kept as
separate ``FreeLoop`` records because they have no darts at all.

Vertex kinds
------------

``X``
    a crossing between two link strands; ``over_slot`` in {0, 1} says which
    opposite slot pair (slots ``over_slot`` and ``over_slot + 2``) is the
    over strand.
``BL``
    a crossing between a bond strand and a link strand; ``bond_over`` says
    whether the bond passes over the link.
``BB``
    a crossing between two bond strands (possibly the same bond crossing
    itself); ``over_slot`` as for ``X``.
``E``
    a bond endpoint sitting on a link strand.  Slots 0 and 1 carry the link
    strand, slot 2 carries the unique bond dart.  Because slot 2 is
    reserved, endpoint rotations admit no nontrivial re-slotting.
``M``
    a marked vertex (marked-graph mode).  ``positive_slot`` in {0, 1}
    records the smoothing convention: the positive resolution joins the
    dart at slot p to the dart at slot p+1 and the dart at p+2 to the dart
    at p+3; the negative resolution joins the complementary adjacent pairs.

At every 4-valent vertex, opposite slots (i and i+2 mod 4) carry the same
strand passing straight through the vertex.

Modes: ``classical`` diagrams have no bonds and no bond-related or marked
vertices; ``bonded`` diagrams have no marked vertices; ``marked`` diagrams
have no bonds.  A classical diagram is accepted anywhere a bonded or
marked diagram is expected (it is a degenerate case of both).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

LINK = "link"
BOND = "bond"

X = "X"
BL = "BL"
BB = "BB"
E = "E"
M = "M"

VERTEX_KINDS = (X, BL, BB, E, M)
FOUR_VALENT = frozenset({X, BL, BB, M})

CLASSICAL = "classical"
BONDED = "bonded"
MARKED = "marked"
MODES = (CLASSICAL, BONDED, MARKED)


class DiagramError(Exception):
    """Raised for structural misuse: wrong mode, unknown ids, bad slots."""


class ModeError(DiagramError):
    """Raised when an operation is given a diagram in the wrong mode."""


@dataclass(frozen=True)
class Dart:
    id: str
    twin: str
    vertex: str
    slot: int
    strand_kind: str
    edge: str
    bond: Optional[str] = None


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str
    over_slot: Optional[int] = None      # X, BB
    bond_over: Optional[bool] = None     # BL
    positive_slot: Optional[int] = None  # M
    bond: Optional[str] = None           # E

    def degree(self) -> int:
        return 4 if self.kind in FOUR_VALENT else 3


@dataclass(frozen=True)
class Bond:
    id: str
    color: int
    dart_path: tuple[str, ...]


@dataclass(frozen=True)
class FreeLoop:
    id: str
    strand_kind: str = LINK


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


class Diagram:
    """An immutable bonded link diagram.

    All mutation goes through :class:`sbl.build.DiagramBuilder`; operations
    on diagrams are pure functions returning new diagrams, so values can be
    shared freely between threads.
    """

    def __init__(self, name: str, mode: str,
                 vertices: dict[str, Vertex],
                 darts: dict[str, Dart],
                 bonds: dict[str, Bond],
                 free_loops: dict[str, FreeLoop]):
        if mode not in MODES:
            raise DiagramError(f"unknown mode {mode!r}")
        self.name = name
        self.mode = mode
        self.vertices = dict(vertices)
        self.darts = dict(darts)
        self.bonds = dict(bonds)
        self.free_loops = dict(free_loops)
        self._rotation: dict[str, tuple[str, ...]] = {}
        by_vertex: dict[str, dict[int, str]] = {}
        for d in self.darts.values():
            by_vertex.setdefault(d.vertex, {})[d.slot] = d.id
        for v, slots in by_vertex.items():
            self._rotation[v] = tuple(slots[i] for i in sorted(slots))

    # -- basic accessors -------------------------------------------------

    def rotation(self, vertex_id: str) -> tuple[str, ...]:
        """Dart ids at a vertex in counterclockwise slot order."""
        return self._rotation.get(vertex_id, ())

    def dart_at(self, vertex_id: str, slot: int) -> Dart:
        rot = self._rotation[vertex_id]
        return self.darts[rot[slot % len(rot)]]

    def twin(self, dart_id: str) -> Dart:
        return self.darts[self.darts[dart_id].twin]

    def edges(self) -> dict[str, tuple[Dart, Dart]]:
        """Edge id -> its two darts, the lexicographically smaller first."""
        out: dict[str, tuple[Dart, Dart]] = {}
        for d in self.darts.values():
            if d.edge not in out:
                t = self.darts[d.twin]
                a, b = sorted((d, t), key=lambda x: x.id)
                out[d.edge] = (a, b)
        return out

    def crossing_count(self, kinds: Iterable[str] = (X,)) -> int:
        ks = set(kinds)
        return sum(1 for v in self.vertices.values() if v.kind in ks)

    def bond_endpoints(self, bond_id: str) -> tuple[Vertex, Vertex]:
        ends = sorted((v for v in self.vertices.values()
                       if v.kind == E and v.bond == bond_id),
                      key=lambda v: v.id)
        if len(ends) != 2:
            raise DiagramError(f"bond {bond_id} has {len(ends)} endpoints")
        return ends[0], ends[1]

    # -- strand traversal ------------------------------------------------

    def continuation_slot(self, vertex_id: str, in_slot: int) -> Optional[int]:
        """Slot where a strand entering a vertex at ``in_slot`` leaves it.

        Crossings and marked vertices pass strands straight through
        (slot + 2); bond endpoints connect link slots 0 and 1, and the bond
        dart at slot 2 terminates (returns ``None``).
        """
        v = self.vertices[vertex_id]
        if v.kind in FOUR_VALENT:
            return (in_slot + 2) % 4
        if in_slot in (0, 1):
            return 1 - in_slot
        return None

    def next_along_strand(self, dart_id: str) -> Optional[str]:
        """Follow a dart across its edge and through the far vertex."""
        t = self.darts[self.darts[dart_id].twin]
        out = self.continuation_slot(t.vertex, t.slot)
        if out is None:
            return None
        return self._rotation[t.vertex][out]

    def _dart_components(self, unions) -> dict[str, int]:
        """Partition darts, merging per the callback ``unions(vertex)``.

        ``unions`` maps a vertex to a list of slot groups to be merged;
        twin darts are always merged.  Returns dart id -> component index
        (indices are arbitrary but deterministic).
        """
        parent: dict[str, str] = {d: d for d in self.darts}

        def find(a: str) -> str:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a: str, b: str) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        for d in self.darts.values():
            union(d.id, d.twin)
        for vid, rot in self._rotation.items():
            for group in unions(self.vertices[vid]):
                ids = [rot[s] for s in group]
                for other in ids[1:]:
                    union(ids[0], other)
        roots = sorted({find(d) for d in self.darts})
        index = {r: i for i, r in enumerate(roots)}
        return {d: index[find(d)] for d in self.darts}

    # -- counting operations ----------------------------------------------

    def link_component_count(self) -> int:
        """Number of closed link components of a classical diagram."""
        if self.mode != CLASSICAL:
            raise ModeError("link_component_count requires a classical diagram")

        def unions(v: Vertex):
            return [(0, 2), (1, 3)]

        comps = self._dart_components(unions)
        n = len(set(comps.values())) if comps else 0
        return n + len(self.free_loops)

    def projection_component_count(self) -> int:
        """Components of the flat projection graph.

        Link crossings and bond endpoints are graph vertices (they join all
        incident strands), bonds are graph edges, and bond-involving
        crossings are transparent: each strand passes straight through.
        """
        if self.mode == MARKED:
            raise ModeError("projection_component_count requires a bonded "
                            "or classical diagram")

        def unions(v: Vertex):
            if v.kind in (X, E):
                return [tuple(range(v.degree()))]
            return [(0, 2), (1, 3)]

        comps = self._dart_components(unions)
        n = len(set(comps.values())) if comps else 0
        return n + len(self.free_loops)

    def strand_components(self) -> dict[str, int]:
        """Partition of link darts into strand components.

        Strands pass straight through every crossing and through bond
        endpoints; bond darts are excluded.  Used for orientation
        assignments and group presentations.
        """

        def unions(v: Vertex):
            if v.kind in FOUR_VALENT:
                return [(0, 2), (1, 3)]
            return [(0, 1)]

        comps = self._dart_components(unions)
        link = {d: c for d, c in comps.items()
                if self.darts[d].strand_kind == LINK}
        renum: dict[int, int] = {}
        for d in sorted(link):
            renum.setdefault(link[d], len(renum))
        return {d: renum[c] for d, c in link.items()}

    # -- faces and planarity ----------------------------------------------

    def face_orbits(self) -> list[tuple[str, ...]]:
        """Faces traced from the rotation system.

        The successor of a dart d in its face walk is the rotation
        successor of twin(d).  Each orbit is one face of the component's
        abstract plane embedding.
        """
        succ: dict[str, str] = {}
        for d in self.darts.values():
            t = self.darts[d.twin]
            rot = self._rotation[t.vertex]
            succ[d.id] = rot[(t.slot + 1) % len(rot)]
        faces = []
        seen: set[str] = set()
        for start in sorted(succ):
            if start in seen:
                continue
            orbit = []
            cur = start
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cur = succ[cur]
            faces.append(tuple(orbit))
        return faces

    def dart_connected_components(self) -> list[set[str]]:
        """Connected components of the dart structure (free loops excluded)."""
        comps = self._dart_components(lambda v: [tuple(range(v.degree()))])
        groups: dict[int, set[str]] = {}
        for d, c in comps.items():
            groups.setdefault(c, set()).add(d)
        return [groups[k] for k in sorted(groups)]

    # -- validation --------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check every structural invariant; collects all failures."""
        bad: list[Violation] = []

        def err(rule: str, loc: str, msg: str) -> None:
            bad.append(Violation(rule, loc, msg))

        # dart level
        for d in self.darts.values():
            t = self.darts.get(d.twin)
            if t is None:
                err("twin", d.id, f"twin {d.twin} does not exist")
                continue
            if t.id == d.id:
                err("twin", d.id, "involution has fixed point")
            elif t.twin != d.id:
                err("twin", d.id, "twin is not an involution")
            if t.strand_kind != d.strand_kind:
                err("strand", d.id, "twin darts disagree on strand kind")
            if t.bond != d.bond:
                err("strand", d.id, "twin darts disagree on bond id")
            if d.vertex not in self.vertices:
                err("incidence", d.id, f"unknown vertex {d.vertex}")
            if (d.strand_kind == BOND) != (d.bond is not None):
                err("strand", d.id, "bond id present iff strand kind is bond")
            if d.bond is not None and d.bond not in self.bonds:
                err("incidence", d.id, f"unknown bond {d.bond}")
            if t.edge != d.edge:
                err("incidence", d.id, "twin darts disagree on edge id")

        # vertex level
        for v in self.vertices.values():
            rot = self._rotation.get(v.id, ())
            deg = v.degree()
            slots = sorted(self.darts[d].slot for d in rot)
            if slots != list(range(deg)):
                err("slots", v.id,
                    f"kind {v.kind} needs slots 0..{deg - 1}, found {slots}")
                continue
            kinds = [self.darts[rot[i]].strand_kind for i in range(deg)]
            if v.kind == X:
                if v.over_slot not in (0, 1):
                    err("decor", v.id, "crossing needs over_slot 0 or 1")
                if kinds != [LINK] * 4:
                    err("strand", v.id, "link crossing carries a bond dart")
            elif v.kind == BB:
                if v.over_slot not in (0, 1):
                    err("decor", v.id, "crossing needs over_slot 0 or 1")
                if kinds != [BOND] * 4:
                    err("strand", v.id, "bond crossing carries a link dart")
            elif v.kind == M:
                if v.positive_slot not in (0, 1):
                    err("decor", v.id, "marked vertex needs positive_slot 0 or 1")
                if kinds != [LINK] * 4:
                    err("strand", v.id, "marked vertex carries a bond dart")
            elif v.kind == BL:
                if v.bond_over is None:
                    err("decor", v.id, "bond-link crossing needs bond_over")
                pairs = {(kinds[0], kinds[2]), (kinds[1], kinds[3])}
                if pairs != {(LINK, LINK), (BOND, BOND)}:
                    err("strand", v.id,
                        "bond-link crossing needs one link pair and one bond pair")
            elif v.kind == E:
                if kinds != [LINK, LINK, BOND]:
                    err("strand", v.id,
                        f"endpoint needs link,link,bond at slots 0,1,2, found {kinds}")
                elif v.bond is None or self.darts[rot[2]].bond != v.bond:
                    err("incidence", v.id,
                        "endpoint bond id disagrees with its bond dart")
            if v.kind in (X, BB) and len(rot) == 4:
                if kinds == [LINK] * 4 or kinds == [BOND] * 4:
                    pass
                # opposite-pair agreement is implied for X/BB by the checks above
            if v.kind == BL and len(rot) == 4:
                if kinds[0] != kinds[2] or kinds[1] != kinds[3]:
                    err("strand", v.id, "opposite slots carry different strands")

        # bond level
        for b in self.bonds.values():
            ends = [v for v in self.vertices.values()
                    if v.kind == E and v.bond == b.id]
            if len(ends) != 2:
                err("bond", b.id, f"needs exactly 2 endpoints, found {len(ends)}")
            path_ok = True
            for did in b.dart_path:
                d = self.darts.get(did)
                if d is None or d.bond != b.id:
                    err("bond", b.id, f"path dart {did} does not belong to it")
                    path_ok = False
            if path_ok and b.dart_path:
                walked = self._walk_bond(b)
                if walked is None or set(walked) != {self.darts[x].edge
                                                     for x in b.dart_path}:
                    err("bond", b.id, "dart path does not connect its endpoints")
            owned = {d.id for d in self.darts.values() if d.bond == b.id}
            path_edges = {self.darts[x].edge for x in b.dart_path if x in self.darts}
            owned_edges = {self.darts[x].edge for x in owned}
            if owned and path_edges != owned_edges:
                err("bond", b.id, "path does not cover the bond's edges")

        for d in self.darts.values():
            if d.strand_kind == BOND and d.bond is None:
                err("bond", d.id, "bond dart without a bond")

        # mode consistency
        kinds_present = {v.kind for v in self.vertices.values()}
        if self.mode == CLASSICAL:
            if self.bonds or kinds_present & {BL, BB, E, M}:
                err("mode", self.name, "classical diagram carries bond or marked data")
        elif self.mode == BONDED:
            if M in kinds_present:
                err("mode", self.name, "bonded diagram carries marked vertices")
        elif self.mode == MARKED:
            if self.bonds or kinds_present & {BL, BB, E}:
                err("mode", self.name, "marked diagram carries bonds")

        # planarity: each connected dart component must be genus zero,
        # i.e. V - E + F = 2 with F counted from the rotation system.
        if not any(v.rule in ("twin", "slots", "incidence") for v in bad):
            faces = self.face_orbits()
            for comp in self.dart_connected_components():
                vs = {self.darts[d].vertex for d in comp}
                es = {self.darts[d].edge for d in comp}
                fs = sum(1 for f in faces if f[0] in comp)
                if len(vs) - len(es) + fs != 2:
                    err("planar", sorted(vs)[0],
                        "non-planar rotation system "
                        f"(V={len(vs)} E={len(es)} F={fs})")

        bad.sort(key=lambda v: (v.rule, v.location, v.message))
        return ValidationReport(not bad, tuple(bad))

    def _walk_bond(self, b: Bond) -> Optional[list[str]]:
        """Edge ids along a bond from its first endpoint, or None if broken."""
        if not b.dart_path:
            return None
        first = self.darts.get(b.dart_path[0])
        if first is None:
            return None
        edges = []
        cur = first
        for _ in range(len(b.dart_path) + 1):
            edges.append(cur.edge)
            t = self.darts[cur.twin]
            v = self.vertices.get(t.vertex)
            if v is None:
                return None
            if v.kind == E:
                return edges if len(edges) == len(b.dart_path) else None
            out = (t.slot + 2) % 4
            cur = self.darts[self._rotation[t.vertex][out]]
        return None

    # -- misc ----------------------------------------------------------------

    @cached_property
    def canonical_code(self) -> bytes:
        from .canonical import canonical_code
        return canonical_code(self)

    def __repr__(self) -> str:
        return (f"Diagram({self.name!r}, {self.mode}, "
                f"{len(self.vertices)}V {len(self.darts) // 2}E "
                f"{len(self.bonds)}B {len(self.free_loops)}L)")


def infer_mode(has_marked: bool, has_bond_data: bool) -> str:
    if has_marked and has_bond_data:
        raise DiagramError("diagram mixes marked vertices and bonds")
    if has_marked:
        return MARKED
    if has_bond_data:
        return BONDED
    return CLASSICAL


def require_mode(d: Diagram, *allowed: str) -> None:
    """Check mode compatibility; classical passes for bonded and marked."""
    if d.mode in allowed:
        return
    if d.mode == CLASSICAL and (BONDED in allowed or MARKED in allowed):
        return
    raise ModeError(f"operation needs mode in {allowed}, got {d.mode}")
