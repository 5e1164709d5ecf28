"""Mutable construction kit for diagrams.

The builder keeps an adjacency view (vertex slot -> edge end) so that
surgery-style operations can detach, weld and dissolve freely; ``freeze``
mints the immutable dart structure, retraces bond paths and returns a
:class:`~sbl.diagram.Diagram`.

Edge ends are ``(edge_id, 0|1)`` pairs.  A detached end is *dangling*;
freeze refuses to run while anything dangles.  Welding the two ends of the
same edge produces a free loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagram import (BB, BL, BOND, BONDED, CLASSICAL, E, LINK, M, MARKED, X,
                      Bond, Dart, Diagram, DiagramError, FreeLoop, Vertex,
                      infer_mode)

EdgeEnd = tuple[str, int]


@dataclass
class _VertexRec:
    kind: str
    over_slot: Optional[int] = None
    bond_over: Optional[bool] = None
    positive_slot: Optional[int] = None
    bond: Optional[str] = None
    slots: list[Optional[EdgeEnd]] = field(default_factory=list)


@dataclass
class _EdgeRec:
    kind: str
    bond: Optional[str] = None
    # attachment of each end: (vertex_id, slot) or None while dangling
    ends: list[Optional[tuple[str, int]]] = field(default_factory=lambda: [None, None])


@dataclass
class _BondRec:
    color: int


class DiagramBuilder:
    def __init__(self, name: str = "d", mode: Optional[str] = None):
        self.name = name
        self.mode = mode
        self._vertices: dict[str, _VertexRec] = {}
        self._edges: dict[str, _EdgeRec] = {}
        self._bonds: dict[str, _BondRec] = {}
        self._loops: set[str] = set()
        self._fresh = 0
        # welds merge edges; references to ends of a merged-away edge are
        # redirected here so callers may hold stubs across surgery steps
        self._forward: dict[EdgeEnd, EdgeEnd] = {}

    def resolve_end(self, end: EdgeEnd) -> EdgeEnd:
        while end in self._forward:
            end = self._forward[end]
        return end

    # -- id minting --------------------------------------------------------

    def fresh_id(self, prefix: str) -> str:
        while True:
            self._fresh += 1
            cand = f"{prefix}{self._fresh}"
            if (cand not in self._vertices and cand not in self._edges
                    and cand not in self._bonds and cand not in self._loops):
                return cand

    # -- building ------------------------------------------------------------

    def add_vertex(self, kind: str, vid: Optional[str] = None, *,
                   over_slot: Optional[int] = None,
                   bond_over: Optional[bool] = None,
                   positive_slot: Optional[int] = None,
                   bond: Optional[str] = None) -> str:
        vid = vid or self.fresh_id("v")
        if vid in self._vertices:
            raise DiagramError(f"duplicate vertex id {vid}")
        degree = 3 if kind == E else 4
        self._vertices[vid] = _VertexRec(kind, over_slot, bond_over,
                                         positive_slot, bond,
                                         [None] * degree)
        return vid

    def add_edge(self, kind: str, eid: Optional[str] = None, *,
                 bond: Optional[str] = None) -> str:
        eid = eid or self.fresh_id("e")
        if eid in self._edges:
            raise DiagramError(f"duplicate edge id {eid}")
        self._edges[eid] = _EdgeRec(kind, bond)
        return eid

    def add_bond(self, color: int, bid: Optional[str] = None) -> str:
        bid = bid or self.fresh_id("b")
        if bid in self._bonds:
            raise DiagramError(f"duplicate bond id {bid}")
        self._bonds[bid] = _BondRec(color)
        return bid

    def add_loop(self, lid: Optional[str] = None) -> str:
        lid = lid or self.fresh_id("c")
        if lid in self._loops:
            raise DiagramError(f"duplicate loop id {lid}")
        self._loops.add(lid)
        return lid

    def attach(self, vertex_id: str, slot: int, end: EdgeEnd) -> None:
        v = self._vertices[vertex_id]
        if slot >= len(v.slots):
            raise DiagramError(f"slot {slot} out of range at {vertex_id}")
        if v.slots[slot] is not None:
            raise DiagramError(f"slot {slot} at {vertex_id} already occupied")
        eid, side = end = self.resolve_end(end)
        e = self._edges[eid]
        if e.ends[side] is not None:
            raise DiagramError(f"edge end {end} already attached")
        v.slots[slot] = end
        e.ends[side] = (vertex_id, slot)

    def free_end(self, eid: str) -> EdgeEnd:
        """The dangling end of an edge with exactly one attachment."""
        e = self._edges[eid]
        for side in (0, 1):
            if e.ends[side] is None:
                return (eid, side)
        raise DiagramError(f"edge {eid} has no dangling end")

    # -- surgery -----------------------------------------------------------

    def detach(self, vertex_id: str, slot: int) -> EdgeEnd:
        v = self._vertices[vertex_id]
        end = v.slots[slot]
        if end is None:
            raise DiagramError(f"slot {slot} at {vertex_id} is empty")
        v.slots[slot] = None
        self._edges[end[0]].ends[end[1]] = None
        return end

    def remove_edge(self, eid: str) -> None:
        e = self._edges.pop(eid)
        for side in (0, 1):
            if e.ends[side] is not None:
                vid, slot = e.ends[side]
                self._vertices[vid].slots[slot] = None

    def remove_vertex(self, vid: str) -> list[EdgeEnd]:
        """Delete a vertex; returns the edge ends that were attached, in
        slot order, now dangling."""
        v = self._vertices.pop(vid)
        out = []
        for end in v.slots:
            if end is not None:
                self._edges[end[0]].ends[end[1]] = None
                out.append(end)
        return out

    def remove_bond(self, bid: str) -> None:
        self._bonds.pop(bid)

    def remove_loop(self, lid: str) -> None:
        self._loops.remove(lid)

    def weld(self, a: EdgeEnd, b: EdgeEnd) -> None:
        """Join two dangling edge ends.

        Distinct edges merge into one (the other edge's remaining
        attachment is transferred); welding an edge to itself closes it
        into a free loop.
        """
        ea, sa = a = self.resolve_end(a)
        eb, sb = b = self.resolve_end(b)
        if self._edges[ea].ends[sa] is not None or self._edges[eb].ends[sb] is not None:
            raise DiagramError("weld needs dangling ends")
        if ea == eb:
            rec = self._edges.pop(ea)
            if rec.kind != LINK:
                raise DiagramError("a closed bond strand has no endpoints")
            self.add_loop(self.fresh_id("c"))
            return
        keep, drop = sorted((ea, eb))
        krec, drec = self._edges[keep], self._edges[drop]
        if krec.kind != drec.kind:
            raise DiagramError("cannot weld strands of different kinds")
        # the dangling side of `keep` takes over `drop`'s far attachment
        keep_side = sa if keep == ea else sb
        drop_far = 1 - (sa if drop == ea else sb)
        other = drec.ends[drop_far]
        del self._edges[drop]
        self._forward[(drop, drop_far)] = (keep, keep_side)
        if other is None:
            # drop's far end was dangling too: keep inherits it as dangling
            return
        vid, slot = other
        self._vertices[vid].slots[slot] = (keep, keep_side)
        krec.ends[keep_side] = (vid, slot)

    def dissolve_two_valent(self, vid: str, slot_a: int, slot_b: int) -> None:
        """Remove a vertex welding the strands at two of its slots."""
        a = self.detach(vid, slot_a)
        b = self.detach(vid, slot_b)
        self.weld(a, b)

    # -- queries -------------------------------------------------------------

    def vertex_kind(self, vid: str) -> str:
        return self._vertices[vid].kind

    def slot_end(self, vid: str, slot: int) -> Optional[EdgeEnd]:
        return self._vertices[vid].slots[slot]

    def edge_kind(self, eid: str) -> str:
        return self._edges[eid].kind

    def edge_bond(self, eid: str) -> Optional[str]:
        return self._edges[eid].bond

    def edge_ends(self, eid: str) -> list[Optional[tuple[str, int]]]:
        return list(self._edges[eid].ends)

    def vertices_of_kind(self, kind: str) -> list[str]:
        return sorted(v for v, rec in self._vertices.items() if rec.kind == kind)

    def bond_ids(self) -> list[str]:
        return sorted(self._bonds)

    def bond_color(self, bid: str) -> int:
        return self._bonds[bid].color

    def set_bond_color(self, bid: str, color: int) -> None:
        self._bonds[bid].color = color

    def set_vertex_decor(self, vid: str, **kw) -> None:
        rec = self._vertices[vid]
        for k, v in kw.items():
            setattr(rec, k, v)

    def endpoint_vertices(self, bid: str) -> list[str]:
        return sorted(v for v, rec in self._vertices.items()
                      if rec.kind == E and rec.bond == bid)

    # -- freezing ------------------------------------------------------------

    def freeze(self, validate: bool = True) -> Diagram:
        for eid, e in sorted(self._edges.items()):
            for side in (0, 1):
                if e.ends[side] is None:
                    raise DiagramError(f"edge {eid} end {side} left dangling")
        for vid, v in sorted(self._vertices.items()):
            for slot, end in enumerate(v.slots):
                if end is None:
                    raise DiagramError(f"vertex {vid} slot {slot} left empty")

        darts: dict[str, Dart] = {}
        for eid, e in self._edges.items():
            ids = (f"{eid}.0", f"{eid}.1")
            for side in (0, 1):
                vid, slot = e.ends[side]
                darts[ids[side]] = Dart(ids[side], ids[1 - side], vid, slot,
                                        e.kind, eid, e.bond)

        vertices = {vid: Vertex(vid, v.kind, v.over_slot, v.bond_over,
                                v.positive_slot, v.bond)
                    for vid, v in self._vertices.items()}

        bonds: dict[str, Bond] = {}
        rotation: dict[str, dict[int, str]] = {}
        for d in darts.values():
            rotation.setdefault(d.vertex, {})[d.slot] = d.id
        for bid, rec in sorted(self._bonds.items()):
            path = self._trace_bond(bid, darts, rotation)
            bonds[bid] = Bond(bid, rec.color, tuple(path))

        loops = {lid: FreeLoop(lid) for lid in self._loops}

        mode = self.mode
        if mode is None:
            has_marked = any(v.kind == M for v in self._vertices.values())
            has_bond = bool(self._bonds) or any(
                v.kind in (BL, BB, E) for v in self._vertices.values())
            mode = infer_mode(has_marked, has_bond)

        d = Diagram(self.name, mode, vertices, darts, bonds, loops)
        if validate:
            report = d.validate()
            if not report.ok:
                first = report.violations[0]
                raise DiagramError(
                    f"built diagram invalid: {first.rule} at {first.location}: "
                    f"{first.message} (+{len(report.violations) - 1} more)")
        return d

    def _trace_bond(self, bid: str, darts: dict[str, Dart],
                    rotation: dict[str, dict[int, str]]) -> list[str]:
        ends = self.endpoint_vertices(bid)
        if len(ends) != 2:
            raise DiagramError(f"bond {bid} has {len(ends)} endpoints")
        start = ends[0]
        first = rotation[start][2]
        path = []
        cur = darts[first]
        for _ in range(2 * len(self._edges) + 1):
            if cur.bond != bid:
                raise DiagramError(f"bond {bid} path strays onto {cur.id}")
            path.append(cur.id)
            twin = darts[cur.twin]
            vrec = self._vertices[twin.vertex]
            if vrec.kind == E:
                if twin.vertex == start or vrec.bond != bid:
                    if vrec.bond != bid or twin.vertex not in ends:
                        raise DiagramError(f"bond {bid} path ends badly")
                return path
            cur = darts[rotation[twin.vertex][(twin.slot + 2) % 4]]
        raise DiagramError(f"bond {bid} path does not terminate")

    # -- conversion ----------------------------------------------------------

    @classmethod
    def from_diagram(cls, d: Diagram, name: Optional[str] = None) -> "DiagramBuilder":
        b = cls(name or d.name, d.mode)
        for vid in sorted(d.vertices):
            v = d.vertices[vid]
            b.add_vertex(v.kind, vid, over_slot=v.over_slot,
                         bond_over=v.bond_over, positive_slot=v.positive_slot,
                         bond=v.bond)
        for bid in sorted(d.bonds):
            b.add_bond(d.bonds[bid].color, bid)
        for eid, (da, db) in sorted(d.edges().items()):
            b.add_edge(da.strand_kind, eid, bond=da.bond)
            b.attach(da.vertex, da.slot, (eid, 0))
            b.attach(db.vertex, db.slot, (eid, 1))
        for lid in sorted(d.free_loops):
            b.add_loop(lid)
        b._fresh = 0
        return b
