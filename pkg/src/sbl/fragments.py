"""Local fragments: the left and right sides of rewrite rules.

A fragment is a small planar map with dangling legs.  Legs are named
``@x`` in edge records and listed, in counterclockwise order around the
fragment's boundary disk, on the rule's ``legs`` line.  Fragments are
validated by closing them up: the legs are attached to a virtual boundary
ring in the declared order, and the closed map must be planar.

The closed model also yields the matching conditions.  Steps of a face
walk that stay at internal vertices are already forced when an embedding
preserves rotations; what remains free is how the walk continues through
the legs.  For every face of the closed model that touches the boundary
ring we therefore record its maximal runs of fragment darts ("chains"):
an embedding is face-correct exactly when, for each such face, the image
chains lie on a single face of the host diagram in the same cyclic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagram import BB, BL, BOND, E, LINK, M, X, DiagramError

# fragment ends: ("v", vertex_id, slot) or ("leg", name)
FragEnd = tuple
FragDart = tuple  # (edge_id, side)


class RuleFormatError(Exception):
    pass


@dataclass
class FragVertex:
    id: str
    kind: str
    over_slot: Optional[int] = None
    bond_over: Optional[bool] = None
    positive_slot: Optional[int] = None
    bond: Optional[str] = None  # bond symbol for endpoints

    def degree(self) -> int:
        return 3 if self.kind == E else 4


@dataclass
class FragEdge:
    id: str
    ends: tuple[FragEnd, FragEnd]
    kind: str
    bond: Optional[str] = None  # bond symbol


@dataclass
class Fragment:
    vertices: dict[str, FragVertex]
    edges: dict[str, FragEdge]
    legs: list[str]                       # ccw boundary order
    bond_symbols: dict[str, list[str]]    # symbol -> its edge ids, in path order
    # derived:
    slot_map: dict[str, dict[int, FragDart]] = field(default_factory=dict)
    leg_edge: dict[str, tuple[str, int]] = field(default_factory=dict)
    face_chains: list[list[list[FragDart]]] = field(default_factory=list)
    components: list[list[str]] = field(default_factory=list)

    def finalize(self) -> None:
        self._index()
        self._close_and_trace()
        self._split_components()

    def leg_edge_names(self) -> set[str]:
        return {end[1] for e in self.edges.values()
                for end in e.ends if end[0] == "leg"}

    # -- indexing -----------------------------------------------------------

    def _index(self) -> None:
        self.slot_map = {v: {} for v in self.vertices}
        self.leg_edge = {}
        for eid, e in self.edges.items():
            for side, end in enumerate(e.ends):
                if end[0] == "v":
                    _, vid, slot = end
                    if vid not in self.vertices:
                        raise RuleFormatError(f"edge {eid} references unknown "
                                              f"vertex {vid}")
                    if slot in self.slot_map[vid]:
                        raise RuleFormatError(f"slot {slot} at {vid} occupied twice")
                    if not 0 <= slot < self.vertices[vid].degree():
                        raise RuleFormatError(f"slot {slot} out of range at {vid}")
                    self.slot_map[vid][slot] = (eid, side)
                else:
                    name = end[1]
                    if name in self.leg_edge:
                        raise RuleFormatError(f"leg @{name} used twice")
                    self.leg_edge[name] = (eid, side)
        for vid, v in self.vertices.items():
            if sorted(self.slot_map[vid]) != list(range(v.degree())):
                raise RuleFormatError(f"vertex {vid} must have all "
                                      f"{v.degree()} slots attached")
        if set(self.legs) != set(self.leg_edge):
            raise RuleFormatError(
                f"legs line {sorted(self.legs)} does not match the legs "
                f"used in edges {sorted(self.leg_edge)}")
        for sym, eids in self.bond_symbols.items():
            for eid in eids:
                if eid not in self.edges or self.edges[eid].bond != sym:
                    raise RuleFormatError(f"bond {sym} path edge {eid} missing "
                                          "or not marked as its edge")
        for eid, e in self.edges.items():
            if (e.kind == BOND) != (e.bond is not None):
                raise RuleFormatError(f"edge {eid}: bond edges need a bond "
                                      "symbol and link edges must not have one")

    # -- closed model ---------------------------------------------------------

    def _close_and_trace(self) -> None:
        """Attach legs to a boundary ring, trace faces, check planarity."""
        # darts: real ones (eid, side) plus virtual ring darts ("ring", i, 0|1)
        sigma: dict = {}
        alpha: dict = {}
        for eid in self.edges:
            alpha[(eid, 0)] = (eid, 1)
            alpha[(eid, 1)] = (eid, 0)
        for vid, slots in self.slot_map.items():
            deg = self.vertices[vid].degree()
            for s in range(deg):
                sigma[slots[s]] = slots[(s + 1) % deg]
        k = len(self.legs)
        ring = []
        for i in range(k):
            a = ("ring", i, 0)   # from virtual vertex i toward i+1
            b = ("ring", i, 1)
            alpha[a] = b
            alpha[b] = a
            ring.append((a, b))
        for i, name in enumerate(self.legs):
            eid, side = self.leg_edge[name]
            # virtual vertex i rotation (ccw): to-previous, to-next, leg
            to_prev = ring[(i - 1) % k][1]
            to_next = ring[i][0]
            leg_dart = (eid, side)
            if k == 1:
                # degenerate single-leg ring: to_prev is to_next's twin
                pass
            sigma[to_prev] = to_next
            sigma[to_next] = leg_dart
            sigma[leg_dart] = to_prev

        if k == 0 and not self.edges:
            raise RuleFormatError("empty fragment")

        # faces of sigma*alpha
        succ = {d: sigma[alpha[d]] for d in alpha}
        faces = []
        seen = set()
        for d in sorted(succ):
            if d in seen:
                continue
            orbit = []
            cur = d
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cur = succ[cur]
            faces.append(orbit)

        # planarity of the closed model, per connected component
        comp_of: dict = {}

        def root(x):
            while comp_of[x] != x:
                comp_of[x] = comp_of[comp_of[x]]
                x = comp_of[x]
            return x

        for d in alpha:
            comp_of[d] = d
        for d in alpha:
            for other in (alpha[d], sigma[d]):
                ra, rb = root(d), root(other)
                if ra != rb:
                    comp_of[max(ra, rb)] = min(ra, rb)
        comps: dict = {}
        for d in alpha:
            comps.setdefault(root(d), set()).add(d)
        for comp in comps.values():
            vset = set()
            for d in comp:
                if d[0] == "ring":
                    vset.add(("w", d[1] if d[2] == 0 else (d[1] + 1) % k))
                else:
                    end = self.edges[d[0]].ends[d[1]]
                    vset.add(("v", end[1]) if end[0] == "v"
                             else ("w", self._leg_index(d)))
            eset = {d[:1] + d[1:2] if d[0] == "ring" else (d[0],) for d in comp}
            fcount = sum(1 for f in faces if f[0] in comp)
            if len(vset) - len(eset) + fcount != 2:
                raise RuleFormatError(
                    "fragment does not close into a planar disk; "
                    "check the legs order")

        # chains of real darts per face (only faces with >= 2 chains matter)
        self.face_chains = []
        for f in faces:
            if not any(d[0] == "ring" for d in f):
                continue  # interior face: forced by rotations
            chains: list[list[FragDart]] = []
            cur: list[FragDart] = []
            for d in f:
                if d[0] == "ring":
                    if cur:
                        chains.append(cur)
                        cur = []
                else:
                    cur.append(d)
            if cur:
                if chains and f[0][0] != "ring":
                    # walk started mid-chain: glue wrap-around
                    chains[0] = cur + chains[0]
                else:
                    chains.append(cur)
            if len(chains) >= 2:
                self.face_chains.append(chains)

    def _leg_index(self, dart: FragDart) -> int:
        for i, name in enumerate(self.legs):
            if self.leg_edge[name] == dart:
                return i
        raise AssertionError(dart)

    # -- components ------------------------------------------------------------

    def _split_components(self) -> None:
        parent = {eid: eid for eid in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        by_vertex: dict[str, list[str]] = {}
        for eid, e in self.edges.items():
            for end in e.ends:
                if end[0] == "v":
                    by_vertex.setdefault(end[1], []).append(eid)
        for eids in by_vertex.values():
            for other in eids[1:]:
                ra, rb = find(eids[0]), find(other)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict[str, list[str]] = {}
        for eid in sorted(self.edges):
            groups.setdefault(find(eid), []).append(eid)
        self.components = [groups[k] for k in sorted(groups)]

    # -- matching helpers -------------------------------------------------------

    def vertex_of_edge(self, eid: str) -> list[tuple[int, str, int]]:
        """(side, vertex, slot) for each internally attached end."""
        out = []
        for side, end in enumerate(self.edges[eid].ends):
            if end[0] == "v":
                out.append((side, end[1], end[2]))
        return out

    def is_loopable(self, comp: list[str]) -> bool:
        """A component matching a free loop: one leg-to-leg link edge."""
        if len(comp) != 1:
            return False
        e = self.edges[comp[0]]
        return (e.kind == LINK and e.ends[0][0] == "leg"
                and e.ends[1][0] == "leg")

    # -- mirroring ---------------------------------------------------------------

    def mirrored(self) -> "Fragment":
        """The reflected fragment: rotations reverse, over/under kept.

        Crossing decorations keep their slot parity; marked vertices flip
        theirs; endpoint link slots swap so the bond dart stays at slot 2.
        The boundary order of the legs reverses.
        """
        verts = {}
        for vid, v in self.vertices.items():
            pos = v.positive_slot
            if v.kind == M:
                pos = 1 - pos
            verts[vid] = FragVertex(vid, v.kind, v.over_slot, v.bond_over,
                                    pos, v.bond)

        def remap(end: FragEnd) -> FragEnd:
            if end[0] != "v":
                return end
            _, vid, slot = end
            v = self.vertices[vid]
            if v.kind == E:
                new = {0: 1, 1: 0, 2: 2}[slot]
            else:
                new = (-slot) % 4
            return ("v", vid, new)

        edges = {eid: FragEdge(eid, (remap(e.ends[0]), remap(e.ends[1])),
                               e.kind, e.bond)
                 for eid, e in self.edges.items()}
        frag = Fragment(verts, edges, list(reversed(self.legs)),
                        {s: list(p) for s, p in self.bond_symbols.items()})
        frag.finalize()
        return frag
