"""Resolutions of bonded and marked diagrams, and the surface invariants
computed from them.

The negative resolution deletes every bond (crossings along it dissolve
back into plain strands) and smooths every marked vertex along its
negative pair.  The positive resolution replaces every bond of color n by
a band: two parallel strands along the bond's course with |n| clasp
crossings, and smooths marked vertices along their positive pair.

Band conventions, fixed here and pinned by tests:

* the two band strands attach at an endpoint so that, leaving the endpoint
  along the bond, the left strand continues the link edge at slot 0 and
  the right strand the edge at slot 1; arriving at the far endpoint the
  left strand joins slot 1 and the right strand slot 0;
* the |n| twist crossings sit in one row immediately after the endpoint
  with the smaller id, and at each of them the strand entering on the left
  is the over strand when n > 0, the under strand when n < 0;
* bonds are resolved in ascending id order (the outcome is independent of
  the order up to planar isotopy).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .build import DiagramBuilder, EdgeEnd
from .diagram import (BB, BL, BOND, BONDED, CLASSICAL, E, LINK, M, MARKED, X,
                      Diagram, ModeError, require_mode)
from .tristate import NO, TriState, YES

POSITIVE = "positive"
NEGATIVE = "negative"

# how the two band strands weld at the two endpoints: leaving the start
# endpoint, left takes slot 0 and right slot 1; arriving, they swap.
_START_WELD = (0, 1)
_END_WELD = (1, 0)

# truth value of (toward(U.0) xor toward(W.1)) on a coherently attached
# band; fixed so that an even coherent chord splits its component, which a
# per-bond property test cross-checks against the actual surgery
_COHERENT = True


@dataclass(frozen=True)
class SurfaceProfile:
    euler_characteristic: int
    components_positive: int
    components_negative: int
    saddle_count: int
    orientable: TriState
    genus_or_crosscaps: Optional[int]


def _smooth_marked(b: DiagramBuilder, sign: str) -> None:
    # positive smoothing joins (p, p+1) and (p+2, p+3); negative the others
    for vid in b.vertices_of_kind(M):
        p = b._vertices[vid].positive_slot
        if sign == NEGATIVE:
            p += 1
        ends = [b.detach(vid, s) for s in range(4)]
        b.weld(ends[p % 4], ends[(p + 1) % 4])
        b.weld(ends[(p + 2) % 4], ends[(p + 3) % 4])
        b.remove_vertex(vid)


def _delete_bonds(b: DiagramBuilder) -> None:
    bond_edges = [e for e in list(b._edges) if b.edge_kind(e) == BOND]
    for eid in bond_edges:
        b.remove_edge(eid)
    for vid in b.vertices_of_kind(E):
        a = b.detach(vid, 0)
        c = b.detach(vid, 1)
        b.weld(a, c)
        b.remove_vertex(vid)
    for vid in b.vertices_of_kind(BL):
        rec = b._vertices[vid]
        link_slots = [s for s, end in enumerate(rec.slots)
                      if end is not None and b.edge_kind(end[0]) == LINK]
        a = b.detach(vid, link_slots[0])
        c = b.detach(vid, link_slots[1])
        b.weld(a, c)
        b.remove_vertex(vid)
    for vid in b.vertices_of_kind(BB):
        rec = b._vertices[vid]
        live = [s for s, end in enumerate(rec.slots) if end is not None]
        if live:
            # crossing with a still-live bond: weld its two strand ends
            a = b.detach(vid, live[0])
            c = b.detach(vid, live[1])
            b.weld(a, c)
        b.remove_vertex(vid)
    for bid in b.bond_ids():
        b.remove_bond(bid)


def _band_surgery(b: DiagramBuilder, bid: str, pending: dict) -> None:
    u, w = b.endpoint_vertices(bid)
    color = b.bond_color(bid)

    # capture the course before dismantling anything
    edges = []
    stations = []
    end = b.slot_end(u, 2)
    while True:
        eid, side = end
        edges.append(eid)
        far = b.edge_ends(eid)[1 - side]
        vid, slot = far
        if b.vertex_kind(vid) == E:
            assert vid == w
            break
        stations.append((vid, slot))
        end = b.slot_end(vid, (slot + 2) % 4)

    u0 = b.detach(u, 0)
    u1 = b.detach(u, 1)
    w0 = b.detach(w, 0)
    w1 = b.detach(w, 1)
    for eid in edges:
        b.remove_edge(eid)
    b.remove_vertex(u)
    b.remove_vertex(w)

    cur_left, cur_right = u0, u1

    def fresh_out(vid: str, slot: int) -> EdgeEnd:
        eid = b.add_edge(LINK)
        b.attach(vid, slot, (eid, 0))
        return (eid, 1)

    # clasp row: |color| half-twist crossings right after the start
    for _ in range(abs(color)):
        t = b.add_vertex(X, over_slot=0 if color > 0 else 1)
        b.attach(t, 0, cur_left)
        b.attach(t, 1, cur_right)
        new_right = fresh_out(t, 2)   # the left strand exits on the right
        new_left = fresh_out(t, 3)
        cur_left, cur_right = new_left, new_right

    for vid, j in stations:
        if vid in pending:
            # second pass through one of this bond's own old self-crossings
            info = pending.pop(vid)
            if j == (info["j1"] + 1) % 4:       # entering from the east
                b.weld(cur_left, info["hLe"])
                b.weld(cur_right, info["hRe"])
                cur_left, cur_right = info["hLw"], info["hRw"]
            else:                               # entering from the west
                b.weld(cur_left, info["hRw"])
                b.weld(cur_right, info["hLw"])
                cur_left, cur_right = info["hRe"], info["hLe"]
            continue

        kind = b.vertex_kind(vid)
        if kind == BL or (kind == BB and b._vertices[vid].slots[(j + 1) % 4]
                          is not None and b.edge_bond(
                              b._vertices[vid].slots[(j + 1) % 4][0]) != bid):
            # a transversal strand crosses the band: it meets the left band
            # strand first on its own left-to-right course
            rec = b._vertices[vid]
            if kind == BL:
                band_over = rec.bond_over
                trans_kind, trans_bond = LINK, None
                new_kind = X
            else:
                band_over = rec.over_slot != j % 2
                other_end = rec.slots[(j + 1) % 4]
                trans_bond = b.edge_bond(other_end[0])
                trans_kind, new_kind = BOND, BL
            s_left = b.detach(vid, (j + 3) % 4)
            s_right = b.detach(vid, (j + 1) % 4)
            b.remove_vertex(vid)

            over = 0 if band_over else 1
            if new_kind == X:
                vl = b.add_vertex(X, over_slot=over)
                vr = b.add_vertex(X, over_slot=over)
            else:
                vl = b.add_vertex(BL, bond_over=not band_over)
                vr = b.add_vertex(BL, bond_over=not band_over)
            b.attach(vl, 0, cur_left)
            b.attach(vr, 0, cur_right)
            b.attach(vl, 3, s_left)
            b.attach(vr, 1, s_right)
            mid = b.add_edge(trans_kind, bond=trans_bond)
            b.attach(vl, 1, (mid, 0))
            b.attach(vr, 3, (mid, 1))
            cur_left = fresh_out(vl, 2)
            cur_right = fresh_out(vr, 2)
        else:
            # first pass through a self-crossing: expand to a 2x2 grid of
            # plain crossings and leave stubs for the second pass
            rec = b._vertices[vid]
            vert_over = 0 if rec.over_slot == j % 2 else 1
            b.remove_vertex(vid)
            sw = b.add_vertex(X, over_slot=vert_over)
            se = b.add_vertex(X, over_slot=vert_over)
            nw = b.add_vertex(X, over_slot=vert_over)
            ne = b.add_vertex(X, over_slot=vert_over)
            b.attach(sw, 0, cur_left)
            b.attach(se, 0, cur_right)
            for a, sa, c, sc in ((sw, 2, nw, 0), (se, 2, ne, 0),
                                 (se, 3, sw, 1), (ne, 3, nw, 1)):
                eid = b.add_edge(LINK)
                b.attach(a, sa, (eid, 0))
                b.attach(c, sc, (eid, 1))
            info = {"j1": j,
                    "hLw": fresh_out(sw, 3), "hLe": fresh_out(se, 1),
                    "hRw": fresh_out(nw, 3), "hRe": fresh_out(ne, 1)}
            pending[vid] = info
            cur_left = fresh_out(nw, 2)
            cur_right = fresh_out(ne, 2)

    b.weld(cur_left, w1)
    b.weld(cur_right, w0)
    b.remove_bond(bid)


def resolve(d: Diagram, sign: str) -> Diagram:
    """The classical diagram obtained by resolving every saddle."""
    if sign not in (POSITIVE, NEGATIVE):
        raise ValueError(f"unknown resolution sign {sign!r}")
    require_mode(d, BONDED, MARKED)
    b = DiagramBuilder.from_diagram(d, f"{d.name}@{sign[:3]}")
    if d.mode == MARKED:
        _smooth_marked(b, sign)
    elif sign == NEGATIVE:
        _delete_bonds(b)
    else:
        pending: dict = {}
        for bid in b.bond_ids():
            _band_surgery(b, bid, pending)
        assert not pending
    b.mode = CLASSICAL
    return b.freeze()


def saddle_count(d: Diagram) -> int:
    if d.mode == MARKED:
        return sum(1 for v in d.vertices.values() if v.kind == M)
    return len(d.bonds)


def euler_characteristic(d: Diagram) -> int:
    """a + b - n: components of both resolutions minus the saddle count."""
    require_mode(d, BONDED, MARKED)
    a = resolve(d, POSITIVE).link_component_count()
    c = resolve(d, NEGATIVE).link_component_count()
    return a + c - saddle_count(d)


# -- orientability ----------------------------------------------------------

def _orientation_forward_darts(d: Diagram) -> tuple[dict[str, int], set[str]]:
    """Strand components and a canonical travel direction for each.

    Returns (dart -> component index, set of forward dart ids).  The
    orientation walks each component starting from its minimal link dart.
    """
    comp = d.strand_components()
    forward: set[str] = set()
    seen: set[str] = set()
    for start in sorted(comp):
        if start in seen:
            continue
        cur = start
        while True:
            forward.add(cur)
            seen.add(cur)
            seen.add(d.darts[cur].twin)
            nxt = d.next_along_strand(cur)
            if nxt is None or nxt == start:
                break
            cur = nxt
    return comp, forward


def bond_attachment_data(d: Diagram, bid: str,
                         comp: dict[str, int],
                         forward: set[str]) -> tuple[int, int, bool]:
    """(component at first end, at second end, base coherence flag).

    The base flag says whether the band joins the strands coherently under
    the canonical orientation: the band's left strand runs from the slot-0
    side of the first endpoint to the slot-1 side of the second, so the
    orientations match exactly when the flow points toward the vertex at
    one of those two slots and away at the other.
    """
    u, w = d.bond_endpoints(bid)
    du = d.dart_at(u.id, _START_WELD[0])
    dw = d.dart_at(w.id, _END_WELD[0])
    toward_u = du.id not in forward
    toward_w = dw.id not in forward
    return comp[du.id], comp[dw.id], toward_u != toward_w


def orientability_and_genus(d: Diagram) -> SurfaceProfile:
    """Exhaustive orientation search over the link components.

    The surface is orientable exactly when some orientation of the
    components of the underlying link makes every bond even-colored and
    coherently attached.  Runs in O(2^c); fine at corpus scale.
    """
    require_mode(d, BONDED)
    pos = resolve(d, POSITIVE).link_component_count()
    neg = resolve(d, NEGATIVE).link_component_count()
    n = saddle_count(d)
    chi = pos + neg - n

    comp, forward = _orientation_forward_darts(d)
    ncomp = (max(comp.values()) + 1) if comp else 0

    bonds = []
    obstruction = None
    for bid in sorted(d.bonds):
        if d.bonds[bid].color % 2 != 0:
            obstruction = f"bond {bid} has odd color {d.bonds[bid].color}"
        bonds.append((bid,) + bond_attachment_data(d, bid, comp, forward))

    orientable: TriState
    if obstruction is not None:
        orientable = TriState.no(obstruction)
    else:
        witness = None
        for flips in product((False, True), repeat=ncomp):
            if all((base ^ flips[cu] ^ flips[cw]) == _COHERENT
                   for _bid, cu, cw, base in bonds):
                witness = flips
                break
        if witness is not None:
            orientable = TriState.yes({"orientation_flips": witness})
        else:
            orientable = TriState.no("no orientation makes every bond coherent")

    genus: Optional[int] = None
    if d.projection_component_count() == 1:
        genus = (2 - chi) // 2 if orientable.value == YES else 2 - chi

    return SurfaceProfile(chi, pos, neg, n, orientable, genus)
