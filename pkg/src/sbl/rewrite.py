"""Applying moves, converting between diagram modes, replaying scripts.

Applying a move excises the image of the matched side, instantiates the
other side fresh, and welds its legs to the cut strand ends.  Because a
well-formed rule has the same boundary in the same cyclic order on both
sides, the result is planar whenever the match was face-correct; the
result is validated and a failure is reported as a catalog bug rather
than swallowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .build import DiagramBuilder
from .diagram import (BB, BL, BOND, BONDED, CLASSICAL, E, LINK, M, MARKED,
                      Diagram, DiagramError, ModeError, X, require_mode)
from .fragments import Fragment
from .matching import MoveSite, StaleSiteError, find_sites
from .rules import BWD, FWD, MoveRule

MODE_WORDS = {"bonded": BONDED, "marked": MARKED, "classical": CLASSICAL}


class CatalogError(Exception):
    """A rule produced an invalid diagram: the catalog entry is wrong."""


class ConversionError(DiagramError):
    def __init__(self, offending: list[str], message: str):
        super().__init__(message)
        self.offending = offending


def apply_move(d: Diagram, site: MoveSite) -> Diagram:
    """Rewrite the diagram at a site found by ``find_sites``."""
    if site.code != d.canonical_code:
        raise StaleSiteError("the diagram changed since the site was found")
    variant = site.rule.variants[site.variant]
    src_name, dst_name = site.rule.sides(site.direction)
    src = variant.fragment(src_name, site.mirrored)
    dst = variant.fragment(dst_name, site.mirrored)
    if site.direction == FWD:
        leg_map = dict(variant.leg_map)
    else:
        leg_map = {b: a for a, b in variant.leg_map.items()}
    if site.mirrored:
        pass  # leg names are stable under mirroring; only the order flips

    emap = dict(site.emap)
    vmap = dict(site.vmap)
    colors = dict(site.color_binding)
    bond_binding = dict(site.bond_binding)

    b = DiagramBuilder.from_diagram(d)

    # anchors for the source legs: a host attachment point or a partner leg
    claims: dict[tuple[str, int], str] = {}
    for feid, binding in emap.items():
        if binding[0] == "loop":
            continue
        heid, orient = binding
        fe = src.edges[feid]
        for side, end in enumerate(fe.ends):
            if end[0] == "v":
                claims[(heid, side ^ orient)] = feid

    def leg_of_edge(feid: str) -> str:
        fe = src.edges[feid]
        for end in fe.ends:
            if end[0] == "leg":
                return end[1]
        raise AssertionError(f"edge {feid} has no leg")

    anchors: dict[str, tuple] = {}
    for leg in src.legs:
        feid, fside = src.leg_edge[leg]
        binding = emap[feid]
        if binding[0] == "loop":
            other = [end[1] for end in src.edges[feid].ends
                     if end[0] == "leg" and end[1] != leg]
            anchors[leg] = ("pair", other[0] if other else leg)
            continue
        heid, orient = binding
        hside = fside ^ orient
        owner = claims.get((heid, hside))
        if owner is not None and owner != feid:
            anchors[leg] = ("pair", leg_of_edge(owner))
        else:
            att = b.edge_ends(heid)[hside]
            anchors[leg] = ("slot", att[0], att[1])

    # excise the image
    removed_edges = set()
    for feid, binding in emap.items():
        if binding[0] == "loop":
            if binding[1] in b._loops:
                b.remove_loop(binding[1])
        elif binding[0] not in removed_edges:
            removed_edges.add(binding[0])
            b.remove_edge(binding[0])
    for fvid, (hvid, _shift) in vmap.items():
        b.remove_vertex(hvid)
    for sym in src.bond_symbols:
        if sym not in dst.bond_symbols and sym in bond_binding:
            b.remove_bond(bond_binding[sym])

    # instantiate the target side
    new_bond: dict[str, str] = {}
    for sym in sorted(dst.bond_symbols):
        if sym in bond_binding:
            bid = bond_binding[sym]
            b.set_bond_color(bid, variant.color_expr(dst_name, sym)
                             .evaluate(colors))
        else:
            bid = b.add_bond(variant.color_expr(dst_name, sym)
                             .evaluate(colors))
        new_bond[sym] = bid

    vert_ids: dict[str, str] = {}
    for fvid in sorted(dst.vertices):
        fv = dst.vertices[fvid]
        vert_ids[fvid] = b.add_vertex(
            fv.kind, over_slot=fv.over_slot, bond_over=fv.bond_over,
            positive_slot=fv.positive_slot,
            bond=new_bond.get(fv.bond) if fv.bond else None)

    edge_ids: dict[str, str] = {}
    for feid in sorted(dst.edges):
        fe = dst.edges[feid]
        edge_ids[feid] = b.add_edge(
            fe.kind, bond=new_bond.get(fe.bond) if fe.bond else None)
        for side, end in enumerate(fe.ends):
            if end[0] == "v":
                b.attach(vert_ids[end[1]], end[2], (edge_ids[feid], side))

    # weld target legs to the anchors
    pending_pairs: dict[frozenset, list] = {}
    for src_leg in src.legs:
        dst_leg = leg_map[src_leg]
        feid, fside = dst.leg_edge[dst_leg]
        dangling = (edge_ids[feid], fside)
        anchor = anchors[src_leg]
        if anchor[0] == "slot":
            b.attach(anchor[1], anchor[2], dangling)
        else:
            key = frozenset({src_leg, anchor[1]})
            pending_pairs.setdefault(key, []).append(dangling)
    for key, ends in sorted(pending_pairs.items(),
                            key=lambda kv: sorted(kv[0])):
        if len(ends) != 2:
            raise CatalogError(f"unmatched leg pair {sorted(key)}")
        b.weld(ends[0], ends[1])

    b.mode = None  # infer from content
    try:
        out = b.freeze()
    except DiagramError as exc:
        raise CatalogError(
            f"rule {site.rule.name} produced an invalid diagram: {exc}") from exc
    if out.mode == CLASSICAL and d.mode != CLASSICAL:
        out = Diagram(out.name, d.mode, out.vertices, out.darts,
                      out.bonds, out.free_loops)
    return out


# -- mode conversion ----------------------------------------------------------

def convert(d: Diagram, target_mode: str) -> Diagram:
    """Translate between marked vertices and short zero-colored bonds.

    Marked to bonded always works: each marked vertex becomes two
    endpoints joined by a color-0 bond placed along the vertex's negative
    smoothing.  Bonded to marked requires every bond to be a plain chord:
    color 0, one edge, crossing nothing; offending bonds are reported.
    """
    target_mode = MODE_WORDS.get(target_mode, target_mode)
    if target_mode == d.mode:
        return d
    if d.mode == CLASSICAL:
        return Diagram(d.name, target_mode, d.vertices, d.darts, d.bonds,
                       d.free_loops)
    if d.mode == MARKED and target_mode == BONDED:
        return _marked_to_bonded(d)
    if d.mode == BONDED and target_mode == MARKED:
        return _bonded_to_marked(d)
    raise ModeError(f"cannot convert {d.mode} diagram to {target_mode}")


def _marked_to_bonded(d: Diagram) -> Diagram:
    b = DiagramBuilder.from_diagram(d)
    b.mode = BONDED
    for vid in b.vertices_of_kind(M):
        p = b._vertices[vid].positive_slot
        ends = [b.detach(vid, s) for s in range(4)]
        b.remove_vertex(vid)
        bid = b.add_bond(0)
        e1 = b.add_vertex(E, bond=bid)
        e2 = b.add_vertex(E, bond=bid)
        # e1 sits on the negative arc joining slots p+1, p+2; e2 on the
        # arc joining p+3, p; the positive resolution of the bond then
        # reconnects (p, p+1) and (p+2, p+3), matching the marker.
        b.attach(e1, 0, ends[(p + 1) % 4])
        b.attach(e1, 1, ends[(p + 2) % 4])
        b.attach(e2, 0, ends[(p + 3) % 4])
        b.attach(e2, 1, ends[p % 4])
        core = b.add_edge(BOND, bond=bid)
        b.attach(e1, 2, (core, 0))
        b.attach(e2, 2, (core, 1))
    return b.freeze()


def _bonded_to_marked(d: Diagram) -> Diagram:
    offending = []
    for bid in sorted(d.bonds):
        bond = d.bonds[bid]
        if bond.color != 0:
            offending.append(f"{bid}: color {bond.color}")
        elif len(bond.dart_path) != 1:
            offending.append(f"{bid}: crosses other strands")
    if offending:
        raise ConversionError(
            offending, "bonds must be plain zero-colored chords to "
            "contract into marked vertices: " + "; ".join(offending))
    b = DiagramBuilder.from_diagram(d)
    b.mode = MARKED
    for bid in b.bond_ids():
        e1, e2 = b.endpoint_vertices(bid)
        core = b.slot_end(e1, 2)[0]
        a0 = b.detach(e1, 0)
        a1 = b.detach(e1, 1)
        c0 = b.detach(e2, 0)
        c1 = b.detach(e2, 1)
        b.remove_edge(core)
        b.remove_vertex(e1)
        b.remove_vertex(e2)
        b.remove_bond(bid)
        m = b.add_vertex(M, positive_slot=0)
        b.attach(m, 0, c1)
        b.attach(m, 1, a0)
        b.attach(m, 2, a1)
        b.attach(m, 3, c0)
    return b.freeze()


# -- scripts ------------------------------------------------------------------

@dataclass(frozen=True)
class ScriptStep:
    kind: str                       # "apply" | "convert"
    rule: Optional[str] = None
    direction: Optional[str] = None
    site_index: Optional[int] = None
    target_mode: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "convert":
            return f"convert {self.target_mode}"
        return f"apply {self.rule} {self.direction} {self.site_index}"


@dataclass(frozen=True)
class MoveScript:
    steps: tuple[ScriptStep, ...]

    def __str__(self) -> str:
        return "; ".join(str(s) for s in self.steps) if self.steps else "(empty)"

    def __len__(self) -> int:
        return len(self.steps)


def apply_step(d: Diagram, step: ScriptStep,
               rules: dict[str, MoveRule]) -> Diagram:
    if step.kind == "convert":
        return convert(d, step.target_mode)
    rule = rules[step.rule]
    sites = find_sites(d, rule, step.direction)
    if not 0 <= step.site_index < len(sites):
        raise DiagramError(
            f"script step {step} does not resolve: only {len(sites)} sites")
    return apply_move(d, sites[step.site_index])


def replay(d: Diagram, script: MoveScript,
           rules: dict[str, MoveRule]) -> Diagram:
    for step in script.steps:
        d = apply_step(d, step, rules)
    return d


def parse_script_steps(lines: Iterable[str]) -> list[ScriptStep]:
    steps = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "convert":
            steps.append(ScriptStep("convert", target_mode=MODE_WORDS[parts[1]]))
        elif parts[0] == "apply":
            steps.append(ScriptStep("apply", rule=parts[1], direction=parts[2],
                                    site_index=int(parts[3])))
        else:
            raise DiagramError(f"unknown script step {line!r}")
    return steps
