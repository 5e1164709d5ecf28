"""Finding the places where a move applies.

An embedding of a rule fragment into a diagram assigns a host vertex and a
rotation shift to every fragment vertex and a host edge with an
orientation to every fragment edge.  Internal rotation, vertex kinds and
decorations, strand kinds and bond colors must all be respected, and the
fragment's boundary faces must land on faces of the host diagram with the
right cyclic order (see :mod:`sbl.fragments`).

A fragment component consisting of a single leg-to-leg link edge may also
match a crossing-free circle.  Free loops carry no face data, so such a
match carries no co-facial constraint; this is the one place where the
model's position-free treatment of free loops shows.

Host edges are matched at most once per end, so two fragment edges may
share a host edge only by taking opposite ends of it (the way an unkink
move matches the single closing edge of a one-crossing circle).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .diagram import BOND, E, LINK, M, Diagram, X
from .fragments import Fragment
from .rules import BWD, FWD, ColorExpr, MoveRule, RuleVariant


class StaleSiteError(Exception):
    pass


class PluginMissingError(Exception):
    pass


@dataclass(frozen=True)
class MoveSite:
    rule: MoveRule
    direction: str
    variant: int
    mirrored: bool
    vmap: tuple[tuple[str, tuple[str, int]], ...]
    emap: tuple[tuple[str, tuple[str, int]], ...]   # ("loop", lid) for loops
    bond_binding: tuple[tuple[str, str], ...]
    color_binding: tuple[tuple[str, int], ...]
    code: bytes

    @property
    def rule_name(self) -> str:
        return self.rule.name

    def key(self) -> tuple:
        return (self.variant, self.mirrored, self.vmap, self.emap)

    def describe(self) -> str:
        vs = ",".join(f"{a}->{b}" for a, (b, _s) in self.vmap)
        es = ",".join(f"{a}->{b}" for a, (b, _o) in self.emap)
        tag = "~" if self.mirrored else ""
        return f"{self.rule_name}[{self.variant}]{tag} {self.direction} {vs} {es}"


def _decor_matches(frag_v, host_v, shift: int) -> bool:
    if frag_v.kind != host_v.kind:
        return False
    if frag_v.kind == E:
        return shift == 0
    if frag_v.kind == M:
        return host_v.positive_slot == (frag_v.positive_slot + shift) % 2
    if frag_v.over_slot is not None:
        return host_v.over_slot == (frag_v.over_slot + shift) % 2
    if frag_v.bond_over is not None:
        return host_v.bond_over == frag_v.bond_over
    return True


class _Matcher:
    def __init__(self, d: Diagram, frag: Fragment):
        self.d = d
        self.frag = frag
        self.results: list[tuple[dict, dict]] = []
        self.host_edges = d.edges()
        self._faces: Optional[tuple[dict, dict]] = None

    def _face_index(self) -> tuple[dict, dict]:
        if self._faces is None:
            face_of: dict[str, tuple[int, int]] = {}
            face_len: dict[int, int] = {}
            for fi, face in enumerate(self.d.face_orbits()):
                face_len[fi] = len(face)
                for pos, did in enumerate(face):
                    face_of[did] = (fi, pos)
            self._faces = (face_of, face_len)
        return self._faces

    def run(self) -> list[tuple[dict, dict]]:
        self._extend(0, {}, {})
        return self.results

    # -- component-by-component backtracking -------------------------------

    def _extend(self, comp_idx: int, vmap: dict, emap: dict) -> None:
        if comp_idx == len(self.frag.components):
            if self._check_faces(vmap, emap):
                self.results.append((dict(vmap), dict(emap)))
            return
        comp = self.frag.components[comp_idx]
        anchor = comp[0]
        fe = self.frag.edges[anchor]
        for eid in sorted(self.host_edges):
            host = self.host_edges[eid][0]
            if host.strand_kind != fe.kind:
                continue
            for orient in (0, 1):
                trial_v = dict(vmap)
                trial_e = dict(emap)
                if self._propagate(anchor, (eid, orient), trial_v, trial_e):
                    self._extend(comp_idx + 1, trial_v, trial_e)
        if self.frag.is_loopable(comp):
            used = {b[1] for b in emap.values() if b[0] == "loop"}
            for lid in sorted(self.d.free_loops):
                if lid in used:
                    continue
                trial_e = dict(emap)
                trial_e[anchor] = ("loop", lid)
                self._extend(comp_idx + 1, dict(vmap), trial_e)

    def _propagate(self, seed_edge: str, binding: tuple[str, int],
                   vmap: dict, emap: dict) -> bool:
        if not self._claim_ok(seed_edge, binding, emap):
            return False
        emap[seed_edge] = binding
        queue = [seed_edge]
        while queue:
            feid = queue.pop()
            heid, orient = emap[feid]
            for side, fvid, fslot in self.frag.vertex_of_edge(feid):
                hdart = self.host_edges[heid][side ^ orient]
                hvid, hslot = hdart.vertex, hdart.slot
                fv = self.frag.vertices[fvid]
                hv = self.d.vertices[hvid]
                deg = fv.degree()
                shift = (hslot - fslot) % deg
                if fvid in vmap:
                    if vmap[fvid] != (hvid, shift):
                        return False
                    continue
                if any(hv2 == hvid for (hv2, _s) in vmap.values()):
                    return False
                if not _decor_matches(fv, hv, shift):
                    return False
                vmap[fvid] = (hvid, shift)
                for t in range(deg):
                    fe2, fside2 = self.frag.slot_map[fvid][t]
                    hd2 = self.d.dart_at(hvid, (t + shift) % deg)
                    hside2 = int(hd2.id.rsplit(".", 1)[1])
                    b2 = (hd2.edge, fside2 ^ hside2)
                    fe2rec = self.frag.edges[fe2]
                    if fe2rec.kind != hd2.strand_kind:
                        return False
                    if fe2 in emap:
                        if emap[fe2] != b2:
                            return False
                    else:
                        if not self._claim_ok(fe2, b2, emap):
                            return False
                        emap[fe2] = b2
                        queue.append(fe2)
        return True

    def _claim_ok(self, feid: str, binding: tuple[str, int],
                  emap: dict) -> bool:
        """Half-edge injectivity: no host edge end is taken twice."""
        claims = self._claims(feid, binding)
        for other, ob in emap.items():
            if ob[0] == "loop":
                continue
            if self._claims(other, ob) & claims:
                return False
        return True

    def _claims(self, feid: str, binding: tuple[str, int]) -> set:
        heid, orient = binding
        fe = self.frag.edges[feid]
        out = set()
        for side, end in enumerate(fe.ends):
            if end[0] == "v" or (fe.ends[0][0] == "leg"
                                 and fe.ends[1][0] == "leg"):
                out.add((heid, side ^ orient))
        return out

    # -- face conditions -----------------------------------------------------

    def _check_faces(self, vmap: dict, emap: dict) -> bool:
        if not self.frag.face_chains:
            return True
        face_of, face_len = self._face_index()
        for chains in self.frag.face_chains:
            mapped = [c for c in chains if emap[c[0][0]][0] != "loop"]
            if len(mapped) < len(chains):
                continue  # a free loop floats; no face constraint
            starts = []
            for chain in mapped:
                feid, fside = chain[0]
                heid, orient = emap[feid]
                starts.append(face_of[f"{heid}.{fside ^ orient}"])
            f0, p0 = starts[0]
            if any(fi != f0 for fi, _p in starts):
                return False
            rel = [(p - p0) % face_len[f0] for _f, p in starts]
            if any(rel[i] >= rel[i + 1] for i in range(len(rel) - 1)):
                return False
        return True


def _solve_colors(d: Diagram, variant: RuleVariant, side: str,
                  frag: Fragment, emap: dict,
                  host_edges: dict) -> Optional[tuple[dict, dict]]:
    """Bind bond symbols to host bonds and solve color variables."""
    bond_binding: dict[str, str] = {}
    for feid, binding in emap.items():
        sym = frag.edges[feid].bond
        if sym is None:
            continue
        if binding[0] == "loop":
            return None
        host = host_edges[binding[0]][0].bond
        if host is None:
            return None
        if bond_binding.setdefault(sym, host) != host:
            return None
    values: dict[str, int] = {}
    for sym, host in sorted(bond_binding.items()):
        expr = variant.color_expr(side, sym)
        if not expr.solve(d.bonds[host].color, values):
            return None
    return bond_binding, values


def find_sites(d: Diagram, rule: MoveRule, direction: str = FWD,
               code: Optional[bytes] = None) -> list[MoveSite]:
    """All embeddings of the rule's source side, deterministically ordered."""
    if direction not in (FWD, BWD):
        raise ValueError(f"direction must be fwd or bwd, got {direction!r}")
    src_side, _dst = rule.sides(direction)
    code = code if code is not None else d.canonical_code
    sites = []
    mirrors = (False, True) if rule.mirror == "auto" else (False,)
    for vi, variant in enumerate(rule.variants):
        for mirrored in mirrors:
            frag = variant.fragment(src_side, mirrored)
            matcher = _Matcher(d, frag)
            for vmap, emap in matcher.run():
                solved = _solve_colors(d, variant, src_side, frag, emap,
                                       matcher.host_edges)
                if solved is None:
                    continue
                bond_binding, values = solved
                sites.append(MoveSite(
                    rule, direction, vi, mirrored,
                    tuple(sorted(vmap.items())),
                    tuple(sorted(emap.items())),
                    tuple(sorted(bond_binding.items())),
                    tuple(sorted(values.items())),
                    code))
    sites.sort(key=lambda s: s.key())
    return sites


def brute_force_sites(d: Diagram, rule: MoveRule,
                      direction: str = FWD) -> list[MoveSite]:
    """Independent exhaustive enumerator used to certify the matcher.

    Enumerates every assignment of fragment edges to host edge/orientation
    pairs (plus loop bindings) directly, then filters with the same
    acceptance predicate the matcher uses.  Exponential; only sensible on
    small diagrams.
    """
    src_side, _ = rule.sides(direction)
    code = d.canonical_code
    host_edges = d.edges()
    sites = []
    mirrors = (False, True) if rule.mirror == "auto" else (False,)
    for vi, variant in enumerate(rule.variants):
        for mirrored in mirrors:
            frag = variant.fragment(src_side, mirrored)
            feids = sorted(frag.edges)
            options = []
            for feid in feids:
                opts = []
                for heid in sorted(host_edges):
                    for orient in (0, 1):
                        opts.append((heid, orient))
                comp = next(c for c in frag.components if feid in c)
                if frag.is_loopable(comp):
                    for lid in sorted(d.free_loops):
                        opts.append(("loop", lid))
                options.append(opts)

            def assignments(idx: int, emap: dict) -> Iterator[dict]:
                if idx == len(feids):
                    yield dict(emap)
                    return
                for opt in options[idx]:
                    emap[feids[idx]] = opt
                    yield from assignments(idx + 1, emap)
                emap.pop(feids[idx], None)

            state: dict = {}
            for emap in assignments(0, state):
                ok, vmap = _consistent(d, frag, emap, host_edges)
                if not ok:
                    continue
                m = _Matcher(d, frag)
                if not m._check_faces(vmap, emap):
                    continue
                solved = _solve_colors(d, variant, src_side, frag, emap,
                                       host_edges)
                if solved is None:
                    continue
                bond_binding, values = solved
                sites.append(MoveSite(
                    rule, direction, vi, mirrored,
                    tuple(sorted(vmap.items())),
                    tuple(sorted(emap.items())),
                    tuple(sorted(bond_binding.items())),
                    tuple(sorted(values.items())),
                    code))
    uniq = {s.key(): s for s in sites}
    out = sorted(uniq.values(), key=lambda s: s.key())
    return out


def _consistent(d: Diagram, frag: Fragment, emap: dict, host_edges):
    """Check a full edge assignment pointwise; derive the vertex map."""
    vmap: dict = {}
    claims: set = set()
    used_loops: set = set()
    for feid, binding in emap.items():
        fe = frag.edges[feid]
        if binding[0] == "loop":
            comp = next(c for c in frag.components if feid in c)
            if not frag.is_loopable(comp) or binding[1] in used_loops:
                return False, None
            used_loops.add(binding[1])
            continue
        heid, orient = binding
        if host_edges[heid][0].strand_kind != fe.kind:
            return False, None
        for side, end in enumerate(fe.ends):
            if end[0] == "v" or (fe.ends[0][0] == "leg"
                                 and fe.ends[1][0] == "leg"):
                c = (heid, side ^ orient)
                if c in claims:
                    return False, None
                claims.add(c)
    for feid, binding in emap.items():
        if binding[0] == "loop":
            continue
        heid, orient = binding
        for side, fvid, fslot in frag.vertex_of_edge(feid):
            hdart = host_edges[heid][side ^ orient]
            fv = frag.vertices[fvid]
            hv = d.vertices[hdart.vertex]
            shift = (hdart.slot - fslot) % fv.degree()
            if fvid in vmap:
                if vmap[fvid] != (hdart.vertex, shift):
                    return False, None
            else:
                if any(h == hdart.vertex for h, _s in vmap.values()):
                    return False, None
                if not _decor_matches(fv, hv, shift):
                    return False, None
                vmap[fvid] = (hdart.vertex, shift)
    # every slot of a matched vertex must be covered consistently
    for fvid, (hvid, shift) in vmap.items():
        deg = frag.vertices[fvid].degree()
        for t in range(deg):
            fe2, fside2 = frag.slot_map[fvid][t]
            hd2 = d.dart_at(hvid, (t + shift) % deg)
            hside2 = int(hd2.id.rsplit(".", 1)[1])
            if emap.get(fe2) != (hd2.edge, fside2 ^ hside2):
                return False, None
    return True, vmap
