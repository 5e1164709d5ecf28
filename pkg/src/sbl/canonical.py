"""Canonical codes for decorated planar maps.

Two diagrams get the same code exactly when they are isomorphic as planar
maps with matching vertex kinds, over/under data, strand kinds and bond
colors, i.e. when they are representatives of the same planar isotopy
class.  Reflections are *not* identified: a diagram and its mirror image
generally receive different codes.

The code of a connected component is the lexicographic minimum, over all
choices of root dart, of a breadth-first encoding of the permutation pair
(rotation successor, twin) decorated per dart.  Decorations are recorded
relative to the entering dart so the code is invariant under any re-slotting
that preserves the cyclic order.  Component codes are sorted and joined;
free loops only contribute their count.
"""

from __future__ import annotations

from .diagram import BB, BL, BOND, E, M, X, Diagram


def _dart_token(d: Diagram, dart_id: str) -> str:
    dart = d.darts[dart_id]
    v = d.vertices[dart.vertex]
    decor: str
    if v.kind in (X, BB):
        decor = "o" if dart.slot % 2 == v.over_slot else "u"
    elif v.kind == M:
        decor = "p" if dart.slot % 2 == v.positive_slot else "n"
    elif v.kind == BL:
        decor = "O" if v.bond_over else "U"
    else:  # E: slot carries the role directly (no re-slotting is legal)
        decor = str(dart.slot)
    kind = "k" if dart.strand_kind == BOND else "l"
    color = ""
    if dart.bond is not None:
        color = f"c{d.bonds[dart.bond].color}"
    return f"{v.kind}{decor}{kind}{color}"


def _rooted_code(d: Diagram, root: str, sigma: dict[str, str]) -> tuple:
    labels = {root: 0}
    order = [root]
    out = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        nxt = sigma[cur]
        tw = d.darts[cur].twin
        for other in (nxt, tw):
            if other not in labels:
                labels[other] = len(order)
                order.append(other)
        out.append((_dart_token(d, cur), labels[nxt], labels[tw]))
    return tuple(out)


def canonical_code(d: Diagram) -> bytes:
    sigma: dict[str, str] = {}
    for vid in d.vertices:
        rot = d.rotation(vid)
        for i, did in enumerate(rot):
            sigma[did] = rot[(i + 1) % len(rot)]

    components = d.dart_connected_components()
    comp_codes = []
    for comp in components:
        best = None
        for root in sorted(comp):
            code = _rooted_code(d, root, sigma)
            if best is None or code < best:
                best = code
        comp_codes.append(best)
    comp_codes.sort()

    parts = [";".join(f"{tok},{a},{b}" for tok, a, b in code)
             for code in comp_codes]
    parts.append(f"L{len(d.free_loops)}")
    return "|".join(parts).encode()
