"""Classical-diagram simplification and bounded triviality certification.

Simplification runs the plain Reidemeister rules from the catalog with
greedy reduction plus a little budgeted uphill room.  Yes answers carry a
replayable reduction script; No answers carry a move-invariant witness
(a nonzero pairwise linking number, or a three-coloring count exceeding
what a trivial unlink allows); anything else is Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .catalog import classical_rules
from .diagram import CLASSICAL, LINK, X, Diagram, ModeError
from .matching import find_sites
from .rewrite import MoveScript, ScriptStep, apply_move
from .rules import BWD, FWD
from .tristate import NO, UNKNOWN, YES, SearchBudget, TriState, tri_and


def _forward_darts(d: Diagram) -> set[str]:
    forward: set[str] = set()
    seen: set[str] = set()
    for start in sorted(d.darts):
        if start in seen or d.darts[start].strand_kind != LINK:
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
    return forward


def crossing_signs(d: Diagram) -> dict[str, int]:
    """Sign of every link-link crossing under the canonical orientation.

    A crossing is positive when the under strand leaves one rotation step
    clockwise of the over strand's exit.
    """
    forward = _forward_darts(d)
    signs = {}
    for vid, v in d.vertices.items():
        if v.kind != X:
            continue
        over_out = next(s for s in (v.over_slot, v.over_slot + 2)
                        if d.dart_at(vid, s % 4).id in forward)
        under_out = next(s for s in (v.over_slot + 1, v.over_slot + 3)
                         if d.dart_at(vid, s % 4).id in forward)
        signs[vid] = 1 if under_out % 4 == (over_out + 3) % 4 else -1
    return signs


def pairwise_linking(d: Diagram) -> dict[tuple[int, int], int]:
    """Linking numbers between distinct components (half the signed sum)."""
    if d.mode != CLASSICAL:
        raise ModeError("linking numbers need a classical diagram")
    comp = d.strand_components()
    signs = crossing_signs(d)
    sums: dict[tuple[int, int], int] = {}
    for vid, sign in signs.items():
        v = d.vertices[vid]
        a = comp[d.dart_at(vid, v.over_slot).id]
        b = comp[d.dart_at(vid, v.over_slot + 1).id]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        sums[key] = sums.get(key, 0) + sign
    return {k: v // 2 for k, v in sums.items()}


def fox_coloring_count(d: Diagram, modulus: int = 3) -> int:
    """Number of Fox colorings of the diagram's arcs."""
    if d.mode != CLASSICAL:
        raise ModeError("colorings need a classical diagram")
    # arcs: strand runs broken at under-passages
    parent: dict[str, str] = {x: x for x in d.darts}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for dd in d.darts.values():
        union(dd.id, dd.twin)
    for vid, v in d.vertices.items():
        if v.kind == X:
            union(d.dart_at(vid, v.over_slot).id,
                  d.dart_at(vid, v.over_slot + 2).id)
    arcs = sorted({find(x) for x in d.darts})
    index = {a: i for i, a in enumerate(arcs)}
    nloops = len(d.free_loops)
    n = len(arcs) + nloops
    rows = []
    for vid, v in sorted(d.vertices.items()):
        if v.kind != X:
            continue
        over = index[find(d.dart_at(vid, v.over_slot).id)]
        u1 = index[find(d.dart_at(vid, v.over_slot + 1).id)]
        u2 = index[find(d.dart_at(vid, (v.over_slot + 3) % 4).id)]
        row = [0] * n
        row[over] += 2
        row[u1] -= 1
        row[u2] -= 1
        rows.append([x % modulus for x in row])
    rank = _gf_rank(rows, n, modulus)
    return modulus ** (n - rank)


def _gf_rank(rows: list[list[int]], n: int, p: int) -> int:
    mat = [row[:] for row in rows]
    rank = 0
    col = 0
    while col < n and rank < len(mat):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] % p), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [(x * inv) % p for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] % p:
                f = mat[r][col]
                mat[r] = [(a - f * b) % p for a, b in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank


def _crossings(d: Diagram) -> int:
    return d.crossing_count((X,))


def simplify_classical(d: Diagram,
                       budget: Optional[SearchBudget] = None
                       ) -> tuple[Diagram, MoveScript]:
    """Reduce crossings greedily with bounded uphill room.

    Returns the best diagram found and the script reaching it; the result
    never has more crossings than the input.
    """
    if d.mode != CLASSICAL:
        raise ModeError("simplification runs on classical diagrams")
    budget = budget or SearchBudget()
    rules = classical_rules()

    start_code = d.canonical_code
    best = (d, ())
    best_crossings = _crossings(d)
    visited = {start_code}
    frontier: list[tuple[bytes, Diagram, tuple]] = [(start_code, d, ())]
    depth = 0
    while frontier and depth < budget.max_depth:
        depth += 1
        ceiling = best_crossings + budget.max_crossings
        next_frontier: dict[bytes, tuple[Diagram, tuple]] = {}
        for _code, cur, script in sorted(frontier, key=lambda t: t[0]):
            for rname in sorted(rules):
                rule = rules[rname]
                for direction in (BWD, FWD):
                    cur_code = cur.canonical_code
                    for idx, site in enumerate(find_sites(cur, rule,
                                                          direction,
                                                          code=cur_code)):
                        out = apply_move(cur, site)
                        if _crossings(out) > ceiling:
                            continue
                        code = out.canonical_code
                        if code in visited:
                            continue
                        visited.add(code)
                        step = ScriptStep("apply", rule=rname,
                                          direction=direction, site_index=idx)
                        next_frontier[code] = (out, script + (step,))
                        if (_crossings(out), code) < (best_crossings,
                                                      best[0].canonical_code):
                            best = (out, script + (step,))
                            best_crossings = _crossings(out)
                        if len(visited) >= budget.max_states:
                            break
                    if len(visited) >= budget.max_states:
                        break
                if len(visited) >= budget.max_states:
                    break
            if len(visited) >= budget.max_states:
                break
        if len(visited) >= budget.max_states:
            break
        frontier = [(c, dd, s) for c, (dd, s) in sorted(next_frontier.items())]
        if best_crossings == 0:
            break
    return best[0], MoveScript(tuple(best[1]))


def is_trivial_unlink(d: Diagram,
                      budget: Optional[SearchBudget] = None) -> TriState:
    """Budget-bounded unlink detection with certificates."""
    if d.mode != CLASSICAL:
        raise ModeError("unlink detection runs on classical diagrams")
    budget = budget or SearchBudget()
    comps = d.link_component_count()

    linking = pairwise_linking(d)
    for pair, lk in sorted(linking.items()):
        if lk != 0:
            return TriState.no(("linking number", f"linking number = {lk} "
                                f"between components {pair[0]} and {pair[1]}"))
    colorings = fox_coloring_count(d)
    if colorings > 3 ** comps:
        return TriState.no(("3-colorings",
                            f"3-colorings = {colorings} > {3 ** comps}"))

    reduced, script = simplify_classical(d, budget)
    if _crossings(reduced) == 0:
        return TriState.yes(script)
    return TriState.unknown()


def is_admissible(d: Diagram,
                  budget: Optional[SearchBudget] = None) -> TriState:
    """Both resolutions must be trivial unlinks; three-valued conjunction."""
    from .resolutions import NEGATIVE, POSITIVE, resolve
    budget = budget or SearchBudget()
    pos = is_trivial_unlink(resolve(d, POSITIVE), budget)
    neg = is_trivial_unlink(resolve(d, NEGATIVE), budget)
    answer = tri_and(pos, neg)
    if answer.value == YES:
        return TriState.yes({"positive": pos.certificate,
                             "negative": neg.certificate})
    return answer
