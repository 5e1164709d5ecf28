"""Reading and writing the diagram text format.

One diagram per ``diagram <name> ... end`` block; ``#`` starts a comment.
Records may appear in any order inside a block; identifiers are resolved
once the block is complete.  Parsing performs grammar-level checks only
(duplicate ids, unknown references, slots out of range); structural
soundness is :meth:`sbl.diagram.Diagram.validate`'s job.

    diagram <name>
    loop <id>
    vertex <id> X  over=<0|1>            # link-link crossing
    vertex <id> BL over=<bond|link>      # bond-link crossing
    vertex <id> BB over=<0|1>            # bond-bond crossing
    vertex <id> E  bond=<bond-id>        # bond endpoint
    vertex <id> M  pos=<0|1>             # marked vertex
    edge <id> <v1>.<slot> <v2>.<slot> kind=<link|bond>
    bond <id> color=<int> path=<edge-id,...>
    end
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .build import DiagramBuilder
from .diagram import BB, BL, BOND, E, LINK, M, X, Diagram


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class _Tok:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[list[_Tok]]:
    rows = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = []
        col = 0
        i = 0
        while i < len(line):
            if line[i].isspace():
                i += 1
                continue
            j = i
            while j < len(line) and not line[j].isspace():
                j += 1
            toks.append(_Tok(line[i:j], ln, i + 1))
            i = j
        if toks:
            rows.append(toks)
    return rows


def _kv(tok: _Tok, key: str) -> str:
    if not tok.text.startswith(key + "="):
        raise ParseError(tok.line, tok.column, f"expected {key}=..., got {tok.text!r}")
    return tok.text[len(key) + 1:]


def _int(tok: _Tok, value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(tok.line, tok.column, f"{what} must be an integer") from None


def _parse_block(rows: list[list[_Tok]], start: int) -> tuple[Diagram, int]:
    head = rows[start]
    if head[0].text != "diagram":
        raise ParseError(head[0].line, head[0].column,
                         "expected `diagram` header")
    if len(head) != 2:
        raise ParseError(head[0].line, head[0].column,
                         "diagram header needs exactly one name")
    name = head[1].text

    loops: dict[str, _Tok] = {}
    vertices: dict[str, tuple[_Tok, str, dict]] = {}
    edges: dict[str, tuple[_Tok, tuple, tuple, str]] = {}
    bonds: dict[str, tuple[_Tok, int, list[str]]] = {}

    def check_fresh(tok: _Tok, ident: str) -> None:
        if ident in loops or ident in vertices or ident in edges or ident in bonds:
            raise ParseError(tok.line, tok.column, f"duplicate id {ident!r}")

    i = start + 1
    closed = False
    while i < len(rows):
        row = rows[i]
        word = row[0]
        i += 1
        if word.text == "end":
            closed = True
            break
        if word.text == "loop":
            if len(row) != 2:
                raise ParseError(word.line, word.column, "loop takes one id")
            check_fresh(row[1], row[1].text)
            loops[row[1].text] = row[1]
        elif word.text == "vertex":
            if len(row) != 4:
                raise ParseError(word.line, word.column,
                                 "vertex takes id, kind and one option")
            ident, kind, opt = row[1].text, row[2].text, row[3]
            check_fresh(row[1], ident)
            if kind == X or kind == BB:
                over = _int(opt, _kv(opt, "over"), "over")
                if over not in (0, 1):
                    raise ParseError(opt.line, opt.column, "over must be 0 or 1")
                vertices[ident] = (row[1], kind, {"over_slot": over})
            elif kind == BL:
                side = _kv(opt, "over")
                if side not in (BOND, LINK):
                    raise ParseError(opt.line, opt.column,
                                     "over must be `bond` or `link`")
                vertices[ident] = (row[1], kind, {"bond_over": side == BOND})
            elif kind == E:
                vertices[ident] = (row[1], kind, {"bond": _kv(opt, "bond"),
                                                  "_bond_tok": opt})
            elif kind == M:
                pos = _int(opt, _kv(opt, "pos"), "pos")
                if pos not in (0, 1):
                    raise ParseError(opt.line, opt.column, "pos must be 0 or 1")
                vertices[ident] = (row[1], kind, {"positive_slot": pos})
            else:
                raise ParseError(row[2].line, row[2].column,
                                 f"unknown vertex kind {kind!r}")
        elif word.text == "edge":
            if len(row) != 5:
                raise ParseError(word.line, word.column,
                                 "edge takes id, two attachments and kind=...")
            ident = row[1].text
            check_fresh(row[1], ident)
            atts = []
            for tok in row[2:4]:
                if "." not in tok.text:
                    raise ParseError(tok.line, tok.column,
                                     "attachment must be <vertex>.<slot>")
                vpart, spart = tok.text.rsplit(".", 1)
                atts.append((vpart, _int(tok, spart, "slot"), tok))
            kind = _kv(row[4], "kind")
            if kind not in (LINK, BOND):
                raise ParseError(row[4].line, row[4].column,
                                 "kind must be `link` or `bond`")
            edges[ident] = (row[1], atts[0], atts[1], kind)
        elif word.text == "bond":
            if len(row) != 4:
                raise ParseError(word.line, word.column,
                                 "bond takes id, color=... and path=...")
            ident = row[1].text
            check_fresh(row[1], ident)
            color = _int(row[2], _kv(row[2], "color"), "color")
            path = [p for p in _kv(row[3], "path").split(",") if p]
            if not path:
                raise ParseError(row[3].line, row[3].column, "empty bond path")
            bonds[ident] = (row[1], color, path)
        else:
            raise ParseError(word.line, word.column,
                             f"unknown record {word.text!r}")
    if not closed:
        last = rows[-1][0]
        raise ParseError(last.line, last.column, "missing `end`")

    # resolve references and build
    b = DiagramBuilder(name)
    degree = {ident: (3 if kind == E else 4)
              for ident, (_, kind, _o) in vertices.items()}
    for ident in sorted(loops):
        b.add_loop(ident)
    for ident in sorted(bonds):
        _tok, color, _path = bonds[ident]
        b.add_bond(color, ident)
    for ident in sorted(vertices):
        tok, kind, opts = vertices[ident]
        opts = dict(opts)
        btok = opts.pop("_bond_tok", None)
        if kind == E and opts["bond"] not in bonds:
            raise ParseError(btok.line, btok.column,
                             f"reference to undeclared bond {opts['bond']!r}")
        b.add_vertex(kind, ident, **opts)

    edge_bond: dict[str, str] = {}
    for ident in sorted(bonds):
        tok, _color, path = bonds[ident]
        for eid in path:
            if eid not in edges:
                raise ParseError(tok.line, tok.column,
                                 f"reference to undeclared edge {eid!r}")
            if edge_bond.get(eid, ident) != ident:
                raise ParseError(tok.line, tok.column,
                                 f"edge {eid!r} appears in two bonds")
            edge_bond[eid] = ident

    for ident in sorted(edges):
        _tok, a, bb_, kind = edges[ident]
        b.add_edge(kind, ident, bond=edge_bond.get(ident))
        for side, (vid, slot, tok) in enumerate((a, bb_)):
            if vid not in vertices:
                raise ParseError(tok.line, tok.column,
                                 f"reference to undeclared vertex {vid!r}")
            if not 0 <= slot < degree[vid]:
                raise ParseError(tok.line, tok.column,
                                 f"slot {slot} out of range for kind "
                                 f"{vertices[vid][1]}")
            try:
                b.attach(vid, slot, (ident, side))
            except Exception as exc:
                raise ParseError(tok.line, tok.column, str(exc)) from None

    try:
        return b.freeze(validate=False), i
    except Exception as exc:
        raise ParseError(head[0].line, head[0].column, str(exc)) from None


def parse_corpus(text: str) -> list[Diagram]:
    rows = _tokenize(text)
    if not rows:
        return []
    out = []
    i = 0
    while i < len(rows):
        d, i = _parse_block(rows, i)
        out.append(d)
    return out


def parse_diagram(text: str) -> Diagram:
    rows = _tokenize(text)
    if not rows:
        raise ParseError(1, 1, "missing `diagram` header")
    d, nxt = _parse_block(rows, 0)
    if nxt != len(rows):
        tok = rows[nxt][0]
        raise ParseError(tok.line, tok.column,
                         "trailing content after single diagram block")
    return d


def serialize_diagram(d: Diagram) -> str:
    lines = [f"diagram {d.name}"]
    for lid in sorted(d.free_loops):
        lines.append(f"loop {lid}")
    for vid in sorted(d.vertices):
        v = d.vertices[vid]
        if v.kind in (X, BB):
            lines.append(f"vertex {vid} {v.kind} over={v.over_slot}")
        elif v.kind == BL:
            lines.append(f"vertex {vid} BL over={BOND if v.bond_over else LINK}")
        elif v.kind == E:
            lines.append(f"vertex {vid} E bond={v.bond}")
        else:
            lines.append(f"vertex {vid} M pos={v.positive_slot}")
    for eid, (da, db) in sorted(d.edges().items()):
        a, bb_ = sorted(((da.vertex, da.slot), (db.vertex, db.slot)))
        lines.append(f"edge {eid} {a[0]}.{a[1]} {bb_[0]}.{bb_[1]} "
                     f"kind={da.strand_kind}")
    for bid in sorted(d.bonds):
        bond = d.bonds[bid]
        path = ",".join(dict.fromkeys(d.darts[x].edge for x in bond.dart_path))
        lines.append(f"bond {bid} color={bond.color} path={path}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_corpus(diagrams: list[Diagram]) -> str:
    return "\n".join(serialize_diagram(d) for d in diagrams)
