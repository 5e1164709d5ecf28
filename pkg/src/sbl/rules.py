"""Move rules: parsing and validation of the rule catalog format.

A catalog file is a sequence of rule blocks.  Each rule has one or more
variants (a variant is a lhs/rhs fragment pair with a leg correspondence
and color expressions); several variants under one name cover chiralities
that auto-mirroring cannot reach, such as the two twist signs of the
color-shift move.

    rule <name>
    mirror auto|none            # optional, default auto
    lhs ... end                 # fragment records
    rhs ... end
    legs a b c | legs a=x b=y   # counterclockwise boundary order
    colors <stmt>; <stmt>       # optional, e.g.  c:int; rhs.b1.color = c - 2
    end

or, with several variants,

    rule <name>
    mirror none
    variant
    lhs ... end
    rhs ... end
    legs ...
    end
    variant ... end
    end

Fragment records reuse the diagram grammar with ``@name`` leg ends, and a
bond's ``color=`` field may be an expression in one integer variable
(``c``, ``c+2``, ``-1`` and so on).  Variables are bound by matching the
side a move is applied to and evaluated on the side being produced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .diagram import BB, BL, BOND, E, LINK, M, X
from .fragments import FragEdge, Fragment, FragVertex, RuleFormatError

FWD = "fwd"
BWD = "bwd"

_EXPR_RE = re.compile(r"^(-?)(?:([A-Za-z_]\w*)|(\d+))(?:([+-])(\d+))?$")


@dataclass(frozen=True)
class ColorExpr:
    """A linear expression  sign*var + offset  or a plain integer."""
    var: Optional[str]
    sign: int
    offset: int

    @staticmethod
    def parse(text: str) -> "ColorExpr":
        m = _EXPR_RE.match(text.strip())
        if not m:
            raise RuleFormatError(f"bad color expression {text!r}")
        neg, var, num, op, tail = m.groups()
        sign = -1 if neg else 1
        if var is not None:
            offset = 0
            if op:
                offset = int(tail) if op == "+" else -int(tail)
            return ColorExpr(var, sign, offset)
        value = sign * int(num)
        if op:
            value += int(tail) if op == "+" else -int(tail)
        return ColorExpr(None, 1, value)

    def evaluate(self, binding: dict[str, int]) -> int:
        if self.var is None:
            return self.offset
        if self.var not in binding:
            raise RuleFormatError(f"unbound color variable {self.var}")
        return self.sign * binding[self.var] + self.offset

    def solve(self, value: int, binding: dict[str, int]) -> bool:
        """Bind or check the variable so the expression equals value."""
        if self.var is None:
            return value == self.offset
        want = (value - self.offset) * self.sign
        if self.var in binding:
            return binding[self.var] == want
        binding[self.var] = want
        return True

    def __str__(self) -> str:
        if self.var is None:
            return str(self.offset)
        s = "-" if self.sign < 0 else ""
        if self.offset:
            return f"{s}{self.var}{self.offset:+d}"
        return f"{s}{self.var}"


@dataclass
class RuleVariant:
    lhs: Fragment
    rhs: Fragment
    leg_map: dict[str, str]               # lhs leg -> rhs leg
    colors: dict[tuple[str, str], ColorExpr]  # (side, symbol) -> expr
    _mirror_cache: dict = field(default_factory=dict)

    def fragment(self, side: str, mirrored: bool) -> Fragment:
        frag = self.lhs if side == "lhs" else self.rhs
        if not mirrored:
            return frag
        if side not in self._mirror_cache:
            self._mirror_cache[side] = frag.mirrored()
        return self._mirror_cache[side]

    def color_expr(self, side: str, symbol: str) -> ColorExpr:
        return self.colors.get((side, symbol), ColorExpr(None, 1, 0))


@dataclass
class MoveRule:
    name: str
    variants: list[RuleVariant]
    mirror: str = "auto"   # "auto" | "none"
    reversible: bool = True

    def sides(self, direction: str) -> tuple[str, str]:
        """(source side, target side) for a direction."""
        return ("lhs", "rhs") if direction == FWD else ("rhs", "lhs")


# -- catalog text parsing -----------------------------------------------------


def _tokenize(text: str) -> list[list[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def _parse_fragment(rows: list[list[str]], i: int) -> tuple[Fragment, int]:
    vertices: dict[str, FragVertex] = {}
    edges: dict[str, FragEdge] = {}
    bonds: dict[str, list[str]] = {}
    colors: dict[str, ColorExpr] = {}
    while i < len(rows):
        row = rows[i]
        i += 1
        if row[0] == "end":
            frag = Fragment(vertices, edges, [], bonds)
            frag._color_exprs = colors  # attached for the rule parser
            return frag, i
        if row[0] == "vertex":
            ident, kind, opt = row[1], row[2], row[3]
            key, _, val = opt.partition("=")
            if kind in (X, BB):
                vertices[ident] = FragVertex(ident, kind, over_slot=int(val))
            elif kind == BL:
                vertices[ident] = FragVertex(ident, kind,
                                             bond_over=(val == BOND))
            elif kind == E:
                vertices[ident] = FragVertex(ident, kind, bond=val)
            elif kind == M:
                vertices[ident] = FragVertex(ident, kind, positive_slot=int(val))
            else:
                raise RuleFormatError(f"unknown vertex kind {kind}")
        elif row[0] == "edge":
            ident = row[1]
            ends = []
            for tok in row[2:4]:
                if tok.startswith("@"):
                    ends.append(("leg", tok[1:]))
                else:
                    v, _, s = tok.rpartition(".")
                    ends.append(("v", v, int(s)))
            kind = row[4].partition("=")[2]
            edges[ident] = FragEdge(ident, (ends[0], ends[1]), kind)
        elif row[0] == "bond":
            ident = row[1]
            colors[ident] = ColorExpr.parse(row[2].partition("=")[2])
            path = row[3].partition("=")[2].split(",")
            bonds[ident] = path
            for eid in path:
                if eid not in edges:
                    raise RuleFormatError(f"bond {ident} references unknown "
                                          f"edge {eid}")
                edges[eid].bond = ident
        else:
            raise RuleFormatError(f"unexpected record {row[0]!r} in fragment")
    raise RuleFormatError("fragment not closed with `end`")


def _parse_variant_body(rows, i, colors, stop_word):
    lhs = rhs = None
    legs_lhs: list[str] = []
    leg_map: dict[str, str] = {}
    while i < len(rows):
        row = rows[i]
        if row[0] == stop_word:
            i += 1
            break
        i += 1
        if row[0] == "lhs":
            lhs, i = _parse_fragment(rows, i)
        elif row[0] == "rhs":
            rhs, i = _parse_fragment(rows, i)
        elif row[0] == "legs":
            for tok in row[1:]:
                a, _, b = tok.partition("=")
                b = b or a
                legs_lhs.append(a)
                leg_map[a] = b
        elif row[0] == "colors":
            for stmt in " ".join(row[1:]).split(";"):
                stmt = stmt.strip()
                if not stmt or stmt.endswith(":int"):
                    continue
                lhsrhs, _, expr = stmt.partition("=")
                m = re.match(r"^(lhs|rhs)\.(\w+)\.color$", lhsrhs.strip())
                if not m:
                    raise RuleFormatError(f"bad colors statement {stmt!r}")
                colors[(m.group(1), m.group(2))] = ColorExpr.parse(expr)
        else:
            raise RuleFormatError(f"unexpected record {row[0]!r} in rule")
    if lhs is None or rhs is None:
        raise RuleFormatError("rule needs both lhs and rhs")
    return lhs, rhs, legs_lhs, leg_map, i


def _finish_variant(lhs: Fragment, rhs: Fragment, legs_lhs, leg_map,
                    colors) -> RuleVariant:
    for side, frag in (("lhs", lhs), ("rhs", rhs)):
        for sym, expr in getattr(frag, "_color_exprs", {}).items():
            colors.setdefault((side, sym), expr)
    lhs.legs = list(legs_lhs)
    rhs_order = [leg_map[a] for a in legs_lhs]
    rhs.legs = rhs_order
    if len(leg_map) != len(set(leg_map.values())):
        raise RuleFormatError("leg map is not a bijection")
    if set(rhs_order) != set(rhs.leg_edge_names()):
        raise RuleFormatError("leg arity mismatch between lhs and rhs")
    if set(legs_lhs) != set(lhs.leg_edge_names()):
        raise RuleFormatError("leg arity mismatch: legs line does not "
                              "match lhs fragment")
    lhs.finalize()
    rhs.finalize()
    for a in legs_lhs:
        ka = lhs.edges[lhs.leg_edge[a][0]].kind
        kb = rhs.edges[rhs.leg_edge[leg_map[a]][0]].kind
        if ka != kb:
            raise RuleFormatError(f"leg {a} changes strand kind {ka}->{kb}")
    return RuleVariant(lhs, rhs, dict(leg_map), dict(colors))


def load_rule_catalog(text: str) -> list[MoveRule]:
    rows = _tokenize(text)
    rules: list[MoveRule] = []
    i = 0
    while i < len(rows):
        row = rows[i]
        if row[0] != "rule":
            raise RuleFormatError(f"expected `rule`, got {row[0]!r}")
        name = row[1]
        i += 1
        mirror = "auto"
        variants: list[RuleVariant] = []
        while i < len(rows):
            row = rows[i]
            if row[0] == "end":
                i += 1
                break
            if row[0] == "mirror":
                mirror = row[1]
                i += 1
            elif row[0] == "variant":
                i += 1
                colors: dict = {}
                lhs, rhs, legs_lhs, leg_map, i = _parse_variant_body(
                    rows, i, colors, "end")
                variants.append(_finish_variant(lhs, rhs, legs_lhs,
                                                leg_map, colors))
            elif row[0] in ("lhs", "rhs", "legs", "colors"):
                colors = {}
                lhs, rhs, legs_lhs, leg_map, i = _parse_variant_body(
                    rows, i, colors, "end")
                variants.append(_finish_variant(lhs, rhs, legs_lhs,
                                                leg_map, colors))
                break
            else:
                raise RuleFormatError(f"unexpected {row[0]!r} in rule {name}")
        if not variants:
            raise RuleFormatError(f"rule {name} has no variants")
        rules.append(MoveRule(name, variants, mirror))
    return rules
