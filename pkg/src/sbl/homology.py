"""Abelianization via Smith normal form, exact over the integers."""

from __future__ import annotations

from .invariants import AbelianInvariants


def abelian_invariants(n_generators: int, rows: list[list[int]]) -> AbelianInvariants:
    """Rank and invariant factors of Z^n modulo the row lattice."""
    if not rows:
        return AbelianInvariants(n_generators, ())
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_form
    m = smith_normal_form(Matrix(rows))
    diag = [int(m[i, i]) for i in range(min(m.shape)) if m[i, i] != 0]
    rank = n_generators - len(diag)
    torsion = tuple(abs(x) for x in diag if abs(x) > 1)
    return AbelianInvariants(rank, torsion)
