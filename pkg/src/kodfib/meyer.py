"""Signature of a surface bundle from its symplectic monodromy (Meyer cocycle).

All arithmetic is over the rationals; no floating point.

For symplectic ``A, B`` let ``V = {(x, y) : (A^-1 - I) x + (B - I) y = 0}``
and pair ``(x1, y1)`` with ``(x2, y2)`` by ``<x1 + y1, (I - B) y2>`` where
``<u, v> = u^T J v``. ``tau(A, B)`` is the signature of the symmetrized pairing.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import RelatorViolation, ShapeError
from .linalg import IntMatrix
from .monodromy import SymplecticRep, symplectic_form, symplectic_inverse
from .surface import SurfacePresentation

# Orientation convention for bundle_signature. Products give 0 and section
# sums add under either sign; Meyer's formula carries the minus sign.
SIGNATURE_SIGN = -1


def nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[list[Fraction]]:
    """Basis of the rational kernel of the matrix with the given rows."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -a[i][f]
        basis.append(v)
    return basis


def form_signature(gram: Sequence[Sequence[Fraction]]) -> int:
    """Signature of a symmetric rational matrix by Lagrange reduction."""
    a = [list(map(Fraction, r)) for r in gram]
    n = len(a)
    pos = neg = 0
    k = 0
    while k < n:
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    k += 1
                    continue
                # e_k <- e_k + e_j makes the diagonal entry 2 a[k][j] != 0
                for i in range(n):
                    a[k][i] += a[j][i]
                for i in range(n):
                    a[i][k] += a[i][j]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] / p
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
            a[i][k] = Fraction(0)
        k += 1
    return pos - neg


def meyer_pairing(A: IntMatrix, B: IntMatrix) -> list[list[Fraction]]:
    """Gram matrix (unsymmetrized) of the cocycle pairing on a basis of ``V``."""
    if A.shape != B.shape or not A.is_square() or A.rows % 2:
        raise ShapeError("meyer_tau needs two symplectic matrices of equal even size")
    n = A.rows
    identity = IntMatrix.identity(n)
    left = symplectic_inverse(A) - identity
    right = B - identity
    rows = [left.row(i) + right.row(i) for i in range(n)]
    basis = nullspace(rows, 2 * n)
    if not basis:
        return []
    J = symplectic_form(n // 2)
    i_minus_b = identity - B
    # w_l = J (I - B) y_l, so the pairing is (x_k + y_k) . w_l
    ws = []
    for v in basis:
        y = v[n:]
        t = [sum(i_minus_b[i, j] * y[j] for j in range(n) if i_minus_b[i, j]) for i in range(n)]
        ws.append([sum(J[i, j] * t[j] for j in range(n) if J[i, j]) for i in range(n)])
    us = [[v[i] + v[n + i] for i in range(n)] for v in basis]
    return [[sum(u[i] * w[i] for i in range(n)) for w in ws] for u in us]


def meyer_tau(A: IntMatrix, B: IntMatrix, g: int | None = None) -> int:
    gram = meyer_pairing(A, B)
    if g is not None and A.rows != 2 * g:
        raise ShapeError(f"matrices are {A.rows}x{A.rows}, expected genus {g}")
    if not gram:
        return 0
    sym = [[gram[i][j] + gram[j][i] for j in range(len(gram))] for i in range(len(gram))]
    return form_signature(sym)


def bundle_signature(rep: SymplecticRep) -> int:
    """Signature of the total space, from the relator-ordered images.

    Writes the relator as letters ``g_1 ... g_4b`` and sums
    ``tau(g_1 ... g_j, g_(j+1))`` over ``j = 1 .. 4b-1``.
    """
    relator = SurfacePresentation(rep.base_genus).relator
    inverses = {}
    letters = []
    for gen, exp in relator.letters:
        if exp == 1:
            letters.append(rep.images[gen])
        else:
            if gen not in inverses:
                inverses[gen] = symplectic_inverse(rep.images[gen])
            letters.append(inverses[gen])
    total = 0
    prefix = letters[0]
    for M in letters[1:]:
        total += meyer_tau(prefix, M)
        prefix = prefix @ M
    if not prefix.is_identity():
        raise RelatorViolation("relator does not evaluate to the identity")
    return SIGNATURE_SIGN * total
