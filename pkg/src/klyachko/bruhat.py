"""Cells P w Pbar' for the parabolics attached to a pair of model shapes.

P is the standard parabolic of type (1, ..., 1, 2k) (upper block triangular)
and Pbar' is the transpose of the one of type (1, ..., 1, 2k').  Permutations
are tuples of 1-based images, acting by w e_j = e_{w(j)}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MembershipError, SingularMatrixError
from .matlin import Matrix, perm_matrix
from .modelgroups import PairShape, TildeHElement, in_H


def invert_perm(w):
    inv = [0] * len(w)
    for j, wj in enumerate(w, start=1):
        inv[wj - 1] = j
    return tuple(inv)


def compose_perm(a, b):
    """(a o b)(j) = a(b(j))."""
    return tuple(a[bj - 1] for bj in b)


def is_reduced(w, shape: PairShape) -> bool:
    n, r, rp = shape.n, shape.r, shape.rp
    winv = invert_perm(w)
    left = all(winv[i - 1] < winv[i] for i in range(r + 1, n))
    right = all(w[j - 1] < w[j] for j in range(rp + 1, n))
    return left and right


def reduced_reps(shape: PairShape) -> list:
    """All permutations that are minimal in their (W_M, W_M') double coset."""
    return [w for w in itertools.permutations(range(1, shape.n + 1)) if is_reduced(w, shape)]


def I_w_set(w, shape: PairShape) -> tuple:
    winv = invert_perm(w)
    return tuple(i for i in range(1, shape.r + 1) if winv[i - 1] <= shape.rp)


def rank_profile(g: Matrix, shape: PairShape) -> tuple:
    """rank g[i:, j:] for i <= r, j <= r' (0-based); constant on P g Pbar'."""
    return tuple(
        tuple(g.sub(i, g.nrows, j, g.ncols).rank() for j in range(shape.rp + 1))
        for i in range(shape.r + 1)
    )


@dataclass(frozen=True)
class BruhatCell:
    w: tuple
    p: Matrix
    pbar: Matrix
    shape: PairShape

    @property
    def w_matrix(self) -> Matrix:
        return perm_matrix(self.w, self.p.p)

    def product(self) -> Matrix:
        return self.p @ self.w_matrix @ self.pbar


@dataclass
class ActionHistory:
    """g = steps[0] . (steps[1] . ( ... steps[-1] . rep))."""

    steps: list = field(default_factory=list)

    def replay(self, rep: Matrix) -> Matrix:
        out = rep
        for e in reversed(self.steps):
            out = e.act(out)
        return out

    def total(self, shape: PairShape, p: int) -> TildeHElement:
        out = TildeHElement.identity(shape, p)
        for e in self.steps:
            out = out * e
        return out


def _borel_decompose(g: Matrix):
    """g = b . P_w . bbar with b upper unitriangular and bbar lower triangular."""
    n, p = g.nrows, g.p
    cur = [list(r) for r in g.rows]
    b = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    bb = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n - 1, -1, -1):
        row = cur[i]
        j = next((c for c in range(n - 1, -1, -1) if row[c]), None)
        if j is None:
            raise SingularMatrixError("matrix is singular")
        piv_inv = pow(row[j], -1, p)
        # clear above the pivot: row a += c row i with a < i
        for a in range(i):
            if cur[a][j]:
                c = (-cur[a][j] * piv_inv) % p
                cur[a] = [(x + c * y) % p for x, y in zip(cur[a], row)]
                for t in range(n):
                    if b[t][a]:
                        b[t][i] = (b[t][i] - c * b[t][a]) % p
        # clear left of the pivot: col c += t col j with c < j
        for c in range(j):
            if row[c]:
                t = (-row[c] * piv_inv) % p
                for a in range(n):
                    if cur[a][j]:
                        cur[a][c] = (cur[a][c] + t * cur[a][j]) % p
                bb[j] = [(x - t * y) % p for x, y in zip(bb[j], bb[c])]
    w = [0] * n
    for i in range(n):
        for j in range(n):
            if cur[i][j]:
                w[j] = i + 1
                # absorb the diagonal into bbar
                bb[j] = [(cur[i][j] * x) % p for x in bb[j]]
    return tuple(w), Matrix(b, p), Matrix(bb, p)


def _reduce_perm(wb, shape: PairShape):
    """(x, y, w_red) with w_red = x o wb o y reduced, x in W_M, y in W_M'."""
    n, r, rp = shape.n, shape.r, shape.rp
    tail = list(range(rp + 1, n + 1))
    order = sorted(tail, key=lambda j: (wb[j - 1] > r, wb[j - 1]))
    y = list(range(1, n + 1))
    for slot, old in zip(tail, order):
        y[slot - 1] = old
    y = tuple(y)
    w1 = compose_perm(wb, y)
    wred = list(w1)
    nxt = r + 1
    for j in range(n):
        if w1[j] > r:
            wred[j] = nxt
            nxt += 1
    wred = tuple(wred)
    x = list(range(1, n + 1))
    for j in range(n):
        x[w1[j] - 1] = wred[j]
    return tuple(x), y, wred


def bruhat_cell(g: Matrix, shape: PairShape) -> BruhatCell:
    if not g.is_square or g.nrows != shape.n:
        raise MembershipError(f"expected a {shape.n}x{shape.n} matrix")
    wb, b, bb = _borel_decompose(g)
    x, y, wred = _reduce_perm(wb, shape)
    p = g.p
    pmat = b @ perm_matrix(invert_perm(x), p)
    pbar = perm_matrix(invert_perm(y), p) @ bb
    return BruhatCell(wred, pmat, pbar, shape)


def levi_parts(cell: BruhatCell):
    """(m, m') with p = u m and pbar = m' ubar', m and m' in the two Levis."""
    shape = cell.shape
    n, r, rp = shape.n, shape.r, shape.rp
    P, Q = cell.p, cell.pbar
    m = [[0] * n for _ in range(n)]
    for i in range(r):
        m[i][i] = P[i, i]
    for i in range(r, n):
        m[i][r:] = P.rows[i][r:]
    mp = [[0] * n for _ in range(n)]
    for i in range(rp):
        mp[i][i] = Q[i, i]
    for i in range(rp, n):
        mp[i][rp:] = Q.rows[i][rp:]
    return Matrix(m, P.p), Matrix(mp, P.p)


def strip_to_levi(cell: BruhatCell):
    """(rep, hist) with rep = m w m' and hist.replay(rep) = the cell's matrix.

    The unipotent radicals of P and Pbar' sit inside the model subgroups, so
    the single step (u, t(ubar'), +1) moves rep back to g.
    """
    shape = cell.shape
    m, mp = levi_parts(cell)
    u = cell.p @ m.inv()
    ubar = mp.inv() @ cell.pbar
    rep = m @ cell.w_matrix @ mp
    hist = ActionHistory()
    if u.is_identity() and ubar.is_identity():
        return rep, hist
    if not (in_H(u, shape.left) and in_H(ubar.T, shape.right)):
        raise MembershipError("stripped unipotent factor is not in the model subgroup")
    hist.steps.append(TildeHElement(u, ubar.T, 1, shape))
    return rep, hist
