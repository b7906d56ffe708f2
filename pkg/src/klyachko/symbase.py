"""The symplectic base case: for g in GL_{2k} find y in Sp(J) with
g^{-1} y t(g) in Sp(J).

Writing A = t(g)^{-1} J g^{-1} and A' = g^{-1} J t(g)^{-1}, the condition is
t(y) A y = A', i.e. y^{-1} T y = T' for T = J^{-1} A, T' = J^{-1} A'.  Both
operators are self-adjoint for the form w(u, v) = t(u) J v, and two such
operators that are conjugate in GL are conjugate in Sp.  The constructive
step builds, for each operator, a basis in which the form is
((0, I), (-I, 0)) and the operator is diag(B, t(B)); matching B with B'
inside GL_k then gives y.
"""

from __future__ import annotations

import itertools
import random

from .errors import BudgetExceeded, SingularMatrixError, TheoryViolation, UnsupportedField
from .matlin import J, Matrix, block_diag, hstack, nullspace, solve
from .modelgroups import DEFAULT_BUDGET, in_Sp, sp_array, sp_order

_SEED = 20240611


def _krylov(T: Matrix, v: Matrix, limit: int):
    """Columns v, Tv, ... up to the first linear dependence."""
    cols = [v]
    basis = v
    while len(cols) < limit:
        nxt = T @ cols[-1]
        trial = hstack(basis, nxt)
        if trial.rank() == len(cols):
            return cols, nxt
        cols.append(nxt)
        basis = trial
    return cols, T @ cols[-1]


def _local_degree(T: Matrix, v: Matrix, W: Matrix):
    """Degree of the local minimal polynomial of v, and whether it kills W."""
    cols, nxt = _krylov(T, v, W.ncols)
    d = len(cols)
    K = hstack(*cols)
    coeffs = solve(K, nxt)  # T^d v = sum c_i T^i v
    # mu(T) W with mu(t) = t^d - sum c_i t^i
    p = T.p
    acc = Matrix.zeros(T.nrows, W.ncols, p)
    powW = W
    for i in range(d):
        acc = acc - powW.scale(coeffs[i, 0])
        powW = T @ powW
    acc = acc + powW
    return d, acc.is_zero()


def _maximal_vector(T: Matrix, W: Matrix, rnd: random.Random) -> Matrix:
    p, dim = T.p, W.ncols
    tries = [Matrix.column([1 if i == j else 0 for i in range(dim)], p) for j in range(dim)]
    tries += [Matrix.column([rnd.randrange(p) for _ in range(dim)], p) for _ in range(24)]
    for c in tries:
        if c.is_zero():
            continue
        v = W @ c
        _, kills = _local_degree(T, v, W)
        if kills:
            return v
    if p ** dim <= 10**5:
        for coords in itertools.product(range(p), repeat=dim):
            if not any(coords):
                continue
            v = W @ Matrix.column(coords, p)
            if _local_degree(T, v, W)[1]:
                return v
    raise TheoryViolation("no vector of maximal local degree found")


def adapted_basis(T: Matrix, rnd: random.Random | None = None):
    """(S, B): t(S) J S = J' and S^{-1} T S = diag(B, t(B))."""
    rnd = rnd or random.Random(_SEED)
    n, p = T.nrows, T.p
    Jn = J(n, p)
    W = Matrix.identity(n, p)
    es, fs, blocks = [], [], []
    while W.ncols:
        v = _maximal_vector(T, W, rnd)
        cols, _ = _krylov(T, v, W.ncols)
        d = len(cols)
        E = hstack(*cols)
        # w in W with w(T^m v, w) = delta_{m, d-1}
        rows = (E.T @ Jn @ W)
        rhs = Matrix.column([1 if m == d - 1 else 0 for m in range(d)], p)
        w = W @ solve(rows, rhs)
        wcols = [w]
        for _ in range(d - 1):
            wcols.append(T @ wcols[-1])
        Fw = hstack(*wcols)
        H = E.T @ Jn @ Fw
        F = Fw @ H.inv()
        es.extend(E.col(i) for i in range(d))
        fs.extend(F.col(i) for i in range(d))
        # B block: coordinates of T e_a in e
        blocks.append(solve(E, T @ E))
        EF = hstack(E, F)
        W = W @ nullspace(EF.T @ Jn @ W)
    S = Matrix(list(es) + list(fs), p).T
    B = block_diag(*blocks)
    return S, B


def _intertwiner(B: Matrix, Bp: Matrix, rnd: random.Random) -> Matrix:
    """Invertible P with B P = P B'."""
    d, p = B.nrows, B.p
    # unknown P flattened row-major; equation sum_k B[i,k]P[k,j] - P[i,k]B'[k,j] = 0
    rows = []
    for i in range(d):
        for j in range(d):
            row = [0] * (d * d)
            for k in range(d):
                row[k * d + j] += B[i, k]
                row[i * d + k] -= Bp[k, j]
            rows.append(row)
    N = nullspace(Matrix(rows, p, d * d))
    if N.ncols == 0:
        raise TheoryViolation("blocks are not similar")

    def as_matrix(vec):
        return Matrix([vec[i * d:(i + 1) * d] for i in range(d)], p)

    for _ in range(64):
        c = Matrix.column([rnd.randrange(p) for _ in range(N.ncols)], p)
        P = as_matrix((N @ c).col(0))
        if P.is_invertible():
            return P
    if p ** N.ncols <= 10**5:
        for coords in itertools.product(range(p), repeat=N.ncols):
            P = as_matrix((N @ Matrix.column(coords, p)).col(0))
            if P.is_invertible():
                return P
    raise TheoryViolation("no invertible intertwiner found")


def pencil_solution(g: Matrix) -> Matrix:
    """y in Sp(J) with t(y) A y = A' (see module docstring)."""
    n, p = g.nrows, g.p
    Jn = J(n, p)
    ginv = g.inv()
    Jinv = Jn.inv()
    T = Jinv @ ginv.T @ Jn @ ginv
    Tp = Jinv @ ginv @ Jn @ ginv.T
    rnd = random.Random(_SEED)
    S, B = adapted_basis(T, rnd)
    Sp_, Bp = adapted_basis(Tp, rnd)
    P = _intertwiner(B, Bp, rnd)
    Q = block_diag(P, P.T.inv())
    return S @ Q @ Sp_.inv()


def _is_solution(g: Matrix, y: Matrix) -> bool:
    return in_Sp(y) and in_Sp(g.inv() @ y @ g.T)


def exhaustive_solution(g: Matrix, budget=DEFAULT_BUDGET) -> Matrix:
    n, p = g.nrows, g.p
    order = sp_order(n, p)
    if order * n**3 > budget:
        raise BudgetExceeded(f"Sp_{n}(F_{p}) search", order, budget)
    for arr in sp_array(n, p, budget):
        y = Matrix(arr.tolist(), p, n)
        if _is_solution(g, y):
            return y
    raise TheoryViolation("exhaustive search found no symplectic witness")


def solve_symplectic_base(g: Matrix, finite: bool = True):
    """(y, tier) with y in Sp(J) and g^{-1} y t(g) in Sp(J)."""
    n, p = g.nrows, g.p
    one = Matrix.identity(n, p)
    if _is_solution(g, one):
        return one, 1
    try:
        y = pencil_solution(g)
        if _is_solution(g, y):
            return y, 2
    except (TheoryViolation, SingularMatrixError):
        pass
    if not finite:
        raise UnsupportedField("unsupported field for symplectic base case")
    return exhaustive_solution(g), 3
