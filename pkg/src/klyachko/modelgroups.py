"""The model subgroups H_{r,2k}, their characters, the pair group acting on
GL_n by h . g = h1 g t(h2), its sign extension, and finite enumerators.

Convention: a pair-group element is stored as (h1, h2) with h1 in H_{r,2k}
and h2 in H_{r',2k'}; the corresponding element of the pair group inside
H x Hbar' is (h1, h2^tau).  The sign extension adds eps in {+1, -1}, acting
through T_eps with T_{+1}(g) = g and T_{-1}(g) = t(g).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, DimensionError, MembershipError, ShapeError
from .exactfield import CharacterValue
from .matlin import J, Matrix, block_compose

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class ModelShape:
    n: int
    r: int

    def __post_init__(self):
        if self.r < 0 or self.r > self.n or (self.n - self.r) % 2:
            raise ShapeError(f"n - r must be even and non-negative (n={self.n}, r={self.r})")

    @property
    def k(self) -> int:
        return (self.n - self.r) // 2


@dataclass(frozen=True)
class PairShape:
    """n = r + 2k = r' + 2k'."""

    n: int
    r: int
    rp: int

    def __post_init__(self):
        for rr in (self.r, self.rp):
            if rr < 0 or rr > self.n or (self.n - rr) % 2:
                raise ShapeError(
                    f"parity violation: n - r and n - r' must be even and non-negative "
                    f"(n={self.n}, r={self.r}, r'={self.rp})"
                )

    @property
    def left(self) -> ModelShape:
        return ModelShape(self.n, self.r)

    @property
    def right(self) -> ModelShape:
        return ModelShape(self.n, self.rp)

    @property
    def k(self) -> int:
        return (self.n - self.r) // 2

    @property
    def kp(self) -> int:
        return (self.n - self.rp) // 2

    def swapped(self) -> "PairShape":
        return PairShape(self.n, self.rp, self.r)

    def __str__(self):
        return f"(n={self.n}, r={self.r}, r'={self.rp})"


def legal_pairs(n: int) -> list:
    rs = [r for r in range(n, -1, -1) if (n - r) % 2 == 0]
    return [(r, rp) for r in rs for rp in rs]


# membership -----------------------------------------------------------------

def _check_square(g: Matrix, n: int):
    if g.nrows != n or g.ncols != n:
        raise DimensionError(f"expected a {n}x{n} matrix, got {g.shape}")


def in_U(g: Matrix, r: int | None = None) -> bool:
    """Upper unitriangular."""
    if r is not None:
        _check_square(g, r)
    rows = g.rows
    for i, row in enumerate(rows):
        if row[i] != 1 or any(row[:i]):
            return False
    return g.is_square


def in_Ubar(g: Matrix, r: int | None = None) -> bool:
    return in_U(g.T, r)


def in_Sp(g: Matrix, form: Matrix | None = None) -> bool:
    """t(g) form g == form; the form defaults to J."""
    if form is None:
        if g.nrows % 2:
            return False
        form = J(g.nrows, g.p)
    _check_square(g, form.nrows)
    return g.T @ form @ g == form


def in_H(g: Matrix, shape: ModelShape) -> bool:
    n, r = shape.n, shape.r
    _check_square(g, n)
    rows = g.rows
    for i in range(r):
        row = rows[i]
        if row[i] != 1 or any(row[:i]):
            return False
    for i in range(r, n):
        if any(rows[i][:r]):
            return False
    if r == n:
        return True
    return in_Sp(g.sub(r, n, r, n))


def in_Hbar(g: Matrix, shape: ModelShape) -> bool:
    return in_H(g.T, shape)


def membership(kind: str, g: Matrix, param=None) -> bool:
    """Dispatch on kind in {U_r, Ubar_r, Sp, H, Hbar}."""
    if kind == "U_r":
        return in_U(g, param)
    if kind == "Ubar_r":
        return in_Ubar(g, param)
    if kind == "Sp":
        return in_Sp(g, param)
    if kind == "H":
        return in_H(g, param)
    if kind == "Hbar":
        return in_Hbar(g, param)
    raise ValueError(f"unknown group kind {kind!r}")


# characters -----------------------------------------------------------------

def psi_r(u: Matrix) -> CharacterValue:
    if not in_U(u):
        raise MembershipError("psi_r needs an upper unitriangular matrix")
    return CharacterValue(u.p, sum(u.rows[i][i + 1] for i in range(u.nrows - 1)))


def psi_model(h: Matrix, shape: ModelShape) -> CharacterValue:
    """psi_r of the top-left unipotent block."""
    if not in_H(h, shape):
        raise MembershipError(f"matrix is not in H_{{{shape.r},{2 * shape.k}}}")
    return CharacterValue(h.p, sum(h.rows[i][i + 1] for i in range(shape.r - 1)))


def theta(h1: Matrix, h2: Matrix, shape: PairShape) -> CharacterValue:
    """theta on the pair element (h1, h2^tau)."""
    return psi_model(h1, shape.left) * psi_model(h2, shape.right)


def decompose_H(h: Matrix, shape: ModelShape):
    """(u, X, s) with h = ((u, X), (0, s))."""
    if not in_H(h, shape):
        raise MembershipError("matrix is not in the model subgroup")
    n, r = shape.n, shape.r
    return h.sub(0, r, 0, r), h.sub(0, r, r, n), h.sub(r, n, r, n)


def compose_H(u: Matrix, X: Matrix, s: Matrix) -> Matrix:
    r, m = u.nrows, s.nrows
    return block_compose([[u, X], [Matrix.zeros(m, r, u.p), s]])


# the sign-extended pair group ----------------------------------------------

@dataclass(frozen=True)
class TildeHElement:
    h1: Matrix
    h2: Matrix
    eps: int
    shape: PairShape = field(compare=False)

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ShapeError(f"eps must be +1 or -1, got {self.eps!r}")
        if self.eps == -1 and self.shape.r != self.shape.rp:
            raise ShapeError("eps = -1 requires r = r'")

    @classmethod
    def identity(cls, shape: PairShape, p: int) -> "TildeHElement":
        one = Matrix.identity(shape.n, p)
        return cls(one, one, 1, shape)

    def validate(self) -> "TildeHElement":
        if not in_H(self.h1, self.shape.left):
            raise MembershipError("h1 is not in H_{r,2k}")
        if not in_H(self.h2, self.shape.right):
            raise MembershipError("h2 is not in H_{r',2k'}")
        return self

    def __mul__(self, other: "TildeHElement") -> "TildeHElement":
        if other.shape != self.shape:
            raise ShapeError("shapes differ")
        if self.eps == 1:
            return TildeHElement(self.h1 @ other.h1, self.h2 @ other.h2, other.eps, self.shape)
        return TildeHElement(self.h1 @ other.h2, self.h2 @ other.h1, -other.eps, self.shape)

    def inverse(self) -> "TildeHElement":
        if self.eps == 1:
            return TildeHElement(self.h1.inv(), self.h2.inv(), 1, self.shape)
        return TildeHElement(self.h2.inv(), self.h1.inv(), -1, self.shape)

    def xi(self) -> "TildeHElement":
        """Swap the two factors; lands in the group of the swapped shape."""
        return TildeHElement(self.h2, self.h1, self.eps, self.shape.swapped())

    def act(self, g: Matrix) -> Matrix:
        tg = g if self.eps == 1 else g.T
        return self.h1 @ tg @ self.h2.T

    def theta(self) -> CharacterValue:
        return theta(self.h1, self.h2, self.shape)

    def theta_tilde(self) -> CharacterValue:
        return self.theta().with_sign(self.eps)


def theta_tilde(e: TildeHElement) -> CharacterValue:
    return e.theta_tilde()


def tildeH_algebra(op: str, *args):
    if op == "mul":
        return args[0] * args[1]
    if op == "inv":
        return args[0].inverse()
    if op == "xi":
        return args[0].xi()
    if op == "act":
        return args[0].act(args[1])
    raise ValueError(f"unknown operation {op!r}")


# enumeration ------------------------------------------------------------------
#
# Groups are materialised as int64 arrays of shape (N, n, n), sorted
# lexicographically on the row-major entries.

def matrix_codes(arr: np.ndarray, p: int) -> np.ndarray:
    """Base-p integer code of each matrix (row-major, first entry most significant)."""
    flat = arr.reshape(arr.shape[0], -1).astype(np.int64)
    weights = p ** np.arange(flat.shape[1] - 1, -1, -1, dtype=np.int64)
    return flat @ weights


def _check_budget(what, cardinality, budget):
    if budget is not None and cardinality > budget:
        raise BudgetExceeded(what, cardinality, budget)


def batched_det(a: np.ndarray) -> np.ndarray:
    """Exact integer determinants by cofactor expansion (small n)."""
    n = a.shape[-1]
    if n == 0:
        return np.ones(a.shape[0], dtype=np.int64)
    if n == 1:
        return a[:, 0, 0].astype(np.int64)
    total = np.zeros(a.shape[0], dtype=np.int64)
    rest = a[:, 1:, :]
    for j in range(n):
        minor = np.delete(rest, j, axis=2)
        term = a[:, 0, j].astype(np.int64) * batched_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def sp_order(two_k: int, q: int) -> int:
    k = two_k // 2
    out = q ** (k * k)
    for i in range(1, k + 1):
        out *= q ** (2 * i) - 1
    return out


def u_order(r: int, q: int) -> int:
    return q ** (r * (r - 1) // 2)


def h_order(shape: ModelShape, q: int) -> int:
    return u_order(shape.r, q) * q ** (shape.r * 2 * shape.k) * sp_order(2 * shape.k, q)


def gl_array(n: int, p: int, budget=DEFAULT_BUDGET) -> np.ndarray:
    _check_budget(f"GL_{n}(F_{p}) candidates", p ** (n * n), budget)
    if n == 0:
        return np.zeros((1, 0, 0), dtype=np.int64)
    grid = np.array(list(itertools.product(range(p), repeat=n * n)), dtype=np.int64)
    mats = grid.reshape(-1, n, n)
    keep = batched_det(mats) % p != 0
    return mats[keep]


def u_array(r: int, p: int, budget=DEFAULT_BUDGET) -> np.ndarray:
    _check_budget(f"U_{r}(F_{p})", u_order(r, p), budget)
    slots = [(i, j) for i in range(r) for j in range(i + 1, r)]
    out = np.zeros((p ** len(slots), r, r), dtype=np.int64)
    out[:, range(r), range(r)] = 1
    for idx, vals in enumerate(itertools.product(range(p), repeat=len(slots))):
        for (i, j), v in zip(slots, vals):
            out[idx, i, j] = v
    return out


def _transvection_generators(two_k: int, p: int) -> list:
    """Symplectic transvections I + c u t(u) J for u = e_i and e_i + e_j."""
    if two_k == 0:
        return []
    j = np.array(J(two_k, p).rows, dtype=np.int64)
    vecs = []
    for i in range(two_k):
        v = np.zeros(two_k, dtype=np.int64)
        v[i] = 1
        vecs.append(v)
    for i in range(two_k):
        for jj in range(i + 1, two_k):
            v = np.zeros(two_k, dtype=np.int64)
            v[i] = v[jj] = 1
            vecs.append(v)
    gens = []
    for v in vecs:
        for c in range(1, p):
            t = (np.eye(two_k, dtype=np.int64) + c * np.outer(v, v) @ j) % p
            gens.append(t)
    return gens


_SP_CACHE: dict = {}


def sp_array(two_k: int, p: int, budget=DEFAULT_BUDGET) -> np.ndarray:
    """Sp(J_{2k})(F_p) by breadth-first closure under transvections."""
    order = sp_order(two_k, p)
    _check_budget(f"Sp_{two_k}(F_{p})", order, budget)
    key = (two_k, p)
    if key in _SP_CACHE:
        return _SP_CACHE[key]
    if two_k == 0:
        out = np.zeros((1, 0, 0), dtype=np.int64)
        _SP_CACHE[key] = out
        return out
    gens = np.array(_transvection_generators(two_k, p))
    ident = np.eye(two_k, dtype=np.int64)[None]
    seen = {int(matrix_codes(ident, p)[0])}
    found = [ident]
    frontier = ident
    while len(frontier):
        new = np.einsum("gij,bjk->gbik", gens, frontier).reshape(-1, two_k, two_k) % p
        codes = matrix_codes(new, p)
        codes, first = np.unique(codes, return_index=True)
        mask = np.array([int(c) not in seen for c in codes], dtype=bool)
        fresh = new[first[mask]]
        seen.update(int(c) for c in codes[mask])
        if len(fresh):
            found.append(fresh)
        frontier = fresh
    allm = np.concatenate(found)
    if len(allm) != order:
        raise MembershipError(f"transvection closure gave {len(allm)} elements, expected {order}")
    allm = allm[np.argsort(matrix_codes(allm, p), kind="stable")]
    _SP_CACHE[key] = allm
    return allm


def h_array(shape: ModelShape, p: int, budget=DEFAULT_BUDGET) -> np.ndarray:
    """H_{r,2k}(F_p) as the product set U_r x M_{r x 2k} x Sp_{2k}, sorted."""
    n, r, k = shape.n, shape.r, shape.k
    _check_budget(f"H_{{{r},{2 * k}}}(F_{p})", h_order(shape, p), budget)
    us = u_array(r, p)
    sps = sp_array(2 * k, p)
    nx = r * 2 * k
    xs = np.array(list(itertools.product(range(p), repeat=nx)), dtype=np.int64).reshape(p**nx, r, 2 * k)
    total = len(us) * len(xs) * len(sps)
    out = np.zeros((total, n, n), dtype=np.int64)
    iu, ix, isp = np.meshgrid(np.arange(len(us)), np.arange(len(xs)), np.arange(len(sps)), indexing="ij")
    iu, ix, isp = iu.ravel(), ix.ravel(), isp.ravel()
    out[:, :r, :r] = us[iu]
    out[:, :r, r:] = xs[ix]
    out[:, r:, r:] = sps[isp]
    return out[np.argsort(matrix_codes(out, p), kind="stable")]


def enumerate_group(kind: str, p: int, size, budget=DEFAULT_BUDGET):
    """Deterministic stream of Matrix objects.

    ``kind`` is one of GL_n, Sp_J_2k, U_r (``size`` an integer) or H_shape
    (``size`` a ModelShape).
    """
    if kind == "GL_n":
        arr = gl_array(size, p, budget)
    elif kind == "Sp_J_2k":
        arr = sp_array(size, p, budget)
    elif kind == "U_r":
        arr = u_array(size, p, budget)
    elif kind == "H_shape":
        arr = h_array(size, p, budget)
    else:
        raise ValueError(f"unknown group kind {kind!r}")
    for m in arr:
        yield Matrix(m.tolist(), p, m.shape[1])
