"""Dense exact matrices over F_p, the named constant matrices, and the two
constructive reductions of alternating forms.

Matrices are immutable.  Entries are stored as reduced integer residues; use
:meth:`Matrix.entry` to get them as :class:`FieldElement` values.  Index
arguments of the named matrices (``E``, ``u_elem``) are 1-based like the
usual matrix notation; everything else is 0-based Python indexing.
"""

from __future__ import annotations

from operator import mul
from typing import Iterable, Sequence

from .errors import DimensionError, PreconditionError, SingularMatrixError
from .exactfield import FieldElement, make_field


class Matrix:
    __slots__ = ("p", "nrows", "ncols", "rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]], p: int, ncols: int | None = None):
        p = int(p)
        data = tuple(tuple(int(x) % p for x in row) for row in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for row in data:
            if len(row) != ncols:
                raise DimensionError("ragged rows")
        self.p = p
        self.nrows = len(data)
        self.ncols = ncols
        self.rows = data
        self._hash = None

    @classmethod
    def _raw(cls, rows, p, ncols):
        # rows must already be tuples of reduced residues
        m = object.__new__(cls)
        m.p = p
        m.nrows = len(rows)
        m.ncols = ncols
        m.rows = rows
        m._hash = None
        return m

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int, p: int) -> "Matrix":
        return cls._raw(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), p, n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, p: int) -> "Matrix":
        return cls._raw(tuple((0,) * ncols for _ in range(nrows)), p, ncols)

    @classmethod
    def diag(cls, entries: Sequence[int], p: int) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], p)

    @classmethod
    def column(cls, entries: Sequence[int], p: int) -> "Matrix":
        return cls([[x] for x in entries], p, 1)

    # basic protocol -----------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def is_square(self):
        return self.nrows == self.ncols

    @property
    def field(self):
        return make_field(self.p)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.rows[i][j], self.field)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.p == other.p and self.ncols == other.ncols
                and self.rows == other.rows)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.ncols, self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix([{body}], p={self.p})"

    def tolist(self):
        return [list(r) for r in self.rows]

    def flat(self):
        return tuple(x for r in self.rows for x in r)

    # arithmetic ---------------------------------------------------------

    def _same(self, other):
        if other.p != self.p:
            raise DimensionError(f"mixed fields F_{self.p} and F_{other.p}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        p = self.p
        cols = tuple(zip(*other.rows)) if other.nrows else ((),) * other.ncols
        rows = tuple(
            tuple(sum(map(mul, row, col)) % p for col in cols)
            for row in self.rows
        )
        return Matrix._raw(rows, p, other.ncols)

    def __add__(self, other):
        self._same(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        p = self.p
        return Matrix._raw(
            tuple(tuple((a + b) % p for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            p, self.ncols)

    def __sub__(self, other):
        self._same(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        p = self.p
        return Matrix._raw(
            tuple(tuple((a - b) % p for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            p, self.ncols)

    def __neg__(self):
        p = self.p
        return Matrix._raw(tuple(tuple((-a) % p for a in r) for r in self.rows), p, self.ncols)

    def scale(self, c: int) -> "Matrix":
        p = self.p
        c %= p
        return Matrix._raw(tuple(tuple((a * c) % p for a in r) for r in self.rows), p, self.ncols)

    @property
    def T(self) -> "Matrix":
        if self.nrows == 0:
            return Matrix._raw(tuple(() for _ in range(self.ncols)), self.p, 0)
        return Matrix._raw(tuple(zip(*self.rows)), self.p, self.nrows)

    def transpose(self):
        return self.T

    def is_zero(self) -> bool:
        return all(not any(r) for r in self.rows)

    def is_identity(self) -> bool:
        return self.is_square and all(
            x == (1 if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r)
        )

    def sub(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        """Rows r0:r1, columns c0:c1."""
        return Matrix._raw(tuple(r[c0:c1] for r in self.rows[r0:r1]), self.p, c1 - c0)

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def with_entry(self, i: int, j: int, value: int) -> "Matrix":
        rows = [list(r) for r in self.rows]
        rows[i][j] = value
        return Matrix(rows, self.p, self.ncols)

    # elimination --------------------------------------------------------

    def _echelon(self):
        """Reduced row echelon form and pivot columns."""
        p = self.p
        a = [list(r) for r in self.rows]
        pivots = []
        row = 0
        for c in range(self.ncols):
            piv = next((i for i in range(row, self.nrows) if a[i][c]), None)
            if piv is None:
                continue
            a[row], a[piv] = a[piv], a[row]
            inv = pow(a[row][c], -1, p)
            a[row] = [(x * inv) % p for x in a[row]]
            for i in range(self.nrows):
                if i != row and a[i][c]:
                    f = a[i][c]
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], a[row])]
            pivots.append(c)
            row += 1
            if row == self.nrows:
                break
        return a, pivots

    def rank(self) -> int:
        return len(self._echelon()[1])

    def det(self) -> int:
        if not self.is_square:
            raise DimensionError("determinant of a non-square matrix")
        p = self.p
        a = [list(r) for r in self.rows]
        n = self.nrows
        d = 1
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c]), None)
            if piv is None:
                return 0
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                d = -d
            d = d * a[c][c] % p
            inv = pow(a[c][c], -1, p)
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] * inv % p
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
        return d % p

    def inv(self) -> "Matrix":
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n, p = self.nrows, self.p
        a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c]), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            inv = pow(a[c][c], -1, p)
            if inv != 1:
                a[c] = [(x * inv) % p for x in a[c]]
            rc = a[c]
            for i in range(n):
                if i != c and a[i][c]:
                    f = a[i][c]
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], rc)]
        return Matrix._raw(tuple(tuple(r[n:]) for r in a), p, n)

    def is_invertible(self) -> bool:
        return self.is_square and self.rank() == self.nrows


# block helpers -------------------------------------------------------------

def block_compose(grid: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a matrix from a grid of blocks; size-0 blocks are legal."""
    if not grid or not grid[0]:
        raise DimensionError("empty block grid")
    p = grid[0][0].p
    heights = [row[0].nrows for row in grid]
    widths = [m.ncols for m in grid[0]]
    for bi, row in enumerate(grid):
        if len(row) != len(widths):
            raise DimensionError("ragged block grid")
        for bj, m in enumerate(row):
            if m.p != p:
                raise DimensionError("mixed fields in block grid")
            if m.nrows != heights[bi] or m.ncols != widths[bj]:
                raise DimensionError(
                    f"block ({bi},{bj}) has shape {m.shape}, expected {(heights[bi], widths[bj])}"
                )
    rows = []
    for bi, row in enumerate(grid):
        for i in range(heights[bi]):
            rows.append(tuple(x for m in row for x in m.rows[i]))
    return Matrix._raw(tuple(rows), p, sum(widths))


def block_diag(*blocks: Matrix) -> Matrix:
    p = blocks[0].p
    n = sum(b.ncols for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        left = (0,) * offset
        right = (0,) * (n - offset - b.ncols)
        for r in b.rows:
            rows.append(left + r + right)
        offset += b.ncols
    return Matrix._raw(tuple(rows), p, n)


def split_blocks(m: Matrix, row_sizes: Sequence[int], col_sizes: Sequence[int]):
    """Inverse of :func:`block_compose`."""
    if sum(row_sizes) != m.nrows or sum(col_sizes) != m.ncols:
        raise DimensionError(f"block sizes do not fit {m.shape}")
    out = []
    r0 = 0
    for h in row_sizes:
        c0 = 0
        line = []
        for w in col_sizes:
            line.append(m.sub(r0, r0 + h, c0, c0 + w))
            c0 += w
        out.append(line)
        r0 += h
    return out


def hstack(*ms: Matrix) -> Matrix:
    return block_compose([list(ms)])


def vstack(*ms: Matrix) -> Matrix:
    return block_compose([[m] for m in ms])


def mat_ops(op: str, *args):
    """Single dispatch point over the matrix operations."""
    if op == "mul":
        a, b = args
        return a @ b
    if op == "inv":
        return args[0].inv()
    if op == "transpose":
        return args[0].T
    if op == "rank":
        return args[0].rank()
    if op == "det":
        return args[0].det()
    if op == "block_compose":
        return block_compose(args[0])
    if op == "submatrix":
        m, r0, r1, c0, c1 = args
        return m.sub(r0, r1, c0, c1)
    raise ValueError(f"unknown matrix operation {op!r}")


# linear systems --------------------------------------------------------------

def nullspace(m: Matrix) -> Matrix:
    """Columns form a basis of {x : m x = 0}; shape (ncols, dim)."""
    a, pivots = m._echelon()
    p = m.p
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * m.ncols
        v[f] = 1
        for row, pc in enumerate(pivots):
            v[pc] = (-a[row][f]) % p
        basis.append(v)
    if not basis:
        return Matrix.zeros(m.ncols, 0, p)
    return Matrix(basis, p).T


def solve(m: Matrix, b: Matrix) -> Matrix:
    """One solution x of m x = b (columns of b solved independently)."""
    if b.nrows != m.nrows:
        raise DimensionError("right-hand side has the wrong number of rows")
    p = m.p
    aug = hstack(m, b)
    a, pivots = aug._echelon()
    n = m.ncols
    if any(pc >= n for pc in pivots):
        raise SingularMatrixError("inconsistent linear system")
    x = [[0] * b.ncols for _ in range(n)]
    for row, pc in enumerate(pivots):
        for j in range(b.ncols):
            x[pc][j] = a[row][n + j] % p
    return Matrix(x, p, b.ncols)


# named matrices ---------------------------------------------------------------

def w_mat(k: int, p: int) -> Matrix:
    """The antidiagonal w_k, entry (i, j) equal to delta_{i, k+1-j}."""
    return Matrix._raw(tuple(tuple(1 if i + j == k - 1 else 0 for j in range(k)) for i in range(k)), p, k)


def J(n: int, p: int) -> Matrix:
    """J_n = ((0, w_k), (-w_k, 0)) for n = 2k."""
    if n % 2:
        raise DimensionError(f"J_n needs even n, got {n}")
    k = n // 2
    w = w_mat(k, p)
    z = Matrix.zeros(k, k, p)
    return block_compose([[z, w], [-w, z]])


def J_prime(n: int, p: int) -> Matrix:
    if n % 2:
        raise DimensionError(f"J'_n needs even n, got {n}")
    k = n // 2
    i = Matrix.identity(k, p)
    z = Matrix.zeros(k, k, p)
    return block_compose([[z, i], [-i, z]])


def sigma(n: int, p: int) -> Matrix:
    """diag(w_k, I_k), so that J'_n = t(sigma) J_n sigma."""
    if n % 2:
        raise DimensionError(f"sigma needs even n, got {n}")
    k = n // 2
    return block_diag(w_mat(k, p), Matrix.identity(k, p))


def E(i: int, j: int, n: int, p: int) -> Matrix:
    if not (1 <= i <= n and 1 <= j <= n):
        raise DimensionError(f"E_{{{i},{j}}} out of range for size {n}")
    return Matrix([[1 if (a, b) == (i - 1, j - 1) else 0 for b in range(n)] for a in range(n)], p)


def u_elem(i: int, j: int, s: int, n: int, p: int) -> Matrix:
    """u_{i,j}(s) = I_n + s E_{i,j}."""
    if i == j:
        raise DimensionError("u_{i,j}(s) needs i != j")
    return Matrix.identity(n, p) + E(i, j, n, p).scale(s)


def perm_matrix(w: Sequence[int], p: int) -> Matrix:
    """Permutation matrix with w e_j = e_{w(j)}; ``w`` lists 1-based images."""
    n = len(w)
    if sorted(w) != list(range(1, n + 1)):
        raise DimensionError(f"{tuple(w)} is not a permutation of 1..{n}")
    rows = [[0] * n for _ in range(n)]
    for j, wj in enumerate(w):
        rows[wj - 1][j] = 1
    return Matrix(rows, p, n)


def closed_cell_perm(r: int, rp: int, n: int) -> tuple:
    """The permutation of w^{r,r'} = ((0, I_r, 0), (I_r', 0, 0), (0, 0, I))."""
    if n < r + rp:
        raise DimensionError(f"w^{{r,r'}} needs n >= r + r' (n={n}, r={r}, r'={rp})")
    images = [r + j for j in range(1, rp + 1)]
    images += [j for j in range(1, r + 1)]
    images += list(range(r + rp + 1, n + 1))
    return tuple(images)


def closed_cell_matrix(r: int, rp: int, n: int, p: int) -> Matrix:
    return perm_matrix(closed_cell_perm(r, rp, n), p)


def sigma_block(k: int, rp: int, p: int) -> Matrix:
    """((0, I_{2(k-r')}), (w_{r'}, 0)), of size 2k - r'."""
    if rp > k:
        raise DimensionError(f"sigma block needs r' <= k (r'={rp}, k={k})")
    m = 2 * (k - rp)
    return block_compose([
        [Matrix.zeros(m, rp, p), Matrix.identity(m, p)],
        [w_mat(rp, p), Matrix.zeros(rp, m, p)],
    ])


def standard_matrix(kind: str, *params, p: int) -> Matrix:
    kinds = {
        "w": w_mat,
        "J": J,
        "J_prime": J_prime,
        "sigma": sigma,
        "E": E,
        "u": u_elem,
        "closed_cell": closed_cell_matrix,
        "sigma_block": sigma_block,
    }
    if kind not in kinds:
        raise ValueError(f"unknown standard matrix {kind!r}")
    return kinds[kind](*params, p)


def tilde(x: Matrix) -> Matrix:
    """x~ = w x^tau w."""
    w = w_mat(x.nrows, x.p)
    return w @ x.inv().T @ w


# alternating forms ------------------------------------------------------------

def is_alternating(m: Matrix) -> bool:
    if not m.is_square:
        return False
    n = m.nrows
    p = m.p
    rows = m.rows
    for i in range(n):
        if rows[i][i]:
            return False
        for j in range(i + 1, n):
            if (rows[i][j] + rows[j][i]) % p:
                return False
    return True


def totally_isotropic(form: Matrix, ell: int) -> bool:
    """True iff the form vanishes on span(e_1, ..., e_ell)."""
    if not 0 <= ell <= form.nrows:
        raise DimensionError(f"isotropy dimension {ell} out of range")
    return all(not any(row[:ell]) for row in form.rows[:ell])


def strict_upper(m: Matrix) -> Matrix:
    return Matrix._raw(
        tuple(tuple(x if j > i else 0 for j, x in enumerate(r)) for i, r in enumerate(m.rows)),
        m.p, m.ncols)


def _check_form(a: Matrix):
    if not a.is_square or a.nrows % 2:
        raise PreconditionError(f"alternating form must have even size, got {a.shape}")
    if not is_alternating(a):
        raise PreconditionError("form is not alternating")


def symplectic_gram_schmidt(a: Matrix) -> Matrix:
    """y with t(y) a y = J_{2m}, for a nondegenerate alternating form a.

    Pairs are chosen greedily: the first unprocessed vector, then the first
    remaining vector pairing nontrivially with it (rescaled to pairing 1).
    The i-th pair is placed in columns i and 2m+1-i.
    """
    _check_form(a)
    n, p = a.nrows, a.p
    m = n // 2
    A = a.rows

    def omega(u, v):
        return sum(u[i] * sum(A[i][j] * v[j] for j in range(n) if v[j]) for i in range(n) if u[i]) % p

    vecs = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    cols = [None] * n
    for idx in range(m):
        u = vecs.pop(0)
        partner = None
        for t, v in enumerate(vecs):
            c = omega(u, v)
            if c:
                partner = t
                break
        if partner is None:
            raise SingularMatrixError("alternating form is degenerate")
        v = vecs.pop(partner)
        inv = pow(c, -1, p)
        v = [(x * inv) % p for x in v]
        cols[idx] = u
        cols[n - 1 - idx] = v
        rest = []
        for x in vecs:
            xv = omega(x, v)
            xu = omega(x, u)
            # x - <x,v> u + <x,u> v is orthogonal to both u and v
            rest.append([(xi - xv * ui + xu * vi) % p for xi, ui, vi in zip(x, u, v)])
        vecs = rest
    return Matrix(cols, p).T if n else Matrix.zeros(0, 0, p)


def skew_parabolic_reduce(x: Matrix, ell: int) -> Matrix:
    """q in the parabolic P_(ell, 2m-ell) with t(q) x q = J_{2m}.

    ``x`` is nondegenerate alternating with zero top-left ell x ell block.
    """
    _check_form(x)
    n, p = x.nrows, x.p
    m = n // 2
    if not 0 <= ell <= m:
        raise PreconditionError(f"need 0 <= ell <= m, got ell={ell}, m={m}")
    for i in range(ell):
        for j in range(ell):
            if x[i, j]:
                raise PreconditionError(
                    f"form is not totally isotropic on e_1..e_{ell}: entry ({i + 1},{j + 1}) is {x[i, j]}"
                )
    rest = n - ell
    w = w_mat(ell, p)
    # step 1: gamma with A gamma = (0, w_ell); columns = ker A, then a preimage of w_ell
    A = x.sub(0, ell, ell, n)
    if A.rank() != ell:
        raise SingularMatrixError("form is degenerate")
    kernel = nullspace(A)
    pre = solve(A, w)
    gamma = hstack(kernel, pre)
    q1 = block_diag(Matrix.identity(ell, p), gamma)
    x1 = q1.T @ x @ q1
    mid = rest - ell
    blocks = split_blocks(x1, [ell, mid, ell], [ell, mid, ell])
    a_mid, b, d = blocks[1][1], blocks[1][2], blocks[2][2]
    # step 2: clear b and the residual alternating d
    beta1 = -(w @ b.T)
    beta2 = w @ strict_upper(d)
    q2 = block_compose([
        [Matrix.identity(ell, p), beta1, beta2],
        [Matrix.zeros(mid, ell, p), Matrix.identity(mid, p), Matrix.zeros(mid, ell, p)],
        [Matrix.zeros(ell, ell, p), Matrix.zeros(ell, mid, p), Matrix.identity(ell, p)],
    ])
    # step 3: normalise the middle block
    y = symplectic_gram_schmidt(a_mid) if mid else Matrix.zeros(0, 0, p)
    q3 = block_diag(Matrix.identity(ell, p), y, Matrix.identity(ell, p))
    return q1 @ q2 @ q3


def in_parabolic(q: Matrix, ell: int) -> bool:
    """Upper block triangular of type (ell, n - ell), invertible."""
    n = q.nrows
    return all(not any(q.rows[i][:ell]) for i in range(ell, n)) and q.is_invertible()


# text format ------------------------------------------------------------------

def to_text(m: Matrix) -> str:
    if m.is_square:
        head = f"n={m.nrows} p={m.p}"
    else:
        head = f"n={m.nrows}x{m.ncols} p={m.p}"
    lines = [head] + [" ".join(str(x) for x in row) for row in m.rows]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Matrix:
    """Parse the ``n=<size> p=<prime>`` text format."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix text")
    head = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    if "n" not in head or "p" not in head:
        raise ValueError(f"bad matrix header {lines[0]!r}")
    size = head["n"]
    if "x" in size:
        nr, nc = (int(s) for s in size.split("x"))
    else:
        nr = nc = int(size)
    p = int(head["p"])
    body = lines[1:]
    if len(body) != nr:
        raise ValueError(f"expected {nr} rows, got {len(body)}")
    rows = []
    for ln in body:
        entries = [int(tok) for tok in ln.split()]
        if len(entries) != nc:
            raise ValueError(f"row {ln!r} has {len(entries)} entries, expected {nc}")
        if any(not 0 <= e < p for e in entries):
            raise ValueError(f"row {ln!r} has entries outside [0, {p - 1}]")
        rows.append(entries)
    make_field(p)
    return Matrix(rows, p, nc)
