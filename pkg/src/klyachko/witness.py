"""Constructive witnesses for the stabilizer-character statement.

``find_witness(g, shape)`` returns a certificate (see :mod:`certificate`)
built by induction on n:

* r = r' = 0 is the symplectic base case;
* otherwise g is moved to a Levi representative of its cell P w Pbar';
  a nonempty I_w either splits off a monomial Whittaker block or gives an
  elementary unipotent witness directly;
* the closed cell w = w^{r,r'} is handled by a Klyachko transvection when
  one of the two attached alternating forms is not totally isotropic, and
  otherwise by reduction to a problem of size n - r - r'.

Every certificate is checked by the independent verifier before it is
returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bruhat import ActionHistory, I_w_set, bruhat_cell, invert_perm, levi_parts, strip_to_levi
from .certificate import WitnessCertificate, verify_certificate
from .errors import DimensionError, PreconditionError, SingularMatrixError, TheoryViolation
from .exactfield import CharacterValue
from .matlin import (
    J,
    Matrix,
    block_compose,
    block_diag,
    closed_cell_perm,
    is_alternating,
    perm_matrix,
    skew_parabolic_reduce,
    strict_upper,
    totally_isotropic,
    u_elem,
    w_mat,
)
from .modelgroups import PairShape, TildeHElement, in_H
from .symbase import solve_symplectic_base


def _eye(n, p):
    return Matrix.identity(n, p)


def _zeros(a, b, p):
    return Matrix.zeros(a, b, p)


# transport ------------------------------------------------------------------------

def stabilizer_element(g: Matrix, shape: PairShape, cert: WitnessCertificate) -> TildeHElement:
    """The element (y, z^tau, eps) of the twisted stabilizer of g."""
    z = g.inv() @ cert.y @ (g if cert.eps == 1 else g.T)
    return TildeHElement(cert.y, z.inv().T, cert.eps, shape)


def transport(cert: WitnessCertificate, step: TildeHElement, g: Matrix,
              check: bool = True) -> WitnessCertificate:
    """Certificate for step . g from a certificate for g (conjugate the stabilizer)."""
    shape = step.shape
    s = stabilizer_element(g, shape, cert)
    moved = step * s * step.inverse()
    out = WitnessCertificate(moved.h1, moved.eps, cert.value, cert.trace)
    if check:
        verdict = verify_certificate(step.act(g), shape, out)
        if not verdict:
            raise TheoryViolation(f"transport broke the certificate: {verdict}", out.trace)
    return out


def transport_history(cert: WitnessCertificate, hist: ActionHistory, rep: Matrix,
                      shape: PairShape) -> WitnessCertificate:
    """Certificate for hist.replay(rep) from one for rep."""
    if not hist.steps:
        return cert
    step = hist.total(shape, rep.p)
    return transport(cert, step, rep, check=False)


def transpose_transport(cert: WitnessCertificate, gt: Matrix, shape: PairShape) -> WitnessCertificate:
    """Certificate for (g, shape) from one for (t(g), swapped shape); ``gt`` is t(g)."""
    s = stabilizer_element(gt, shape.swapped(), cert)
    return WitnessCertificate(s.h2, s.eps, cert.value, cert.trace)


# Whittaker base -------------------------------------------------------------------

def _monomial_parts(m: Matrix):
    """(w1, a) with m e_j = a_j e_{w1(j)}; raises if m is not monomial."""
    n = m.nrows
    w1 = [0] * n
    a = [0] * n
    for j in range(n):
        nz = [i for i in range(n) if m[i, j]]
        if len(nz) != 1:
            raise PreconditionError("matrix is not monomial")
        w1[j] = nz[0] + 1
        a[j] = m[nz[0], j]
    if sorted(w1) != list(range(1, n + 1)):
        raise PreconditionError("matrix is not monomial")
    return tuple(w1), a


def monomial_whittaker_witness(m: Matrix) -> WitnessCertificate:
    """Certificate for (m, (i, i)) with m monomial of size i."""
    i, p = m.nrows, m.p
    w1, a = _monomial_parts(m)
    winv = invert_perm(w1)
    for q in range(1, i):
        j, jp = winv[q - 1], winv[q]
        if j <= jp:
            continue
        if j > jp + 1:
            y = u_elem(q, q + 1, 1, i, p)
            return WitnessCertificate(y, 1, CharacterValue(p, 1), (f"whittaker: descent at {q}, gap",))
        aj, ajp = a[j - 1], a[jp - 1]
        if aj != ajp:
            s = pow((1 - ajp * pow(aj, -1, p)) % p, -1, p)
            y = u_elem(q, q + 1, s, i, p)
            return WitnessCertificate(y, 1, CharacterValue(p, 1),
                                      (f"whittaker: adjacent descent at {q}, s={s}",))
    if m != m.T:
        raise TheoryViolation("monomial matrix has only blocked descents but is not symmetric")
    return WitnessCertificate(_eye(i, p), -1, CharacterValue(p, 0), ("whittaker: blocked, symmetric",))


# Klyachko transvection -------------------------------------------------------------

@dataclass(frozen=True)
class Transvection:
    h: Matrix
    u: Matrix
    X: Matrix
    s: int
    i: int


def klyachko_unipotent(form: Matrix, r: int, target: int = 1) -> Transvection:
    """h = ((u, X), (0, I)) in Sp(form) with psi_r(u) of exponent ``target``."""
    n, p = form.nrows, form.p
    if not is_alternating(form):
        raise PreconditionError("form is not alternating")
    if r > n:
        raise PreconditionError(f"r={r} exceeds the form size {n}")
    if totally_isotropic(form, r):
        raise PreconditionError(f"form is totally isotropic on e_1..e_{r}")
    A = form.rows
    i = 1
    while totally_isotropic(form, i + 1):
        i += 1
    # e_1..e_i isotropic, e_{i+1} is not orthogonal to all of them
    v0 = [0] * n
    v0[i - 1] = 1
    if not A[i - 1][i]:
        j = next(j for j in range(i - 1) if A[j][i])
        v0[j] = 1
    beta = sum(v0[a] * A[a][i] for a in range(n)) % p
    s = target * pow(beta, -1, p) % p
    lam = [sum(v0[a] * A[a][b] for a in range(n)) % p for b in range(n)]
    h = Matrix([[(1 if a == b else 0) + s * v0[a] * lam[b] for b in range(n)] for a in range(n)], p)
    return Transvection(h, h.sub(0, r, 0, r), h.sub(0, r, r, n), s, i)


# symplectic embedding --------------------------------------------------------------

def sp_embed_lift(x: Matrix, s: Matrix, y: Matrix, orientation: str = "upper") -> Matrix:
    """((x, y*, z), (0, s, y), (0, 0, x~)) in Sp(J_{2m}); "lower" is its transpose mirror.

    For the upper orientation y has shape 2(m-l) x l, for the lower one
    l x 2(m-l).
    """
    if orientation == "lower":
        return sp_embed_lift(x.T, s.T, y.T, "upper").T
    if orientation != "upper":
        raise ValueError(f"unknown orientation {orientation!r}")
    ell, p = x.nrows, x.p
    mid = s.nrows
    if y.shape != (mid, ell):
        raise DimensionError(f"y must be {mid}x{ell}, got {y.shape}")
    w = w_mat(ell, p)
    xt = w @ x.inv().T @ w
    K = J(mid, p) if mid else _zeros(0, 0, p)
    ystar = x @ w @ y.T @ K @ s
    z = x @ w @ strict_upper(y.T @ K @ y)
    return block_compose([
        [x, ystar, z],
        [_zeros(mid, ell, p), s, y],
        [_zeros(ell, ell, p), _zeros(ell, mid, p), xt],
    ])


def lift_ystar(x: Matrix, s: Matrix, y: Matrix) -> Matrix:
    ell = x.nrows
    return sp_embed_lift(x, s, y).sub(0, ell, ell, ell + s.nrows)


# closed cell ------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedCell:
    """g0 = diag(I_r, g1) w diag(I_r', g2) with w = w^{r,r'}."""

    g1: Matrix
    g2: Matrix
    shape: PairShape

    def form1(self) -> Matrix:
        return self.g1.T @ J(self.g1.nrows, self.g1.p) @ self.g1

    def form2(self) -> Matrix:
        g2i = self.g2.inv()
        return g2i.T @ J(self.g2.nrows, self.g2.p) @ g2i


def closed_cell_factors(m: Matrix, mp: Matrix, shape: PairShape) -> ClosedCell:
    """Split m w m' (closed cell) as diag(I_r, g1) w diag(I_r', g2).

    With m = diag(t, D) and m' = diag(t', D') one has
    g1 = D diag(t', I) and g2 = diag(t, I) D'.
    """
    n, r, rp, p = shape.n, shape.r, shape.rp, m.p
    tp = [mp[j, j] for j in range(rp)]
    t = [m[i, i] for i in range(r)]
    g1 = m.sub(r, n, r, n) @ Matrix.diag(tp + [1] * (n - r - rp), p)
    g2 = Matrix.diag(t + [1] * (n - rp - r), p) @ mp.sub(rp, n, rp, n)
    rebuilt = block_diag(_eye(r, p), g1) @ perm_matrix(closed_cell_perm(r, rp, n), p) @ block_diag(_eye(rp, p), g2)
    if rebuilt != m @ perm_matrix(closed_cell_perm(r, rp, n), p) @ mp:
        raise TheoryViolation("closed-cell normalisation failed")
    return ClosedCell(g1, g2, shape)


def q_witness_assemble(cell: ClosedCell, side: str, tv: Transvection) -> WitnessCertificate:
    """Certificate from a Klyachko transvection for one of the two forms."""
    shape, g1 = cell.shape, cell.g1
    n, r, rp, p = shape.n, shape.r, shape.rp, g1.p
    two_k = n - r
    if side == "right":
        # (0, X) g1^{-1}
        zx = block_compose([[_zeros(r, rp, p), tv.X]]) @ g1.inv() if r else _zeros(0, two_k, p)
        y = block_compose([[tv.u, zx], [_zeros(two_k, r, p), _eye(two_k, p)]])
        note = "closed cell: right form not isotropic"
    elif side == "left":
        hk = g1 @ tv.h.T @ g1.inv()
        y = block_diag(_eye(r, p), hk)
        note = "closed cell: left form not isotropic"
    else:
        raise ValueError(f"unknown side {side!r}")
    if not in_H(y, shape.left):
        raise TheoryViolation("assembled witness is not in the model subgroup")
    return WitnessCertificate(y, 1, CharacterValue(p, 1), (note,))


def good_representative(g0: Matrix, cell: ClosedCell):
    """(gamma, hist) with hist.replay(((0, I_r, 0), (I_r', 0, 0), (0, 0, gamma))) = g0."""
    shape, g1, g2 = cell.shape, cell.g1, cell.g2
    n, r, rp, p = shape.n, shape.r, shape.rp, g0.p
    N = n - r - rp
    two_k, two_kp = n - r, n - rp
    Jk = J(two_k, p)
    g1inv = g1.inv()
    form1_inv = g1inv @ Jk @ g1inv.T
    if not (totally_isotropic(cell.form2(), r) and totally_isotropic(form1_inv, rp)):
        raise PreconditionError("matrix is not in the totally isotropic case")
    q1 = skew_parabolic_reduce(form1_inv, rp)
    L1 = q1.T
    S1 = g1 @ L1.inv()
    R2 = skew_parabolic_reduce(cell.form2(), r)
    S2 = R2.inv() @ g2
    w = perm_matrix(closed_cell_perm(r, rp, n), p)

    def gmat(left, right):
        return block_diag(_eye(r, p), left) @ w @ block_diag(_eye(rp, p), right)

    steps = []
    # A: absorb the symplectic factors
    A = TildeHElement(block_diag(_eye(r, p), S1.inv()), block_diag(_eye(rp, p), S2.inv().T), 1, shape)
    gA = A.act(g0)
    if gA != gmat(L1, R2):
        raise TheoryViolation("good representative: symplectic absorption failed")
    steps.append(A)
    # B: clear the Levi blocks alpha_1, alpha_2
    a1 = L1.sub(0, rp, 0, rp)
    a2 = R2.sub(0, r, 0, r)

    def levi(alpha, size):
        ell = alpha.nrows
        inv = alpha.inv()
        wl = w_mat(ell, p)
        return block_diag(inv, _eye(size - 2 * ell, p), wl @ alpha.T @ wl)

    left_b = levi(a1, two_k)
    right_b = levi(a2, two_kp)
    B = TildeHElement(block_diag(_eye(r, p), left_b), block_diag(_eye(rp, p), right_b).T, 1, shape)
    gB = B.act(gA)
    steps.append(B)
    blocks = _split3(gB, (r, rp, N), (rp, r, N))
    beta2, beta1, gamma = blocks[0][2], blocks[2][0], blocks[2][2]
    gam_inv = gamma.inv()
    left_c = block_compose([
        [_eye(r, p), beta2 @ gam_inv @ beta1, -(beta2 @ gam_inv)],
        [_zeros(rp, r, p), _eye(rp, p), _zeros(rp, N, p)],
        [_zeros(N, r, p), _zeros(N, rp, p), _eye(N, p)],
    ])
    right_c = block_compose([
        [_eye(rp, p), _zeros(rp, r, p), _zeros(rp, N, p)],
        [_zeros(r, rp, p), _eye(r, p), _zeros(r, N, p)],
        [-(gam_inv @ beta1), _zeros(N, r, p), _eye(N, p)],
    ])
    C = TildeHElement(left_c, right_c.T, 1, shape)
    gC = C.act(gB)
    steps.append(C)
    if gC != shaped_matrix(gamma, shape):
        raise TheoryViolation("good representative: final shape not reached")
    for e in steps:
        if not (in_H(e.h1, shape.left) and in_H(e.h2, shape.right)):
            raise TheoryViolation("good representative: step left the pair group")
    hist = ActionHistory([e.inverse() for e in steps])
    return gamma, hist


def _split3(m, rows, cols):
    out = []
    r0 = 0
    for h in rows:
        line = []
        c0 = 0
        for wd in cols:
            line.append(m.sub(r0, r0 + h, c0, c0 + wd))
            c0 += wd
        out.append(line)
        r0 += h
    return out


def shaped_matrix(gamma: Matrix, shape: PairShape) -> Matrix:
    """((0, I_r, 0), (I_r', 0, 0), (0, 0, gamma))."""
    r, rp, p = shape.r, shape.rp, gamma.p
    N = gamma.nrows
    return block_compose([
        [_zeros(r, rp, p), _eye(r, p), _zeros(r, N, p)],
        [_eye(rp, p), _zeros(rp, r, p), _zeros(rp, N, p)],
        [_zeros(N, rp, p), _zeros(N, r, p), gamma],
    ])


def sigma_pair(shape: PairShape, p: int):
    """(sigma_1, sigma_2) of size n - r - r'."""
    r, rp = shape.r, shape.rp
    N = shape.n - r - rp
    s1 = block_compose([
        [_zeros(N - rp, rp, p), _eye(N - rp, p)],
        [w_mat(rp, p), _zeros(rp, N - rp, p)],
    ])
    s2 = block_compose([
        [_zeros(N - r, r, p), _eye(N - r, p)],
        [w_mat(r, p), _zeros(r, N - r, p)],
    ])
    return s1, s2


def reduced_problem(gamma: Matrix, shape: PairShape):
    """(x, sub_shape) for the size n - r - r' problem attached to gamma."""
    s1, s2 = sigma_pair(shape, gamma.p)
    x = s1.inv() @ gamma @ s2
    return x, PairShape(gamma.nrows, shape.rp, shape.r)


def gamma_lift(sub: WitnessCertificate, gamma: Matrix, shape: PairShape) -> WitnessCertificate:
    """Certificate for shaped_matrix(gamma) from one for the reduced problem."""
    r, rp, p = shape.r, shape.rp, gamma.p
    N = gamma.nrows
    x, sub_shape = reduced_problem(gamma, shape)
    eps = sub.eps
    ys = sub.y
    zs = x.inv() @ ys @ (x if eps == 1 else x.T)
    a = ys.sub(0, rp, 0, rp)
    b = ys.sub(0, rp, rp, N)
    d = ys.sub(rp, N, rp, N)
    abar = zs.sub(0, r, 0, r)
    bbar = zs.sub(r, N, 0, r)
    dbar = zs.sub(r, N, r, N)
    h = sp_embed_lift(a.T.inv(), d, w_mat(rp, p) @ b, "lower")
    hp = sp_embed_lift(abar.T.inv(), dbar, bbar @ w_mat(r, p), "upper")
    u = hp.sub(0, r, 0, r)
    gstar = gamma if eps == 1 else gamma.T
    zeta = hp.sub(0, r, r, hp.ncols) @ gstar.inv()
    two_k = h.nrows
    Y = block_compose([
        [u, block_compose([[_zeros(r, rp, p), zeta]])],
        [_zeros(two_k, r, p), h],
    ])
    return WitnessCertificate(Y, eps, sub.value, sub.trace)


# main entry ---------------------------------------------------------------------

def symplectic_base_witness(g: Matrix, finite: bool = True) -> WitnessCertificate:
    n, p = g.nrows, g.p
    if n % 2:
        raise DimensionError("symplectic base case needs even size")
    if n == 0:
        return WitnessCertificate(g, -1, CharacterValue(p, 0), ("symplectic: empty",))
    y, tier = solve_symplectic_base(g, finite)
    return WitnessCertificate(y, -1, CharacterValue(p, 0), (f"symplectic base: tier {tier}",))


def find_witness(g: Matrix, shape: PairShape) -> WitnessCertificate:
    """Certificate for (g, shape); verified before it is returned."""
    if g.shape != (shape.n, shape.n):
        raise DimensionError(f"expected a {shape.n}x{shape.n} matrix, got {g.shape}")
    if not g.is_invertible():
        raise SingularMatrixError("g is not invertible")
    cert = _solve(g, shape, 0)
    verdict = verify_certificate(g, shape, cert)
    if not verdict:
        raise TheoryViolation(f"constructed certificate does not verify: {verdict}", cert.trace)
    return cert


def _solve(g: Matrix, shape: PairShape, depth: int) -> WitnessCertificate:
    if depth > shape.n + 1 and shape.n:
        raise TheoryViolation("recursion did not terminate")
    n, r, rp, p = shape.n, shape.r, shape.rp, g.p
    pad = "  " * depth
    if r == 0 and rp == 0:
        return symplectic_base_witness(g).with_trace(f"{pad}n={n} (0,0)")
    cell = bruhat_cell(g, shape)
    rep, hist = strip_to_levi(cell)
    Iw = I_w_set(cell.w, shape)
    head = f"{pad}n={n} ({r},{rp}) w={''.join(map(str, cell.w)) if n < 10 else cell.w} I_w={list(Iw)}"
    if Iw:
        cert = _nonempty_cell(rep, cell.w, Iw, shape, depth)
    else:
        m, mp = levi_parts(cell)
        cert = _closed_cell(rep, closed_cell_factors(m, mp, shape), shape, depth)
    cert = transport_history(cert, hist, rep, shape)
    return cert.with_trace(head)


def _nonempty_cell(g0, w, Iw, shape, depth):
    n, r, rp, p = shape.n, shape.r, shape.rp, g0.p
    i = len(Iw)
    prefix = tuple(range(1, i + 1))
    winv = invert_perm(w)
    back = tuple(sorted(winv[a - 1] for a in Iw))
    if Iw == prefix and back == prefix:
        m1 = g0.sub(0, i, 0, i)
        if g0 != block_diag(m1, g0.sub(i, n, i, n)):
            raise TheoryViolation("prefix split: representative is not block diagonal")
        c1 = monomial_whittaker_witness(m1)
        if c1.eps == 1:
            y = block_diag(c1.y, _eye(n - i, p))
            return WitnessCertificate(y, 1, c1.value, (f"split i={i}: whittaker block",) + c1.trace)
        if i == n:
            return WitnessCertificate(c1.y, -1, c1.value, (f"split i={i}: whittaker block only",) + c1.trace)
        sub_shape = PairShape(n - i, r - i, rp - i)
        c2 = _solve(g0.sub(i, n, i, n), sub_shape, depth + 1)
        y = block_diag(_eye(i, p), c2.y)
        if c2.eps == 1:
            return WitnessCertificate(y, 1, c2.value, (f"split i={i}: lower block",) + c2.trace)
        y = block_diag(c1.y, c2.y)
        return WitnessCertificate(y, -1, c1.value * c2.value,
                                  (f"split i={i}: both blocks transpose-symmetric",) + c1.trace + c2.trace)
    if Iw == prefix:
        gt = g0.T
        sub = _elementary_witness(invert_perm(w), shape.swapped(), p)
        cert = transpose_transport(sub, gt, shape)
        return cert.with_trace("non-prefix after transpose")
    return _elementary_witness(w, shape, p)


def _elementary_witness(w, shape, p):
    Iw = set(I_w_set(w, shape))
    r = shape.r
    ell = min(set(range(1, r + 1)) - Iw)
    q = min(i for i in range(ell + 1, r + 1) if i in Iw)
    y = u_elem(q - 1, q, 1, shape.n, p)
    return WitnessCertificate(y, 1, CharacterValue(p, 1), (f"non-prefix I_w: l={ell}, q={q}",))


def _closed_cell(g0, cell, shape, depth):
    n, r, rp, p = shape.n, shape.r, shape.rp, g0.p
    form2 = cell.form2()
    if not totally_isotropic(form2, r):
        tv = klyachko_unipotent(form2, r)
        return q_witness_assemble(cell, "right", tv)
    g1inv = cell.g1.inv()
    form1_inv = g1inv @ J(n - r, p).inv() @ g1inv.T
    if not totally_isotropic(form1_inv, rp):
        tv = klyachko_unipotent(form1_inv, rp, target=-1)
        return q_witness_assemble(cell, "left", tv)
    gamma, hist = good_representative(g0, cell)
    x, sub_shape = reduced_problem(gamma, shape)
    sub = _solve(x, sub_shape, depth + 1)
    lifted = gamma_lift(sub, gamma, shape)
    cert = transport_history(lifted, hist, shaped_matrix(gamma, shape), shape)
    return cert.with_trace(f"closed cell: isotropic, reduce to size {gamma.nrows}")
