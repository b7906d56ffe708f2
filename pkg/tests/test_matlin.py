import itertools

import pytest

from klyachko.errors import DimensionError, PreconditionError, SingularMatrixError
from klyachko.matlin import (
    J,
    J_prime,
    Matrix,
    block_compose,
    block_diag,
    closed_cell_matrix,
    in_parabolic,
    is_alternating,
    mat_ops,
    nullspace,
    parse_matrix,
    perm_matrix,
    sigma,
    skew_parabolic_reduce,
    solve,
    split_blocks,
    standard_matrix,
    strict_upper,
    symplectic_gram_schmidt,
    tilde,
    to_text,
    totally_isotropic,
    u_elem,
    w_mat,
)

from conftest import random_alternating, random_invertible


def test_mat_ops_examples():
    a = Matrix([[1, 2], [3, 4]], 5)
    assert mat_ops("det", a) == 3
    assert mat_ops("inv", a) == Matrix([[3, 1], [4, 2]], 5)
    assert mat_ops("inv", a) @ a == Matrix.identity(2, 5)
    with pytest.raises(SingularMatrixError):
        mat_ops("inv", Matrix([[1, 1], [1, 1]], 2))
    assert Matrix([[1, 1], [1, 1]], 2).rank() == 1


def test_det_against_leibniz(rnd):
    # independent determinant via the permutation expansion
    for p in (2, 3, 7):
        for n in (1, 2, 3, 4):
            m = Matrix([[rnd.randrange(p) for _ in range(n)] for _ in range(n)], p)
            total = 0
            for perm in itertools.permutations(range(n)):
                sign = 1
                for i in range(n):
                    for j in range(i + 1, n):
                        if perm[i] > perm[j]:
                            sign = -sign
                term = sign
                for i in range(n):
                    term *= m.rows[i][perm[i]]
                total += term
            assert m.det() == total % p


def test_inverse_and_rank(rnd):
    for p in (2, 3, 101):
        for n in range(1, 6):
            g = random_invertible(rnd, n, p)
            assert g @ g.inv() == Matrix.identity(n, p)
            assert g.rank() == n


def test_dimension_errors():
    with pytest.raises(DimensionError):
        Matrix([[1, 2]], 3) @ Matrix([[1, 2]], 3)
    with pytest.raises(DimensionError):
        Matrix([[1, 2], [1]], 3)


def test_nullspace_and_solve(rnd):
    p = 5
    a = Matrix([[rnd.randrange(p) for _ in range(5)] for _ in range(3)], p)
    k = nullspace(a)
    assert k.ncols == 5 - a.rank()
    assert (a @ k).is_zero()
    x0 = Matrix([[rnd.randrange(p)] for _ in range(5)], p)
    x = solve(a, a @ x0)
    assert a @ x == a @ x0


def test_standard_matrices():
    p = 5
    assert J(2, p) == Matrix([[0, 1], [-1, 0]], p)
    assert J(4, p) == Matrix([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]], p)
    assert w_mat(3, p) == Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]], p)
    assert is_alternating(J(6, p)) and is_alternating(J_prime(6, p))
    s = sigma(4, p)
    assert s.T @ J(4, p) @ s == J_prime(4, p)
    assert u_elem(1, 2, 3, 2, p) == Matrix([[1, 3], [0, 1]], p)
    assert perm_matrix((2, 3, 1), p) @ Matrix.column([1, 0, 0], p) == Matrix.column([0, 1, 0], p)
    assert standard_matrix("J", 4, p=p) == J(4, p)
    x = Matrix([[1, 2], [0, 3]], p)
    assert tilde(x) == w_mat(2, p) @ x.inv().T @ w_mat(2, p)


def test_closed_cell_matrix():
    # w^{r,r'} sends e_{r'+i} to e_i and e_i to e_{r+i}
    w = closed_cell_matrix(1, 1, 3, 2)
    assert w == Matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]], 2)
    w = closed_cell_matrix(2, 0, 4, 3)
    assert w.is_identity()


def test_blocks_roundtrip(rnd):
    p = 7
    m = Matrix([[rnd.randrange(p) for _ in range(5)] for _ in range(5)], p)
    grid = split_blocks(m, [2, 3], [1, 4])
    assert block_compose(grid) == m
    assert block_diag(Matrix.identity(2, p), Matrix.identity(1, p)).is_identity()


def test_totally_isotropic_example():
    assert not totally_isotropic(J(4, 3), 3)
    assert totally_isotropic(J(4, 3), 2)
    assert totally_isotropic(J(4, 3), 0)


def test_gram_schmidt_example():
    a = Matrix([[0, 2], [-2, 0]], 5)
    y = symplectic_gram_schmidt(a)
    assert y.T @ a @ y == J(2, 5)
    assert y == Matrix.diag([1, 3], 5)
    # the tabulated answer diag(3, 1) is also admissible
    alt = Matrix.diag([3, 1], 5)
    assert alt.T @ a @ alt == J(2, 5)


def test_gram_schmidt_on_J_prime():
    a = J_prime(4, 7)
    y = symplectic_gram_schmidt(a)
    assert y.T @ a @ y == J(4, 7)
    s = sigma(4, 7)
    assert s.inv().T @ a @ s.inv() == J(4, 7)


def test_gram_schmidt_degenerate():
    with pytest.raises(SingularMatrixError):
        symplectic_gram_schmidt(Matrix.zeros(2, 2, 5))
    with pytest.raises(PreconditionError):
        symplectic_gram_schmidt(Matrix([[1, 0], [0, 0]], 5))


def test_skew_parabolic_examples():
    q = skew_parabolic_reduce(J(4, 5), 2)
    assert in_parabolic(q, 2) and q.T @ J(4, 5) @ q == J(4, 5)
    x = Matrix([[0, 2], [-2, 0]], 5)
    q = skew_parabolic_reduce(x, 1)
    assert q.T @ x @ q == J(2, 5) and in_parabolic(q, 1)
    bad = Matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], 5)
    with pytest.raises(PreconditionError, match=r"\(1,2\)"):
        skew_parabolic_reduce(bad, 2)


def test_skew_parabolic_random(rnd):
    for p in (2, 3, 5):
        for m in (1, 2, 3):
            for _ in range(20):
                ell = rnd.randrange(m + 1)
                while True:
                    x = random_alternating(rnd, 2 * m, p)
                    if totally_isotropic(x, ell):
                        break
                q = skew_parabolic_reduce(x, ell)
                assert in_parabolic(q, ell)
                assert q.T @ x @ q == J(2 * m, p)


def test_strict_upper():
    m = Matrix([[1, 2], [3, 4]], 5)
    assert strict_upper(m) == Matrix([[0, 2], [0, 0]], 5)


def test_text_roundtrip(rnd):
    g = random_invertible(rnd, 3, 7)
    text = to_text(g)
    assert text.startswith("n=3 p=7\n")
    assert parse_matrix(text) == g
    with pytest.raises(ValueError):
        parse_matrix("n=2 p=3\n1 0\n")
