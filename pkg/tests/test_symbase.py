import itertools

from klyachko.matlin import J, J_prime, Matrix, block_diag
from klyachko.modelgroups import in_Sp, sp_array
from klyachko.symbase import adapted_basis, exhaustive_solution, pencil_solution, solve_symplectic_base

from conftest import random_invertible


def is_solution(g, y):
    n = g.nrows
    return in_Sp(y, J(n, g.p)) and in_Sp(g.inv() @ y @ g.T, J(n, g.p))


def test_identity_is_tier_one():
    y, tier = solve_symplectic_base(Matrix.identity(4, 5))
    assert tier == 1 and y.is_identity()


def test_symplectic_input_is_tier_one(rnd):
    arr = sp_array(4, 3)
    for _ in range(20):
        g = Matrix(arr[rnd.randrange(len(arr))].tolist(), 3)
        assert solve_symplectic_base(g)[1] == 1


def test_all_of_gl2_f3():
    for flat in itertools.product(range(3), repeat=4):
        g = Matrix([flat[:2], flat[2:]], 3)
        if g.is_invertible():
            y, tier = solve_symplectic_base(g)
            assert tier <= 3 and is_solution(g, y)


def test_pencil_random(rnd):
    for p in (2, 3, 5, 101):
        for n in (2, 4, 6, 8):
            for _ in range(5):
                g = random_invertible(rnd, n, p)
                assert is_solution(g, pencil_solution(g))


def test_exhaustive_small(rnd):
    g = random_invertible(rnd, 4, 2)
    assert is_solution(g, exhaustive_solution(g))


def test_adapted_basis_self_adjoint(rnd):
    # T = J^{-1} A with A alternating is self-adjoint for the form J
    p = 5
    for _ in range(10):
        g = random_invertible(rnd, 4, p)
        a = g.T @ J(4, p) @ g
        T = J(4, p).inv() @ a
        S, B = adapted_basis(T)
        assert S.T @ J(4, p) @ S == J_prime(4, p)
        assert S.inv() @ T @ S == block_diag(B, B.T)
