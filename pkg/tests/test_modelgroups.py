import itertools

import pytest

from klyachko.errors import MembershipError, ShapeError
from klyachko.matlin import J, Matrix, u_elem
from klyachko.modelgroups import (
    ModelShape,
    PairShape,
    TildeHElement,
    compose_H,
    decompose_H,
    enumerate_group,
    gl_order,
    h_array,
    h_order,
    in_H,
    in_Hbar,
    in_Sp,
    in_U,
    legal_pairs,
    membership,
    psi_model,
    psi_r,
    sp_array,
    sp_order,
    theta_tilde,
    tildeH_algebra,
)

from conftest import random_invertible


def brute_force(n, p, pred):
    count = 0
    for flat in itertools.product(range(p), repeat=n * n):
        m = Matrix([flat[i * n:(i + 1) * n] for i in range(n)], p)
        if pred(m):
            count += 1
    return count


def test_group_orders_brute_force():
    assert brute_force(2, 2, lambda m: m.is_invertible()) == 6 == gl_order(2, 2)
    assert brute_force(2, 3, lambda m: in_Sp(m)) == 24 == sp_order(2, 3)
    assert sum(1 for _ in enumerate_group("GL_n", 2, 2)) == 6
    assert sum(1 for _ in enumerate_group("Sp_J_2k", 3, 2)) == 24
    assert sum(1 for _ in enumerate_group("U_r", 3, 3)) == 27
    shape = ModelShape(3, 1)
    assert h_order(shape, 3) == 216
    assert sum(1 for _ in enumerate_group("H_shape", 3, shape)) == 216


def test_enumeration_members_and_order():
    shape = ModelShape(3, 1)
    arr = h_array(shape, 3)
    codes = [tuple(m.ravel()) for m in arr]
    assert codes == sorted(codes)
    assert len(set(codes)) == len(codes)
    for m in enumerate_group("H_shape", 3, shape):
        assert in_H(m, shape)
    sp = sp_array(4, 2)
    assert len(sp) == sp_order(4, 2) == 720
    first = Matrix(sp[0].tolist(), 2)
    assert in_Sp(first, J(4, 2))


def test_shapes():
    with pytest.raises(ShapeError):
        ModelShape(3, 0)
    with pytest.raises(ShapeError):
        PairShape(4, 1, 2)
    s = PairShape(5, 3, 1)
    assert (s.k, s.kp) == (1, 2)
    assert s.swapped() == PairShape(5, 1, 3)
    assert legal_pairs(4) == [(4, 4), (4, 2), (4, 0), (2, 4), (2, 2), (2, 0), (0, 4), (0, 2), (0, 0)]


def test_membership_examples():
    p = 3
    assert membership("U_r", u_elem(1, 2, 1, 2, p))
    assert not membership("U_r", Matrix([[1, 0], [1, 1]], p))
    assert membership("Ubar_r", Matrix([[1, 0], [1, 1]], p))
    assert membership("Sp", J(2, p))
    h = compose_H(Matrix.identity(1, p), Matrix([[1, 2]], p), J(2, p))
    assert membership("H", h, ModelShape(3, 1))
    assert membership("Hbar", h.T, ModelShape(3, 1))
    assert not in_Hbar(h, ModelShape(3, 1))
    bad = compose_H(Matrix.identity(1, p), Matrix([[1, 2]], p), Matrix.diag([1, 2], p))
    assert not in_H(bad, ModelShape(3, 1))


def test_characters():
    p = 5
    u = Matrix([[1, 2, 4], [0, 1, 3], [0, 0, 1]], p)
    assert psi_r(u).exponent == 0
    assert not psi_r(u_elem(1, 2, 1, 3, p)).is_trivial
    with pytest.raises(MembershipError):
        psi_r(Matrix([[1, 0], [1, 1]], p))
    h = compose_H(u_elem(1, 2, 2, 2, p), Matrix([[1, 2], [3, 4]], p), J(2, p))
    assert psi_model(h, ModelShape(4, 2)).exponent == 2
    got = decompose_H(h, ModelShape(4, 2))
    assert compose_H(*got) == h


def _random_h(rnd, shape, p):
    arr = h_array(shape, p)
    return Matrix(arr[rnd.randrange(len(arr))].tolist(), p)


def test_tilde_group_laws(rnd):
    p = 3
    for shape in (PairShape(3, 1, 1), PairShape(3, 3, 1), PairShape(4, 2, 2)):
        epss = (1, -1) if shape.r == shape.rp else (1,)
        for _ in range(20):
            a = TildeHElement(_random_h(rnd, shape.left, p), _random_h(rnd, shape.right, p),
                              rnd.choice(epss), shape).validate()
            b = TildeHElement(_random_h(rnd, shape.left, p), _random_h(rnd, shape.right, p),
                              rnd.choice(epss), shape).validate()
            g = random_invertible(rnd, shape.n, p)
            assert (a * b).act(g) == a.act(b.act(g))
            assert (a * a.inverse()).act(g) == g
            assert theta_tilde(a * b) == theta_tilde(a) * theta_tilde(b)
            assert tildeH_algebra("mul", a, b) == a * b
            x = tildeH_algebra("xi", a)
            assert x.shape == shape.swapped()
            # xi intertwines the action with transposition
            assert x.act(g.T) == a.act(g).T


def test_eps_minus_requires_equal_r():
    p = 3
    one = Matrix.identity(3, p)
    with pytest.raises(ShapeError):
        TildeHElement(one, one, -1, PairShape(3, 3, 1))


def test_in_U_random(rnd):
    for _ in range(50):
        n = rnd.randrange(1, 5)
        m = Matrix([[1 if i == j else (rnd.randrange(3) if j > i else 0) for j in range(n)] for i in range(n)], 3)
        assert in_U(m)
