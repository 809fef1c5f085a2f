import json
from itertools import permutations

import numpy as np
import pytest

from qflag.hmat import (
    Permutation,
    QMatrix,
    SingularMatrixError,
    embed_sp2,
    expm,
    is_symplectic,
    random_sp_algebra,
    random_symplectic,
    word_to_permutation,
)
from qflag.quat import I, J, K, ONE, Quaternion

from util import random_invertible


def frob(m):
    return m.frobenius()


def test_matmul_order_matters():
    a = QMatrix.diag([I, ONE])
    b = QMatrix.from_rows([[0, J], [J, 0]])
    ab = a @ b
    ba = b @ a
    assert (ab[0, 1] - I * J).norm() == 0.0
    assert (ba[1, 0] - J * I).norm() == 0.0
    assert frob(ab - ba) > 1.0


def test_conj_transpose_involution_and_antihomomorphism():
    rng = np.random.default_rng(1)
    a, b = random_invertible(3, rng), random_invertible(3, rng)
    assert frob(a.conj_transpose().conj_transpose() - a) == 0.0
    assert frob((a @ b).conj_transpose() - b.conj_transpose() @ a.conj_transpose()) <= 1e-12


def test_inverse_examples():
    assert frob(QMatrix.identity(3).inverse() - QMatrix.identity(3)) == 0.0
    inv = QMatrix.diag([J]).inverse()
    assert (inv[0, 0] - (-J)).norm() == 0.0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_inverse_random(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        m = random_invertible(n, rng)
        assert frob(m @ m.inverse() - QMatrix.identity(n)) <= 1e-9
        assert frob(m.inverse() @ m - QMatrix.identity(n)) <= 1e-9


def test_inverse_singular_raises():
    m = QMatrix.from_rows([[1, 1], [1, 1]])
    with pytest.raises(SingularMatrixError):
        m.inverse()


def test_is_symplectic_basic():
    assert is_symplectic(QMatrix.identity(2))
    assert not is_symplectic(QMatrix.diag([2, 1]))


@pytest.mark.parametrize("n", [2, 3])
def test_symplectic_closure(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(10):
        g = random_symplectic(n, rng)
        h = random_symplectic(n, rng)
        assert is_symplectic(g, tol=1e-10)
        assert is_symplectic(g @ h, tol=1e-9)
        assert is_symplectic(g.conj_transpose(), tol=1e-10)
        # conj_transpose is the group inverse
        assert frob(g @ g.conj_transpose() - QMatrix.identity(n)) <= 1e-10


def test_expm_matches_scalar_exponential():
    from qflag.quat import PureQuaternion, exp_pure

    s = PureQuaternion(0.3, -0.7, 0.2)
    m = QMatrix.diag([s.as_quaternion()])
    assert (expm(m)[0, 0] - exp_pure(s)).norm() <= 1e-13


def test_expm_lands_in_group():
    rng = np.random.default_rng(7)
    x = random_sp_algebra(3, rng)
    assert frob(x + x.conj_transpose()) <= 1e-12
    assert is_symplectic(expm(x), tol=1e-12)


def test_qmatrix_json_round_trip():
    rng = np.random.default_rng(3)
    m = random_invertible(2, rng)
    m2 = QMatrix.from_json(json.loads(json.dumps(m.to_json())))
    assert frob(m - m2) == 0.0


@pytest.mark.parametrize("bad", [
    [],
    {"rows": 2, "cols": 2},
    {"rows": 0, "cols": 1, "entries": []},
    {"rows": 1, "cols": 1, "entries": [[[1, 0, 0]]]},
    {"rows": 2, "cols": 1, "entries": [[[1, 0, 0, 0]]]},
])
def test_qmatrix_json_rejects_malformed(bad):
    with pytest.raises(ValueError):
        QMatrix.from_json(bad)


# -- permutations -----------------------------------------------------------

def test_permutation_matrix_convention():
    w = Permutation([2, 0, 1])
    pm = w.matrix()
    for j in range(3):
        assert (pm[w(j), j] - ONE).norm() == 0.0


def test_composition_matches_matrix_product_on_s3():
    for a in permutations(range(3)):
        for b in permutations(range(3)):
            v, w = Permutation(a), Permutation(b)
            lhs = (v @ w).matrix()
            rhs = v.matrix() @ w.matrix()
            assert frob(lhs - rhs) == 0.0


def test_length_changes_by_one_under_adjacent_transposition():
    for ol in permutations(range(4)):
        w = Permutation(ol)
        for r in range(3):
            tau = Permutation.transposition(r, 4)
            assert abs(w.length() - (w @ tau).length()) == 1


def test_reduced_word_examples():
    assert Permutation.identity(4).reduced_word() == []
    wl = Permutation.longest(3)
    assert wl.one_line == (2, 1, 0)
    assert wl.length() == 3 and len(wl.reduced_word()) == 3
    w = Permutation([2, 0, 1])  # 1-based one-line [3, 1, 2]
    assert w.length() == 2
    word = w.reduced_word()
    assert len(word) == 2
    assert word_to_permutation(word, 3) == w


def test_reduced_word_reproduces_all_of_s4():
    for ol in permutations(range(4)):
        w = Permutation(ol)
        word = w.reduced_word()
        assert len(word) == w.length()
        assert word_to_permutation(word, 4) == w


def test_permutation_inverse_and_json():
    w = Permutation([2, 0, 3, 1])
    assert w @ w.inverse() == Permutation.identity(4)
    assert Permutation.from_json(w.to_json()) == w
    assert w.to_json() == {"one_line": [3, 1, 4, 2]}  # 1-indexed on the wire
    with pytest.raises(ValueError):
        Permutation.from_json({"cycles": []})
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


# -- embeddings -------------------------------------------------------------

def test_embed_identity():
    assert frob(embed_sp2(QMatrix.identity(2), 0, 4) - QMatrix.identity(4)) == 0.0


def test_embed_transposition():
    p12 = Permutation.transposition(0, 2).matrix()
    expect = Permutation.transposition(0, 3).matrix()
    assert frob(embed_sp2(p12, 0, 3) - expect) == 0.0


def test_embed_is_homomorphism():
    rng = np.random.default_rng(5)
    for r, n in [(0, 3), (1, 3), (2, 4)]:
        a = random_symplectic(2, rng)
        b = random_symplectic(2, rng)
        lhs = embed_sp2(a @ b, r, n)
        rhs = embed_sp2(a, r, n) @ embed_sp2(b, r, n)
        assert frob(lhs - rhs) <= 1e-12


def test_embed_range_checked():
    with pytest.raises(ValueError):
        embed_sp2(QMatrix.identity(2), 2, 3)
    with pytest.raises(ValueError):
        embed_sp2(QMatrix.identity(3), 0, 4)
