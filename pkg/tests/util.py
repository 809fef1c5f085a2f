"""Shared helpers for the test suite: random factor builders and independent
oracles implemented separately from the library code they check."""

import numpy as np

from qflag.hmat import Permutation, QMatrix
from qflag.liealg import Multivector, sp_basis, wedge_tuples
from qflag.quat import Quaternion


def random_quaternion(rng, scale=1.0):
    return Quaternion.from_array(rng.normal(scale=scale, size=4))


def random_unit_quaternion(rng):
    q = random_quaternion(rng)
    return q * (1.0 / q.norm())


def random_invertible(n, rng, scale=1.0):
    """Generic matrix over H; invertible with probability 1."""
    return QMatrix(rng.normal(scale=scale, size=(n, n, 4)))


def random_unit_upper(n, rng, scale=0.7):
    m = QMatrix.identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            m.data[i, j] = rng.normal(scale=scale, size=4)
    return m


def random_vw(w: Permutation, rng, scale=0.7):
    """Random element of V_w: unit upper triangular with entry (i, j) allowed
    only when w(i) > w(j), which makes P_w V P_w^{-1} lower triangular."""
    n = w.n
    v = QMatrix.identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            if w(i) > w(j):
                v.data[i, j] = rng.normal(scale=scale, size=4)
    return v


def random_bruhat_factors(n, rng):
    """Valid (U, D, w, V) with moderate conditioning, and the product G."""
    u = random_unit_upper(n, rng)
    d_entries = []
    for _ in range(n):
        q = random_quaternion(rng)
        d_entries.append(q * (float(rng.uniform(0.5, 2.0)) / q.norm()))
    d = QMatrix.diag(d_entries)
    w = Permutation(rng.permutation(n))
    v = random_vw(w, rng)
    g = u @ d @ w.matrix() @ v
    return u, d, w, v, g


def is_unit_upper(m: QMatrix, tol=1e-12) -> bool:
    n = m.n_rows
    for i in range(n):
        if (m[i, i] - Quaternion(1)).norm() > tol:
            return False
        for j in range(i):
            if m[i, j].norm() > tol:
                return False
    return True


def in_vw(v: QMatrix, w: Permutation, tol=1e-12) -> bool:
    """V in V_w: unit upper triangular and P_w V P_w^{-1} lower unit triangular."""
    if not is_unit_upper(v, tol):
        return False
    pw = w.matrix()
    conj = pw @ v @ pw.inverse()
    n = v.n_rows
    for i in range(n):
        for j in range(i + 1, n):
            if conj[i, j].norm() > tol:
                return False
    return True


# ---------------------------------------------------------------------------
# Independent Schouten oracle: odd-variable contraction formula.
#
# Writing a multivector P = sum c_t theta_{t_1} ... theta_{t_k} in
# anticommuting variables theta_a, the bracket is
#
#     [P, Q] = sum_{a,b,c} f_{ab}^c (dP/dtheta_a) ^ theta_c ^ (dQ/dtheta_b)
#
# where d/dtheta_a removes the variable at position idx with sign (-1)^idx.
# This formulation never touches the decomposable-sum formula used by the
# library, so it is an independent check of every sign.
# ---------------------------------------------------------------------------

def schouten_oracle(p: Multivector, q: Multivector) -> Multivector:
    st = sp_basis(p.n).struct
    out = {}
    for t1, c1 in p.coeffs.items():
        for pos1, a in enumerate(t1):
            rest1 = t1[:pos1] + t1[pos1 + 1:]
            s1 = -c1 if pos1 % 2 else c1
            for t2, c2 in q.coeffs.items():
                for pos2, b in enumerate(t2):
                    row = st[a, b]
                    nz = np.nonzero(row)[0]
                    if nz.size == 0:
                        continue
                    rest2 = t2[:pos2] + t2[pos2 + 1:]
                    s2 = -c2 if pos2 % 2 else c2
                    for c in nz:
                        mid, sm = wedge_tuples((int(c),), rest2)
                        if sm == 0:
                            continue
                        t, s = wedge_tuples(rest1, mid)
                        if s == 0:
                            continue
                        out[t] = out.get(t, 0.0) + s1 * s2 * sm * s * float(row[c])
    return Multivector(p.n, p.grade + q.grade - 1, out)


def random_multivector(n, grade, rng, nterms=4):
    from itertools import combinations

    basis = sp_basis(n)
    combos = list(combinations(range(basis.dim), grade))
    picks = rng.choice(len(combos), size=min(nterms, len(combos)), replace=False)
    return Multivector(n, grade, {combos[i]: float(rng.normal()) for i in picks})


def embed_multivector(p: Multivector, r: int, n: int) -> Multivector:
    """Image of a multivector over sp(2) under the algebra embedding at block r."""
    b2, bn = sp_basis(2), sp_basis(n)

    def shift(name: str) -> str:
        kind, inside = name.split("(")
        inside = inside.rstrip(")")
        if kind == "Dg":
            x, pp = inside.split(";")
            return f"Dg({x};{int(pp) + r})"
        if kind == "E":
            pp, qq = inside.split(",")
            return f"E({int(pp) + r},{int(qq) + r})"
        x, rest = inside.split(";")
        pp, qq = rest.split(",")
        return f"S({x};{int(pp) + r},{int(qq) + r})"

    out = Multivector.zero(n, p.grade)
    for t, c in p.coeffs.items():
        term = Multivector(n, 0, {(): c})
        for idx in t:
            img = bn.index[shift(b2.names[idx])]
            term = term.wedge(Multivector(n, 1, {(img,): 1.0}))
        out = out + term
    return out
