"""Decompositions of invertible quaternionic matrices.

Implements the strict Bruhat normal form G = U D P_w V (U, V unit upper
triangular, D diagonal, P_w V P_w^{-1} lower unit triangular), the Dieudonne
determinant, the Iwasawa decomposition G = K R Uu with K symplectic, the
dressing action (G, K) -> K' defined by G K = K' R U, and leaf signatures
(w, diagonal phases).

All elimination steps place scalar inverses explicitly on the left or right;
the order matters because H is non-commutative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hmat import Permutation, QMatrix, SingularMatrixError, is_symplectic
from .quat import Quaternion, qnorm2, qprod

__all__ = [
    "BruhatForm",
    "LeafSignature",
    "bruhat",
    "dieudonne_det",
    "iwasawa",
    "dress",
    "leaf_signature",
]

# Relative pivot threshold: entries below 1e-10 * ||G||_F count as zero.  The
# permutation type is stable for generic inputs; near-degenerate inputs are
# the caller's risk.
PIVOT_RTOL = 1e-10


@dataclass
class BruhatForm:
    """The quadruple (U, D, w, V) of the strict Bruhat normal form."""

    U: QMatrix
    D: QMatrix
    w: Permutation
    V: QMatrix

    def reconstruct(self) -> QMatrix:
        return self.U @ self.D @ self.w.matrix() @ self.V

    def diagonal(self) -> list[Quaternion]:
        return [self.D[i, i] for i in range(self.D.n_rows)]

    def to_json(self) -> dict:
        return {
            "U": self.U.to_json(),
            "D": self.D.to_json(),
            "w": self.w.to_json(),
            "V": self.V.to_json(),
        }


@dataclass
class LeafSignature:
    """(permutation type, diagonal unit-quaternion phases) labelling a leaf."""

    w: Permutation
    phases: list[Quaternion]

    def deviation(self, other: "LeafSignature") -> float:
        """Max phase distance; infinity when the permutation types differ."""
        if self.w != other.w:
            return float("inf")
        return max((p - q).norm() for p, q in zip(self.phases, other.phases))


def bruhat(g: QMatrix) -> BruhatForm:
    """Strict Bruhat normal form of an invertible matrix.

    Columns are processed left to right.  The pivot of column j is the
    bottom-most not-yet-assigned row with a nonzero entry; entries below the
    pivot (necessarily in already-assigned rows) are cleared by column
    operations that add earlier columns to column j (building V), entries
    above the pivot by row operations that add the pivot row to higher rows
    (building U).  The V so produced automatically satisfies the strictness
    condition that P_w V P_w^{-1} is lower unit triangular.
    """
    n = g.n_rows
    if n != g.n_cols:
        raise ValueError("bruhat requires a square matrix")
    thresh = PIVOT_RTOL * max(g.frobenius(), 1e-300)

    a = g.data.copy()
    u_acc = QMatrix.identity(n).data
    v_acc = QMatrix.identity(n).data
    w_of = [-1] * n       # w_of[j] = pivot row of column j
    pivot_col = [-1] * n  # pivot_col[r] = column whose pivot sits in row r

    for j in range(n):
        mags = np.sqrt(qnorm2(a[:, j]))
        piv = -1
        for r in range(n - 1, -1, -1):
            if pivot_col[r] < 0 and mags[r] > thresh:
                piv = r
                break
        if piv < 0:
            raise SingularMatrixError("matrix is singular: no Bruhat pivot in column")
        w_of[j] = piv
        pivot_col[piv] = j
        p_inv = Quaternion.from_array(a[piv, j]).inverse().to_array()

        for r in range(n):
            if r == piv or mags[r] <= thresh:
                continue
            if r > piv:
                # assigned row below the pivot: clear with a column operation
                jp = pivot_col[r]
                q_inv = Quaternion.from_array(a[r, jp]).inverse().to_array()
                c = qprod(q_inv, a[r, j])
                a[:, j] -= qprod(a[:, jp], c)
                # V <- (I + e_{jp} c e_j^T) V
                v_acc[jp] += qprod(c, v_acc[j])
            else:
                # row above the pivot: clear with a row operation
                c = qprod(a[r, j], p_inv)
                a[r] -= qprod(c, a[piv])
                # U <- U (I + e_r c e_piv^T): column piv of U gains U[:,r] c
                u_acc[:, piv] += qprod(u_acc[:, r], c)

    d = QMatrix.zeros(n, n)
    for j in range(n):
        d.data[w_of[j], w_of[j]] = a[w_of[j], j]
    return BruhatForm(U=QMatrix(u_acc), D=d, w=Permutation(w_of), V=QMatrix(v_acc))


def dieudonne_det(g: QMatrix) -> float:
    """Product of |d_i| over the strict-form diagonal.

    The residue map H*/[H*, H*] = R_+ is realized as q -> |q| (so that
    det(diag(r)) = r for positive real r); the sign sgn(w) is absorbed
    because -1 is a commutator in H*.
    """
    form = bruhat(g)
    out = 1.0
    for q in form.diagonal():
        out *= q.norm()
    return out


def iwasawa(g: QMatrix) -> tuple[QMatrix, QMatrix, QMatrix]:
    """G = K R Uu with K symplectic, R positive real diagonal, Uu unit upper.

    Modified Gram-Schmidt on columns with right-side coefficients
    (column j of G = sum_i column i of K times T[i, j], inner product
    <x, y> = sum conj(x_l) y_l), with a second re-orthogonalization pass.
    """
    n = g.n_rows
    if n != g.n_cols:
        raise ValueError("iwasawa requires a square matrix")
    thresh = PIVOT_RTOL * max(g.frobenius(), 1e-300)

    k = g.data.copy()
    t = QMatrix.zeros(n, n).data
    for j in range(n):
        for _ in range(2):  # twice is enough
            for i in range(j):
                coef = _inner(k[:, i], k[:, j])
                k[:, j] -= qprod(k[:, i], coef)
                t[i, j] = (Quaternion.from_array(t[i, j]) + Quaternion.from_array(coef)).to_array()
        r = float(np.sqrt(np.sum(k[:, j] * k[:, j])))
        if r <= thresh:
            raise SingularMatrixError("matrix is singular: Gram-Schmidt breakdown")
        k[:, j] /= r
        t[j, j, 0] = r

    rr = QMatrix.zeros(n, n)
    uu = QMatrix.identity(n)
    for i in range(n):
        ri = t[i, i, 0]
        rr.data[i, i, 0] = ri
        for j in range(i + 1, n):
            uu.data[i, j] = t[i, j] / ri
    return QMatrix(k), rr, uu


def _inner(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """<x, y> = sum_l conj(x_l) y_l for columns of shape (n, 4)."""
    xc = x.copy()
    xc[:, 1:] *= -1.0
    return qprod(xc, y).sum(axis=0)


def dress(g: QMatrix, k: QMatrix, tol: float = 1e-10) -> QMatrix:
    """Dressing action: (G, K) -> K' where G K = K' R U.

    G must be upper triangular with positive real diagonal (an element of RU)
    and K symplectic.  The returned factor comes from a fresh Iwasawa
    decomposition of the product, which re-projects onto the group manifold
    and keeps iterated orbits from drifting.
    """
    _require_ru(g, tol)
    if not is_symplectic(k, tol=max(tol, 1e-8)):
        raise ValueError("dress requires a symplectic K")
    k2, _, _ = iwasawa(g @ k)
    return k2


def _require_ru(g: QMatrix, tol: float) -> None:
    n = g.n_rows
    if n != g.n_cols:
        raise ValueError("dress requires a square G")
    scale = max(g.frobenius(), 1e-300)
    for i in range(n):
        d = g[i, i]
        if d.re <= 0 or Quaternion(0, d.i, d.j, d.k).norm() > tol * scale:
            raise ValueError("G must have positive real diagonal")
        for j in range(i):
            if g[i, j].norm() > tol * scale:
                raise ValueError("G must be upper triangular")


def leaf_signature(k: QMatrix, tol: float = 1e-8) -> LeafSignature:
    """(w, phases) of a symplectic matrix, via its strict Bruhat form."""
    if not is_symplectic(k, tol=tol):
        raise ValueError("leaf_signature requires a symplectic matrix")
    form = bruhat(k)
    phases = []
    for q in form.diagonal():
        phases.append(q * (1.0 / q.norm()))
    return LeafSignature(w=form.w, phases=phases)
