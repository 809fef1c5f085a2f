"""The Lie algebra sp(n), its exterior algebra, and the Schouten bracket.

Basis of sp(n) (dimension n(2n+1)), for 1 <= p < q <= n and x in {i, j, k}:

* ``E(p,q)``   : +1 at (p, q), -1 at (q, p);
* ``S(x;p,q)`` : x at (p, q) and (q, p);
* ``Dg(x;p)``  : x at the diagonal slot (p, p).

Names carry 1-based positions.  The diagonal elements ``Dg`` span the
spheroid algebra (purely imaginary diagonal matrices).

Multivectors are sparse: a grade-k element of the exterior algebra stores a
map from strictly increasing k-tuples of basis indices to real coefficients,
with coefficients below 1e-14 pruned after every operation.

The Schouten bracket follows the convention in which the three identities

    [P,Q] = (-1)^{pq} [Q,P]
    [P, Q^R] = [P,Q]^R + (-1)^{pq+q} Q^[P,R]
    (-1)^{p(r-1)}[P,[Q,R]] + cyclic = 0

hold; on decomposables it is

    [x_1^...^x_p, y_1^...^y_q]
        = (-1)^{p+1} sum_{a,b} (-1)^{a+b} [x_a, y_b] ^ (x without a) ^ (y without b)

which reduces to the Lie bracket on grade-1 inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .hmat import QMatrix, is_symplectic
from .quat import qconj, qprod

__all__ = [
    "SpBasis",
    "sp_basis",
    "Multivector",
    "DualVector",
    "lie_bracket",
    "schouten",
    "lambda_element",
    "ad_multivector",
    "intrinsic_derivative",
    "four_bracket",
    "ad_group",
    "ad_group_matrix",
    "apply_exterior",
    "wedge_tuples",
]

PRUNE_TOL = 1e-14

_UNITS = ("i", "j", "k")


class SpBasis:
    """Precomputed basis data for sp(n); shared read-only."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        names: list[str] = []
        mats: list[QMatrix] = []
        for p in range(1, n + 1):
            for q in range(p + 1, n + 1):
                m = QMatrix.zeros(n)
                m.data[p - 1, q - 1, 0] = 1.0
                m.data[q - 1, p - 1, 0] = -1.0
                names.append(f"E({p},{q})")
                mats.append(m)
                for xi, x in enumerate(_UNITS, start=1):
                    m = QMatrix.zeros(n)
                    m.data[p - 1, q - 1, xi] = 1.0
                    m.data[q - 1, p - 1, xi] = 1.0
                    names.append(f"S({x};{p},{q})")
                    mats.append(m)
        for p in range(1, n + 1):
            for xi, x in enumerate(_UNITS, start=1):
                m = QMatrix.zeros(n)
                m.data[p - 1, p - 1, xi] = 1.0
                names.append(f"Dg({x};{p})")
                mats.append(m)

        self.names = names
        self.mats = mats
        self.index = {nm: c for c, nm in enumerate(names)}
        self.dim = len(names)
        assert self.dim == n * (2 * n + 1)
        self.spheroid_indices = tuple(c for c, nm in enumerate(names) if nm.startswith("Dg"))

        # Flat basis array: the real pairing <A, B> = Re tr(A* B) equals the
        # Euclidean inner product of the flattened component arrays.
        self._flat = np.stack([m.data.reshape(-1) for m in mats])  # (N, n*n*4)
        self._norm2 = np.sum(self._flat * self._flat, axis=1)

        self._struct: np.ndarray | None = None

    # -- coordinates -------------------------------------------------------

    def project(self, m: QMatrix) -> np.ndarray:
        """Basis coordinates of a matrix in sp(n) (exact on the span)."""
        return (self._flat @ m.data.reshape(-1)) / self._norm2

    def matrix_of(self, coeffs) -> QMatrix:
        coeffs = np.asarray(coeffs, dtype=float)
        return QMatrix((coeffs @ self._flat).reshape(self.n, self.n, 4))

    def element(self, name: str) -> "Multivector":
        """Grade-1 multivector for a named basis element."""
        return Multivector(self.n, 1, {(self.index[name],): 1.0})

    # -- structure constants -----------------------------------------------

    @property
    def struct(self) -> np.ndarray:
        """struct[a, b, c] = coefficient of basis c in [B_a, B_b]."""
        if self._struct is None:
            N = self.dim
            tab = np.zeros((N, N, N))
            for a in range(N):
                ma = self.mats[a]
                for b in range(a + 1, N):
                    mb = self.mats[b]
                    comm = ma @ mb - mb @ ma
                    coeffs = self.project(comm)
                    coeffs[np.abs(coeffs) < PRUNE_TOL] = 0.0
                    tab[a, b] = coeffs
                    tab[b, a] = -coeffs
            self._struct = tab
        return self._struct

    def ad_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ad_X on the basis, for X with coordinates x."""
        return np.einsum("a,abc->cb", np.asarray(x, dtype=float), self.struct)


@lru_cache(maxsize=None)
def sp_basis(n: int) -> SpBasis:
    return SpBasis(n)


# ---------------------------------------------------------------------------
# Sparse multivectors
# ---------------------------------------------------------------------------

def wedge_tuples(t1: tuple[int, ...], t2: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Merge two strictly increasing tuples; returns (sorted tuple, sign).

    Sign is the parity of the merge permutation; (0) when an index repeats.
    """
    if not t1:
        return t2, 1
    if not t2:
        return t1, 1
    out = []
    sign = 1
    i = j = 0
    while i < len(t1) and j < len(t2):
        a, b = t1[i], t2[j]
        if a == b:
            return (), 0
        if a < b:
            out.append(a)
            i += 1
        else:
            out.append(b)
            j += 1
            if (len(t1) - i) % 2:
                sign = -sign
    out.extend(t1[i:])
    out.extend(t2[j:])
    return tuple(out), sign


@dataclass
class Multivector:
    """Grade-k element of the exterior algebra of sp(n), sparse over tuples."""

    n: int
    grade: int
    coeffs: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        self.prune()

    @staticmethod
    def zero(n: int, grade: int) -> "Multivector":
        return Multivector(n, grade, {})

    def prune(self) -> "Multivector":
        self.coeffs = {t: c for t, c in self.coeffs.items() if abs(c) > PRUNE_TOL}
        return self

    def copy(self) -> "Multivector":
        return Multivector(self.n, self.grade, dict(self.coeffs))

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def is_zero(self, tol: float = PRUNE_TOL) -> bool:
        return self.max_abs() <= tol

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        out = dict(self.coeffs)
        for t, c in other.coeffs.items():
            out[t] = out.get(t, 0.0) + c
        return Multivector(self.n, self.grade, out)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + other.scale(-1.0)

    def scale(self, r: float) -> "Multivector":
        return Multivector(self.n, self.grade, {t: c * r for t, c in self.coeffs.items()})

    def wedge(self, other: "Multivector") -> "Multivector":
        if self.n != other.n:
            raise ValueError("mismatched n")
        out: dict[tuple[int, ...], float] = {}
        for t1, c1 in self.coeffs.items():
            for t2, c2 in other.coeffs.items():
                t, s = wedge_tuples(t1, t2)
                if s:
                    out[t] = out.get(t, 0.0) + s * c1 * c2
        return Multivector(self.n, self.grade + other.grade, out)

    def _check(self, other: "Multivector") -> None:
        if self.n != other.n or self.grade != other.grade:
            raise ValueError("mismatched n or grade")

    def as_vector(self) -> np.ndarray:
        """Grade-1 only: dense coordinate vector over the basis."""
        if self.grade != 1:
            raise ValueError("as_vector requires grade 1")
        v = np.zeros(sp_basis(self.n).dim)
        for (c,), val in self.coeffs.items():
            v[c] = val
        return v

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        names = sp_basis(self.n).names
        terms = [{"idx": [names[c] for c in t], "c": v}
                 for t, v in sorted(self.coeffs.items())]
        return {"n": self.n, "grade": self.grade, "terms": terms}

    @staticmethod
    def from_json(obj) -> "Multivector":
        n = int(obj["n"])
        grade = int(obj["grade"])
        basis = sp_basis(n)
        coeffs: dict[tuple[int, ...], float] = {}
        for term in obj["terms"]:
            idx = tuple(basis.index[nm] for nm in term["idx"])
            srt = tuple(sorted(idx))
            if len(set(idx)) != len(idx):
                continue
            _, sign = _sort_sign(idx)
            coeffs[srt] = coeffs.get(srt, 0.0) + sign * float(term["c"])
        return Multivector(n, grade, coeffs)


def _sort_sign(idx: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    order = sorted(range(len(idx)), key=lambda a: idx[a])
    sign = 1
    seen = list(order)
    for a in range(len(seen)):
        while seen[a] != a:
            b = seen[a]
            seen[a], seen[b] = seen[b], seen[a]
            sign = -sign
    return tuple(idx[a] for a in order), sign


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------

def lie_bracket(x: Multivector, y: Multivector) -> Multivector:
    """Lie bracket of two grade-1 elements, in basis coordinates."""
    if x.n != y.n:
        raise ValueError("mismatched n")
    if x.grade != 1 or y.grade != 1:
        raise ValueError("lie_bracket expects grade-1 elements")
    basis = sp_basis(x.n)
    out: dict[tuple[int, ...], float] = {}
    st = basis.struct
    for (a,), ca in x.coeffs.items():
        for (b,), cb in y.coeffs.items():
            row = st[a, b]
            for c in np.nonzero(row)[0]:
                out[(int(c),)] = out.get((int(c),), 0.0) + ca * cb * row[c]
    return Multivector(x.n, 1, out)


def schouten(p: Multivector, q: Multivector) -> Multivector:
    """Schouten bracket of multivectors (see module docstring for signs)."""
    if p.n != q.n:
        raise ValueError("mismatched n")
    if p.grade == 0 or q.grade == 0:
        return Multivector.zero(p.n, max(p.grade + q.grade - 1, 0))
    basis = sp_basis(p.n)
    st = basis.struct
    pref = -1.0 if p.grade % 2 == 0 else 1.0  # (-1)^{p+1}
    out: dict[tuple[int, ...], float] = {}
    for tp, cp in p.coeffs.items():
        for tq, cq in q.coeffs.items():
            for ai, a in enumerate(tp):
                rest_p = tp[:ai] + tp[ai + 1:]
                for bi, b in enumerate(tq):
                    row = st[a, b]
                    nz = np.nonzero(row)[0]
                    if nz.size == 0:
                        continue
                    rest_q = tq[:bi] + tq[bi + 1:]
                    rest, s_rest = wedge_tuples(rest_p, rest_q)
                    if s_rest == 0:
                        continue
                    # (-1)^{a+b} with 1-based positions: ai+bi is 0-based
                    sgn = pref * cp * cq * s_rest
                    if (ai + bi) % 2:
                        sgn = -sgn
                    for c in nz:
                        t, s = wedge_tuples((int(c),), rest)
                        if s:
                            out[t] = out.get(t, 0.0) + sgn * s * row[c]
    return Multivector(p.n, p.grade + q.grade - 1, out)


def lambda_element(n: int) -> Multivector:
    """Sum over p < q of E(p,q) ^ S(i;p,q) ^ S(j;p,q) ^ S(k;p,q)."""
    if n < 2:
        raise ValueError("lambda_element requires n >= 2")
    basis = sp_basis(n)
    coeffs: dict[tuple[int, ...], float] = {}
    for p in range(1, n + 1):
        for q in range(p + 1, n + 1):
            t = tuple(sorted(
                basis.index[nm]
                for nm in (f"E({p},{q})", f"S(i;{p},{q})", f"S(j;{p},{q})", f"S(k;{p},{q})")
            ))
            coeffs[t] = 1.0
    return Multivector(n, 4, coeffs)


def ad_multivector(x: Multivector, p: Multivector) -> Multivector:
    """Leibniz extension of ad_X: sum over factor positions of [X, factor]."""
    if x.n != p.n:
        raise ValueError("mismatched n")
    if x.grade != 1:
        raise ValueError("ad_multivector expects a grade-1 first argument")
    ad = sp_basis(x.n).ad_matrix(x.as_vector())
    return _leibniz_apply(ad, p)


def _leibniz_apply(a: np.ndarray, p: Multivector) -> Multivector:
    """Derivative of the exterior power: replace one factor by its a-image."""
    out: dict[tuple[int, ...], float] = {}
    for t, c in p.coeffs.items():
        for pos, idx in enumerate(t):
            rest = t[:pos] + t[pos + 1:]
            col = a[:, idx]
            for new in np.nonzero(np.abs(col) > PRUNE_TOL)[0]:
                tt, s = wedge_tuples((int(new),), rest)
                if s:
                    # moving the new factor back to `pos` costs (-1)^pos,
                    # already absorbed by wedging it in front of `rest`
                    sign = s if pos % 2 == 0 else -s
                    out[tt] = out.get(tt, 0.0) + sign * c * col[new]
    return Multivector(p.n, p.grade, out)


def intrinsic_derivative(x: Multivector, n: int | None = None) -> Multivector:
    """d_e of the multiplicative field in the right trivialization: ad_X Lambda."""
    n = x.n if n is None else n
    return ad_multivector(x, lambda_element(n))


@dataclass
class DualVector:
    """Element of the dual of sp(n), as coefficients over the dual basis."""

    n: int
    coeffs: np.ndarray

    @staticmethod
    def zero(n: int) -> "DualVector":
        return DualVector(n, np.zeros(sp_basis(n).dim))

    @staticmethod
    def basis_dual(name: str, n: int) -> "DualVector":
        v = np.zeros(sp_basis(n).dim)
        v[sp_basis(n).index[name]] = 1.0
        return DualVector(n, v)

    def pair(self, x: Multivector) -> float:
        return float(self.coeffs @ x.as_vector())


def four_bracket(z1: DualVector, z2: DualVector, z3: DualVector, z4: DualVector,
                 n: int | None = None) -> DualVector:
    """Dual of the intrinsic derivative on quadruples of covectors.

    <result, X> = <z1^z2^z3^z4, ad_X Lambda> for every basis element X.
    """
    zs = (z1, z2, z3, z4)
    n = z1.n if n is None else n
    if any(z.n != n for z in zs):
        raise ValueError("mismatched n")
    basis = sp_basis(n)
    zmat = np.stack([z.coeffs for z in zs])  # (4, N)
    out = np.zeros(basis.dim)
    for c in range(basis.dim):
        dxi = intrinsic_derivative(basis.element(basis.names[c]))
        total = 0.0
        for t, coeff in dxi.coeffs.items():
            total += coeff * float(np.linalg.det(zmat[:, list(t)]))
        out[c] = total
    return DualVector(n, out)


# ---------------------------------------------------------------------------
# Group-level adjoint action
# ---------------------------------------------------------------------------

def ad_group_matrix(g: QMatrix, tol: float = 1e-8) -> np.ndarray:
    """Matrix of Ad_g = g (.) g^{-1} on the basis of sp(n); g symplectic."""
    if not is_symplectic(g, tol=tol):
        raise ValueError("ad_group requires a symplectic g")
    basis = sp_basis(g.n_rows)
    n = g.n_rows
    # batched g B_c g* over all basis elements
    bs = np.stack([m.data for m in basis.mats])  # (N, n, n, 4)
    gb = qprod(g.data[None, :, :, None, :], bs[:, None, :, :, :]).sum(axis=2)
    gstar = qconj(g.data).transpose(1, 0, 2)
    gbg = qprod(gb[:, :, :, None, :], gstar[None, None, :, :, :]).sum(axis=2)
    flat = gbg.reshape(basis.dim, -1)
    return (flat @ basis._flat.T / basis._norm2).T


def apply_exterior(a: np.ndarray, p: Multivector) -> Multivector:
    """Apply the grade-wise exterior power of a linear map to a multivector.

    Sparse inputs are handled term by term (one batch of k x k minors per
    term); inputs with many terms go through a dense antisymmetric tensor
    and k successive tensordots, which is far cheaper than per-term minors.
    """
    N = a.shape[0]
    k = p.grade
    if k == 0:
        return p.copy()
    combos = _combo_array(N, k)
    if len(p.coeffs) <= 32:
        acc = np.zeros(len(combos))
        for t, c in p.coeffs.items():
            cols = a[:, list(t)]            # (N, k)
            minors = np.linalg.det(cols[combos])  # (n_out,)
            acc += c * minors
    else:
        dense = np.zeros((N,) * k)
        idx = np.array(list(p.coeffs.keys()), dtype=int)       # (m, k)
        val = np.fromiter(p.coeffs.values(), dtype=float, count=len(p.coeffs))
        for perm, sgn in _perm_signs(k):
            dense[tuple(idx[:, j] for j in perm)] = sgn * val
        for _ in range(k):
            # contract one slot with a and rotate it to the back
            dense = np.tensordot(a, dense, axes=(1, 0))
            dense = np.moveaxis(dense, 0, k - 1)
        acc = dense[tuple(combos[:, j] for j in range(k))]
    out = {tuple(int(i) for i in combos[r]): float(acc[r])
           for r in np.nonzero(np.abs(acc) > PRUNE_TOL)[0]}
    return Multivector(p.n, k, out)


@lru_cache(maxsize=None)
def _perm_signs(k: int) -> tuple:
    from itertools import permutations as _perms

    out = []
    for perm in _perms(range(k)):
        sgn = 1.0
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sgn = -sgn
        out.append((perm, sgn))
    return tuple(out)


@lru_cache(maxsize=None)
def _combo_array(N: int, k: int) -> np.ndarray:
    return np.array(list(combinations(range(N), k)), dtype=int)


def ad_group(g: QMatrix, p: Multivector, tol: float = 1e-8) -> Multivector:
    """Ad_g applied factor-wise to a multivector; Ad_{gh} = Ad_g Ad_h."""
    if g.n_rows != p.n:
        raise ValueError("mismatched n")
    return apply_exterior(ad_group_matrix(g, tol=tol), p)
