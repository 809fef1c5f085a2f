"""Dense matrices over H and permutations of S_n.

A :class:`QMatrix` is backed by a float array of shape ``(rows, cols, 4)``;
the last axis holds the four real components of each quaternion entry.
Multiplication respects non-commutativity: entry (i, j) of ``A @ B`` is
``sum_k A[i,k] * B[k,j]`` in that order.

The single matrix norm used everywhere is the Frobenius norm
``sqrt(sum |entry|**2)``.
"""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

from .quat import Quaternion, qconj, qnorm2, qprod

__all__ = [
    "QMatrix",
    "Permutation",
    "SingularMatrixError",
    "is_symplectic",
    "expm",
    "random_sp_algebra",
    "random_symplectic",
]


class SingularMatrixError(ValueError):
    """Raised when a pivot search finds no usable entry."""


class QMatrix:
    """Dense n_rows x n_cols matrix over H."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[2] != 4:
            raise ValueError("QMatrix data must have shape (rows, cols, 4)")
        self.data = data

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int | None = None) -> "QMatrix":
        cols = rows if cols is None else cols
        return QMatrix(np.zeros((rows, cols, 4)))

    @staticmethod
    def identity(n: int) -> "QMatrix":
        m = QMatrix.zeros(n, n)
        m.data[np.arange(n), np.arange(n), 0] = 1.0
        return m

    @staticmethod
    def diag(entries) -> "QMatrix":
        entries = [e if isinstance(e, Quaternion) else Quaternion(e) for e in entries]
        n = len(entries)
        m = QMatrix.zeros(n, n)
        for p, e in enumerate(entries):
            m.data[p, p] = e.to_array()
        return m

    @staticmethod
    def from_rows(rows) -> "QMatrix":
        arr = np.array(
            [[(e.to_array() if isinstance(e, Quaternion) else Quaternion(e).to_array())
              for e in row] for row in rows]
        )
        return QMatrix(arr)

    # -- shape and entries -------------------------------------------------

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, ij) -> Quaternion:
        i, j = ij
        return Quaternion.from_array(self.data[i, j])

    def __setitem__(self, ij, value) -> None:
        i, j = ij
        if not isinstance(value, Quaternion):
            value = Quaternion(value)
        self.data[i, j] = value.to_array()

    def copy(self) -> "QMatrix":
        return QMatrix(self.data.copy())

    # -- algebra -----------------------------------------------------------

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError("shape mismatch in quaternionic matmul")
        prod = qprod(self.data[:, :, None, :], other.data[None, :, :, :])
        return QMatrix(prod.sum(axis=1))

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data + other.data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data - other.data)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.data)

    def scale(self, r: float) -> "QMatrix":
        """Multiply every entry by a real scalar."""
        return QMatrix(self.data * float(r))

    def conj_transpose(self) -> "QMatrix":
        return QMatrix(qconj(self.data).transpose(1, 0, 2))

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.data * self.data)))

    def inverse(self) -> "QMatrix":
        """Gauss-Jordan inverse with left-multiplication row operations.

        All pivot divisions are explicit left inverses; the pivot threshold is
        1e-12 * ||M||_F (relative).
        """
        n = self.n_rows
        if n != self.n_cols:
            raise ValueError("inverse requires a square matrix")
        thresh = 1e-12 * max(self.frobenius(), 1e-300)
        a = self.data.copy()
        inv = QMatrix.identity(n).data

        for col in range(n):
            mags = np.sqrt(qnorm2(a[col:, col]))
            rel = int(np.argmax(mags))
            if mags[rel] <= thresh:
                raise SingularMatrixError("matrix is singular to working precision")
            piv = col + rel
            if piv != col:
                a[[col, piv]] = a[[piv, col]]
                inv[[col, piv]] = inv[[piv, col]]
            p_inv = Quaternion.from_array(a[col, col]).inverse().to_array()
            a[col] = qprod(p_inv, a[col])
            inv[col] = qprod(p_inv, inv[col])
            for r in range(n):
                if r == col:
                    continue
                c = a[r, col].copy()
                if qnorm2(c) == 0.0:
                    continue
                a[r] -= qprod(c, a[col])
                inv[r] -= qprod(c, inv[col])
        return QMatrix(inv)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rows": self.n_rows,
            "cols": self.n_cols,
            "entries": [[list(map(float, self.data[i, j])) for j in range(self.n_cols)]
                        for i in range(self.n_rows)],
        }

    @staticmethod
    def from_json(obj) -> "QMatrix":
        from .quat import quaternion_from_json

        if not isinstance(obj, dict):
            raise ValueError("QMatrix JSON must be an object")
        try:
            rows, cols = int(obj["rows"]), int(obj["cols"])
            entries = obj["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed QMatrix JSON: {exc}") from exc
        if rows <= 0 or cols <= 0:
            raise ValueError("QMatrix dimensions must be positive")
        if not isinstance(entries, list) or len(entries) != rows:
            raise ValueError("entries must have `rows` rows")
        m = QMatrix.zeros(rows, cols)
        for i, row in enumerate(entries):
            if not isinstance(row, list) or len(row) != cols:
                raise ValueError("each row must have `cols` entries")
            for j, e in enumerate(row):
                m.data[i, j] = quaternion_from_json(e).to_array()
        return m

    def __repr__(self):
        return f"QMatrix({self.n_rows}x{self.n_cols})"


def is_symplectic(m: QMatrix, tol: float = 1e-10) -> bool:
    """True iff ||M* M - I||_F <= tol."""
    if m.n_rows != m.n_cols:
        raise ValueError("is_symplectic requires a square matrix")
    res = m.conj_transpose() @ m - QMatrix.identity(m.n_rows)
    return res.frobenius() <= tol


def expm(m: QMatrix, term_cutoff: float = 1e-13) -> QMatrix:
    """Matrix exponential by scaling-and-squaring with a truncated series."""
    n = m.n_rows
    norm = m.frobenius()
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    x = m.scale(0.5 ** s)
    acc = QMatrix.identity(n)
    term = QMatrix.identity(n)
    kfac = 0
    while True:
        kfac += 1
        term = (term @ x).scale(1.0 / kfac)
        acc = acc + term
        if term.frobenius() < term_cutoff:
            break
        if kfac > 60:  # series must have converged long before this
            break
    for _ in range(s):
        acc = acc @ acc
    return acc


def random_sp_algebra(n: int, rng: np.random.Generator, scale: float = 1.0) -> QMatrix:
    """Random element of sp(n): X = (A - A*)/2 for Gaussian A."""
    a = QMatrix(rng.normal(scale=scale, size=(n, n, 4)))
    return (a - a.conj_transpose()).scale(0.5)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 1.0) -> QMatrix:
    return expm(random_sp_algebra(n, rng, scale=scale))


class Permutation:
    """Element of S_n in one-line notation (0-based internally).

    ``one_line[j] = w(j)``.  Composition is ``(v @ w)(j) = v(w(j))``, which
    matches the permutation-matrix convention ``P_{v o w} = P_v P_w`` for
    ``(P_w)[i, j] = delta(i, w(j))``.
    """

    __slots__ = ("one_line",)

    def __init__(self, one_line):
        ol = tuple(int(x) for x in one_line)
        if sorted(ol) != list(range(len(ol))):
            raise ValueError("not a permutation of 0..n-1")
        self.one_line = ol

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(range(n))

    @staticmethod
    def longest(n: int) -> "Permutation":
        return Permutation(range(n - 1, -1, -1))

    @staticmethod
    def transposition(r: int, n: int) -> "Permutation":
        """Adjacent transposition swapping positions r and r+1 (0-based r)."""
        ol = list(range(n))
        ol[r], ol[r + 1] = ol[r + 1], ol[r]
        return Permutation(ol)

    @property
    def n(self) -> int:
        return len(self.one_line)

    def __call__(self, j: int) -> int:
        return self.one_line[j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.one_line == other.one_line

    def __hash__(self):
        return hash(self.one_line)

    def __matmul__(self, other: "Permutation") -> "Permutation":
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.one_line[other.one_line[j]] for j in range(self.n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, i in enumerate(self.one_line):
            inv[i] = j
        return Permutation(inv)

    def length(self) -> int:
        """Number of inversions = minimal adjacent-transposition word length."""
        ol = self.one_line
        return sum(1 for a in range(self.n) for b in range(a + 1, self.n) if ol[a] > ol[b])

    def reduced_word(self) -> list[int]:
        """Reduced word by bubble-sort descent; ``len == self.length()``.

        Returns 0-based positions r, each meaning the adjacent transposition
        (r, r+1); composing ``s_{r_1} @ ... @ s_{r_m}`` reproduces ``self``.
        """
        ol = list(self.one_line)
        word = []
        changed = True
        while changed:
            changed = False
            for r in range(self.n - 1):
                if ol[r] > ol[r + 1]:
                    ol[r], ol[r + 1] = ol[r + 1], ol[r]
                    word.append(r)
                    changed = True
        # ol is now sorted and self = s_{w_m} o ... o s_{w_1} applied to id,
        # i.e. self = product of the word letters in reverse order.
        word.reverse()
        return word

    def matrix(self) -> QMatrix:
        """(P_w)[i, j] = delta(i, w(j))."""
        m = QMatrix.zeros(self.n, self.n)
        for j in range(self.n):
            m.data[self.one_line[j], j, 0] = 1.0
        return m

    def to_json(self) -> dict:
        return {"one_line": [i + 1 for i in self.one_line]}

    @staticmethod
    def from_json(obj) -> "Permutation":
        if not isinstance(obj, dict) or "one_line" not in obj:
            raise ValueError("Permutation JSON must be {'one_line': [...]} (1-indexed)")
        ol = obj["one_line"]
        if not isinstance(ol, list):
            raise ValueError("one_line must be a list")
        return Permutation([int(x) - 1 for x in ol])

    def __repr__(self):
        return f"Permutation({[i + 1 for i in self.one_line]})"


def word_to_permutation(word, n: int) -> Permutation:
    """Compose adjacent transpositions s_{r_1} @ ... @ s_{r_m} (0-based r)."""
    perms = [Permutation.transposition(r, n) for r in word]
    return reduce(lambda a, b: a @ b, perms, Permutation.identity(n))


def embed_sp2(a: QMatrix, r: int, n: int) -> QMatrix:
    """Embed a 2x2 block at rows/columns {r, r+1} (0-based r), identity elsewhere.

    This is a group homomorphism: embed(A @ B) = embed(A) @ embed(B).
    """
    if a.n_rows != 2 or a.n_cols != 2:
        raise ValueError("embed_sp2 expects a 2x2 matrix")
    if not (0 <= r < n - 1):
        raise ValueError(f"block position {r} out of range for n={n}")
    m = QMatrix.identity(n)
    m.data[r:r + 2, r:r + 2] = a.data
    return m
