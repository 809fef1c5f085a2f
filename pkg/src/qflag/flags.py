"""General-n experiments: leaf parametrizations, cells, and dressing orbits.

A leaf point for a reduced word (r_1, ..., r_m) is the product of embedded
2x2 blocks ``k_{v_i}`` at rows (r_i, r_i + 1); for generic parameters its
Bruhat permutation type is the product of the word's adjacent transpositions
and its diagonal phases are trivial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import LeafSignature, bruhat, dress, leaf_signature
from .hmat import Permutation, QMatrix, embed_sp2, is_symplectic, word_to_permutation
from .hp1geom import ChartPoint, coset_rep, south_coord
from .liealg import sp_basis
from .quat import Quaternion

__all__ = [
    "LeafPoint",
    "leaf_point",
    "cell_of",
    "leaf_dimension",
    "orbit_probe",
    "random_ru",
]


@dataclass
class LeafPoint:
    n: int
    word: list[int]          # 0-based adjacent-transposition positions
    params: list[Quaternion]
    matrix: QMatrix


def _k_block(v: Quaternion) -> QMatrix:
    return coset_rep(ChartPoint.south(v))


def leaf_point(word, params, n: int) -> LeafPoint:
    """Product of embedded k_{v_i} blocks along a reduced word."""
    word = [int(r) for r in word]
    params = list(params)
    if len(word) != len(params):
        raise ValueError("word and params must have the same length")
    for r in word:
        if not (0 <= r < n - 1):
            raise ValueError(f"word letter {r} out of range for n={n}")
    w = word_to_permutation(word, n)
    if w.length() != len(word):
        raise ValueError("word is not reduced")
    m = QMatrix.identity(n)
    for r, v in zip(word, params):
        m = m @ embed_sp2(_k_block(v), r, n)
    return LeafPoint(n=n, word=word, params=params, matrix=m)


def cell_of(k: QMatrix, tol: float = 1e-8) -> Permutation:
    """Bruhat cell (permutation type) of a symplectic matrix."""
    if not is_symplectic(k, tol=tol):
        raise ValueError("cell_of requires a symplectic matrix")
    return bruhat(k).w


def leaf_dimension(word, n: int, probes: int = 1, seed: int = 0,
                   h: float = 1e-5, sv_cutoff: float = 1e-7) -> int:
    """Numerical rank of the differential of the word product map.

    Finite differences in all 4m real parameters at a random base point; the
    difference quotients are pulled back to sp(n) coordinates through right
    translation, and the rank of the resulting (4m) x dim sp(n) matrix is
    returned (singular values above sv_cutoff * max).  Expected 4m for a
    reduced word.
    """
    word = [int(r) for r in word]
    m = len(word)
    if m == 0:
        return 0
    rng = np.random.default_rng(seed)
    rank = 0
    for _ in range(max(probes, 1)):
        base = rng.normal(size=(m, 4))
        base *= (0.3 + 0.9 * rng.random((m, 1))) / np.linalg.norm(base, axis=1, keepdims=True)

        def at(flat):
            ps = [Quaternion.from_array(flat[4 * i:4 * i + 4]) for i in range(m)]
            return leaf_point(word, ps, n).matrix

        flat0 = base.reshape(-1)
        k0_inv = at(flat0).conj_transpose()  # symplectic inverse
        basis = sp_basis(n)
        cols = []
        for a in range(4 * m):
            e = np.zeros(4 * m)
            e[a] = h
            diff = (at(flat0 + e) - at(flat0 - e)).scale(1.0 / (2 * h))
            cols.append(basis.project(diff @ k0_inv))
        jac = np.stack(cols)  # (4m, dim sp(n))
        sv = np.linalg.svd(jac, compute_uv=False)
        rank = max(rank, int(np.sum(sv > sv_cutoff * sv[0])))
    return rank


def random_ru(n: int, rng: np.random.Generator) -> QMatrix:
    """Random element of RU: log-uniform positive diagonal in [0.5, 2],
    Gaussian (sigma = 0.5) strictly-upper quaternion entries."""
    g = QMatrix.zeros(n, n)
    for i in range(n):
        g.data[i, i, 0] = float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))
        for j in range(i + 1, n):
            g.data[i, j] = rng.normal(scale=0.5, size=4)
    return g


def orbit_probe(k: QMatrix, samples: int, seed: int) -> dict:
    """Dressing-orbit report: signature constancy across random RU samples.

    For n = 2 with base point in the 4-cell, also reports the worst
    reconstruction error of orbit points against the k_v chart form.
    """
    if not is_symplectic(k, tol=1e-8):
        raise ValueError("orbit_probe requires a symplectic base point")
    n = k.n_rows
    rng = np.random.default_rng(seed)
    sig0 = leaf_signature(k)
    trivial_phases = all((p - Quaternion(1)).norm() < 1e-8 for p in sig0.phases)
    max_dev = 0.0
    max_recon = None
    for _ in range(samples):
        g = random_ru(n, rng)
        k2 = dress(g, k)
        sig = leaf_signature(k2)
        max_dev = max(max_dev, sig0.deviation(sig))
        if n == 2 and sig0.w.length() == 1 and trivial_phases:
            v = south_coord(k2)
            recon = (k2 - _k_block(v)).frobenius()
            max_recon = recon if max_recon is None else max(max_recon, recon)
    report = {
        "kind": "orbit_probe",
        "n": n,
        "w": [i + 1 for i in sig0.w.one_line],
        "phase_dev": max_dev,
        "samples": samples,
        "seed": seed,
    }
    if max_recon is not None:
        report["kv_reconstruction_err"] = max_recon
    return report
