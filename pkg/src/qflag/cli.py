"""Command-line front end: decompositions, verification suites, CSV profiles.

Exit codes: 0 success, 1 usage/parse error, 2 mathematical failure
(singular input or failed assertion).  Every command is deterministic given
its input and seed; QFLAG_SEED is the only environment fallback.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from . import decomp, flags, hp1geom, liealg
from .hmat import (
    Permutation,
    QMatrix,
    SingularMatrixError,
    word_to_permutation,
)
from .quat import Quaternion

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MATH = 2

DEFAULT_TOLERANCES = {
    "schouten_identity": 1e-10,
    "lambda_vanishing": 1e-12,
    "spheroid_invariance": 1e-12,
    "profile_ratio": 1e-6,
    "direction_spread": 1e-9,
    "phase_deviation": 1e-8,
    "multiplicativity": 1e-10,
}


@dataclass
class Config:
    """Run configuration; unknown tolerance keys are rejected."""

    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    output_path: str | None = None

    @staticmethod
    def from_dict(obj: dict) -> "Config":
        cfg = Config()
        for key, val in obj.items():
            if key == "seed":
                cfg.seed = int(val)
            elif key == "output_path":
                cfg.output_path = str(val)
            elif key == "tolerances":
                for name, tol in val.items():
                    if name not in DEFAULT_TOLERANCES:
                        raise ValueError(f"unknown tolerance key: {name}")
                    cfg.tolerances[name] = float(tol)
            else:
                raise ValueError(f"unknown config key: {key}")
        return cfg


def _default_seed() -> int:
    return int(os.environ.get("QFLAG_SEED", "0"))


def _load_matrix(path: str) -> QMatrix:
    with open(path) as fh:
        return QMatrix.from_json(json.load(fh))


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(_sanitize(obj), indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    g = _load_matrix(args.input)
    if args.kind == "bruhat":
        form = decomp.bruhat(g)
        err = (form.reconstruct() - g).frobenius()
        out = form.to_json()
        out["reconstruction_error"] = err
    else:
        k, r, u = decomp.iwasawa(g)
        err = (k @ r @ u - g).frobenius()
        out = {"K": k.to_json(), "R": r.to_json(), "U": u.to_json(),
               "reconstruction_error": err}
    _emit(out, args.out)
    return EXIT_OK


def cmd_ddet(args) -> int:
    g = _load_matrix(args.input)
    _emit({"dieudonne_det": decomp.dieudonne_det(g)}, args.out)
    return EXIT_OK


def cmd_dress(args) -> int:
    g = _load_matrix(args.g)
    k = _load_matrix(args.k)
    _emit(decomp.dress(g, k).to_json(), args.out)
    return EXIT_OK


def cmd_leaf(args) -> int:
    word = [int(r) - 1 for r in args.word.split()]
    rng = np.random.default_rng(args.seed)
    params = [Quaternion.from_array(x) for x in rng.normal(size=(len(word), 4))]
    lp = flags.leaf_point(word, params, args.n)
    sig = decomp.leaf_signature(lp.matrix)
    _emit({
        "word": [r + 1 for r in word],
        "n": args.n,
        "seed": args.seed,
        "matrix": lp.matrix.to_json(),
        "signature": {"w": sig.w.to_json(),
                      "phases": [p.to_json() for p in sig.phases]},
    }, args.out)
    return EXIT_OK


def cmd_profile(args) -> int:
    if not (0 < args.rho_min < args.rho_max) or args.steps < 2:
        print("error: need 0 < rho-min < rho-max and steps >= 2", file=sys.stderr)
        return EXIT_USAGE
    rhos = np.linspace(args.rho_min, args.rho_max, args.steps)
    rows = list(hp1geom.radial_profile(rhos, args.directions, args.seed))
    fieldnames = ["rho", "direction_seed", "coeff_bruhat", "coeff_invariant",
                  "ratio", "expected_ratio", "abs_err"]
    sink = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(sink, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v
                             for k, v in row.items()})
    finally:
        if args.out:
            sink.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

def _random_multivector(n: int, grade: int, rng, nterms: int = 4) -> liealg.Multivector:
    basis = liealg.sp_basis(n)
    combos = list(combinations(range(basis.dim), grade))
    picks = rng.choice(len(combos), size=min(nterms, len(combos)), replace=False)
    return liealg.Multivector(n, grade, {combos[i]: float(rng.normal()) for i in picks})


def suite_schouten(n: int, seed: int, tol: float = 1e-10, trials: int = 25) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        p, q, r = (int(x) for x in rng.integers(1, 5, size=3))
        P = _random_multivector(n, p, rng)
        Q = _random_multivector(n, q, rng)
        R = _random_multivector(n, r, rng)
        anti = (liealg.schouten(P, Q)
                - liealg.schouten(Q, P).scale((-1.0) ** (p * q))).max_abs()
        leib = (liealg.schouten(P, Q.wedge(R))
                - liealg.schouten(P, Q).wedge(R)
                - Q.wedge(liealg.schouten(P, R)).scale((-1.0) ** (p * q + q))).max_abs()
        jac = (liealg.schouten(P, liealg.schouten(Q, R)).scale((-1.0) ** (p * (r - 1)))
               + liealg.schouten(Q, liealg.schouten(R, P)).scale((-1.0) ** (q * (p - 1)))
               + liealg.schouten(R, liealg.schouten(P, Q)).scale((-1.0) ** (r * (q - 1)))
               ).max_abs()
        worst = max(worst, anti, leib, jac)
    return {"suite": "schouten", "n": n, "seed": seed, "trials": trials,
            "max_residual": worst, "ok": worst <= tol}


def suite_lambda(n: int, seed: int, tol: float = 1e-12) -> dict:
    lam = liealg.lambda_element(n)
    br = liealg.schouten(lam, lam)
    if n == 2:
        ok = br.max_abs() <= tol
    else:
        ok = br.max_abs() > 1e-3  # genuinely nonzero for n > 2
    return {"suite": "lambda", "n": n, "seed": seed,
            "bracket_max_coeff": br.max_abs(), "ok": bool(ok)}


def suite_spheroid(n: int, seed: int, tol: float = 1e-12, trials: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    basis = liealg.sp_basis(n)
    lam = liealg.lambda_element(n)
    worst = 0.0
    for _ in range(trials):
        coeffs = {(int(i),): float(rng.normal()) for i in basis.spheroid_indices}
        x = liealg.Multivector(n, 1, coeffs)
        worst = max(worst, liealg.ad_multivector(x, lam).max_abs())
    return {"suite": "spheroid", "n": n, "seed": seed, "trials": trials,
            "max_residual": worst, "ok": worst <= tol}


def suite_hp1(n: int, seed: int, tol: float = 1e-6) -> dict:
    rhos = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0]
    rows = list(hp1geom.radial_profile(rhos, directions=5, seed=seed))
    worst = max(row["abs_err"] / row["expected_ratio"] for row in rows)
    north = abs(hp1geom.bruhat_field(hp1geom.ChartPoint.north(Quaternion())).coeff)
    ok = worst <= tol and north <= 1e-10
    return {"suite": "hp1", "n": 2, "seed": seed, "max_rel_err": worst,
            "north_coeff": north, "ok": bool(ok)}


def suite_leaves(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    checked = []
    ok = True
    for word in _reduced_words(n):
        w = len(word)
        params = [Quaternion.from_array(x)
                  for x in rng.normal(size=(w, 4)) * 0.7]
        lp = flags.leaf_point(word, params, n)
        cell = flags.cell_of(lp.matrix)
        good = cell == word_to_permutation(word, n)
        ok = ok and good
        checked.append({"word": [r + 1 for r in word], "cell_ok": good})
    return {"suite": "leaves", "n": n, "seed": seed, "words": checked, "ok": ok}


def _reduced_words(n: int):
    for perm in permutations(range(n)):
        yield Permutation(perm).reduced_word()


def suite_dressing(n: int, seed: int, tol: float = 1e-8, samples: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    w = Permutation.longest(n)
    sigma = [Quaternion.from_array(x) for x in rng.normal(size=(n, 4))]
    sigma = [q * (1.0 / q.norm()) for q in sigma]
    k = QMatrix.diag(sigma) @ w.matrix()
    report = flags.orbit_probe(k, samples=samples, seed=seed + 1)
    report.update({"suite": "dressing", "ok": report["phase_dev"] <= tol})
    return report


SUITES = {
    "schouten": suite_schouten,
    "lambda": suite_lambda,
    "spheroid": suite_spheroid,
    "hp1": suite_hp1,
    "leaves": suite_leaves,
    "dressing": suite_dressing,
}


def cmd_verify(args) -> int:
    fn = SUITES[args.suite]
    report = fn(args.n, args.seed)
    _emit(report, args.out)
    return EXIT_OK if report["ok"] else EXIT_MATH


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qflag",
        description="Quaternionic Bruhat decompositions and 4-vector-field checks",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="strict Bruhat or Iwasawa decomposition")
    p.add_argument("kind", choices=["bruhat", "iwasawa"])
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("ddet", help="Dieudonne determinant")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_ddet)

    p = sub.add_parser("dress", help="dressing action of an RU element")
    p.add_argument("--g", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_dress)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("profile", help="emit the HP^1 radial-profile CSV")
    p.add_argument("--rho-min", type=float, required=True)
    p.add_argument("--rho-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--directions", type=int, default=1)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("leaf", help="sample a leaf point for a reduced word")
    p.add_argument("--word", required=True, help="1-based positions, e.g. '1 2 1'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out")
    p.set_defaults(fn=cmd_leaf)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (json.JSONDecodeError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, SingularMatrixError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MATH
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
