#!/usr/bin/env python3
"""Regenerate the test fixtures under crates/core/tests/data.

Written independently of the Rust code: the counterexample matrices are typed
from the z-vector tables, and spectral statistics are computed with a plain
cyclic Jacobi solver plus brute-force definitions. numpy is used only to
cross-check eigenvalues.
"""
import json
import math
import random
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "data"

Z = {"z0": (1.0, 1.0), "z1": (-1.0, 1.0), "z2": (1.0, -1.0), "z3": (-1.0, -1.0), "0": (0.0, 0.0)}

U_T = [
    "z0 z1 z2 z3 0 0 0 0 z0 z1 z2 z3",
    "z0 z1 z2 z3 z0 z1 z2 z3 0 0 0 0",
    "0 0 0 0 z0 z1 z3 z2 z0 z2 z1 z3",
]
V_T = [
    "z0 z1 z2 z3 0 0 0 0 z0 z1 z2 z3",
    "z0 z1 z2 z3 z0 z1 z2 z3 0 0 0 0",
    "0 0 0 0 z1 z0 z2 z3 z2 z0 z3 z1",
]


def block_matrix(rows_t):
    """n x 6 matrix from three bands of twelve 2-vectors."""
    bands = [r.split() for r in rows_t]
    return [[Z[bands[b][i]][c] for b in range(3) for c in range(2)] for i in range(12)]


def dump(obj):
    return json.dumps(obj, separators=(",", ":")) + "\n"


def spectral_pair_json(v, lambdas):
    return dump({"n": len(v), "k": len(lambdas), "lambdas": lambdas, "V": v})


# --- graphs -----------------------------------------------------------------


def path(n):
    return n, [(i, i + 1) for i in range(n - 1)]


def cycle(n):
    return n, [(i, (i + 1) % n) for i in range(n)]


def complete(n):
    return n, [(i, j) for i in range(n) for j in range(i + 1, n)]


def star(leaves):
    return leaves + 1, [(0, i) for i in range(1, leaves + 1)]


def gnp(n, p, seed):
    rng = random.Random(seed)
    return n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


SMOKE = [
    ("01_path3", path(3)),
    ("02_path4", path(4)),
    ("03_path5", path(5)),
    ("04_cycle5", cycle(5)),
    ("05_cycle6", cycle(6)),
    ("06_k4", complete(4)),
    ("07_star3", star(3)),
    ("08_star5", star(5)),
    ("09_random7", gnp(7, 0.4, 11)),
    ("10_random9", gnp(9, 0.35, 29)),
]


def laplacian(n, edges):
    m = [[0.0] * n for _ in range(n)]
    for u, v in edges:
        m[u][v] -= 1.0
        m[v][u] -= 1.0
        m[u][u] += 1.0
        m[v][v] += 1.0
    return m


# --- eigensolver ------------------------------------------------------------


def jacobi(a):
    """Cyclic Jacobi, pairs visited row by row; returns (lambdas desc, columns)."""
    n = len(a)
    a = [row[:] for row in a]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    frob = math.sqrt(sum(x * x for row in a for x in row))
    threshold = 1e-12 * max(frob, 1.0)

    def off():
        s = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                s += 2.0 * a[p][q] * a[p][q]
        return math.sqrt(s)

    for _ in range(100):
        if off() <= threshold:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k in (p, q):
                        continue
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = a[p][k] = c * akp - s * akq
                    a[k][q] = a[q][k] = s * akp + c * akq
                a[p][p] -= t * apq
                a[q][q] += t * apq
                a[p][q] = a[q][p] = 0.0
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
    else:
        raise RuntimeError("no convergence")
    diag = [a[i][i] for i in range(n)]
    order = sorted(range(n), key=lambda i: -diag[i])
    return [diag[i] for i in order], [[v[r][i] for i in order] for r in range(n)]


def multiplicities(lambdas, tol):
    groups = []
    for i, lam in enumerate(lambdas):
        if groups and lambdas[i - 1] - lam <= tol:
            groups[-1] += 1
        else:
            groups.append(1)
    return groups


def graph_stats(n, edges, eig_tol=1e-4, zero_tol=1e-6):
    lap = laplacian(n, edges)
    lambdas, vecs = jacobi(lap)
    reference = sorted(np.linalg.eigvalsh(np.array(lap)), reverse=True)
    assert max(abs(x - y) for x, y in zip(lambdas, reference)) < 1e-9
    mult = multiplicities(lambdas, eig_tol)
    zero = [[abs(vecs[i][c]) <= zero_tol for c in range(n)] for i in range(n)]
    num_zeros = sum(sum(r) for r in zero)
    full_row = any(not any(r) for r in zero)
    le_one = all(sum(zero[i][c] for i in range(n)) <= 1 for c in range(n))
    lt = num_zeros < n
    return {
        "n": n,
        "has_distinct": all(m == 1 for m in mult),
        "has_mult2": mult.count(2) > 0,
        "has_mult3": mult.count(3) > 0,
        "count_mult2": mult.count(2),
        "count_mult3": mult.count(3),
        "num_zeros": num_zeros,
        "ratio_zeros": num_zeros / n,
        "has_full_row": full_row,
        "le_one_zero_per_vec": le_one,
        "zeros_lt_vertices": lt,
        "any_condition": full_row or le_one or lt,
    }


def report(stats):
    total = len(stats)

    def share(key):
        count = sum(1 for s in stats if s[key])
        return {"pct": 100.0 * count / total, "count": count}

    def mean(key):
        return sum(float(s[key]) for s in stats) / total

    return {
        "graph_count": total,
        "distinct": share("has_distinct"),
        "mult2": share("has_mult2"),
        "mult3": share("has_mult3"),
        "avg_count_mult2": mean("count_mult2"),
        "avg_count_mult3": mean("count_mult3"),
        "avg_ratio_zeros": mean("ratio_zeros"),
        "avg_num_zeros": mean("num_zeros"),
        "full_row": share("has_full_row"),
        "le_one_zero_per_vec": share("le_one_zero_per_vec"),
        "zeros_lt_vertices": share("zeros_lt_vertices"),
        "any_condition": share("any_condition"),
    }


def main():
    lambdas = [6.0, 5.0, 4.0, 3.0, 2.0, 1.0]
    (DATA / "epnn_U.json").write_text(spectral_pair_json(block_matrix(U_T), lambdas))
    (DATA / "epnn_V.json").write_text(spectral_pair_json(block_matrix(V_T), lambdas))

    per_graph = []
    for name, (n, edges) in SMOKE:
        lines = [f"n={n}"] + [f"{u} {v}" for u, v in edges]
        (DATA / "smoke" / f"{name}.txt").write_text("\n".join(lines) + "\n")
        per_graph.append({"name": name, **graph_stats(n, edges)})
    golden = {"report": report(per_graph), "per_graph": per_graph}
    (DATA / "smoke_report.json").write_text(json.dumps(golden, indent=2) + "\n")


if __name__ == "__main__":
    main()
