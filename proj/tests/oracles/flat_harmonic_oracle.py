#!/usr/bin/env python3
"""Independent oracle for homogeneous harmonic 1-forms on flat R^N minus 0.

In Cartesian coordinates the Hodge Laplacian acts componentwise, so a
homogeneous harmonic 1-form of pointwise order d has harmonic homogeneous
components of degree d. For d >= 0 these are harmonic polynomials; for
d <= 2 - N they are Kelvin transforms |x|^{2-N-2D} P of harmonic polynomials
of degree D = 2 - N - d; no other orders occur. The dimension of harmonic
polynomials of degree D is the nullity of the Laplacian from degree D to
degree D - 2, computed here by exact sympy rank.

Usage: flat_harmonic_oracle.py OUT.json
"""
import itertools
import json
import sys

import sympy as sp


def harmonic_dim(N, D):
    if D < 0:
        return 0
    xs = sp.symbols(f"x0:{N}")
    mons = []
    for c in itertools.combinations_with_replacement(range(N), D):
        e = [0] * N
        for i in c:
            e[i] += 1
        mons.append(sp.prod([xs[a] ** e[a] for a in range(N)]))
    if D < 2:
        return len(mons)
    images = [sp.Poly(sum(sp.diff(mo, x, 2) for x in xs), *xs) for mo in mons]
    keys = sorted({k for p in images for k in p.as_dict()})
    M = sp.Matrix([[p.as_dict().get(k, 0) for p in images] for k in keys])
    return len(mons) - M.rank()


def main(out):
    entries = []
    for n in (2, 3):
        N = 2 * n
        for d in range(-2 * n + 1, 0):
            if d >= 0:
                D = d
            elif d <= 2 - N:
                D = 2 - N - d
            else:
                D = -1
            entries.append({"n_complex": n, "order": d, "count": N * harmonic_dim(N, D)})
    with open(out, "w") as f:
        json.dump({"source": "flat_harmonic_oracle.py", "version": 1, "entries": entries}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
