#!/usr/bin/env python3
"""Independent oracle for the Z_p-invariant spectra of L(p,1) = S^3/Z_p.

The generator acts on C^2 = R^4 by (z1, z2) -> (w z1, w z2), w = exp(2 pi i/p).
Invariant multiplicities are ranks of the group-averaging projector acting on
explicit bases: harmonic polynomials of degree k (functions, eigenvalue
k(k+2)) and the constrained vector fields of coclosed_sphere_oracle.py
(coclosed 1-forms, eigenvalue (k+1)^2).

Usage: lens_oracle.py OUT.json
"""
import json
import math
import sys

import numpy as np
import sympy as sp

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from coclosed_sphere_oracle import field_space, monomials  # noqa: E402


def rotation(p):
    c, s = math.cos(2 * math.pi / p), math.sin(2 * math.pi / p)
    # coordinates (x1, y1, x2, y2), z_j = x_j + i y_j
    R = np.zeros((4, 4))
    for b in (0, 2):
        R[b, b], R[b, b + 1], R[b + 1, b], R[b + 1, b + 1] = c, -s, s, c
    return R


def coeff_vector(exprs, xs, deg):
    mons = monomials(len(xs), deg)
    out = []
    for e in exprs:
        poly = sp.Poly(sp.expand(e), *xs)
        d = dict(poly.terms())
        out += [float(d.get(mo, 0)) for mo in mons]
    return np.array(out)


def invariant_dim(basis_exprs, xs, deg, p, vector):
    R = rotation(p)
    Rinv = R.T
    B = np.array([coeff_vector(b, xs, deg) for b in basis_exprs]).T
    proj = np.zeros((B.shape[1], B.shape[1]))
    for j in range(p):
        Rj = np.linalg.matrix_power(R, j)
        Rji = np.linalg.matrix_power(Rinv, j)
        sub = {xs[a]: sum(Rji[a, b] * xs[b] for b in range(4)) for a in range(4)}
        images = []
        for b in basis_exprs:
            pulled = [sp.expand(c.xreplace(sub)) for c in b]
            if vector:
                pulled = [sum(Rj[a, b2] * pulled[b2] for b2 in range(4)) for a in range(4)]
            images.append(coeff_vector(pulled, xs, deg))
        Img = np.array(images).T
        coords, *_ = np.linalg.lstsq(B, Img, rcond=None)
        proj += coords / p
    return int(round(np.trace(proj)))


def harmonic_basis(k):
    xs = sp.symbols("x0:4")
    mons = monomials(4, k)
    cs = sp.symbols(f"c0:{len(mons)}")
    f = sum(c * sp.prod([xs[a] ** e[a] for a in range(4)]) for c, e in zip(cs, mons))
    lap = sp.expand(sum(sp.diff(f, x, 2) for x in xs))
    eqs = sp.Poly(lap, *xs).coeffs() if lap != 0 else []
    if eqs:
        A = sp.Matrix([[sp.diff(e, c) for c in cs] for e in eqs])
        null = A.nullspace()
    else:
        null = [sp.Matrix([1 if i == j else 0 for i in range(len(cs))]) for j in range(len(cs))]
    return [[f.subs(dict(zip(cs, list(v))))] for v in null], xs


def main():
    out = []
    for p in (1, 2, 3, 4):
        for k in range(0, 5):
            basis, xs = harmonic_basis(k)
            d = invariant_dim(basis, xs, k, p, vector=False)
            out.append({"p": p, "family": "function", "k": k, "eigenvalue": k * (k + 2), "multiplicity": d})
            print(p, "function", k, d, flush=True)
        for k in range(1, 4):
            basis, xs = field_space(3, k)
            d = invariant_dim(basis, xs, k, p, vector=True)
            out.append({"p": p, "family": "coclosed", "k": k, "eigenvalue": (k + 1) ** 2, "multiplicity": d})
            print(p, "coclosed", k, d, flush=True)
    with open(sys.argv[1], "w") as fh:
        json.dump({"source": "lens_oracle.py", "version": 1, "entries": out}, fh, indent=1)


if __name__ == "__main__":
    main()
