#!/usr/bin/env python3
"""Independent oracle for coclosed 1-form eigendata on round spheres S^m.

Eigenspaces are realised as restrictions of polynomial vector fields V on
R^{m+1} whose components are harmonic of degree k, with div V = 0 and
x . V = 0. The multiplicity is the dimension of that space (exact rank over
the rationals). The eigenvalue is obtained by applying the Hodge Laplacian
d delta + delta d of the round metric, written in stereographic coordinates,
to one such form at a rational sample point, with exact arithmetic.

Usage: coclosed_sphere_oracle.py OUT.json
"""
import itertools
import json
import random
import sys

import sympy as sp


def monomials(nvars, deg):
    out = []
    for c in itertools.combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    return out


def field_space(m, k):
    """Return (basis of the constrained vector-field space, symbols)."""
    n = m + 1
    xs = sp.symbols(f"x0:{n}")
    mons = monomials(n, k)
    unknowns = sp.symbols(f"c0:{n * len(mons)}")
    comps = []
    for i in range(n):
        comps.append(sum(unknowns[i * len(mons) + j] * sp.prod([xs[a] ** e[a] for a in range(n)])
                         for j, e in enumerate(mons)))
    eqs = []
    for c in comps:
        lap = sum(sp.diff(c, xa, 2) for xa in xs)
        eqs += sp.Poly(lap, *xs).coeffs() if lap != 0 else []
    div = sum(sp.diff(comps[i], xs[i]) for i in range(n))
    if div != 0:
        eqs += sp.Poly(div, *xs).coeffs()
    tang = sp.expand(sum(xs[i] * comps[i] for i in range(n)))
    if tang != 0:
        eqs += sp.Poly(tang, *xs).coeffs()
    A = sp.Matrix([[sp.diff(e, u) for u in unknowns] for e in eqs])
    null = A.nullspace()
    basis = [[c.subs(dict(zip(unknowns, list(v)))) for c in comps] for v in null]
    return basis, xs


def hodge_eigenvalue(m, V, xs, rng):
    ys = sp.symbols(f"y0:{m}")
    q = sum(y * y for y in ys)
    embed = [2 * y / (1 + q) for y in ys] + [(q - 1) / (1 + q)]
    sub = dict(zip(xs, embed))
    Vy = [sp.together(c.subs(sub)) for c in V]
    eta = [sp.together(sum(Vy[i] * sp.diff(embed[i], ys[a]) for i in range(m + 1))) for a in range(m)]
    phi2 = 4 / (1 + q) ** 2
    sigma = [sp.diff(sp.log(2 / (1 + q)), y) for y in ys]
    ginv = 1 / phi2

    def gamma(c, a, b):
        return (sigma[b] if c == a else 0) + (sigma[a] if c == b else 0) - (sigma[c] if a == b else 0)

    codiff = -ginv * sum(sp.diff(eta[a], ys[a]) - sum(gamma(c, a, a) * eta[c] for c in range(m))
                         for a in range(m))
    beta = [[sp.diff(eta[b], ys[a]) - sp.diff(eta[a], ys[b]) for b in range(m)] for a in range(m)]
    lap = []
    for b in range(m):
        dd = sp.diff(codiff, ys[b])
        db = 0
        for a in range(m):
            t = sp.diff(beta[a][b], ys[a])
            t -= sum(gamma(d, a, a) * beta[d][b] for d in range(m))
            t -= sum(gamma(d, a, b) * beta[a][d] for d in range(m))
            db += t
        lap.append(dd - ginv * db)
    pt = {y: sp.Rational(rng.randint(-9, 9), rng.randint(5, 13)) for y in ys}
    ratios = set()
    for b in range(m):
        e = sp.nsimplify(eta[b].subs(pt))
        if e == 0:
            continue
        ratios.add(sp.nsimplify(sp.simplify(lap[b].subs(pt) / e)))
    if len(ratios) != 1:
        raise RuntimeError(f"inconsistent eigenvalue ratios {ratios}")
    return ratios.pop()


def main():
    out_path = sys.argv[1]
    rng = random.Random(20240611)
    direct = []
    cases = [(3, k) for k in (1, 2, 3)] + [(4, k) for k in (1, 2)] + [(5, 1), (5, 2), (6, 1), (7, 1)]
    for m, k in cases:
        basis, xs = field_space(m, k)
        lam = hodge_eigenvalue(m, basis[0], xs, rng)
        direct.append({"m": m, "k": k, "eigenvalue": int(lam), "multiplicity": len(basis)})
        print(f"S^{m} k={k}: eigenvalue {lam} multiplicity {len(basis)}", flush=True)
    with open(out_path, "w") as fh:
        json.dump({"source": "coclosed_sphere_oracle.py", "version": 1, "entries": direct}, fh, indent=1)


if __name__ == "__main__":
    main()
