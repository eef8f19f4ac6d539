#!/usr/bin/env python3
"""Independent symbolic oracle for boundary-integral masses.

For a metric g on R^N that is invariant under a group acting transitively on
the spheres |x| = r (SO(N) or U(n)), the flux density
    sum_i (d_j g_ij - d_i g_jj) x_i / r
is constant on each sphere. The normalized mass is therefore
    lim_{r -> oo} density(r e_1) * r^{N-1} / (2 (N-1))
(times Vol(S^{N-1}) / Vol(S^{N-1}) from the 1 / (2 (N-1) Vol) constant).
The limit is taken symbolically with sympy. Kahler metrics come from radial
potentials u(t), t = |z|^2, with omega = i d dbar u.

Usage: boundary_mass_oracle.py OUT.json
"""
import json
import sys

import sympy as sp


def adm_mass(g, xs):
    N = len(xs)
    r = sp.symbols("r", positive=True)
    flux = 0
    for i in range(N):
        t = 0
        for j in range(N):
            t += sp.diff(g[i, j], xs[j]) - sp.diff(g[j, j], xs[i])
        flux += t * xs[i]
    at = {xs[0]: r, **{x: 0 for x in xs[1:]}}
    density = sp.simplify(flux.subs(at) / r)
    return sp.simplify(sp.limit(density * r ** (N - 1) / (2 * (N - 1)), r, sp.oo))


def kahler_metric(n, u, tsym):
    xs = sp.symbols(f"x0:{2 * n}", real=True)
    t = sum(x ** 2 for x in xs)
    ut = sp.diff(u, tsym).subs(tsym, t)
    utt = sp.diff(u, tsym, 2).subs(tsym, t)
    z = [xs[2 * a] + sp.I * xs[2 * a + 1] for a in range(n)]
    g = sp.zeros(2 * n, 2 * n)
    for a in range(n):
        for b in range(n):
            H = 2 * (ut * (1 if a == b else 0) + utt * sp.conjugate(z[a]) * z[b])
            re, im = sp.re(sp.expand(H)), sp.im(sp.expand(H))
            g[2 * a, 2 * b] = re
            g[2 * a + 1, 2 * b + 1] = re
            g[2 * a, 2 * b + 1] = im
            g[2 * a + 1, 2 * b] = -im
    return g, xs


def schwarzschild(N, m):
    xs = sp.symbols(f"x0:{N}", real=True)
    r2 = sum(x ** 2 for x in xs)
    r = sp.sqrt(r2)
    f = 1 / (1 - 2 * m * r ** (2 - N)) - 1
    g = sp.Matrix(N, N, lambda i, j: (1 if i == j else 0) + f * xs[i] * xs[j] / r2)
    return g, xs


def main(out):
    c, m, a = sp.symbols("c m a", positive=True)
    t = sp.symbols("t", positive=True)
    entries = []

    def add(family, params, expr, value_at):
        entries.append({"family": family, "params": params, "mass": str(expr),
                        "value": float(expr.subs(value_at))})

    for N in (3, 4):
        g, xs = schwarzschild(N, m)
        add("schwarzschild", {"N": N, "m": 1.0}, adm_mass(g, xs), {m: 1})
    g, xs = kahler_metric(2, t / 2 + c / 2 * sp.log(t), t)
    add("burns", {"c": 1.0}, adm_mass(g, xs), {c: 1})
    g, xs = kahler_metric(3, t / 2 + c * t ** -1, t)
    add("potential", {"n": 3, "c": 1.0}, adm_mass(g, xs), {c: 1})
    g, xs = kahler_metric(2, (sp.sqrt(t ** 2 + a ** 4) + a ** 2 * sp.log(t / (sp.sqrt(t ** 2 + a ** 4) + a ** 2))) / 2, t)
    add("eguchi-hanson", {"a": 1.0}, adm_mass(g, xs), {a: 1})
    with open(out, "w") as f:
        json.dump({"source": "boundary_mass_oracle.py", "version": 1, "entries": entries}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
