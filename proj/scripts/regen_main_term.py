#!/usr/bin/env python3
"""Regenerate the d3 main-term coefficients embedded in src/error_term.cpp.

Res_{s=1} zeta(s)^3 x^s / s = x (c2 L^2 + c1 L + c0), L = log x, from the
Laurent expansion zeta(s) = 1/(s-1) + gamma_0 - gamma_1 (s-1) + ...
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 40
w, L, g0, g1 = sp.symbols("w L g0 g1")
zeta = 1 / w + g0 - g1 * w
expr = sp.series(zeta**3 * sp.exp(w * L) / (1 + w), w, 0, 1).removeO()
residue = sp.expand(expr.coeff(w, -1))
poly = sp.Poly(residue, L)
values = {g0: sp.Float(str(mp.euler), 40), g1: sp.Float(str(mp.stieltjes(1)), 40)}
print("residue polynomial:", residue)
for name, power in (("c2", 2), ("c1", 1), ("c0", 0)):
    coeff = poly.coeff_monomial(L**power)
    print(f"{name} = {sp.N(coeff.subs(values), 30)}")
