"""Local characters and symbols: the canonical additive character, Legendre
and Hilbert symbols (closed formula vs brute-force oracle), the Weil constant
from its defining relation, and the genuine character chi_psi.

Run:  python demos/02_characters_and_symbols.py
"""

from fractions import Fraction

from metaplectic import (
    AdditiveCharacter,
    MultChar,
    PadicContext,
    chi_psi,
    hilbert_symbol,
    hilbert_symbol_oracle,
    weil_alpha,
)

ctx = PadicContext(3)
psi = AdditiveCharacter(ctx)

print("== psi(a) = e(2 pi i [a]) ==")
for a in (Fraction(2), Fraction(1, 3), Fraction(14, 45)):
    print(f"psi({a}) = {psi.value(a)!r}")
print("psi is trivial on Z_3 and faithful on 3-power torsion")

print("\n== Hilbert symbol: closed formula against the solvability oracle ==")
for a, b in ((3, 3), (3, 2), (2, -2), (6, Fraction(1, 3))):
    ka, kb = ctx.elem(a), ctx.elem(b)
    closed = hilbert_symbol(ka, kb)
    oracle = hilbert_symbol_oracle(ka, kb)
    print(f"({a}, {b}) = {closed:+d}   oracle {oracle:+d}   agree: {closed == oracle}")

print("\n== Weil constant from the quadratic Fourier identity ==")
for a in (1, 2, 3, Fraction(1, 3)):
    alpha = weil_alpha(ctx.elem(a))
    print(f"alpha({a}) = {alpha!r}  ~ {alpha.to_complex():.4f}, |alpha| = "
          f"{(alpha * alpha.conjugate())!r}")

print("\n== chi_psi(a) = alpha(1)/alpha(a) ==")
for a in (1, 4, 3, 6):
    print(f"chi_psi({a}) = {chi_psi(ctx.elem(a))!r}")
a, b = ctx.elem(3), ctx.elem(2)
lhs = chi_psi(ctx.elem(6))
rhs = chi_psi(a) * chi_psi(b) * hilbert_symbol(a, b)
print("twisted multiplicativity chi(ab) = chi(a) chi(b) (a,b):", lhs == rhs)

print("\n== multiplicative characters ==")
mu = MultChar(ctx, 1, Fraction(0), 1)
print("the quadratic character mod 3:", [f"mu({u}) = {mu.value(u)!r}" for u in (1, 2, 4)])
print("mu(-1) =", mu.value(-1), " -- this breaks the zeta parity condition, see demo 05")
