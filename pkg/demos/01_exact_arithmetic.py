"""Exact scalars: p-adic rationals, cyclotomic values with a formal sqrt(q),
and Laurent polynomials in q^{+-s}.

Run:  python demos/01_exact_arithmetic.py
"""

from fractions import Fraction

from metaplectic import CycValue, LaurentPoly, PadicContext, Q_NEG_S, S_TO_ONE_MINUS_S

ctx = PadicContext(3)

print("== the field Q_3 through exact rationals ==")
x = ctx.elem(Fraction(45, 7))
print(f"x = {x.value}: valuation {x.valuation()}, unit part {x.unit_part()}, |x| = {x.abs_value()}")
y = ctx.elem(Fraction(5, 27))
print(f"y = {y.value}: valuation {y.valuation()}  (5/27 = 5 * 3^-3)")

print("\n== cyclotomic values ==")
zeta3 = ctx.cyc_e(Fraction(1, 3))
print("zeta_3 + zeta_3^2 =", zeta3 + zeta3 * zeta3, " (canonical form decides zero exactly)")

s = ctx.sqrtq()
print("sqrt(q) * sqrt(q) =", s * s, " (the defining relation, kept formal)")

gauss = CycValue.sum([ctx.cyc_e(Fraction(k * k, 3)) for k in range(3)], 3)
print("quadratic Gauss sum g =", gauss)
print("g^2 =", gauss * gauss, " -- the classical identity g^2 = -3 as a cross-check,")
print("so sqrt(3) lives in Q(zeta_12); the engine still keeps sqrt(q) as a symbol")

print("\n== Laurent polynomials in q^{-s} ==")
P = LaurentPoly(3, Q_NEG_S, {0: ctx.cyc(Fraction(4, 3)), 1: gauss})
print("P =", P)
Q = P.substitute(S_TO_ONE_MINUS_S)
print("P(1-s) =", Q)
print("double substitution returns P:", Q.substitute(S_TO_ONE_MINUS_S) == P)
