"""Characters of Q_p and its multiplicative group, local symbols, and the
Weil constant.

The additive character is fixed to psi(a) = e(2*pi*i*[a]) with [a] the
p-power-denominator fractional part, so psi is trivial on Z_p and nontrivial
on p^{-1}Z_p.  The Hilbert symbol ships both a closed formula (odd p) and a
brute-force solvability oracle; the oracle is authoritative in tests.  The
Weil constant alpha(a) is computed from its defining quadratic Fourier
identity rather than a table of cases, which pins the factor-2 Fourier
convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactnum import (
    CycValue,
    KElement,
    PadicContext,
    frac_unit_part,
    frac_valuation,
    p_fractional_part,
    q_half_power,
)


@dataclass(frozen=True)
class AdditiveCharacter:
    """psi^xi(a) = psi(xi * a); the canonical psi is scale = 1."""

    ctx: PadicContext
    scale: Fraction = Fraction(1)

    def twist(self, xi) -> "AdditiveCharacter":
        xi = xi.value if isinstance(xi, KElement) else Fraction(xi)
        return AdditiveCharacter(self.ctx, self.scale * xi)

    def value(self, a) -> CycValue:
        a = a.value if isinstance(a, KElement) else Fraction(a)
        return CycValue.root_of_unity(self.ctx.q, p_fractional_part(self.scale * a, self.ctx.p))

    def value_frac(self, a: Fraction) -> Fraction:
        """Just the exponent [scale * a]; the value is e() of it."""
        return p_fractional_part(self.scale * a, self.ctx.p)


def _as_frac(x) -> Fraction:
    return x.value if isinstance(x, KElement) else Fraction(x)


@lru_cache(maxsize=None)
def legendre_frac(p: int, u: Fraction) -> int:
    if frac_valuation(u, p) != 0:
        raise ValueError(f"legendre symbol needs a p-adic unit, got valuation {frac_valuation(u, p)}")
    r = u.numerator * pow(u.denominator, -1, p) % p
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def legendre(u: KElement) -> int:
    """+1 iff the unit u reduces to a nonzero square mod p."""
    return legendre_frac(u.ctx.p, u.value)


@lru_cache(maxsize=None)
def hilbert_frac(p: int, a: Fraction, b: Fraction) -> int:
    """Closed formula for the Hilbert symbol over Q_p, p odd."""
    if a == 0 or b == 0:
        raise ZeroDivisionError("Hilbert symbol of zero")
    va = frac_valuation(a, p)
    vb = frac_valuation(b, p)
    sign = 1
    if va % 2 and vb % 2:
        sign *= legendre_frac(p, Fraction(-1))
    if vb % 2:
        sign *= legendre_frac(p, frac_unit_part(a, p))
    if va % 2:
        sign *= legendre_frac(p, frac_unit_part(b, p))
    return sign


def hilbert_symbol(a: KElement, b: KElement) -> int:
    """(a, b) = +1 iff a = x^2 - b*y^2 is solvable over Q_p."""
    return hilbert_frac(a.ctx.p, a.value, b.value)


@lru_cache(maxsize=None)
def _sqrt_table(modulus: int):
    table: dict = {}
    for z in range(modulus):
        table.setdefault(z * z % modulus, z)
    return table


def _int_valuation_capped(n: int, p: int, cap: int) -> int:
    v = 0
    while v < cap and n % p == 0:
        n //= p
        v += 1
    return v


def hilbert_symbol_oracle(a: KElement, b: KElement) -> int:
    """Brute-force Hilbert symbol: solvability of z^2 = a x^2 + b y^2, which
    for b nonsquare is equivalent to a being a norm from Q_p(sqrt b), i.e. to
    a = x^2 - b y^2.  Scans residues mod p^3 and certifies each candidate
    solution by a Hensel-lift validity check."""
    p = a.ctx.p
    k = 3
    modulus = p**k

    def normalize(x: Fraction) -> int:
        v = frac_valuation(x, p)
        u = frac_unit_part(x, p)
        ui = u.numerator * pow(u.denominator, -1, modulus * p) % (modulus * p)
        return p ** (int(v) % 2) * ui % (modulus * p) or modulus * p  # nonzero residue

    a0 = normalize(_as_frac_nonzero(a))
    b0 = normalize(_as_frac_nonzero(b))
    sqrts = _sqrt_table(modulus)
    for x in range(modulus):
        ax2 = a0 * x * x
        for y in range(modulus):
            t = (ax2 + b0 * y * y) % modulus
            z = sqrts.get(t)
            if z is None:
                continue
            e = min(
                _int_valuation_capped(2 * a0 * x % modulus or modulus, p, k),
                _int_valuation_capped(2 * b0 * y % modulus or modulus, p, k),
                _int_valuation_capped(2 * z % modulus or modulus, p, k),
            )
            if 2 * e + 1 <= k:
                return 1
    return -1


def _as_frac_nonzero(x) -> Fraction:
    f = _as_frac(x)
    if f == 0:
        raise ZeroDivisionError("Hilbert symbol of zero")
    return f


def square_class_data(x: KElement):
    """(valuation parity, Legendre of the unit part); classifies x modulo
    squares of Q_p^x for odd p."""
    if x.value == 0:
        raise ZeroDivisionError("0 has no square class")
    v = x.valuation()
    return (int(v) % 2, legendre_frac(x.ctx.p, x.unit_part()))


@lru_cache(maxsize=None)
def _smallest_nonresidue(p: int) -> int:
    for u in range(2, p):
        if pow(u, (p - 1) // 2, p) != 1:
            return u
    raise ArithmeticError("no quadratic nonresidue found")


def square_class_representative(ctx: PadicContext, data) -> KElement:
    parity, leg = data
    u = 1 if leg == 1 else _smallest_nonresidue(ctx.p)
    return ctx.elem(Fraction(u * ctx.p**parity))


def _gauss_ball_integral(ctx: PadicContext, coeff: Fraction, level: int) -> CycValue:
    """Exact value of the integral over Z_p of psi(coeff * x^2) dx at sampling
    level `level` (valid once the integrand is constant on cosets of p^level)."""
    p = ctx.p
    pl = p**level
    vals = [CycValue.root_of_unity(ctx.q, p_fractional_part(coeff * x * x, p)) for x in range(pl)]
    return CycValue.sum(vals, ctx.q) * Fraction(1, pl)


_ALPHA_CACHE: dict = {}


def weil_alpha(a: KElement) -> CycValue:
    """The Weil constant alpha(a), from the defining relation

        int Phihat(x) psi(a x^2) dx = |a|^{-1/2} alpha(a) int Phi(x) psi(-x^2/a) dx

    with Phi the indicator of Z_p and Phihat(y) = int Phi(x) psi(-2xy) dx,
    so Phihat = Phi for odd p.  Both sides are exact finite character sums."""
    ctx = a.ctx
    if a.value == 0:
        raise ZeroDivisionError("alpha(0) is undefined")
    key = (ctx.p, a.value)
    hit = _ALPHA_CACHE.get(key)
    if hit is not None:
        return hit
    v = int(a.valuation())
    lhs_level = max(0, -v) + 1
    rhs_level = max(0, v) + 1
    lhs = _gauss_ball_integral(ctx, a.value, lhs_level)
    if lhs != _gauss_ball_integral(ctx, a.value, lhs_level + 1):
        raise ArithmeticError("left Weil integral not stable under refinement")
    inv = -1 / a.value
    rhs = _gauss_ball_integral(ctx, inv, rhs_level)
    if rhs != _gauss_ball_integral(ctx, inv, rhs_level + 1):
        raise ArithmeticError("right Weil integral not stable under refinement")
    if rhs.is_zero():
        rhs_level += 1
        rhs = _gauss_ball_integral(ctx, inv, rhs_level)
        if rhs.is_zero():
            raise ArithmeticError("right Weil integral vanished; it is provably nonzero for odd p")
    value = q_half_power(ctx.q, -v) * lhs * rhs.inverse()
    _ALPHA_CACHE[key] = value
    return value


_CHI_CACHE: dict = {}


def chi_psi(a: KElement) -> CycValue:
    """chi_psi(a) = alpha(1)/alpha(a).  Constant on square classes (tested),
    so the value is computed once per class at a canonical representative."""
    ctx = a.ctx
    if a.value == 0:
        raise ZeroDivisionError("chi_psi(0) is undefined")
    cls = square_class_data(a)
    key = (ctx.p, cls)
    hit = _CHI_CACHE.get(key)
    if hit is not None:
        return hit
    rep = square_class_representative(ctx, cls)
    value = weil_alpha(ctx.elem(1)) * weil_alpha(rep).inverse()
    _CHI_CACHE[key] = value
    return value


@lru_cache(maxsize=None)
def _primitive_root(p: int, m: int) -> int:
    """Smallest primitive root of (Z/p^m)^x, p odd."""
    order_p = p - 1

    def is_root_mod_p(g: int) -> bool:
        return all(pow(g, d, p) != 1 for d in range(1, order_p) if order_p % d == 0)

    g = 2
    while not is_root_mod_p(g):
        g += 1
    # a root mod p generates mod p^m unless g^(p-1) = 1 mod p^2
    if m >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


@lru_cache(maxsize=None)
def _dlog_table(p: int, m: int):
    pm = p**m
    g = _primitive_root(p, m)
    order = pm // p * (p - 1)
    table = {}
    acc = 1
    for i in range(order):
        table[acc] = i
        acc = acc * g % pm
    if len(table) != order:
        raise ArithmeticError("primitive root failed to generate the unit group")
    return g, order, table


MAX_CONDUCTOR_EXPONENT = 3


class MultChar:
    """A character mu of Q_p^x with values in roots of unity, given by its
    conductor exponent m, the exponent of mu(p), and the image of a fixed
    generator of (Z/p^m)^x.

    The generator is the smallest primitive root; its image is
    e(generator_exponent / phi(p^m)).  Conductor exactness (nontrivial on
    1 + p^{m-1} Z_p for m >= 1) is validated at construction.
    """

    def __init__(self, ctx: PadicContext, conductor_exponent: int, p_exponent=Fraction(0),
                 generator_exponent: int = 0, max_conductor: int = MAX_CONDUCTOR_EXPONENT):
        if conductor_exponent < 0:
            raise ValueError("conductor exponent must be >= 0")
        if conductor_exponent > max_conductor:
            raise ValueError(
                f"conductor exponent {conductor_exponent} exceeds the cap {max_conductor}")
        self.ctx = ctx
        self.m = int(conductor_exponent)
        self.p_exponent = Fraction(p_exponent) % 1
        if self.m == 0:
            self.generator_exponent = 0
            self._order = 1
        else:
            _, order, _ = _dlog_table(ctx.p, self.m)
            self._order = order
            self.generator_exponent = int(generator_exponent) % order
            self._validate_conductor()

    def _validate_conductor(self):
        p, m = self.ctx.p, self.m
        if m == 1:
            if self.generator_exponent == 0:
                raise ValueError("claimed conductor exponent 1 but the character is unramified")
            return
        probe = self.unit_value_exponent(Fraction(1 + p ** (m - 1)))
        if probe == 0:
            raise ValueError(
                f"claimed conductor exponent {m} but the character is trivial on 1 + P^{m - 1}")

    def is_trivial(self) -> bool:
        return self.m == 0 and self.p_exponent == 0

    def unit_value_exponent(self, u: Fraction) -> Fraction:
        if self.m == 0:
            return Fraction(0)
        p, m = self.ctx.p, self.m
        pm = p**m
        r = u.numerator * pow(u.denominator, -1, pm) % pm
        _, order, table = _dlog_table(p, m)
        return Fraction(self.generator_exponent * table[r], order) % 1

    def value_exponent(self, x: Fraction) -> Fraction:
        """mu(x) = e(value_exponent(x))."""
        if x == 0:
            raise ZeroDivisionError("mu(0) is undefined")
        v = int(frac_valuation(x, self.ctx.p))
        return (v * self.p_exponent + self.unit_value_exponent(frac_unit_part(x, self.ctx.p))) % 1

    def value(self, x) -> CycValue:
        return CycValue.root_of_unity(self.ctx.q, self.value_exponent(_as_frac(x)))

    def inverse(self) -> "MultChar":
        return MultChar(self.ctx, self.m, -self.p_exponent, -self.generator_exponent)

    def cache_key(self):
        return (self.m, self.p_exponent, self.generator_exponent)

    @classmethod
    def trivial(cls, ctx: PadicContext) -> "MultChar":
        return cls(ctx, 0)

    @classmethod
    def from_spec(cls, ctx: PadicContext, record: dict, max_conductor: int = MAX_CONDUCTOR_EXPONENT) -> "MultChar":
        """Build from the character record

            {conductor_exponent, value_at_p_numerator_of_exponent,
             value_at_p_denominator_of_exponent, generator_image_exponent}

        where mu(p) = e(num/den) and the generator of (Z/p^m)^x maps to
        e(generator_image_exponent / phi(p^m))."""
        return cls(
            ctx,
            int(record["conductor_exponent"]),
            Fraction(int(record["value_at_p_numerator_of_exponent"]),
                     int(record["value_at_p_denominator_of_exponent"])),
            int(record.get("generator_image_exponent", 0)),
            max_conductor=max_conductor,
        )

    def spec_record(self) -> dict:
        return {
            "conductor_exponent": self.m,
            "value_at_p_numerator_of_exponent": self.p_exponent.numerator,
            "value_at_p_denominator_of_exponent": self.p_exponent.denominator,
            "generator_image_exponent": self.generator_exponent,
        }

    def __repr__(self):
        if self.is_trivial():
            return f"MultChar(trivial, p={self.ctx.p})"
        return (f"MultChar(p={self.ctx.p}, m={self.m}, mu(p)=e({self.p_exponent}), "
                f"gen->e({self.generator_exponent}/{self._order}))")
