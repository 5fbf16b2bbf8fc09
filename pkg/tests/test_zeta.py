from fractions import Fraction

import pytest

from metaplectic import (
    ADDITIVE_DX,
    MULTIPLICATIVE_DX,
    AdditiveCharacter,
    CycValue,
    MetaElement,
    MultChar,
    ShellIntegralPlan,
    StabilizationError,
    bessel_closed,
    bessel_direct,
    bessel_table,
    check_fe,
    chi_psi,
    fourier_inversion_check,
    gamma_coefficient,
    gamma_factor,
    improper_integral,
    integrate_ball,
    integrate_shell,
    zeta_function,
)
from metaplectic.exactnum import Q_NEG_S, Q_POS_S
from metaplectic.zeta import NotLocallyConstantError, zeta_parity_holds
from metaplectic.cover import SL2Element
from metaplectic.localchar import hilbert_frac

XI = Fraction(1, 3)


def one(ctx):
    return lambda x: ctx.one()


class TestShellIntegral:
    def test_unit_volume_multiplicative(self, ctx):
        plan = ShellIntegralPlan(0, 1, MULTIPLICATIVE_DX)
        assert integrate_shell(ctx, one(ctx), plan) == Fraction(2, 3)

    def test_character_on_units_additive(self, ctx):
        psi = AdditiveCharacter(ctx)
        f = lambda x: psi.value(x / 3)
        plan = ShellIntegralPlan(0, 1, ADDITIVE_DX)
        # full-ball sum is 0, the P-part contributes 1/3
        assert integrate_shell(ctx, f, plan) == Fraction(-1, 3)

    def test_character_on_ball_additive(self, ctx):
        psi = AdditiveCharacter(ctx)
        f = lambda x: psi.value(x / 3)
        assert integrate_ball(ctx, f, 0, 1) == 0

    def test_deeper_character(self, ctx):
        psi = AdditiveCharacter(ctx)
        f = lambda x: psi.value(x / 27)
        assert integrate_ball(ctx, f, 0, 1) == 0
        assert integrate_ball(ctx, f, 2, 3) == 0      # still nontrivial on P^2
        assert integrate_ball(ctx, f, 3, 4) == Fraction(1, 27)

    def test_refinement_gate_failure(self, ctx):
        # valuation is not locally constant at any finite resolution near 0
        from metaplectic.exactnum import frac_valuation

        def f(x):
            if x == 0:
                return ctx.zero()
            return ctx.cyc(frac_valuation(x, 3))

        with pytest.raises(NotLocallyConstantError):
            integrate_ball(ctx, f, 0, 1)


class TestImproperIntegral:
    def test_indicator_of_integers(self, ctx):
        f = lambda x: ctx.one() if x.denominator % 3 != 0 else ctx.zero()
        assert improper_integral(ctx, f, 8) == 1

    def test_twisted_character_vanishes(self, ctx):
        # psi^xi(-x) summed over P^{-2} kills the nontrivial character
        psi_xi = AdditiveCharacter(ctx).twist(XI)

        def f(x):
            return psi_xi.value(-x) if _val3(x) >= -2 else ctx.zero()

        assert improper_integral(ctx, f, 8, level_for_shell=lambda m: 3) == 0

    def test_divergence_reported(self, ctx):
        with pytest.raises(StabilizationError) as err:
            improper_integral(ctx, one(ctx), 6)
        assert err.value.trace  # partial sums travel with the error


def _val3(x: Fraction) -> int:
    if x == 0:
        return 10**9
    v = 0
    n, d = x.numerator, x.denominator
    while n % 3 == 0:
        n //= 3
        v += 1
    while d % 3 == 0:
        d //= 3
        v -= 1
    return v


class TestBessel:
    def test_vanishes_on_p(self, rep1):
        for x in (3, 9, 27, Fraction(6), Fraction(12), Fraction(18), Fraction(33),
                  Fraction(45), Fraction(81), Fraction(15)):
            assert bessel_direct(rep1, XI, XI, Fraction(x)).is_zero()

    def test_unit_shell_value_against_triple_sum_oracle(self, ctx, rep1):
        # independent oracle: J(<x>w) W^eta(e) as the double character sum of
        # the model vector over (z, y) in P^{-1} sampled modulo P^2: the
        # representatives are c/3 for c in [0, 27), each coset of volume 1/9
        w = MetaElement.w(ctx)
        v = rep1.phi()
        psi = rep1.psi
        for u in (1, 2, 4):
            g = MetaElement.torus(ctx, u) * w
            total = CycValue.zero(3)
            for zi in range(27):
                for yi in range(27):
                    z, y = Fraction(zi, 3), Fraction(yi, 3)
                    point = MetaElement.n(ctx, z) * g * MetaElement.n(ctx, y)
                    val = rep1.evaluate_vector(v, point)[0]
                    if val.is_zero():
                        continue
                    total = total + val * psi.value(-XI * z - XI * y)
            oracle = total * Fraction(1, 81)
            assert bessel_direct(rep1, XI, XI, Fraction(u)) == oracle
            assert oracle == 1

    def test_two_methods_agree_shell_minus_one(self, rep1):
        for u in (1, 2, 4, 5, 7, 8):
            x = Fraction(u, 3)
            assert bessel_direct(rep1, XI, XI, x) == bessel_closed(rep1, XI, XI, x)

    def test_two_methods_agree_deeper(self, rep1):
        for u, k in ((1, 2), (2, 2), (4, 3)):
            x = Fraction(u, 3**k)
            assert bessel_direct(rep1, XI, XI, x) == bessel_closed(rep1, XI, XI, x)

    def test_closed_requires_deep_shell(self, rep1):
        with pytest.raises(ValueError):
            bessel_closed(rep1, XI, XI, Fraction(2))

    def test_scaling_invariance_of_ratio(self, ctx, rep1):
        # J is a ratio, independent of the test vector normalization
        w = MetaElement.w(ctx)
        g = MetaElement.torus(ctx, Fraction(1, 3)) * w
        base = bessel_direct(rep1, XI, XI, g)
        assert bessel_direct(rep1, XI, XI, Fraction(1, 3)) == base

    def test_transformation_law(self, ctx, rep1):
        # J^{t^2 xi, u^2 eta}(<a>w) = c_eta(u) c_xi(t)^{-1} (u,-1) |u|^{-2}
        #     * J^{xi,eta}(<a><t><u>w) for units t, u
        a = Fraction(1, 3)
        w = MetaElement.w(ctx)
        for t in (1, 2, 4):
            for u in (1, 2, 5):
                lhs = bessel_direct(rep1, t * t * XI, u * u * XI,
                                    MetaElement.torus(ctx, a) * w)
                g = (MetaElement.torus(ctx, a) * MetaElement.torus(ctx, t)
                     * MetaElement.torus(ctx, u) * w)
                rhs = rep1.c_factor(XI, u) * rep1.c_factor(XI, t).inverse() \
                    * bessel_direct(rep1, XI, XI, g)
                if hilbert_frac(3, Fraction(u), Fraction(-1)) == -1:
                    rhs = -rhs
                assert lhs == rhs, (t, u)

    def test_growth_bound(self, rep1):
        from metaplectic.zeta import bessel_growth_report
        report = bessel_growth_report(rep1, XI, XI, range(-5, 1))
        constant = max(report.values())
        assert constant < float("inf")
        shallow = max(bessel_growth_report(rep1, XI, XI, range(-3, 1)).values())
        assert constant <= shallow + 1e-12  # stable under extending the range

    def test_table_consistency_gate(self, rep1):
        table = bessel_table(rep1, XI, XI)
        assert table.validate_agreement([-2, -1], per_shell=2) == 4
        assert table.value(Fraction(1, 3)) == table.closed_value(Fraction(1, 3))


class TestGamma:
    def test_example_value(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        assert gamma_coefficient(rep1, XI, XI, mu, 0) == Fraction(4, 3)

    def test_support_strict(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        assert gamma_coefficient(rep1, XI, XI, mu, 1).is_zero()

    def test_vanishing_above_bound(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        assert gamma_coefficient(rep1, XI, XI, mu, 2).is_zero()

    def test_vanishing_below_zero(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        for n in (-1, -2, -3):
            assert gamma_coefficient(rep1, XI, XI, mu, n).is_zero()

    def test_factor_is_constant_four_thirds(self, rep1):
        gf = gamma_factor(rep1, XI, XI, MultChar.trivial(rep1.ctx))
        assert gf.poly.var == Q_POS_S
        assert gf.poly.support() == [0]
        assert gf.poly.coeffs[0] == Fraction(4, 3)
        assert gf.support_bound == 1

    def test_conductor_one_bound(self, rep1):
        mu1 = MultChar(rep1.ctx, 1, Fraction(0), 1)
        gf = gamma_factor(rep1, XI, XI, mu1)
        assert gf.support_bound == 1
        assert all(n <= 1 for n in gf.poly.support())

    def test_second_datum(self, rep2):
        xi2 = Fraction(2, 3)
        gf = gamma_factor(rep2, xi2, xi2, MultChar.trivial(rep2.ctx))
        assert gf.poly.support() in ([], [0])


class TestZeta:
    def test_base_vector(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        z = zeta_function(rep1, XI, mu, rep1.phi())
        assert z.poly.var == Q_NEG_S
        assert z.poly.support() == [0]
        assert z.poly.coeffs[0] == Fraction(4, 3)
        assert z.parity_ok

    def test_window_closes(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        for v in (rep1.phi(), rep1.phi(n=1), rep1.phi(t=Fraction(1, 3), n=-1)):
            z = zeta_function(rep1, XI, mu, v)
            assert -10 <= z.window[0] and z.window[1] <= 10

    def test_genuineness_negates(self, ctx, rep1):
        mu = MultChar.trivial(ctx)
        v = rep1.phi()
        z = zeta_function(rep1, XI, mu, v)
        zminus = zeta_function(rep1, XI, mu, rep1.act(MetaElement.central(ctx, -1), v))
        assert zminus.poly == z.poly * Fraction(-1)

    def test_parity_vanishing(self, ctx, rep1):
        mu1 = MultChar(ctx, 1, Fraction(0), 1)  # mu(-1) = -1 breaks parity here
        assert not zeta_parity_holds(rep1, mu1)
        for v in (rep1.phi(), rep1.phi(n=1), rep1.phi(t=Fraction(2, 3))):
            assert zeta_function(rep1, XI, mu1, v).poly.is_zero()

    def test_smooth_translation_invariance(self, ctx, rep1):
        # pi(n(a)) v with psi^xi(a x^2) = 1 on the support leaves Z unchanged
        mu = MultChar.trivial(ctx)
        v = rep1.phi()
        z1 = zeta_function(rep1, XI, mu, v)
        z2 = zeta_function(rep1, XI, mu, rep1.act(MetaElement.n(ctx, 9), v))
        assert z1.poly == z2.poly

    def test_rejects_foreign_xi(self, rep1):
        with pytest.raises(ValueError):
            zeta_function(rep1, Fraction(2, 3), MultChar.trivial(rep1.ctx), rep1.phi())

    def test_window_exhaustion_reported(self, rep1):
        # a hard cap below the closure width must fail loudly, the signature
        # of non-compact support
        mu = MultChar.trivial(rep1.ctx)
        with pytest.raises(StabilizationError):
            zeta_function(rep1, XI, mu, rep1.phi(n=1), max_halfwidth=3)


class TestFunctionalEquation:
    def test_base_case_explicit(self, rep1):
        # LHS(s) = Z(s, pi(w)v) should equal Z(1-s, v) after (1/4)|eta|Gamma
        mu = MultChar.trivial(rep1.ctx)
        fe = check_fe(rep1, mu, rep1.phi(), XI)
        assert fe.passed and not fe.vacuous_parity
        assert fe.lhs.coeffs[0] == Fraction(4, 3)
        assert fe.residual.is_zero()

    def test_zero_vector(self, rep1):
        from metaplectic import InducedVector
        mu = MultChar.trivial(rep1.ctx)
        fe = check_fe(rep1, mu, InducedVector.zero(3), XI)
        assert fe.passed and fe.lhs.is_zero() and fe.rhs.is_zero()

    def test_negative_control(self, rep1):
        mu = MultChar.trivial(rep1.ctx)
        fe = check_fe(rep1, mu, rep1.phi(), XI, corrupt_gamma=CycValue.one(3))
        assert not fe.passed
        assert not fe.residual.is_zero()

    def test_random_combinations(self, ctx, rep1, rng):
        mu = MultChar.trivial(ctx)
        for _ in range(3):
            v = (rep1.phi(t=Fraction(rng.randrange(0, 3), 3), n=rng.choice([-1, 0, 1]),
                          coeff=Fraction(rng.randrange(1, 5)))
                 + rep1.phi(t=Fraction(rng.randrange(0, 9), 9), n=rng.choice([-1, 0, 1]))
                 + rep1.phi(n=rng.choice([-1, 0, 1]), coeff=Fraction(-1, 2)))
            fe = check_fe(rep1, mu, v, XI)
            assert fe.passed

    def test_unramified_twist(self, ctx, rep1):
        mu_i = MultChar(ctx, 0, Fraction(1, 4))
        fe = check_fe(rep1, mu_i, rep1.phi(n=1), XI)
        assert fe.passed and not fe.vacuous_parity
        assert not fe.lhs.is_zero()

    def test_parity_vacuous_flagged(self, ctx, rep1):
        mu1 = MultChar(ctx, 1, Fraction(0), 1)
        fe = check_fe(rep1, mu1, rep1.phi(), XI)
        assert fe.passed and fe.vacuous_parity
        assert fe.lhs.is_zero() and fe.rhs.is_zero()


class TestFourierInversion:
    def test_spot_check_at_valuation_minus_one(self, rep1):
        lhs, rhs = fourier_inversion_check(rep1, XI, rep1.phi(), Fraction(1, 3))
        assert lhs == rhs

    def test_nontrivial_vector(self, rep1):
        lhs, rhs = fourier_inversion_check(rep1, XI, rep1.phi(n=1), Fraction(1, 3))
        assert lhs == rhs
        assert not lhs.is_zero()
