#include <doctest.h>

#include "test_util.hpp"
#include "valring/errors.hpp"
#include "valring/poly.hpp"

using namespace valring;
using vrtest::ge1;

namespace {

Ctx ctx_q(unsigned p) {
    FieldConfig cfg;
    cfg.p = p;
    cfg.q = p;
    cfg.rank = 1;
    return HahnContext::make(cfg);
}

HahnSeries mono(const Ctx& c, long coef, long num, long den = 1) {
    return HahnSeries::monomial(c, c->field().from_int(coef),
                                GroupElement({Rational(num, den)}));
}

MultiPoly uni(const Ctx& c, const std::string& var, std::vector<HahnSeries> coeffs) {
    MultiPoly f(c, {var});
    for (std::size_t i = 0; i < coeffs.size(); ++i) f.set_coeff({static_cast<int>(i)}, coeffs[i]);
    return f;
}

MultiPoly rnd_poly(const Ctx& c, vrtest::Rng& rng, const std::string& var, long maxdeg,
                   long p, bool in_V = true) {
    MultiPoly f(c, {var});
    long d = rng.range(0, maxdeg);
    for (long i = 0; i <= d; ++i) {
        if (rng.below(3) == 0) continue;
        long lo = in_V ? 0 : -4;
        f.set_coeff({static_cast<int>(i)}, mono(c, rng.range(1, p - 1), rng.range(lo, 5)));
    }
    return f;
}

// f(Y+Z) as an exact bivariate polynomial.
MultiPoly shift_expand(const MultiPoly& f, const std::string& var) {
    std::vector<std::string> yz{var, "Zsh"};
    MultiPoly wide = f.with_vars(yz);
    MultiPoly y = MultiPoly::variable(f.ctx(), yz, var);
    MultiPoly z = MultiPoly::variable(f.ctx(), yz, "Zsh");
    return wide.substitute(var, y + z);
}

}  // namespace

TEST_CASE("hasse derivative basics") {
    Ctx c2 = ctx_q(2);
    MultiPoly x2 = uni(c2, "X", {HahnSeries::zero(c2), HahnSeries::zero(c2),
                                 HahnSeries::one(c2)});
    CHECK((hasse_derivative(x2, "X", 0) - x2).is_zero());
    CHECK(hasse_derivative(x2, "X", 1).is_zero());       // binom(2,1) = 0 in F_2
    MultiPoly d2 = hasse_derivative(x2, "X", 2);
    CHECK((d2 - MultiPoly::constant(c2, {"X"}, HahnSeries::one(c2))).is_zero());
}

TEST_CASE("taylor expansion around a center") {
    Ctx c5 = ctx_q(5);
    HahnSeries a = mono(c5, 2, 1);  // 2t
    MultiPoly x2 = uni(c5, "X", {HahnSeries::zero(c5), HahnSeries::zero(c5),
                                 HahnSeries::one(c5)});
    auto coeffs = taylor_expand(x2, "X", a);
    REQUIRE(coeffs.size() == 3);
    CHECK((coeffs[0] - a * a).is_exact_zero());
    CHECK((coeffs[1] - (a + a)).is_exact_zero());
    CHECK((coeffs[2] - HahnSeries::one(c5)).is_exact_zero());

    Ctx c2 = ctx_q(2);
    HahnSeries b = mono(c2, 1, 1);
    MultiPoly y2 = uni(c2, "X", {HahnSeries::zero(c2), HahnSeries::zero(c2),
                                 HahnSeries::one(c2)});
    auto cs = taylor_expand(y2, "X", b);
    CHECK((cs[0] - b * b).is_exact_zero());
    CHECK(cs[1].is_exact_zero());  // 2c vanishes in characteristic 2
    CHECK((cs[2] - HahnSeries::one(c2)).is_exact_zero());
}

TEST_CASE("taylor identity and reconstruction on random polynomials") {
    for (unsigned p : {2u, 3u, 5u}) {
        Ctx c = ctx_q(p);
        vrtest::Rng rng(31 + p);
        for (int i = 0; i < 30; ++i) {
            MultiPoly f = rnd_poly(c, rng, "X", 8, p);
            // f(Y+Z) = sum_n D^(n)f(Y) Z^n, exactly
            MultiPoly lhs = shift_expand(f, "X");
            MultiPoly rhs = MultiPoly::zero(c, {"X", "Zsh"});
            MultiPoly z = MultiPoly::variable(c, {"X", "Zsh"}, "Zsh");
            MultiPoly zp = MultiPoly::constant(c, {"X", "Zsh"}, HahnSeries::one(c));
            long d = std::max<long>(f.degree(0), 0);
            for (long n = 0; n <= d; ++n) {
                rhs = rhs + hasse_derivative(f, "X", n).with_vars({"X", "Zsh"}) * zp;
                zp = zp * z;
            }
            CHECK((lhs - rhs).is_zero());

            // resubstitution: sum_n (D^(n)f)(center) (X - center)^n == f
            HahnSeries center = mono(c, 1, 2) + mono(c, p - 1, 3);
            auto coeffs = taylor_expand(f, "X", center);
            MultiPoly xminusc =
                uni(c, "X", {-center, HahnSeries::one(c)});
            MultiPoly acc = MultiPoly::zero(c, {"X"});
            MultiPoly pw = MultiPoly::constant(c, {"X"}, HahnSeries::one(c));
            for (std::size_t n = 0; n < coeffs.size(); ++n) {
                acc = acc + pw.scaled(coeffs[n]);
                pw = pw * xminusc;
            }
            CHECK((acc - f).is_zero());
        }
    }
}

TEST_CASE("hasse composition law") {
    for (unsigned p : {2u, 3u}) {
        Ctx c = ctx_q(p);
        vrtest::Rng rng(77 + p);
        for (int i = 0; i < 20; ++i) {
            MultiPoly f = rnd_poly(c, rng, "X", 10, p);
            for (long a = 0; a <= 4; ++a) {
                for (long b = 0; a + b <= 10 && b <= 4; ++b) {
                    MultiPoly lhs = hasse_derivative(hasse_derivative(f, "X", b), "X", a);
                    MultiPoly rhs = hasse_derivative(f, "X", a + b)
                                        .scaled(HahnSeries::from_int(
                                            c, binomial_mod_p(a + b, a, p)));
                    CHECK((lhs - rhs).is_zero());
                }
            }
        }
    }
}

TEST_CASE("pseudo-division spec cases") {
    Ctx c2 = ctx_q(2);
    HahnSeries a = mono(c2, 1, 1) + mono(c2, 1, 3);
    MultiPoly f = uni(c2, "X", {HahnSeries::zero(c2), HahnSeries::zero(c2),
                                HahnSeries::one(c2)});
    MultiPoly h = uni(c2, "X", {-a, HahnSeries::one(c2)});
    PseudoDivision d = pseudo_divide(f, h);
    CHECK((d.c - HahnSeries::one(c2)).is_exact_zero());
    CHECK((d.q - uni(c2, "X", {a, HahnSeries::one(c2)})).is_zero());
    CHECK((d.r - MultiPoly::constant(c2, {"X"}, a * a)).is_zero());

    // f = X, h = tX - 1: t*X = 1*(tX - 1) + 1
    HahnSeries t = mono(c2, 1, 1);
    MultiPoly fx = uni(c2, "X", {HahnSeries::zero(c2), HahnSeries::one(c2)});
    MultiPoly ht = uni(c2, "X", {-HahnSeries::one(c2), t});
    PseudoDivision dt = pseudo_divide(fx, ht);
    CHECK((dt.c - t).is_exact_zero());
    CHECK((dt.q - MultiPoly::constant(c2, {"X"}, HahnSeries::one(c2))).is_zero());
    CHECK((dt.r - MultiPoly::constant(c2, {"X"}, HahnSeries::one(c2))).is_zero());

    PseudoDivision low = pseudo_divide(fx, f);  // deg f < deg h
    CHECK((low.c - HahnSeries::one(c2)).is_exact_zero());
    CHECK(low.q.is_zero());
    CHECK((low.r - fx).is_zero());
}

TEST_CASE("pseudo-division identity on random pairs") {
    for (unsigned p : {2u, 5u}) {
        Ctx c = ctx_q(p);
        vrtest::Rng rng(13 + p);
        for (int i = 0; i < 60; ++i) {
            MultiPoly f = rnd_poly(c, rng, "X", 7, p);
            MultiPoly h = rnd_poly(c, rng, "X", 4, p);
            long dh = h.degree(0);
            if (dh < 1) continue;
            PseudoDivision d = pseudo_divide(f, h);
            MultiPoly err = f.scaled(d.c) - (d.q * h + d.r);
            CHECK(err.is_zero());
            CHECK(d.r.degree(0) < dh);
            CHECK(d.c.val().exact());
        }
    }
}

namespace {
MultiPoly tower_poly(const Ctx& c, std::vector<HahnSeries> coeffs) {
    return uni(c, "T", std::move(coeffs));
}
}  // namespace

TEST_CASE("reduce_mod_tower frozen example over F5") {
    Ctx c = ctx_q(5);
    HahnSeries t = mono(c, 1, 1);
    // h0 = X0^2 + t X0, f = X0^4  =>  F = X1^2 - 2t X0 X1 + t^2 X1 - t^3 X0
    MultiPoly h0 = tower_poly(c, {HahnSeries::zero(c), t, HahnSeries::one(c)});
    TowerSpec tower({h0});
    MultiPoly f(c, {"X0"});
    f.set_coeff({4}, HahnSeries::one(c));
    TowerReduction red = reduce_mod_tower(f, tower);
    CHECK((red.c - HahnSeries::one(c)).is_exact_zero());
    CHECK(red.levels_used == 1);
    CHECK(!red.top_bound_certified);  // no h_1 bounds deg_{X1} = 2
    MultiPoly want = MultiPoly::zero(c, {"X0", "X1"});
    want.set_coeff({0, 2}, HahnSeries::one(c));
    want.set_coeff({1, 1}, mono(c, 3, 1));   // -2t
    want.set_coeff({0, 1}, t * t);
    want.set_coeff({1, 0}, mono(c, 4, 3));   // -t^3
    CHECK((red.F - want).is_zero());
}

TEST_CASE("reduce_mod_tower trivial cases and tower exhaustion") {
    Ctx c = ctx_q(2);
    HahnSeries t = mono(c, 1, 1);
    MultiPoly h0 = tower_poly(c, {t, HahnSeries::one(c), HahnSeries::one(c)});
    TowerSpec tower({h0});
    MultiPoly x0 = MultiPoly::variable(c, {"X0"}, "X0");
    TowerReduction red = reduce_mod_tower(x0, tower);
    CHECK(red.levels_used == 0);
    CHECK(red.top_bound_certified);
    CHECK((red.F - x0).is_zero());

    MultiPoly h0x = h0.renamed("T", "X0");
    TowerReduction red2 = reduce_mod_tower(h0x, tower);
    CHECK(red2.levels_used == 1);
    CHECK(red2.top_bound_certified);  // top degree 1 sits below every level
    MultiPoly x1 = MultiPoly::variable(c, {"X0", "X1"}, "X1");
    CHECK((red2.F - x1).is_zero());

    MultiPoly f9(c, {"X0"});
    f9.set_coeff({9}, HahnSeries::one(c));
    TowerReduction soft = reduce_mod_tower(f9, tower);
    CHECK(!soft.top_bound_certified);
    CHECK(soft.F.degree(soft.F.var_index("X1")) == 4);
    try {
        reduce_mod_tower(f9, tower, /*require_top_bound=*/true);
        FAIL("expected TowerTooShort");
    } catch (const TowerTooShort& e) {
        CHECK(e.required_levels == 2);
    }
}

namespace {
// Substitutes X_{i+1} <- h_i(X_i) one level at a time, checking c*f == F(...).
MultiPoly back_substitute(const MultiPoly& F, const TowerSpec& tower, long levels) {
    MultiPoly cur = F;
    for (long lvl = levels; lvl >= 1; --lvl)
        cur = cur.substitute(tower_var(lvl),
                             tower.level_in(lvl - 1, tower_var(lvl - 1)).with_vars(cur.vars()));
    MultiPoly out(F.ctx(), {tower_var(0)});
    for (const auto& [e, coef] : cur.terms()) out.set_coeff({e[0]}, coef);
    return out;
}
}  // namespace

TEST_CASE("reduce_mod_tower back-substitution on random towers") {
    for (unsigned p : {2u, 3u}) {
        Ctx c = ctx_q(p);
        vrtest::Rng rng(211 + p);
        for (int i = 0; i < 25; ++i) {
            std::vector<MultiPoly> levels;
            long L = rng.range(1, 3);
            for (long l = 0; l < L; ++l) {
                long d = rng.range(2, 4);
                std::vector<HahnSeries> coeffs(d + 1, HahnSeries::zero(c));
                for (long k = 0; k < d; ++k)
                    if (rng.below(2)) coeffs[k] = mono(c, rng.range(1, p - 1), rng.range(0, 3));
                coeffs[d] = mono(c, rng.range(1, p - 1), rng.below(2));  // maybe non-unit lead
                levels.push_back(tower_poly(c, coeffs));
            }
            TowerSpec tower(levels);
            MultiPoly f = rnd_poly(c, rng, "X0", 9, p);
            if (f.is_zero()) continue;
            TowerReduction red = reduce_mod_tower(f, tower);
            for (long e = 0; e < red.levels_used; ++e)
                CHECK(red.F.degree(red.F.var_index(tower_var(e))) < tower.level_degree(e));
            if (red.top_bound_certified && red.levels_used < tower.size())
                CHECK(red.F.degree(red.F.var_index(tower_var(red.levels_used))) <
                      tower.level_degree(red.levels_used));
            MultiPoly back = back_substitute(red.F, tower, red.levels_used);
            CHECK((back - f.scaled(red.c)).is_zero());
        }
    }
}

TEST_CASE("ideal membership witness") {
    Ctx c = ctx_q(3);
    HahnSeries t = mono(c, 1, 1);
    MultiPoly h0 = tower_poly(c, {t, HahnSeries::zero(c), HahnSeries::one(c)});
    MultiPoly h1 = tower_poly(c, {HahnSeries::zero(c), t, HahnSeries::one(c)});
    TowerSpec tower({h0, h1});

    std::vector<std::string> v01{"X0", "X1"};
    MultiPoly gen = MultiPoly::variable(c, v01, "X1") - h0.renamed("T", "X0").with_vars(v01);
    CHECK(ideal_membership_witness(gen, tower).is_zero());

    MultiPoly one_p = MultiPoly::constant(c, v01, HahnSeries::one(c));
    MultiPoly res = ideal_membership_witness(one_p, tower);
    CHECK((res - MultiPoly::constant(c, {"X0"}, HahnSeries::one(c))).is_zero());

    // independent order-of-substitution oracle
    vrtest::Rng rng(5);
    std::vector<std::string> v012{"X0", "X1", "X2"};
    for (int i = 0; i < 20; ++i) {
        MultiPoly P = MultiPoly::zero(c, v012);
        for (int j = 0; j < 5; ++j)
            P.set_coeff({static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)),
                         static_cast<int>(rng.below(2))},
                        mono(c, rng.range(1, 2), rng.below(3)));
        if (P.is_zero()) continue;
        MultiPoly got = ideal_membership_witness(P, tower);
        // oracle: precompose the variable images and substitute bottom-up
        MultiPoly comp1 = h0.renamed("T", "X0").with_vars(v012);          // h0(X0)
        MultiPoly comp2 = h1.renamed("T", "X1").with_vars(v012).substitute("X1", comp1);
        MultiPoly alt = P.substitute("X1", comp1).substitute("X2", comp2);
        MultiPoly flat(c, {"X0"});
        for (const auto& [e, coef] : alt.terms()) flat.set_coeff({e[0]}, coef);
        CHECK((got - flat).is_zero());
    }
}
