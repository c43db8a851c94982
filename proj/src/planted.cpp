#include "valring/planted.hpp"

#include <sstream>

#include "valring/errors.hpp"

namespace valring {

GroupElement embed_rational(const Ctx& ctx, const Rational& r) {
    std::vector<Rational> coords(ctx->rank(), Rational(0));
    coords.back() = r;
    return GroupElement(std::move(coords));
}

namespace {

bool is_power_of(long n, unsigned p) {
    if (n < 2) return false;
    while (n % p == 0) n /= p;
    return n == 1;
}

MultiPoly newton_witness(const Ctx& ctx, const HahnSeries& c0, const HahnSeries& a,
                         long degree) {
    MultiPoly h(ctx, {"T"});
    h.set_coeff({0}, c0);
    h.set_coeff({1}, HahnSeries::one(ctx));
    h.set_coeff({static_cast<int>(degree)}, a);
    return h;
}

HahnSeries newton_iterate(const MultiPoly& h, const HahnSeries& start, long steps) {
    HahnSeries v = start;
    for (long i = 0; i < steps; ++i) v = v - h.eval({v});
    return v;
}

}  // namespace

PlantedInstance plant_newton_sequence(const Ctx& ctx, const PlantedSeqParams& params) {
    unsigned p = ctx->field().p();
    if (!is_power_of(params.degree, p))
        throw std::invalid_argument("witness degree must be a power of p, >= 2");
    if (!(params.delta > 0)) throw std::invalid_argument("delta must be positive");
    if (params.alpha < 0) throw std::invalid_argument("alpha must be >= 0");
    if (params.window < 3) throw std::invalid_argument("window too short");
    if (params.margin < 1) throw std::invalid_argument("margin must be >= 1");
    if (params.a_coeff % p == 0)
        throw std::invalid_argument("leading coefficient vanishes mod p");

    HahnSeries c0 = -HahnSeries::monomial(ctx, ctx->field().one(),
                                          embed_rational(ctx, params.delta));
    HahnSeries acoef = HahnSeries::monomial(ctx, ctx->field().from_int(params.a_coeff),
                                            embed_rational(ctx, params.alpha));
    MultiPoly h = newton_witness(ctx, c0, acoef, params.degree);

    // iterates v_1 .. v_window; the zero start is dropped so every term
    // carries a value for the scaling hypotheses to dominate
    std::vector<HahnSeries> window;
    HahnSeries v = HahnSeries::zero(ctx);
    for (long i = 0; i < params.window; ++i) {
        v = v - h.eval({v});
        window.push_back(v);
    }
    HahnSeries limit = newton_iterate(h, window.back(), params.margin);

    std::ostringstream desc;
    desc << "newton(deg=" << params.degree << ",delta=" << params.delta
         << ",alpha=" << params.alpha << ",a=" << params.a_coeff
         << ",window=" << params.window << ",margin=" << params.margin << ")";
    MultiPoly h_rule = h;
    PseudoSequence seq(window,
                       [h_rule, ctx](long i) {
                           return newton_iterate(h_rule, HahnSeries::zero(ctx), i + 1);
                       },
                       desc.str());

    if (!check_pseudo_convergent(seq).ok)
        throw Error("planted sequence failed its own convergence check");
    if (!is_pseudo_limit(limit, seq))
        throw Error("planted limit is not a pseudo limit of the window");

    PlantedInstance out{std::move(h), std::move(seq), std::move(limit), params.degree};
    return out;
}

PlantedTower plant_tower(const Ctx& ctx, const PlantedTowerParams& params) {
    unsigned p = ctx->field().p();
    PlantedTower tower;

    PlantedSeqParams base = params.base;
    base.window = params.window;
    base.margin = params.margin;
    PlantedInstance level0 = plant_newton_sequence(ctx, base);
    tower.levels.push_back(
        PlantedTowerLevel{level0.limit, level0.seq, level0.witness, std::nullopt});

    // Profile ceiling of the level under construction, tracked in the
    // embedded coordinate to pick guards and scaling elements.
    auto profile_max = [&](const PseudoSequence& s) {
        Rational mx = 0;
        for (const auto& g : s.gamma_profile()) {
            const Rational& r = g.value.coords().back();
            if (r > mx) mx = r;
        }
        return mx;
    };
    Rational running_max = profile_max(level0.seq);

    for (const auto& lv : params.upper) {
        if (!is_power_of(lv.degree, p))
            throw std::invalid_argument("tower level degree must be a power of p, >= 2");
        const PlantedTowerLevel& below = tower.levels.back();
        HahnSeries x = below.h.eval({below.x});
        ValResult vx = x.val();
        if (!vx.exact() || vx.value.is_infinity())
            throw Error("tower point degenerated to zero; enlarge the margin");

        HahnSeries acoef = HahnSeries::monomial(ctx, ctx->field().from_int(lv.a_coeff),
                                                embed_rational(ctx, lv.alpha));
        // Profile here starts at val(x) and obeys g' = val(A) + P*g; pick
        // the guard beyond everything the window and margin can reach.
        Rational gamma = vx.value.coords().back();
        Rational reach = gamma;
        for (long j = 0; j < params.window + params.margin + 2; ++j)
            reach = lv.alpha + lv.degree * reach;
        Rational guard = reach * 2 + 1;
        if (guard < params.guard) guard = params.guard;

        HahnSeries root_shift =
            HahnSeries::monomial(ctx, ctx->field().one(), embed_rational(ctx, guard));
        HahnSeries c0 = -(x + acoef * x.pow(lv.degree)) + root_shift;
        MultiPoly h = newton_witness(ctx, c0, acoef, lv.degree);

        std::vector<HahnSeries> window;
        HahnSeries w = HahnSeries::zero(ctx);
        for (long i = 0; i < params.window; ++i) {
            w = w - h.eval({w});
            window.push_back(w);
        }
        MultiPoly h_rule = h;
        std::ostringstream desc;
        desc << "root-planted(deg=" << lv.degree << ",guard=" << guard << ")";
        PseudoSequence seq(window,
                           [h_rule, ctx](long i) {
                               return newton_iterate(h_rule, HahnSeries::zero(ctx), i + 1);
                           },
                           desc.str());
        if (!check_pseudo_convergent(seq).ok)
            throw Error("planted tower level failed its convergence check");
        if (!is_pseudo_limit(x, seq))
            throw Error("tower point is not a pseudo limit of its planted sequence");

        // scaling element for the boundary below: must dominate levels <= e-1
        Rational bexp = running_max + 1;
        tower.levels.back().b =
            HahnSeries::monomial(ctx, ctx->field().one(), embed_rational(ctx, bexp));
        Rational here = profile_max(seq);
        if (here > running_max) running_max = here;

        tower.levels.push_back(PlantedTowerLevel{x, std::move(seq), std::move(h), std::nullopt});
    }
    return tower;
}

}  // namespace valring
