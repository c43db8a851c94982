#include "valring/hahn.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "valring/errors.hpp"

namespace valring {

HahnContext::HahnContext(const FieldConfig& cfg, unsigned p, unsigned k)
    : cfg_(cfg), field_(p, k), rank_(cfg.rank) {}

std::shared_ptr<const HahnContext> HahnContext::make(const FieldConfig& cfg) {
    auto [p, k] = prime_power_split(cfg.q);
    if (p != cfg.p) throw std::invalid_argument("q is not a power of the declared p");
    if (cfg.rank < 1) throw std::invalid_argument("rank must be >= 1");
    return std::shared_ptr<const HahnContext>(new HahnContext(cfg, p, k));
}

HahnSeries::HahnSeries(Ctx ctx) : ctx_(std::move(ctx)) {}

HahnSeries::HahnSeries(Ctx ctx, std::vector<std::pair<GroupElement, Fq>> terms,
                       GroupElement prec)
    : ctx_(std::move(ctx)), prec_(std::move(prec)) {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [exp, c] : terms) {
        if (exp.is_infinity()) throw std::invalid_argument("Infinity exponent in series");
        if (exp.rank() != ctx_->rank()) throw Error("rank mismatch in series term");
        if (!(exp < prec_)) continue;
        if (!terms_.empty() && terms_.back().first == exp) {
            Fq s = terms_.back().second + c;
            if (s.is_zero())
                terms_.pop_back();
            else
                terms_.back().second = s;
        } else if (!c.is_zero()) {
            terms_.emplace_back(std::move(exp), std::move(c));
        }
    }
}

HahnSeries HahnSeries::one(const Ctx& ctx) {
    return HahnSeries(ctx, {{ctx->gzero(), ctx->field().one()}});
}

HahnSeries HahnSeries::monomial(const Ctx& ctx, const Fq& c, const GroupElement& exp) {
    if (c.is_zero()) return zero(ctx);
    return HahnSeries(ctx, {{exp, c}});
}

HahnSeries HahnSeries::from_int(const Ctx& ctx, const Int& n) {
    return monomial(ctx, ctx->field().from_int(n), ctx->gzero());
}

ValResult HahnSeries::val() const {
    if (!terms_.empty()) return {terms_.front().first, ValCertainty::Exact};
    if (prec_.is_infinity()) return {GroupElement::infinity(), ValCertainty::Exact};
    return {prec_, ValCertainty::BelowPrecOnly};
}

HahnSeries HahnSeries::truncated(const GroupElement& cap) const {
    if (prec_ <= cap) return *this;
    HahnSeries r(ctx_);
    r.prec_ = cap;
    for (const auto& t : terms_) {
        if (!(t.first < cap)) break;
        r.terms_.push_back(t);
    }
    return r;
}

HahnSeries HahnSeries::prefix(const GroupElement& cut) const {
    // The finite sum of stored terms below `cut`, taken as a new exact
    // element (this is how sequence terms are materialized from a limit).
    HahnSeries r(ctx_);
    for (const auto& t : terms_) {
        if (!(t.first < cut)) break;
        r.terms_.push_back(t);
    }
    return r;
}

Fq HahnSeries::coeff_at(const GroupElement& exp) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                               [](const auto& t, const GroupElement& e) { return t.first < e; });
    if (it != terms_.end() && it->first == exp) return it->second;
    return ctx_->field().zero();
}

HahnSeries HahnSeries::operator-() const {
    HahnSeries r(*this);
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

void check_same_ctx(const HahnSeries& a, const HahnSeries& b) {
    if (!a.ctx() || !b.ctx()) throw Error("series without context");
    if (!a.ctx()->field().same(b.ctx()->field()) || a.ctx()->rank() != b.ctx()->rank())
        throw Error("field config mismatch");
}

HahnSeries operator+(const HahnSeries& a, const HahnSeries& b) {
    check_same_ctx(a, b);
    HahnSeries r(a.ctx_);
    r.prec_ = min(a.prec_, b.prec_);
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
        bool ta = ia != a.terms_.end(), tb = ib != b.terms_.end();
        int which;
        if (ta && tb)
            which = compare(ia->first, ib->first);
        else
            which = ta ? -1 : 1;
        GroupElement exp = which <= 0 ? ia->first : ib->first;
        if (!(exp < r.prec_)) break;
        Fq c = which < 0 ? ia->second : which > 0 ? ib->second : ia->second + ib->second;
        if (which <= 0) ++ia;
        if (which >= 0) ++ib;
        if (!c.is_zero()) r.terms_.emplace_back(std::move(exp), std::move(c));
    }
    return r;
}

HahnSeries operator-(const HahnSeries& a, const HahnSeries& b) { return a + (-b); }

HahnSeries operator*(const HahnSeries& a, const HahnSeries& b) {
    check_same_ctx(a, b);
    if (a.is_exact_zero() || b.is_exact_zero()) return HahnSeries::zero(a.ctx_);
    // Ultrametric precision propagation.
    GroupElement prec = min(a.prec_ + b.val().value, b.prec_ + a.val().value);
    std::map<GroupElement, Fq> acc;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            GroupElement e = ea + eb;
            if (!(e < prec)) continue;
            auto [it, fresh] = acc.emplace(std::move(e), ca * cb);
            if (!fresh) it->second = it->second + ca * cb;
        }
    }
    HahnSeries r(a.ctx_);
    r.prec_ = std::move(prec);
    for (auto& [e, c] : acc)
        if (!c.is_zero()) r.terms_.emplace_back(e, std::move(c));
    return r;
}

HahnSeries HahnSeries::scaled(const Fq& c) const {
    if (c.is_zero()) return zero(ctx_);
    HahnSeries r(*this);
    for (auto& t : r.terms_) t.second = t.second * c;
    return r;
}

HahnSeries HahnSeries::pow(const Int& e) const {
    if (e < 0) throw std::invalid_argument("series pow needs e >= 0; use invert");
    HahnSeries acc = one(ctx_), base = *this;
    Int n = e;
    while (n > 0) {
        if (n % 2 == 1) acc = acc * base;
        if ((n /= 2) > 0) base = base * base;
    }
    return acc;
}

bool operator==(const HahnSeries& a, const HahnSeries& b) {
    if (a.prec_ != b.prec_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].first != b.terms_[i].first || a.terms_[i].second != b.terms_[i].second)
            return false;
    return true;
}

HahnSeries invert(const HahnSeries& x, const GroupElement& out_prec,
                  long max_geometric_terms) {
    if (x.is_exact_zero()) throw NotInvertible("inverse of the exact zero series");
    ValResult v = x.val();
    if (!v.exact()) throw PrecisionTooLow("inverse needs a certain leading term");
    const GroupElement& vx = v.value;
    bool monomial = x.terms().size() == 1 && x.is_exact();
    const Ctx& ctx = x.ctx();
    Fq lead_inv = x.terms().front().second.inverse();
    HahnSeries shift = HahnSeries::monomial(ctx, lead_inv, -vx);
    if (monomial && out_prec.is_infinity()) return shift;  // exact inverse
    if (out_prec.is_infinity())
        throw PrecisionTooLow("infinite output precision requires an exact monomial");

    // Work deep enough that x * result == 1 below out_prec even when
    // val(x) < 0: the result is stored to max(out_prec, out_prec - v).
    GroupElement store_prec = max(out_prec, out_prec - vx);
    if (!x.is_exact()) {
        GroupElement achievable = x.prec() - vx - vx;
        if (achievable < store_prec)
            throw PrecisionTooLow("requested inverse cap exceeds the achievable precision");
    }
    if (monomial) return shift.truncated(store_prec);

    // x = c t^v (1 + m);  (1+m)^{-1} = sum (-m)^j  with val(m) > 0.
    GroupElement rel_prec = store_prec + vx;
    HahnSeries normalized = (x * shift).truncated(rel_prec);
    HahnSeries m = normalized - HahnSeries::one(ctx);
    if (max_geometric_terms >= 0 && !m.is_zero_up_to_prec()) {
        // Cap the expansion depth at budget+1 valuation steps so the
        // support cannot blow up; the result carries the capped precision.
        GroupElement vm = m.val().value;
        rel_prec = min(rel_prec, Int(max_geometric_terms + 1) * vm);
        m = m.truncated(rel_prec);
    }
    HahnSeries acc = HahnSeries::one(ctx).truncated(rel_prec);
    HahnSeries term = HahnSeries::one(ctx);
    while (true) {
        term = (term * (-m)).truncated(rel_prec);
        if (term.is_zero_up_to_prec()) break;
        acc = acc + term;
    }
    return (acc * shift).truncated(store_prec);
}

HahnSeries divide(const HahnSeries& a, const HahnSeries& b) {
    if (b.is_exact_zero()) throw NotInvertible("division by the exact zero series");
    ValResult vb = b.val();
    if (!vb.exact()) throw PrecisionTooLow("divisor needs a certain leading term");
    if (a.is_exact_zero()) return a;
    ValResult va = a.val();
    bool b_monomial = b.terms().size() == 1 && b.is_exact();
    GroupElement zero = GroupElement::zero(a.ctx()->rank());
    GroupElement out = GroupElement::infinity();
    if (!a.is_exact()) out = min(out, a.prec() - vb.value);
    if (!b.is_exact())
        out = min(out, b.prec() + va.value - vb.value - max(vb.value, zero));
    if (out.is_infinity() && !b_monomial)
        throw std::invalid_argument(
            "divide needs an explicit precision for an exact non-monomial divisor");
    return divide(a, b, out);
}

HahnSeries divide(const HahnSeries& a, const HahnSeries& b, const GroupElement& out_prec,
                  long max_geometric_terms) {
    if (b.is_exact_zero()) throw NotInvertible("division by the exact zero series");
    if (a.is_exact_zero()) return a;
    ValResult va = a.val();
    GroupElement inv_prec =
        out_prec.is_infinity() ? out_prec : out_prec - va.value;
    HahnSeries q = a * invert(b, inv_prec, max_geometric_terms);
    return q.truncated(out_prec);
}

bool is_in_valuation_ring(const HahnSeries& x) {
    ValResult v = x.val();
    if (!v.exact()) throw PrecisionTooLow("membership in V needs an exact valuation");
    return !(v.value < GroupElement::zero(x.ctx()->rank()));
}

bool is_unit(const HahnSeries& x) {
    ValResult v = x.val();
    if (!v.exact()) throw PrecisionTooLow("unit test needs an exact valuation");
    if (v.value.is_infinity()) return false;
    return v.value == GroupElement::zero(x.ctx()->rank());
}

}  // namespace valring
