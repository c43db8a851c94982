#include "valring/poly.hpp"

#include <algorithm>
#include <sstream>

#include "valring/errors.hpp"

namespace valring {

MultiPoly::MultiPoly(Ctx ctx, std::vector<std::string> vars)
    : ctx_(std::move(ctx)), vars_(std::move(vars)) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        for (std::size_t j = i + 1; j < vars_.size(); ++j)
            if (vars_[i] == vars_[j]) throw std::invalid_argument("duplicate variable name");
}

MultiPoly MultiPoly::zero(const Ctx& ctx, std::vector<std::string> vars) {
    return MultiPoly(ctx, std::move(vars));
}

MultiPoly MultiPoly::constant(const Ctx& ctx, std::vector<std::string> vars,
                              const HahnSeries& c) {
    MultiPoly p(ctx, std::move(vars));
    p.set_coeff(std::vector<int>(p.vars_.size(), 0), c);
    return p;
}

MultiPoly MultiPoly::variable(const Ctx& ctx, std::vector<std::string> vars,
                              const std::string& var) {
    MultiPoly p(ctx, std::move(vars));
    std::vector<int> e(p.vars_.size(), 0);
    e[p.var_index(var)] = 1;
    p.set_coeff(e, HahnSeries::one(ctx));
    return p;
}

int MultiPoly::var_index(const std::string& var) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == var) return static_cast<int>(i);
    throw std::invalid_argument("unknown variable '" + var + "'");
}

bool MultiPoly::vanishes_up_to_prec() const {
    for (const auto& [e, c] : terms_)
        if (!c.is_zero_up_to_prec()) return false;
    return true;
}

long MultiPoly::degree(int var) const {
    long d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<long>(e.at(var)));
    return d;
}

long MultiPoly::total_degree() const {
    long d = -1;
    for (const auto& [e, c] : terms_) {
        long s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

HahnSeries MultiPoly::coeff(const std::vector<int>& exps) const {
    auto it = terms_.find(exps);
    if (it == terms_.end()) return HahnSeries::zero(ctx_);
    return it->second;
}

MultiPoly MultiPoly::coeff_in(int var, long k) const {
    MultiPoly r(ctx_, vars_);
    for (const auto& [e, c] : terms_) {
        if (e.at(var) != k) continue;
        std::vector<int> key = e;
        key[var] = 0;
        r.set_coeff(key, c);
    }
    return r;
}

void MultiPoly::set_coeff(const std::vector<int>& exps, HahnSeries c) {
    if (exps.size() != vars_.size()) throw std::invalid_argument("exponent arity mismatch");
    for (int x : exps)
        if (x < 0) throw std::invalid_argument("negative exponent");
    if (c.is_exact_zero())
        terms_.erase(exps);
    else
        terms_[exps] = std::move(c);
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(*this);
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

namespace {
void check_compatible(const MultiPoly& a, const MultiPoly& b) {
    if (a.vars() != b.vars()) throw std::invalid_argument("variable lists differ");
    if (!a.ctx()->field().same(b.ctx()->field()) || a.ctx()->rank() != b.ctx()->rank())
        throw Error("field config mismatch");
}
}  // namespace

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    check_compatible(a, b);
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) {
        auto it = r.terms_.find(e);
        if (it == r.terms_.end())
            r.set_coeff(e, c);
        else
            r.set_coeff(e, it->second + c);
    }
    return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    check_compatible(a, b);
    MultiPoly r(a.ctx_, a.vars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            std::vector<int> e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            HahnSeries prod = ca * cb;
            auto it = r.terms_.find(e);
            r.set_coeff(e, it == r.terms_.end() ? prod : it->second + prod);
        }
    }
    return r;
}

MultiPoly MultiPoly::scaled(const HahnSeries& c) const {
    MultiPoly r(ctx_, vars_);
    for (const auto& [e, k] : terms_) r.set_coeff(e, k * c);
    return r;
}

MultiPoly MultiPoly::shifted(int var, long k) const {
    MultiPoly r(ctx_, vars_);
    for (const auto& [e, c] : terms_) {
        std::vector<int> key = e;
        key[var] += static_cast<int>(k);
        r.set_coeff(key, c);
    }
    return r;
}

MultiPoly MultiPoly::with_vars(const std::vector<std::string>& new_vars) const {
    MultiPoly r(ctx_, new_vars);
    std::vector<int> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) where[i] = r.var_index(vars_[i]);
    for (const auto& [e, c] : terms_) {
        std::vector<int> key(new_vars.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) key[where[i]] = e[i];
        r.set_coeff(key, c);
    }
    return r;
}

MultiPoly MultiPoly::renamed(const std::string& from, const std::string& to) const {
    std::vector<std::string> nv = vars_;
    nv[var_index(from)] = to;
    MultiPoly r(ctx_, nv);
    for (const auto& [e, c] : terms_) r.set_coeff(e, c);
    return r;
}

HahnSeries MultiPoly::eval(const std::vector<HahnSeries>& point) const {
    if (point.size() != vars_.size()) throw std::invalid_argument("evaluation arity mismatch");
    // power tables
    std::vector<std::vector<HahnSeries>> pows(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
        long d = degree(static_cast<int>(v));
        pows[v].push_back(HahnSeries::one(ctx_));
        for (long k = 1; k <= d; ++k) pows[v].push_back(pows[v].back() * point[v]);
    }
    HahnSeries acc = HahnSeries::zero(ctx_);
    for (const auto& [e, c] : terms_) {
        HahnSeries t = c;
        for (std::size_t v = 0; v < e.size(); ++v)
            if (e[v] > 0) t = t * pows[v][e[v]];
        acc = acc + t;
    }
    return acc;
}

HahnSeries MultiPoly::eval(const std::map<std::string, HahnSeries>& point) const {
    std::vector<HahnSeries> p;
    p.reserve(vars_.size());
    for (const auto& v : vars_) {
        auto it = point.find(v);
        if (it == point.end()) throw std::invalid_argument("missing value for '" + v + "'");
        p.push_back(it->second);
    }
    return eval(p);
}

MultiPoly MultiPoly::substitute(const std::string& var, const MultiPoly& repl) const {
    int vi = var_index(var);
    if (repl.vars() != vars_) throw std::invalid_argument("substitute needs aligned variables");
    long d = degree(vi);
    std::vector<MultiPoly> pows;
    pows.push_back(constant(ctx_, vars_, HahnSeries::one(ctx_)));
    for (long k = 1; k <= d; ++k) pows.push_back(pows.back() * repl);
    MultiPoly acc(ctx_, vars_);
    for (const auto& [e, c] : terms_) {
        std::vector<int> base = e;
        int k = base[vi];
        base[vi] = 0;
        MultiPoly t(ctx_, vars_);
        t.set_coeff(base, c);
        acc = acc + t * pows[k];
    }
    return acc;
}

bool MultiPoly::univariate_in(int var) const {
    for (const auto& [e, c] : terms_)
        for (std::size_t v = 0; v < e.size(); ++v)
            if (static_cast<int>(v) != var && e[v] != 0) return false;
    return true;
}

bool MultiPoly::coefficients_in_valuation_ring() const {
    for (const auto& [e, c] : terms_)
        if (!is_in_valuation_ring(c)) return false;
    return true;
}

MultiPoly hasse_derivative(const MultiPoly& f, const std::string& var, long n) {
    if (n < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (n == 0) return f;
    int vi = f.var_index(var);
    unsigned p = f.ctx()->field().p();
    MultiPoly r(f.ctx(), f.vars());
    for (const auto& [e, c] : f.terms()) {
        long m = e[vi];
        if (m < n) continue;
        unsigned b = binomial_mod_p(m, n, p);
        if (b == 0) continue;
        std::vector<int> key = e;
        key[vi] = static_cast<int>(m - n);
        Fq scale = f.ctx()->field().from_int(b);
        HahnSeries coeff = c.scaled(scale);
        HahnSeries prev = r.coeff(key);
        r.set_coeff(key, prev.is_exact_zero() ? coeff : prev + coeff);
    }
    return r;
}

MultiPoly hasse_derivative_multi(const MultiPoly& f, const std::vector<long>& orders) {
    if (orders.size() != f.vars().size())
        throw std::invalid_argument("one derivative order per variable required");
    MultiPoly r = f;
    for (std::size_t v = 0; v < orders.size(); ++v)
        if (orders[v] > 0) r = hasse_derivative(r, f.vars()[v], orders[v]);
    return r;
}

std::vector<HahnSeries> taylor_expand(const MultiPoly& f, const std::string& var,
                                      const HahnSeries& center) {
    int vi = f.var_index(var);
    if (!f.univariate_in(vi)) throw std::invalid_argument("taylor_expand needs a univariate input");
    long d = std::max<long>(f.degree(vi), 0);
    std::vector<HahnSeries> out;
    out.reserve(d + 1);
    for (long n = 0; n <= d; ++n) {
        MultiPoly dn = hasse_derivative(f, var, n);
        out.push_back(dn.eval(std::vector<HahnSeries>(f.vars().size(), center)));
    }
    return out;
}

PseudoDivision pseudo_divide(const MultiPoly& f, const MultiPoly& h, const std::string& var) {
    check_compatible(f, h);
    int vi = f.var_index(var);
    if (!h.univariate_in(vi))
        throw std::invalid_argument("divisor must be univariate in the division variable");
    long dh = h.degree(vi);
    if (dh < 1) throw std::invalid_argument("divisor must have degree >= 1");
    std::vector<int> lead_key(f.vars().size(), 0);
    lead_key[vi] = static_cast<int>(dh);
    HahnSeries lc = h.coeff(lead_key);
    if (!lc.val().exact() || lc.val().value.is_infinity())
        throw std::invalid_argument("divisor needs a leading coefficient of exact valuation");

    const Ctx& ctx = f.ctx();
    MultiPoly h_low = h;
    h_low.set_coeff(lead_key, HahnSeries::zero(ctx));

    PseudoDivision out;
    out.c = HahnSeries::one(ctx);
    out.q = MultiPoly::zero(ctx, f.vars());
    out.r = f;
    long df = f.degree(vi);
    long steps_total = std::max<long>(df - dh + 1, 0);
    long steps = 0;
    while (true) {
        long dr = out.r.degree(vi);
        if (dr < dh) break;
        // Identity so far: c*f = q*h + r.  One step multiplies it by lc
        // and removes r's leading var-block; the top cancellation is
        // performed symbolically so precision caps cannot mask it.
        MultiPoly lt = out.r.coeff_in(vi, dr);           // leading block, var-degree 0
        MultiPoly r_low = out.r;
        for (const auto& [e, c] : out.r.terms())
            if (e[vi] == dr) r_low.set_coeff(e, HahnSeries::zero(ctx));
        MultiPoly shift_lt = lt.shifted(vi, dr - dh);
        out.q = out.q.scaled(lc) + shift_lt;
        out.r = r_low.scaled(lc) - shift_lt * h_low;
        out.c = out.c * lc;
        ++steps;
    }
    // Canonical multiplier: lc^(deg f - deg h + 1) regardless of early
    // leading-coefficient collapses, so results are reproducible.
    for (; steps < steps_total; ++steps) {
        out.c = out.c * lc;
        out.q = out.q.scaled(lc);
        out.r = out.r.scaled(lc);
    }
    return out;
}

PseudoDivision pseudo_divide(const MultiPoly& f, const MultiPoly& h) {
    if (h.vars().size() != 1) throw std::invalid_argument("univariate divisor expected");
    return pseudo_divide(f, h, h.vars()[0]);
}

std::string tower_var(long level) {
    std::ostringstream os;
    os << 'X' << level;
    return os.str();
}

TowerSpec::TowerSpec(std::vector<MultiPoly> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw std::invalid_argument("tower must have at least one level");
    for (auto& h : levels_) {
        int vi = -1;
        for (std::size_t v = 0; v < h.vars().size(); ++v)
            if (h.degree(static_cast<int>(v)) > 0) {
                if (vi >= 0) throw std::invalid_argument("tower level must be univariate");
                vi = static_cast<int>(v);
            }
        if (vi < 0) throw std::invalid_argument("tower level must be nonconstant");
        long d = h.degree(vi);
        if (d <= 1) throw std::invalid_argument("tower level degree must exceed 1");
        if (!h.coefficients_in_valuation_ring())
            throw std::invalid_argument("tower level coefficients must lie in V");
        std::vector<int> lead(h.vars().size(), 0);
        lead[vi] = static_cast<int>(d);
        ValResult lv = h.coeff(lead).val();
        if (!lv.exact() || lv.value.is_infinity())
            throw std::invalid_argument("tower level needs an exact leading coefficient");
        degrees_.push_back(d);
        // canonicalize to a single-variable polynomial named "T"
        MultiPoly uni(h.ctx(), {std::string("T")});
        for (const auto& [e, c] : h.terms()) uni.set_coeff({e[vi]}, c);
        h = uni;
    }
}

MultiPoly TowerSpec::level_in(long e, const std::string& var) const {
    return levels_.at(e).renamed("T", var);
}

namespace {

// c*f = sum_j out[j] * h^j with deg_var(out[j]) < deg_var(h).
std::pair<HahnSeries, std::vector<MultiPoly>> expand_in(const MultiPoly& f, const MultiPoly& h,
                                                        const std::string& var) {
    HahnSeries c = HahnSeries::one(f.ctx());
    std::vector<MultiPoly> coeffs;
    MultiPoly cur = f;
    while (true) {
        PseudoDivision d = pseudo_divide(cur, h, var);
        for (auto& r : coeffs) r = r.scaled(d.c);
        c = c * d.c;
        coeffs.push_back(d.r);
        if (d.q.is_zero()) break;
        cur = d.q;
    }
    return {c, coeffs};
}

}  // namespace

TowerReduction reduce_mod_tower(const MultiPoly& f, const TowerSpec& tower,
                                bool require_top_bound) {
    if (f.vars().size() != 1)
        throw std::invalid_argument("reduce_mod_tower takes a univariate polynomial in X0");
    const Ctx& ctx = f.ctx();
    long L = tower.size();

    TowerReduction out;
    out.c = HahnSeries::one(ctx);
    out.F = f.renamed(f.vars()[0], tower_var(0));
    long k = 0;
    while (true) {
        long dk = out.F.degree(out.F.var_index(tower_var(k)));
        if (k < L && dk < tower.level_degree(k)) {
            out.top_bound_certified = true;  // h_k bounds the top variable
            break;
        }
        if (k == L) {
            // Levels exhausted.  Degree <= 1 is below every legal level
            // degree; otherwise one extra level of degree dk+1 would
            // certify, so the minimal sufficient extension is L+1.
            out.top_bound_certified = dk <= 1;
            if (require_top_bound && !out.top_bound_certified)
                throw TowerTooShort("tower exhausted before the top degree bound held", L + 1);
            break;
        }
        // rewrite X_k-blocks of degree >= deg h_k through X_{k+1} = h_k(X_k)
        std::vector<std::string> nv = out.F.vars();
        nv.push_back(tower_var(k + 1));
        MultiPoly wide = out.F.with_vars(nv);
        MultiPoly hk = tower.level_in(k, tower_var(k)).with_vars(nv);
        auto [ck, coeffs] = expand_in(wide, hk, tower_var(k));
        MultiPoly next = MultiPoly::zero(ctx, nv);
        int top = wide.var_index(tower_var(k + 1));
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            next = next + coeffs[j].shifted(top, static_cast<long>(j));
        out.F = next;
        out.c = out.c * ck;
        ++k;
    }
    out.levels_used = k;
    return out;
}

MultiPoly ideal_membership_witness(const MultiPoly& P, const TowerSpec& tower) {
    // Highest tower variable present; every variable must be some X_e
    // with e <= tower size.
    const Ctx& ctx = P.ctx();
    long top = 0;
    for (const auto& v : P.vars()) {
        long lvl = -1;
        for (long cand = 0; cand <= tower.size(); ++cand)
            if (v == tower_var(cand)) lvl = cand;
        if (lvl < 0) throw std::invalid_argument("variable '" + v + "' outside the tower range");
        top = std::max(top, lvl);
    }
    std::vector<std::string> allv;
    for (long lvl = 0; lvl <= top; ++lvl) allv.push_back(tower_var(lvl));
    MultiPoly cur = P.with_vars(allv);
    for (long lvl = top; lvl >= 1; --lvl) {
        MultiPoly h = tower.level_in(lvl - 1, tower_var(lvl - 1)).with_vars(allv);
        cur = cur.substitute(tower_var(lvl), h);
    }
    // now univariate in X0
    MultiPoly uni(ctx, {tower_var(0)});
    for (const auto& [e, c] : cur.terms()) uni.set_coeff({e[0]}, c);
    return uni;
}

}  // namespace valring
