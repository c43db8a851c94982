#include "valring/pseudo.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "valring/errors.hpp"

namespace valring {

PseudoSequence::PseudoSequence(std::vector<HahnSeries> window,
                               std::function<HahnSeries(long)> rule, std::string rule_desc)
    : window_(std::move(window)), rule_(std::move(rule)), rule_desc_(std::move(rule_desc)) {
    if (window_.size() < 2)
        throw std::invalid_argument("pseudo sequence window needs at least 2 terms");
    for (std::size_t i = 0; i + 1 < window_.size(); ++i) {
        check_same_ctx(window_[i], window_[i + 1]);
        gamma_.push_back((window_[i + 1] - window_[i]).val());
    }
}

const HahnSeries& PseudoSequence::term(long i) const {
    if (i < 0 || i >= size()) throw std::invalid_argument("window index out of range");
    return window_[i];
}

HahnSeries PseudoSequence::generated(long i) const {
    if (i < size()) return term(i);
    if (!rule_) throw std::invalid_argument("index beyond window of a rule-less sequence");
    return rule_(i);
}

const Ctx& PseudoSequence::ctx() const { return window_.front().ctx(); }

PseudoSequence PseudoSequence::tail(long from) const {
    if (from < 0 || from > size() - 2)
        throw std::invalid_argument("tail start leaves fewer than 2 terms");
    std::vector<HahnSeries> w(window_.begin() + from, window_.end());
    return PseudoSequence(std::move(w), rule_, rule_desc_);
}

ConvergenceCheck check_pseudo_convergent(const PseudoSequence& s) {
    long n = s.size();
    if (n < 3) throw std::invalid_argument("pseudo convergence needs a window of length >= 3");
    // cache val(v_i - v_k) for i < k
    std::vector<std::vector<GroupElement>> pv(n, std::vector<GroupElement>(n));
    for (long i = 0; i < n; ++i) {
        for (long k = i + 1; k < n; ++k) {
            ValResult v = (s.term(i) - s.term(k)).val();
            if (!v.exact())
                throw PrecisionTooLow("difference value certain only below the cap at (" +
                                      std::to_string(i) + "," + std::to_string(k) + ")");
            pv[i][k] = v.value;
        }
    }
    ConvergenceCheck out;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            for (long k = j + 1; k < n; ++k)
                if (!(pv[i][k] < pv[j][k])) {
                    out.ok = false;
                    out.violation = {i, j, k};
                    return out;
                }
    out.ok = true;
    return out;
}

bool is_pseudo_limit(const HahnSeries& x, const PseudoSequence& s) {
    if (!check_pseudo_convergent(s).ok)
        throw std::invalid_argument("sequence is not pseudo convergent on its window");
    for (long i = 0; i + 1 < s.size(); ++i) {
        ValResult dv = (x - s.term(i)).val();
        const ValResult& g = s.gamma_profile()[i];
        if (!dv.exact() || !g.exact())
            throw PrecisionTooLow("pseudo limit check needs exact difference values");
        if (!(dv.value == g.value)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// classification

namespace {

// Field elements indexed 1..q-1 (0 is the zero element), little-endian
// base-p digits.
Fq field_element_at(const FqField& f, long idx) {
    std::vector<unsigned> digits(f.k(), 0);
    for (unsigned d = 0; d < f.k(); ++d) {
        digits[d] = static_cast<unsigned>(idx % f.p());
        idx /= f.p();
    }
    return f.element(std::move(digits));
}

// All coefficient choices: zero, then series with support drawn from
// `pool` (at most H exponents) ordered by support size, then by the
// (exponent set, coefficient tuple) encoding.
std::vector<HahnSeries> coefficient_space(const Ctx& ctx, const std::vector<GroupElement>& pool,
                                          long H, long budget) {
    long q = static_cast<long>(ctx->field().q());
    std::vector<HahnSeries> out;
    out.push_back(HahnSeries::zero(ctx));
    long P = static_cast<long>(pool.size());
    for (long k = 1; k <= std::min<long>(H, P); ++k) {
        // k-subsets of pool indices in lexicographic order
        std::vector<long> comb(k);
        for (long i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            // coefficient tuples over the nonzero field elements
            std::vector<long> cidx(k, 1);
            while (true) {
                std::vector<std::pair<GroupElement, Fq>> terms;
                for (long i = 0; i < k; ++i)
                    terms.emplace_back(pool[comb[i]], field_element_at(ctx->field(), cidx[i]));
                out.push_back(HahnSeries(ctx, std::move(terms)));
                if (static_cast<long>(out.size()) > budget)
                    throw SearchBudgetExceeded("coefficient space exceeds the search budget");
                long i = k - 1;
                for (; i >= 0; --i) {
                    if (cidx[i] + 1 < q) {
                        ++cidx[i];
                        break;
                    }
                    cidx[i] = 1;
                }
                if (i < 0) break;
            }
            long i = k - 1;
            for (; i >= 0; --i) {
                if (comb[i] < P - (k - i)) {
                    ++comb[i];
                    for (long j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                    break;
                }
            }
            if (i < 0) break;
        }
    }
    return out;
}

std::vector<GroupElement> exponent_pool(const PseudoSequence& s) {
    std::set<std::vector<Rational>> seen;
    std::vector<GroupElement> pool;
    GroupElement zero = GroupElement::zero(s.ctx()->rank());
    pool.push_back(zero);
    seen.insert(zero.coords());
    for (long i = 0; i < s.size(); ++i)
        for (const auto& [e, c] : s.term(i).terms()) {
            if (e < zero) continue;  // witnesses live in V[T]
            if (seen.insert(e.coords()).second) pool.push_back(e);
        }
    std::sort(pool.begin(), pool.end());
    return pool;
}

// Least onset such that vals strictly increase through the window end,
// spanning at least min_tail points; -1 when none.
long witness_onset(const std::vector<GroupElement>& vals, long min_tail) {
    long n = static_cast<long>(vals.size());
    long start = n - 1;
    while (start > 0 && vals[start - 1] < vals[start]) --start;
    if (n - start < min_tail) return -1;
    return start;
}

}  // namespace

Classification classify(const PseudoSequence& s, long D, long H, const ClassifyOptions& opt) {
    if (!check_pseudo_convergent(s).ok)
        throw std::invalid_argument("sequence is not pseudo convergent on its window");
    if (D < 1 || H < 1) throw std::invalid_argument("bounds must be >= 1");
    const Ctx& ctx = s.ctx();
    long N = s.size();

    Classification out;
    out.degree_bound = D;
    out.support_bound = H;
    if (opt.gamma_star) {
        for (const auto& g : s.gamma_profile())
            if (g.exact() && *opt.gamma_star < g.value) {
                out.fundamental_up_to = *opt.gamma_star;
                break;
            }
    }

    std::vector<GroupElement> pool = exponent_pool(s);
    std::vector<HahnSeries> space = coefficient_space(ctx, pool, H, opt.budget);
    long choices = static_cast<long>(space.size());

    // candidate count: sum over degrees d of choices^d * (choices - 1)
    {
        double est = 0, powd = 1;
        for (long d = 1; d <= D; ++d) {
            powd *= static_cast<double>(choices);
            est += powd * static_cast<double>(choices - 1) / choices;
            if (est > static_cast<double>(opt.budget))
                throw SearchBudgetExceeded("witness enumeration exceeds the search budget");
        }
    }

    // power tables v_i^j
    std::vector<std::vector<HahnSeries>> pows(N);
    for (long i = 0; i < N; ++i) {
        pows[i].push_back(HahnSeries::one(ctx));
        for (long j = 1; j <= D; ++j) pows[i].push_back(pows[i].back() * s.term(i));
    }

    struct Hit {
        long support;
        std::vector<long> key;
        MultiPoly f;
        long onset;
    };
    std::optional<Hit> best;

    for (long d = 1; d <= D && !best; ++d) {
        // coefficient index tuple c_0..c_d, leading index nonzero
        std::vector<long> idx(d + 1, 0);
        idx[d] = 1;
        while (true) {
            ++out.candidates_checked;
            // values val(f(v_i))
            std::vector<GroupElement> vals;
            vals.reserve(N);
            bool uncertain = false;
            for (long i = 0; i < N && !uncertain; ++i) {
                HahnSeries acc = HahnSeries::zero(ctx);
                for (long j = 0; j <= d; ++j)
                    if (idx[j]) acc = acc + space[idx[j]] * pows[i][j];
                ValResult v = acc.val();
                if (!v.exact())
                    uncertain = true;
                else
                    vals.push_back(v.value);
            }
            if (!uncertain) {
                long onset = witness_onset(vals, opt.min_tail);
                if (onset >= 0) {
                    long support = 0;
                    for (long j = 0; j <= d; ++j)
                        support += static_cast<long>(space[idx[j]].terms().size());
                    Hit h{support, idx, MultiPoly(ctx, {"T"}), onset};
                    for (long j = 0; j <= d; ++j)
                        h.f.set_coeff({static_cast<int>(j)}, space[idx[j]]);
                    if (!best || h.support < best->support ||
                        (h.support == best->support && h.key < best->key))
                        best = std::move(h);
                }
            }
            // next index tuple (low coefficient fastest; leading stays nonzero)
            long j = 0;
            for (; j <= d; ++j) {
                long floor_j = (j == d) ? 1 : 0;
                if (idx[j] + 1 < choices) {
                    ++idx[j];
                    break;
                }
                idx[j] = floor_j;
            }
            if (j > d) break;
        }
    }

    if (best) {
        out.kind = Classification::Kind::Algebraic;
        out.witness = best->f;
        out.onset = best->onset;
    } else {
        out.kind = Classification::Kind::TranscendentalUpTo;
    }
    return out;
}

MultiPoly minimal_degree_witness(const PseudoSequence& s, long D, long H,
                                 const ClassifyOptions& opt) {
    Classification c = classify(s, D, H, opt);
    if (c.kind != Classification::Kind::Algebraic)
        throw NoWitnessInBounds("no witness of degree <= " + std::to_string(D) +
                                " with support <= " + std::to_string(H));
    return *c.witness;
}

ImageSequenceResult image_sequence(const MultiPoly& f, const PseudoSequence& s,
                                   const std::optional<HahnSeries>& x) {
    if (f.vars().size() != 1 || !f.univariate_in(0))
        throw std::invalid_argument("image of a univariate polynomial expected");
    if (f.degree(0) < 1) throw DegenerateImage("constant polynomial: all differences vanish");
    if (!check_pseudo_convergent(s).ok)
        throw std::invalid_argument("sequence is not pseudo convergent on its window");
    long N = s.size();
    std::vector<HahnSeries> w;
    w.reserve(N);
    for (long i = 0; i < N; ++i) w.push_back(f.eval({s.term(i)}));

    // least onset whose tail has a strictly increasing difference profile
    for (long onset = 0; onset + 2 < N; ++onset) {
        bool ok = true;
        GroupElement prev;
        for (long i = onset; i + 1 < N && ok; ++i) {
            HahnSeries diff = w[i + 1] - w[i];
            if (diff.is_exact_zero()) {
                ok = false;
                break;
            }
            ValResult dv = diff.val();
            if (!dv.exact()) throw PrecisionTooLow("image difference value uncertain");
            if (i > onset && !(prev < dv.value)) ok = false;
            prev = dv.value;
        }
        if (!ok) continue;
        ImageSequenceResult out;
        out.onset = onset;
        std::vector<HahnSeries> tail(w.begin() + onset, w.end());
        out.image = PseudoSequence(std::move(tail));
        if (x) {
            HahnSeries fx = f.eval({*x});
            out.limit_verified = is_pseudo_limit(fx, out.image);
        }
        return out;
    }
    throw OnsetNotFound("no pseudo convergent tail within the window");
}

// ---------------------------------------------------------------------------
// the factorization engine (single- and multi-level)

namespace {

struct EngineInput {
    MultiPoly g;
    std::vector<HahnSeries> ys;
    std::vector<const PseudoSequence*> seqs;
    std::vector<long> degree_bounds;  // exclusive: deg_{Y_e} g < bound_e
    std::vector<HahnSeries> bs;       // size n (levels minus one)
    std::vector<Int> rfac;            // scaling exponents r_s, size n
    GroupElement work_prec;
};

struct Engine {
    const Ctx ctx;
    int nlev;
    MultiPoly g;
    std::vector<HahnSeries> ytil;
    std::vector<std::vector<HahnSeries>> vtil;
    std::vector<std::vector<GroupElement>> gam;       // unscaled profiles
    std::vector<GroupElement> shift;                  // r_{e-1} val(b_{e-1})
    std::vector<long> caps;                           // usable profile index cap
    std::vector<std::optional<GroupElement>> bounds;  // val(b_e)
    std::vector<Int> rfac;
    GroupElement work_prec;

    std::map<std::vector<long>, MultiPoly> derivs;
    std::map<std::vector<long>, std::optional<GroupElement>> betas;
    std::map<std::vector<long>, std::vector<long>> memo;
    std::optional<ThresholdCertificate> top_cert;
    std::vector<long> sep_index;  // separating indices for l = 0

    explicit Engine(const EngineInput& in)
        : ctx(in.g.ctx()),
          nlev(static_cast<int>(in.ys.size())),
          g(in.g),
          rfac(in.rfac),
          work_prec(in.work_prec) {
        if (in.seqs.size() != in.ys.size() || in.degree_bounds.size() != in.ys.size())
            throw std::invalid_argument("level data sizes disagree");
        if (nlev >= 2 && static_cast<int>(in.bs.size()) != nlev - 1)
            throw std::invalid_argument("one scaling element per level boundary required");
        if (g.is_zero()) throw std::invalid_argument("cannot factor the zero polynomial");
        if (static_cast<int>(g.vars().size()) != nlev)
            throw std::invalid_argument("polynomial arity must match the level count");
        if (!g.coefficients_in_valuation_ring())
            throw std::invalid_argument("polynomial coefficients must lie in V");
        for (int e = 0; e < nlev; ++e)
            if (g.degree(e) >= in.degree_bounds[e])
                throw std::invalid_argument("degree bound violated on level " +
                                            std::to_string(e));

        GroupElement zero = GroupElement::zero(ctx->rank());
        // scaled points and windows; level 0 is never scaled
        shift.assign(nlev, zero);
        std::vector<HahnSeries> scale(nlev, HahnSeries::one(ctx));
        for (int e = 1; e < nlev; ++e) {
            const HahnSeries& b = in.bs[e - 1];
            ValResult vb = b.val();
            if (!vb.exact() || vb.value.is_infinity())
                throw std::invalid_argument("scaling element needs an exact finite value");
            scale[e] = b.pow(rfac[e - 1]);
            shift[e] = rfac[e - 1] * vb.value;
        }
        ytil.reserve(nlev);
        for (int e = 0; e < nlev; ++e) ytil.push_back(in.ys[e] * scale[e]);

        for (int e = 0; e < nlev; ++e) {
            const PseudoSequence& s = *in.seqs[e];
            if (s.size() < 3)
                throw std::invalid_argument("level windows need at least 3 terms");
            if (!check_pseudo_convergent(s).ok)
                throw Error("level " + std::to_string(e) + " is not pseudo convergent");
            if (!is_pseudo_limit(in.ys[e], s))
                throw Error("level " + std::to_string(e) +
                            " point is not a pseudo limit of its sequence");
            std::vector<HahnSeries> sw;
            std::vector<GroupElement> sg;
            for (long i = 0; i < s.size(); ++i) sw.push_back(s.term(i) * scale[e]);
            for (const auto& v : s.gamma_profile()) sg.push_back(v.value);
            vtil.push_back(std::move(sw));
            gam.push_back(std::move(sg));
            caps.push_back(s.size() - 2);
        }
        // paper hypothesis: each b_s value-dominates the terms of levels <= s
        // (exact zeros carry no value to dominate), and the solver will
        // additionally demand domination of the difference values.
        bounds.assign(nlev, std::nullopt);
        for (int sidx = 0; sidx + 1 < nlev; ++sidx) {
            GroupElement vb = in.bs[sidx].val().value;
            for (int e = 0; e <= sidx; ++e)
                for (long i = 0; i < in.seqs[e]->size(); ++i) {
                    ValResult tv = in.seqs[e]->term(i).val();
                    if (tv.value.is_infinity()) continue;
                    if (!(tv.value < vb))
                        throw InvalidBound("scaling element " + std::to_string(sidx) +
                                           " does not dominate the term values of level " +
                                           std::to_string(e));
                }
            bounds[sidx] = vb;
        }
    }

    GroupElement scaled_gamma(int e, long i) const { return gam[e][i] + shift[e]; }

    const MultiPoly& deriv(const std::vector<long>& l) {
        auto it = derivs.find(l);
        if (it != derivs.end()) return it->second;
        return derivs.emplace(l, hasse_derivative_multi(g, l)).first->second;
    }

    const std::optional<GroupElement>& beta_at(const std::vector<long>& l) {
        auto it = betas.find(l);
        if (it != betas.end()) return it->second;
        HahnSeries v = deriv(l).eval(ytil);
        std::optional<GroupElement> b;
        if (!v.is_exact_zero()) {
            ValResult vr = v.val();
            if (!vr.exact())
                throw PrecisionTooLow("derivative value at the scaled point is uncertain");
            b = vr.value;
        }
        return betas.emplace(l, std::move(b)).first->second;
    }

    std::vector<long> part1(const std::vector<long>& l);

    // Taylor term values A_k = val(D^(base+k)g(vtil_idx)) + sum k_e
    // gamma~_e(idx_e) over all k <= degs; exact-zero terms are skipped.

    void scan_values(const std::vector<long>& base, const std::vector<long>& degs,
                     const std::vector<long>& idx,
                     std::map<std::vector<long>, GroupElement>& out) {
        std::vector<long> k(nlev, 0);
        while (true) {
            std::vector<long> lk(nlev);
            for (int e = 0; e < nlev; ++e) lk[e] = base[e] + k[e];
            std::vector<HahnSeries> point;
            point.reserve(nlev);
            for (int e = 0; e < nlev; ++e) point.push_back(vtil[e][idx[e]]);
            HahnSeries dv = deriv(lk).eval(point);
            if (!dv.is_exact_zero()) {
                ValResult vr = dv.val();
                if (!vr.exact()) throw PrecisionTooLow("Taylor term value uncertain");
                GroupElement a = vr.value;
                for (int e = 0; e < nlev; ++e)
                    if (k[e] > 0) a += Int(k[e]) * scaled_gamma(e, idx[e]);
                out.emplace(k, std::move(a));
            }
            int e = 0;
            for (; e < nlev; ++e) {
                if (k[e] < degs[e]) {
                    ++k[e];
                    for (int r = 0; r < e; ++r) k[r] = 0;
                    break;
                }
            }
            if (e == nlev) break;
        }
    }
};

// Certifies val(D^(l)g at the scaled point) == val(... at window points)
// past the returned per-level thresholds; the recursion mirrors the
// total-degree induction of the underlying lemma.
std::vector<long> Engine::part1(const std::vector<long>& l) {
    auto mit = memo.find(l);
    if (mit != memo.end()) return mit->second;

    const MultiPoly& D = deriv(l);
    std::vector<long> nus(nlev, 0);
    if (D.is_zero()) {
        memo[l] = nus;
        return nus;
    }
    std::vector<long> degs(nlev);
    for (int e = 0; e < nlev; ++e) degs[e] = std::max<long>(D.degree(e), 0);

    // recurse into every proper derivative first
    {
        std::vector<long> k(nlev, 0);
        while (true) {
            int e = 0;
            for (; e < nlev; ++e) {
                if (k[e] < degs[e]) {
                    ++k[e];
                    for (int r = 0; r < e; ++r) k[r] = 0;
                    break;
                }
            }
            if (e == nlev) break;
            std::vector<long> lk(nlev);
            for (int r = 0; r < nlev; ++r) lk[r] = l[r] + k[r];
            std::vector<long> sub = part1(lk);
            for (int r = 0; r < nlev; ++r) nus[r] = std::max(nus[r], sub[r]);
        }
    }

    // separation thresholds for this derivative's own Taylor family
    ThresholdProblem prob;
    prob.mode = ThresholdMode::Distinct;
    for (int e = 0; e < nlev; ++e) {
        std::vector<long> ms;
        for (long m = 0; m <= degs[e]; ++m) ms.push_back(m);
        prob.multipliers.push_back(std::move(ms));
        prob.sequences.emplace_back(
            std::vector<GroupElement>(gam[e].begin(), gam[e].end()));
        prob.bounds.push_back(bounds[e]);
        if (e + 1 < nlev) prob.shift_factor.push_back(rfac[e]);
    }
    {
        std::vector<long> k(nlev, 0);
        while (true) {
            std::vector<long> lk(nlev);
            for (int e = 0; e < nlev; ++e) lk[e] = l[e] + k[e];
            if (beta_at(lk)) {
                std::vector<int> key(k.begin(), k.end());
                prob.betas[key] = *beta_at(lk);
            }
            int e = 0;
            for (; e < nlev; ++e) {
                if (k[e] < degs[e]) {
                    ++k[e];
                    for (int r = 0; r < e; ++r) k[r] = 0;
                    break;
                }
            }
            if (e == nlev) break;
        }
    }
    if (!beta_at(l))
        throw Error("derivative vanishes at the scaled point; no factorization target");
    if (prob.betas.size() >= 2) {
        ThresholdCertificate cert = solve_threshold_nd(prob, caps);
        for (int e = 0; e < nlev; ++e) nus[e] = std::max(nus[e], cert.nus[e]);
        bool top = std::all_of(l.begin(), l.end(), [](long x) { return x == 0; });
        if (top) top_cert = cert;
    } else if (std::all_of(l.begin(), l.end(), [](long x) { return x == 0; })) {
        ThresholdCertificate cert;
        cert.mode = ThresholdMode::Distinct;
        cert.nus.assign(nlev, 0);
        cert.shifts = threshold_shifts(prob);
        cert.shift_factors = threshold_shift_factors(prob);
        cert.verified_horizon = caps;
        top_cert = cert;
    }

    // dichotomy: advance diagonally until the order-0 term value is the
    // strict minimum (ties advance the indices, as in the lemma's
    // "large enough i")
    bool found = false;
    for (long step = 0;; ++step) {
        std::vector<long> idx(nlev);
        bool room = false;
        for (int e = 0; e < nlev; ++e) {
            idx[e] = std::min(nus[e] + 1 + step, caps[e]);
            room = room || nus[e] + 1 + step <= caps[e];
        }
        std::map<std::vector<long>, GroupElement> av;
        scan_values(l, degs, idx, av);
        std::vector<long> k0(nlev, 0);
        auto a0 = av.find(k0);
        bool ok = a0 != av.end();
        if (ok)
            for (const auto& [k, a] : av)
                if (k != k0 && !(a0->second < a)) ok = false;
        if (ok) {
            bool distinct = true;
            for (auto i1 = av.begin(); i1 != av.end() && distinct; ++i1)
                for (auto i2 = std::next(i1); i2 != av.end() && distinct; ++i2)
                    if (i1->second == i2->second) distinct = false;
            if (distinct) {
                for (int e = 0; e < nlev; ++e) nus[e] = std::max(nus[e], idx[e] - 1);
                bool topl = std::all_of(l.begin(), l.end(), [](long x) { return x == 0; });
                if (topl) sep_index = idx;
                found = true;
                break;
            }
        }
        if (!room) break;
    }
    if (!found)
        throw NoSeparatingIndex("no window index separates the Taylor term values");

    memo[l] = nus;
    return nus;
}

// Geometric-expansion budget: divisions certify at least this many
// valuation steps beyond the quotient's leading term, never more work.
constexpr long kDivisionBudget = 24;

UnitFactorization run_engine_factor(Engine& eng, std::vector<long>* nus_out) {
    std::vector<long> zero_l(eng.nlev, 0);
    std::vector<long> nus = eng.part1(zero_l);
    if (nus_out) *nus_out = nus;
    const std::vector<long>& idx = eng.sep_index;

    std::vector<long> degs(eng.nlev);
    for (int e = 0; e < eng.nlev; ++e) degs[e] = std::max<long>(eng.g.degree(e), 0);
    std::map<std::vector<long>, GroupElement> av;
    eng.scan_values(zero_l, degs, idx, av);

    const Ctx& ctx = eng.ctx;
    std::vector<HahnSeries> point;
    for (int e = 0; e < eng.nlev; ++e) point.push_back(eng.vtil[e][idx[e]]);

    UnitFactorization out;
    out.indices = idx;
    out.term_values = av;
    out.d = eng.g.eval(point);
    out.target = eng.g.eval(eng.ytil);
    out.u = divide(out.target, out.d, eng.work_prec, kDivisionBudget);
    ValResult vu = out.u.val();
    if (!vu.exact() || !vu.value.is_zero())
        throw Error("unit factor failed the val(u) = 0 check");

    // N(Z) = sum_k D^(k)g(vtil) * prod (vtil_{e,i+1} - vtil_{e,i})^{k_e} Z^k,
    // the exact Taylor numerator: N(fracs) = target = d*u.
    std::vector<std::string> zvars;
    for (int e = 0; e < eng.nlev; ++e) {
        std::ostringstream os;
        os << 'Z' << e;
        zvars.push_back(os.str());
    }
    std::vector<HahnSeries> diffs, fracs;
    for (int e = 0; e < eng.nlev; ++e) {
        HahnSeries diff = eng.vtil[e][idx[e] + 1] - eng.vtil[e][idx[e]];
        diffs.push_back(diff);
        fracs.push_back(
            divide(eng.ytil[e] - eng.vtil[e][idx[e]], diff, eng.work_prec, kDivisionBudget));
    }
    GroupElement vd = out.d.val().value;
    MultiPoly num = MultiPoly::constant(ctx, zvars, out.d);
    std::vector<long> k(eng.nlev, 0);
    while (true) {
        int e = 0;
        for (; e < eng.nlev; ++e) {
            if (k[e] < degs[e]) {
                ++k[e];
                for (int r = 0; r < e; ++r) k[r] = 0;
                break;
            }
        }
        if (e == eng.nlev) break;
        std::vector<long> lk(k);
        HahnSeries dv = eng.deriv(lk).eval(point);
        if (dv.is_exact_zero()) continue;
        for (int r = 0; r < eng.nlev; ++r)
            if (k[r] > 0) dv = dv * diffs[r].pow(k[r]);
        // membership of dv/d in the maximal ideal, as a value statement
        ValResult cv = dv.val();
        if (!cv.exact() || !(vd < cv.value))
            throw Error("numerator coefficient does not divide into the maximal ideal");
        std::vector<int> key(k.begin(), k.end());
        num.set_coeff(key, dv);
    }
    out.unit_numerator = num;

    // consistency: the numerator at the fraction variables reproduces
    // the target (and hence d*u) up to the available precision
    HahnSeries n2 = num.eval(fracs);
    if (!(n2 - out.target).is_zero_up_to_prec())
        throw Error("unit numerator disagrees with the target");
    if (!(out.d * out.u - out.target).is_zero_up_to_prec())
        throw Error("factorization identity failed");
    return out;
}

}  // namespace

UnitFactorization factor_below_degree(const MultiPoly& g, const HahnSeries& x,
                                      const PseudoSequence& s, long s_min,
                                      const GroupElement& work_prec) {
    if (g.vars().size() != 1 || !g.univariate_in(0))
        throw std::invalid_argument("factor_below_degree takes a univariate polynomial");
    if (g.degree(0) >= s_min)
        throw std::invalid_argument("deg g must be below the declared witness degree");
    EngineInput in{g.renamed(g.vars()[0], "Y0"), {x}, {&s}, {s_min}, {}, {}, work_prec};
    Engine eng(in);
    return run_engine_factor(eng, nullptr);
}

LocalizeResult localize_representation(const MultiPoly& g, const HahnSeries& t,
                                       const HahnSeries& x, const PseudoSequence& s,
                                       long s_min, const GroupElement& work_prec) {
    ValResult vt = t.val();
    if (!vt.exact() || vt.value.is_infinity())
        throw std::invalid_argument("denominator needs an exact finite value");
    HahnSeries gx = g.eval(std::vector<HahnSeries>(1, x));
    ValResult vg = gx.val();
    if (!vg.exact()) throw PrecisionTooLow("numerator value uncertain");
    if (vg.value < vt.value)
        throw ValueObstruction("val(g(x)) < val(t): not an element of the valuation ring");
    LocalizeResult out;
    out.base = factor_below_degree(g, x, s, s_min, work_prec);
    out.dt_ratio = divide(out.base.d, t, work_prec, kDivisionBudget);
    ValResult vr = out.dt_ratio.val();
    if (!vr.exact() || vr.value < GroupElement::zero(x.ctx()->rank()))
        throw Error("d/t fell outside the valuation ring");
    out.u = out.base.u;
    return out;
}

ScaleFactorResult scale_and_factor_multivar(const ScaleFactorInput& in) {
    int n1 = static_cast<int>(in.ys.size());
    if (n1 < 1) throw std::invalid_argument("at least one level required");
    if (in.seqs.size() != in.ys.size() || in.hs.size() != in.ys.size())
        throw std::invalid_argument("one sequence and one tower polynomial per level");
    if (static_cast<int>(in.bs.size()) != n1 - 1)
        throw std::invalid_argument("one scaling element per level boundary required");

    // tower polynomial degrees drive both the degree bounds and the
    // scaling exponents r_s = 2 max deg h_e - 2
    std::vector<long> degree_bounds;
    for (int e = 0; e < n1; ++e) {
        const MultiPoly& h = in.hs[e];
        if (h.vars().size() != 1 || !h.univariate_in(0))
            throw std::invalid_argument("tower polynomials must be univariate");
        long d = h.degree(0);
        if (d <= 1) throw std::invalid_argument("tower polynomial degree must exceed 1");
        if (!h.coefficients_in_valuation_ring())
            throw std::invalid_argument("tower polynomial coefficients must lie in V");
        degree_bounds.push_back(d);
    }
    std::vector<Int> rfac;
    {
        long mx = 0;
        for (int s = 0; s + 1 < n1; ++s) {
            mx = std::max(mx, degree_bounds[s]);
            rfac.push_back(Int(2 * mx - 2));
        }
    }
    // tower relation y_{e+1} = h_e(y_e)
    for (int e = 0; e + 1 < n1; ++e) {
        HahnSeries img = in.hs[e].eval(std::vector<HahnSeries>(1, in.ys[e]));
        if (!(img - in.ys[e + 1]).is_zero_up_to_prec())
            throw Error("tower relation fails at level " + std::to_string(e));
    }

    std::vector<const PseudoSequence*> seqs;
    for (const auto& s : in.seqs) seqs.push_back(&s);
    EngineInput ein{in.g, in.ys, seqs, degree_bounds, in.bs, rfac, in.work_prec};
    Engine eng(ein);

    ScaleFactorResult out;
    out.fact = run_engine_factor(eng, &out.nus);
    out.cert = *eng.top_cert;
    out.scale_exponents = rfac;
    out.scaled_ys = eng.ytil;

    // sampled verification of val(g(ytil)) == val(g(vtil_i))
    GroupElement lhs = eng.g.eval(eng.ytil).val().value;
    std::vector<std::vector<long>> picks(n1);
    for (int e = 0; e < n1; ++e) {
        std::set<long> s;
        s.insert(std::min(out.nus[e] + 1, eng.caps[e]));
        s.insert(std::min(out.nus[e] + 1 + (eng.caps[e] - out.nus[e]) / 2, eng.caps[e]));
        s.insert(eng.caps[e]);
        picks[e].assign(s.begin(), s.end());
    }
    std::vector<long> sel(n1, 0);
    while (true) {
        std::vector<long> idx(n1);
        for (int e = 0; e < n1; ++e) idx[e] = picks[e][sel[e]];
        std::vector<HahnSeries> point;
        for (int e = 0; e < n1; ++e) point.push_back(eng.vtil[e][idx[e]]);
        GroupElement rhs = eng.g.eval(point).val().value;
        out.sampled.emplace_back(idx, rhs == lhs);
        int e = 0;
        for (; e < n1; ++e) {
            if (sel[e] + 1 < static_cast<long>(picks[e].size())) {
                ++sel[e];
                for (int r = 0; r < e; ++r) sel[r] = 0;
                break;
            }
        }
        if (e == n1 || out.sampled.size() >= 16) break;
    }
    return out;
}

}  // namespace valring
