#ifndef VALRING_PSEUDO_HPP
#define VALRING_PSEUDO_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valring/poly.hpp"
#include "valring/threshold.hpp"

namespace valring {

// A finite window v_0..v_N of series standing for a pseudo convergent
// sequence, plus an optional generator continuing it.  The gamma
// profile caches val(v_{i+1} - v_i).
class PseudoSequence {
public:
    PseudoSequence() = default;
    explicit PseudoSequence(std::vector<HahnSeries> window,
                            std::function<HahnSeries(long)> rule = nullptr,
                            std::string rule_desc = {});

    const std::vector<HahnSeries>& window() const { return window_; }
    long size() const { return static_cast<long>(window_.size()); }
    const HahnSeries& term(long i) const;
    bool has_rule() const { return static_cast<bool>(rule_); }
    HahnSeries generated(long i) const;  // window or rule, absolute index
    const std::string& rule_desc() const { return rule_desc_; }

    // val(v_{i+1} - v_i); entries may be BelowPrecOnly.
    const std::vector<ValResult>& gamma_profile() const { return gamma_; }

    const Ctx& ctx() const;

    // Window restricted to [from, size).
    PseudoSequence tail(long from) const;

private:
    std::vector<HahnSeries> window_;
    std::function<HahnSeries(long)> rule_;
    std::string rule_desc_;
    std::vector<ValResult> gamma_;
};

struct ConvergenceCheck {
    bool ok = false;
    // first violating triple (i < j < k) when !ok
    std::array<long, 3> violation{-1, -1, -1};
};

// Checks val(v_i - v_k) < val(v_j - v_k) on every window triple i<j<k.
ConvergenceCheck check_pseudo_convergent(const PseudoSequence& s);

// val(x - v_i) = val(v_{i+1} - v_i) on the whole window.
bool is_pseudo_limit(const HahnSeries& x, const PseudoSequence& s);

struct ClassifyOptions {
    long budget = 2000000;                       // max candidates enumerated
    std::optional<GroupElement> gamma_star;      // fundamentality bound to test
    long min_tail = 3;                           // points a witness tail must span
};

struct Classification {
    enum class Kind { Algebraic, TranscendentalUpTo };
    Kind kind = Kind::TranscendentalUpTo;
    std::optional<MultiPoly> witness;  // minimal witness when Algebraic
    long onset = -1;                   // index past which the witness values increase
    long degree_bound = 0;
    long support_bound = 0;
    // set when the gamma profile exceeds the declared gamma_star
    std::optional<GroupElement> fundamental_up_to;
    long candidates_checked = 0;
};

// Enumerates f in V[T] with deg <= D and coefficient supports drawn
// from the window's exponent pool (at most H terms each); returns an
// Algebraic verdict with the minimal witness found, else
// TranscendentalUpTo(D, H).
Classification classify(const PseudoSequence& s, long D, long H,
                        const ClassifyOptions& opt = {});

// The minimal witness of classify, or NoWitnessInBounds.
MultiPoly minimal_degree_witness(const PseudoSequence& s, long D, long H,
                                 const ClassifyOptions& opt = {});

struct ImageSequenceResult {
    PseudoSequence image;  // the pseudo convergent tail (f(v_i))_{i >= onset}
    long onset = 0;
    // set when a pseudo limit x was supplied: f(x) is a pseudo limit of the tail
    std::optional<bool> limit_verified;
};

ImageSequenceResult image_sequence(const MultiPoly& f, const PseudoSequence& s,
                                   const std::optional<HahnSeries>& x = std::nullopt);

// Factorization target = d * u with val(u) = 0.  The membership form
// u in 1 + (m' cap V[fraction vars]) is recorded through the exact
// numerator polynomial N with N(fraction vars) = d*u: its constant term
// is d and every other coefficient has value strictly above val(d), so
// dividing by d lands in the maximal ideal.
struct UnitFactorization {
    HahnSeries d;
    HahnSeries u;
    std::vector<long> indices;  // chosen window index per level
    MultiPoly unit_numerator;   // N in Z0..Zn, exact coefficients
    // value of each nonzero Taylor term at the chosen indices
    std::map<std::vector<long>, GroupElement> term_values;
    HahnSeries target;
};

// Lemma-style factorization g(x) = d*u for deg g below the declared
// minimal witness degree s_min; scans the window for an index where the
// Taylor term values are pairwise distinct with the order-0 term
// strictly minimal.
UnitFactorization factor_below_degree(const MultiPoly& g, const HahnSeries& x,
                                      const PseudoSequence& s, long s_min,
                                      const GroupElement& work_prec);

struct LocalizeResult {
    HahnSeries dt_ratio;  // d/t, val >= 0
    HahnSeries u;
    UnitFactorization base;
};

// g(x)/t = (d/t) u with val(d/t) >= 0 and val(u) = 0.
LocalizeResult localize_representation(const MultiPoly& g, const HahnSeries& t,
                                       const HahnSeries& x, const PseudoSequence& s,
                                       long s_min, const GroupElement& work_prec);

struct ScaleFactorInput {
    MultiPoly g;                      // vars Y0..Yn in level order
    std::vector<HahnSeries> ys;      // y_e, with y_{e+1} = h_e(y_e)
    std::vector<PseudoSequence> seqs;
    std::vector<MultiPoly> hs;        // tower polynomials h_0..h_n (univariate)
    std::vector<HahnSeries> bs;      // scaling elements b_0..b_{n-1}
    GroupElement work_prec;
};

struct ScaleFactorResult {
    UnitFactorization fact;          // for the scaled target g(ytil_0..ytil_n)
    ThresholdCertificate cert;       // separation thresholds from the ordered-group solver
    std::vector<long> nus;           // final per-level thresholds
    std::vector<Int> scale_exponents;      // r_s per level boundary
    std::vector<HahnSeries> scaled_ys;
    // sampled val(g(ytil)) == val(g(vtil_i)) checks: indices and outcome
    std::vector<std::pair<std::vector<long>, bool>> sampled;
};

// Multi-level factorization with the b^r scaling: certifies thresholds
// through the ordered-values solver, then factors the scaled evaluation
// as d*u with val(u) = 0.
ScaleFactorResult scale_and_factor_multivar(const ScaleFactorInput& in);

// Direct Taylor-dichotomy factorization at unscaled window points,
// scanning diagonally from the window start.  No threshold certificate
// is produced; used where scaling is unavailable (the presentation
// builder's witness-point reductions).
UnitFactorization factor_at_point(const MultiPoly& g, const std::vector<HahnSeries>& ys,
                                  const std::vector<PseudoSequence>& seqs,
                                  const std::vector<long>& degree_bounds,
                                  const GroupElement& work_prec);

}  // namespace valring

#endif
