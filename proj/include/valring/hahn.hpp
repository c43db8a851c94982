#ifndef VALRING_HAHN_HPP
#define VALRING_HAHN_HPP

#include <memory>
#include <utility>
#include <vector>

#include "valring/fq.hpp"
#include "valring/group.hpp"

namespace valring {

// Ambient configuration: coefficient field F_q (q = p^k) and the rank
// of the value group Q^rank under lexicographic order.
struct FieldConfig {
    unsigned p = 2;
    Int q = 2;
    int rank = 1;
};

class HahnContext {
public:
    static std::shared_ptr<const HahnContext> make(const FieldConfig& cfg);

    const FqField& field() const { return field_; }
    int rank() const { return rank_; }
    const FieldConfig& config() const { return cfg_; }

    GroupElement gzero() const { return GroupElement::zero(rank_); }

private:
    HahnContext(const FieldConfig& cfg, unsigned p, unsigned k);
    FieldConfig cfg_;
    FqField field_;
    int rank_;
};

using Ctx = std::shared_ptr<const HahnContext>;

enum class ValCertainty { Exact, BelowPrecOnly };

// Result of the valuation map.  Exact means a stored leading term exists
// (or the series is the exact zero, value Infinity); BelowPrecOnly means
// nothing is stored below the precision cap, so only val >= prec is known.
struct ValResult {
    GroupElement value;
    ValCertainty certainty = ValCertainty::Exact;
    bool exact() const { return certainty == ValCertainty::Exact; }
};

// Finite-support series  sum c_gamma t^gamma  over F_q with an explicit
// precision cap: terms at or above `prec` are unknown, not zero.  The
// exact zero (no terms, prec = Infinity) is distinguished from a series
// that merely vanishes below a finite cap.
class HahnSeries {
public:
    HahnSeries() = default;
    explicit HahnSeries(Ctx ctx);  // exact zero
    HahnSeries(Ctx ctx, std::vector<std::pair<GroupElement, Fq>> terms,
               GroupElement prec = GroupElement::infinity());

    static HahnSeries zero(const Ctx& ctx) { return HahnSeries(ctx); }
    static HahnSeries one(const Ctx& ctx);
    static HahnSeries monomial(const Ctx& ctx, const Fq& c, const GroupElement& exp);
    static HahnSeries from_int(const Ctx& ctx, const Int& n);

    const Ctx& ctx() const { return ctx_; }
    const std::vector<std::pair<GroupElement, Fq>>& terms() const { return terms_; }
    const GroupElement& prec() const { return prec_; }

    bool is_exact() const { return prec_.is_infinity(); }
    bool is_exact_zero() const { return terms_.empty() && is_exact(); }
    // No stored terms: exact zero or zero up to the cap.
    bool is_zero_up_to_prec() const { return terms_.empty(); }

    ValResult val() const;

    // Restricts the precision cap to min(prec, cap), dropping capped terms.
    HahnSeries truncated(const GroupElement& cap) const;
    // Keeps only terms with exponent < cut, leaving precision untouched
    // apart from the cap needed to stay well formed.
    HahnSeries prefix(const GroupElement& cut) const;

    Fq coeff_at(const GroupElement& exp) const;  // zero if absent (below prec)

    HahnSeries operator-() const;
    friend HahnSeries operator+(const HahnSeries& a, const HahnSeries& b);
    friend HahnSeries operator-(const HahnSeries& a, const HahnSeries& b);
    friend HahnSeries operator*(const HahnSeries& a, const HahnSeries& b);

    HahnSeries scaled(const Fq& c) const;
    HahnSeries pow(const Int& e) const;

    // Identical stored data (terms and cap).  This is representational
    // equality, the right notion for golden files; semantic closeness is
    // `(a - b).is_zero_up_to_prec()`.
    friend bool operator==(const HahnSeries& a, const HahnSeries& b);
    friend bool operator!=(const HahnSeries& a, const HahnSeries& b) { return !(a == b); }

private:
    Ctx ctx_;
    std::vector<std::pair<GroupElement, Fq>> terms_;  // strictly increasing exponents
    GroupElement prec_ = GroupElement::infinity();
};

// Multiplicative inverse up to out_prec by leading-term peeling.
// Exact monomials invert exactly.  Throws NotInvertible on the exact
// zero, PrecisionTooLow when the stored data cannot certify out_prec.
// A nonnegative max_geometric_terms caps the expansion loop; the result
// then carries the precision actually certified instead of out_prec.
HahnSeries invert(const HahnSeries& x, const GroupElement& out_prec,
                  long max_geometric_terms = -1);

// a / b to the best precision the inputs support (both exact and b not
// a monomial requires the explicit out_prec overload).
HahnSeries divide(const HahnSeries& a, const HahnSeries& b);
HahnSeries divide(const HahnSeries& a, const HahnSeries& b, const GroupElement& out_prec,
                  long max_geometric_terms = -1);

bool is_in_valuation_ring(const HahnSeries& x);  // val >= 0
bool is_unit(const HahnSeries& x);               // val == 0

void check_same_ctx(const HahnSeries& a, const HahnSeries& b);

}  // namespace valring

#endif
