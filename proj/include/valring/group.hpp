#ifndef VALRING_GROUP_HPP
#define VALRING_GROUP_HPP

#include <compare>
#include <optional>
#include <vector>

#include "valring/rational.hpp"

namespace valring {

// An element of the value group: a vector of exact rationals under
// lexicographic order, or the distinguished top element Infinity used
// as the value of an exact zero.  Addition is componentwise and
// Infinity absorbs it.
class GroupElement {
public:
    GroupElement() = default;
    explicit GroupElement(std::vector<Rational> coords);
    static GroupElement zero(int rank);
    static GroupElement infinity();

    bool is_infinity() const { return inf_; }
    int rank() const { return static_cast<int>(coords_.size()); }
    const std::vector<Rational>& coords() const { return coords_; }
    const Rational& coord(int i) const { return coords_.at(i); }

    bool is_zero() const;

    GroupElement& operator+=(const GroupElement& o);
    friend GroupElement operator+(GroupElement a, const GroupElement& b) { return a += b; }
    GroupElement operator-() const;
    friend GroupElement operator-(const GroupElement& a, const GroupElement& b);

    // Integer scaling, n*Infinity = Infinity for n != 0 and is rejected for n = 0.
    friend GroupElement operator*(const Int& n, const GroupElement& g);
    friend GroupElement operator*(const Rational& r, const GroupElement& g);

    friend bool operator==(const GroupElement& a, const GroupElement& b);
    friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b);

private:
    std::vector<Rational> coords_;
    bool inf_ = false;
};

int compare(const GroupElement& a, const GroupElement& b);  // -1 / 0 / +1

const GroupElement& min(const GroupElement& a, const GroupElement& b);
const GroupElement& max(const GroupElement& a, const GroupElement& b);

// Affine continuation of a monotone sequence: term(i) = start + i*step
// for absolute indices at and beyond the explicit window.
struct AffineRule {
    GroupElement start;
    GroupElement step;  // must be > 0
};

// A strictly increasing sequence of finite group elements given by an
// explicit window plus an optional affine rule continuing it.  When a
// bound element is declared every term, including all rule terms, must
// stay strictly below it.
class MonotoneSequence {
public:
    MonotoneSequence() = default;
    MonotoneSequence(std::vector<GroupElement> window,
                     std::optional<AffineRule> rule = std::nullopt,
                     std::optional<GroupElement> bound = std::nullopt);

    const std::vector<GroupElement>& window() const { return window_; }
    const std::optional<AffineRule>& rule() const { return rule_; }
    const std::optional<GroupElement>& bound() const { return bound_; }

    bool has_rule() const { return rule_.has_value(); }
    long window_size() const { return static_cast<long>(window_.size()); }

    // Term at absolute index i; i must lie in the window unless a rule exists.
    GroupElement term(long i) const;

    // Largest index available when capped at `horizon` (window end if no rule).
    long horizon_cap(long horizon) const;

    // True when every term (including the whole affine tail) stays < a.
    bool dominated_by(const GroupElement& a) const;

    // Indices i in [lo, hi] with term(i) == v.  At most one exists.
    std::optional<long> find_term(const GroupElement& v, long lo, long hi) const;

private:
    std::vector<GroupElement> window_;
    std::optional<AffineRule> rule_;
    std::optional<GroupElement> bound_;
};

}  // namespace valring

#endif
