#include "valring/group.hpp"

#include <sstream>
#include <stdexcept>

#include "valring/errors.hpp"

namespace valring {

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string to_string(const Int& n) {
    std::ostringstream os;
    os << n;
    return os.str();
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    std::size_t slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(text));
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + text + "'");
        return make_rational(std::move(num), std::move(den));
    } catch (const std::runtime_error& e) {
        throw ParseError("bad rational literal '" + text + "'");
    }
}

GroupElement::GroupElement(std::vector<Rational> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("group element needs rank >= 1");
}

GroupElement GroupElement::zero(int rank) {
    if (rank < 1) throw std::invalid_argument("group rank must be >= 1");
    return GroupElement(std::vector<Rational>(rank, Rational(0)));
}

GroupElement GroupElement::infinity() {
    GroupElement g;
    g.inf_ = true;
    return g;
}

bool GroupElement::is_zero() const {
    if (inf_) return false;
    for (const auto& c : coords_)
        if (c != 0) return false;
    return true;
}

GroupElement& GroupElement::operator+=(const GroupElement& o) {
    if (inf_ || o.inf_) {
        coords_.clear();
        inf_ = true;
        return *this;
    }
    if (coords_.size() != o.coords_.size()) throw Error("rank mismatch in group addition");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
}

GroupElement GroupElement::operator-() const {
    if (inf_) throw Error("cannot negate Infinity");
    GroupElement g(*this);
    for (auto& c : g.coords_) c = -c;
    return g;
}

GroupElement operator-(const GroupElement& a, const GroupElement& b) {
    if (a.inf_ && !b.inf_) return GroupElement::infinity();
    return a + (-b);
}

GroupElement operator*(const Int& n, const GroupElement& g) {
    if (g.inf_) {
        if (n == 0) throw Error("0 * Infinity is undefined");
        return GroupElement::infinity();
    }
    GroupElement r(g);
    for (auto& c : r.coords_) c *= Rational(n);
    return r;
}

GroupElement operator*(const Rational& x, const GroupElement& g) {
    if (g.inf_) {
        if (x == 0) throw Error("0 * Infinity is undefined");
        return GroupElement::infinity();
    }
    GroupElement r(g);
    for (auto& c : r.coords_) c *= x;
    return r;
}

bool operator==(const GroupElement& a, const GroupElement& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.coords_ == b.coords_;
}

std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
    if (a.inf_ && b.inf_) return std::strong_ordering::equal;
    if (a.inf_) return std::strong_ordering::greater;
    if (b.inf_) return std::strong_ordering::less;
    if (a.coords_.size() != b.coords_.size()) throw Error("rank mismatch in group comparison");
    for (std::size_t i = 0; i < a.coords_.size(); ++i) {
        if (a.coords_[i] < b.coords_[i]) return std::strong_ordering::less;
        if (a.coords_[i] > b.coords_[i]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

int compare(const GroupElement& a, const GroupElement& b) {
    auto c = a <=> b;
    if (c < 0) return -1;
    if (c > 0) return 1;
    return 0;
}

const GroupElement& min(const GroupElement& a, const GroupElement& b) { return b < a ? b : a; }
const GroupElement& max(const GroupElement& a, const GroupElement& b) { return a < b ? b : a; }

MonotoneSequence::MonotoneSequence(std::vector<GroupElement> window,
                                   std::optional<AffineRule> rule,
                                   std::optional<GroupElement> bound)
    : window_(std::move(window)), rule_(std::move(rule)), bound_(std::move(bound)) {
    for (std::size_t i = 0; i + 1 < window_.size(); ++i)
        if (!(window_[i] < window_[i + 1]))
            throw std::invalid_argument("monotone sequence window must strictly increase");
    for (const auto& g : window_)
        if (g.is_infinity()) throw std::invalid_argument("Infinity cannot appear in a sequence");
    if (rule_) {
        if (rule_->step.is_infinity() || rule_->start.is_infinity())
            throw std::invalid_argument("affine rule must be finite");
        if (!(GroupElement::zero(rule_->step.rank()) < rule_->step))
            throw std::invalid_argument("affine rule step must be positive");
        if (!window_.empty()) {
            GroupElement next = rule_->start + Int(static_cast<long>(window_.size())) * rule_->step;
            if (!(window_.back() < next))
                throw std::invalid_argument("affine rule must continue the window upward");
        }
    }
    if (!window_.empty() || rule_) {
        // nonempty content required
    } else {
        throw std::invalid_argument("monotone sequence needs a window or a rule");
    }
    if (bound_ && !dominated_by(*bound_))
        throw InvalidBound("declared bound does not dominate the sequence");
}

GroupElement MonotoneSequence::term(long i) const {
    if (i < 0) throw std::invalid_argument("negative sequence index");
    if (i < static_cast<long>(window_.size())) return window_[i];
    if (!rule_) throw std::invalid_argument("index beyond window of a rule-less sequence");
    return rule_->start + Int(i) * rule_->step;
}

long MonotoneSequence::horizon_cap(long horizon) const {
    long last = static_cast<long>(window_.size()) - 1;
    if (rule_) return horizon;
    return std::min(horizon, last);
}

bool MonotoneSequence::dominated_by(const GroupElement& a) const {
    if (a.is_infinity()) return true;
    for (const auto& g : window_)
        if (!(g < a)) return false;
    if (!rule_) return true;
    // start + i*step < a for every i >= window size.  The leading nonzero
    // coordinate k of step grows without bound, so domination needs the
    // prefix of `start` before k to sit strictly below the prefix of `a`.
    long first = static_cast<long>(window_.size());
    GroupElement probe = rule_->start + Int(first) * rule_->step;
    if (!(probe < a)) return false;
    int k = 0;
    while (k < rule_->step.rank() && rule_->step.coord(k) == 0) ++k;
    for (int i = 0; i < k; ++i) {
        if (rule_->start.coord(i) < a.coord(i)) return true;
        if (rule_->start.coord(i) > a.coord(i)) return false;
    }
    return false;  // equality on the prefix: the k-th coordinate escapes
}

std::optional<long> MonotoneSequence::find_term(const GroupElement& v, long lo, long hi) const {
    if (lo < 0) lo = 0;
    if (hi < lo) return std::nullopt;
    long wlast = static_cast<long>(window_.size()) - 1;
    long wlo = std::min(lo, wlast + 1), whi = std::min(hi, wlast);
    if (wlo <= whi) {
        long a = wlo, b = whi;
        while (a <= b) {  // window is strictly increasing
            long m = a + (b - a) / 2;
            int c = compare(window_[m], v);
            if (c == 0) return m;
            if (c < 0)
                a = m + 1;
            else
                b = m - 1;
        }
    }
    if (rule_ && hi > wlast) {
        // start + i*step = v  =>  i must be the same rational on every
        // coordinate where step is nonzero and exact elsewhere.
        std::optional<Rational> idx;
        for (int c = 0; c < rule_->step.rank(); ++c) {
            const Rational& s = rule_->step.coord(c);
            Rational diff = v.coord(c) - rule_->start.coord(c);
            if (s == 0) {
                if (diff != 0) return std::nullopt;
            } else {
                Rational i = diff / s;
                if (idx && *idx != i) return std::nullopt;
                idx = i;
            }
        }
        if (!idx || denominator(*idx) != 1) return std::nullopt;
        Int n = numerator(*idx);
        long lo_rule = std::max(lo, wlast + 1);
        if (n < lo_rule || n > hi) return std::nullopt;
        return static_cast<long>(n);
    }
    return std::nullopt;
}

}  // namespace valring
