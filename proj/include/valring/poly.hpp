#ifndef VALRING_POLY_HPP
#define VALRING_POLY_HPP

#include <map>
#include <string>
#include <vector>

#include "valring/hahn.hpp"

namespace valring {

// Multivariate polynomial over the truncated series ring.  Terms map
// exponent tuples (one entry per variable, in `vars` order) to nonzero
// series coefficients.  Coefficients that are exactly zero are never
// stored; coefficients that merely vanish below a finite precision cap
// are kept, since they are not provably zero.
class MultiPoly {
public:
    MultiPoly() = default;
    MultiPoly(Ctx ctx, std::vector<std::string> vars);

    static MultiPoly zero(const Ctx& ctx, std::vector<std::string> vars);
    static MultiPoly constant(const Ctx& ctx, std::vector<std::string> vars,
                              const HahnSeries& c);
    static MultiPoly variable(const Ctx& ctx, std::vector<std::string> vars,
                              const std::string& var);

    const Ctx& ctx() const { return ctx_; }
    const std::vector<std::string>& vars() const { return vars_; }
    const std::map<std::vector<int>, HahnSeries>& terms() const { return terms_; }

    int var_index(const std::string& var) const;  // throws if absent

    bool is_zero() const { return terms_.empty(); }
    // All stored coefficients vanish below their caps (zero up to precision).
    bool vanishes_up_to_prec() const;

    long degree(int var) const;        // -1 for the zero polynomial
    long degree(const std::string& var) const { return degree(var_index(var)); }
    long total_degree() const;

    HahnSeries coeff(const std::vector<int>& exps) const;
    // Coefficient of var^k as a polynomial in the remaining exponents
    // (the var slot of every key is zeroed).
    MultiPoly coeff_in(int var, long k) const;

    void set_coeff(const std::vector<int>& exps, HahnSeries c);

    MultiPoly operator-() const;
    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);

    MultiPoly scaled(const HahnSeries& c) const;
    MultiPoly shifted(int var, long k) const;  // multiply by var^k

    // Reinterprets this polynomial over a variable superset/reordering.
    MultiPoly with_vars(const std::vector<std::string>& new_vars) const;
    MultiPoly renamed(const std::string& from, const std::string& to) const;

    HahnSeries eval(const std::vector<HahnSeries>& point) const;
    HahnSeries eval(const std::map<std::string, HahnSeries>& point) const;
    MultiPoly substitute(const std::string& var, const MultiPoly& repl) const;

    bool univariate_in(int var) const;
    // True when every coefficient has val >= 0 (exact), i.e. lies in V.
    bool coefficients_in_valuation_ring() const;

private:
    Ctx ctx_;
    std::vector<std::string> vars_;
    std::map<std::vector<int>, HahnSeries> terms_;
};

// Divided-power derivative in one variable: acts on var^m by
// binom(m, n) var^(m-n), well defined in characteristic p.
MultiPoly hasse_derivative(const MultiPoly& f, const std::string& var, long n);
// Iterated mixed derivative D^(l_0)...D^(l_r) over all variables of f.
MultiPoly hasse_derivative_multi(const MultiPoly& f, const std::vector<long>& orders);

// Expansion coefficients of a univariate f around `center`:
// entry n holds (D^(n) f)(center), so  f = sum_n entry_n (X - center)^n.
std::vector<HahnSeries> taylor_expand(const MultiPoly& f, const std::string& var,
                                      const HahnSeries& center);

struct PseudoDivision {
    HahnSeries c;   // lc(h)^max(deg f - deg h + 1, 0), so c*f = q*h + r
    MultiPoly q;
    MultiPoly r;    // deg_var r < deg_var h
};

// Fraction-free division of f by h in `var`; h must be univariate in
// var with a leading coefficient of exact valuation.
PseudoDivision pseudo_divide(const MultiPoly& f, const MultiPoly& h, const std::string& var);
PseudoDivision pseudo_divide(const MultiPoly& f, const MultiPoly& h);  // univariate pair

// Chain of tower polynomials h_0, ..., h_{L-1}; level e is univariate
// of degree > 1 with coefficients in V and rewrites X_{e+1} = h_e(X_e).
class TowerSpec {
public:
    explicit TowerSpec(std::vector<MultiPoly> levels);
    const std::vector<MultiPoly>& levels() const { return levels_; }
    long size() const { return static_cast<long>(levels_.size()); }
    // Level e as a univariate polynomial in the given variable name.
    MultiPoly level_in(long e, const std::string& var) const;
    long level_degree(long e) const { return degrees_[e]; }

private:
    std::vector<MultiPoly> levels_;  // canonicalized to one variable each
    std::vector<long> degrees_;
};

struct TowerReduction {
    HahnSeries c;       // c*f = F(X_0, h_0(X_0), h_1(h_0(X_0)), ...)
    MultiPoly F;        // in X_0..X_n with deg_{X_e} F < deg h_e for e < n
    long levels_used;   // n
    // True when an unconsumed level h_n also bounds the top variable,
    // i.e. the tower was long enough for deg_{X_n} F < deg h_n.
    bool top_bound_certified;
};

// Left-to-right rewriting of f in V[X_0] against the tower, mirroring
// iterated pseudo-division: divide fully by h_0, substitute X_1, then by
// h_1, and so on until the top variable's degree drops below the next
// level's degree (or the levels run out).  With require_top_bound the
// run-out case throws TowerTooShort carrying the minimal length some
// valid extension would need.
TowerReduction reduce_mod_tower(const MultiPoly& f, const TowerSpec& tower,
                                bool require_top_bound = false);

// Substitutes X_{i+1} <- h_i(X_i) from the top variable down; the result
// is univariate in X_0 and vanishes iff P lies in the triangular ideal
// (X_1 - h_0(X_0), X_2 - h_1(X_1), ...).
MultiPoly ideal_membership_witness(const MultiPoly& P, const TowerSpec& tower);

// Variable names used by tower machinery: X0, X1, ...
std::string tower_var(long level);

}  // namespace valring

#endif
