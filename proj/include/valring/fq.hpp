#ifndef VALRING_FQ_HPP
#define VALRING_FQ_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "valring/rational.hpp"

namespace valring {

class Fq;

// The coefficient field F_q, q = p^k.  For k > 1 elements are residues
// modulo the lexicographically smallest monic irreducible of degree k
// over F_p, so a given (p, k) always names the same field.
class FqField {
public:
    FqField(unsigned p, unsigned k);

    unsigned p() const { return p_; }
    unsigned k() const { return k_; }
    Int q() const;
    const std::vector<unsigned>& modulus() const { return modulus_; }

    Fq zero() const;
    Fq one() const;
    Fq from_int(const Int& n) const;            // image of an integer
    Fq element(std::vector<unsigned> coeffs) const;  // little-endian, reduced mod p

    bool same(const FqField& o) const { return p_ == o.p_ && k_ == o.k_; }

private:
    unsigned p_, k_;
    std::vector<unsigned> modulus_;  // size k+1, monic; size 0 when k == 1
};

// One element of F_q.  Carries a pointer to its field; the field object
// must outlive every element (they live inside shared contexts here).
class Fq {
public:
    Fq() : fld_(nullptr) {}
    Fq(const FqField* f, std::vector<unsigned> c) : fld_(f), c_(std::move(c)) {}

    const FqField& field() const { return *fld_; }
    const std::vector<unsigned>& coeffs() const { return c_; }
    bool is_zero() const;
    bool is_one() const;

    Fq operator-() const;
    friend Fq operator+(const Fq& a, const Fq& b);
    friend Fq operator-(const Fq& a, const Fq& b);
    friend Fq operator*(const Fq& a, const Fq& b);
    friend bool operator==(const Fq& a, const Fq& b);
    friend bool operator!=(const Fq& a, const Fq& b) { return !(a == b); }

    Fq inverse() const;  // throws NotInvertible on zero
    Fq pow(const Int& e) const;

    std::string str() const;  // "3" for prime fields, "1:0:2" little-endian otherwise

private:
    const FqField* fld_;
    std::vector<unsigned> c_;  // little-endian, size k, entries in [0, p)
};

// C(m, n) reduced into F_p (computed exactly, then reduced).
unsigned binomial_mod_p(long m, long n, unsigned p);

bool is_prime(unsigned n);
// Returns (p, k) with q = p^k, or throws std::invalid_argument.
std::pair<unsigned, unsigned> prime_power_split(const Int& q);

}  // namespace valring

#endif
