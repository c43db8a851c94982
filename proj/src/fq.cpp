#include "valring/fq.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "valring/errors.hpp"

namespace valring {

namespace {

using Poly = std::vector<unsigned>;  // little-endian over F_p, no trailing zeros

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b, unsigned p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = static_cast<unsigned>((r[i + j] + 1ull * a[i] * b[j]) % p);
    trim(r);
    return r;
}

unsigned inv_mod_p(unsigned a, unsigned p) {
    long long t = 0, nt = 1, r = p, nr = a % p;
    while (nr != 0) {
        long long q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw NotInvertible("zero has no inverse in F_p");
    return static_cast<unsigned>((t % p + p) % p);
}

// Remainder of a modulo monic m.
Poly poly_mod(Poly a, const Poly& m, unsigned p) {
    trim(a);
    while (a.size() >= m.size()) {
        unsigned lead = a.back();
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i) {
            unsigned sub = static_cast<unsigned>((1ull * lead * m[i]) % p);
            a[shift + i] = (a[shift + i] + p - sub) % p;
        }
        trim(a);
    }
    return a;
}

bool poly_divides(const Poly& d, const Poly& a, unsigned p) {
    if (d.empty()) return false;
    // make d monic
    Poly dm = d;
    unsigned li = inv_mod_p(dm.back(), p);
    for (auto& c : dm) c = static_cast<unsigned>((1ull * c * li) % p);
    return poly_mod(a, dm, p).empty();
}

// Enumerates polynomials of degree exactly d (monic) in lexicographic
// order of the lower-coefficient tuple, constant coefficient fastest.
bool next_tuple(std::vector<unsigned>& t, unsigned p) {
    for (auto& c : t) {
        if (++c < p) return true;
        c = 0;
    }
    return false;
}

bool is_irreducible(const Poly& f, unsigned p) {
    // trial division by all monic polynomials of degree 1..deg/2
    std::size_t deg = f.size() - 1;
    for (std::size_t d = 1; d <= deg / 2; ++d) {
        std::vector<unsigned> low(d, 0);
        do {
            Poly cand = low;
            cand.push_back(1);
            if (poly_divides(cand, f, p)) return false;
        } while (next_tuple(low, p));
    }
    return true;
}

Poly smallest_irreducible(unsigned p, unsigned k) {
    std::vector<unsigned> low(k, 0);
    do {
        Poly cand = low;
        cand.push_back(1);
        if (is_irreducible(cand, p)) return cand;
    } while (next_tuple(low, p));
    throw Error("no irreducible polynomial found");  // unreachable
}

}  // namespace

bool is_prime(unsigned n) {
    if (n < 2) return false;
    for (unsigned d = 2; 1ull * d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::pair<unsigned, unsigned> prime_power_split(const Int& q) {
    if (q < 2 || q > std::numeric_limits<unsigned>::max())
        throw std::invalid_argument("q must be in [2, 2^32)");
    unsigned n = static_cast<unsigned>(q);
    for (unsigned p = 2; 1ull * p * p <= n; ++p) {
        if (n % p) continue;
        unsigned k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        if (n != 1) throw std::invalid_argument("q is not a prime power");
        return {p, k};
    }
    return {n, 1};
}

FqField::FqField(unsigned p, unsigned k) : p_(p), k_(k) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (k < 1) throw std::invalid_argument("extension degree must be >= 1");
    if (k > 1) modulus_ = smallest_irreducible(p, k);
}

Int FqField::q() const {
    Int r = 1;
    for (unsigned i = 0; i < k_; ++i) r *= p_;
    return r;
}

Fq FqField::zero() const { return Fq(this, std::vector<unsigned>(k_, 0)); }

Fq FqField::one() const {
    std::vector<unsigned> c(k_, 0);
    c[0] = 1;
    return Fq(this, c);
}

Fq FqField::from_int(const Int& n) const {
    Int m = n % p_;
    if (m < 0) m += p_;
    std::vector<unsigned> c(k_, 0);
    c[0] = static_cast<unsigned>(m);
    return Fq(this, c);
}

Fq FqField::element(std::vector<unsigned> coeffs) const {
    coeffs.resize(k_, 0);
    for (auto& c : coeffs) c %= p_;
    return Fq(this, coeffs);
}

bool Fq::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](unsigned c) { return c == 0; });
}

bool Fq::is_one() const {
    if (c_.empty() || c_[0] != 1) return false;
    return std::all_of(c_.begin() + 1, c_.end(), [](unsigned c) { return c == 0; });
}

Fq Fq::operator-() const {
    unsigned p = fld_->p();
    std::vector<unsigned> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = (p - c_[i]) % p;
    return Fq(fld_, r);
}

Fq operator+(const Fq& a, const Fq& b) {
    unsigned p = a.fld_->p();
    std::vector<unsigned> r(a.c_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a.c_[i] + b.c_[i]) % p;
    return Fq(a.fld_, r);
}

Fq operator-(const Fq& a, const Fq& b) { return a + (-b); }

Fq operator*(const Fq& a, const Fq& b) {
    const FqField& f = *a.fld_;
    unsigned p = f.p();
    if (f.k() == 1)
        return Fq(a.fld_, {static_cast<unsigned>((1ull * a.c_[0] * b.c_[0]) % p)});
    Poly prod = poly_mul(a.c_, b.c_, p);
    Poly red = poly_mod(prod, f.modulus(), p);
    red.resize(f.k(), 0);
    return Fq(a.fld_, red);
}

bool operator==(const Fq& a, const Fq& b) { return a.c_ == b.c_; }

Fq Fq::pow(const Int& e) const {
    if (e < 0) return inverse().pow(-e);
    Fq base = *this, acc = fld_->one();
    Int n = e;
    while (n > 0) {
        if (n % 2 == 1) acc = acc * base;
        base = base * base;
        n /= 2;
    }
    return acc;
}

Fq Fq::inverse() const {
    if (is_zero()) throw NotInvertible("inverse of zero in F_q");
    if (fld_->k() == 1) return Fq(fld_, {inv_mod_p(c_[0], fld_->p())});
    return pow(fld_->q() - 2);
}

std::string Fq::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ':';
        os << c_[i];
    }
    return os.str();
}

unsigned binomial_mod_p(long m, long n, unsigned p) {
    if (n < 0 || n > m) return 0;
    Int num = 1, den = 1;
    for (long i = 0; i < n; ++i) {
        num *= (m - i);
        den *= (i + 1);
    }
    Int c = num / den;
    Int r = c % p;
    return static_cast<unsigned>(r);
}

}  // namespace valring
