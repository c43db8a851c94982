#ifndef VALRING_RATIONAL_HPP
#define VALRING_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace valring {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& r);
std::string to_string(const Int& n);

// Sign-normalizing constructor (cpp_rational rejects negative denominators).
inline Rational make_rational(Int num, Int den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(std::move(num), std::move(den));
}

// Parses "a/b" or "a" with optional sign; throws ParseError on junk.
Rational parse_rational(const std::string& text);

}  // namespace valring

#endif
