#ifndef VALRING_ERRORS_HPP
#define VALRING_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace valring {

// Base class for every failure the library reports deliberately.
// Preconditions violated by the caller throw std::invalid_argument instead.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value was requested beyond what the stored precision can certify.
struct PrecisionTooLow : Error {
    explicit PrecisionTooLow(const std::string& what) : Error(what) {}
};

// No threshold index could be certified within the inspected horizon.
struct HorizonExhausted : Error {
    explicit HorizonExhausted(const std::string& what) : Error(what) {}
};

// A declared bound element fails to dominate the sequences it must bound.
struct InvalidBound : Error {
    explicit InvalidBound(const std::string& what) : Error(what) {}
};

struct NotInvertible : Error {
    explicit NotInvertible(const std::string& what) : Error(what) {}
};

// reduce_mod_tower ran out of levels before the final degree bound held.
struct TowerTooShort : Error {
    TowerTooShort(const std::string& what, long required)
        : Error(what), required_levels(required) {}
    long required_levels;
};

struct NoSeparatingIndex : Error {
    explicit NoSeparatingIndex(const std::string& what) : Error(what) {}
};

struct NoWitnessInBounds : Error {
    explicit NoWitnessInBounds(const std::string& what) : Error(what) {}
};

struct SearchBudgetExceeded : Error {
    explicit SearchBudgetExceeded(const std::string& what) : Error(what) {}
};

struct ValueObstruction : Error {
    explicit ValueObstruction(const std::string& what) : Error(what) {}
};

struct OnsetNotFound : Error {
    explicit OnsetNotFound(const std::string& what) : Error(what) {}
};

// Image sequence whose consecutive differences vanish identically.
struct DegenerateImage : Error {
    explicit DegenerateImage(const std::string& what) : Error(what) {}
};

struct NotAUnit : Error {
    explicit NotAUnit(const std::string& what) : Error(what) {}
};

struct ParseError : Error {
    ParseError(const std::string& what, long line = 0) : Error(what), line_no(line) {}
    long line_no;
};

}  // namespace valring

#endif
