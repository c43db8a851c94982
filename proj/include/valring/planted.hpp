#ifndef VALRING_PLANTED_HPP
#define VALRING_PLANTED_HPP

#include <optional>
#include <string>
#include <vector>

#include "valring/pseudo.hpp"

namespace valring {

// Parameters of a planted algebraic instance built around the witness
//   h(T) = -t^delta + T + A T^P,   P a power of p,
// whose first divided-power derivative is identically 1, so the
// correction step v_{i+1} = v_i - h(v_i) raises val(h(v_i)) strictly.
// The sequence is pseudo convergent with profile val(h(v_i)) and the
// deep iterate is a pseudo limit.
struct PlantedSeqParams {
    long degree = 2;          // P: must be p^a >= 2
    Rational delta = 1;       // val of the constant term, > 0
    long window = 8;          // window length (>= 3)
    long margin = 4;          // extra iterations for the pseudo limit
    Rational alpha = 0;       // A = a_coeff * t^alpha, alpha >= 0
    long a_coeff = 1;         // nonzero mod p
};

struct PlantedInstance {
    MultiPoly witness;   // h, univariate in T
    PseudoSequence seq;  // iterates v_1 .. v_window (the zero start is dropped)
    HahnSeries limit;    // deep iterate, an exact pseudo limit on the window
    long s_min;          // declared minimal witness degree = deg h
};

// Rationals embed into the last coordinate of Q^rank, so bounds in
// earlier coordinates stay available.
GroupElement embed_rational(const Ctx& ctx, const Rational& r);

PlantedInstance plant_newton_sequence(const Ctx& ctx, const PlantedSeqParams& params);

// One level of a planted tower.
struct PlantedLevelParams {
    long degree = 2;     // P_e
    Rational alpha = 0;  // exponent of the A coefficient
    long a_coeff = 1;
};

struct PlantedTowerParams {
    PlantedSeqParams base;                  // level 0
    std::vector<PlantedLevelParams> upper;  // levels 1..n
    // guard exponent: level e >= 1 plants its sequence around the exact
    // root shifted by t^(guard_e); guards must dominate every profile
    // value reached in the windows.
    Rational guard = 1000000000;
    long window = 8;
    long margin = 4;
};

struct PlantedTowerLevel {
    HahnSeries x;        // level point, x_{e+1} = h_e(x_e)
    PseudoSequence seq;  // pseudo convergent with x as pseudo limit
    MultiPoly h;         // tower polynomial (minimal witness by construction)
    std::optional<HahnSeries> b;  // scaling element for the boundary above
};

struct PlantedTower {
    std::vector<PlantedTowerLevel> levels;
};

// Levels 0..n with x_{e+1} = h_e(x_e); level e >= 1 sequences are
// planted around x_e (root-shift construction), never the raw image of
// the level below, which would admit 0 as a pseudo limit.
PlantedTower plant_tower(const Ctx& ctx, const PlantedTowerParams& params);

}  // namespace valring

#endif
