#ifndef VALRING_THRESHOLD_HPP
#define VALRING_THRESHOLD_HPP

#include <map>
#include <optional>
#include <vector>

#include "valring/group.hpp"

namespace valring {

enum class ThresholdMode { Distinct, Nonzero };

// Data of a separation problem over the ordered group: certify per-axis
// indices nu_e past which the linear forms
//   P_I(j) = beta_I + sum_e t_e(I_e) * (gamma_e(j_e) + shift_e)
// are pairwise distinct (Distinct) or all nonzero (Nonzero).  Axis 0 is
// never shifted; the shift of axis e >= 1 is r * a_{e-1} with a_{e-1}
// the declared bound of axis e-1 and r twice (Distinct) or once
// (Nonzero) the largest |multiplier| on axes <= e-1.
struct ThresholdProblem {
    ThresholdMode mode = ThresholdMode::Distinct;
    // Sparse tensor over per-axis multiplier positions.
    std::map<std::vector<int>, GroupElement> betas;
    std::vector<std::vector<long>> multipliers;
    std::vector<MonotoneSequence> sequences;
    std::vector<std::optional<GroupElement>> bounds;
    // Optional override of the shift factor r for axis s+1 (entry s);
    // must dominate the mode-required default.
    std::vector<std::optional<Int>> shift_factor;

    int axes() const { return static_cast<int>(multipliers.size()); }
};

struct ThresholdCertificate {
    ThresholdMode mode = ThresholdMode::Distinct;
    std::vector<long> nus;
    std::vector<GroupElement> shifts;        // applied shift, zero on axis 0
    std::vector<Int> shift_factors;          // r used per axis (0 on axis 0)
    std::vector<long> verified_horizon;      // last index inspected per axis
    // 1d Distinct only: position of the family realizing the eventual
    // minimum, when it stabilizes within the horizon.
    std::optional<std::size_t> dominant_index;
};

// Least certifiable nu over the window/rule horizon; Distinct mode only.
ThresholdCertificate solve_threshold_1d(const ThresholdProblem& p, long horizon);

// Per-axis sweep minimizing earlier axes first.  Horizons cap how far
// rule-extended sequences are inspected.
ThresholdCertificate solve_threshold_nd(const ThresholdProblem& p,
                                        const std::vector<long>& horizons);

// The shift applied on each axis for this problem (zero on axis 0).
std::vector<GroupElement> threshold_shifts(const ThresholdProblem& p);
std::vector<Int> threshold_shift_factors(const ThresholdProblem& p);

// Evaluates the mode predicate at one grid point; used by certificate
// re-verification and shared with nothing in the solver's search path.
bool threshold_predicate_holds(const ThresholdProblem& p,
                               const std::vector<GroupElement>& shifts,
                               const std::vector<long>& point);

}  // namespace valring

#endif
