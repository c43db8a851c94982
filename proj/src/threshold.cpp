#include "valring/threshold.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "valring/errors.hpp"

namespace valring {

namespace {

void validate(const ThresholdProblem& p, bool nd) {
    int n = p.axes();
    if (n < 1) throw std::invalid_argument("threshold problem needs at least one axis");
    if (p.sequences.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("one sequence per axis required");
    if (!p.bounds.empty() && p.bounds.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("bounds, when given, must be per-axis");
    if (p.betas.empty()) throw std::invalid_argument("empty beta tensor");
    for (const auto& [key, beta] : p.betas) {
        if (key.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("beta key arity mismatch");
        for (int e = 0; e < n; ++e)
            if (key[e] < 0 || key[e] >= static_cast<int>(p.multipliers[e].size()))
                throw std::invalid_argument("beta key outside the multiplier lists");
        if (beta.is_infinity()) throw std::invalid_argument("Infinity cannot appear in betas");
    }
    if (p.mode == ThresholdMode::Distinct) {
        for (const auto& ts : p.multipliers) {
            std::set<long> seen(ts.begin(), ts.end());
            if (seen.size() != ts.size())
                throw std::invalid_argument("Distinct mode needs pairwise different multipliers");
        }
    } else {
        bool some_axis_nonzero = false;
        for (const auto& ts : p.multipliers)
            some_axis_nonzero |=
                !ts.empty() && std::all_of(ts.begin(), ts.end(), [](long t) { return t != 0; });
        if (!some_axis_nonzero)
            throw std::invalid_argument(
                "Nonzero mode needs one axis whose multipliers are all nonzero");
    }
    if (nd && n >= 2) {
        // The lemmas take the gamma's >= 0 in the shifted setting.
        for (const auto& s : p.sequences) {
            GroupElement first = s.term(0);
            if (first < GroupElement::zero(first.rank()))
                throw std::invalid_argument("axis sequences must be >= 0");
        }
    }
}

Int required_shift_factor(const ThresholdProblem& p, int upto_axis) {
    Int m = 0;
    for (int c = 0; c <= upto_axis; ++c)
        for (long t : p.multipliers[c]) m = std::max(m, Int(t < 0 ? -t : t));
    return p.mode == ThresholdMode::Distinct ? 2 * m : m;
}

// One linear form whose vanishing at a grid point breaks the predicate.
struct Form {
    GroupElement beta;            // constant part including shift contributions
    std::vector<long> coeffs;     // per-axis integer coefficient
};

std::vector<Form> build_forms(const ThresholdProblem& p, const std::vector<GroupElement>& shifts) {
    int n = p.axes();
    std::vector<Form> forms;
    auto shift_part = [&](const std::vector<int>& key) {
        GroupElement acc = GroupElement::zero(p.betas.begin()->second.rank());
        for (int e = 1; e < n; ++e) {
            long t = p.multipliers[e][key[e]];
            if (t != 0) acc += Int(t) * shifts[e];
        }
        return acc;
    };
    if (p.mode == ThresholdMode::Nonzero) {
        for (const auto& [key, beta] : p.betas) {
            Form f;
            f.beta = beta + shift_part(key);
            f.coeffs.resize(n);
            for (int e = 0; e < n; ++e) f.coeffs[e] = p.multipliers[e][key[e]];
            forms.push_back(std::move(f));
        }
        return forms;
    }
    for (auto i = p.betas.begin(); i != p.betas.end(); ++i) {
        for (auto j = std::next(i); j != p.betas.end(); ++j) {
            Form f;
            f.beta = (i->second + shift_part(i->first)) - (j->second + shift_part(j->first));
            f.coeffs.resize(n);
            for (int e = 0; e < n; ++e)
                f.coeffs[e] = p.multipliers[e][i->first[e]] - p.multipliers[e][j->first[e]];
            forms.push_back(std::move(f));
        }
    }
    return forms;
}

// A collision: the predicate fails whenever the listed axes sit at the
// listed indices (axes not listed are unconstrained).
using Collision = std::vector<std::pair<int, long>>;

void collect_collisions(const ThresholdProblem& p, const Form& f,
                        const std::vector<GroupElement>& shifts,
                        const std::vector<long>& caps, std::set<Collision>& out) {
    std::vector<int> support;
    for (int e = 0; e < p.axes(); ++e)
        if (f.coeffs[e] != 0) support.push_back(e);
    if (support.empty()) {
        if (f.beta.is_zero())
            throw HorizonExhausted("a form vanishes identically; no threshold exists");
        return;
    }
    // Solve for the axis with the widest range, enumerating the others.
    int pivot = support[0];
    for (int e : support)
        if (caps[e] > caps[pivot]) pivot = e;
    std::vector<int> rest;
    for (int e : support)
        if (e != pivot) rest.push_back(e);

    std::vector<long> idx(rest.size(), 0);
    while (true) {
        GroupElement rhs = -f.beta;
        for (std::size_t k = 0; k < rest.size(); ++k) {
            int e = rest[k];
            rhs = rhs - Int(f.coeffs[e]) * (p.sequences[e].term(idx[k]) + shifts[e]);
        }
        GroupElement target = make_rational(1, f.coeffs[pivot]) * rhs - shifts[pivot];
        if (auto hit = p.sequences[pivot].find_term(target, 0, caps[pivot])) {
            Collision c;
            for (std::size_t k = 0; k < rest.size(); ++k) c.emplace_back(rest[k], idx[k]);
            c.emplace_back(pivot, *hit);
            std::sort(c.begin(), c.end());
            out.insert(std::move(c));
        }
        // advance the mixed-radix counter over `rest`
        std::size_t k = 0;
        for (; k < rest.size(); ++k) {
            if (idx[k] < caps[rest[k]]) {
                ++idx[k];
                break;
            }
            idx[k] = 0;
        }
        if (k == rest.size()) break;
    }
}

// Lexicographically minimal per-axis cover: every collision must have
// some listed axis held at or below that axis' nu.  Earlier axes are
// minimized first; trying candidates in ascending order makes the first
// recursive success the minimum.
bool cover(const std::vector<Collision>& cs, const std::vector<long>& caps, int axis,
           std::vector<long>& nus) {
    int n = static_cast<int>(caps.size());
    if (cs.empty()) {
        for (int e = axis; e < n; ++e) nus[e] = 0;
        return true;
    }
    if (axis == n) return false;
    long forced = 0;
    std::set<long> candidates{0};
    for (const auto& c : cs) {
        long here = -1;
        bool later = false;
        for (const auto& [e, j] : c) {
            if (e == axis) here = j;
            if (e > axis) later = true;
        }
        if (!later) {
            if (here < 0) return false;  // not coverable anymore
            forced = std::max(forced, here);
        }
        if (here >= 0) candidates.insert(here);
    }
    for (long nu : candidates) {
        if (nu < forced) continue;
        if (nu > caps[axis] - 1) break;  // keep a nonempty certified region
        std::vector<Collision> rest;
        bool ok = true;
        for (const auto& c : cs) {
            bool covered = false;
            Collision trimmed;
            for (const auto& [e, j] : c) {
                if (e == axis && j <= nu)
                    covered = true;
                else if (e > axis)
                    trimmed.emplace_back(e, j);
            }
            if (covered) continue;
            if (trimmed.empty()) {
                ok = false;  // needs a larger nu on this axis
                break;
            }
            rest.push_back(std::move(trimmed));
        }
        if (!ok) continue;
        if (cover(rest, caps, axis + 1, nus)) {
            nus[axis] = nu;
            return true;
        }
    }
    return false;
}

std::optional<std::size_t> dominant_family(const ThresholdProblem& p, long nu, long cap) {
    // Position whose form realizes the strict minimum on the certified
    // region, reported only when constant there (and consistent with the
    // slope order when a rule extends the sequence).
    std::vector<std::pair<long, GroupElement>> fams;  // multiplier value, beta
    for (const auto& [key, beta] : p.betas) fams.emplace_back(p.multipliers[0][key[0]], beta);
    if (fams.size() == 1) return 0;
    std::optional<std::size_t> arg;
    for (long s = nu + 1; s <= cap; ++s) {
        GroupElement g = p.sequences[0].term(s);
        std::size_t best = 0;
        GroupElement bestval = fams[0].second + Int(fams[0].first) * g;
        for (std::size_t i = 1; i < fams.size(); ++i) {
            GroupElement v = fams[i].second + Int(fams[i].first) * g;
            if (v < bestval) {
                bestval = v;
                best = i;
            }
        }
        if (!arg)
            arg = best;
        else if (*arg != best)
            return std::nullopt;
    }
    if (arg && p.sequences[0].has_rule()) {
        // past the window the smallest multiplier wins
        std::size_t slope_min = 0;
        for (std::size_t i = 1; i < fams.size(); ++i)
            if (fams[i].first < fams[slope_min].first) slope_min = i;
        if (slope_min != *arg) return std::nullopt;
    }
    return arg;
}

ThresholdCertificate solve(const ThresholdProblem& p, const std::vector<long>& horizons,
                           bool nd) {
    validate(p, nd);
    int n = p.axes();
    if (horizons.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("one horizon per axis required");

    std::vector<GroupElement> shifts = threshold_shifts(p);
    std::vector<long> caps(n);
    for (int e = 0; e < n; ++e) {
        caps[e] = p.sequences[e].horizon_cap(horizons[e]);
        if (caps[e] < 1)
            throw HorizonExhausted("axis horizon leaves no room for a certified region");
    }

    std::set<Collision> cset;
    for (const auto& f : build_forms(p, shifts)) collect_collisions(p, f, shifts, caps, cset);
    std::vector<Collision> cs(cset.begin(), cset.end());

    std::vector<long> nus(n, 0);
    if (!cover(cs, caps, 0, nus))
        throw HorizonExhausted("no per-axis threshold certifiable within the horizon");

    ThresholdCertificate cert;
    cert.mode = p.mode;
    cert.nus = nus;
    cert.shifts = shifts;
    cert.shift_factors = threshold_shift_factors(p);
    cert.verified_horizon = caps;
    if (!nd && p.mode == ThresholdMode::Distinct)
        cert.dominant_index = dominant_family(p, nus[0], caps[0]);
    return cert;
}

}  // namespace

std::vector<Int> threshold_shift_factors(const ThresholdProblem& p) {
    int n = p.axes();
    std::vector<Int> rs(n, 0);
    for (int e = 1; e < n; ++e) {
        Int required = required_shift_factor(p, e - 1);
        Int r = required;
        if (!p.shift_factor.empty() && p.shift_factor.size() >= static_cast<std::size_t>(e) &&
            p.shift_factor[e - 1]) {
            r = *p.shift_factor[e - 1];
            if (r < required)
                throw std::invalid_argument("shift factor override below the required value");
        }
        rs[e] = r;
    }
    return rs;
}

std::vector<GroupElement> threshold_shifts(const ThresholdProblem& p) {
    int n = p.axes();
    int rank = p.betas.empty() ? 1 : p.betas.begin()->second.rank();
    std::vector<GroupElement> shifts(n, GroupElement::zero(rank));
    if (n == 1) return shifts;
    std::vector<Int> rs = threshold_shift_factors(p);
    for (int e = 1; e < n; ++e) {
        if (p.bounds.size() < static_cast<std::size_t>(e) || !p.bounds[e - 1])
            throw std::invalid_argument("axis " + std::to_string(e - 1) +
                                        " needs a declared bound element");
        const GroupElement& a = *p.bounds[e - 1];
        for (int c = 0; c <= e - 1; ++c)
            if (!p.sequences[c].dominated_by(a))
                throw InvalidBound("bound of axis " + std::to_string(e - 1) +
                                   " fails to dominate sequence " + std::to_string(c));
        if (rs[e] == 0)
            shifts[e] = GroupElement::zero(rank);
        else
            shifts[e] = rs[e] * a;
    }
    return shifts;
}

bool threshold_predicate_holds(const ThresholdProblem& p,
                               const std::vector<GroupElement>& shifts,
                               const std::vector<long>& point) {
    int n = p.axes();
    std::vector<GroupElement> gam;
    gam.reserve(n);
    for (int e = 0; e < n; ++e) gam.push_back(p.sequences[e].term(point[e]) + shifts[e]);
    std::vector<GroupElement> values;
    values.reserve(p.betas.size());
    for (const auto& [key, beta] : p.betas) {
        GroupElement v = beta;
        for (int e = 0; e < n; ++e) {
            long t = p.multipliers[e][key[e]];
            if (t != 0) v += Int(t) * gam[e];
        }
        values.push_back(std::move(v));
    }
    if (p.mode == ThresholdMode::Nonzero) {
        for (const auto& v : values)
            if (v.is_zero()) return false;
        return true;
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (values[i] == values[j]) return false;
    return true;
}

ThresholdCertificate solve_threshold_1d(const ThresholdProblem& p, long horizon) {
    if (p.axes() != 1) throw std::invalid_argument("solve_threshold_1d takes one axis");
    if (p.mode != ThresholdMode::Distinct)
        throw std::invalid_argument("solve_threshold_1d certifies Distinct mode only");
    return solve(p, {horizon}, false);
}

ThresholdCertificate solve_threshold_nd(const ThresholdProblem& p,
                                        const std::vector<long>& horizons) {
    return solve(p, horizons, true);
}

}  // namespace valring
