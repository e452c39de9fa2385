#ifndef MCG_CAPACITY_HPP
#define MCG_CAPACITY_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mcg/model.hpp"

namespace mcg {

/// Security guarantee set: every (s, t, k) with
///   s*delta_j + t*mu_j <= k + xi_j   for all components j
/// certifies "time budget <= 2^t implies winning probability <= 2^-s".
struct CapacityRegion {
    std::vector<double> delta;
    std::vector<double> mu;
    std::vector<double> xi;

    std::size_t dim() const { return delta.size(); }
    void validate() const;

    std::string to_json() const;
    static CapacityRegion from_json(const std::string& text);
};

/// Largest s >= 0 admitted by a region at fixed (k, t). `unbounded` marks
/// regions with no delta_j > 0 (s is unconstrained); infeasible inputs
/// (a delta_j = 0 component already violated) throw "infeasible".
/// `vacuous` marks (k, t) pairs where even s = 0 violates a component, so
/// the region certifies nothing; the value is clamped to 0 there.
struct SBound {
    double value = 0.0;
    bool unbounded = false;
    bool vacuous = false;
};

SBound s_of(const CapacityRegion& region, double k, double t);

// Least k >= 0 satisfying every component at fixed (s, t):
// max(0, max_j s*delta_j + t*mu_j - xi_j).
double k_of(const CapacityRegion& region, double s, double t);

// Two-component region certified for detection rates with
// 1 - f(l) <= d/(l+2)^2, valid when p d (1-gamma) < gamma:
//   q = 1/ln(gamma / (p d (1-gamma)))
//   delta = (0, q ln2)
//   mu    = (gamma ln2/(1-gamma), q ln2 (1 + 1/(1-gamma)))
//   xi    = (-gamma/(1-gamma), q(-1/(1-gamma) + ln(1/(1-gamma))))
CapacityRegion region_powerlaw(double gamma, double p, double d);

/// Region for a rate that is 0 below lstar, derived from the region of the
/// post-delay rate. Two regimes split at s_threshold = xi''/delta'' - 1
/// with delta'' = lstar z ln2 and xi'' = lstar (1 - z ln lstar):
/// above the threshold the free-run phase absorbs part of k (delta grows by
/// delta''), below it only a constant k offset is paid.
struct DelayedRegion {
    CapacityRegion high_s;
    CapacityRegion low_s;
    double s_threshold = 0.0;
    double z = 0.0;

    const CapacityRegion& regime_for(double s) const {
        return s >= std::max(0.0, s_threshold) ? high_s : low_s;
    }

    std::string to_json() const;
    static DelayedRegion from_json(const std::string& text);
};

// Least certified k at (s, t) for the piecewise region, dispatching on s.
double k_of(const DelayedRegion& region, double s, double t);

DelayedRegion region_delayed(const CapacityRegion& inner, std::uint64_t lstar,
                             const GameParams& params);

/// Simultaneous composition of a games: per-game objectives are evaluated
/// at s + ln a (natural log, as the guarantee trades 2^-s mass across
/// games), and the joint failure bound is 1 - (1 - 2^-s/a)^a <= 2^-s.
struct ComposeResult {
    double k_total = 0.0;
    double prob_bound = 0.0;
    std::vector<double> k_each;
};

ComposeResult compose(const std::vector<CapacityRegion>& regions, double s, double t);

// Logical budget from a real-time window: ceil(t_seconds * k / delta_seconds),
// counting parallel moves by up to k compromised nodes.
std::uint64_t tbud_from_realtime(double t_seconds, double k, double delta_seconds);

// Monetary cost of a move budget.
double cost_of_budget(std::uint64_t tbud, double cost_per_move);

} // namespace mcg

#endif
