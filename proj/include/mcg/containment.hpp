#ifndef MCG_CONTAINMENT_HPP
#define MCG_CONTAINMENT_HPP

#include <cstdint>
#include <vector>

#include "mcg/model.hpp"

namespace mcg {

/// Solution of wbar(k, tbud) <= target in k.
///   k            - least integer with wbar(k) <= target
///   k_frac       - refinement in [k-1, k], linear in log wbar
///   already_below- wbar(1, tbud) <= target, so no game clears the target
struct KcResult {
    std::uint64_t k = 0;
    double k_frac = 0.0;
    bool already_below = false;
};

// Containment objective: least k with wbar(k, tbud) <= target, found by
// exponential-then-binary search (wbar is nonincreasing in k), refined to a
// fractional crossing by interpolating log wbar between k-1 and k.
// k_ceiling 0 means the default 10*(1 + log2(tbud)). Throws
// "target-unreachable" when the ceiling is hit without a crossing.
KcResult k_c(std::uint64_t tbud, const GameParams& params, const LearningRate& rate,
             double target = 0.5, std::uint64_t k_ceiling = 0);

struct KCurvePoint {
    double t = 0.0;      // log2 of the budget
    double k_frac = 0.0; // fractional objective where wbar crosses the target
};

std::vector<KCurvePoint> k_curve(const std::vector<double>& t_values,
                                 const GameParams& params, const LearningRate& rate,
                                 double target);

// Linear extension of the curve: kappa = k(t_last) - k(t_prev),
// k(t') = (t' - t_last) * kappa + k(t_last). Needs >= 2 points and
// t_prime >= t_last.
double extrapolate_k(const std::vector<KCurvePoint>& curve, double t_prime);

// Objective reachable in a real-time window where each of the (up to k)
// compromised nodes moves in parallel: the budget 2^t = moves_per_node * k
// depends on k itself, so the extrapolation is solved as a fixed point of
//   k = extrapolate_k(curve, log2(moves_per_node * k)).
double extrapolate_k_realtime(const std::vector<KCurvePoint>& curve,
                              double moves_per_node);

} // namespace mcg

#endif
