#ifndef MCG_BOUNDS_HPP
#define MCG_BOUNDS_HPP

#include <cstdint>

#include "mcg/model.hpp"

namespace mcg {

/// A probability bound clamped into [0,1], with the unclamped expression
/// value kept for bound-quality diagnostics.
struct BoundValue {
    double value = 0.0;
    double raw = 0.0;
};

/// Bracketing of the exact winning probability: upper = wbar at the full
/// budget, lower = wbar at budget tbud/v times a (1-gamma)^{v/k} correction.
struct SandwichResult {
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t v_used = 0;
    double raw_lower_factor = 0.0; // 1 - (k + tbud/v)(1-gamma)^{v/k}, unclamped
};

// Winning-probability lower bound when the detection rate never exceeds
// 1 - tau: max(0, 1 - k (1 - tau p)^{tbud/k}).
BoundValue stagnating_lb(std::uint64_t k, std::uint64_t tbud, double tau, double p);

SandwichResult sandwich(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                        const LearningRate& rate, std::uint64_t v);

// Smallest v making the sandwich correction factor at least 1 - epsilon:
// ceil(k ln((tbud+k)/eps) / ln(1/(1-gamma))), clamped to >= k.
// Throws "degenerate-gamma" for gamma in {0, 1}.
std::uint64_t v_for_epsilon(std::uint64_t k, std::uint64_t tbud, double epsilon,
                            double gamma);

// General analytic tail bound on wbar for any rate with 1 - f(l) <= d:
//   (1 + 1/theta) sum_{L<tbud} (theta p d)^k prod_{l<=L} (1 + (1+1/theta) B'(l)),
// where B'(l) = beta(l)/(1-beta(l)), beta(l) = sqrt((1-f(l))/d).
// Requires theta >= (1-gamma)/gamma and beta(l) < 1 ("beta-not-strict").
BoundValue analytic_ub_general(std::uint64_t k, std::uint64_t tbud,
                               const GameParams& params, const LearningRate& rate,
                               double d, double theta);

// c = integral_0^{tbud-1} beta(l)/(1-beta(l)) dl + beta(0)/(1-beta(0)),
// adaptive Simpson at relative tolerance 1e-8 on the continuous extension
// of the rate.
double c_constant(const LearningRate& rate, double d, std::uint64_t tbud);

// Theta-optimized form, valid when c <= k (1-gamma)/gamma:
//   (1-gamma)^{-1} tbud e^{c/(1-gamma)} ((1-gamma) p d / gamma)^k.
// Throws "regime-not-covered" outside that regime (see analytic_ub_loose).
BoundValue analytic_ub_optimized(std::uint64_t k, std::uint64_t tbud,
                                 const GameParams& params, const LearningRate& rate,
                                 double d);

// Complementary regime c >= k (1-gamma)/gamma, where theta* = c/k:
//   tbud (1 + k/c) (e p d c/k e^{c/k})^k. Loose; of limited use when c/k
// is large.
BoundValue analytic_ub_loose(std::uint64_t k, std::uint64_t tbud,
                             const GameParams& params, const LearningRate& rate,
                             double d);

// Lower bound on the probability that the defender reaches level lstar
// before the attacker's progress exceeds kstar, under f = 0 and an
// unlimited time budget:
//   1 - lstar * [ (1-g)p / (1 - (1-g)(1-(p+h))) ]^{(kstar-1)/lstar}.
BoundValue delayed_u_lb(std::uint64_t kstar, std::uint64_t lstar,
                        const GameParams& params);

// Weaker closed form of the same bound using the ratio <= (1-g)(1-h).
BoundValue delayed_u_lb_simplified(std::uint64_t kstar, std::uint64_t lstar,
                                   const GameParams& params);

// Winning-probability upper bound for a rate that is 0 below lstar:
//   (1 - u(kstar, lstar)) + wbar(k - kstar, tbud) under rate_after,
// where rate_after is the detection rate after the free-run phase
// (f(l + lstar) as a function of l).
BoundValue delayed_w_ub(std::uint64_t k, std::uint64_t kstar, std::uint64_t lstar,
                        std::uint64_t tbud, const GameParams& params,
                        const LearningRate& rate_after);

} // namespace mcg

#endif
