#ifndef MCG_DP_ENGINE_HPP
#define MCG_DP_ENGINE_HPP

#include <cstdint>
#include <vector>

#include "mcg/model.hpp"

namespace mcg {

// Probability that the self-loop-free chain started at (0,0) makes k
// progressive moves, each launched from a level <= tbud-1. Runs the
// O(k*tbud) dynamic program with O(k) rolling storage.
double wbar(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
            const LearningRate& rate);

// All of wbar(1..k_max, tbud) from a single grid pass.
std::vector<double> wbar_curve(std::uint64_t k_max, std::uint64_t tbud,
                               const GameParams& params, const LearningRate& rate);

/// Materialized DP table for small instances.
///   pr[j][i] = probability the chain visits progress j at level i.
/// Column i = 0 is the closed-form boundary ((1-gamma)alpha(0))^j; every
/// later column i uses
///   pr[j][i] = (1-g)a(i) pr[j-1][i] + g a(i-1) pr[j-1][i-1]
///            + (1-a(i-1)) pr[j][i-1].
/// wbar accumulates alpha(i) * pr[k-1][i] over i.
struct DPGrid {
    std::uint64_t k = 0;
    std::uint64_t tbud = 0;
    std::vector<double> pr; // row-major [j * tbud + i]
    double wbar = 0.0;

    double at(std::uint64_t j, std::uint64_t i) const { return pr[j * tbud + i]; }

    static DPGrid compute(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                          const LearningRate& rate);

    // Probability that the chain enters level i at progress j (the first
    // state visited on level i). Unlike the visit masses pr[.][i], these
    // sum to at most 1 over j for every i.
    double level_entry_mass(std::uint64_t j, std::uint64_t i, const GameParams& params,
                            const LearningRate& rate) const;
};

namespace detail {
// alpha(l) for l = 0..tbud-1, computed once per DP evaluation
std::vector<double> alpha_row(std::uint64_t tbud, const GameParams& params,
                              const LearningRate& rate);
} // namespace detail

} // namespace mcg

#endif
