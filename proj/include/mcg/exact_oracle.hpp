#ifndef MCG_EXACT_ORACLE_HPP
#define MCG_EXACT_ORACLE_HPP

#include <cstdint>

#include "mcg/model.hpp"

namespace mcg {

// Exact winning probability w(k, tbud): mass absorbed at progress k within
// tbud steps, by forward propagation of the full (progress, level)
// distribution under m1..m4. Exact (levels are truncated at tbud, which no
// path can exceed). Guard: k * tbud^2 <= 1e8, else "instance-too-large".
double forward_w(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                 const LearningRate& rate);

// Same probability via the nested closed-form sums: enumerates final level
// L, diagonal count B, entry patterns b_1..b_L, horizontal run lengths
// g_0..g_L, and self-loop allocations t_0..t_L with negative-binomial
// multiplicities. Exponential cost; guarded to k <= 4, tbud <= 10.
double closed_form_w(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                     const LearningRate& rate);

// Exact winning probability of the level-free chain with constant per-step
// progress mass tau*p: the negative-binomial tail
//   sum_{T=k}^{tbud} C(T-1, k-1) (1-tau p)^{T-k} (tau p)^k.
double stagnating_exact_w(std::uint64_t k, std::uint64_t tbud, double tau, double p);

// Reference value for the DP: explicit enumeration of every lattice path of
// the self-loop-free chain that reaches progress k with all moves launched
// from levels <= tbud-1. Guarded like closed_form_w.
double no_selfloop_enumeration(std::uint64_t k, std::uint64_t tbud,
                               const GameParams& params, const LearningRate& rate);

// log C(n, r) via lgamma, stable at any size the guards admit
double log_choose(double n, double r);

} // namespace mcg

#endif
