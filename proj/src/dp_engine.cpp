#include "mcg/dp_engine.hpp"

#include <cmath>

namespace mcg {

namespace detail {

std::vector<double> alpha_row(std::uint64_t tbud, const GameParams& params,
                              const LearningRate& rate) {
    std::vector<double> a(tbud);
    for (std::uint64_t l = 0; l < tbud; ++l) a[l] = alpha(params, rate, l);
    return a;
}

} // namespace detail

namespace {

void check_sizes(std::uint64_t k, std::uint64_t tbud) {
    if (k < 1 || tbud < 1)
        throw std::invalid_argument("invalid-size: need k >= 1 and tbud >= 1");
}

} // namespace

std::vector<double> wbar_curve(std::uint64_t k_max, std::uint64_t tbud,
                               const GameParams& params, const LearningRate& rate) {
    check_sizes(k_max, tbud);
    validate_for(params, rate);
    const std::vector<double> a = detail::alpha_row(tbud, params, rate);
    const double g = params.gamma;

    std::vector<double> prev(k_max), cur(k_max), acc(k_max, 0.0);

    // column i = 0: pr[j][0] = ((1-g) a(0))^j
    const double h0 = (1.0 - g) * a[0];
    double pw = 1.0;
    for (std::uint64_t j = 0; j < k_max; ++j) {
        prev[j] = pw;
        pw *= h0;
        acc[j] += a[0] * prev[j];
    }

    for (std::uint64_t i = 1; i < tbud; ++i) {
        const double ai = a[i], aim1 = a[i - 1];
        cur[0] = (1.0 - aim1) * prev[0];
        for (std::uint64_t j = 1; j < k_max; ++j) {
            cur[j] = (1.0 - g) * ai * cur[j - 1] + g * aim1 * prev[j - 1] +
                     (1.0 - aim1) * prev[j];
        }
        for (std::uint64_t j = 0; j < k_max; ++j) acc[j] += ai * cur[j];
        std::swap(prev, cur);
    }
    return acc; // acc[j] = wbar(j+1, tbud)
}

double wbar(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
            const LearningRate& rate) {
    check_sizes(k, tbud);
    return wbar_curve(k, tbud, params, rate)[k - 1];
}

DPGrid DPGrid::compute(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                       const LearningRate& rate) {
    check_sizes(k, tbud);
    validate_for(params, rate);
    const std::vector<double> a = detail::alpha_row(tbud, params, rate);
    const double g = params.gamma;

    DPGrid grid;
    grid.k = k;
    grid.tbud = tbud;
    grid.pr.assign(k * tbud, 0.0);
    auto at = [&](std::uint64_t j, std::uint64_t i) -> double& {
        return grid.pr[j * tbud + i];
    };

    double pw = 1.0;
    for (std::uint64_t j = 0; j < k; ++j) {
        at(j, 0) = pw;
        pw *= (1.0 - g) * a[0];
    }
    for (std::uint64_t i = 1; i < tbud; ++i) {
        at(0, i) = (1.0 - a[i - 1]) * at(0, i - 1);
        for (std::uint64_t j = 1; j < k; ++j) {
            at(j, i) = (1.0 - g) * a[i] * at(j - 1, i) + g * a[i - 1] * at(j - 1, i - 1) +
                       (1.0 - a[i - 1]) * at(j, i - 1);
        }
    }
    grid.wbar = 0.0;
    for (std::uint64_t i = 0; i < tbud; ++i) grid.wbar += a[i] * at(k - 1, i);
    return grid;
}

double DPGrid::level_entry_mass(std::uint64_t j, std::uint64_t i, const GameParams& params,
                                const LearningRate& rate) const {
    if (i == 0) return j == 0 ? 1.0 : 0.0;
    const double g = params.gamma;
    const double aim1 = alpha(params, rate, i - 1);
    double m = (1.0 - aim1) * at(j, i - 1);
    if (j >= 1) m += g * aim1 * at(j - 1, i - 1);
    return m;
}

} // namespace mcg
