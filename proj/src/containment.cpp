#include "mcg/containment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "mcg/dp_engine.hpp"

namespace mcg {

namespace {

double refine(double w_prev, double w_cross, double target, std::uint64_t k) {
    // linear in log wbar: wbar decays near-geometrically in k
    if (!(w_cross > 0.0)) return static_cast<double>(k);
    if (!(w_prev > target)) return static_cast<double>(k);
    const double l0 = std::log(w_prev), l1 = std::log(w_cross),
                 lt = std::log(target);
    if (l1 >= l0) return static_cast<double>(k);
    return static_cast<double>(k - 1) + (lt - l0) / (l1 - l0);
}

} // namespace

KcResult k_c(std::uint64_t tbud, const GameParams& params, const LearningRate& rate,
             double target, std::uint64_t k_ceiling) {
    if (tbud < 1) throw std::invalid_argument("invalid-size: need tbud >= 1");
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("invalid-params: need 0 < target < 1");
    if (k_ceiling == 0)
        k_ceiling = static_cast<std::uint64_t>(
            10.0 * (1.0 + std::log2(static_cast<double>(tbud))));
    if (k_ceiling < 1) k_ceiling = 1;

    // grow the evaluated prefix of the curve geometrically until it crosses
    std::uint64_t k_max = 8;
    for (;;) {
        k_max = std::min(k_max, k_ceiling);
        const std::vector<double> curve = wbar_curve(k_max, tbud, params, rate);
        if (curve[0] <= target) {
            KcResult r;
            r.k = 1;
            r.already_below = true;
            r.k_frac = refine(1.0, curve[0], target, 1); // against wbar(0) = 1
            return r;
        }
        for (std::uint64_t k = 2; k <= k_max; ++k) {
            if (curve[k - 1] <= target) {
                KcResult r;
                r.k = k;
                r.k_frac = refine(curve[k - 2], curve[k - 1], target, k);
                return r;
            }
        }
        if (k_max == k_ceiling)
            throw RegimeError("target-unreachable: wbar stays above the target up to "
                              "the k ceiling");
        k_max *= 2;
    }
}

std::vector<KCurvePoint> k_curve(const std::vector<double>& t_values,
                                 const GameParams& params, const LearningRate& rate,
                                 double target) {
    for (double t : t_values)
        if (t < 0.0) throw std::invalid_argument("invalid-params: need t >= 0");

    std::vector<KCurvePoint> out(t_values.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= t_values.size()) return;
            try {
                const double b = std::round(std::pow(2.0, t_values[i]));
                const auto tbud = static_cast<std::uint64_t>(std::max(1.0, b));
                const KcResult r = k_c(tbud, params, rate, target);
                out[i] = KCurvePoint{t_values[i], r.k_frac};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(t_values.size());
            }
        }
    };

    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("MC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) workers = static_cast<unsigned>(v);
    }
    workers = static_cast<unsigned>(
        std::min<std::size_t>(std::max(1u, workers), t_values.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

double extrapolate_k(const std::vector<KCurvePoint>& curve, double t_prime) {
    if (curve.size() < 2)
        throw std::invalid_argument("insufficient-points: extrapolation needs >= 2");
    const KCurvePoint& last = curve[curve.size() - 1];
    const KCurvePoint& prev = curve[curve.size() - 2];
    if (t_prime < last.t)
        throw std::invalid_argument("insufficient-points: t_prime must be >= last t");
    const double kappa = last.k_frac - prev.k_frac;
    return (t_prime - last.t) * kappa + last.k_frac;
}

double extrapolate_k_realtime(const std::vector<KCurvePoint>& curve,
                              double moves_per_node) {
    if (!(moves_per_node > 0.0))
        throw std::invalid_argument("invalid-params: need moves_per_node > 0");
    if (curve.size() < 2)
        throw std::invalid_argument("insufficient-points: extrapolation needs >= 2");
    const double t_last = curve.back().t;
    double k = std::max(curve.back().k_frac, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        const double t = std::max(t_last, std::log2(moves_per_node * k));
        const double next = extrapolate_k(curve, t);
        if (std::abs(next - k) < 1e-9) return next;
        k = next;
    }
    return k;
}

} // namespace mcg
