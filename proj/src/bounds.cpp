#include "mcg/bounds.hpp"

#include <cmath>
#include <functional>

#include "mcg/dp_engine.hpp"

namespace mcg {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double beta_of(const LearningRate& rate, double d, double l) {
    return std::sqrt(rate.one_minus_f(l) / d);
}

// B'(l) = beta/(1-beta); infinite when beta >= 1
double bprime(const LearningRate& rate, double d, double l) {
    const double b = beta_of(rate, d, l);
    if (b >= 1.0)
        throw RegimeError("beta-not-strict: sqrt((1-f(l))/d) must stay below 1");
    return b / (1.0 - b);
}

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = fn(lm), frm = fn(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& fn, double a, double b,
                 double rel_tol) {
    if (b <= a) return 0.0;
    // coarse pass to scale the absolute tolerance off the integral magnitude
    const int n = 64;
    double coarse = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
        coarse += (x1 - x0) / 6.0 * (fn(x0) + 4.0 * fn(0.5 * (x0 + x1)) + fn(x1));
    }
    const double tol = std::max(std::abs(coarse), 1e-300) * rel_tol;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
        const double f0 = fn(x0), f1 = fn(x1), fm = fn(0.5 * (x0 + x1));
        const double whole = simpson(x0, x1, f0, fm, f1);
        total += adaptive_simpson(fn, x0, x1, f0, fm, f1, whole, tol / n, 40);
    }
    return total;
}

} // namespace

BoundValue stagnating_lb(std::uint64_t k, std::uint64_t tbud, double tau, double p) {
    if (k < 1) throw std::invalid_argument("invalid-size: need k >= 1");
    if (!(tau > 0.0 && tau <= 1.0) || !(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("invalid-params: need 0 < tau <= 1 and 0 < p <= 1");
    const double raw = 1.0 - static_cast<double>(k) *
                                 std::pow(1.0 - tau * p, static_cast<double>(tbud) /
                                                             static_cast<double>(k));
    return BoundValue{clamp01(raw), raw};
}

SandwichResult sandwich(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                        const LearningRate& rate, std::uint64_t v) {
    if (v < k) throw std::invalid_argument("invalid-v: sandwich needs v >= k");
    SandwichResult r;
    r.v_used = v;
    r.upper = wbar(k, tbud, params, rate);
    const double dk = static_cast<double>(k), dt = static_cast<double>(tbud),
                 dv = static_cast<double>(v);
    r.raw_lower_factor =
        1.0 - (dk + dt / dv) * std::pow(1.0 - params.gamma, dv / dk);
    const std::uint64_t shrunk = tbud / v;
    const double base = shrunk >= 1 ? wbar(k, shrunk, params, rate) : 0.0;
    r.lower = base * clamp01(r.raw_lower_factor);
    return r;
}

std::uint64_t v_for_epsilon(std::uint64_t k, std::uint64_t tbud, double epsilon,
                            double gamma) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("invalid-params: need 0 < epsilon < 1");
    if (gamma <= 0.0 || gamma >= 1.0)
        throw RegimeError("degenerate-gamma: the sandwich correction needs 0 < gamma < 1");
    const double dk = static_cast<double>(k);
    const double v = dk * std::log((static_cast<double>(tbud) + dk) / epsilon) /
                     std::log(1.0 / (1.0 - gamma));
    const double ceiled = std::ceil(v);
    return ceiled < dk ? k : static_cast<std::uint64_t>(ceiled);
}

BoundValue analytic_ub_general(std::uint64_t k, std::uint64_t tbud,
                               const GameParams& params, const LearningRate& rate,
                               double d, double theta) {
    params.validate();
    if (!(d > 0.0)) throw std::invalid_argument("invalid-params: need d > 0");
    if (params.gamma <= 0.0)
        throw RegimeError("degenerate-gamma: the analytic bound needs gamma > 0");
    if (theta < (1.0 - params.gamma) / params.gamma)
        throw std::invalid_argument("invalid-params: need theta >= (1-gamma)/gamma");
    const double y = 1.0 + 1.0 / theta;
    const double base = std::pow(theta * params.p * d, static_cast<double>(k));
    double sum = 0.0, prod = 1.0;
    for (std::uint64_t L = 0; L < tbud; ++L) {
        prod *= 1.0 + y * bprime(rate, d, static_cast<double>(L));
        sum += prod;
        if (!std::isfinite(sum) || y * base * sum > 1.0) {
            sum = INFINITY; // already past the probability cap
            break;
        }
    }
    const double raw = y * base * sum;
    return BoundValue{std::min(raw, 1.0), raw};
}

double c_constant(const LearningRate& rate, double d, std::uint64_t tbud) {
    if (tbud < 1) throw std::invalid_argument("invalid-size: need tbud >= 1");
    if (!(d > 0.0)) throw std::invalid_argument("invalid-params: need d > 0");
    const double hi = static_cast<double>(tbud) - 1.0;
    // reject the singular case up front: the integrand is beta/(1-beta)
    const double b0 = beta_of(rate, d, 0.0);
    if (b0 >= 1.0 || beta_of(rate, d, hi) >= 1.0)
        throw RegimeError("beta-not-strict: sqrt((1-f(l))/d) must stay below 1");
    auto integrand = [&](double l) { return bprime(rate, d, l); };
    double integral = 0.0;
    if (hi > 0.0) {
        if (rate.form() == LearningRate::Form::Delayed) {
            // split at the delay knot, where the integrand has a kink
            const double knot = std::min(static_cast<double>(rate.lstar()), hi);
            integral = integrate(integrand, 0.0, knot, 1e-8) +
                       integrate(integrand, knot, hi, 1e-8);
        } else if (rate.form() == LearningRate::Form::Table) {
            // piecewise-constant integrand: sum the unit cells exactly
            for (double l = 0.0; l < hi; l += 1.0) {
                const double step = std::min(1.0, hi - l);
                integral += bprime(rate, d, l) * step;
            }
        } else {
            integral = integrate(integrand, 0.0, hi, 1e-8);
        }
    }
    return integral + bprime(rate, d, 0.0);
}

BoundValue analytic_ub_optimized(std::uint64_t k, std::uint64_t tbud,
                                 const GameParams& params, const LearningRate& rate,
                                 double d) {
    params.validate();
    if (params.gamma <= 0.0)
        throw RegimeError("degenerate-gamma: the analytic bound needs gamma > 0");
    const double c = c_constant(rate, d, tbud);
    const double g = params.gamma;
    if (c > static_cast<double>(k) * (1.0 - g) / g)
        throw RegimeError("regime-not-covered: c exceeds k(1-gamma)/gamma; "
                          "use the loose complementary form");
    const double raw = (1.0 / (1.0 - g)) * static_cast<double>(tbud) *
                       std::exp(c / (1.0 - g)) *
                       std::pow((1.0 - g) * params.p * d / g, static_cast<double>(k));
    return BoundValue{std::min(raw, 1.0), raw};
}

BoundValue analytic_ub_loose(std::uint64_t k, std::uint64_t tbud,
                             const GameParams& params, const LearningRate& rate,
                             double d) {
    params.validate();
    const double c = c_constant(rate, d, tbud);
    const double dk = static_cast<double>(k);
    if (params.gamma > 0.0 && c < dk * (1.0 - params.gamma) / params.gamma)
        throw RegimeError("regime-not-covered: c below k(1-gamma)/gamma; "
                          "use the optimized form");
    const double ratio = c / dk;
    const double raw = static_cast<double>(tbud) * (1.0 + dk / c) *
                       std::pow(std::exp(1.0) * params.p * d * ratio * std::exp(ratio), dk);
    return BoundValue{std::min(raw, 1.0), raw};
}

namespace {

double delayed_ratio(const GameParams& params) {
    const double g = params.gamma;
    const double num = (1.0 - g) * params.p;
    const double den = 1.0 - (1.0 - g) * (1.0 - (params.p + params.h));
    return den > 0.0 ? num / den : (num > 0.0 ? INFINITY : 0.0);
}

BoundValue u_bound_from_ratio(std::uint64_t kstar, std::uint64_t lstar, double ratio) {
    if (lstar < 1) throw std::invalid_argument("invalid-params: need lstar >= 1");
    if (kstar < lstar + 1)
        throw std::invalid_argument("invalid-kstar: need kstar >= lstar + 1");
    const double e = (static_cast<double>(kstar) - 1.0) / static_cast<double>(lstar);
    const double raw = 1.0 - static_cast<double>(lstar) * std::pow(ratio, e);
    return BoundValue{raw < 0.0 ? 0.0 : raw, raw};
}

} // namespace

BoundValue delayed_u_lb(std::uint64_t kstar, std::uint64_t lstar,
                        const GameParams& params) {
    params.validate();
    return u_bound_from_ratio(kstar, lstar, delayed_ratio(params));
}

BoundValue delayed_u_lb_simplified(std::uint64_t kstar, std::uint64_t lstar,
                                   const GameParams& params) {
    params.validate();
    return u_bound_from_ratio(kstar, lstar, (1.0 - params.gamma) * (1.0 - params.h));
}

BoundValue delayed_w_ub(std::uint64_t k, std::uint64_t kstar, std::uint64_t lstar,
                        std::uint64_t tbud, const GameParams& params,
                        const LearningRate& rate_after) {
    if (k <= kstar)
        throw std::invalid_argument("invalid-params: need k > kstar");
    const BoundValue u = delayed_u_lb(kstar, lstar, params);
    const double tail = wbar(k - kstar, tbud, params, rate_after);
    const double raw = (1.0 - u.value) + tail;
    return BoundValue{std::min(raw, 1.0), raw};
}

} // namespace mcg
