#include "mcg/capacity.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace mcg {

void CapacityRegion::validate() const {
    if (delta.empty() || delta.size() != mu.size() || delta.size() != xi.size())
        throw std::invalid_argument(
            "invalid-region: delta, mu, xi must have equal nonzero length");
    for (std::size_t j = 0; j < delta.size(); ++j)
        if (!std::isfinite(delta[j]) || !std::isfinite(mu[j]) || !std::isfinite(xi[j]))
            throw std::invalid_argument("invalid-region: components must be finite");
}

std::string CapacityRegion::to_json() const {
    nlohmann::json j;
    j["delta"] = delta;
    j["mu"] = mu;
    j["xi"] = xi;
    return j.dump();
}

CapacityRegion CapacityRegion::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CapacityRegion r;
    r.delta = j.at("delta").get<std::vector<double>>();
    r.mu = j.at("mu").get<std::vector<double>>();
    r.xi = j.at("xi").get<std::vector<double>>();
    r.validate();
    return r;
}

SBound s_of(const CapacityRegion& region, double k, double t) {
    region.validate();
    if (k < 0.0 || t < 0.0)
        throw std::invalid_argument("invalid-params: need k >= 0 and t >= 0");
    SBound out;
    out.unbounded = true;
    double upper = std::numeric_limits<double>::infinity();
    // negative-delta components bound s from below; absent, nothing does
    double lower = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < region.dim(); ++j) {
        const double slack = k + region.xi[j] - t * region.mu[j];
        if (region.delta[j] == 0.0) {
            if (slack < 0.0)
                throw RegimeError("infeasible: a zero-delta component rules out every s");
        } else if (region.delta[j] > 0.0) {
            out.unbounded = false;
            upper = std::min(upper, slack / region.delta[j]);
        } else {
            lower = std::max(lower, slack / region.delta[j]);
        }
    }
    if (out.unbounded) {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    if (upper < lower)
        throw RegimeError("infeasible: the component bounds on s are contradictory");
    out.vacuous = upper < 0.0;
    out.value = std::max(0.0, upper);
    return out;
}

double k_of(const CapacityRegion& region, double s, double t) {
    region.validate();
    if (s < 0.0 || t < 0.0)
        throw std::invalid_argument("invalid-params: need s >= 0 and t >= 0");
    double need = 0.0;
    for (std::size_t j = 0; j < region.dim(); ++j)
        need = std::max(need, s * region.delta[j] + t * region.mu[j] - region.xi[j]);
    return need;
}

CapacityRegion region_powerlaw(double gamma, double p, double d) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("invalid-params: need 0 < gamma < 1");
    if (!(p > 0.0) || !(d > 0.0))
        throw std::invalid_argument("invalid-params: need p > 0 and d > 0");
    if (p * d * (1.0 - gamma) >= gamma)
        throw RegimeError("invalid-regime: need p*d*(1-gamma) < gamma");
    const double q = 1.0 / std::log(gamma / (p * d * (1.0 - gamma)));
    const double ln2 = std::log(2.0);
    const double og = 1.0 - gamma;
    CapacityRegion r;
    r.delta = {0.0, q * ln2};
    r.mu = {gamma * ln2 / og, q * ln2 * (1.0 + 1.0 / og)};
    r.xi = {-gamma / og, q * (-1.0 / og + std::log(1.0 / og))};
    return r;
}

DelayedRegion region_delayed(const CapacityRegion& inner, std::uint64_t lstar,
                             const GameParams& params) {
    inner.validate();
    params.validate();
    if (lstar < 1) throw std::invalid_argument("invalid-params: need lstar >= 1");
    const double g = params.gamma;
    const double num = 1.0 - (1.0 - g) * (1.0 - (params.p + params.h));
    const double den = (1.0 - g) * params.p;
    if (!(den > 0.0) || num / den <= 1.0)
        throw RegimeError("invalid-z: delayed region needs "
                          "(1-(1-g)(1-(p+h))) / ((1-g)p) > 1");
    const double z = 1.0 / std::log(num / den);
    const double ln2 = std::log(2.0);
    const double ls = static_cast<double>(lstar);
    const double dpp = ls * ln2 * z;                 // delta''
    const double xpp = ls * (1.0 - z * std::log(ls)); // xi''

    DelayedRegion out;
    out.z = z;
    out.s_threshold = xpp / dpp - 1.0;

    out.high_s.delta.reserve(inner.dim());
    for (std::size_t j = 0; j < inner.dim(); ++j) {
        out.high_s.delta.push_back(inner.delta[j] + dpp);
        out.high_s.mu.push_back(inner.mu[j]);
        out.high_s.xi.push_back(inner.xi[j] - inner.delta[j] + (xpp - dpp - (ls + 1.0)));

        out.low_s.delta.push_back(inner.delta[j]);
        out.low_s.mu.push_back(inner.mu[j]);
        out.low_s.xi.push_back(inner.xi[j] - inner.delta[j] - (ls + 1.0));
    }
    return out;
}

std::string DelayedRegion::to_json() const {
    nlohmann::json j;
    j["s_threshold"] = s_threshold;
    j["z"] = z;
    j["high_s"] = nlohmann::json::parse(high_s.to_json());
    j["low_s"] = nlohmann::json::parse(low_s.to_json());
    return j.dump();
}

DelayedRegion DelayedRegion::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DelayedRegion r;
    r.s_threshold = j.at("s_threshold").get<double>();
    r.z = j.at("z").get<double>();
    r.high_s = CapacityRegion::from_json(j.at("high_s").dump());
    r.low_s = CapacityRegion::from_json(j.at("low_s").dump());
    return r;
}

double k_of(const DelayedRegion& region, double s, double t) {
    return k_of(region.regime_for(s), s, t);
}

ComposeResult compose(const std::vector<CapacityRegion>& regions, double s, double t) {
    if (regions.empty())
        throw std::invalid_argument("invalid-params: compose needs at least one region");
    if (s < 0.0 || t < 0.0)
        throw std::invalid_argument("invalid-params: need s >= 0 and t >= 0");
    const double a = static_cast<double>(regions.size());
    ComposeResult out;
    const double shifted = s + std::log(a);
    for (const auto& r : regions) {
        const double ki = k_of(r, shifted, t);
        out.k_each.push_back(ki);
        out.k_total += ki;
    }
    const double share = std::pow(2.0, -s) / a;
    out.prob_bound = 1.0 - std::pow(1.0 - share, a);
    return out;
}

std::uint64_t tbud_from_realtime(double t_seconds, double k, double delta_seconds) {
    if (!(t_seconds > 0.0) || !(k > 0.0) || !(delta_seconds > 0.0))
        throw std::invalid_argument("invalid-params: all conversion inputs must be > 0");
    return static_cast<std::uint64_t>(std::ceil(t_seconds * k / delta_seconds));
}

double cost_of_budget(std::uint64_t tbud, double cost_per_move) {
    if (cost_per_move < 0.0)
        throw std::invalid_argument("invalid-params: cost per move must be >= 0");
    return cost_per_move * static_cast<double>(tbud);
}

} // namespace mcg
