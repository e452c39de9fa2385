#include "mcg/exact_oracle.hpp"

#include <cmath>
#include <vector>

namespace mcg {

double log_choose(double n, double r) {
    if (r < 0.0 || r > n) return -INFINITY;
    return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

double forward_w(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                 const LearningRate& rate) {
    if (k < 1) throw std::invalid_argument("invalid-size: need k >= 1");
    params.validate();
    if (tbud == 0) return 0.0; // no moves, no progress
    const double work = static_cast<double>(k) * static_cast<double>(tbud) *
                        static_cast<double>(tbud);
    if (work > 1e8)
        throw RegimeError("instance-too-large: forward propagation needs k*tbud^2 <= 1e8");

    // transition masses per level; p is constant across progress states
    std::vector<TransitionProbs> m(tbud);
    for (std::uint64_t l = 0; l < tbud; ++l)
        m[l] = transitions(params, rate.f(static_cast<double>(l)));

    const std::uint64_t levels = tbud + 1;
    std::vector<double> cur(k * levels, 0.0), nxt(k * levels, 0.0);
    cur[0] = 1.0;
    double absorbed = 0.0;

    for (std::uint64_t step = 0; step < tbud; ++step) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        const std::uint64_t lmax = std::min<std::uint64_t>(step, tbud - 1);
        for (std::uint64_t l = 0; l <= lmax; ++l) {
            const TransitionProbs& t = m[l];
            for (std::uint64_t i = 0; i < k; ++i) {
                const double mass = cur[i * levels + l];
                if (mass == 0.0) continue;
                nxt[i * levels + l] += t.m1 * mass;
                nxt[i * levels + l + 1] += t.m4 * mass;
                if (i + 1 < k) {
                    nxt[(i + 1) * levels + l] += t.m2 * mass;
                    nxt[(i + 1) * levels + l + 1] += t.m3 * mass;
                } else {
                    absorbed += (t.m2 + t.m3) * mass;
                }
            }
        }
        cur.swap(nxt);
    }
    return absorbed;
}

double stagnating_exact_w(std::uint64_t k, std::uint64_t tbud, double tau, double p) {
    if (k < 1) throw std::invalid_argument("invalid-size: need k >= 1");
    if (!(tau >= 0.0 && tau <= 1.0) || !(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("invalid-params: tau and p must lie in [0,1]");
    const double q = tau * p;
    if (tbud < k) return 0.0;
    if (q >= 1.0) return 1.0;
    if (q <= 0.0) return 0.0;
    const double lq = std::log(q), lnq = std::log1p(-q);
    double sum = 0.0;
    for (std::uint64_t T = k; T <= tbud; ++T) {
        const double dT = static_cast<double>(T), dk = static_cast<double>(k);
        sum += std::exp(log_choose(dT - 1.0, dk - 1.0) + (dT - dk) * lnq + dk * lq);
    }
    return std::min(sum, 1.0);
}

namespace {

void check_enum_guard(std::uint64_t k, std::uint64_t tbud) {
    if (k < 1 || tbud < 1)
        throw std::invalid_argument("invalid-size: need k >= 1 and tbud >= 1");
    if (k > 4 || tbud > 10)
        throw RegimeError("instance-too-large: enumeration is limited to k <= 4, tbud <= 10");
}

// sum over t_0..t_L >= 0 with t_0+..+t_L <= tmax of
//   prod_l C(t_l + g_l - 1, t_l) m1(l)^{t_l} (1 - m1(l))^{g_l}
double selfloop_sum(const std::vector<double>& m1, const std::vector<std::uint64_t>& g,
                    std::uint64_t idx, std::int64_t left, double prod) {
    if (idx == g.size()) return prod;
    const double base = std::pow(1.0 - m1[idx], static_cast<double>(g[idx]));
    double acc = 0.0;
    double nb = 1.0; // C(t+g-1, t) m1^t, walked by the recurrence below
    for (std::int64_t t = 0; t <= left; ++t) {
        acc += selfloop_sum(m1, g, idx + 1, left - t, prod * nb * base);
        nb *= m1[idx] * static_cast<double>(t + static_cast<std::int64_t>(g[idx])) /
              static_cast<double>(t + 1);
    }
    return acc;
}

double run_sum(const std::vector<double>& hor, const std::vector<double>& m1,
               std::vector<std::uint64_t>& g, std::uint64_t idx, std::int64_t left,
               double prod, std::int64_t tmax) {
    const std::uint64_t L1 = g.size();
    if (idx + 1 == L1) {
        g[idx] = static_cast<std::uint64_t>(left) + 1;
        double pg = prod * std::pow(hor[idx], static_cast<double>(left));
        return pg * selfloop_sum(m1, g, 0, tmax, 1.0);
    }
    double acc = 0.0;
    double hp = 1.0;
    for (std::int64_t e = 0; e <= left; ++e) { // e = g_idx - 1
        g[idx] = static_cast<std::uint64_t>(e) + 1;
        acc += run_sum(hor, m1, g, idx + 1, left - e, prod * hp, tmax);
        hp *= hor[idx];
    }
    return acc;
}

} // namespace

double closed_form_w(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                     const LearningRate& rate) {
    check_enum_guard(k, tbud);
    params.validate();

    std::vector<double> m1(tbud), hor(tbud), dia(tbud), ver(tbud), fin(tbud);
    for (std::uint64_t l = 0; l < tbud; ++l) {
        TransitionProbs t = transitions(params, rate.f(static_cast<double>(l)));
        m1[l] = t.m1;
        const double leave = 1.0 - t.m1;
        hor[l] = leave > 0.0 ? t.m2 / leave : 0.0;
        dia[l] = leave > 0.0 ? t.m3 / leave : 0.0;
        ver[l] = leave > 0.0 ? t.m4 / leave : 0.0;
        fin[l] = hor[l] + dia[l];
    }

    double total = 0.0;
    for (std::uint64_t L = 0; L < tbud; ++L) {
        const std::uint64_t bmax = std::min<std::uint64_t>(L, k - 1);
        for (std::uint64_t B = 0; B <= bmax; ++B) {
            const std::int64_t tmax =
                static_cast<std::int64_t>(tbud) - 1 -
                (static_cast<std::int64_t>(k) - 1 + static_cast<std::int64_t>(L) -
                 static_cast<std::int64_t>(B));
            if (tmax < 0) continue;

            // level-entry patterns b_1..b_L with exactly B diagonal entries
            double bsum = 0.0;
            for (std::uint64_t mask = 0; mask < (1ULL << L); ++mask) {
                if (static_cast<std::uint64_t>(__builtin_popcountll(mask)) != B) continue;
                double prod = 1.0;
                for (std::uint64_t l = 0; l < L; ++l)
                    prod *= (mask >> l) & 1ULL ? dia[l] : ver[l];
                bsum += prod;
            }
            if (bsum == 0.0) continue;

            // horizontal run lengths g_0..g_L >= 1 with sum (g_l - 1) = k-1-B,
            // each combined with its self-loop allocation sum
            std::vector<std::uint64_t> g(L + 1);
            const std::int64_t runs = static_cast<std::int64_t>(k) - 1 -
                                      static_cast<std::int64_t>(B);
            double gacc = run_sum(hor, m1, g, 0, runs, 1.0, tmax);

            total += fin[L] * bsum * gacc;
        }
    }
    return total;
}

namespace {

double nsl_paths(std::uint64_t j, std::uint64_t l, double prob, std::uint64_t k,
                 std::uint64_t tbud, double gamma, const std::vector<double>& a) {
    if (l >= tbud) return 0.0;
    const double al = a[l];
    double acc = 0.0;
    if (j + 1 == k) {
        acc += prob * al; // horizontal or diagonal, both absorb
    } else {
        acc += nsl_paths(j + 1, l, prob * (1.0 - gamma) * al, k, tbud, gamma, a);
        acc += nsl_paths(j + 1, l + 1, prob * gamma * al, k, tbud, gamma, a);
    }
    acc += nsl_paths(j, l + 1, prob * (1.0 - al), k, tbud, gamma, a);
    return acc;
}

} // namespace

double no_selfloop_enumeration(std::uint64_t k, std::uint64_t tbud,
                               const GameParams& params, const LearningRate& rate) {
    check_enum_guard(k, tbud);
    std::vector<double> a(tbud);
    for (std::uint64_t l = 0; l < tbud; ++l) a[l] = alpha(params, rate, l);
    return nsl_paths(0, 0, 1.0, k, tbud, params.gamma, a);
}

} // namespace mcg
