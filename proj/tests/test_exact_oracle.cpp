#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcg/dp_engine.hpp"
#include "mcg/exact_oracle.hpp"
#include "mcg/rng.hpp"
#include "mcg/simulators.hpp"

using namespace mcg;

namespace {

GameParams gp(double p, double h, double gamma) {
    GameParams x;
    x.p = p;
    x.h = h;
    x.gamma = gamma;
    return x;
}

LearningRate random_rate(Xoshiro256pp& rng) {
    const double u = rng.uniform();
    if (u < 0.3) return LearningRate::stagnating(0.05 + 0.95 * rng.uniform());
    if (u < 0.6) {
        const double a = 0.5 + 2.0 * rng.uniform();
        const double off = 1.2 + 1.8 * rng.uniform();
        return LearningRate::power_law(0.95 * rng.uniform() * std::pow(off, a), a, off);
    }
    if (u < 0.8) return LearningRate::rational(1.0 + 30.0 * rng.uniform());
    return LearningRate::delayed(rng.next_u64() % 3,
                                 LearningRate::rational(2.0 + 10.0 * rng.uniform()));
}

GameParams random_params(Xoshiro256pp& rng) {
    const double p = 0.05 + 0.9 * rng.uniform();
    return gp(p, (1.0 - p) * rng.uniform(), 0.02 + 0.96 * rng.uniform());
}

} // namespace

TEST_CASE("forward_w: blind defender reduces to a geometric race") {
    // f = 0: per-step progress mass is p regardless of gamma and h
    const LearningRate f0 = LearningRate::stagnating(1.0);
    CHECK(forward_w(1, 2, gp(0.5, 0.0, 0.0), f0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(forward_w(1, 2, gp(0.5, 0.2, 0.6), f0) == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(forward_w(1, 3, gp(0.25, 0.1, 0.3), f0) ==
          doctest::Approx(1.0 - std::pow(0.75, 3)).epsilon(1e-13));
}

TEST_CASE("forward_w: needs at least k steps") {
    const LearningRate f0 = LearningRate::stagnating(1.0);
    CHECK(forward_w(3, 0, gp(1.0, 0.0, 0.0), f0) == 0.0);
    CHECK(forward_w(3, 2, gp(1.0, 0.0, 0.0), f0) == 0.0);
    CHECK(forward_w(3, 3, gp(1.0, 0.0, 0.0), f0) == doctest::Approx(1.0));
    for (std::uint64_t tbud = 1; tbud < 3; ++tbud)
        CHECK(forward_w(3, tbud, gp(0.9, 0.05, 0.2), LearningRate::rational(5.0)) < 1.0);
}

TEST_CASE("forward_w: pinned mid-size instance") {
    // frozen from an independent propagation; a seeded chain simulation at
    // 2*10^5 trials must also land within four standard errors
    const GameParams params = gp(0.4, 0.1, 0.3);
    const LearningRate rate = LearningRate::power_law(1.0, 2.0, 2.0);
    const double w = forward_w(3, 8, params, rate);
    CHECK(w == doctest::Approx(0.010746644401006334).epsilon(1e-10));

    const std::uint64_t trials = 200000;
    TrialStats st = monte_carlo(
        [&](std::uint64_t seed) { return simulate_chain(3, 8, params, rate, seed); },
        trials, 20250809);
    const double sigma = std::sqrt(w * (1.0 - w) / static_cast<double>(trials));
    CHECK(std::abs(st.win_rate - w) < 4.0 * sigma);
}

TEST_CASE("forward_w: instance guard") {
    CHECK_THROWS_AS(forward_w(100, 10000, gp(0.5, 0, 0.5), LearningRate::rational(3.0)),
                    RegimeError);
}

TEST_CASE("closed_form_w: smallest instances in closed form") {
    Xoshiro256pp rng(3);
    for (int i = 0; i < 10; ++i) {
        const GameParams params = random_params(rng);
        const LearningRate rate = random_rate(rng);
        TransitionProbs m = transitions(params, rate.f(0.0));
        CHECK(closed_form_w(1, 1, params, rate) ==
              doctest::Approx(m.m2 + m.m3).epsilon(1e-13));
    }
    // fully trained defender: no mass ever leaves progress 0
    CHECK(closed_form_w(2, 6, gp(0.5, 0.1, 0.3), LearningRate::stagnating(0.0)) == 0.0);
}

TEST_CASE("closed_form_w equals forward_w") {
    Xoshiro256pp rng(17);
    for (int draw = 0; draw < 8; ++draw) {
        const GameParams params = random_params(rng);
        const LearningRate rate = random_rate(rng);
        for (std::uint64_t k : {1, 2, 3}) {
            for (std::uint64_t tbud : {1, 2, 4, 7}) {
                const double cf = closed_form_w(k, tbud, params, rate);
                const double fw = forward_w(k, tbud, params, rate);
                CHECK(std::abs(cf - fw) < 1e-10);
            }
        }
    }
    CHECK_THROWS_AS(closed_form_w(5, 4, gp(0.5, 0, 0.5), LearningRate::rational(3.0)),
                    RegimeError);
}

TEST_CASE("stagnating_exact_w: corners and frozen sum") {
    CHECK(stagnating_exact_w(3, 3, 1.0, 1.0) == 1.0);
    CHECK(stagnating_exact_w(3, 2, 1.0, 1.0) == 0.0);
    // k = 1 is geometric
    CHECK(stagnating_exact_w(1, 10, 0.5, 0.4) ==
          doctest::Approx(1.0 - std::pow(0.8, 10)).epsilon(1e-13));
    // k=3, tbud=10, tau p = 0.3: the eight binomial terms summed with exact
    // integer coefficients
    double direct = 0.0;
    for (int T = 3; T <= 10; ++T) {
        const double coeff = static_cast<double>((T - 1) * (T - 2) / 2);
        direct += coeff * std::pow(0.7, T - 3) * std::pow(0.3, 3);
    }
    CHECK(direct == doctest::Approx(0.6172172136).epsilon(1e-10));
    CHECK(stagnating_exact_w(3, 10, 0.6, 0.5) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("stagnating rates: the level index marginalizes out") {
    Xoshiro256pp rng(29);
    for (int i = 0; i < 10; ++i) {
        const GameParams params = random_params(rng);
        const double tau = 0.05 + 0.95 * rng.uniform();
        for (std::uint64_t k : {1, 2, 3})
            for (std::uint64_t tbud : {2, 5, 8}) {
                const double fw = forward_w(k, tbud, params, LearningRate::stagnating(tau));
                const double nb = stagnating_exact_w(k, tbud, tau, params.p);
                CHECK(std::abs(fw - nb) < 1e-10);
            }
    }
}

TEST_CASE("forward_w: monotone in tbud, k, and p") {
    Xoshiro256pp rng(41);
    for (int i = 0; i < 10; ++i) {
        const GameParams params = random_params(rng);
        const LearningRate rate = random_rate(rng);
        double prev = 0.0;
        for (std::uint64_t tbud = 1; tbud <= 8; ++tbud) {
            const double w = forward_w(2, tbud, params, rate);
            CHECK(w >= prev - 1e-14);
            prev = w;
        }
        prev = 1.0;
        for (std::uint64_t k = 1; k <= 3; ++k) {
            const double w = forward_w(k, 6, params, rate);
            CHECK(w <= prev + 1e-14);
            prev = w;
        }
        GameParams lo = params, hi = params;
        lo.p = 0.2;
        hi.p = 0.7;
        lo.h = hi.h = 0.1;
        CHECK(forward_w(2, 6, lo, rate) <= forward_w(2, 6, hi, rate) + 1e-14);
    }
}

TEST_CASE("no_selfloop_enumeration equals the DP") {
    const LearningRate f0 = LearningRate::stagnating(1.0);
    const GameParams p1 = gp(0.35, 0.0, 0.4);
    CHECK(no_selfloop_enumeration(1, 1, p1, f0) ==
          doctest::Approx(alpha(p1, f0, 0)).epsilon(1e-14));
    CHECK(no_selfloop_enumeration(2, 5, p1, LearningRate::stagnating(0.0)) == 0.0);

    Xoshiro256pp rng(59);
    for (int draw = 0; draw < 50; ++draw) {
        const GameParams params = random_params(rng);
        const LearningRate rate = random_rate(rng);
        for (std::uint64_t k = 1; k <= 4; ++k)
            for (std::uint64_t tbud = 1; tbud <= 10; ++tbud) {
                const double en = no_selfloop_enumeration(k, tbud, params, rate);
                const double dp = wbar(k, tbud, params, rate);
                CHECK(std::abs(en - dp) < 1e-10);
            }
    }
}

TEST_CASE("forward_w never exceeds the self-loop-free proxy") {
    Xoshiro256pp rng(67);
    for (int draw = 0; draw < 20; ++draw) {
        const GameParams params = random_params(rng);
        const LearningRate rate = random_rate(rng);
        for (std::uint64_t k : {1, 2, 3})
            for (std::uint64_t tbud : {1, 4, 8})
                CHECK(forward_w(k, tbud, params, rate) <=
                      wbar(k, tbud, params, rate) + 1e-12);
    }
}

TEST_CASE("log_choose handles edges") {
    CHECK(log_choose(5, 2) == doctest::Approx(std::log(10.0)).epsilon(1e-13));
    CHECK(log_choose(5, 0) == doctest::Approx(0.0));
    CHECK(std::isinf(log_choose(3, 5)));
}
