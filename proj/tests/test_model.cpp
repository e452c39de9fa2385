#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "mcg/model.hpp"
#include "mcg/rng.hpp"

using namespace mcg;

namespace {

GameParams gp(double p, double h, double gamma) {
    GameParams x;
    x.p = p;
    x.h = h;
    x.gamma = gamma;
    return x;
}

LearningRate random_monotone_rate(Xoshiro256pp& rng) {
    const double u = rng.uniform();
    if (u < 0.25) return LearningRate::stagnating(rng.uniform());
    if (u < 0.5) {
        const double a = 0.5 + 2.5 * rng.uniform();
        const double off = 1.0 + 2.0 * rng.uniform();
        return LearningRate::power_law(0.99 * rng.uniform() * std::pow(off, a), a, off);
    }
    if (u < 0.7) return LearningRate::rational(1.0 + 50.0 * rng.uniform());
    if (u < 0.85)
        return LearningRate::delayed(rng.next_u64() % 5,
                                     LearningRate::rational(1.0 + 10.0 * rng.uniform()));
    std::vector<double> vals;
    double v = 0.4 * rng.uniform();
    for (int i = 0; i < 5; ++i) {
        vals.push_back(v);
        v = std::min(1.0, v + 0.3 * rng.uniform());
    }
    return LearningRate::table(std::move(vals));
}

} // namespace

TEST_CASE("transitions: degenerate corners") {
    // every move progresses unobserved
    TransitionProbs m = transitions(gp(1.0, 0.0, 0.0), 0.0);
    CHECK(m.m1 == 0.0);
    CHECK(m.m2 == 1.0);
    CHECK(m.m3 == 0.0);
    CHECK(m.m4 == 0.0);
    // every move sampled, none progress
    m = transitions(gp(0.0, 0.0, 1.0), 0.0);
    CHECK(m.m1 == 0.0);
    CHECK(m.m2 == 0.0);
    CHECK(m.m3 == 0.0);
    CHECK(m.m4 == 1.0);
}

TEST_CASE("transitions: hand-evaluated instance") {
    // p=0.5, h=0.1, gamma=0.2, f=0.5, each mass substituted by hand
    TransitionProbs m = transitions(gp(0.5, 0.1, 0.2), 0.5);
    CHECK(m.m1 == doctest::Approx(0.56).epsilon(1e-14));
    CHECK(m.m2 == doctest::Approx(0.20).epsilon(1e-14));
    CHECK(m.m3 == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(m.m4 == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(std::abs(m.sum() - 1.0) < 1e-12);
}

TEST_CASE("transitions: rejects p + h > 1 and bad probabilities") {
    CHECK_THROWS_AS(transitions(gp(0.8, 0.3, 0.1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transitions(gp(-0.1, 0.0, 0.1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transitions(gp(0.5, 0.0, 1.2), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transitions(gp(0.5, 0.0, 0.5), 1.5), std::invalid_argument);
}

TEST_CASE("transitions: random grid stays stochastic") {
    Xoshiro256pp rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double p = rng.uniform();
        const double h = (1.0 - p) * rng.uniform();
        const double g = rng.uniform();
        const double f = rng.uniform();
        TransitionProbs m = transitions(gp(p, h, g), f);
        for (double v : {m.m1, m.m2, m.m3, m.m4}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(std::abs(m.sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("alpha: closed-form corners") {
    // gamma = 0, h = 0, f = 0: numerator equals denominator
    CHECK(alpha(gp(0.3, 0.0, 0.0), LearningRate::stagnating(1.0), 5) == doctest::Approx(1.0));
    // f = 1 kills the numerator
    CHECK(alpha(gp(0.3, 0.1, 0.4), LearningRate::stagnating(0.0), 2) == 0.0);
    // direct alpha
    CHECK(alpha(gp(0, 0, 0.5), LearningRate::direct_alpha(1.0), 3) == doctest::Approx(0.25));
    // vanishing denominator is defined as zero progress
    CHECK(alpha(gp(0.0, 0.0, 0.0), LearningRate::stagnating(1.0), 0) == 0.0);
}

TEST_CASE("no_selfloop_split: corners and cross-check against transitions") {
    SplitProbs s = no_selfloop_split(gp(0.3, 0.0, 0.0), LearningRate::stagnating(1.0), 0);
    CHECK(s.horizontal == doctest::Approx(1.0));
    CHECK(s.diagonal == 0.0);
    CHECK(s.vertical == doctest::Approx(0.0));

    s = no_selfloop_split(gp(0.3, 0.1, 0.4), LearningRate::stagnating(0.0), 1);
    CHECK(s.horizontal == 0.0);
    CHECK(s.diagonal == 0.0);
    CHECK(s.vertical == 1.0);

    // equals (m2, m3, m4)/(1 - m1) componentwise
    Xoshiro256pp rng(11);
    for (int i = 0; i < 200; ++i) {
        const GameParams params = gp(0.05 + 0.9 * rng.uniform(), 0.0, 0.05 + 0.9 * rng.uniform());
        const LearningRate rate = random_monotone_rate(rng);
        const std::uint64_t l = rng.next_u64() % 20;
        TransitionProbs m = transitions(params, rate.f(static_cast<double>(l)));
        if (m.m1 >= 1.0) continue;
        SplitProbs sp = no_selfloop_split(params, rate, l);
        const double leave = 1.0 - m.m1;
        CHECK(std::abs(sp.horizontal - m.m2 / leave) < 1e-12);
        CHECK(std::abs(sp.diagonal - m.m3 / leave) < 1e-12);
        CHECK(std::abs(sp.vertical - m.m4 / leave) < 1e-12);
        CHECK(std::abs(sp.horizontal + sp.diagonal + sp.vertical - 1.0) < 1e-12);
    }
}

TEST_CASE("alpha is nonincreasing in l for the built-in forms") {
    Xoshiro256pp rng(23);
    for (int i = 0; i < 100; ++i) {
        const GameParams params = gp(0.1 + 0.8 * rng.uniform(), 0.05, 0.1 + 0.8 * rng.uniform());
        const LearningRate rate = random_monotone_rate(rng);
        double prev = alpha(params, rate, 0);
        for (std::uint64_t l = 1; l < 40; ++l) {
            const double cur = alpha(params, rate, l);
            CHECK(cur <= prev + 1e-14);
            prev = cur;
        }
    }
    LearningRate direct = LearningRate::direct_alpha(0.7);
    GameParams params = gp(0, 0, 0.5);
    double prev = alpha(params, direct, 0);
    for (std::uint64_t l = 1; l < 40; ++l) {
        const double cur = alpha(params, direct, l);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("stagnating rate: progress mass stays tau*p") {
    Xoshiro256pp rng(5);
    for (int i = 0; i < 200; ++i) {
        const double tau = rng.uniform();
        const double p = rng.uniform();
        const double g = rng.uniform();
        const double h = (1.0 - p) * rng.uniform();
        TransitionProbs m = transitions(gp(p, h, g), LearningRate::stagnating(tau).f(3.0));
        CHECK(std::abs((m.m2 + m.m3) - tau * p) < 1e-15);
    }
}

TEST_CASE("learning rates: values stay in [0,1] and are nondecreasing") {
    Xoshiro256pp rng(31);
    for (int i = 0; i < 100; ++i) {
        const LearningRate rate = random_monotone_rate(rng);
        double prev = rate.f(0.0);
        for (double l = 0.0; l < 60.0; l += 0.7) {
            const double f = rate.f(l);
            CHECK(f >= -1e-15);
            CHECK(f <= 1.0 + 1e-15);
            CHECK(f >= prev - 1e-12);
            prev = f;
        }
    }
}

TEST_CASE("learning rate validation") {
    CHECK_THROWS_AS(LearningRate::stagnating(1.5), std::invalid_argument);
    CHECK_THROWS_AS(LearningRate::power_law(8.0, 2.0, 2.0), std::invalid_argument); // f(0) < 0
    CHECK_THROWS_AS(LearningRate::power_law(1.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LearningRate::rational(0.0), std::invalid_argument);
    CHECK_THROWS_AS(LearningRate::direct_alpha(0.0), std::invalid_argument);
    CHECK_THROWS_AS(LearningRate::table({0.5, 0.3}), std::invalid_argument); // not monotone
    CHECK_THROWS_AS(LearningRate::table({}), std::invalid_argument);
    // direct-alpha rates have no f
    CHECK_THROWS_AS(LearningRate::direct_alpha(1.0).f(2.0), std::logic_error);
}

TEST_CASE("rate spec grammar round trip") {
    for (const char* spec : {"stagnating:tau=0.2", "powerlaw:d=1,a=2,offset=2",
                             "rational:scale=1000", "alpha:a=0.9",
                             "delayed:lstar=100,inner=(powerlaw:d=1,a=2,offset=2)"}) {
        const LearningRate r = LearningRate::parse(spec);
        const LearningRate r2 = LearningRate::parse(r.to_spec());
        if (!r.is_direct_alpha()) {
            for (double l = 0.0; l < 150.0; l += 13.0)
                CHECK(r.f(l) == doctest::Approx(r2.f(l)).epsilon(1e-15));
        } else {
            CHECK(r2.is_direct_alpha());
            CHECK(r.alpha_exponent() == r2.alpha_exponent());
        }
    }
    CHECK_THROWS_AS(LearningRate::parse("nonsense:x=1"), std::invalid_argument);
    CHECK_THROWS_AS(LearningRate::parse("powerlaw:d=1"), std::invalid_argument);
}

TEST_CASE("delayed rate: zero below lstar, inner beyond") {
    const LearningRate inner = LearningRate::power_law(1.0, 2.0, 2.0);
    const LearningRate r = LearningRate::delayed(100, inner);
    CHECK(r.f(0.0) == 0.0);
    CHECK(r.f(99.0) == 0.0);
    CHECK(r.f(100.0) == doctest::Approx(inner.f(0.0)));
    CHECK(r.f(137.0) == doctest::Approx(inner.f(37.0)));
    CHECK(r.shifted_past_delay().f(5.0) == doctest::Approx(inner.f(5.0)));
}

TEST_CASE("table rate: file loading and tail rules") {
    const std::string path = "rate_table_test.txt";
    {
        std::ofstream out(path);
        out << "# detection rates\n0.0\n0.2\n0.5\n0.8\n0.9\n";
    }
    std::vector<double> vals = load_rate_table(path);
    REQUIRE(vals.size() == 5);
    const LearningRate hold = LearningRate::table(vals, LearningRate::Tail::HoldLast);
    CHECK(hold.f(2.0) == doctest::Approx(0.5));
    CHECK(hold.f(4.0) == doctest::Approx(0.9));
    CHECK(hold.f(40.0) == doctest::Approx(0.9)); // held
    const LearningRate fit = LearningRate::table(vals, LearningRate::Tail::PowerLawFit);
    CHECK(fit.f(2.0) == doctest::Approx(0.5));
    // extrapolated f keeps climbing but never exceeds 1
    CHECK(fit.f(50.0) >= 0.9);
    CHECK(fit.f(5000.0) <= 1.0);
    const LearningRate parsed = LearningRate::parse("table:file=" + path + ",tail=hold");
    CHECK(parsed.f(3.0) == doctest::Approx(0.8));
}
