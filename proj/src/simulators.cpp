#include "mcg/simulators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "mcg/rng.hpp"

namespace mcg {

std::string to_string(Winner w) {
    switch (w) {
    case Winner::Attacker: return "attacker";
    case Winner::Defender: return "defender";
    case Winner::Timeout: return "timeout";
    }
    return "?";
}

void MalwareConfig::validate() const {
    if (!(n > 0.0) || k_vuln < 0.0 || h_count < 0.0)
        throw std::invalid_argument("config-invalid: counts must be nonnegative, n > 0");
    if (k_vuln + h_count > n)
        throw std::invalid_argument("config-invalid: k_vuln + h_count must not exceed n");
    if (static_cast<double>(k_target) > k_vuln)
        throw std::invalid_argument("config-invalid: k_target must not exceed k_vuln");
    if (!(dropout_theta > 0.0 && dropout_theta <= 1.0))
        throw std::invalid_argument("config-invalid: need 0 < dropout_theta <= 1");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("config-invalid: gamma must lie in [0,1]");
    if (rate.is_direct_alpha())
        throw std::invalid_argument("config-invalid: simulators need a rate with f(l)");
    if (!(scan_rate_per_hour > 0.0))
        throw std::invalid_argument("config-invalid: scan rate must be > 0");
    if (initial_infected < 1 || static_cast<double>(initial_infected) > k_vuln)
        throw std::invalid_argument("config-invalid: need 1 <= initial_infected <= k_vuln");
    if (max_steps < 1)
        throw std::invalid_argument("config-invalid: max_steps must be >= 1");
}

MalwareConfig codered1v2_config() {
    MalwareConfig c;
    c.n = 4294967296.0; // 2^32
    c.k_vuln = 350000.0;
    c.h_count = 0.0;
    c.k_target = 350000;
    c.strategy = ScanStrategy::UniformRandom;
    c.gamma = 0.0;
    c.rate = LearningRate::stagnating(1.0);
    c.dropout_theta = 1.0;
    c.scan_rate_per_hour = 10188.0;
    c.max_steps = 1ULL << 62;
    c.initial_infected = 1;
    return c;
}

namespace {

void push_trace(GameOutcome& out, std::uint64_t step, double hours,
                std::uint64_t progress, std::uint64_t level) {
    out.trace.push_back(TracePoint{step, hours, progress, level});
}

} // namespace

// The loop advances directly to the next state-changing step: between two
// changes every per-step probability is constant, so the gap is geometric
// with the per-step change probability. This keeps 2^32-host games at
// CodeRed scale tractable without touching the step distribution.
GameOutcome simulate_malware(const MalwareConfig& config, std::uint64_t seed) {
    config.validate();
    Xoshiro256pp rng(trial_seed(seed, 0x6d616c77)); // domain-tagged stream

    GameOutcome out;
    double infected = static_cast<double>(config.initial_infected);
    std::uint64_t level = 0;
    std::uint64_t steps = 0;
    double hours = 0.0;
    double omf = config.rate.one_minus_f(0.0);
    const double g = config.gamma;
    const bool hitlist = config.strategy == ScanStrategy::Hitlist;
    bool dropping_out = false;

    push_trace(out, 0, 0.0, static_cast<std::uint64_t>(infected), 0);

    auto finish = [&](Winner w) {
        out.winner = w;
        out.steps = steps;
        out.hours = hours;
        out.final_progress = static_cast<std::uint64_t>(infected);
        out.final_level = level;
        push_trace(out, steps, hours, out.final_progress, level);
        return out;
    };

    if (static_cast<std::uint64_t>(infected) >= config.k_target)
        return finish(Winner::Attacker);

    for (;;) {
        const double remaining = config.n - infected;
        double p_vuln, p_hp;
        if (hitlist) {
            p_vuln = infected < config.k_vuln ? 1.0 : 0.0;
            p_hp = 0.0;
        } else {
            p_vuln = (config.k_vuln - infected) / remaining;
            p_hp = config.h_count / remaining;
        }
        const double p_change = g + (1.0 - g) * omf * (p_vuln + p_hp);
        const double hours_per_step = 1.0 / (config.scan_rate_per_hour * infected);

        if (p_change <= 0.0) {
            // nothing can ever change again; run out the clock
            std::uint64_t left = config.max_steps - steps;
            if (config.max_hours > 0.0) {
                const double hleft = (config.max_hours - hours) / hours_per_step;
                left = std::min(left, static_cast<std::uint64_t>(std::max(0.0, hleft)));
            }
            steps += left;
            hours += static_cast<double>(left) * hours_per_step;
            return finish(Winner::Timeout);
        }

        const std::uint64_t gap = rng.geometric(p_change);

        // horizon checks: the event may land past the step or hour budget
        if (steps + gap > config.max_steps ||
            (config.max_hours > 0.0 &&
             hours + static_cast<double>(gap) * hours_per_step > config.max_hours)) {
            std::uint64_t left = config.max_steps - steps;
            if (config.max_hours > 0.0) {
                const double hleft = (config.max_hours - hours) / hours_per_step;
                left = std::min(left, static_cast<std::uint64_t>(std::max(0.0, hleft)));
            }
            steps += left;
            hours += static_cast<double>(left) * hours_per_step;
            return finish(Winner::Timeout);
        }
        steps += gap;
        hours += static_cast<double>(gap) * hours_per_step;

        // outcome of the change step: walk the joint distribution of
        // (sampled, filtered, probe category), conditioned on a change
        const double f = 1.0 - omf;
        const double p_other = std::max(0.0, 1.0 - p_vuln - p_hp);
        const double w_learn_only_sampled =
            g * (f + omf * (p_hp + p_other));          // sampled, no infection
        const double w_sampled_infect = g * omf * p_vuln; // sampled and infected
        const double w_infect_only = (1.0 - g) * omf * p_vuln;
        // remaining mass: (1-g) * omf * p_hp -> honeypot learning only
        bool learn, infect;
        double u = rng.uniform() * p_change;
        if (u < w_learn_only_sampled) {
            learn = true; infect = false;
        } else if (u < w_learn_only_sampled + w_sampled_infect) {
            learn = true; infect = true;
        } else if (u < w_learn_only_sampled + w_sampled_infect + w_infect_only) {
            learn = false; infect = true;
        } else {
            learn = true; infect = false;
        }

        if (learn) {
            ++level;
            omf = config.rate.one_minus_f(static_cast<double>(level));
            if (config.dropout_theta < 1.0 && 1.0 - omf >= 1.0 - config.dropout_theta)
                dropping_out = true;
        }
        if (infect) infected += 1.0;
        push_trace(out, steps, hours, static_cast<std::uint64_t>(infected), level);

        if (static_cast<std::uint64_t>(infected) >= config.k_target)
            return finish(Winner::Attacker);
        if (dropping_out) return finish(Winner::Defender);
        if (steps >= config.max_steps) return finish(Winner::Timeout);
        if (config.max_hours > 0.0 && hours >= config.max_hours)
            return finish(Winner::Timeout);
    }
}

void MTDConfig::validate() const {
    if (!(n > 0.0) || k_vuln < 0.0 || h_count < 0.0)
        throw std::invalid_argument("config-invalid: counts must be nonnegative, n > 0");
    if (k_vuln + h_count > n)
        throw std::invalid_argument("config-invalid: k_vuln + h_count must not exceed n");
    if (static_cast<double>(k_target) > k_vuln)
        throw std::invalid_argument("config-invalid: k_target must not exceed k_vuln");
    if (!(gamma >= 0.0 && gamma <= 1.0) || !(h >= 0.0 && h <= 1.0))
        throw std::invalid_argument("config-invalid: gamma and h must lie in [0,1]");
    if (lstar < 1)
        throw std::invalid_argument("config-invalid: lstar must be >= 1");
    if (max_steps < 1)
        throw std::invalid_argument("config-invalid: max_steps must be >= 1");
}

GameOutcome simulate_mtd(const MTDConfig& config, std::uint64_t seed) {
    config.validate();
    Xoshiro256pp rng(trial_seed(seed, 0x6d746467)); // domain-tagged stream

    GameOutcome out;
    double located = 0.0;
    std::uint64_t level = 0;
    std::uint64_t steps = 0;
    const double q_obs = config.gamma + (1.0 - config.gamma) * config.h;
    const bool hitlist = config.strategy == ScanStrategy::Hitlist;

    push_trace(out, 0, 0.0, 0, 0);

    auto finish = [&](Winner w) {
        out.winner = w;
        out.steps = steps;
        out.final_progress = static_cast<std::uint64_t>(located);
        out.final_level = level;
        push_trace(out, steps, 0.0, out.final_progress, level);
        return out;
    };

    if (config.k_target == 0) return finish(Winner::Attacker);

    for (;;) {
        double p_vuln;
        if (hitlist) {
            p_vuln = located < config.k_vuln ? 1.0 : 0.0;
        } else {
            p_vuln = (config.k_vuln - located) / (config.n - located);
        }
        const double p_change = 1.0 - (1.0 - q_obs) * (1.0 - p_vuln);
        if (p_change <= 0.0) {
            steps = config.max_steps;
            return finish(Winner::Timeout);
        }
        const std::uint64_t gap = rng.geometric(p_change);
        if (steps + gap > config.max_steps) {
            steps = config.max_steps;
            return finish(Winner::Timeout);
        }
        steps += gap;

        bool observed, found;
        const double u = rng.uniform() * p_change;
        if (u < q_obs * p_vuln) {
            observed = true; found = true;
        } else if (u < q_obs) {
            observed = true; found = false;
        } else {
            observed = false; found = true;
        }

        bool reallocate = false;
        if (observed) {
            ++level;
            if (level >= config.lstar) {
                // state at the threshold crossing, before anything is cleared
                out.first_passage_progress =
                    static_cast<std::uint64_t>(located) + (found ? 1 : 0);
                reallocate = true;
                located = 0.0;
            }
        }
        if (found) located += 1.0;
        push_trace(out, steps, 0.0, static_cast<std::uint64_t>(located), level);

        if (static_cast<std::uint64_t>(located) >= config.k_target)
            return finish(Winner::Attacker);
        if (reallocate) return finish(Winner::Defender);
        if (steps >= config.max_steps) return finish(Winner::Timeout);
    }
}

GameOutcome simulate_chain(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                           const LearningRate& rate, std::uint64_t seed) {
    if (k < 1 || tbud < 1)
        throw std::invalid_argument("invalid-size: need k >= 1 and tbud >= 1");
    params.validate();
    Xoshiro256pp rng(trial_seed(seed, 0x636861696e)); // domain-tagged stream

    GameOutcome out;
    std::uint64_t i = 0, l = 0;
    push_trace(out, 0, 0.0, 0, 0);
    TransitionProbs m = transitions(params, rate.f(0.0));

    std::uint64_t step = 0;
    for (step = 1; step <= tbud; ++step) {
        const double u = rng.uniform();
        bool changed = false;
        if (u < m.m2) {
            ++i;
            changed = true;
        } else if (u < m.m2 + m.m3) {
            ++i; ++l;
            changed = true;
        } else if (u < m.m2 + m.m3 + m.m4) {
            ++l;
            changed = true;
        }
        if (changed) {
            push_trace(out, step, 0.0, i, l);
            if (i >= k) break;
            m = transitions(params, rate.f(static_cast<double>(l)));
        }
    }
    out.winner = i >= k ? Winner::Attacker : Winner::Timeout;
    out.steps = std::min(step, tbud);
    out.final_progress = i;
    out.final_level = l;
    return out;
}

namespace {

constexpr std::uint64_t kBlock = 1024;

struct BlockAccum {
    std::uint64_t attacker = 0, defender = 0, timeout = 0;
    double steps = 0.0, progress = 0.0, level = 0.0;
    std::vector<double> grid_progress, grid_level;
};

double trace_value_at(const std::vector<TracePoint>& trace, double point, bool by_hours,
                      bool level) {
    // last state change at or before the grid point
    double val = 0.0;
    for (const auto& tp : trace) {
        const double axis = by_hours ? tp.hours : static_cast<double>(tp.step);
        if (axis > point) break;
        val = static_cast<double>(level ? tp.level : tp.progress);
    }
    return val;
}

unsigned resolve_threads(unsigned max_threads) {
    if (max_threads == 0) {
        if (const char* env = std::getenv("MC_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) max_threads = static_cast<unsigned>(v);
        }
    }
    if (max_threads == 0) max_threads = std::thread::hardware_concurrency();
    return std::max(1u, max_threads);
}

} // namespace

TrialStats monte_carlo(const std::function<GameOutcome(std::uint64_t)>& sim,
                       std::uint64_t trials, std::uint64_t base_seed,
                       const TimeGrid& grid, unsigned max_threads,
                       std::vector<TrialRecord>* records) {
    if (trials < 1) throw std::invalid_argument("invalid-params: need trials >= 1");
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<BlockAccum> acc(blocks);
    if (records) records->assign(trials, TrialRecord{});

    std::atomic<std::uint64_t> next_block{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1);
            if (b >= blocks) return;
            BlockAccum& a = acc[b];
            a.grid_progress.assign(grid.points.size(), 0.0);
            a.grid_level.assign(grid.points.size(), 0.0);
            const std::uint64_t lo = b * kBlock;
            const std::uint64_t hi = std::min(trials, lo + kBlock);
            for (std::uint64_t tr = lo; tr < hi; ++tr) {
                GameOutcome o = sim(trial_seed(base_seed, tr));
                switch (o.winner) {
                case Winner::Attacker: ++a.attacker; break;
                case Winner::Defender: ++a.defender; break;
                case Winner::Timeout: ++a.timeout; break;
                }
                a.steps += static_cast<double>(o.steps);
                a.progress += static_cast<double>(o.final_progress);
                a.level += static_cast<double>(o.final_level);
                for (std::size_t gi = 0; gi < grid.points.size(); ++gi) {
                    a.grid_progress[gi] +=
                        trace_value_at(o.trace, grid.points[gi], grid.by_hours, false);
                    a.grid_level[gi] +=
                        trace_value_at(o.trace, grid.points[gi], grid.by_hours, true);
                }
                if (records)
                    (*records)[tr] = TrialRecord{tr, o.winner, o.steps, o.final_progress,
                                                 o.final_level};
            }
        }
    };

    const unsigned nthreads =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(max_threads), blocks));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    TrialStats st;
    st.trials = trials;
    st.grid = grid;
    st.mean_progress.assign(grid.points.size(), 0.0);
    st.mean_level.assign(grid.points.size(), 0.0);
    st.rng_name = std::string(Xoshiro256pp::name());
    double steps = 0.0, prog = 0.0, lev = 0.0;
    for (const auto& a : acc) { // fixed block order keeps sums reproducible
        st.attacker_wins += a.attacker;
        st.defender_wins += a.defender;
        st.timeouts += a.timeout;
        steps += a.steps;
        prog += a.progress;
        lev += a.level;
        for (std::size_t gi = 0; gi < grid.points.size(); ++gi) {
            st.mean_progress[gi] += a.grid_progress[gi];
            st.mean_level[gi] += a.grid_level[gi];
        }
    }
    const double n = static_cast<double>(trials);
    st.win_rate = static_cast<double>(st.attacker_wins) / n;
    st.std_error = std::sqrt(st.win_rate * (1.0 - st.win_rate) / n);
    st.mean_steps = steps / n;
    st.mean_final_progress = prog / n;
    st.mean_final_level = lev / n;
    for (std::size_t gi = 0; gi < grid.points.size(); ++gi) {
        st.mean_progress[gi] /= n;
        st.mean_level[gi] /= n;
    }
    return st;
}

std::vector<std::pair<double, double>> epidemic_curve(double n, double k_vuln,
                                                      double scan_rate_per_hour,
                                                      double i0, double hours,
                                                      double step_hours) {
    if (!(n > 0.0) || !(k_vuln > 0.0) || scan_rate_per_hour < 0.0)
        throw std::invalid_argument(
            "invalid-params: need n > 0, k_vuln > 0, scan rate >= 0");
    if (!(i0 > 0.0) || i0 > k_vuln)
        throw std::invalid_argument("invalid-params: need 0 < i0 <= k_vuln");
    if (!(hours >= 0.0) || !(step_hours > 0.0))
        throw std::invalid_argument("invalid-params: need hours >= 0, step_hours > 0");

    const double beta = scan_rate_per_hour / n;
    auto deriv = [&](double I) { return beta * I * (k_vuln - I); };

    std::vector<std::pair<double, double>> out;
    double t = 0.0, I = i0;
    out.emplace_back(t, I);
    while (t < hours) {
        const double dt = std::min(step_hours, hours - t);
        const double k1 = deriv(I);
        const double k2 = deriv(I + 0.5 * dt * k1);
        const double k3 = deriv(I + 0.5 * dt * k2);
        const double k4 = deriv(I + dt * k3);
        I += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        I = std::min(I, k_vuln);
        t += dt;
        out.emplace_back(t, I);
    }
    return out;
}

double epidemic_logistic(double n, double k_vuln, double scan_rate_per_hour, double i0,
                         double t_hours) {
    const double beta = scan_rate_per_hour / n;
    return k_vuln / (1.0 + (k_vuln / i0 - 1.0) * std::exp(-beta * k_vuln * t_hours));
}

} // namespace mcg
