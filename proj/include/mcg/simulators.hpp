#ifndef MCG_SIMULATORS_HPP
#define MCG_SIMULATORS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mcg/model.hpp"

namespace mcg {

enum class Winner { Attacker, Defender, Timeout };

std::string to_string(Winner w);

/// One point of a run trace, recorded at every state change.
struct TracePoint {
    std::uint64_t step = 0;
    double hours = 0.0;
    std::uint64_t progress = 0;
    std::uint64_t level = 0;
};

struct GameOutcome {
    Winner winner = Winner::Timeout;
    std::uint64_t steps = 0;
    double hours = 0.0;
    std::uint64_t final_progress = 0;
    std::uint64_t final_level = 0;
    // progress at the step the defender's level threshold fired (before any
    // resource reallocation cleared it); 0 unless that happened
    std::uint64_t first_passage_progress = 0;
    std::vector<TracePoint> trace;
};

enum class ScanStrategy { UniformRandom, Hitlist };

/// Worm-propagation game over an address space of n hosts, k_vuln of them
/// vulnerable and h_count of them honeypots. Progress counts total infected
/// machines (including the initial seed). One step is one probe; with
/// scan_rate probes per hour per infected machine, wall-clock time advances
/// by 1/(scan_rate * infected) per step.
struct MalwareConfig {
    double n = 0.0;
    double k_vuln = 0.0;
    double h_count = 0.0;
    std::uint64_t k_target = 0;
    ScanStrategy strategy = ScanStrategy::UniformRandom;
    double gamma = 0.0;
    LearningRate rate = LearningRate::stagnating(1.0); // f = 0
    double dropout_theta = 1.0; // attacker quits once f >= 1 - theta; 1 disables
    std::uint64_t max_steps = 10'000'000;
    double max_hours = 0.0; // 0 = unlimited
    double scan_rate_per_hour = 1.0;
    std::uint64_t initial_infected = 1;

    void validate() const;
};

// CodeRed1v2 worm settings: n = 2^32, 350000 vulnerable hosts, 10188 scans
// per hour per node, uniform-random scanning.
MalwareConfig codered1v2_config();

GameOutcome simulate_malware(const MalwareConfig& config, std::uint64_t seed);

/// Target-hiding game against a reallocating defender: the attacker probes
/// for k_vuln hidden targets; each probe is observed with probability
/// gamma + (1-gamma)*h, and once lstar observations accumulate the defender
/// reallocates everything (clearing attacker progress) and the game ends.
struct MTDConfig {
    double n = 0.0;
    double k_vuln = 0.0;
    double h_count = 0.0;
    std::uint64_t k_target = 0;
    ScanStrategy strategy = ScanStrategy::UniformRandom;
    double gamma = 0.0;
    double h = 0.0;
    std::uint64_t lstar = 1;
    std::uint64_t max_steps = 10'000'000;

    void validate() const;
};

GameOutcome simulate_mtd(const MTDConfig& config, std::uint64_t seed);

// Direct sampling of the (progress, level) chain under m1..m4 for tbud
// steps; the attacker wins iff progress reaches k.
GameOutcome simulate_chain(std::uint64_t k, std::uint64_t tbud, const GameParams& params,
                           const LearningRate& rate, std::uint64_t seed);

/// Time axis for aggregated mean traces.
struct TimeGrid {
    bool by_hours = false; // false: grid points are step counts
    std::vector<double> points;
};

struct TrialStats {
    std::uint64_t trials = 0;
    double win_rate = 0.0;
    double std_error = 0.0;
    std::uint64_t attacker_wins = 0;
    std::uint64_t defender_wins = 0;
    std::uint64_t timeouts = 0;
    double mean_steps = 0.0;
    double mean_final_progress = 0.0;
    double mean_final_level = 0.0;
    TimeGrid grid;
    std::vector<double> mean_progress; // per grid point
    std::vector<double> mean_level;
    std::string rng_name;
};

/// Per-trial record for optional CSV dumps.
struct TrialRecord {
    std::uint64_t trial = 0;
    Winner winner = Winner::Timeout;
    std::uint64_t steps = 0;
    std::uint64_t final_progress = 0;
    std::uint64_t final_level = 0;
};

// Runs `trials` independent seeded runs (seed base_seed, trial index mixed
// in) and aggregates. Trials are fanned out over worker threads in fixed
// 1024-trial blocks combined in block order, so the aggregate is identical
// for any worker count. max_threads 0 reads MC_THREADS, falling back to the
// hardware count.
TrialStats monte_carlo(const std::function<GameOutcome(std::uint64_t)>& sim,
                       std::uint64_t trials, std::uint64_t base_seed,
                       const TimeGrid& grid = {}, unsigned max_threads = 0,
                       std::vector<TrialRecord>* records = nullptr);

// Deterministic epidemic baseline dI/dt = beta I (K - I) with
// beta = scan_rate/n per hour, integrated by classic fourth-order
// Runge-Kutta from i0 at t = 0.
std::vector<std::pair<double, double>> epidemic_curve(double n, double k_vuln,
                                                      double scan_rate_per_hour,
                                                      double i0, double hours,
                                                      double step_hours);

// Closed form of the same model, for cross-validation:
// I(t) = K / (1 + (K/I0 - 1) e^{-beta K t}).
double epidemic_logistic(double n, double k_vuln, double scan_rate_per_hour, double i0,
                         double t_hours);

} // namespace mcg

#endif
