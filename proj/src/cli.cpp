#include "mcg/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcg/bounds.hpp"
#include "mcg/capacity.hpp"
#include "mcg/containment.hpp"
#include "mcg/dp_engine.hpp"
#include "mcg/exact_oracle.hpp"
#include "mcg/model.hpp"
#include "mcg/rng.hpp"
#include "mcg/simulators.hpp"

namespace mcg::cli {

namespace {

using nlohmann::json;

// shortest digit string that round-trips the exact double
std::string fmt(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

// ----------------------------------------------------------- row emission

/// Long-format table: fixed header, one row per point, emitted as CSV or as
/// a JSON array of objects.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    void emit_csv(std::ostream& os) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            os << (c ? "," : "") << header[c];
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                os << (c ? "," : "") << row[c];
            os << "\n";
        }
    }

    void emit_json(std::ostream& os) const {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t c = 0; c < header.size() && c < row.size(); ++c) {
                // numbers stay numbers in JSON output
                try {
                    std::size_t pos = 0;
                    double v = std::stod(row[c], &pos);
                    if (pos == row[c].size()) {
                        obj[header[c]] = v;
                        continue;
                    }
                } catch (const std::exception&) {
                }
                obj[header[c]] = row[c];
            }
            arr.push_back(obj);
        }
        os << arr.dump(2) << "\n";
    }
};

struct Output {
    std::string path;   // empty = stdout
    std::string format; // csv | json

    std::ostream& stream(std::ofstream& file, std::ostream& fallback) const {
        if (path.empty()) return fallback;
        file.open(path);
        if (!file) throw std::invalid_argument("cannot open output file " + path);
        return file;
    }

    void emit(const Table& t, std::ostream& fallback) const {
        std::ofstream file;
        std::ostream& os = stream(file, fallback);
        if (format == "json")
            t.emit_json(os);
        else
            t.emit_csv(os);
    }

    void emit_scalar(const std::string& name, double v, std::ostream& fallback) const {
        std::ofstream file;
        std::ostream& os = stream(file, fallback);
        if (format == "json") {
            json obj;
            obj[name] = v;
            os << obj.dump(2) << "\n";
        } else {
            os << fmt(v) << "\n";
        }
    }

    void emit_json_text(const std::string& text, std::ostream& fallback) const {
        std::ofstream file;
        std::ostream& os = stream(file, fallback);
        os << text << "\n";
    }
};

// --------------------------------------------------------------- parsing

GameParams parse_params(const std::string& spec) {
    GameParams p;
    if (spec.empty()) return p;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("params must look like p=0.5,h=0,gamma=0.2");
        const std::string key = item.substr(0, eq);
        const double val = std::stod(item.substr(eq + 1));
        if (key == "p") p.p = val;
        else if (key == "h") p.h = val;
        else if (key == "gamma" || key == "g") p.gamma = val;
        else throw std::invalid_argument("unknown game parameter '" + key + "'");
    }
    return p;
}

// "8..14" (step 1), "0.5..1.5:0.1", or a comma list "1,2.5,7"
std::vector<double> parse_num_list(const std::string& spec) {
    std::vector<double> out;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const double lo = std::stod(spec.substr(0, dots));
        std::string rest = spec.substr(dots + 2);
        double step = 1.0;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            step = std::stod(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const double hi = std::stod(rest);
        if (hi < lo) throw std::invalid_argument("range end must be >= start");
        if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
        for (double t = lo; t <= hi + 1e-9 * std::max(1.0, std::abs(hi)); t += step)
            out.push_back(t);
        return out;
    }
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw std::invalid_argument("empty numeric list");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Merge --config JSON (long-option name -> value) into the token stream:
// config-provided options are appended unless the user already passed them.
std::vector<std::string> apply_config(std::vector<std::string> tokens) {
    std::string path;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "--config" && i + 1 < tokens.size()) {
            path = tokens[i + 1];
            tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                         tokens.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (tokens[i].rfind("--config=", 0) == 0) {
            path = tokens[i].substr(9);
            tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return tokens;
    const json cfg = json::parse(read_file(path));
    if (!cfg.is_object())
        throw std::invalid_argument("config file must hold a JSON object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string flag = "--" + it.key();
        bool given = false;
        for (const auto& t : tokens)
            if (t == flag || t.rfind(flag + "=", 0) == 0) given = true;
        if (given) continue;
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) tokens.push_back(flag);
        } else if (it.value().is_string()) {
            tokens.push_back(flag + "=" + it.value().get<std::string>());
        } else {
            tokens.push_back(flag + "=" + it.value().dump());
        }
    }
    return tokens;
}

unsigned worker_count() {
    if (const char* env = std::getenv("MC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// ------------------------------------------------------------ subcommands

struct CommonOpts {
    std::string params_spec;
    std::string rate_spec;
    std::string preset;
    Output out;

    GameParams params() const {
        GameParams p = parse_params(params_spec);
        if (preset == "codered1v2" && params_spec.find("p=") == std::string::npos)
            p.p = 8.15e-5;
        return p;
    }
    LearningRate rate() const {
        if (rate_spec.empty()) throw std::invalid_argument("--rate is required here");
        return LearningRate::parse(rate_spec);
    }
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_rate = true) {
    cmd->add_option("--params", c.params_spec, "game parameters, e.g. p=0.5,h=0,gamma=0.2");
    if (with_rate)
        cmd->add_option("--rate", c.rate_spec,
                        "learning-rate spec, e.g. powerlaw:d=1,a=2,offset=2");
    cmd->add_option("--preset", c.preset, "parameter preset (codered1v2)")
        ->check(CLI::IsMember({"codered1v2"}));
    cmd->add_option("--out", c.out.path, "write output to a file instead of stdout");
    cmd->add_option("--format", c.out.format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

int cmd_oracle_check(std::uint64_t seed, std::ostream& out);

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"attacker containment analysis for level-indexed Markov games"};
    app.require_subcommand(1);

    // ------------------------------------------------------------- wbar
    auto* c_wbar = app.add_subcommand("wbar", "winning-probability proxy of the "
                                              "self-loop-free chain");
    CommonOpts wbar_o;
    std::uint64_t wbar_k = 1, wbar_tbud = 1, wbar_kmax = 0;
    c_wbar->add_option("--k", wbar_k, "attack objective");
    c_wbar->add_option("--tbud", wbar_tbud, "logical time budget")->required();
    c_wbar->add_option("--k-max", wbar_kmax, "emit the whole curve k = 1..k-max");
    add_common(c_wbar, wbar_o);

    // --------------------------------------------------------------- kc
    auto* c_kc = app.add_subcommand("kc", "containment objective: least k with "
                                          "wbar <= target");
    CommonOpts kc_o;
    std::uint64_t kc_tbud = 1, kc_ceiling = 0;
    double kc_target = 0.5;
    c_kc->add_option("--tbud", kc_tbud)->required();
    c_kc->add_option("--target", kc_target, "crossing target (default 0.5)");
    c_kc->add_option("--k-ceiling", kc_ceiling, "search ceiling (0 = default)");
    add_common(c_kc, kc_o);

    // ------------------------------------------------------------ kcurve
    auto* c_kcurve = app.add_subcommand("kcurve", "fractional objective k(t) where "
                                                  "wbar(k, 2^t) crosses the target");
    CommonOpts kcurve_o;
    std::string kcurve_t = "8..14";
    double kcurve_target = 0.5, kcurve_extrap_to = -1.0, kcurve_scan = 10188.0;
    bool kcurve_month = false;
    c_kcurve->add_option("--t", kcurve_t, "log2 budgets, range 8..14 or list");
    c_kcurve->add_option("--target", kcurve_target)->required();
    c_kcurve->add_option("--extrapolate-to", kcurve_extrap_to,
                         "extend the curve linearly to this t");
    c_kcurve->add_flag("--extrapolate-to-month", kcurve_month,
                       "solve k for a 31-day window of parallel moves");
    c_kcurve->add_option("--scan-rate", kcurve_scan,
                         "moves per hour per node for --extrapolate-to-month");
    add_common(c_kcurve, kcurve_o);

    // ------------------------------------------------------------- bound
    auto* c_bound = app.add_subcommand("bound", "analytic bounds");
    c_bound->require_subcommand(1);

    auto* b_stag = c_bound->add_subcommand("stagnating", "lower bound for a rate with "
                                                         "1-f >= tau");
    CommonOpts stag_o;
    std::uint64_t stag_k = 1, stag_tbud = 1;
    double stag_tau = 0.0;
    b_stag->add_option("--k", stag_k)->required();
    b_stag->add_option("--tbud", stag_tbud)->required();
    b_stag->add_option("--tau", stag_tau)->required();
    add_common(b_stag, stag_o, false);

    auto* b_sand = c_bound->add_subcommand("sandwich", "bracketing of the exact "
                                                       "probability via wbar");
    CommonOpts sand_o;
    std::uint64_t sand_k = 1, sand_tbud = 1, sand_v = 0;
    double sand_eps = 0.0;
    b_sand->add_option("--k", sand_k)->required();
    b_sand->add_option("--tbud", sand_tbud)->required();
    b_sand->add_option("--v", sand_v, "budget divisor (v >= k)");
    b_sand->add_option("--epsilon", sand_eps, "choose v for a 1-epsilon correction");
    add_common(b_sand, sand_o);

    auto* b_ana = c_bound->add_subcommand("analytic", "tail bound from the "
                                                      "detection-rate envelope d");
    CommonOpts ana_o;
    std::uint64_t ana_k = 1, ana_tbud = 1;
    double ana_d = 0.0, ana_theta = -1.0;
    bool ana_loose = false;
    b_ana->add_option("--k", ana_k)->required();
    b_ana->add_option("--tbud", ana_tbud)->required();
    b_ana->add_option("--d", ana_d, "envelope: 1 - f(l) <= d")->required();
    b_ana->add_option("--theta", ana_theta, "evaluate the general form at this theta");
    b_ana->add_flag("--loose", ana_loose, "complementary regime c >= k(1-gamma)/gamma");
    add_common(b_ana, ana_o);

    auto* b_del = c_bound->add_subcommand("delayed", "bounds for rates that stay 0 "
                                                     "below lstar");
    CommonOpts del_o;
    std::uint64_t del_k = 0, del_kstar = 0, del_lstar = 1, del_tbud = 0;
    bool del_simplified = false;
    b_del->add_option("--kstar", del_kstar)->required();
    b_del->add_option("--lstar", del_lstar)->required();
    b_del->add_option("--k", del_k, "full objective: also emit the w upper bound");
    b_del->add_option("--tbud", del_tbud);
    b_del->add_flag("--simplified", del_simplified, "use the (1-gamma)(1-h) ratio");
    add_common(b_del, del_o);

    // ---------------------------------------------------------- capacity
    auto* c_cap = app.add_subcommand("capacity", "capacity-region algebra");
    c_cap->require_subcommand(1);

    auto* cap_region = c_cap->add_subcommand("region", "emit a region as JSON");
    CommonOpts capr_o;
    double capr_d = 0.0;
    std::uint64_t capr_lstar = 0;
    cap_region->add_option("--d", capr_d, "power-law envelope d")->required();
    cap_region->add_option("--lstar", capr_lstar,
                           "derive the delayed-learning region for this lstar");
    add_common(cap_region, capr_o, false);

    auto* cap_s = c_cap->add_subcommand("s", "largest certified s at (k, t)");
    CommonOpts caps_o;
    std::string caps_region;
    double caps_k = 0.0, caps_t = 0.0;
    cap_s->add_option("--region", caps_region, "region JSON file")->required();
    cap_s->add_option("--k", caps_k)->required();
    cap_s->add_option("--t", caps_t)->required();
    add_common(cap_s, caps_o, false);

    auto* cap_k = c_cap->add_subcommand("k", "least certified k at (s, t)");
    CommonOpts capk_o;
    std::string capk_region;
    double capk_s = 0.0, capk_t = 0.0;
    cap_k->add_option("--region", capk_region)->required();
    cap_k->add_option("--s", capk_s)->required();
    cap_k->add_option("--t", capk_t)->required();
    add_common(cap_k, capk_o, false);

    auto* cap_comp = c_cap->add_subcommand("compose", "simultaneous games");
    CommonOpts capc_o;
    std::vector<std::string> capc_regions;
    std::uint64_t capc_copies = 0;
    double capc_s = 0.0, capc_t = 0.0;
    cap_comp->add_option("--region", capc_regions, "region JSON file (repeatable)")
        ->required();
    cap_comp->add_option("--copies", capc_copies,
                         "replicate a single region this many times");
    cap_comp->add_option("--s", capc_s)->required();
    cap_comp->add_option("--t", capc_t)->required();
    add_common(cap_comp, capc_o, false);

    auto* cap_conv = c_cap->add_subcommand("convert", "real-time and cost budgets");
    CommonOpts capv_o;
    double capv_T = 0.0, capv_k = 0.0, capv_delta = 0.0, capv_cost = -1.0;
    cap_conv->add_option("--t-seconds", capv_T)->required();
    cap_conv->add_option("--k", capv_k)->required();
    cap_conv->add_option("--delta-seconds", capv_delta)->required();
    cap_conv->add_option("--cost-per-move", capv_cost);
    add_common(cap_conv, capv_o, false);

    // ---------------------------------------------------------- simulate
    auto* c_sim = app.add_subcommand("simulate", "seeded Monte Carlo game simulators");
    c_sim->require_subcommand(1);

    struct SimCommon {
        std::uint64_t trials = 1;
        std::uint64_t seed = 0;
        std::string dump_path;
        std::string grid_hours, grid_steps;
    };

    auto add_sim_common = [](CLI::App* cmd, SimCommon& s) {
        cmd->add_option("--trials", s.trials);
        cmd->add_option("--seed", s.seed, "base seed (default 0)");
        cmd->add_option("--dump", s.dump_path, "per-trial CSV dump path");
        cmd->add_option("--grid-hours", s.grid_hours, "mean-trace sample hours, list/range");
        cmd->add_option("--grid-steps", s.grid_steps, "mean-trace sample steps, list/range");
    };

    auto* sim_mal = c_sim->add_subcommand("malware", "worm-propagation game");
    CommonOpts simm_o;
    SimCommon simm_c;
    MalwareConfig mal_cfg;
    std::string mal_strategy = "uniform";
    double mal_n = 0.0, mal_kv = 0.0, mal_hc = 0.0;
    sim_mal->add_option("--n", mal_n, "address-space size");
    sim_mal->add_option("--k-vuln", mal_kv, "vulnerable hosts");
    sim_mal->add_option("--h-count", mal_hc, "honeypots");
    sim_mal->add_option("--k-target", mal_cfg.k_target, "attack objective");
    sim_mal->add_option("--strategy", mal_strategy)->check(CLI::IsMember({"uniform", "hitlist"}));
    sim_mal->add_option("--theta", mal_cfg.dropout_theta, "drop-out tolerance (1 disables)");
    auto* mal_max_steps_opt = sim_mal->add_option("--max-steps", mal_cfg.max_steps);
    sim_mal->add_option("--max-hours", mal_cfg.max_hours);
    sim_mal->add_option("--scan-rate", mal_cfg.scan_rate_per_hour, "probes/hour/node");
    sim_mal->add_option("--initial", mal_cfg.initial_infected, "initially infected");
    add_sim_common(sim_mal, simm_c);
    add_common(sim_mal, simm_o);

    auto* sim_mtd = c_sim->add_subcommand("mtd", "target-hiding game with reallocation");
    CommonOpts simt_o;
    SimCommon simt_c;
    MTDConfig mtd_cfg;
    std::string mtd_strategy = "uniform";
    sim_mtd->add_option("--n", mtd_cfg.n)->required();
    sim_mtd->add_option("--k-vuln", mtd_cfg.k_vuln)->required();
    sim_mtd->add_option("--h-count", mtd_cfg.h_count);
    sim_mtd->add_option("--k-target", mtd_cfg.k_target)->required();
    sim_mtd->add_option("--lstar", mtd_cfg.lstar)->required();
    sim_mtd->add_option("--strategy", mtd_strategy)->check(CLI::IsMember({"uniform", "hitlist"}));
    sim_mtd->add_option("--max-steps", mtd_cfg.max_steps);
    add_sim_common(sim_mtd, simt_c);
    add_common(sim_mtd, simt_o, false);

    auto* sim_chain = c_sim->add_subcommand("chain", "direct sampling of the game chain");
    CommonOpts simc_o;
    SimCommon simc_c;
    std::uint64_t chain_k = 1, chain_tbud = 1;
    sim_chain->add_option("--k", chain_k)->required();
    sim_chain->add_option("--tbud", chain_tbud)->required();
    add_sim_common(sim_chain, simc_c);
    add_common(sim_chain, simc_o);

    // ---------------------------------------------------------- epidemic
    auto* c_epi = app.add_subcommand("epidemic", "deterministic worm baseline");
    CommonOpts epi_o;
    double epi_n = 4294967296.0, epi_k = 350000.0, epi_scan = 10188.0, epi_i0 = 1.0;
    double epi_hours = 30.0, epi_step = 0.01;
    c_epi->add_option("--n", epi_n);
    c_epi->add_option("--k-vuln", epi_k);
    c_epi->add_option("--scan-rate", epi_scan);
    c_epi->add_option("--i0", epi_i0);
    c_epi->add_option("--hours", epi_hours);
    c_epi->add_option("--step-hours", epi_step);
    add_common(c_epi, epi_o, false);

    // ------------------------------------------------------------- sweep
    auto* c_sweep = app.add_subcommand("sweep", "wbar over gamma x exponent grids");
    CommonOpts sweep_o;
    std::string sweep_gammas = "0.1,0.3,0.5,0.7,0.9";
    std::string sweep_exps = "0.5,0.6,0.7,0.8,0.9,1.0";
    std::uint64_t sweep_kmax = 50, sweep_tbud = 10000;
    c_sweep->add_option("--gammas", sweep_gammas, "classifier accuracies, list");
    c_sweep->add_option("--exponents", sweep_exps, "alpha(l) = (l+1)^-a exponents, list");
    c_sweep->add_option("--k-max", sweep_kmax);
    c_sweep->add_option("--tbud", sweep_tbud);
    add_common(c_sweep, sweep_o, false);

    // ------------------------------------------------------------ oracle
    auto* c_oracle = app.add_subcommand("oracle", "cross-validation of the exact "
                                                  "oracles and the DP");
    c_oracle->require_subcommand(1);
    auto* oracle_check = c_oracle->add_subcommand("check", "run the full grid");
    std::uint64_t oracle_seed = 0;
    oracle_check->add_option("--seed", oracle_seed);

    // -------------------------------------------------------------- parse
    std::vector<std::string> tokens;
    try {
        tokens = apply_config(args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        // CLI11 wants argv in reverse order for the vector overload
        std::vector<std::string> rev(tokens.rbegin(), tokens.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*c_wbar) {
            const GameParams p = wbar_o.params();
            const LearningRate r = wbar_o.rate();
            if (wbar_kmax >= 1) {
                const auto curve = wbar_curve(wbar_kmax, wbar_tbud, p, r);
                Table t;
                t.header = {"k", "wbar"};
                for (std::uint64_t k = 1; k <= wbar_kmax; ++k)
                    t.add({std::to_string(k), fmt(curve[k - 1])});
                wbar_o.out.emit(t, out);
            } else {
                wbar_o.out.emit_scalar("wbar", wbar(wbar_k, wbar_tbud, p, r), out);
            }
        } else if (*c_kc) {
            const KcResult r = k_c(kc_tbud, kc_o.params(), kc_o.rate(), kc_target,
                                   kc_ceiling);
            Table t;
            t.header = {"k", "k_frac", "already_below_target"};
            t.add({std::to_string(r.k), fmt(r.k_frac), r.already_below ? "1" : "0"});
            kc_o.out.emit(t, out);
        } else if (*c_kcurve) {
            const GameParams p = kcurve_o.params();
            const LearningRate r = kcurve_o.rate();
            const auto ts = parse_num_list(kcurve_t);
            const auto curve = k_curve(ts, p, r, kcurve_target);
            Table t;
            t.header = {"t", "k_frac", "diff"};
            for (std::size_t i = 0; i < curve.size(); ++i) {
                const std::string diff =
                    i + 1 < curve.size() ? fmt(curve[i + 1].k_frac - curve[i].k_frac) : "";
                t.add({fmt(curve[i].t), fmt(curve[i].k_frac), diff});
            }
            if (kcurve_extrap_to >= 0.0)
                t.add({fmt(kcurve_extrap_to), fmt(extrapolate_k(curve, kcurve_extrap_to)),
                       ""});
            if (kcurve_month) {
                const double moves = 31.0 * 24.0 * kcurve_scan;
                const double k = extrapolate_k_realtime(curve, moves);
                t.add({fmt(std::log2(moves * k)), fmt(k), ""});
            }
            kcurve_o.out.emit(t, out);
        } else if (*b_stag) {
            const GameParams p = stag_o.params();
            const BoundValue b = stagnating_lb(stag_k, stag_tbud, stag_tau, p.p);
            Table t;
            t.header = {"bound", "raw"};
            t.add({fmt(b.value), fmt(b.raw)});
            stag_o.out.emit(t, out);
        } else if (*b_sand) {
            const GameParams p = sand_o.params();
            const LearningRate r = sand_o.rate();
            std::uint64_t v = sand_v;
            if (v == 0) {
                if (!(sand_eps > 0.0))
                    throw std::invalid_argument("give either --v or --epsilon");
                v = v_for_epsilon(sand_k, sand_tbud, sand_eps, p.gamma);
            }
            const SandwichResult s = sandwich(sand_k, sand_tbud, p, r, v);
            Table t;
            t.header = {"lower", "upper", "v", "raw_lower_factor"};
            t.add({fmt(s.lower), fmt(s.upper), std::to_string(s.v_used),
                   fmt(s.raw_lower_factor)});
            sand_o.out.emit(t, out);
        } else if (*b_ana) {
            const GameParams p = ana_o.params();
            const LearningRate r = ana_o.rate();
            Table t;
            t.header = {"bound", "raw", "c", "form"};
            if (ana_theta >= 0.0) {
                const BoundValue b = analytic_ub_general(ana_k, ana_tbud, p, r, ana_d,
                                                         ana_theta);
                t.add({fmt(b.value), fmt(b.raw), "", "general"});
            } else if (ana_loose) {
                const double c = c_constant(r, ana_d, ana_tbud);
                const BoundValue b = analytic_ub_loose(ana_k, ana_tbud, p, r, ana_d);
                t.add({fmt(b.value), fmt(b.raw), fmt(c), "loose"});
            } else {
                const double c = c_constant(r, ana_d, ana_tbud);
                const BoundValue b = analytic_ub_optimized(ana_k, ana_tbud, p, r, ana_d);
                t.add({fmt(b.value), fmt(b.raw), fmt(c), "optimized"});
            }
            ana_o.out.emit(t, out);
        } else if (*b_del) {
            const GameParams p = del_o.params();
            const BoundValue u = del_simplified
                                     ? delayed_u_lb_simplified(del_kstar, del_lstar, p)
                                     : delayed_u_lb(del_kstar, del_lstar, p);
            Table t;
            if (del_k > 0) {
                if (del_tbud < 1)
                    throw std::invalid_argument("--k also needs --tbud and --rate");
                const BoundValue w = delayed_w_ub(del_k, del_kstar, del_lstar, del_tbud,
                                                  p, del_o.rate().shifted_past_delay());
                t.header = {"u_lower", "w_upper", "w_raw"};
                t.add({fmt(u.value), fmt(w.value), fmt(w.raw)});
            } else {
                t.header = {"u_lower", "u_raw"};
                t.add({fmt(u.value), fmt(u.raw)});
            }
            del_o.out.emit(t, out);
        } else if (*cap_region) {
            const GameParams p = capr_o.params();
            const CapacityRegion base = region_powerlaw(p.gamma, p.p, capr_d);
            if (capr_lstar > 0) {
                const DelayedRegion d = region_delayed(base, capr_lstar, p);
                capr_o.out.emit_json_text(d.to_json(), out);
            } else {
                capr_o.out.emit_json_text(base.to_json(), out);
            }
        } else if (*cap_s) {
            const CapacityRegion r = CapacityRegion::from_json(read_file(caps_region));
            const SBound s = s_of(r, caps_k, caps_t);
            Table t;
            t.header = {"s", "unbounded"};
            t.add({s.unbounded ? "inf" : fmt(s.value), s.unbounded ? "1" : "0"});
            caps_o.out.emit(t, out);
        } else if (*cap_k) {
            const std::string text = read_file(capk_region);
            double k;
            if (json::parse(text).contains("high_s"))
                k = k_of(DelayedRegion::from_json(text), capk_s, capk_t);
            else
                k = k_of(CapacityRegion::from_json(text), capk_s, capk_t);
            capk_o.out.emit_scalar("k", k, out);
        } else if (*cap_comp) {
            std::vector<CapacityRegion> rs;
            for (const auto& path : capc_regions)
                rs.push_back(CapacityRegion::from_json(read_file(path)));
            if (capc_copies > 0) {
                if (rs.size() != 1)
                    throw std::invalid_argument("--copies needs exactly one --region");
                rs.assign(capc_copies, rs[0]);
            }
            const ComposeResult c = compose(rs, capc_s, capc_t);
            Table t;
            t.header = {"k_total", "prob_bound", "games"};
            t.add({fmt(c.k_total), fmt(c.prob_bound), std::to_string(rs.size())});
            capc_o.out.emit(t, out);
        } else if (*cap_conv) {
            const std::uint64_t tb = tbud_from_realtime(capv_T, capv_k, capv_delta);
            Table t;
            if (capv_cost >= 0.0) {
                t.header = {"tbud", "cost"};
                t.add({std::to_string(tb), fmt(cost_of_budget(tb, capv_cost))});
            } else {
                t.header = {"tbud"};
                t.add({std::to_string(tb)});
            }
            capv_o.out.emit(t, out);
        } else if (*sim_mal || *sim_mtd || *sim_chain) {
            SimCommon* sc = *sim_mal ? &simm_c : (*sim_mtd ? &simt_c : &simc_c);
            CommonOpts* co = *sim_mal ? &simm_o : (*sim_mtd ? &simt_o : &simc_o);
            TimeGrid grid;
            if (!sc->grid_hours.empty()) {
                grid.by_hours = true;
                grid.points = parse_num_list(sc->grid_hours);
            } else if (!sc->grid_steps.empty()) {
                grid.by_hours = false;
                grid.points = parse_num_list(sc->grid_steps);
            }

            std::function<GameOutcome(std::uint64_t)> sim;
            if (*sim_mal) {
                MalwareConfig cfg = mal_cfg;
                if (simm_o.preset == "codered1v2") {
                    const MalwareConfig cr = codered1v2_config();
                    cfg.n = cr.n;
                    cfg.k_vuln = cr.k_vuln;
                    cfg.scan_rate_per_hour = cr.scan_rate_per_hour;
                    // internet-scale runs blow through the general default
                    if (mal_max_steps_opt->count() == 0) cfg.max_steps = cr.max_steps;
                    if (cfg.k_target == 0) cfg.k_target = cr.k_target;
                }
                if (mal_n > 0.0) cfg.n = mal_n;
                if (mal_kv > 0.0) cfg.k_vuln = mal_kv;
                cfg.h_count = mal_hc;
                cfg.strategy = mal_strategy == "hitlist" ? ScanStrategy::Hitlist
                                                         : ScanStrategy::UniformRandom;
                cfg.gamma = simm_o.params().gamma;
                if (!simm_o.rate_spec.empty()) cfg.rate = simm_o.rate();
                if (cfg.k_target == 0)
                    cfg.k_target = static_cast<std::uint64_t>(cfg.k_vuln);
                sim = [cfg](std::uint64_t s) { return simulate_malware(cfg, s); };
            } else if (*sim_mtd) {
                MTDConfig cfg = mtd_cfg;
                cfg.strategy = mtd_strategy == "hitlist" ? ScanStrategy::Hitlist
                                                         : ScanStrategy::UniformRandom;
                const GameParams p = simt_o.params();
                cfg.gamma = p.gamma;
                cfg.h = p.h;
                sim = [cfg](std::uint64_t s) { return simulate_mtd(cfg, s); };
            } else {
                const GameParams p = simc_o.params();
                const LearningRate r = simc_o.rate();
                const std::uint64_t k = chain_k, tb = chain_tbud;
                sim = [k, tb, p, r](std::uint64_t s) {
                    return simulate_chain(k, tb, p, r, s);
                };
            }

            std::vector<TrialRecord> records;
            TrialStats st = monte_carlo(sim, sc->trials, sc->seed, grid, 0,
                                        sc->dump_path.empty() ? nullptr : &records);
            if (!sc->dump_path.empty()) {
                std::ofstream dump(sc->dump_path);
                if (!dump)
                    throw std::invalid_argument("cannot open " + sc->dump_path);
                dump << "trial,winner,steps,final_i,final_l\n";
                for (const auto& rec : records)
                    dump << rec.trial << "," << to_string(rec.winner) << "," << rec.steps
                         << "," << rec.final_progress << "," << rec.final_level << "\n";
            }

            if (co->out.format == "json") {
                json j;
                j["trials"] = st.trials;
                j["seed"] = sc->seed;
                j["rng"] = st.rng_name;
                j["attacker_win_rate"] = st.win_rate;
                j["std_error"] = st.std_error;
                j["attacker_wins"] = st.attacker_wins;
                j["defender_wins"] = st.defender_wins;
                j["timeouts"] = st.timeouts;
                j["mean_steps"] = st.mean_steps;
                j["mean_final_progress"] = st.mean_final_progress;
                j["mean_final_level"] = st.mean_final_level;
                if (!grid.points.empty()) {
                    j["grid_axis"] = grid.by_hours ? "hours" : "steps";
                    j["grid"] = grid.points;
                    j["mean_progress"] = st.mean_progress;
                    j["mean_level"] = st.mean_level;
                }
                co->out.emit_json_text(j.dump(2), out);
            } else {
                Table t;
                t.header = {"metric", "value"};
                t.add({"trials", std::to_string(st.trials)});
                t.add({"seed", std::to_string(sc->seed)});
                t.add({"rng", st.rng_name});
                t.add({"attacker_win_rate", fmt(st.win_rate)});
                t.add({"std_error", fmt(st.std_error)});
                t.add({"attacker_wins", std::to_string(st.attacker_wins)});
                t.add({"defender_wins", std::to_string(st.defender_wins)});
                t.add({"timeouts", std::to_string(st.timeouts)});
                t.add({"mean_steps", fmt(st.mean_steps)});
                t.add({"mean_final_progress", fmt(st.mean_final_progress)});
                t.add({"mean_final_level", fmt(st.mean_final_level)});
                for (std::size_t i = 0; i < grid.points.size(); ++i) {
                    const std::string axis = grid.by_hours ? "hour" : "step";
                    t.add({"mean_progress@" + axis + "=" + fmt(grid.points[i]),
                           fmt(st.mean_progress[i])});
                    t.add({"mean_level@" + axis + "=" + fmt(grid.points[i]),
                           fmt(st.mean_level[i])});
                }
                co->out.emit(t, out);
            }
        } else if (*c_epi) {
            const auto curve = epidemic_curve(epi_n, epi_k, epi_scan, epi_i0, epi_hours,
                                              epi_step);
            Table t;
            t.header = {"hour", "infected"};
            for (const auto& [h, i] : curve) t.add({fmt(h), fmt(i)});
            epi_o.out.emit(t, out);
        } else if (*c_sweep) {
            auto gammas = parse_num_list(sweep_gammas);
            auto exps = parse_num_list(sweep_exps);
            std::sort(gammas.begin(), gammas.end());
            std::sort(exps.begin(), exps.end());
            struct Cell {
                double gamma, a;
                std::vector<double> curve;
            };
            std::vector<Cell> cells;
            for (double g : gammas)
                for (double a : exps) cells.push_back({g, a, {}});
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    GameParams p;
                    p.gamma = cells[i].gamma;
                    cells[i].curve = wbar_curve(sweep_kmax, sweep_tbud, p,
                                                LearningRate::direct_alpha(cells[i].a));
                }
            };
            const unsigned n = std::min<std::size_t>(worker_count(), cells.size());
            std::vector<std::thread> pool;
            for (unsigned i = 1; i < n; ++i) pool.emplace_back(work);
            work();
            for (auto& th : pool) th.join();
            Table t;
            t.header = {"gamma", "a", "k", "wbar"};
            for (const auto& c : cells) // cells were generated in sorted order
                for (std::uint64_t k = 1; k <= sweep_kmax; ++k)
                    t.add({fmt(c.gamma), fmt(c.a), std::to_string(k),
                           fmt(c.curve[k - 1])});
            sweep_o.out.emit(t, out);
        } else if (*oracle_check) {
            return cmd_oracle_check(oracle_seed, out);
        }
        return 0;
    } catch (const RegimeError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace {

LearningRate random_rate(Xoshiro256pp& rng) {
    const double u = rng.uniform();
    if (u < 0.2) return LearningRate::stagnating(0.05 + 0.95 * rng.uniform());
    if (u < 0.45) {
        const double a = 0.5 + 2.5 * rng.uniform();
        const double off = 1.0 + 2.0 * rng.uniform();
        const double d = 0.99 * rng.uniform() * std::pow(off, a);
        return LearningRate::power_law(d, a, off);
    }
    if (u < 0.65) return LearningRate::rational(1.0 + 99.0 * rng.uniform());
    if (u < 0.85) {
        const double a = 0.5 + 2.0 * rng.uniform();
        const double off = 1.5 + 1.5 * rng.uniform();
        const double d = 0.9 * std::pow(off, a) * rng.uniform();
        return LearningRate::delayed(rng.next_u64() % 4,
                                     LearningRate::power_law(d, a, off));
    }
    std::vector<double> vals;
    double v = 0.3 * rng.uniform();
    for (int i = 0; i < 6; ++i) {
        vals.push_back(v);
        v = std::min(1.0, v + 0.25 * rng.uniform());
    }
    return LearningRate::table(std::move(vals));
}

GameParams random_params(Xoshiro256pp& rng) {
    GameParams p;
    p.p = 0.05 + 0.9 * rng.uniform();
    p.h = (1.0 - p.p) * rng.uniform();
    p.gamma = 0.02 + 0.96 * rng.uniform();
    return p;
}

int cmd_oracle_check(std::uint64_t seed, std::ostream& out) {
    Xoshiro256pp rng(trial_seed(seed, 0x6f7263));
    double max_cf = 0.0, max_nsl = 0.0, max_stag = 0.0, max_order = 0.0;
    for (int draw = 0; draw < 25; ++draw) {
        const GameParams p = random_params(rng);
        const LearningRate r = random_rate(rng);
        const double tau = 0.05 + 0.95 * rng.uniform();
        for (std::uint64_t k = 1; k <= 3; ++k) {
            for (std::uint64_t tbud = 1; tbud <= 8; ++tbud) {
                const double fw = forward_w(k, tbud, p, r);
                const double cf = closed_form_w(k, tbud, p, r);
                const double nsl = no_selfloop_enumeration(k, tbud, p, r);
                const double dp = wbar(k, tbud, p, r);
                const double st_fw =
                    forward_w(k, tbud, p, LearningRate::stagnating(tau));
                const double st_cf = stagnating_exact_w(k, tbud, tau, p.p);
                max_cf = std::max(max_cf, std::abs(fw - cf));
                max_nsl = std::max(max_nsl, std::abs(nsl - dp));
                max_stag = std::max(max_stag, std::abs(st_fw - st_cf));
                max_order = std::max(max_order, fw - dp);
            }
        }
    }
    out << "closed-form vs forward        max |dev| = " << fmt(max_cf) << "\n";
    out << "path enumeration vs DP        max |dev| = " << fmt(max_nsl) << "\n";
    out << "stagnating vs negative-binom  max |dev| = " << fmt(max_stag) << "\n";
    out << "exact minus DP upper bound    max excess = " << fmt(max_order) << "\n";
    const bool ok = max_cf < 1e-10 && max_nsl < 1e-10 && max_stag < 1e-10 &&
                    max_order < 1e-12;
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

} // namespace

} // namespace mcg::cli
