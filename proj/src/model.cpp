#include "mcg/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mcg {

namespace {

bool is_prob(double x) { return x >= 0.0 && x <= 1.0 && std::isfinite(x); }

[[noreturn]] void bad(const std::string& what) {
    throw std::invalid_argument(what);
}

} // namespace

void GameParams::validate() const {
    if (!is_prob(p) || !is_prob(h) || !is_prob(gamma))
        bad("invalid-params: p, h, gamma must lie in [0,1]");
    if (p + h > 1.0)
        bad("invalid-params: p + h must not exceed 1");
}

LearningRate LearningRate::stagnating(double tau) {
    if (!is_prob(tau)) bad("invalid-rate: stagnating tau must lie in [0,1]");
    LearningRate r;
    r.form_ = Form::Stagnating;
    r.tau_ = tau;
    return r;
}

LearningRate LearningRate::power_law(double d, double a, double offset) {
    if (!(d >= 0.0) || !std::isfinite(d)) bad("invalid-rate: powerlaw d must be >= 0");
    if (!(a > 0.0)) bad("invalid-rate: powerlaw exponent a must be > 0");
    if (!(offset >= 0.0)) bad("invalid-rate: powerlaw offset must be >= 0");
    if (d > 0.0) {
        if (offset == 0.0) bad("invalid-rate: powerlaw offset must be > 0 when d > 0");
        // f is smallest at l = 0; require f(0) >= 0
        if (d > std::pow(offset, a))
            bad("invalid-rate: powerlaw d/(offset^a) exceeds 1, f(0) < 0");
    }
    LearningRate r;
    r.form_ = Form::PowerLaw;
    r.d_ = d;
    r.a_ = a;
    r.off_ = offset;
    return r;
}

LearningRate LearningRate::rational(double scale) {
    if (!(scale > 0.0)) bad("invalid-rate: rational scale must be > 0");
    LearningRate r;
    r.form_ = Form::Rational;
    r.scale_ = scale;
    return r;
}

LearningRate LearningRate::delayed(std::uint64_t lstar, LearningRate inner) {
    if (inner.is_direct_alpha())
        bad("invalid-rate: delayed inner rate must define f, not alpha");
    LearningRate r;
    r.form_ = Form::Delayed;
    r.lstar_ = lstar;
    r.inner_ = std::make_shared<LearningRate>(std::move(inner));
    return r;
}

LearningRate LearningRate::direct_alpha(double a) {
    if (!(a > 0.0)) bad("invalid-rate: alpha exponent must be > 0");
    LearningRate r;
    r.form_ = Form::DirectAlpha;
    r.a_ = a;
    return r;
}

LearningRate LearningRate::table(std::vector<double> values, Tail tail) {
    if (values.empty()) bad("invalid-rate: table needs at least one value");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!is_prob(values[i])) bad("invalid-rate: table entries must lie in [0,1]");
        if (i > 0 && values[i] < values[i - 1])
            bad("invalid-rate: table must be nondecreasing");
    }
    LearningRate r;
    r.form_ = Form::Table;
    r.table_ = std::move(values);
    r.tail_ = tail;
    if (tail == Tail::PowerLawFit) {
        // least-squares fit of log(1-f) vs log(l+1) over the last entries
        // with 1-f > 0; falls back to hold-last when degenerate
        const auto& v = r.table_;
        std::size_t last = v.size();
        std::size_t first = last > 8 ? last - 8 : 0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (std::size_t i = first; i < last; ++i) {
            double omf = 1.0 - v[i];
            if (omf <= 0.0) continue;
            double x = std::log(static_cast<double>(i) + 1.0);
            double y = std::log(omf);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        double det = n * sxx - sx * sx;
        if (n >= 2 && det > 0.0) {
            double slope = (n * sxy - sx * sy) / det;
            double icept = (sy - slope * sx) / n;
            if (slope < 0.0) {
                r.fit_a_ = -slope;
                r.fit_c_ = std::exp(icept);
            } else {
                r.tail_ = Tail::HoldLast;
            }
        } else {
            r.tail_ = Tail::HoldLast;
        }
    }
    return r;
}

double LearningRate::one_minus_f(double l) const {
    if (l < 0.0) bad("invalid-rate: l must be >= 0");
    switch (form_) {
    case Form::Stagnating:
        return tau_;
    case Form::PowerLaw:
        return d_ == 0.0 ? 0.0 : d_ / std::pow(l + off_, a_);
    case Form::Rational:
        return 1.0 / (l / scale_ + 1.0);
    case Form::Delayed:
        if (l < static_cast<double>(lstar_)) return 1.0;
        return inner_->one_minus_f(l - static_cast<double>(lstar_));
    case Form::Table: {
        auto idx = static_cast<std::size_t>(l);
        if (idx < table_.size()) return 1.0 - table_[idx];
        if (tail_ == Tail::HoldLast) return 1.0 - table_.back();
        double omf = fit_c_ * std::pow(l + 1.0, -fit_a_);
        double floor_omf = 0.0;
        return std::min(1.0 - table_.back(), std::max(floor_omf, omf));
    }
    case Form::DirectAlpha:
        throw std::logic_error("learning rate alpha:a=... has no f(l); "
                               "only reduced-chain operations apply");
    }
    throw std::logic_error("unreachable");
}

double LearningRate::alpha_exponent() const {
    if (form_ != Form::DirectAlpha)
        throw std::logic_error("alpha_exponent: not a direct-alpha rate");
    return a_;
}

std::uint64_t LearningRate::lstar() const {
    if (form_ != Form::Delayed) throw std::logic_error("lstar: not a delayed rate");
    return lstar_;
}

const LearningRate& LearningRate::inner() const {
    if (form_ != Form::Delayed) throw std::logic_error("inner: not a delayed rate");
    return *inner_;
}

LearningRate LearningRate::shifted_past_delay() const {
    if (form_ == Form::Delayed) return *inner_;
    return *this;
}

TransitionProbs transitions(const GameParams& params, double f_at_l) {
    params.validate();
    if (!is_prob(f_at_l)) bad("invalid-params: f(l) must lie in [0,1]");
    const double g = params.gamma, p = params.p, h = params.h;
    const double f = f_at_l, omf = 1.0 - f_at_l;
    TransitionProbs m;
    m.m1 = f * (1.0 - g) + omf * (1.0 - g) * (1.0 - p - h);
    m.m2 = omf * (1.0 - g) * p;
    m.m3 = omf * g * p;
    m.m4 = omf * ((1.0 - g) * h + g * (1.0 - p)) + f * g;
    return m;
}

double alpha(const GameParams& params, const LearningRate& rate, std::uint64_t l) {
    const double ld = static_cast<double>(l);
    if (rate.is_direct_alpha())
        return std::pow(ld + 1.0, -rate.alpha_exponent());
    params.validate();
    const double omf = rate.one_minus_f(ld);
    const double den = params.gamma + (1.0 - params.gamma) * (params.p + params.h) * omf;
    if (den == 0.0) return 0.0; // no progress possible in this degenerate corner
    return params.p * omf / den;
}

void validate_for(const GameParams& params, const LearningRate& rate) {
    if (rate.is_direct_alpha()) {
        if (!is_prob(params.gamma))
            bad("invalid-params: gamma must lie in [0,1]");
    } else {
        params.validate();
    }
}

SplitProbs no_selfloop_split(const GameParams& params, const LearningRate& rate,
                             std::uint64_t l) {
    validate_for(params, rate);
    const double g = params.gamma;
    const double a = alpha(params, rate, l);
    return SplitProbs{(1.0 - g) * a, g * a, 1.0 - a};
}

std::vector<double> load_rate_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("invalid-rate: cannot open table file " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (ls >> v) values.push_back(v);
    }
    return values;
}

// ---------------------------------------------------------------- parsing

namespace {

std::vector<std::pair<std::string, std::string>> split_kv(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> out;
    int depth = 0;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        auto eq = cur.find('=');
        if (eq == std::string::npos)
            bad("invalid-rate: expected key=value in '" + cur + "'");
        out.emplace_back(cur.substr(0, eq), cur.substr(eq + 1));
        cur.clear();
    };
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            flush();
            continue;
        }
        cur.push_back(c);
    }
    flush();
    if (depth != 0) bad("invalid-rate: unbalanced parentheses in '" + body + "'");
    return out;
}

double to_num(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        bad("invalid-rate: not a number: '" + s + "'");
    }
}

} // namespace

LearningRate LearningRate::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto kv = split_kv(body);
    auto get = [&](const std::string& key) -> const std::string& {
        for (auto& [k, v] : kv)
            if (k == key) return v;
        bad("invalid-rate: " + name + " needs " + key + "=...");
    };
    auto get_or = [&](const std::string& key, const std::string& dflt) {
        for (auto& [k, v] : kv)
            if (k == key) return v;
        return dflt;
    };

    if (name == "stagnating") return stagnating(to_num(get("tau")));
    if (name == "powerlaw")
        return power_law(to_num(get("d")), to_num(get("a")), to_num(get("offset")));
    if (name == "rational") return rational(to_num(get("scale")));
    if (name == "alpha") return direct_alpha(to_num(get("a")));
    if (name == "delayed") {
        std::string inner = get("inner");
        if (inner.size() >= 2 && inner.front() == '(' && inner.back() == ')')
            inner = inner.substr(1, inner.size() - 2);
        double ls = to_num(get("lstar"));
        if (ls < 0 || ls != std::floor(ls))
            bad("invalid-rate: lstar must be a nonnegative integer");
        return delayed(static_cast<std::uint64_t>(ls), parse(inner));
    }
    if (name == "table") {
        std::string tail = get_or("tail", "hold");
        Tail t;
        if (tail == "hold") t = Tail::HoldLast;
        else if (tail == "fit") t = Tail::PowerLawFit;
        else bad("invalid-rate: table tail must be hold or fit");
        return table(load_rate_table(get("file")), t);
    }
    bad("invalid-rate: unknown learning-rate form '" + name + "'");
}

std::string LearningRate::to_spec() const {
    std::ostringstream os;
    os.precision(17);
    switch (form_) {
    case Form::Stagnating: os << "stagnating:tau=" << tau_; break;
    case Form::PowerLaw: os << "powerlaw:d=" << d_ << ",a=" << a_ << ",offset=" << off_; break;
    case Form::Rational: os << "rational:scale=" << scale_; break;
    case Form::DirectAlpha: os << "alpha:a=" << a_; break;
    case Form::Delayed:
        os << "delayed:lstar=" << lstar_ << ",inner=(" << inner_->to_spec() << ")";
        break;
    case Form::Table:
        os << "table:n=" << table_.size()
           << ",tail=" << (tail_ == Tail::HoldLast ? "hold" : "fit");
        break;
    }
    return os.str();
}

} // namespace mcg
