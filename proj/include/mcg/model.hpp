#ifndef MCG_MODEL_HPP
#define MCG_MODEL_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcg {

// Error for inputs outside the regime a numeric expression is valid in
// (as opposed to plain argument validation, which throws
// std::invalid_argument). The message starts with a stable error name,
// e.g. "regime-not-covered: ...".
class RegimeError : public std::runtime_error {
public:
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Static parameters of one attacker/defender game.
///   p     - per-move success probability of the attacker
///   h     - probability a move leaks information on the host level
///   gamma - accuracy of the defender's network-level flow classifier
struct GameParams {
    double p = 0.0;
    double h = 0.0;
    double gamma = 0.0;

    // Throws std::invalid_argument ("invalid-params: ...") unless all three
    // are probabilities and p + h <= 1 (needed so the self-loop mass is
    // nonnegative).
    void validate() const;
};

/// Defender detection-rate function f(l): the probability that, having
/// collected l attack samples, the defender halts the next adversarial move.
/// All closed forms are nondecreasing in l; tabulated rates are checked for
/// monotonicity at construction. The DirectAlpha form skips f entirely and
/// prescribes the progress probability alpha(l) = (l+1)^{-a} of the reduced
/// chain.
class LearningRate {
public:
    enum class Form { Stagnating, PowerLaw, Rational, Delayed, DirectAlpha, Table };
    enum class Tail { HoldLast, PowerLawFit };

    static LearningRate stagnating(double tau);
    static LearningRate power_law(double d, double a, double offset);
    static LearningRate rational(double scale);
    static LearningRate delayed(std::uint64_t lstar, LearningRate inner);
    static LearningRate direct_alpha(double a);
    static LearningRate table(std::vector<double> values, Tail tail = Tail::HoldLast);

    Form form() const { return form_; }
    bool is_direct_alpha() const { return form_ == Form::DirectAlpha; }

    // 1 - f(l) on the continuous extension of l >= 0. This is the primitive
    // (rather than f itself) so that survival masses like tau stay exact.
    // Throws std::logic_error for DirectAlpha, which has no f.
    double one_minus_f(double l) const;
    double f(double l) const { return 1.0 - one_minus_f(l); }

    // DirectAlpha only
    double alpha_exponent() const;

    // Delayed only
    std::uint64_t lstar() const;
    const LearningRate& inner() const;

    // Detection rate seen after the delay has been consumed: f(l + L*) as a
    // function of l. Identity for non-delayed rates.
    LearningRate shifted_past_delay() const;

    // Text form, grammar:
    //   stagnating:tau=0.2
    //   powerlaw:d=1,a=2,offset=2
    //   rational:scale=1000
    //   delayed:lstar=100,inner=(powerlaw:d=1,a=2,offset=2)
    //   alpha:a=0.9
    //   table:file=PATH,tail=hold|fit
    static LearningRate parse(const std::string& spec);
    std::string to_spec() const;

private:
    LearningRate() = default;

    Form form_ = Form::Stagnating;
    double tau_ = 0.0;                       // Stagnating: 1 - f
    double d_ = 0.0, a_ = 0.0, off_ = 0.0;   // PowerLaw / DirectAlpha (a_)
    double scale_ = 0.0;                     // Rational
    std::uint64_t lstar_ = 0;                // Delayed
    std::shared_ptr<const LearningRate> inner_;
    std::vector<double> table_;              // Table
    Tail tail_ = Tail::HoldLast;
    double fit_c_ = 0.0, fit_a_ = 0.0;       // Table tail power-law fit of 1-f
};

/// One-step transition masses of the game chain at a state with detection
/// rate f: self-loop (m1), progress unobserved (m2), progress observed
/// (m3), no progress but observed (m4).
struct TransitionProbs {
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    double sum() const { return m1 + m2 + m3 + m4; }
};

// m1 = f(1-g) + (1-f)(1-g)(1-p-h)
// m2 = (1-f)(1-g)p
// m3 = (1-f)gp
// m4 = (1-f)[(1-g)h + g(1-p)] + fg
TransitionProbs transitions(const GameParams& params, double f_at_l);

// Progress probability of the self-loop-free chain,
//   alpha(l) = p(1-f(l)) / (g + (1-g)(p+h)(1-f(l))),
// or (l+1)^{-a} for DirectAlpha rates. When the denominator vanishes
// (g = 0 and (p+h)(1-f) = 0) no progress is possible and alpha is 0.
double alpha(const GameParams& params, const LearningRate& rate, std::uint64_t l);

/// Conditional step distribution of the chain given "no self-loop":
/// ((1-g)alpha, g*alpha, 1-alpha).
struct SplitProbs {
    double horizontal = 0.0;
    double diagonal = 0.0;
    double vertical = 0.0;
};

SplitProbs no_selfloop_split(const GameParams& params, const LearningRate& rate,
                             std::uint64_t l);

// Full validation for f-based rates; DirectAlpha rates only use gamma, so
// only that field is range-checked.
void validate_for(const GameParams& params, const LearningRate& rate);

// Reads one probability per line (index l starting at 0); '#' comments and
// blank lines are skipped.
std::vector<double> load_rate_table(const std::string& path);

} // namespace mcg

#endif
