#ifndef HALVING_THEORY_HPP
#define HALVING_THEORY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halving/arm.hpp"

namespace halving {

// Non-increasing approximation-error bound gamma(t) for t = 1, 2, ...
// Either a closed form (assumed non-increasing; validated on samples) or an
// empirical suffix-maximum table over a finite horizon.
class Envelope {
public:
    static Envelope closed_form(std::string name, std::function<double(std::uint64_t)> fn);
    static Envelope empirical(std::vector<double> table);  // table[t-1] = gamma(t)

    double value(std::uint64_t t) const;

    // Smallest t with gamma(t) <= alpha; nullopt means "beyond horizon"
    // (no recorded / searched t qualifies). alpha must be > 0.
    std::optional<std::uint64_t> inverse(double alpha) const;

    bool is_empirical() const { return !table_.empty(); }
    std::uint64_t horizon() const { return table_.size(); }
    const std::string& name() const { return name_; }

private:
    Envelope() = default;
    std::string name_;
    std::function<double(std::uint64_t)> fn_;
    std::vector<double> table_;
    // closed forms are searched up to this t before reporting beyond-horizon
    static constexpr std::uint64_t kSearchCap = std::uint64_t{1} << 50;
};

// Pointwise-smallest non-increasing dominator of |l_t - nu| over the
// recorded horizon: the suffix maximum of the deviations.
Envelope envelope_of(const std::vector<double>& losses, double nu);

// Sorted limits nu_1 < nu_2 <= ... <= nu_n.
struct LimitProfile {
    std::vector<double> nus;

    explicit LimitProfile(std::vector<double> sorted_nus);
    std::size_t n() const { return nus.size(); }
    double gap(std::size_t i) const { return nus[i] - nus[0]; }  // i is 0-based rank
};

struct BudgetBound {
    std::uint64_t z = 0;
    std::string form;
};

struct ShBudgetBounds {
    BudgetBound max_form;  // 2*ceil(log2 n) * max_i i*(1 + ginv((nu_i-nu_1)/2))
    BudgetBound sum_form;  // 2*ceil(log2 n) * (n + sum_i ginv((nu_i-nu_1)/2))
};

// Sufficient budgets for successive halving; both representations, with the
// max form never exceeding the sum form. Throws EnvelopeBeyondHorizon when
// the envelope cannot resolve a needed inverse.
struct EnvelopeBeyondHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ShBudgetBounds sh_sufficient_budget(const LimitProfile& profile, const Envelope& gbar);

// Sufficient budget for uniform allocation: n * ginv((nu_2 - nu_1)/2).
BudgetBound uniform_sufficient_budget(const LimitProfile& profile, const Envelope& gbar);

// A named monotonically decreasing function with limit 0.
struct BetaFunction {
    std::string name;
    std::function<double(std::uint64_t)> fn;
};

// Worst-case construction: arm 1 gets nu_1 + beta(t), every other arm i gets
// nu_i - beta(t), so the common envelope equals beta. Uniform allocation
// identifies the best arm iff B >= n * beta^{-1}((nu_2 - nu_1)/2).
std::vector<std::unique_ptr<ArmProcess>> adversarial_instance(const LimitProfile& profile,
                                                              const BetaFunction& beta);

// Suboptimality bounds on the returned arm's limit gap.
double sh_suboptimality_bound(std::uint64_t budget, std::size_t n, const Envelope& gbar);
double uniform_suboptimality_bound(std::uint64_t budget, std::size_t n, const Envelope& gbar);

// SGD convergence envelope family sigma_max * log(n t / delta) / t, clamped
// to its running minimum so it is non-increasing from t = 1.
Envelope sgd_envelope(double sigma_max, std::size_t n, double delta);

}  // namespace halving

#endif
