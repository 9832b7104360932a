#include "halving/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "halving/strategies.hpp"

namespace halving {
namespace {

std::vector<std::uint64_t> sample_points() {
    std::vector<std::uint64_t> pts;
    for (std::uint64_t t = 1; t <= 16; ++t) pts.push_back(t);
    for (std::uint64_t t = 32; t <= (std::uint64_t{1} << 40); t *= 2) pts.push_back(t);
    return pts;
}

}  // namespace

Envelope Envelope::closed_form(std::string name, std::function<double(std::uint64_t)> fn) {
    Envelope env;
    env.name_ = std::move(name);
    env.fn_ = std::move(fn);
    double prev = std::numeric_limits<double>::infinity();
    for (std::uint64_t t : sample_points()) {
        double v = env.fn_(t);
        if (v < 0.0 || std::isnan(v)) {
            throw std::invalid_argument("envelope '" + env.name_ + "' negative or NaN at t=" +
                                        std::to_string(t));
        }
        if (v > prev + 1e-12 * std::max(1.0, std::fabs(prev))) {
            throw std::invalid_argument("envelope '" + env.name_ + "' increases at t=" +
                                        std::to_string(t));
        }
        prev = std::min(prev, v);
    }
    return env;
}

Envelope Envelope::empirical(std::vector<double> table) {
    if (table.empty()) throw std::invalid_argument("empty envelope table");
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] < 0.0) throw std::invalid_argument("negative envelope value");
        if (i > 0 && table[i] > table[i - 1]) {
            throw std::invalid_argument("empirical envelope not non-increasing");
        }
    }
    Envelope env;
    env.name_ = "empirical";
    env.table_ = std::move(table);
    return env;
}

double Envelope::value(std::uint64_t t) const {
    if (t == 0) throw std::invalid_argument("envelope evaluated at t=0");
    if (!table_.empty()) {
        // past the horizon the last recorded value is the best available bound
        std::size_t idx = std::min<std::uint64_t>(t, table_.size()) - 1;
        return table_[idx];
    }
    return fn_(t);
}

std::optional<std::uint64_t> Envelope::inverse(double alpha) const {
    if (alpha <= 0.0) throw std::invalid_argument("envelope inverse requires alpha > 0");
    if (!table_.empty()) {
        // table is non-increasing: binary search the first qualifying index
        auto it = std::lower_bound(table_.begin(), table_.end(), alpha,
                                   [](double v, double a) { return v > a; });
        if (it == table_.end()) return std::nullopt;
        return static_cast<std::uint64_t>(it - table_.begin()) + 1;
    }
    if (fn_(1) <= alpha) return 1;
    std::uint64_t lo = 1, hi = 2;
    while (fn_(hi) > alpha) {
        if (hi >= kSearchCap) return std::nullopt;
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (fn_(mid) <= alpha) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

Envelope envelope_of(const std::vector<double>& losses, double nu) {
    if (losses.empty()) throw std::invalid_argument("envelope_of: empty sequence");
    std::vector<double> table(losses.size());
    double running = 0.0;
    for (std::size_t i = losses.size(); i-- > 0;) {
        running = std::max(running, std::fabs(losses[i] - nu));
        table[i] = running;
    }
    return Envelope::empirical(std::move(table));
}

LimitProfile::LimitProfile(std::vector<double> sorted_nus) : nus(std::move(sorted_nus)) {
    if (nus.size() < 2) throw std::invalid_argument("limit profile needs at least 2 arms");
    if (!(nus[0] < nus[1])) {
        throw std::invalid_argument("limit profile requires a strict gap nu_1 < nu_2");
    }
    for (std::size_t i = 2; i < nus.size(); ++i) {
        if (nus[i] < nus[i - 1]) throw std::invalid_argument("limit profile not sorted");
    }
}

namespace {

std::uint64_t inverse_or_throw(const Envelope& gbar, double alpha) {
    auto t = gbar.inverse(alpha);
    if (!t) {
        throw EnvelopeBeyondHorizon("envelope inverse beyond horizon at alpha=" +
                                    std::to_string(alpha));
    }
    return *t;
}

}  // namespace

ShBudgetBounds sh_sufficient_budget(const LimitProfile& profile, const Envelope& gbar) {
    const std::size_t n = profile.n();
    const std::uint64_t log_n = ceil_log2(n);

    std::uint64_t max_term = 0;
    std::uint64_t sum_inv = 0;
    std::uint64_t ginv_2 = 0;
    for (std::size_t i = 2; i <= n; ++i) {
        std::uint64_t ginv = inverse_or_throw(gbar, profile.gap(i - 1) / 2.0);
        if (i == 2) ginv_2 = ginv;
        max_term = std::max(max_term, static_cast<std::uint64_t>(i) * (1 + ginv));
        sum_inv += ginv;
    }

    // The sum representation counts the closest competitor twice: verifying
    // arm i against the best costs pulls on both sides, and for i = 2 the
    // best arm's share is not covered by any other summand. Without that
    // duplicate the max form can exceed the sum form (take n = 2).
    ShBudgetBounds out;
    out.max_form = {2 * log_n * max_term, "2*ceil(log2 n)*max_i i*(1+ginv_i)"};
    out.sum_form = {2 * log_n * (n + ginv_2 + sum_inv),
                    "2*ceil(log2 n)*(n + ginv_2 + sum_i ginv_i)"};
    return out;
}

BudgetBound uniform_sufficient_budget(const LimitProfile& profile, const Envelope& gbar) {
    // ginv is non-increasing in alpha, so the max over i is attained at i=2
    std::uint64_t ginv = inverse_or_throw(gbar, profile.gap(1) / 2.0);
    return {static_cast<std::uint64_t>(profile.n()) * ginv, "n*ginv((nu_2-nu_1)/2)"};
}

std::vector<std::unique_ptr<ArmProcess>> adversarial_instance(const LimitProfile& profile,
                                                              const BetaFunction& beta) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 1; t <= (std::uint64_t{1} << 20); t *= 2) {
        double v = beta.fn(t);
        // fast-decaying betas underflow to exactly 0; a zero tail is fine
        if (!(v < prev) && !(v == 0.0 && prev == 0.0)) {
            throw std::invalid_argument("beta '" + beta.name + "' is not strictly decreasing");
        }
        prev = v;
    }

    std::vector<std::unique_ptr<ArmProcess>> arms;
    arms.reserve(profile.n());
    auto fn = beta.fn;
    double nu1 = profile.nus[0];
    arms.push_back(std::make_unique<ClosedFormArm>(
        ArmId{0}, [fn, nu1](std::uint64_t t) { return nu1 + fn(t); }));
    for (std::size_t i = 1; i < profile.n(); ++i) {
        double nui = profile.nus[i];
        arms.push_back(std::make_unique<ClosedFormArm>(
            ArmId{i}, [fn, nui](std::uint64_t t) { return nui - fn(t); }));
    }
    return arms;
}

double sh_suboptimality_bound(std::uint64_t budget, std::size_t n, const Envelope& gbar) {
    const std::uint64_t log_n = ceil_log2(n);
    const std::uint64_t t = budget / (n * log_n);
    if (t < 1) {
        throw std::invalid_argument("sh_suboptimality_bound: budget below n*ceil(log2 n)");
    }
    return static_cast<double>(log_n) * 2.0 * gbar.value(t);
}

double uniform_suboptimality_bound(std::uint64_t budget, std::size_t n, const Envelope& gbar) {
    if (budget < n) throw std::invalid_argument("uniform_suboptimality_bound: budget below n");
    return 2.0 * gbar.value(budget / n);
}

Envelope sgd_envelope(double sigma_max, std::size_t n, double delta) {
    if (sigma_max <= 0.0) throw std::invalid_argument("sigma_max must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");

    auto raw = [sigma_max, n, delta](std::uint64_t t) {
        return sigma_max * std::log(static_cast<double>(n) * static_cast<double>(t) / delta) /
               static_cast<double>(t);
    };
    // raw is unimodal with its peak before t = e*delta/n < 3; clamping to the
    // prefix minimum over t <= 4 makes the whole curve non-increasing.
    double head_min = raw(1);
    std::vector<double> head = {head_min};
    for (std::uint64_t t = 2; t <= 4; ++t) {
        head_min = std::min(head_min, raw(t));
        head.push_back(head_min);
    }
    return Envelope::closed_form(
        "sgd(sigma_max=" + std::to_string(sigma_max) + ")",
        [raw, head, head_min](std::uint64_t t) {
            if (t <= 4) return head[t - 1];
            return std::min(head_min, raw(t));
        });
}

}  // namespace halving
