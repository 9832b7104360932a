#include "halving/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace halving {
namespace {

void require_arms(const std::vector<std::unique_ptr<ArmProcess>>& arms) {
    if (arms.size() < 2) throw std::invalid_argument("need at least 2 arms");
}

// Stable (loss, arm id) ordering used for all ranking decisions.
struct Ranked {
    std::size_t slot;  // position in the survivor vector
    ArmId id;
    double loss;
};

void sort_by_loss(std::vector<Ranked>& r) {
    std::sort(r.begin(), r.end(), [](const Ranked& a, const Ranked& b) {
        if (a.loss != b.loss) return a.loss < b.loss;
        return a.id < b.id;
    });
}

}  // namespace

std::size_t ceil_log2(std::size_t n) {
    if (n == 0) throw std::invalid_argument("ceil_log2(0)");
    std::size_t k = 0;
    std::size_t pow = 1;
    while (pow < n) {
        pow *= 2;
        ++k;
    }
    return k;
}

double sr_log_bar(std::size_t n) {
    double s = 0.5;
    for (std::size_t i = 2; i <= n; ++i) s += 1.0 / static_cast<double>(i);
    return s;
}

std::uint64_t sh_min_budget(std::size_t n) {
    return static_cast<std::uint64_t>(n) * ceil_log2(n);
}

std::uint64_t uniform_min_budget(std::size_t n) { return n; }

std::uint64_t sr_min_budget(std::size_t n) {
    auto base = static_cast<std::uint64_t>(std::ceil(n * sr_log_bar(n)));
    // the first phase needs at least one pull, which requires B > n
    return std::max<std::uint64_t>(base, n + 1);
}

StrategyResult successive_halving(std::vector<std::unique_ptr<ArmProcess>>& arms, Budget b) {
    require_arms(arms);
    const std::size_t n = arms.size();
    const std::size_t log_n = ceil_log2(n);
    if (b.value < sh_min_budget(n)) {
        throw std::invalid_argument(
            "successive halving: budget " + std::to_string(b.value) +
            " infeasible; minimum is n*ceil(log2 n) = " + std::to_string(sh_min_budget(n)));
    }

    StrategyResult out;
    std::vector<ArmId> survivors(n);
    for (std::size_t i = 0; i < n; ++i) survivors[i] = arms[i]->id();

    std::uint64_t cumulative = 0;  // R_k
    for (std::size_t k = 0; k < log_n; ++k) {
        const std::uint64_t r_k = b.value / (survivors.size() * log_n);
        cumulative += r_k;

        std::vector<Ranked> ranked;
        ranked.reserve(survivors.size());
        for (std::size_t s = 0; s < survivors.size(); ++s) {
            ArmProcess& arm = *arms[survivors[s].index];
            pull_to(arm, out.ledger, cumulative, &out.trace);
            ranked.push_back({s, arm.id(), evaluate(arm, out.ledger, &out.trace)});
        }
        sort_by_loss(ranked);

        std::size_t keep = survivors.size() >= 2 ? survivors.size() / 2 : 1;
        std::vector<ArmId> next;
        next.reserve(keep);
        for (std::size_t s = 0; s < keep; ++s) next.push_back(ranked[s].id);
        std::sort(next.begin(), next.end());

        out.trace.rounds.push_back({k, survivors, r_k, cumulative});
        survivors = std::move(next);
    }

    out.winner = survivors.front();
    out.trace.rounds.push_back({log_n, survivors, 0, cumulative});
    out.trace.recommendation = out.winner;
    return out;
}

StrategyResult uniform_allocation(std::vector<std::unique_ptr<ArmProcess>>& arms, Budget b) {
    require_arms(arms);
    const std::size_t n = arms.size();
    if (b.value < n) {
        throw std::invalid_argument("uniform: budget " + std::to_string(b.value) +
                                    " infeasible; minimum is n = " + std::to_string(n));
    }

    StrategyResult out;
    const std::uint64_t per_arm = b.value / n;

    std::vector<Ranked> ranked;
    ranked.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pull_to(*arms[i], out.ledger, per_arm, &out.trace);
        ranked.push_back({i, arms[i]->id(), evaluate(*arms[i], out.ledger, &out.trace)});
    }
    sort_by_loss(ranked);

    out.winner = ranked.front().id;
    out.trace.recommendation = out.winner;
    return out;
}

StrategyResult successive_rejects(std::vector<std::unique_ptr<ArmProcess>>& arms, Budget b) {
    require_arms(arms);
    const std::size_t n = arms.size();
    if (b.value < sr_min_budget(n)) {
        throw std::invalid_argument(
            "successive rejects: budget " + std::to_string(b.value) +
            " infeasible; minimum is " + std::to_string(sr_min_budget(n)));
    }

    StrategyResult out;
    const double log_bar = sr_log_bar(n);
    const double spendable = static_cast<double>(b.value - n);

    std::vector<ArmId> survivors(n);
    for (std::size_t i = 0; i < n; ++i) survivors[i] = arms[i]->id();

    for (std::size_t k = 1; k <= n - 1; ++k) {
        const auto n_k = static_cast<std::uint64_t>(
            std::ceil(spendable / (log_bar * static_cast<double>(n + 1 - k))));

        std::vector<Ranked> ranked;
        ranked.reserve(survivors.size());
        for (std::size_t s = 0; s < survivors.size(); ++s) {
            ArmProcess& arm = *arms[survivors[s].index];
            pull_to(arm, out.ledger, n_k, &out.trace);
            ranked.push_back({s, arm.id(), evaluate(arm, out.ledger, &out.trace)});
        }
        // reject the worst; ties go to the highest arm id
        std::size_t worst = 0;
        for (std::size_t s = 1; s < ranked.size(); ++s) {
            if (ranked[s].loss > ranked[worst].loss ||
                (ranked[s].loss == ranked[worst].loss && ranked[worst].id < ranked[s].id)) {
                worst = s;
            }
        }
        ArmId rejected = ranked[worst].id;
        std::vector<ArmId> next;
        next.reserve(survivors.size() - 1);
        for (ArmId id : survivors) {
            if (id != rejected) next.push_back(id);
        }
        out.trace.rounds.push_back({k - 1, survivors, n_k, n_k});
        survivors = std::move(next);
    }

    out.winner = survivors.front();
    out.trace.rounds.push_back({n - 1, survivors, 0, 0});
    out.trace.recommendation = out.winner;
    return out;
}

DoublingResult doubling(const FixedBudgetStrategy& inner,
                        std::uint64_t min_budget,
                        std::vector<std::unique_ptr<ArmProcess>>& arms,
                        const std::function<bool(std::size_t rounds_done)>& stop,
                        bool warm_start) {
    require_arms(arms);
    DoublingResult out;
    out.ledger.pulls_per_arm.assign(arms.size(), 0);

    std::uint64_t budget = min_budget;
    std::size_t rounds_done = 0;
    while (!stop(rounds_done)) {
        if (!warm_start) {
            for (auto& arm : arms) arm->reset();
        }
        StrategyResult r = inner(arms, Budget{budget});
        for (std::size_t i = 0; i < r.ledger.pulls_per_arm.size(); ++i) {
            out.ledger.record_pulls(ArmId{i}, r.ledger.pulls_per_arm[i]);
        }
        out.ledger.loss_observations += r.ledger.loss_observations;
        out.rounds.push_back({budget, out.ledger.total_pulls, r.winner});
        budget *= 2;
        ++rounds_done;
    }
    return out;
}

}  // namespace halving
