#ifndef HALVING_STRATEGIES_HPP
#define HALVING_STRATEGIES_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "halving/arm.hpp"

namespace halving {

struct Budget {
    std::uint64_t value = 0;
};

struct StrategyResult {
    ArmId winner;
    CostLedger ledger;
    RunTrace trace;
};

// ceil(log2(n)) for n >= 1.
std::size_t ceil_log2(std::size_t n);

// Minimal budgets at which every strategy round pulls at least once.
std::uint64_t sh_min_budget(std::size_t n);
std::uint64_t uniform_min_budget(std::size_t n);
std::uint64_t sr_min_budget(std::size_t n);

// log-bar(n) = 1/2 + sum_{i=2..n} 1/i, the Successive Rejects normalizer.
double sr_log_bar(std::size_t n);

// Successive Halving: repeatedly give each surviving arm an equal share of
// the budget, evaluate once per survivor, and keep the better half. Runs
// exactly ceil(log2 n) rounds; total pulls never exceed B.
StrategyResult successive_halving(std::vector<std::unique_ptr<ArmProcess>>& arms, Budget b);

// Uniform allocation: floor(B/n) pulls per arm, one evaluation per arm,
// winner is the argmin of the final losses.
StrategyResult uniform_allocation(std::vector<std::unique_ptr<ArmProcess>>& arms, Budget b);

// Successive Rejects: n-1 phases; each phase tops every survivor up to the
// cumulative count n_k = ceil((B-n) / (log-bar(n) * (n+1-k))) and rejects the
// worst survivor (ties to the highest arm id).
StrategyResult successive_rejects(std::vector<std::unique_ptr<ArmProcess>>& arms, Budget b);

using FixedBudgetStrategy = std::function<StrategyResult(
    std::vector<std::unique_ptr<ArmProcess>>&, Budget)>;

struct DoublingRound {
    std::uint64_t inner_budget = 0;
    std::uint64_t total_pulls_so_far = 0;  // across all rounds
    ArmId recommendation;
};

struct DoublingResult {
    std::vector<DoublingRound> rounds;
    CostLedger ledger;  // aggregated across inner runs
};

// Doubling trick: run the inner strategy with budgets B_min, 2*B_min, ...
// until the stop signal fires (checked after each completed inner run).
// Without warm start every arm is reset to iteration 0 per round; with warm
// start prior pulls are kept and only the incremental pulls are charged.
DoublingResult doubling(const FixedBudgetStrategy& inner,
                        std::uint64_t min_budget,
                        std::vector<std::unique_ptr<ArmProcess>>& arms,
                        const std::function<bool(std::size_t rounds_done)>& stop,
                        bool warm_start);

}  // namespace halving

#endif
