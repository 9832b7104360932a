#ifndef HALVING_ARM_HPP
#define HALVING_ARM_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace halving {

// Index of an arm within one problem instance. Stable for the whole run.
struct ArmId {
    std::size_t index = 0;

    friend bool operator==(ArmId a, ArmId b) { return a.index == b.index; }
    friend bool operator!=(ArmId a, ArmId b) { return a.index != b.index; }
    friend bool operator<(ArmId a, ArmId b) { return a.index < b.index; }
};

// An iterative process viewed as an arm: advancing runs one iteration,
// evaluating reads the current loss without changing state. For a fixed
// seed the loss sequence is a deterministic function of the iteration
// count, independent of how pulls are interleaved across arms.
class ArmProcess {
public:
    explicit ArmProcess(ArmId id) : id_(id) {}
    virtual ~ArmProcess() = default;

    ArmId id() const { return id_; }
    std::uint64_t iteration_count() const { return iterations_; }

    void advance() {
        do_advance();
        ++iterations_;
    }

    // Advance k iterations at once. Semantically identical to k calls of
    // advance(); subclasses with trivial state override do_advance_by and
    // bump the counter themselves.
    void advance_by(std::uint64_t k) { do_advance_by(k); }

    // Loss at the current iteration count. Requires at least one pull.
    double current_loss() const {
        if (iterations_ == 0) {
            throw std::logic_error("arm " + std::to_string(id_.index) +
                                   ": cannot evaluate before the first pull");
        }
        return do_loss();
    }

    // Rewind to iteration 0 (used by the doubling wrapper without warm start).
    void reset() {
        do_reset();
        iterations_ = 0;
    }

protected:
    virtual void do_advance() = 0;
    // Default path steps one at a time so per-iteration schedules (learning
    // rates etc.) always see the true iteration index.
    virtual void do_advance_by(std::uint64_t k) {
        for (std::uint64_t j = 0; j < k; ++j) advance();
    }
    virtual double do_loss() const = 0;
    virtual void do_reset() = 0;

    // For bulk do_advance_by overrides: account for k skipped iterations.
    void bump_iterations(std::uint64_t k) { iterations_ += k; }

private:
    ArmId id_;
    std::uint64_t iterations_ = 0;
};

// Arm backed by a fixed, finite loss sequence (1-based in iteration count).
class PrerecordedArm : public ArmProcess {
public:
    PrerecordedArm(ArmId id, std::vector<double> losses)
        : ArmProcess(id), losses_(std::move(losses)) {
        if (losses_.empty()) throw std::invalid_argument("empty loss sequence");
    }

protected:
    void do_advance() override {
        if (iteration_count() >= losses_.size()) {
            throw std::out_of_range("prerecorded arm pulled past its horizon");
        }
    }
    void do_advance_by(std::uint64_t k) override {
        if (iteration_count() + k > losses_.size()) {
            throw std::out_of_range("prerecorded arm pulled past its horizon");
        }
        bump_iterations(k);
    }
    double do_loss() const override { return losses_[iteration_count() - 1]; }
    void do_reset() override {}

private:
    std::vector<double> losses_;
};

// Arm whose loss at iteration t is a closed-form function of t.
class ClosedFormArm : public ArmProcess {
public:
    ClosedFormArm(ArmId id, std::function<double(std::uint64_t)> loss_at)
        : ArmProcess(id), loss_at_(std::move(loss_at)) {}

protected:
    void do_advance() override {}
    void do_advance_by(std::uint64_t k) override { bump_iterations(k); }
    double do_loss() const override { return loss_at_(iteration_count()); }
    void do_reset() override {}

private:
    std::function<double(std::uint64_t)> loss_at_;
};

// Two-sided cost accounting: pulls are cheap iterations, loss observations
// are the expensive evaluations, counted separately.
struct CostLedger {
    std::vector<std::uint64_t> pulls_per_arm;  // T_i
    std::uint64_t total_pulls = 0;
    std::uint64_t loss_observations = 0;
    double elapsed_ms = 0.0;

    void record_pulls(ArmId id, std::uint64_t k) {
        if (id.index >= pulls_per_arm.size()) pulls_per_arm.resize(id.index + 1, 0);
        pulls_per_arm[id.index] += k;
        total_pulls += k;
    }
    void record_observation() { ++loss_observations; }

    std::uint64_t pulls(ArmId id) const {
        return id.index < pulls_per_arm.size() ? pulls_per_arm[id.index] : 0;
    }
};

enum class EventKind { Pull, Eval };

struct TraceEvent {
    std::uint64_t step = 0;
    ArmId arm;
    EventKind kind = EventKind::Pull;
    std::uint64_t iteration = 0;
    std::optional<double> loss;       // set for Eval events
    bool nan_flagged = false;         // learner produced NaN, ranked as +inf
};

struct RoundRecord {
    std::size_t round = 0;
    std::vector<ArmId> survivors;     // S_k
    std::uint64_t pulls_this_round = 0;   // r_k
    std::uint64_t cumulative_pulls = 0;   // R_k
};

// Time-ordered record of one run: pull/eval events, per-round survivor sets,
// and the final recommendation (absent for an empty run).
struct RunTrace {
    std::vector<TraceEvent> events;
    std::vector<RoundRecord> rounds;
    std::optional<ArmId> recommendation;

    std::uint64_t next_step() const { return events.size(); }

    std::string to_csv() const;
    std::string to_json() const;
};

// Advance the arm one iteration and charge the pull. No loss is computed.
inline void pull(ArmProcess& arm, CostLedger& ledger, RunTrace* trace = nullptr) {
    arm.advance();
    ledger.record_pulls(arm.id(), 1);
    if (trace) {
        trace->events.push_back({trace->next_step(), arm.id(), EventKind::Pull,
                                 arm.iteration_count(), std::nullopt, false});
    }
}

// Advance the arm k iterations, charging k pulls as one trace event per pull
// would be wasteful for large k; a single Pull event records the batch.
inline void pull_by(ArmProcess& arm, CostLedger& ledger, std::uint64_t k,
                    RunTrace* trace = nullptr) {
    if (k == 0) return;
    arm.advance_by(k);
    ledger.record_pulls(arm.id(), k);
    if (trace) {
        trace->events.push_back({trace->next_step(), arm.id(), EventKind::Pull,
                                 arm.iteration_count(), std::nullopt, false});
    }
}

// Pull until the arm has at least `target` iterations. Returns pulls charged.
inline std::uint64_t pull_to(ArmProcess& arm, CostLedger& ledger, std::uint64_t target,
                             RunTrace* trace = nullptr) {
    if (arm.iteration_count() >= target) return 0;
    std::uint64_t k = target - arm.iteration_count();
    pull_by(arm, ledger, k, trace);
    return k;
}

// Observe the current validation loss. NaN is ranked as +inf and flagged.
inline double evaluate(ArmProcess& arm, CostLedger& ledger, RunTrace* trace = nullptr) {
    double loss = arm.current_loss();
    ledger.record_observation();
    bool flagged = std::isnan(loss);
    if (flagged) loss = std::numeric_limits<double>::infinity();
    if (trace) {
        trace->events.push_back({trace->next_step(), arm.id(), EventKind::Eval,
                                 arm.iteration_count(), loss, flagged});
    }
    return loss;
}

// A step strategy for the generic protocol loop: given the pull counts so
// far and the latest observed losses, choose the next arm to pull.
using StepStrategy = std::function<std::size_t(
    const std::vector<std::uint64_t>& pulls,
    const std::vector<std::optional<double>>& latest_losses)>;

using StopSignal = std::function<bool(std::uint64_t steps_taken)>;

// Generic best-arm protocol loop: at each step the strategy picks an arm,
// the arm is pulled and its loss observed, and the running argmin over
// latest observed losses (ties to the lowest arm id) is recorded as the
// recommendation J_t.
RunTrace run_protocol(const StepStrategy& strategy,
                      std::vector<std::unique_ptr<ArmProcess>>& arms,
                      const StopSignal& stop,
                      CostLedger& ledger);

// Argmin over latest observed losses, ties broken by lowest arm id.
std::optional<ArmId> recommend(const std::vector<std::optional<double>>& latest_losses);

}  // namespace halving

#endif
