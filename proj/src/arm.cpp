#include "halving/arm.hpp"

#include <sstream>

#include "json.hpp"

namespace halving {

std::optional<ArmId> recommend(const std::vector<std::optional<double>>& latest_losses) {
    std::optional<ArmId> best;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < latest_losses.size(); ++i) {
        if (!latest_losses[i]) continue;
        if (!best || *latest_losses[i] < best_loss) {
            best = ArmId{i};
            best_loss = *latest_losses[i];
        }
    }
    return best;
}

RunTrace run_protocol(const StepStrategy& strategy,
                      std::vector<std::unique_ptr<ArmProcess>>& arms,
                      const StopSignal& stop,
                      CostLedger& ledger) {
    if (arms.size() < 2) throw std::invalid_argument("run_protocol requires at least 2 arms");

    RunTrace trace;
    std::vector<std::uint64_t> pulls(arms.size(), 0);
    std::vector<std::optional<double>> latest(arms.size());

    std::uint64_t steps = 0;
    while (!stop(steps)) {
        std::size_t pick = strategy(pulls, latest);
        if (pick >= arms.size()) {
            throw std::out_of_range("strategy chose arm " + std::to_string(pick) +
                                    " but only " + std::to_string(arms.size()) + " exist");
        }
        pull(*arms[pick], ledger, &trace);
        latest[pick] = evaluate(*arms[pick], ledger, &trace);
        pulls[pick] += 1;
        trace.recommendation = recommend(latest);
        ++steps;
    }
    return trace;
}

std::string RunTrace::to_csv() const {
    std::ostringstream out;
    out << "step,arm_id,event,iteration,loss\n";
    for (const auto& e : events) {
        out << e.step << ',' << e.arm.index << ','
            << (e.kind == EventKind::Pull ? "pull" : "eval") << ','
            << e.iteration << ',';
        if (e.loss) out << *e.loss;
        out << '\n';
    }
    return out.str();
}

std::string RunTrace::to_json() const {
    nlohmann::json j;
    j["events"] = nlohmann::json::array();
    for (const auto& e : events) {
        nlohmann::json je;
        je["step"] = e.step;
        je["arm_id"] = e.arm.index;
        je["event"] = e.kind == EventKind::Pull ? "pull" : "eval";
        je["iteration"] = e.iteration;
        if (e.loss) {
            je["loss"] = std::isinf(*e.loss) ? "inf" : nlohmann::json(*e.loss);
        } else {
            je["loss"] = nullptr;
        }
        if (e.nan_flagged) je["nan_flagged"] = true;
        j["events"].push_back(je);
    }
    j["rounds"] = nlohmann::json::array();
    for (const auto& r : rounds) {
        nlohmann::json jr;
        jr["round"] = r.round;
        auto ids = nlohmann::json::array();
        for (auto id : r.survivors) ids.push_back(id.index);
        jr["survivors"] = ids;
        jr["pulls_this_round"] = r.pulls_this_round;
        jr["cumulative_pulls"] = r.cumulative_pulls;
        j["rounds"].push_back(jr);
    }
    if (recommendation) {
        j["recommendation"] = recommendation->index;
    } else {
        j["recommendation"] = nullptr;
    }
    return j.dump(2);
}

}  // namespace halving
