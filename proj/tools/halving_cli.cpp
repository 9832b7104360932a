#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "halving/experiment.hpp"
#include "halving/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCounterexample = 4;

bool is_infeasible_budget(const std::string& message) {
    return message.find("infeasible") != std::string::npos ||
           message.find("budget") != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-stochastic best-arm identification: strategies, theory checks, "
                 "and hyperparameter tuning of iterative learners"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a config file; flags override it");

    // --- tune ---
    halving::ExperimentConfig config;
    std::uint64_t seed_flag = 0;
    bool json_out = false;
    auto* tune = app.add_subcommand("tune", "Run hyperparameter search trials");
    tune->add_option("--learner", config.learner, "ridge|pegasos|matcomp")
        ->check(CLI::IsMember({"ridge", "pegasos", "matcomp"}));
    tune->add_option("--data", config.data_path, "Dataset path (default: seeded synthetic)");
    tune->add_option("--strategy", config.strategies, "uniform|sh|sr (repeatable)");
    tune->add_option("--budget", config.budget, "Total pull budget per run");
    tune->add_option("--doublings", config.doublings, "Run the doubling wrapper this many rounds");
    tune->add_flag("--warm-start", config.warm_start, "Reuse arm progress across doublings");
    tune->add_option("--trials", config.trials, "Independent trials");
    auto* seed_opt = tune->add_option("--seed", seed_flag, "Mandatory RNG seed");
    seed_opt->required();
    tune->add_option("--workers", config.workers, "Worker threads (default: cores)");
    tune->add_option("--out", config.out_path, "Output path (default: stdout)");
    tune->add_flag("--grid", config.grid, "Grid-sample hyperparameters instead of random");
    tune->add_flag("--json", json_out, "Emit JSON instead of CSV");
    tune->add_flag("--timing", config.timing,
                   "Record measured wall time (output is no longer byte-reproducible)");

    // --- verify ---
    std::string selector = "all";
    std::uint64_t v_instances = 1000;
    std::uint64_t v_seed = 0;
    std::string v_out;
    auto* verify = app.add_subcommand("verify", "Run the theorem property suites");
    verify->add_option("selector", selector, "t1|t2|t3|t4|separation|all")
        ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "separation", "all"}));
    verify->add_option("--instances", v_instances, "Randomized instances per suite");
    verify->add_option("--seed", v_seed, "Mandatory RNG seed")->required();
    verify->add_option("--out", v_out, "Write the JSON report here (default: stdout)");

    // --- synth ---
    halving::SynthRequest synth_req;
    auto* synth = app.add_subcommand("synth", "Generate synthetic datasets and instances");
    synth->add_option("kind", synth_req.kind, "regression|classification|lowrank|adversarial")
        ->required();
    synth->add_option("--examples", synth_req.n_examples, "Examples (dense kinds)");
    synth->add_option("--dims", synth_req.n_dims, "Feature dimensions");
    synth->add_option("--noise", synth_req.noise, "Noise level");
    synth->add_option("--separation", synth_req.separation, "Class separation");
    synth->add_option("--users", synth_req.users, "Users (lowrank)");
    synth->add_option("--items", synth_req.items, "Items (lowrank)");
    synth->add_option("--rank", synth_req.rank, "True rank (lowrank)");
    synth->add_option("--density", synth_req.density, "Observed fraction (lowrank)");
    synth->add_option("--arms", synth_req.n_arms, "Arms (adversarial)");
    synth->add_option("--horizon", synth_req.horizon, "Sequence horizon (adversarial)");
    synth->add_option("--seed", synth_req.seed, "Mandatory RNG seed")->required();
    synth->add_option("--out", synth_req.destination, "Output file or directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (tune->parsed()) {
            config.seed = seed_flag;
            config.format = json_out ? halving::ResultFormat::Json : halving::ResultFormat::Csv;
            halving::run_tune_and_emit(config);
            return kExitOk;
        }
        if (verify->parsed()) {
            std::vector<halving::SuiteReport> reports;
            if (selector == "t1" || selector == "all") {
                reports.push_back(halving::verify_sh_guarantee(v_instances, v_seed));
            }
            if (selector == "t2" || selector == "all") {
                reports.push_back(halving::verify_uniform_guarantee(v_instances, v_seed));
            }
            if (selector == "t3" || selector == "all") {
                reports.push_back(halving::verify_uniform_sharpness(v_instances, v_seed));
            }
            if (selector == "t4" || selector == "all") {
                reports.push_back(halving::verify_suboptimality_bounds(v_instances, v_seed));
            }
            if (selector == "separation" || selector == "all") {
                reports.push_back(halving::verify_separation(v_instances, v_seed));
            }
            std::string json = halving::report_to_json(reports);
            if (v_out.empty()) {
                std::cout << json << '\n';
            } else {
                std::ofstream out(v_out);
                if (!out) throw std::runtime_error("cannot write " + v_out);
                out << json << '\n';
            }
            for (const auto& r : reports) {
                if (r.failures > 0) return kExitCounterexample;
            }
            return kExitOk;
        }
        if (synth->parsed()) {
            for (const auto& path : halving::run_synth(synth_req)) {
                std::cout << path << '\n';
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_infeasible_budget(e.what()) ? kExitInfeasible : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
