#include "halving/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "halving/strategies.hpp"
#include "halving/theory.hpp"
#include "json.hpp"

namespace halving {
namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string format_value(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

FixedBudgetStrategy strategy_by_name(const std::string& name) {
    if (name == "uniform") return uniform_allocation;
    if (name == "sh") return successive_halving;
    if (name == "sr") return successive_rejects;
    throw std::invalid_argument("unknown strategy '" + name + "' (expected uniform|sh|sr)");
}

std::uint64_t strategy_min_budget(const std::string& name, std::size_t n) {
    if (name == "uniform") return uniform_min_budget(n);
    if (name == "sh") return sh_min_budget(n);
    if (name == "sr") return sr_min_budget(n);
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

RatingsData load_ratings_file(const std::string& path) {
    Dataset raw = load_dense_file(path);
    if (raw.dims() != 2) throw std::runtime_error("ratings file needs columns user,item,rating");
    RatingsData data;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto user = static_cast<std::size_t>(raw.features[i][0]);
        auto item = static_cast<std::size_t>(raw.features[i][1]);
        data.ratings.push_back({user, item, raw.labels[i]});
        data.n_users = std::max(data.n_users, user + 1);
        data.n_items = std::max(data.n_items, item + 1);
    }
    return data;
}

struct TrialOutcome {
    ArmId winner;
    std::uint64_t budget_charged = 0;
    CostLedger ledger;
};

TrialOutcome run_one_strategy(const ExperimentConfig& config, const std::string& strategy,
                              std::vector<std::unique_ptr<ArmProcess>>& arms) {
    TrialOutcome out;
    FixedBudgetStrategy inner = strategy_by_name(strategy);
    if (config.doublings > 0) {
        std::size_t target = config.doublings;
        DoublingResult d = doubling(inner, strategy_min_budget(strategy, arms.size()), arms,
                                    [target](std::size_t done) { return done >= target; },
                                    config.warm_start);
        out.winner = d.rounds.back().recommendation;
        out.budget_charged = d.rounds.back().inner_budget;
        out.ledger = d.ledger;
    } else {
        StrategyResult r = inner(arms, Budget{config.budget});
        out.winner = r.winner;
        out.budget_charged = config.budget;
        out.ledger = std::move(r.ledger);
    }
    return out;
}

std::string config_string(const std::vector<HyperparamSpec>& specs,
                          const std::vector<double>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (i) out << ';';
        out << specs[i].name << '=' << format_value(values[i]);
    }
    return out.str();
}

std::vector<ResultRecord> run_trial(const ExperimentConfig& config,
                                    const std::vector<HyperparamSpec>& specs,
                                    const Dataset* base_data, const RatingsData* base_ratings,
                                    std::uint64_t trial) {
    std::uint64_t trial_seed = mix(*config.seed, trial);
    auto configs = sample_configs(specs, config.grid, trial_seed);

    std::vector<ResultRecord> records;
    for (const auto& strategy : config.strategies) {
        auto started = std::chrono::steady_clock::now();

        Dataset data;
        RatingsData ratings;
        Split split;
        std::vector<std::unique_ptr<ArmProcess>> arms;

        if (config.learner == "matcomp") {
            ratings = *base_ratings;  // ratings are not normalized
            split = make_split(ratings.ratings.size(), trial_seed);
            for (std::size_t a = 0; a < configs.size(); ++a) {
                auto rank = static_cast<std::size_t>(std::lround(configs[a][0]));
                arms.push_back(std::make_unique<MatCompArm>(ArmId{a}, ratings, split, rank,
                                                            configs[a][1], configs[a][2],
                                                            trial_seed));
            }
        } else {
            data = *base_data;
            split = make_split(data.size(), trial_seed);
            bool regression = config.learner == "ridge";
            apply_normalization(data, fit_normalization(data, split.train, regression));
            for (std::size_t a = 0; a < configs.size(); ++a) {
                if (regression) {
                    arms.push_back(std::make_unique<RidgeSgdArm>(ArmId{a}, data, split,
                                                                 configs[a][0], trial_seed));
                } else {
                    arms.push_back(std::make_unique<PegasosRbfArm>(ArmId{a}, data, split,
                                                                   configs[a][0], configs[a][1],
                                                                   trial_seed));
                }
            }
        }

        TrialOutcome outcome = run_one_strategy(config, strategy, arms);

        // report the winner's loss on the held-out TEST split only
        double test_loss = 0.0;
        if (config.learner == "ridge") {
            const auto& arm = static_cast<const RidgeSgdArm&>(*arms[outcome.winner.index]);
            for (std::size_t idx : split.test) {
                double pred = 0.0;
                for (std::size_t j = 0; j < data.dims(); ++j) {
                    pred += arm.weights()[j] * data.features[idx][j];
                }
                double err = pred - data.labels[idx];
                test_loss += err * err;
            }
            test_loss /= static_cast<double>(split.test.size());
        } else if (config.learner == "pegasos") {
            const auto& arm = static_cast<const PegasosRbfArm&>(*arms[outcome.winner.index]);
            std::size_t wrong = 0;
            for (std::size_t idx : split.test) {
                if (data.labels[idx] * arm.decision(data.features[idx]) <= 0.0) ++wrong;
            }
            test_loss = static_cast<double>(wrong) / static_cast<double>(split.test.size());
        } else {
            const auto& arm = static_cast<const MatCompArm&>(*arms[outcome.winner.index]);
            for (std::size_t idx : split.test) {
                const Rating& r = ratings.ratings[idx];
                double err = arm.predict(r.user, r.item) - r.value;
                test_loss += err * err;
            }
            test_loss /= static_cast<double>(split.test.size());
        }

        ResultRecord rec;
        rec.trial = trial;
        rec.strategy = strategy;
        rec.budget = outcome.budget_charged;
        rec.winner = config_string(specs, configs[outcome.winner.index]);
        rec.test_loss = test_loss;
        rec.pulls = outcome.ledger.total_pulls;
        rec.loss_observations = outcome.ledger.loss_observations;
        if (config.timing) {
            auto elapsed = std::chrono::steady_clock::now() - started;
            rec.wall_ms = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::vector<HyperparamSpec> default_specs(const std::string& learner) {
    if (learner == "ridge") {
        return {{"lambda", 1e-6, 1.0, true, 10}};
    }
    if (learner == "pegasos") {
        return {{"lambda", 1e-6, 1.0, true, 10}, {"gamma", 1.0, 1e3, true, 10}};
    }
    if (learner == "matcomp") {
        return {{"d", 2.0, 50.0, false, 4}, {"lambda", 1e-6, 1.0, true, 4},
                {"sigma", 0.01, 3.0, false, 4}};
    }
    throw std::invalid_argument("unknown learner '" + learner +
                                "' (expected ridge|pegasos|matcomp)");
}

std::string describe_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "learner=" << config.learner
        << " data=" << (config.data_path.empty() ? "synthetic" : config.data_path)
        << " strategies=";
    for (std::size_t i = 0; i < config.strategies.size(); ++i) {
        if (i) out << '+';
        out << config.strategies[i];
    }
    out << " budget=" << config.budget << " doublings=" << config.doublings
        << " warm_start=" << (config.warm_start ? 1 : 0) << " trials=" << config.trials
        << " seed=" << *config.seed << " grid=" << (config.grid ? 1 : 0);
    return out.str();
}

std::vector<ResultRecord> run_tune(const ExperimentConfig& config) {
    if (!config.seed) throw std::invalid_argument("seed is mandatory");
    if (config.strategies.empty()) throw std::invalid_argument("no strategies selected");
    if (config.budget == 0 && config.doublings == 0) {
        throw std::invalid_argument("either a budget or a doubling count is required");
    }
    for (const auto& s : config.strategies) strategy_by_name(s);  // fail fast on names

    auto specs = config.specs.empty() ? default_specs(config.learner) : config.specs;

    // one base dataset per run; trials reshuffle splits and hyperparameters
    Dataset base_data;
    RatingsData base_ratings;
    std::uint64_t data_seed = mix(*config.seed, 0xda7aULL);
    if (config.learner == "matcomp") {
        base_ratings = config.data_path.empty()
                           ? synth_lowrank(30, 30, 2, 0.3, 0.05, data_seed)
                           : load_ratings_file(config.data_path);
    } else if (config.learner == "pegasos") {
        base_data = config.data_path.empty() ? synth_classification(120, 2, 3.0, data_seed)
                                             : load_sparse_file(config.data_path);
    } else if (config.learner == "ridge") {
        base_data = config.data_path.empty() ? synth_regression(200, 5, 0.1, data_seed)
                                             : load_dense_file(config.data_path);
    } else {
        throw std::invalid_argument("unknown learner '" + config.learner + "'");
    }

    std::size_t workers = config.workers > 0
                              ? config.workers
                              : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min<std::size_t>(workers, config.trials);

    std::vector<std::vector<ResultRecord>> per_trial(config.trials);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::uint64_t trial = next.fetch_add(1);
            if (trial >= config.trials) return;
            per_trial[trial] = run_trial(config, specs, &base_data, &base_ratings, trial);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<ResultRecord> records;
    for (auto& batch : per_trial) {
        for (auto& rec : batch) records.push_back(std::move(rec));
    }
    return records;
}

void run_tune_and_emit(const ExperimentConfig& config) {
    auto records = run_tune(config);
    std::string comment = describe_config(config);
    if (config.out_path.empty()) {
        emit_results(std::move(records), config.format, std::cout, comment);
    } else {
        emit_results_file(std::move(records), config.format, config.out_path, comment);
    }
}

std::vector<std::string> run_synth(const SynthRequest& req) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;

    auto header = [&req](const std::string& extra) {
        std::ostringstream out;
        out << "# kind=" << req.kind << " seed=" << req.seed << ' ' << extra << '\n';
        return out.str();
    };

    if (req.kind == "regression" || req.kind == "classification") {
        Dataset data = req.kind == "regression"
                           ? synth_regression(req.n_examples, req.n_dims, req.noise, req.seed)
                           : synth_classification(req.n_examples, req.n_dims, req.separation, req.seed);
        std::ofstream out(req.destination);
        if (!out) throw std::runtime_error("cannot write " + req.destination);
        std::ostringstream extra;
        extra << "examples=" << req.n_examples << " dims=" << req.n_dims
              << " noise=" << req.noise;
        out << header(extra.str());
        out.precision(17);
        for (std::size_t i = 0; i < data.size(); ++i) {
            for (double v : data.features[i]) out << v << ',';
            out << data.labels[i] << '\n';
        }
        written.push_back(req.destination);
    } else if (req.kind == "lowrank") {
        RatingsData data =
            synth_lowrank(req.users, req.items, req.rank, req.density, req.noise, req.seed);
        std::ofstream out(req.destination);
        if (!out) throw std::runtime_error("cannot write " + req.destination);
        std::ostringstream extra;
        extra << "users=" << req.users << " items=" << req.items << " rank=" << req.rank
              << " density=" << req.density;
        out << header(extra.str());
        out.precision(17);
        for (const auto& r : data.ratings) {
            out << r.user << ',' << r.item << ',' << r.value << '\n';
        }
        written.push_back(req.destination);
    } else if (req.kind == "adversarial") {
        if (req.n_arms < 2) throw std::invalid_argument("adversarial kind needs >= 2 arms");
        fs::create_directories(req.destination);

        std::vector<double> nus(req.n_arms);
        for (std::size_t i = 0; i < req.n_arms; ++i) nus[i] = 0.6 * static_cast<double>(i);
        LimitProfile profile(nus);
        BetaFunction beta{"1/t", [](std::uint64_t t) { return 1.0 / static_cast<double>(t); }};
        Envelope gbar = Envelope::closed_form(beta.name, beta.fn);
        std::uint64_t boundary = req.n_arms * *gbar.inverse(profile.gap(1) / 2.0);

        auto arms = adversarial_instance(profile, beta);
        nlohmann::json manifest;
        manifest["kind"] = "adversarial";
        manifest["seed"] = req.seed;
        manifest["nus"] = nus;
        manifest["beta"] = beta.name;
        manifest["boundary_budget"] = boundary;
        manifest["horizon"] = req.horizon;
        manifest["files"] = nlohmann::json::array();

        CostLedger scratch;
        for (std::size_t i = 0; i < arms.size(); ++i) {
            std::string path = (fs::path(req.destination) /
                                ("sequence_" + std::to_string(i) + ".csv")).string();
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write " + path);
            out << header("arm=" + std::to_string(i));
            out << "t,loss\n";
            out.precision(17);
            for (std::uint64_t t = 1; t <= req.horizon; ++t) {
                pull(*arms[i], scratch);
                out << t << ',' << arms[i]->current_loss() << '\n';
            }
            manifest["files"].push_back(path);
            written.push_back(path);
        }
        std::string manifest_path = (fs::path(req.destination) / "manifest.json").string();
        std::ofstream mout(manifest_path);
        mout << manifest.dump(2) << '\n';
        written.push_back(manifest_path);
    } else {
        throw std::invalid_argument("unknown synth kind '" + req.kind +
                                    "' (expected regression|classification|lowrank|adversarial)");
    }
    return written;
}

}  // namespace halving
