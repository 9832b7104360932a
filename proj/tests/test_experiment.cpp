#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "halving/experiment.hpp"

using namespace halving;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_ridge_config() {
    ExperimentConfig cfg;
    cfg.learner = "ridge";
    cfg.strategies = {"uniform", "sh", "sr"};
    cfg.budget = 100;
    cfg.trials = 4;
    cfg.seed = 2718;
    cfg.workers = 1;
    return cfg;
}

std::string emitted(const ExperimentConfig& cfg) {
    std::ostringstream out;
    emit_results(run_tune(cfg), ResultFormat::Csv, out, describe_config(cfg));
    return out.str();
}

}  // namespace

TEST_CASE("run_tune produces one record per (trial, strategy)") {
    auto records = run_tune(small_ridge_config());
    CHECK(records.size() == 12);

    std::ostringstream out;
    emit_results(records, ResultFormat::Csv, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);  // header
    std::vector<std::string> strategies;
    while (std::getline(lines, line)) {
        auto a = line.find(',');
        auto b = line.find(',', a + 1);
        strategies.push_back(line.substr(a + 1, b - a - 1));
    }
    REQUIRE(strategies.size() == 12);
    for (int i = 0; i < 4; ++i) CHECK(strategies[i] == "sh");
    for (int i = 4; i < 8; ++i) CHECK(strategies[i] == "sr");
    for (int i = 8; i < 12; ++i) CHECK(strategies[i] == "uniform");
}

TEST_CASE("identical configs emit byte-identical output") {
    ExperimentConfig cfg = small_ridge_config();
    CHECK(emitted(cfg) == emitted(cfg));
}

TEST_CASE("the worker count does not change the results") {
    ExperimentConfig one = small_ridge_config();
    ExperimentConfig four = small_ridge_config();
    four.workers = 4;
    CHECK(emitted(one) == emitted(four));
}

TEST_CASE("run_tune validates its configuration") {
    ExperimentConfig cfg = small_ridge_config();
    cfg.seed.reset();
    CHECK_THROWS_AS(run_tune(cfg), std::invalid_argument);

    cfg = small_ridge_config();
    cfg.strategies.clear();
    CHECK_THROWS_AS(run_tune(cfg), std::invalid_argument);

    cfg = small_ridge_config();
    cfg.budget = 0;
    cfg.doublings = 0;
    CHECK_THROWS_AS(run_tune(cfg), std::invalid_argument);

    cfg = small_ridge_config();
    cfg.strategies = {"bogus"};
    CHECK_THROWS_AS(run_tune(cfg), std::invalid_argument);
}

TEST_CASE("an infeasible budget names the minimum") {
    ExperimentConfig cfg = small_ridge_config();
    cfg.strategies = {"sh"};
    cfg.trials = 1;
    cfg.budget = 20;  // 10 default arms need 10 * ceil(log2 10) = 40
    try {
        run_tune(cfg);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("40") != std::string::npos);
    }
}

TEST_CASE("doubling mode records the last inner budget") {
    ExperimentConfig cfg = small_ridge_config();
    cfg.strategies = {"sh"};
    cfg.trials = 1;
    cfg.budget = 0;
    cfg.doublings = 3;  // inner budgets 40, 80, 160
    auto records = run_tune(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].budget == 160);
    CHECK(records[0].pulls <= 40 + 80 + 160);
}

TEST_CASE("default_specs shapes") {
    auto ridge = default_specs("ridge");
    REQUIRE(ridge.size() == 1);
    CHECK(ridge[0].samples == 10);
    CHECK(ridge[0].log_scale);

    auto pegasos = default_specs("pegasos");
    REQUIRE(pegasos.size() == 2);
    CHECK(pegasos[0].samples * pegasos[1].samples == 100);

    auto matcomp = default_specs("matcomp");
    REQUIRE(matcomp.size() == 3);
    CHECK(matcomp[0].name == "d");

    CHECK_THROWS_AS(default_specs("bogus"), std::invalid_argument);
}

TEST_CASE("run_synth adversarial writes sequences and a manifest") {
    fs::path dir = fs::temp_directory_path() / "halving_synth_adv_test";
    fs::remove_all(dir);

    SynthRequest req;
    req.kind = "adversarial";
    req.n_arms = 3;
    req.horizon = 16;
    req.seed = 9;
    req.destination = dir.string();
    auto written = run_synth(req);
    CHECK(written.size() == 4);  // 3 sequences + manifest

    std::ifstream manifest(dir / "manifest.json");
    REQUIRE(manifest.good());
    std::stringstream buf;
    buf << manifest.rdbuf();
    // nus are (0, 0.6, 1.2), beta = 1/t: inverse of 0.3 is 4, so 3 * 4 = 12
    CHECK(buf.str().find("\"boundary_budget\": 12") != std::string::npos);

    std::ifstream seq0(dir / "sequence_0.csv");
    REQUIRE(seq0.good());
    std::string line;
    std::getline(seq0, line);  // comment
    std::getline(seq0, line);  // t,loss header
    CHECK(line == "t,loss");
    std::getline(seq0, line);  // arm 0 at t=1: nu_1 + beta(1) = 0 + 1
    CHECK(line.rfind("1,", 0) == 0);
    CHECK(std::stod(line.substr(2)) == 1.0);

    fs::remove_all(dir);
}

TEST_CASE("run_synth regression output loads back through load_dense") {
    fs::path file = fs::temp_directory_path() / "halving_synth_reg_test.csv";
    fs::remove(file);

    SynthRequest req;
    req.kind = "regression";
    req.n_examples = 200;
    req.n_dims = 5;
    req.noise = 0.1;
    req.seed = 4;
    req.destination = file.string();
    auto written = run_synth(req);
    REQUIRE(written.size() == 1);

    Dataset data = load_dense_file(written[0]);
    CHECK(data.size() == 200);
    CHECK(data.dims() == 5);

    CHECK_THROWS_AS(run_synth(SynthRequest{.kind = "nonsense", .destination = file.string()}),
                    std::invalid_argument);
    fs::remove(file);
}
