#ifndef HALVING_EXPERIMENT_HPP
#define HALVING_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "halving/data_io.hpp"
#include "halving/learners.hpp"

namespace halving {

// Fully resolved experiment description. The seed is mandatory; there is no
// wall-clock default, so identical configs reproduce identical outputs.
struct ExperimentConfig {
    std::string learner = "ridge";            // ridge | pegasos | matcomp
    std::string data_path;                    // empty -> seeded synthetic data
    std::vector<HyperparamSpec> specs;        // empty -> learner defaults
    std::vector<std::string> strategies = {"sh"};  // uniform | sh | sr
    std::uint64_t budget = 0;
    std::size_t doublings = 0;                // >0 switches to the doubling wrapper
    bool warm_start = false;
    std::uint64_t trials = 1;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;                  // 0 -> hardware concurrency
    std::string out_path;                     // empty -> stdout
    ResultFormat format = ResultFormat::Csv;
    bool grid = false;
    bool timing = false;  // measured wall_ms breaks byte-for-byte reruns; default off
};

// Learner defaults matching the experiment families: lambda on a log scale
// for ridge and pegasos (plus gamma), and (d, lambda, sigma) for matcomp.
std::vector<HyperparamSpec> default_specs(const std::string& learner);

// Runs every (trial, strategy) pair and returns the records, sorted order
// being fixed at emission. Trials run on up to `workers` threads; results
// are independent of the worker count.
std::vector<ResultRecord> run_tune(const ExperimentConfig& config);

// run_tune + emit to config.out_path (or stdout) with the resolved config
// embedded as a header comment.
void run_tune_and_emit(const ExperimentConfig& config);

std::string describe_config(const ExperimentConfig& config);

struct SynthRequest {
    std::string kind;  // regression | classification | lowrank | adversarial
    std::size_t n_examples = 200;
    std::size_t n_dims = 5;
    double noise = 0.1;
    double separation = 3.0;  // classification blob gap
    std::size_t users = 30;
    std::size_t items = 30;
    std::size_t rank = 2;
    double density = 0.3;
    std::size_t n_arms = 3;     // adversarial
    std::uint64_t horizon = 64;  // adversarial sequence files
    std::uint64_t seed = 0;
    std::string destination;  // directory for adversarial, file otherwise
};

// Writes the requested synthetic artifact(s); returns the paths written.
std::vector<std::string> run_synth(const SynthRequest& req);

}  // namespace halving

#endif
