#ifndef HALVING_DATA_IO_HPP
#define HALVING_DATA_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "halving/learners.hpp"

namespace halving {

// Dense delimited text, one example per row, label in the last column.
Dataset load_dense(std::istream& in, char delimiter = ',');
Dataset load_dense_file(const std::string& path, char delimiter = ',');

// Sparse "label index:value ..." rows with 1-based indices.
Dataset load_sparse(std::istream& in);
Dataset load_sparse_file(const std::string& path);

// y = X w* + noise, with w* and X standard normal under the seed.
Dataset synth_regression(std::size_t n_examples, std::size_t n_dims, double noise,
                         std::uint64_t seed);

// Two Gaussian blobs labeled -1/+1, separated by `separation` along each axis.
Dataset synth_classification(std::size_t n_examples, std::size_t n_dims, double separation,
                             std::uint64_t seed);

// Low-rank factor product plus noise, observed at the given density.
RatingsData synth_lowrank(std::size_t users, std::size_t items, std::size_t rank, double density,
                          double noise, std::uint64_t seed);

struct ResultRecord {
    std::uint64_t trial = 0;
    std::string strategy;
    std::uint64_t budget = 0;
    std::string winner;  // resolved winner config
    double test_loss = 0.0;
    std::uint64_t pulls = 0;
    std::uint64_t loss_observations = 0;
    std::uint64_t wall_ms = 0;
};

enum class ResultFormat { Csv, Json };

// Fixed header "trial,strategy,budget,winner,test_loss,pulls,loss_observations,wall_ms";
// records are written sorted by (strategy, trial).
void emit_results(std::vector<ResultRecord> records, ResultFormat format, std::ostream& out,
                  const std::string& config_comment = "");
void emit_results_file(std::vector<ResultRecord> records, ResultFormat format,
                       const std::string& path, const std::string& config_comment = "");

// Re-parse of the CSV form, for round-trip checks and external tooling.
std::vector<ResultRecord> parse_results_csv(std::istream& in);

}  // namespace halving

#endif
