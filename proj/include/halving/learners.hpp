#ifndef HALVING_LEARNERS_HPP
#define HALVING_LEARNERS_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "halving/arm.hpp"

namespace halving {

struct Dataset {
    std::vector<std::vector<double>> features;  // rows = examples
    std::vector<double> labels;                 // real, or +-1 for classification

    std::size_t size() const { return features.size(); }
    std::size_t dims() const { return features.empty() ? 0 : features[0].size(); }
};

// Per-dimension statistics fit on the training split only.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> stddev;
    bool normalize_labels = false;
    double label_mean = 0.0;
    double label_stddev = 1.0;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

// 90/10 test split of the total, then 80/20 train/val of the remainder.
Split make_split(std::size_t n_examples, std::uint64_t seed);

Normalization fit_normalization(const Dataset& data, const std::vector<std::size_t>& train,
                                bool normalize_labels = false);
void apply_normalization(Dataset& data, const Normalization& norm);

struct HyperparamSpec {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;
    std::size_t samples = 1;
};

// One config is a value per spec; configs are the Cartesian product of the
// per-spec draws (random mode) or grids (grid mode).
std::vector<std::vector<double>> sample_configs(const std::vector<HyperparamSpec>& specs,
                                                bool grid, std::uint64_t seed);

// Ridge regression trained by SGD, one example per pull, step .01/sqrt(2+t).
// Evaluation is validation MSE.
class RidgeSgdArm : public ArmProcess {
public:
    RidgeSgdArm(ArmId id, const Dataset& data, const Split& split, double lambda,
                std::uint64_t global_seed);

    const std::vector<double>& weights() const { return w_; }
    double lambda() const { return lambda_; }

protected:
    void do_advance() override;
    double do_loss() const override;
    void do_reset() override;

private:
    std::size_t next_example();

    const Dataset* data_;
    const Split* split_;
    double lambda_;
    std::uint64_t global_seed_;
    std::vector<double> w_;
    std::vector<std::size_t> order_;
    std::size_t order_pos_ = 0;
    std::uint64_t epoch_ = 0;
};

// Kernel SVM trained with Pegasos on the RBF kernel, kernel values computed
// on demand. Evaluation is validation 0/1 loss.
class PegasosRbfArm : public ArmProcess {
public:
    PegasosRbfArm(ArmId id, const Dataset& data, const Split& split, double lambda,
                  double gamma, std::uint64_t global_seed);

    double decision(const std::vector<double>& x) const;

protected:
    void do_advance() override;
    double do_loss() const override;
    void do_reset() override;

private:
    std::size_t next_example();

    const Dataset* data_;
    const Split* split_;
    double lambda_;
    double gamma_;
    std::uint64_t global_seed_;
    std::vector<std::uint32_t> alpha_;  // per training example
    std::vector<std::size_t> order_;
    std::size_t order_pos_ = 0;
    std::uint64_t epoch_ = 0;
};

double rbf_kernel(const std::vector<double>& x, const std::vector<double>& z, double gamma);

struct Rating {
    std::size_t user = 0;
    std::size_t item = 0;
    double value = 0.0;
};

struct RatingsData {
    std::vector<Rating> ratings;
    std::size_t n_users = 0;
    std::size_t n_items = 0;
};

// Bi-convex matrix completion by SGD; one pull processes a fixed-size
// shuffled block of training ratings. Factors start N(0, sigma^2/d).
// Step schedule (frozen here): eta_t = 0.05 / (1 + 0.005 t) at pull t.
class MatCompArm : public ArmProcess {
public:
    static constexpr std::size_t kBlockSize = 64;

    MatCompArm(ArmId id, const RatingsData& data, const Split& split, std::size_t rank,
               double lambda, double sigma, std::uint64_t global_seed);

    double predict(std::size_t user, std::size_t item) const;

protected:
    void do_advance() override;
    double do_loss() const override;
    void do_reset() override;

private:
    void init_factors();
    std::size_t next_rating();

    const RatingsData* data_;
    const Split* split_;
    std::size_t rank_;
    double lambda_;
    double sigma_;
    std::uint64_t global_seed_;
    std::vector<std::vector<double>> user_factors_;
    std::vector<std::vector<double>> item_factors_;
    std::vector<std::size_t> order_;
    std::size_t order_pos_ = 0;
    std::uint64_t epoch_ = 0;
    std::uint64_t sgd_steps_ = 0;
};

// Per-example ridge objective and its analytic gradient, the pair checked
// against finite differences in the tests.
double ridge_point_loss(const std::vector<double>& w, const std::vector<double>& x, double y,
                        double lambda);
std::vector<double> ridge_point_grad(const std::vector<double>& w, const std::vector<double>& x,
                                     double y, double lambda);

}  // namespace halving

#endif
