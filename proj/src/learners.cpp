#include "halving/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace halving {
namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 step over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

Split make_split(std::size_t n_examples, std::uint64_t seed) {
    if (n_examples < 10) throw std::invalid_argument("make_split needs at least 10 examples");
    std::vector<std::size_t> order = seeded_permutation(n_examples, seed);

    auto n_test = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(n_examples)));
    std::size_t rest = n_examples - n_test;
    auto n_val = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(rest)));

    Split s;
    s.test.assign(order.begin(), order.begin() + n_test);
    s.val.assign(order.begin() + n_test, order.begin() + n_test + n_val);
    s.train.assign(order.begin() + n_test + n_val, order.end());
    return s;
}

Normalization fit_normalization(const Dataset& data, const std::vector<std::size_t>& train,
                                bool normalize_labels) {
    if (train.empty()) throw std::invalid_argument("empty training split");
    std::size_t d = data.dims();
    Normalization norm;
    norm.mean.assign(d, 0.0);
    norm.stddev.assign(d, 0.0);
    const double m = static_cast<double>(train.size());

    for (std::size_t idx : train) {
        for (std::size_t j = 0; j < d; ++j) norm.mean[j] += data.features[idx][j];
    }
    for (std::size_t j = 0; j < d; ++j) norm.mean[j] /= m;
    for (std::size_t idx : train) {
        for (std::size_t j = 0; j < d; ++j) {
            double c = data.features[idx][j] - norm.mean[j];
            norm.stddev[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        norm.stddev[j] = std::sqrt(norm.stddev[j] / m);
        if (norm.stddev[j] == 0.0) norm.stddev[j] = 1.0;  // constant dimension
    }

    norm.normalize_labels = normalize_labels;
    if (normalize_labels) {
        double mu = 0.0;
        for (std::size_t idx : train) mu += data.labels[idx];
        mu /= m;
        double var = 0.0;
        for (std::size_t idx : train) {
            double c = data.labels[idx] - mu;
            var += c * c;
        }
        norm.label_mean = mu;
        norm.label_stddev = std::sqrt(var / m);
        if (norm.label_stddev == 0.0) norm.label_stddev = 1.0;
    }
    return norm;
}

void apply_normalization(Dataset& data, const Normalization& norm) {
    for (auto& row : data.features) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = (row[j] - norm.mean[j]) / norm.stddev[j];
        }
    }
    if (norm.normalize_labels) {
        for (auto& y : data.labels) y = (y - norm.label_mean) / norm.label_stddev;
    }
}

std::vector<std::vector<double>> sample_configs(const std::vector<HyperparamSpec>& specs,
                                                bool grid, std::uint64_t seed) {
    if (specs.empty()) throw std::invalid_argument("no hyperparameter specs");
    std::vector<std::vector<double>> per_spec;
    per_spec.reserve(specs.size());

    for (std::size_t s = 0; s < specs.size(); ++s) {
        const auto& spec = specs[s];
        if (!(spec.lo < spec.hi)) throw std::invalid_argument("spec '" + spec.name + "': lo >= hi");
        if (spec.log_scale && spec.lo <= 0.0) {
            throw std::invalid_argument("spec '" + spec.name + "': log scale requires lo > 0");
        }
        if (spec.samples == 0) throw std::invalid_argument("spec '" + spec.name + "': 0 samples");

        double lo = spec.log_scale ? std::log(spec.lo) : spec.lo;
        double hi = spec.log_scale ? std::log(spec.hi) : spec.hi;
        std::vector<double> values;
        values.reserve(spec.samples);
        if (grid) {
            for (std::size_t i = 0; i < spec.samples; ++i) {
                double frac = spec.samples == 1
                                  ? 0.5
                                  : static_cast<double>(i) / static_cast<double>(spec.samples - 1);
                double v = lo + frac * (hi - lo);
                values.push_back(spec.log_scale ? std::exp(v) : v);
            }
        } else {
            std::mt19937_64 rng(mix(seed, s));
            std::uniform_real_distribution<double> dist(lo, hi);
            for (std::size_t i = 0; i < spec.samples; ++i) {
                double v = dist(rng);
                values.push_back(spec.log_scale ? std::exp(v) : v);
            }
        }
        per_spec.push_back(std::move(values));
    }

    // Cartesian product, first spec varying slowest
    std::vector<std::vector<double>> configs = {{}};
    for (const auto& values : per_spec) {
        std::vector<std::vector<double>> next;
        next.reserve(configs.size() * values.size());
        for (const auto& partial : configs) {
            for (double v : values) {
                auto c = partial;
                c.push_back(v);
                next.push_back(std::move(c));
            }
        }
        configs = std::move(next);
    }
    return configs;
}

// --- ridge ---

RidgeSgdArm::RidgeSgdArm(ArmId id, const Dataset& data, const Split& split, double lambda,
                         std::uint64_t global_seed)
    : ArmProcess(id),
      data_(&data),
      split_(&split),
      lambda_(lambda),
      global_seed_(global_seed),
      w_(data.dims(), 0.0) {
    if (split.train.empty() || split.val.empty()) throw std::invalid_argument("empty split");
}

std::size_t RidgeSgdArm::next_example() {
    if (order_pos_ == order_.size()) {
        order_ = seeded_permutation(split_->train.size(),
                                    mix(mix(global_seed_, id().index), epoch_));
        order_pos_ = 0;
        ++epoch_;
    }
    return split_->train[order_[order_pos_++]];
}

void RidgeSgdArm::do_advance() {
    std::size_t idx = next_example();
    const auto& x = data_->features[idx];
    double y = data_->labels[idx];
    double t = static_cast<double>(iteration_count() + 1);
    double eta = 0.01 / std::sqrt(2.0 + t);
    double err = dot(w_, x) - y;
    for (std::size_t j = 0; j < w_.size(); ++j) {
        w_[j] -= eta * (err * x[j] + lambda_ * w_[j]);
    }
}

double RidgeSgdArm::do_loss() const {
    double s = 0.0;
    for (std::size_t idx : split_->val) {
        double err = dot(w_, data_->features[idx]) - data_->labels[idx];
        s += err * err;
    }
    return s / static_cast<double>(split_->val.size());
}

void RidgeSgdArm::do_reset() {
    std::fill(w_.begin(), w_.end(), 0.0);
    order_.clear();
    order_pos_ = 0;
    epoch_ = 0;
}

// --- pegasos ---

double rbf_kernel(const std::vector<double>& x, const std::vector<double>& z, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double c = x[i] - z[i];
        d2 += c * c;
    }
    return std::exp(-gamma * d2);
}

PegasosRbfArm::PegasosRbfArm(ArmId id, const Dataset& data, const Split& split, double lambda,
                             double gamma, std::uint64_t global_seed)
    : ArmProcess(id),
      data_(&data),
      split_(&split),
      lambda_(lambda),
      gamma_(gamma),
      global_seed_(global_seed),
      alpha_(split.train.size(), 0) {
    if (lambda <= 0.0) throw std::invalid_argument("pegasos requires lambda > 0");
    if (split.train.empty() || split.val.empty()) throw std::invalid_argument("empty split");
}

std::size_t PegasosRbfArm::next_example() {
    if (order_pos_ == order_.size()) {
        order_ = seeded_permutation(split_->train.size(),
                                    mix(mix(global_seed_, id().index), epoch_));
        order_pos_ = 0;
        ++epoch_;
    }
    return order_[order_pos_++];  // position within the training split
}

double PegasosRbfArm::decision(const std::vector<double>& x) const {
    double t = static_cast<double>(std::max<std::uint64_t>(iteration_count(), 1));
    double f = 0.0;
    for (std::size_t j = 0; j < alpha_.size(); ++j) {
        if (alpha_[j] == 0) continue;
        std::size_t idx = split_->train[j];
        f += static_cast<double>(alpha_[j]) * data_->labels[idx] *
             rbf_kernel(data_->features[idx], x, gamma_);
    }
    return f / (lambda_ * t);
}

void PegasosRbfArm::do_advance() {
    std::size_t pos = next_example();
    std::size_t idx = split_->train[pos];
    double t = static_cast<double>(iteration_count() + 1);
    double f = 0.0;
    for (std::size_t j = 0; j < alpha_.size(); ++j) {
        if (alpha_[j] == 0) continue;
        std::size_t jdx = split_->train[j];
        f += static_cast<double>(alpha_[j]) * data_->labels[jdx] *
             rbf_kernel(data_->features[jdx], data_->features[idx], gamma_);
    }
    f /= lambda_ * t;
    if (data_->labels[idx] * f < 1.0) alpha_[pos] += 1;
}

double PegasosRbfArm::do_loss() const {
    std::size_t wrong = 0;
    for (std::size_t idx : split_->val) {
        double f = decision(data_->features[idx]);
        if (data_->labels[idx] * f <= 0.0) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(split_->val.size());
}

void PegasosRbfArm::do_reset() {
    std::fill(alpha_.begin(), alpha_.end(), 0);
    order_.clear();
    order_pos_ = 0;
    epoch_ = 0;
}

// --- matrix completion ---

MatCompArm::MatCompArm(ArmId id, const RatingsData& data, const Split& split, std::size_t rank,
                       double lambda, double sigma, std::uint64_t global_seed)
    : ArmProcess(id),
      data_(&data),
      split_(&split),
      rank_(rank),
      lambda_(lambda),
      sigma_(sigma),
      global_seed_(global_seed) {
    if (rank == 0) throw std::invalid_argument("rank must be positive");
    if (rank > std::min(data.n_users, data.n_items)) {
        throw std::invalid_argument("rank " + std::to_string(rank) +
                                    " exceeds min matrix dimension " +
                                    std::to_string(std::min(data.n_users, data.n_items)));
    }
    if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
    if (split.train.empty() || split.val.empty()) throw std::invalid_argument("empty split");
    init_factors();
}

void MatCompArm::init_factors() {
    std::mt19937_64 rng(mix(global_seed_, id().index));
    std::normal_distribution<double> dist(0.0, sigma_ / std::sqrt(static_cast<double>(rank_)));
    user_factors_.assign(data_->n_users, std::vector<double>(rank_));
    item_factors_.assign(data_->n_items, std::vector<double>(rank_));
    for (auto& row : user_factors_) {
        for (auto& v : row) v = dist(rng);
    }
    for (auto& row : item_factors_) {
        for (auto& v : row) v = dist(rng);
    }
}

std::size_t MatCompArm::next_rating() {
    if (order_pos_ == order_.size()) {
        order_ = seeded_permutation(split_->train.size(),
                                    mix(mix(global_seed_, id().index), epoch_));
        order_pos_ = 0;
        ++epoch_;
    }
    return split_->train[order_[order_pos_++]];
}

double MatCompArm::predict(std::size_t user, std::size_t item) const {
    return dot(user_factors_[user], item_factors_[item]);
}

void MatCompArm::do_advance() {
    std::size_t block = std::min(kBlockSize, split_->train.size());
    for (std::size_t b = 0; b < block; ++b) {
        const Rating& r = data_->ratings[next_rating()];
        ++sgd_steps_;
        double eta = 0.05 / (1.0 + 0.005 * static_cast<double>(sgd_steps_));
        auto& u = user_factors_[r.user];
        auto& v = item_factors_[r.item];
        double err = dot(u, v) - r.value;
        for (std::size_t j = 0; j < rank_; ++j) {
            double uj = u[j];
            u[j] -= eta * (err * v[j] + lambda_ * u[j]);
            v[j] -= eta * (err * uj + lambda_ * v[j]);
        }
    }
}

double MatCompArm::do_loss() const {
    double s = 0.0;
    for (std::size_t idx : split_->val) {
        const Rating& r = data_->ratings[idx];
        double err = predict(r.user, r.item) - r.value;
        s += err * err;
    }
    return s / static_cast<double>(split_->val.size());
}

void MatCompArm::do_reset() {
    init_factors();
    order_.clear();
    order_pos_ = 0;
    epoch_ = 0;
    sgd_steps_ = 0;
}

// --- gradient check hooks ---

double ridge_point_loss(const std::vector<double>& w, const std::vector<double>& x, double y,
                        double lambda) {
    double err = dot(w, x) - y;
    return 0.5 * err * err + 0.5 * lambda * dot(w, w);
}

std::vector<double> ridge_point_grad(const std::vector<double>& w, const std::vector<double>& x,
                                     double y, double lambda) {
    double err = dot(w, x) - y;
    std::vector<double> g(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) g[j] = err * x[j] + lambda * w[j];
    return g;
}

}  // namespace halving
