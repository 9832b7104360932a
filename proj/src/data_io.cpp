#include "halving/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace halving {
namespace {

double parse_number(const std::string& cell, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": non-numeric cell '" +
                                 cell + "'");
    }
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, delim)) out.push_back(cell);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Dataset load_dense(std::istream& in, char delimiter) {
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dims = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, delimiter);
        if (cells.size() < 2) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": need at least one feature and a label");
        }
        if (dims == 0) {
            dims = cells.size() - 1;
        } else if (cells.size() - 1 != dims) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": ragged row (" +
                                     std::to_string(cells.size() - 1) + " features, expected " +
                                     std::to_string(dims) + ")");
        }
        std::vector<double> row(dims);
        for (std::size_t j = 0; j < dims; ++j) row[j] = parse_number(cells[j], line_no);
        data.features.push_back(std::move(row));
        data.labels.push_back(parse_number(cells.back(), line_no));
    }
    if (data.features.empty()) throw std::runtime_error("no rows");
    return data;
}

Dataset load_dense_file(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_dense(in, delimiter);
}

Dataset load_sparse(std::istream& in) {
    struct SparseRow {
        double label;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<SparseRow> rows;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        SparseRow row;
        row.label = parse_number(tok, line_no);
        std::set<std::size_t> seen;
        while (ls >> tok) {
            auto colon = tok.find(':');
            if (colon == std::string::npos) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": expected index:value, got '" + tok + "'");
            }
            auto idx = static_cast<std::size_t>(
                parse_number(tok.substr(0, colon), line_no));
            if (idx == 0) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": indices are 1-based");
            }
            if (!seen.insert(idx).second) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": duplicate index " + std::to_string(idx));
            }
            row.entries.emplace_back(idx, parse_number(tok.substr(colon + 1), line_no));
            max_index = std::max(max_index, idx);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("no rows");

    Dataset data;
    for (auto& row : rows) {
        std::vector<double> dense(max_index, 0.0);
        for (auto& [idx, v] : row.entries) dense[idx - 1] = v;
        data.features.push_back(std::move(dense));
        data.labels.push_back(row.label);
    }
    return data;
}

Dataset load_sparse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_sparse(in);
}

Dataset synth_regression(std::size_t n_examples, std::size_t n_dims, double noise,
                         std::uint64_t seed) {
    if (n_examples == 0 || n_dims == 0) throw std::invalid_argument("sizes must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> w_star(n_dims);
    for (auto& w : w_star) w = normal(rng);

    Dataset data;
    data.features.reserve(n_examples);
    data.labels.reserve(n_examples);
    for (std::size_t i = 0; i < n_examples; ++i) {
        std::vector<double> x(n_dims);
        double y = 0.0;
        for (std::size_t j = 0; j < n_dims; ++j) {
            x[j] = normal(rng);
            y += w_star[j] * x[j];
        }
        data.features.push_back(std::move(x));
        data.labels.push_back(y + noise * normal(rng));
    }
    return data;
}

Dataset synth_classification(std::size_t n_examples, std::size_t n_dims, double separation,
                             std::uint64_t seed) {
    if (n_examples == 0 || n_dims == 0) throw std::invalid_argument("sizes must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    Dataset data;
    for (std::size_t i = 0; i < n_examples; ++i) {
        double label = coin(rng) ? 1.0 : -1.0;
        std::vector<double> x(n_dims);
        for (auto& v : x) v = normal(rng) + label * separation / 2.0;
        data.features.push_back(std::move(x));
        data.labels.push_back(label);
    }
    return data;
}

RatingsData synth_lowrank(std::size_t users, std::size_t items, std::size_t rank, double density,
                          double noise, std::uint64_t seed) {
    if (users == 0 || items == 0 || rank == 0) throw std::invalid_argument("sizes must be positive");
    if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("density must be in (0,1]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<std::vector<double>> u(users, std::vector<double>(rank));
    std::vector<std::vector<double>> v(items, std::vector<double>(rank));
    for (auto& row : u) {
        for (auto& x : row) x = normal(rng);
    }
    for (auto& row : v) {
        for (auto& x : row) x = normal(rng);
    }

    RatingsData data;
    data.n_users = users;
    data.n_items = items;
    for (std::size_t i = 0; i < users; ++i) {
        for (std::size_t j = 0; j < items; ++j) {
            bool observed = density >= 1.0 || unif(rng) < density;
            if (!observed) continue;
            double val = 0.0;
            for (std::size_t k = 0; k < rank; ++k) val += u[i][k] * v[j][k];
            data.ratings.push_back({i, j, val + noise * normal(rng)});
        }
    }
    return data;
}

void emit_results(std::vector<ResultRecord> records, ResultFormat format, std::ostream& out,
                  const std::string& config_comment) {
    std::sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        if (a.strategy != b.strategy) return a.strategy < b.strategy;
        return a.trial < b.trial;
    });

    if (format == ResultFormat::Csv) {
        if (!config_comment.empty()) {
            std::istringstream lines(config_comment);
            std::string line;
            while (std::getline(lines, line)) out << "# " << line << '\n';
        }
        out << "trial,strategy,budget,winner,test_loss,pulls,loss_observations,wall_ms\n";
        for (const auto& r : records) {
            out << r.trial << ',' << r.strategy << ',' << r.budget << ',' << r.winner << ','
                << format_double(r.test_loss) << ',' << r.pulls << ',' << r.loss_observations
                << ',' << r.wall_ms << '\n';
        }
    } else {
        nlohmann::json j;
        if (!config_comment.empty()) j["config"] = config_comment;
        j["records"] = nlohmann::json::array();
        for (const auto& r : records) {
            j["records"].push_back({{"trial", r.trial},
                                    {"strategy", r.strategy},
                                    {"budget", r.budget},
                                    {"winner", r.winner},
                                    {"test_loss", r.test_loss},
                                    {"pulls", r.pulls},
                                    {"loss_observations", r.loss_observations},
                                    {"wall_ms", r.wall_ms}});
        }
        out << j.dump(2) << '\n';
    }
}

void emit_results_file(std::vector<ResultRecord> records, ResultFormat format,
                       const std::string& path, const std::string& config_comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    emit_results(std::move(records), format, out, config_comment);
}

std::vector<ResultRecord> parse_results_csv(std::istream& in) {
    std::vector<ResultRecord> records;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // fixed header, not validated field by field
            continue;
        }
        auto cells = split(line, ',');
        if (cells.size() != 8) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 8 columns");
        }
        ResultRecord r;
        r.trial = static_cast<std::uint64_t>(std::stoull(cells[0]));
        r.strategy = cells[1];
        r.budget = static_cast<std::uint64_t>(std::stoull(cells[2]));
        r.winner = cells[3];
        r.test_loss = parse_number(cells[4], line_no);
        r.pulls = static_cast<std::uint64_t>(std::stoull(cells[5]));
        r.loss_observations = static_cast<std::uint64_t>(std::stoull(cells[6]));
        r.wall_ms = static_cast<std::uint64_t>(std::stoull(cells[7]));
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace halving
