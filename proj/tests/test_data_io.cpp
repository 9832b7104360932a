#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "halving/data_io.hpp"

using namespace halving;

namespace {

// tiny Gaussian-elimination solve for the least-squares normal equations
std::vector<double> solve_normal_equations(const Dataset& data) {
    std::size_t d = data.dims();
    std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < d; ++q) {
                a[p][q] += data.features[i][p] * data.features[i][q];
            }
            a[p][d] += data.features[i][p] * data.labels[i];
        }
    }
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= d; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> w(d);
    for (std::size_t j = 0; j < d; ++j) w[j] = a[j][d] / a[j][j];
    return w;
}

}  // namespace

TEST_CASE("load_dense parses rows with the label last") {
    std::istringstream in("1,2,0.5\n3,4,1.5\n5,6,2.5\n");
    Dataset d = load_dense(in);
    REQUIRE(d.size() == 3);
    REQUIRE(d.dims() == 2);
    CHECK(d.features[1][0] == 3.0);
    CHECK(d.features[2][1] == 6.0);
    CHECK(d.labels == std::vector<double>{0.5, 1.5, 2.5});
}

TEST_CASE("load_dense reports ragged rows by line number") {
    std::istringstream in("1,2,0.5\n3,1.5\n");
    try {
        load_dense(in);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_dense rejects empty input and skips comments") {
    std::istringstream empty("");
    try {
        load_dense(empty);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("no rows") != std::string::npos);
    }

    std::istringstream commented("# header comment\n1,2,0.5\n\n# trailing\n3,4,1.5\n");
    Dataset d = load_dense(commented);
    CHECK(d.size() == 2);
}

TEST_CASE("load_dense flags non-numeric cells") {
    std::istringstream in("1,abc,0.5\n");
    CHECK_THROWS_AS(load_dense(in), std::runtime_error);
}

TEST_CASE("load_sparse expands 1-based index:value pairs") {
    std::istringstream in("+1 1:0.5 3:2.0\n-1 2:1.0\n");
    Dataset d = load_sparse(in);
    REQUIRE(d.size() == 2);
    REQUIRE(d.dims() == 3);
    CHECK(d.features[0] == std::vector<double>{0.5, 0.0, 2.0});
    CHECK(d.features[1] == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(d.labels == std::vector<double>{1.0, -1.0});
}

TEST_CASE("load_sparse: bare label is an all-zero row") {
    std::istringstream in("+1 2:1.0\n-1\n");
    Dataset d = load_sparse(in);
    REQUIRE(d.size() == 2);
    CHECK(d.features[1] == std::vector<double>{0.0, 0.0});
}

TEST_CASE("load_sparse rejects duplicate and 0-based indices") {
    std::istringstream dup("+1 2:1.0 2:3.0\n");
    try {
        load_sparse(dup);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("duplicate index 2") != std::string::npos);
    }
    std::istringstream zero("+1 0:1.0\n");
    CHECK_THROWS_AS(load_sparse(zero), std::runtime_error);
    std::istringstream malformed("+1 2=1.0\n");
    CHECK_THROWS_AS(load_sparse(malformed), std::runtime_error);
}

TEST_CASE("noiseless synth_regression is exactly linear") {
    Dataset d = synth_regression(120, 4, 0.0, 2024);
    std::vector<double> w = solve_normal_equations(d);
    double mse = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < 4; ++j) pred += w[j] * d.features[i][j];
        double err = pred - d.labels[i];
        mse += err * err;
    }
    mse /= static_cast<double>(d.size());
    CHECK(mse <= 1e-10);
}

TEST_CASE("synth_classification labels are +-1 and blobs separate") {
    Dataset d = synth_classification(200, 3, 6.0, 5);
    std::size_t misclassified = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::fabs(d.labels[i]) == 1.0);
        double mean = (d.features[i][0] + d.features[i][1] + d.features[i][2]) / 3.0;
        if (mean * d.labels[i] <= 0.0) ++misclassified;
    }
    CHECK(misclassified < 5);  // separation 6 leaves ~0 overlap
}

TEST_CASE("synth_lowrank density and validation") {
    RatingsData full = synth_lowrank(8, 7, 2, 1.0, 0.0, 3);
    CHECK(full.ratings.size() == 56);
    CHECK(full.n_users == 8);
    CHECK(full.n_items == 7);

    RatingsData sparse = synth_lowrank(20, 20, 2, 0.3, 0.0, 3);
    CHECK(sparse.ratings.size() > 60);
    CHECK(sparse.ratings.size() < 180);

    CHECK_THROWS_AS(synth_lowrank(5, 5, 1, 0.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_lowrank(5, 5, 1, 1.5, 0.0, 1), std::invalid_argument);
}

TEST_CASE("emit_results writes the fixed header and sorted rows") {
    std::vector<ResultRecord> recs;
    recs.push_back({1, "uniform", 100, "lambda=0.1", 0.5, 100, 4, 0});
    recs.push_back({0, "uniform", 100, "lambda=0.2", 0.25, 100, 4, 0});
    recs.push_back({0, "sh", 100, "lambda=0.3", 0.125, 99, 7, 0});

    std::ostringstream out;
    emit_results(recs, ResultFormat::Csv, out, "run A");
    std::string text = out.str();
    CHECK(text.rfind("# run A\n", 0) == 0);
    CHECK(text.find("trial,strategy,budget,winner,test_loss,pulls,loss_observations,wall_ms\n") !=
          std::string::npos);
    // sh before uniform, then trials ascending
    CHECK(text.find("0,sh,") < text.find("0,uniform,"));
    CHECK(text.find("0,uniform,") < text.find("1,uniform,"));

    std::ostringstream empty;
    emit_results({}, ResultFormat::Csv, empty);
    CHECK(empty.str() ==
          "trial,strategy,budget,winner,test_loss,pulls,loss_observations,wall_ms\n");
}

TEST_CASE("emit_results is deterministic and round-trips through the parser") {
    std::vector<ResultRecord> recs;
    recs.push_back({3, "sr", 64, "lambda=1e-06;gamma=12.5", 0.1 + 0.2, 64, 6, 0});
    recs.push_back({1, "sh", 64, "lambda=0.001", 1.0 / 3.0, 60, 5, 0});

    std::ostringstream a, b;
    emit_results(recs, ResultFormat::Csv, a, "cfg");
    emit_results(recs, ResultFormat::Csv, b, "cfg");
    CHECK(a.str() == b.str());

    std::istringstream back(a.str());
    auto parsed = parse_results_csv(back);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].strategy == "sh");
    CHECK(parsed[0].trial == 1);
    CHECK(parsed[0].test_loss == 1.0 / 3.0);  // %.17g is exact for doubles
    CHECK(parsed[1].test_loss == 0.1 + 0.2);
    CHECK(parsed[1].winner == "lambda=1e-06;gamma=12.5");
    CHECK(parsed[1].pulls == 64);
}

TEST_CASE("emit_results JSON form carries the same records") {
    std::vector<ResultRecord> recs;
    recs.push_back({0, "uniform", 10, "lambda=0.5", 0.75, 10, 2, 0});
    std::ostringstream out;
    emit_results(recs, ResultFormat::Json, out, "cfg line");
    std::string text = out.str();
    CHECK(text.find("\"strategy\": \"uniform\"") != std::string::npos);
    CHECK(text.find("\"test_loss\": 0.75") != std::string::npos);
    CHECK(text.find("\"config\": \"cfg line\"") != std::string::npos);
}
