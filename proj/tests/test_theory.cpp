#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "halving/strategies.hpp"
#include "halving/theory.hpp"
#include "halving/verify.hpp"

using namespace halving;

namespace {

Envelope one_over_t() {
    return Envelope::closed_form("1/t", [](std::uint64_t t) { return 1.0 / static_cast<double>(t); });
}

Envelope zero_envelope() {
    return Envelope::closed_form("zero", [](std::uint64_t) { return 0.0; });
}

}  // namespace

TEST_CASE("envelope_of keeps already non-increasing sequences") {
    std::vector<double> losses;
    for (int t = 1; t <= 8; ++t) losses.push_back(1.0 / t);
    Envelope env = envelope_of(losses, 0.0);
    for (std::uint64_t t = 1; t <= 8; ++t) CHECK(env.value(t) == doctest::Approx(1.0 / t));
}

TEST_CASE("envelope_of is the suffix maximum of deviations") {
    Envelope env = envelope_of({0.5, 0.9, 0.2}, 0.2);
    CHECK(env.value(1) == doctest::Approx(0.7));
    CHECK(env.value(2) == doctest::Approx(0.7));
    CHECK(env.value(3) == doctest::Approx(0.0));
    CHECK(env.value(10) == doctest::Approx(0.0));  // clamped past the horizon
}

TEST_CASE("envelope_of a constant sequence is zero") {
    Envelope env = envelope_of({0.3, 0.3, 0.3}, 0.3);
    for (std::uint64_t t = 1; t <= 3; ++t) CHECK(env.value(t) == 0.0);
    CHECK(*env.inverse(0.5) == 1);
}

TEST_CASE("envelope minimality against a brute-force oracle") {
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int iter = 0; iter < 50; ++iter) {
        std::size_t len = 2 + rng() % 12;
        double nu = unif(rng);
        std::vector<double> losses(len);
        for (auto& v : losses) v = unif(rng);
        Envelope env = envelope_of(losses, nu);
        for (std::size_t t = 1; t <= len; ++t) {
            double suffix = 0.0;
            for (std::size_t s = t; s <= len; ++s) {
                suffix = std::max(suffix, std::fabs(losses[s - 1] - nu));
            }
            // equality = any smaller value at t would fail to dominate some s >= t
            CHECK(env.value(t) == doctest::Approx(suffix));
        }
    }
}

TEST_CASE("envelope inverse scan oracles") {
    Envelope env = one_over_t();
    CHECK(*env.inverse(0.25) == 4);
    CHECK(*env.inverse(0.3) == 4);  // 1/3 > 0.3 but 1/4 <= 0.3
    CHECK(*env.inverse(2.0) == 1);
    CHECK(*zero_envelope().inverse(0.1) == 1);
    CHECK_THROWS_AS(env.inverse(0.0), std::invalid_argument);
    CHECK_THROWS_AS(env.inverse(-1.0), std::invalid_argument);
}

TEST_CASE("empirical inverse distinguishes beyond-horizon") {
    Envelope env = Envelope::empirical({0.5, 0.4, 0.3});
    CHECK(*env.inverse(0.45) == 2);
    CHECK(*env.inverse(0.3) == 3);
    CHECK(!env.inverse(0.2).has_value());
}

TEST_CASE("inverse consistency over random closed forms") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int iter = 0; iter < 100; ++iter) {
        double c = 0.2 + 2.0 * unif(rng);
        double p = 0.5 + 1.5 * unif(rng);
        Envelope env = Envelope::closed_form(
            "c/t^p", [c, p](std::uint64_t t) { return c / std::pow(static_cast<double>(t), p); });
        double alpha = 0.01 + unif(rng);
        std::uint64_t t = *env.inverse(alpha);
        CHECK(env.value(t) <= alpha);
        if (t > 1) CHECK(env.value(t - 1) > alpha);
    }
}

TEST_CASE("non-monotone closed forms are rejected") {
    CHECK_THROWS_AS(Envelope::closed_form("t", [](std::uint64_t t) { return double(t); }),
                    std::invalid_argument);
    CHECK_THROWS_AS(Envelope::closed_form("neg", [](std::uint64_t) { return -1.0; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(Envelope::empirical({0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("sh_sufficient_budget hand oracle") {
    LimitProfile profile({0.0, 0.4, 0.8});
    ShBudgetBounds b = sh_sufficient_budget(profile, one_over_t());
    // ginv(0.2) = 5, ginv(0.4) = 3: max form 2*2*max(2*6, 3*4) = 48
    CHECK(b.max_form.z == 48);
    // sum form duplicates the closest competitor: 2*2*(3 + 5 + (5 + 3)) = 64
    CHECK(b.sum_form.z == 64);
    CHECK(b.max_form.z <= b.sum_form.z);
    CHECK(static_cast<double>(b.sum_form.z) <=
          std::log2(2.0 * 3.0) * static_cast<double>(b.max_form.z));
}

TEST_CASE("zero envelope gives the floor budget and SH respects it") {
    LimitProfile profile({0.0, 0.4, 0.8});
    ShBudgetBounds b = sh_sufficient_budget(profile, zero_envelope());
    CHECK(b.max_form.z == 24);  // 2*2*max_i i*(1+1) = 2*2*6

    std::vector<std::unique_ptr<ArmProcess>> arms;
    for (std::size_t i = 0; i < 3; ++i) {
        double v = profile.nus[i];
        arms.push_back(std::make_unique<ClosedFormArm>(ArmId{i}, [v](std::uint64_t) { return v; }));
    }
    CHECK(successive_halving(arms, Budget{b.max_form.z + 1}).winner.index == 0);
}

TEST_CASE("uniform_sufficient_budget oracle") {
    LimitProfile profile({0.0, 0.6});
    CHECK(uniform_sufficient_budget(profile, one_over_t()).z == 8);
    CHECK(uniform_sufficient_budget(profile, zero_envelope()).z == 2);
}

TEST_CASE("beyond-horizon inverses surface as a dedicated error") {
    LimitProfile profile({0.0, 0.1});
    Envelope env = Envelope::empirical({0.5, 0.4});
    CHECK_THROWS_AS(sh_sufficient_budget(profile, env), EnvelopeBeyondHorizon);
    CHECK_THROWS_AS(uniform_sufficient_budget(profile, env), EnvelopeBeyondHorizon);
}

TEST_CASE("representation inequality over random profiles") {
    for (std::uint64_t k = 0; k < 200; ++k) {
        TheoryInstance inst = generate_instance(k * 17 + 3, 2, 32);
        ShBudgetBounds b = sh_sufficient_budget(inst.profile, inst.gbar);
        CHECK(b.max_form.z <= b.sum_form.z);
        double cap = std::log2(2.0 * static_cast<double>(inst.profile.n())) *
                     static_cast<double>(b.max_form.z);
        CHECK(static_cast<double>(b.sum_form.z) <= cap * (1.0 + 1e-12));
    }
}

TEST_CASE("adversarial instance matches the closed forms") {
    LimitProfile profile({0.0, 0.6});
    BetaFunction beta{"1/t", [](std::uint64_t t) { return 1.0 / static_cast<double>(t); }};
    auto arms = adversarial_instance(profile, beta);
    CostLedger ledger;
    pull_by(*arms[0], ledger, 4);
    pull_by(*arms[1], ledger, 4);
    CHECK(evaluate(*arms[0], ledger) == doctest::Approx(0.25));
    CHECK(evaluate(*arms[1], ledger) == doctest::Approx(0.35));
}

TEST_CASE("adversarial construction rejects bad inputs") {
    CHECK_THROWS_AS(LimitProfile({0.3, 0.3}), std::invalid_argument);  // no strict gap
    LimitProfile profile({0.0, 0.5});
    BetaFunction flat{"flat", [](std::uint64_t) { return 0.5; }};
    CHECK_THROWS_AS(adversarial_instance(profile, flat), std::invalid_argument);
}

TEST_CASE("geometric beta boundary at B = 2n") {
    LimitProfile profile({0.0, 0.5});
    BetaFunction beta{"2^-t", [](std::uint64_t t) { return std::pow(2.0, -static_cast<double>(t)); }};
    Envelope gbar = Envelope::closed_form(beta.name, beta.fn);
    CHECK(*gbar.inverse(0.25) == 2);
    CHECK(uniform_sufficient_budget(profile, gbar).z == 4);

    auto arms = adversarial_instance(profile, beta);
    CHECK(uniform_allocation(arms, Budget{4}).winner.index == 0);
}

TEST_CASE("suboptimality bound oracles") {
    CHECK(sh_suboptimality_bound(16, 4, one_over_t()) == doctest::Approx(2.0));
    CHECK(uniform_suboptimality_bound(8, 2, one_over_t()) == doctest::Approx(0.5));
    CHECK(sh_suboptimality_bound(16, 4, zero_envelope()) == 0.0);
    CHECK(uniform_suboptimality_bound(8, 2, zero_envelope()) == 0.0);
    CHECK_THROWS_AS(sh_suboptimality_bound(7, 4, one_over_t()), std::invalid_argument);
    CHECK_THROWS_AS(uniform_suboptimality_bound(1, 2, one_over_t()), std::invalid_argument);
}

TEST_CASE("adversarial boundary run satisfies the suboptimality bound") {
    LimitProfile profile({0.0, 0.6});
    BetaFunction beta{"1/t", [](std::uint64_t t) { return 1.0 / static_cast<double>(t); }};
    auto arms = adversarial_instance(profile, beta);
    StrategyResult r = uniform_allocation(arms, Budget{8});
    double gap = profile.nus[r.winner.index] - profile.nus[0];
    CHECK(gap == 0.0);
    CHECK(gap <= uniform_suboptimality_bound(8, 2, one_over_t()));
}

TEST_CASE("SH bound scales like n/B for power-law envelopes") {
    const std::size_t n = 8;
    const double log_n = 3.0;
    for (std::uint64_t budget : {24ULL, 48ULL, 96ULL, 192ULL, 384ULL, 768ULL}) {
        double bound = sh_suboptimality_bound(budget, n, one_over_t());
        // 2*L*gamma(floor(B/(nL))) <= 4*L^2*n/B up to the floor's factor of 2
        CHECK(bound <= 4.0 * log_n * log_n * static_cast<double>(n) /
                           static_cast<double>(budget) + 1e-12);
    }
}

TEST_CASE("sgd envelope values and clamping") {
    Envelope env = sgd_envelope(1.0, 10, 0.1);
    CHECK(env.value(100) == doctest::Approx(std::log(1e4) / 100.0));
    CHECK(env.value(100) == doctest::Approx(0.0921034).epsilon(1e-4));
    // non-increasing, including the clamped head
    double prev = env.value(1);
    for (std::uint64_t t = 2; t <= 64; ++t) {
        CHECK(env.value(t) <= prev + 1e-15);
        prev = env.value(t);
    }
    CHECK(env.value(100000) < env.value(100));  // monotone tail toward 0
    CHECK_THROWS_AS(sgd_envelope(0.0, 10, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(sgd_envelope(1.0, 10, 1.5), std::invalid_argument);
}

TEST_CASE("SGD envelope budget matches its closed-form expression up to integer slack") {
    const std::size_t n = 16;
    const double sigma_max = 1.0;
    const double delta = 0.1;
    std::vector<double> nus(n);
    for (std::size_t a = 1; a <= n; ++a) nus[a - 1] = static_cast<double>(a) / n;
    LimitProfile profile(nus);
    Envelope gbar = sgd_envelope(sigma_max, n, delta);

    double stated = 8.0 * n * std::ceil(std::log2(static_cast<double>(n))) * sigma_max *
                    std::log(static_cast<double>(n) * n * sigma_max / delta);
    double computed = static_cast<double>(sh_sufficient_budget(profile, gbar).max_form.z);
    CHECK(computed >= stated / 4.0);
    CHECK(computed <= stated * 4.0);
}

TEST_CASE("uniform-vs-SH budget ratio grows with n") {
    auto ratio_at = [](std::size_t n) {
        std::vector<double> nus(n);
        for (std::size_t a = 1; a <= n; ++a) nus[a - 1] = static_cast<double>(a) / n;
        LimitProfile profile(nus);
        Envelope gbar = sgd_envelope(1.0, n, 0.1);
        double z_sh = static_cast<double>(sh_sufficient_budget(profile, gbar).max_form.z);
        double z_u = static_cast<double>(uniform_sufficient_budget(profile, gbar).z);
        return z_u / z_sh;
    };
    CHECK(ratio_at(64) > 2.0 * ratio_at(8));
}

TEST_CASE("separation lemma suite has no counterexamples") {
    SuiteReport r = verify_separation(200, 1234);
    CHECK(r.checked >= 200);
    CHECK(r.failures == 0);
}

TEST_CASE("theorem property suites are clean on a smoke sample") {
    CHECK(verify_sh_guarantee(50, 42).failures == 0);
    CHECK(verify_uniform_guarantee(50, 42).failures == 0);
    CHECK(verify_uniform_sharpness(50, 42).failures == 0);
    CHECK(verify_suboptimality_bounds(50, 42).failures == 0);
}

TEST_CASE("verify reports serialize counterexample-free JSON") {
    SuiteReport r = verify_sh_guarantee(5, 9);
    std::string json = report_to_json({r});
    CHECK(json.find("t1_sh_guarantee") != std::string::npos);
    CHECK(json.find("\"passed\": true") != std::string::npos);
}
