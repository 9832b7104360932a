#ifndef HALVING_VERIFY_HPP
#define HALVING_VERIFY_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "halving/arm.hpp"
#include "halving/theory.hpp"

namespace halving {

// A randomized problem instance with known limits and a known common
// envelope: arm 0 approaches nu_1 from above at the full envelope rate,
// every other arm approaches its limit from below at a per-arm fraction of
// the envelope. The shared gbar dominates every arm by construction.
struct TheoryInstance {
    LimitProfile profile;
    Envelope gbar;
    std::string family;          // power_law | exponential | staircase
    std::vector<double> scales;  // per-arm envelope fraction in (0,1], arm 0 = 1
    std::uint64_t seed = 0;

    // arms hold a pointer back to this instance; keep it alive while they run
    std::vector<std::unique_ptr<ArmProcess>> make_arms() const;
    double loss(std::size_t arm, std::uint64_t t) const;
};

// Deterministic generator over the frozen instance families.
TheoryInstance generate_instance(std::uint64_t seed, std::size_t min_arms = 2,
                                 std::size_t max_arms = 64);

struct Counterexample {
    std::uint64_t seed = 0;
    std::string detail;
};

struct SuiteReport {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    std::vector<Counterexample> counterexamples;
};

// Theorem-driven property suites. Each runs `instances` seeded instances
// derived from `seed` and reports pass/fail counts with full counterexamples.
SuiteReport verify_sh_guarantee(std::uint64_t instances, std::uint64_t seed);       // t1
SuiteReport verify_uniform_guarantee(std::uint64_t instances, std::uint64_t seed);  // t2
SuiteReport verify_uniform_sharpness(std::uint64_t instances, std::uint64_t seed);  // t3
SuiteReport verify_suboptimality_bounds(std::uint64_t instances, std::uint64_t seed);  // t4
SuiteReport verify_separation(std::uint64_t instances, std::uint64_t seed);

std::string report_to_json(const std::vector<SuiteReport>& reports);

}  // namespace halving

#endif
