#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wilton {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteOptions {
    std::uint64_t samples = 0;  // 0: per-check defaults
    std::uint64_t seed = 1;
    int bits = 256;
};

/// Names accepted by run_suite: cf, wilton, cotangent, measure, exceptional, all.
const std::vector<std::string>& suite_names();

/// Runs every invariant of the named suite. Throws std::invalid_argument for
/// an unknown suite name.
std::vector<CheckResult> run_suite(std::string_view suite, const SuiteOptions& options);

// Individual cf-engine property runs, shared with the acceptance suite.

/// Largest m checked is min(depth - 1, max_m); counts points violating
/// alpha_m alpha_{m+1} <= 1/2 in exact integer arithmetic.
std::uint64_t pair_bound_violations(std::uint64_t points, std::uint64_t seed, int bits, int max_m);

std::uint64_t determinant_violations(std::uint64_t points, std::uint64_t seed, int bits);
std::uint64_t reconstruction_failures(std::uint64_t points, std::uint64_t seed, int bits);
std::uint64_t quotient_mismatches(std::uint64_t points, std::uint64_t seed, int bits);

/// Fraction of points whose orbit runs deeper than min_depth before ending.
double depth_fraction_above(std::uint64_t points, std::uint64_t seed, int bits, int min_depth);

/// Largest functional-equation residual over random points at this depth.
double max_functional_eq_residual(std::uint64_t points, std::uint64_t seed, int bits, int depth);

/// Largest eq3 residual over random points and all n in [0, max_n].
double max_eq3_residual(std::uint64_t points, std::uint64_t seed, int bits, int max_n, int depth);

}  // namespace wilton
