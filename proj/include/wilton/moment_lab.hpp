#pragma once

#include "wilton/wilton.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace wilton {

enum class Measure { lebesgue, gauss };

std::string to_string(Measure m);

/// Gauss measure m(E) = (1/log 2) int_E dx / (1 + x).
struct GaussMeasure {
    static double density(double x) noexcept;
    /// m((a, b)); throws std::invalid_argument unless 0 <= a < b <= 1.
    static double interval(double a, double b);
};

struct LogReciprocal {};
struct TruncatedWiltonRef {
    int n = 24;
};
struct GSeriesRef {
    GSeriesSpec spec;
};
struct WiltonRef {
    double tol = 1e-12;
};

using IntegrandRef = std::variant<LogReciprocal, TruncatedWiltonRef, GSeriesRef, WiltonRef>;

/// Short label used in reports, e.g. "l", "L(n=24)".
std::string integrand_label(const IntegrandRef& f);

/// Throws std::invalid_argument when the integrand parameters are invalid.
void validate(const IntegrandRef& f);

/// Mixture of x = e^{-u} (left), x = 1 - e^{-u} (right), u ~ Gamma(shape, 1),
/// and uniform x. The left component has density l(x)^{shape-1} / Gamma(shape).
struct ProposalMix {
    double w_left = 0.4;
    double w_right = 0.4;
    double w_uniform = 0.2;
    int shape = 3;

    static ProposalMix standard(int k) { return {0.4, 0.4, 0.2, 2 * k + 1}; }
    static ProposalMix uniform() { return {0.0, 0.0, 1.0, 1}; }
    static ProposalMix left_endpoint(int k) { return {1.0, 0.0, 0.0, 2 * k + 1}; }

    /// Throws std::invalid_argument on negative weights, a sum away from 1,
    /// or shape < 1.
    void validate() const;

    /// Proposal density at a point with l(x) = lx and l(1 - x) = l1x.
    double density(double lx, double l1x) const;
};

struct MomentEstimate {
    std::string integrand;
    int k = 0;
    Measure measure = Measure::lebesgue;
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double ratio_to_2gamma = 0.0;  // value / (2 Gamma(2k + 1))
    std::uint64_t rejected = 0;    // non-finite integrand hits, counted as 0
    bool rejection_warning = false;
};

struct MomentConfig {
    Measure measure = Measure::lebesgue;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    int bits = 256;
    double w_left = 0.4;
    double w_right = 0.4;
    double w_uniform = 0.2;

    ProposalMix proposal(int k) const { return {w_left, w_right, w_uniform, 2 * k + 1}; }
};

struct ExceptionalSetSpec {
    int d = 0;
    int h = 1;
    double u = 1.0;
    double v = 1.0;
};

struct ExceptionalResult {
    ExceptionalSetSpec spec;
    double empirical = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool holds = false;  // empirical <= bound + 5 std_error
};

struct ContractionResult {
    double p = 0.0;
    int n = 0;
    double lhs = 0.0;
    double lhs_error = 0.0;
    double rhs = 0.0;
    double rhs_error = 0.0;
    double multiplier = 0.0;  // ((sqrt 5 - 1) / 2)^{(n-1) p}
    bool holds = false;
};

/// Gamma(L + 1) = L! from the exact integer factorial, L <= 170.
/// Throws std::overflow_error beyond 170 and std::invalid_argument below 0.
double gamma_int(int L);

/// int_{x0}^1 log(1/x)^L dx = lower incomplete gamma(L + 1, log(1/x0)).
double tail_log_moment(double x0, int L);

/// log((1 + b) / (1 + a)) / log 2.
double measure_interval(double a, double b);

/// |m((a, b)) - sum_{n <= cutoff} m((1/(n+b), 1/(n+a))) - tail| where the
/// branches n > cutoff telescope to log((cutoff+1+b)/(cutoff+1+a)) / log 2.
double invariance_residual(double a, double b, long branch_cutoff);

/// Importance-sampled int f(x)^{2k} dmu. Sample i is drawn from
/// CounterRng(seed, i) at the given bit depth.
MomentEstimate moment_estimate(const IntegrandRef& f, int k, Measure measure, std::uint64_t samples,
                               std::uint64_t seed, const ProposalMix& proposal, int bits = 256);

/// Per-sample weighted integrand f^{2k} w / q (NaN for rejected samples).
std::vector<double> weighted_samples(const IntegrandRef& f, int k, Measure measure, std::uint64_t samples,
                                     std::uint64_t seed, const ProposalMix& proposal, int bits = 256);

/// One estimate per k; every k reuses the same (seed, index) streams.
std::vector<MomentEstimate> moment_table(const IntegrandRef& f, const std::vector<int>& ks,
                                         const MomentConfig& config);

/// Gauss-measure estimates of int |T^n l|^p dm against g^{(n-1)p} int l^p dm
/// on common samples.
ContractionResult contraction_check(double p, int n, std::uint64_t samples, std::uint64_t seed,
                                    int bits = 256);

/// 2 exp(-2^{(h-2)/2} v exp(2^{(d-2)/2} u)).
double exceptional_bound(const ExceptionalSetSpec& spec);

ExceptionalResult exceptional_measure(const ExceptionalSetSpec& spec, std::uint64_t samples,
                                      std::uint64_t seed, int bits = 256);

/// Several sets judged on one shared sample.
std::vector<ExceptionalResult> exceptional_measure_grid(const std::vector<ExceptionalSetSpec>& specs,
                                                        std::uint64_t samples, std::uint64_t seed,
                                                        int bits = 256);

}  // namespace wilton
