#pragma once

#include "wilton/cf_engine.hpp"

#include <cstdint>
#include <vector>

namespace wilton {

struct WiltonValue {
    double value = 0.0;
    int terms_used = 0;
    double tail_estimate = 0.0;  // heuristic size of the omitted remainder
};

struct TruncationSpec {
    int n = 24;
};

struct GSeriesSpec {
    long N = 100000;
    bool average_pair = false;  // mean of the N- and 2N-term partial sums
};

struct GSeriesValue {
    double value = 0.0;
    bool resonant = false;  // some l*x in the summation range is an integer
};

/// Gauss-measure mean of log(1/x), pi^2 / (12 log 2).
inline constexpr double kGaussMeanLog = 1.1865691104156254;

/// gamma_0 ... gamma_K with gamma_k = beta_{k-1} * l(alpha_k), beta_{-1} = 1.
std::vector<double> gamma_terms(const OrbitTrace& orbit);

/// (T^nu l)(x) = beta_{nu-1} * l(alpha_nu); 0 once the orbit has terminated.
/// Throws std::invalid_argument for nu < 0 and std::out_of_range when the
/// trace stops short of nu without terminating.
double transfer_pow_l(const OrbitTrace& orbit, int nu);

/// L(x, n) = sum_{nu <= n} (-1)^nu (T^nu l)(x).
double truncated_wilton(const OrbitTrace& orbit, TruncationSpec spec);

/// sum_{k <= last} (-1)^k gamma_k, clipped to the available iterates.
double wilton_partial(const OrbitTrace& orbit, int last);

/// Wilton's function, summed until gamma_K < tol and beta_K < tol.
/// Terminated orbits are summed in full with a zero tail.
WiltonValue wilton_eval(const OrbitTrace& orbit, double tol);

/// |W(x) - l(x) + x W(alpha(x))| from independent orbits of x and alpha(x),
/// summed through index depth and depth - 1.
double functional_eq_residual(const ExactPoint& x, int depth);

/// |L(x, n) - W(x) + (-1)^{n+1} beta_n W(alpha_{n+1}(x))|.
double eq3_residual(const ExactPoint& x, int n, int depth);

/// Partial sums of g(x) = sum_{l >= 1} (1 - 2{lx}) / l with {lx} exact.
///
/// Keeps a reciprocal table for the longest sum it serves; share one
/// evaluator across threads (evaluate() is const).
class GSeriesEvaluator {
public:
    explicit GSeriesEvaluator(GSeriesSpec spec);

    GSeriesValue evaluate(const ExactPoint& x) const;

    const GSeriesSpec& spec() const noexcept { return spec_; }

private:
    // sum_{l <= terms} {lx} / l for every requested prefix length
    void frac_sums(const ExactPoint& x, double* out) const;

    GSeriesSpec spec_;
    long terms_ = 0;
    std::vector<double> inv_;          // inv_[l] = 1 / l
    std::vector<double> harmonic_at_;  // H_N (and H_2N when averaging)
};

GSeriesValue g_series(const ExactPoint& x, GSeriesSpec spec);

/// g_N(x) - L(x, n): samples H(x) plus truncation noise.
double g_minus_wilton(const ExactPoint& x, GSeriesSpec gspec, int n);

}  // namespace wilton
