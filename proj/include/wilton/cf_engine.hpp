#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wilton {

struct GaussOrbit;

/// A rational in [0, 1) held exactly, in lowest terms.
class ExactPoint {
public:
    ExactPoint();  // canonical zero 0/1

    /// Reduces num/den. Throws std::invalid_argument unless 0 <= num < den.
    ExactPoint(mpz_class num, mpz_class den);

    /// Parses "p/q" (decimal). Throws std::invalid_argument on malformed input.
    static ExactPoint parse(std::string_view text);

    const mpz_class& numerator() const noexcept { return num_; }
    const mpz_class& denominator() const noexcept { return den_; }
    bool is_zero() const noexcept { return sgn(num_) == 0; }

    double value() const;
    std::string to_string() const;

    friend bool operator==(const ExactPoint& a, const ExactPoint& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

private:
    struct Unchecked {};
    ExactPoint(mpz_class num, mpz_class den, Unchecked) : num_(std::move(num)), den_(std::move(den)) {}
    friend ExactPoint gauss_map(const ExactPoint& x);
    friend GaussOrbit orbit(const ExactPoint& x, int n);
    friend ExactPoint sample_point(std::uint64_t seed, int bits, std::uint64_t stream);

    mpz_class num_;
    mpz_class den_;
};

struct Convergent {
    mpz_class p;
    mpz_class q;
};

struct CFExpansion {
    std::vector<mpz_class> quotients;     // a_1 ... a_m
    std::vector<Convergent> convergents;  // p_k / q_k, k = 1 ... m
};

/// Floating-point view of a Gauss orbit. Entry k describes alpha_k; entries
/// stop at the first zero iterate (terminated) or at the requested depth.
struct OrbitTrace {
    std::vector<double> logs;   // l(alpha_k) = log(1 / alpha_k)
    std::vector<double> betas;  // alpha_0 * ... * alpha_k
    int depth = 0;              // index of the last computed iterate
    bool terminated = false;    // alpha_depth == 0

    /// Number of nonzero iterates available.
    int live() const noexcept { return static_cast<int>(logs.size()); }
};

struct GaussOrbit : OrbitTrace {
    std::vector<ExactPoint> points;  // alpha_0 ... alpha_depth (last may be 0)
};

/// p / 2^bits with p odd, drawn from CounterRng(seed, stream).
/// Throws std::invalid_argument when bits < 1.
ExactPoint sample_point(std::uint64_t seed, int bits, std::uint64_t stream = 0);

/// {1/x}. Throws std::domain_error for x = 0.
ExactPoint gauss_map(const ExactPoint& x);

/// Canonical continued fraction of x in (0, 1), at most max_terms quotients.
CFExpansion cf_expand(const ExactPoint& x, int max_terms);

/// Folds quotients back into the rational [0; a_1, ..., a_m].
ExactPoint cf_fold(const std::vector<mpz_class>& quotients);

/// alpha_0 ... alpha_min(n, termination) with logs and cumulative products.
GaussOrbit orbit(const ExactPoint& x, int n);

/// log(p / q) for p, q >= 1 of any size, within 2 ulp.
/// Throws std::domain_error when p or q is not positive.
double log_of_rational(const mpz_class& p, const mpz_class& q);

/// p / q rounded to binary64 (relative error below 1 ulp), p >= 0, q >= 1.
double ratio_to_double(const mpz_class& p, const mpz_class& q);

/// Nearest binary64 to a nonnegative integer.
double to_double_rounded(const mpz_class& n);

/// {"x": "p/q", "quotients": [...], "alphas": ["p/q", ...]}
std::string orbit_to_json(const GaussOrbit& orbit);

/// Remainder-chain orbit evaluator with reusable big-integer storage.
///
/// For x = r_1 / r_0 the Euclidean remainders r_{k+2} = r_k mod r_{k+1}
/// give alpha_k = r_{k+1} / r_k and beta_k = r_{k+1} / r_0, so every orbit
/// quantity is a ratio of two exact integers. One tracer per thread.
class OrbitTracer {
public:
    /// Fills out with iterates 0 ... max_depth. When stop_tol > 0 the trace
    /// also ends at the first k with gamma_k < stop_tol and beta_k < stop_tol.
    void trace(const mpz_class& num, const mpz_class& den, int max_depth, OrbitTrace& out,
               double stop_tol = 0.0);

    /// Remainder r_k of the last trace (r_0 = denominator).
    const mpz_class& remainder(int k) const { return rems_[static_cast<std::size_t>(k)]; }

private:
    std::vector<mpz_class> rems_;
};

}  // namespace wilton
