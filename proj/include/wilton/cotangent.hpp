#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace wilton {

struct CotangentWindow {
    double A0 = 0.51;
    double A1 = 0.99;
    bool full_interval = false;  // allow 0 < A0 < A1 < 1 instead of 1/2 < A0
};

struct CotangentMomentRun {
    std::int64_t b = 0;
    double A0 = 0.0;
    double A1 = 0.0;
    std::vector<int> ks;
    std::map<int, double> hk;
    std::int64_t count = 0;  // coprime r with A0 b <= r <= A1 b
    std::int64_t phi = 0;
};

struct RadiusProfile {
    std::map<int, double> rho;  // (H_k / (2k)!)^{1/k}
    bool degenerate = false;    // some H_k == 0
};

/// c_0(r/b) = -sum_{m=1}^{b-1} (m/b) cot(pi m r / b), evaluated in the
/// folded form -sum_{m < b/2} (2m/b - 1) cot(pi m r / b).
/// Throws std::invalid_argument unless b >= 1 and gcd(r, b) = 1.
double c0_sum(std::int64_t r, std::int64_t b);

/// cot(pi j / b) with j reduced to (0, b/2] before scaling; 0 at j = b/2.
double cot_pi_fraction(std::int64_t j, std::int64_t b);

/// Euler's totient by trial division. Throws std::invalid_argument for b < 1.
std::int64_t euler_phi(std::int64_t b);

/// Normalized 2k-th moments of c_0(r/b) over the coprime window, all ks in
/// one pass over r. Throws std::invalid_argument on an invalid window and
/// std::runtime_error when the window holds no coprime r.
CotangentMomentRun cotangent_moments(std::int64_t b, CotangentWindow window, const std::vector<int>& ks);

/// Single-k convenience wrapper around cotangent_moments.
double hk_cotangent(std::int64_t b, double A0, double A1, int k);

/// Requires hk for k = 1 ... K with K >= 3.
RadiusProfile radius_profile(const CotangentMomentRun& run);

}  // namespace wilton
