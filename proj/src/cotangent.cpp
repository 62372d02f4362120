#include "wilton/cotangent.hpp"

#include "wilton/parallel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wilton {

double cot_pi_fraction(std::int64_t j, std::int64_t b) {
    j %= b;
    if (j < 0) j += b;
    if (j == 0) throw std::domain_error("cot_pi_fraction: pole at an integer multiple of pi");
    double sign = 1.0;
    if (2 * j > b) {
        j = b - j;
        sign = -1.0;
    }
    if (2 * j == b) return 0.0;
    const double t = std::numbers::pi * (static_cast<double>(j) / static_cast<double>(b));
    return sign * std::cos(t) / std::sin(t);
}

double c0_sum(std::int64_t r, std::int64_t b) {
    if (b < 1) throw std::invalid_argument("c0_sum: b must be >= 1");
    if (std::gcd(r, b) != 1) throw std::invalid_argument("c0_sum: gcd(r, b) must be 1");
    if (b == 1) return 0.0;
    r %= b;
    if (r < 0) r += b;
    const double bd = static_cast<double>(b);
    double sum = 0.0;
    std::int64_t j = 0;
    for (std::int64_t m = 1; 2 * m < b; ++m) {
        j += r;
        if (j >= b) j -= b;
        sum += (2.0 * static_cast<double>(m) / bd - 1.0) * cot_pi_fraction(j, b);
    }
    return -sum;
}

std::int64_t euler_phi(std::int64_t b) {
    if (b < 1) throw std::invalid_argument("euler_phi: b must be >= 1");
    std::int64_t result = b;
    std::int64_t n = b;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

CotangentMomentRun cotangent_moments(std::int64_t b, CotangentWindow window, const std::vector<int>& ks) {
    if (b < 3) throw std::invalid_argument("cotangent_moments: b must be >= 3");
    const double lower = window.full_interval ? 0.0 : 0.5;
    if (!(window.A0 > lower && window.A0 < window.A1 && window.A1 < 1.0))
        throw std::invalid_argument("cotangent_moments: window must satisfy " +
                                    std::string(window.full_interval ? "0" : "1/2") + " < A0 < A1 < 1");
    if (ks.empty()) throw std::invalid_argument("cotangent_moments: ks must be nonempty");
    for (int k : ks)
        if (k < 0) throw std::invalid_argument("cotangent_moments: k must be >= 0");

    CotangentMomentRun run;
    run.b = b;
    run.A0 = window.A0;
    run.A1 = window.A1;
    run.ks = ks;
    run.phi = euler_phi(b);

    const double bd = static_cast<double>(b);
    const auto r_lo = static_cast<std::int64_t>(std::ceil(window.A0 * bd));
    const auto r_hi = static_cast<std::int64_t>(std::floor(window.A1 * bd));
    std::vector<std::int64_t> rs;
    for (std::int64_t r = r_lo; r <= r_hi; ++r)
        if (std::gcd(r, b) == 1) rs.push_back(r);
    run.count = static_cast<std::int64_t>(rs.size());
    if (rs.empty()) throw std::runtime_error("cotangent_moments: empty r-range (count = 0)");

    // cot(pi j / b) for j = 1 .. b-1; c_0(r/b)/b for every r in the window
    std::vector<double> cot(static_cast<std::size_t>(b), 0.0);
    for (std::int64_t j = 1; j < b; ++j) cot[static_cast<std::size_t>(j)] = cot_pi_fraction(j, b);
    std::vector<double> weight;
    for (std::int64_t m = 1; 2 * m < b; ++m) weight.push_back(2.0 * static_cast<double>(m) / bd - 1.0);

    std::vector<double> scaled(rs.size());
    constexpr std::size_t kBlock = 64;
    const std::size_t blocks = (rs.size() + kBlock - 1) / kBlock;
    for_each_block(blocks, [&](std::size_t blk) {
        const std::size_t end = std::min(rs.size(), (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) {
            const std::int64_t r = rs[i];
            std::int64_t j = 0;
            double sum = 0.0;
            for (std::size_t m = 0; m < weight.size(); ++m) {
                j += r;
                if (j >= b) j -= b;
                sum += weight[m] * cot[static_cast<std::size_t>(j)];
            }
            scaled[i] = -sum / bd;
        }
    });

    const double norm = 1.0 / (static_cast<double>(run.phi) * (window.A1 - window.A0));
    std::vector<double> powers(scaled.size());
    for (int k : ks) {
        for (std::size_t i = 0; i < scaled.size(); ++i) powers[i] = std::pow(scaled[i] * scaled[i], k);
        run.hk[k] = norm * pairwise_sum(powers.data(), powers.size());
    }
    return run;
}

double hk_cotangent(std::int64_t b, double A0, double A1, int k) {
    return cotangent_moments(b, {A0, A1, false}, {k}).hk.at(k);
}

RadiusProfile radius_profile(const CotangentMomentRun& run) {
    int top = 0;
    while (run.hk.count(top + 1) != 0) ++top;
    if (top < 3) throw std::invalid_argument("radius_profile: run must contain k = 1 .. K with K >= 3");
    RadiusProfile out;
    double factorial = 1.0;
    for (int k = 1; k <= top; ++k) {
        factorial *= static_cast<double>((2 * k - 1) * (2 * k));
        const double h = run.hk.at(k);
        if (h <= 0.0) {
            out.degenerate = true;
            out.rho[k] = 0.0;
            continue;
        }
        out.rho[k] = std::pow(h / factorial, 1.0 / k);
    }
    return out;
}

}  // namespace wilton
