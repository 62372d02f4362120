#include "wilton/verify.hpp"

#include "wilton/cf_engine.hpp"
#include "wilton/cotangent.hpp"
#include "wilton/moment_lab.hpp"
#include "wilton/parallel.hpp"
#include "wilton/random.hpp"
#include "wilton/wilton.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wilton {

namespace {

constexpr std::uint64_t kPointBlock = 256;

// Sums per-point counts of fn over sample_point(seed, bits, i), i < points.
std::uint64_t count_over_points(std::uint64_t points, std::uint64_t seed, int bits,
                                const std::function<std::uint64_t(const ExactPoint&)>& fn) {
    const std::size_t blocks = static_cast<std::size_t>((points + kPointBlock - 1) / kPointBlock);
    std::vector<std::uint64_t> counts(blocks, 0);
    for_each_block(blocks, [&](std::size_t blk) {
        const std::uint64_t end = std::min<std::uint64_t>(points, (blk + 1) * kPointBlock);
        for (std::uint64_t i = blk * kPointBlock; i < end; ++i) counts[blk] += fn(sample_point(seed, bits, i));
    });
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double max_over_points(std::uint64_t points, std::uint64_t seed, int bits,
                       const std::function<double(const ExactPoint&)>& fn) {
    const std::size_t blocks = static_cast<std::size_t>((points + kPointBlock - 1) / kPointBlock);
    std::vector<double> maxima(blocks, 0.0);
    for_each_block(blocks, [&](std::size_t blk) {
        const std::uint64_t end = std::min<std::uint64_t>(points, (blk + 1) * kPointBlock);
        for (std::uint64_t i = blk * kPointBlock; i < end; ++i)
            maxima[blk] = std::max(maxima[blk], fn(sample_point(seed, bits, i)));
    });
    double m = 0.0;
    for (double v : maxima) m = std::max(m, v);
    return m;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

CheckResult make(std::string suite, std::string name, bool passed, std::string detail) {
    return {std::move(suite), std::move(name), passed, std::move(detail)};
}

std::uint64_t pick(std::uint64_t requested, std::uint64_t fallback) { return requested ? requested : fallback; }

// ---------------------------------------------------------------------------

std::vector<CheckResult> cf_suite(const SuiteOptions& o) {
    const std::uint64_t n = pick(o.samples, 100000);
    std::vector<CheckResult> out;
    const auto det = determinant_violations(n, o.seed, o.bits);
    out.push_back(make("cf", "determinant identity", det == 0,
                       std::to_string(det) + " violations over " + std::to_string(n) + " points"));
    const auto rec = reconstruction_failures(n, o.seed, o.bits);
    out.push_back(make("cf", "reconstruction", rec == 0,
                       std::to_string(rec) + " failures over " + std::to_string(n) + " points"));
    const auto pair = pair_bound_violations(n, o.seed, o.bits, std::numeric_limits<int>::max());
    out.push_back(make("cf", "pair bound alpha_m alpha_{m+1} <= 1/2", pair == 0,
                       std::to_string(pair) + " violations over " + std::to_string(n) + " points"));
    const auto mis = quotient_mismatches(n, o.seed, o.bits);
    out.push_back(make("cf", "orbit/expansion consistency", mis == 0,
                       std::to_string(mis) + " mismatches over " + std::to_string(n) + " points"));
    const std::uint64_t depth_points = pick(o.samples, 10000);
    const double frac = depth_fraction_above(depth_points, o.seed, 256, 60);
    out.push_back(make("cf", "depth adequacy (256 bits, depth > 60)", frac >= 0.99,
                       "fraction " + fmt(frac) + " over " + std::to_string(depth_points) + " points"));
    return out;
}

std::vector<CheckResult> wilton_suite(const SuiteOptions& o) {
    const std::uint64_t n = pick(o.samples, 1000);
    std::vector<CheckResult> out;

    const double ulps = max_over_points(n, o.seed, o.bits, [](const ExactPoint& x) {
        const GaussOrbit orb = orbit(x, 30);
        const auto gammas = gamma_terms(orb);
        double worst = 0.0;
        double partial = 0.0;
        for (int k = 0; k <= std::min(30, orb.live() - 1); ++k) {
            partial += (k & 1) ? -gammas[static_cast<std::size_t>(k)] : gammas[static_cast<std::size_t>(k)];
            const double l = truncated_wilton(orb, {k});
            const double ulp = std::nextafter(std::abs(partial), INFINITY) - std::abs(partial);
            worst = std::max(worst, std::abs(l - partial) / ulp);
        }
        return worst;
    });
    out.push_back(make("wilton", "alternating-sum consistency", ulps <= 4.0, "max " + fmt(ulps) + " ulp"));

    const double phi_hat = (std::sqrt(5.0) - 1.0) / 2.0;
    const double fixed = std::log(1.0 / phi_hat) / (1.0 + phi_hat);
    mpz_class f_prev = 1, f_cur = 1;  // F_1, F_2
    double err20 = 0.0;
    double err10 = 0.0;
    for (int m = 2; m <= 20; ++m) {
        mpz_class next = f_prev + f_cur;
        f_prev = f_cur;
        f_cur = next;  // f_prev = F_m, f_cur = F_{m+1}
        if (m == 10 || m == 20) {
            const GaussOrbit orb = orbit(ExactPoint(f_prev, f_cur), 64);
            const double e = std::abs(wilton_eval(orb, 1e-12).value - fixed);
            (m == 10 ? err10 : err20) = e;
        }
    }
    out.push_back(make("wilton", "fixed-point law at Fibonacci ratios", err20 < 1e-3 && err20 < err10,
                       "error m=10 " + fmt(err10) + ", m=20 " + fmt(err20)));

    const double fe = max_functional_eq_residual(n, o.seed, o.bits, 40);
    out.push_back(make("wilton", "functional equation residual < 1e-8", fe < 1e-8, "max " + fmt(fe)));

    const double e3 = max_eq3_residual(n, o.seed, o.bits, 10, 40);
    out.push_back(make("wilton", "operator identity residual < 1e-6 (n <= 10)", e3 < 1e-6, "max " + fmt(e3)));

    const GSeriesEvaluator g({10000, false});
    const double sym = max_over_points(std::min<std::uint64_t>(n, 200), o.seed, o.bits, [&](const ExactPoint& x) {
        const ExactPoint mirror(x.denominator() - x.numerator(), x.denominator());
        return std::abs(g.evaluate(x).value + g.evaluate(mirror).value);
    });
    out.push_back(make("wilton", "odd symmetry of g partial sums about 1/2", sym < 1e-9, "max " + fmt(sym)));
    return out;
}

std::vector<CheckResult> cotangent_suite(const SuiteOptions& o) {
    std::vector<CheckResult> out;
    double worst_anti = 0.0;
    for (std::int64_t b = 2; b <= 500; ++b)
        for (std::int64_t r = 1; r < b; ++r) {
            if (std::gcd(r, b) != 1) continue;
            const double a = c0_sum(r, b);
            const double c = c0_sum(b - r, b);
            worst_anti = std::max(worst_anti, std::abs(a + c) / std::max(1.0, std::abs(a)));
        }
    out.push_back(make("cotangent", "antisymmetry (b <= 500)", worst_anti < 1e-9, "max rel " + fmt(worst_anti)));

    double worst_fold = 0.0;
    for (std::int64_t b = 2; b <= 2000; ++b) {
        CounterRng rng(o.seed, static_cast<std::uint64_t>(b));
        for (int t = 0; t < 3; ++t) {
            std::int64_t r = 1 + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(b - 1));
            while (std::gcd(r, b) != 1) r = r % (b - 1) + 1;
            double direct = 0.0;
            for (std::int64_t m = 1; m < b; ++m)
                direct += static_cast<double>(m) / static_cast<double>(b) * cot_pi_fraction((m * r) % b, b);
            direct = -direct;
            const double folded = c0_sum(r, b);
            worst_fold = std::max(worst_fold, std::abs(direct - folded) / std::max(1.0, std::abs(direct)));
        }
    }
    out.push_back(make("cotangent", "folding equivalence (b <= 2000)", worst_fold < 1e-9, "max rel " + fmt(worst_fold)));

    const auto run = cotangent_moments(10007, {}, {1, 2, 3, 4, 5});
    bool grows = true;
    double prev_ratio = 0.0;
    for (int k = 1; k <= 5; ++k) {
        grows = grows && run.hk.at(k) >= 0.0;
        if (k >= 2) {
            const double ratio = run.hk.at(k) / run.hk.at(k - 1);
            grows = grows && ratio > prev_ratio;
            prev_ratio = ratio;
        }
    }
    out.push_back(make("cotangent", "H_k nonnegative with increasing ratios", grows,
                       "H_5/H_4 = " + fmt(run.hk.at(5) / run.hk.at(4))));

    const auto other = cotangent_moments(20011, {}, {1, 2, 3});
    double worst = 0.0;
    for (int k = 1; k <= 3; ++k)
        worst = std::max(worst, std::abs(run.hk.at(k) - other.hk.at(k)) / other.hk.at(k));
    out.push_back(make("cotangent", "stability b=10007 vs b=20011 (k <= 3)", worst < 0.10, "max rel diff " + fmt(worst)));
    return out;
}

std::vector<CheckResult> measure_suite(const SuiteOptions& o) {
    std::vector<CheckResult> out;
    const std::uint64_t n = pick(o.samples, 1000000);

    bool gamma_ok = true;
    std::string gamma_detail;
    for (int k = 1; k <= 4; ++k) {
        const auto e = moment_estimate(LogReciprocal{}, k, Measure::lebesgue, n, o.seed, ProposalMix::standard(k), o.bits);
        const double z = std::abs(e.value - gamma_int(2 * k)) / e.std_error;
        gamma_ok = gamma_ok && z <= 3.0;
        gamma_detail += "k=" + std::to_string(k) + " z=" + fmt(z) + " ";
    }
    out.push_back(make("measure", "Gamma oracle for l^{2k}", gamma_ok, gamma_detail));

    double worst_rel = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const auto w = weighted_samples(LogReciprocal{}, k, Measure::lebesgue, 10000, o.seed, ProposalMix::left_endpoint(k), o.bits);
        for (double v : w) worst_rel = std::max(worst_rel, std::abs(v / gamma_int(2 * k) - 1.0));
    }
    out.push_back(make("measure", "zero-variance left-endpoint proposal", worst_rel < 5e-9, "max rel dev " + fmt(worst_rel)));

    double worst_inv = 0.0;
    CounterRng rng(o.seed, 0x1a7e);
    for (int i = 0; i < 20; ++i) {
        double a = rng.uniform();
        double b = rng.uniform();
        if (a > b) std::swap(a, b);
        worst_inv = std::max(worst_inv, invariance_residual(a, b, 1000000));
    }
    out.push_back(make("measure", "Gauss measure invariance", worst_inv < 1e-10, "max residual " + fmt(worst_inv)));

    const std::uint64_t cn = pick(o.samples / 10, 100000);
    int failures = 0;
    for (double p : {1.5, 2.0, 3.0}) {
        double prev = INFINITY;
        for (int nn = 1; nn <= 8; ++nn) {
            const auto c = contraction_check(p, nn, cn, o.seed, o.bits);
            if (!c.holds || !(c.lhs < prev)) ++failures;
            prev = c.lhs;
        }
    }
    out.push_back(make("measure", "transfer-operator contraction", failures == 0,
                       std::to_string(failures) + " failing (p, n) cells of 24"));

    bool tail_ok = true;
    std::string tail_detail;
    for (int L : {100, 150}) {
        const double x0 = std::exp(-std::floor(L / 100.0));
        const double ratio = tail_log_moment(x0, L) / gamma_int(L);
        tail_ok = tail_ok && ratio <= std::exp(-L / 200.0);
        tail_detail += "L=" + std::to_string(L) + " ratio=" + fmt(ratio) + " ";
    }
    out.push_back(make("measure", "log-moment tail", tail_ok, tail_detail));

    // worker-count independence: same estimate under 1 and 3 workers
    const char* saved = std::getenv("WILTON_THREADS");
    const std::string saved_value = saved ? saved : "";
    auto with_threads = [&](const char* t) {
        setenv("WILTON_THREADS", t, 1);
        return moment_estimate(TruncatedWiltonRef{24}, 2, Measure::gauss, 20000, o.seed, ProposalMix::standard(2), o.bits);
    };
    const auto a = with_threads("1");
    const auto b = with_threads("3");
    if (saved)
        setenv("WILTON_THREADS", saved_value.c_str(), 1);
    else
        unsetenv("WILTON_THREADS");
    const bool same = a.value == b.value && a.std_error == b.std_error;
    out.push_back(make("measure", "determinism across worker counts", same, "value " + fmt(a.value)));
    return out;
}

std::vector<CheckResult> exceptional_suite(const SuiteOptions& o) {
    const std::uint64_t n = pick(o.samples, 1000000);
    std::vector<ExceptionalSetSpec> grid;
    for (double u : {0.7, 1.0, 2.0})
        for (double v : {0.7, 1.0, 2.0}) grid.push_back({0, 2, u, v});
    grid.push_back({0, 1, std::log(2.0), 1.0});
    grid.push_back({0, 1, 10.0, 10.0});
    const auto results = exceptional_measure_grid(grid, n, o.seed, o.bits);
    std::vector<CheckResult> out;
    int failures = 0;
    std::string detail;
    for (const auto& r : results) {
        if (!r.holds) {
            ++failures;
            detail += "(d=" + std::to_string(r.spec.d) + ",h=" + std::to_string(r.spec.h) + ",u=" + fmt(r.spec.u) +
                      ",v=" + fmt(r.spec.v) + ": " + fmt(r.empirical) + " > " + fmt(r.bound) + ") ";
        }
    }
    out.push_back(make("exceptional", "exceptional-set measure bound", failures == 0,
                       failures == 0 ? std::to_string(results.size()) + " sets within bound" : detail));
    return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"cf", "wilton", "cotangent", "measure", "exceptional", "all"};
    return names;
}

std::vector<CheckResult> run_suite(std::string_view suite, const SuiteOptions& options) {
    if (suite == "cf") return cf_suite(options);
    if (suite == "wilton") return wilton_suite(options);
    if (suite == "cotangent") return cotangent_suite(options);
    if (suite == "measure") return measure_suite(options);
    if (suite == "exceptional") return exceptional_suite(options);
    if (suite == "all") {
        std::vector<CheckResult> all;
        for (const auto& name : suite_names()) {
            if (name == "all") continue;
            auto part = run_suite(name, options);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
}

std::uint64_t pair_bound_violations(std::uint64_t points, std::uint64_t seed, int bits, int max_m) {
    return count_over_points(points, seed, bits, [max_m](const ExactPoint& x) -> std::uint64_t {
        // alpha_m alpha_{m+1} = r_{m+2} / r_m for the remainder chain r_0 = den, r_1 = num
        mpz_class r0 = x.denominator(), r1 = x.numerator(), r2, twice;
        for (int m = 0; m <= max_m && sgn(r1) != 0; ++m) {
            mpz_tdiv_r(r2.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
            twice = r2 * 2;
            if (twice > r0) return 1;
            if (sgn(r2) == 0) break;
            r0.swap(r1);
            r1.swap(r2);
        }
        return 0;
    });
}

std::uint64_t determinant_violations(std::uint64_t points, std::uint64_t seed, int bits) {
    return count_over_points(points, seed, bits, [](const ExactPoint& x) -> std::uint64_t {
        const CFExpansion cf = cf_expand(x, std::numeric_limits<int>::max());
        mpz_class p_prev = 0, q_prev = 1;  // p_0 / q_0
        for (std::size_t k = 0; k < cf.convergents.size(); ++k) {
            const auto& c = cf.convergents[k];
            const mpz_class det = c.p * q_prev - p_prev * c.q;
            const int expected = (k % 2 == 0) ? 1 : -1;  // (-1)^{k-1} with k = index + 1
            if (det != expected) return 1;
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), c.p.get_mpz_t(), c.q.get_mpz_t());
            if (g != 1) return 1;
            p_prev = c.p;
            q_prev = c.q;
        }
        return 0;
    });
}

std::uint64_t reconstruction_failures(std::uint64_t points, std::uint64_t seed, int bits) {
    return count_over_points(points, seed, bits, [](const ExactPoint& x) -> std::uint64_t {
        const CFExpansion cf = cf_expand(x, std::numeric_limits<int>::max());
        if (cf.quotients.size() >= 2 && cf.quotients.back() < 2) return 1;
        return cf_fold(cf.quotients) == x ? 0 : 1;
    });
}

std::uint64_t quotient_mismatches(std::uint64_t points, std::uint64_t seed, int bits) {
    return count_over_points(points, seed, bits, [](const ExactPoint& x) -> std::uint64_t {
        const CFExpansion cf = cf_expand(x, std::numeric_limits<int>::max());
        const GaussOrbit orb = orbit(x, static_cast<int>(cf.quotients.size()));
        if (!orb.terminated || orb.depth != static_cast<int>(cf.quotients.size())) return 1;
        for (std::size_t k = 0; k < cf.quotients.size(); ++k) {
            const ExactPoint& a = orb.points[k];
            const mpz_class floor_inv = a.denominator() / a.numerator();
            if (floor_inv != cf.quotients[k]) return 1;
            if (!(orb.points[k + 1] == gauss_map(a))) return 1;
        }
        return 0;
    });
}

double depth_fraction_above(std::uint64_t points, std::uint64_t seed, int bits, int min_depth) {
    const auto deep = count_over_points(points, seed, bits, [min_depth](const ExactPoint& x) -> std::uint64_t {
        // the orbit ends at alpha_m = 0, m = number of quotients
        const CFExpansion cf = cf_expand(x, min_depth + 1);
        return static_cast<int>(cf.quotients.size()) > min_depth ? 1 : 0;
    });
    return static_cast<double>(deep) / static_cast<double>(points);
}

double max_functional_eq_residual(std::uint64_t points, std::uint64_t seed, int bits, int depth) {
    return max_over_points(points, seed, bits, [depth](const ExactPoint& x) { return functional_eq_residual(x, depth); });
}

double max_eq3_residual(std::uint64_t points, std::uint64_t seed, int bits, int max_n, int depth) {
    return max_over_points(points, seed, bits, [max_n, depth](const ExactPoint& x) {
        double worst = 0.0;
        for (int n = 0; n <= max_n; ++n) worst = std::max(worst, eq3_residual(x, n, depth));
        return worst;
    });
}

}  // namespace wilton
