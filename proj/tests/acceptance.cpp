// Acceptance run: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the listed numbers. Exit status is the
// number of failed criteria.

#include "wilton/cotangent.hpp"
#include "wilton/moment_lab.hpp"
#include "wilton/random.hpp"
#include "wilton/report.hpp"
#include "wilton/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace wilton;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [miss]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double normalized_ratio(double hk, int k) {
    return std::pow(std::numbers::pi, 2 * k) * hk / gamma_int(2 * k);
}

// Criterion 1: Monte Carlo moments of l within 3 standard errors of Gamma(2k+1).
Verdict gamma_oracle() {
    Verdict v;
    for (int k = 1; k <= 4; ++k) {
        const auto e = moment_estimate(LogReciprocal{}, k, Measure::lebesgue, 1000000, kSeed, ProposalMix::standard(k));
        const double z = (e.value - gamma_int(2 * k)) / e.std_error;
        v.require(std::abs(z) <= 3.0, "k=" + std::to_string(k) + " z=" + fmt("%.2f", z));
    }
    return v;
}

// Criterion 2: pure left-endpoint proposal gives a constant weighted integrand.
Verdict zero_variance() {
    Verdict v;
    for (int k = 1; k <= 5; ++k) {
        const auto w = weighted_samples(LogReciprocal{}, k, Measure::lebesgue, 10000, kSeed, ProposalMix::left_endpoint(k));
        double lo = w.front(), hi = w.front();
        for (double x : w) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double spread = (hi - lo) / gamma_int(2 * k);
        v.require(spread < 5e-9 && std::abs(lo / gamma_int(2 * k) - 1.0) < 5e-9,
                  "k=" + std::to_string(k) + " spread=" + fmt("%.1e", spread));
    }
    return v;
}

// Criterion 3: ratio_to_2gamma of L(., 24) stays in [0.3, 3] for k = 1..5.
Verdict truncated_wilton_growth() {
    Verdict v;
    double prev = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const auto e = moment_estimate(TruncatedWiltonRef{24}, k, Measure::lebesgue, 10000000, kSeed,
                                       ProposalMix::standard(k));
        v.require(e.ratio_to_2gamma >= 0.3 && e.ratio_to_2gamma <= 3.0 && e.value > prev,
                  "k=" + std::to_string(k) + " value=" + fmt("%.4g", e.value) + " ratio=" + fmt("%.3f", e.ratio_to_2gamma));
        prev = e.value;
    }
    return v;
}

// Criterion 4: functional equation residual at depth 40.
Verdict functional_equation() {
    Verdict v;
    const double r = max_functional_eq_residual(1000, kSeed, 256, 40);
    v.require(r < 1e-8, "max residual=" + fmt("%.2e", r));
    return v;
}

// Criterion 5: alpha_m alpha_{m+1} <= 1/2 exactly, m <= 30.
Verdict pair_bound() {
    Verdict v;
    const auto bad = pair_bound_violations(100000, kSeed, 256, 30);
    v.require(bad == 0, "violations=" + std::to_string(bad) + " of 100000 points");
    return v;
}

// Criterion 6: invariance, contraction grid and exceptional grid.
Verdict measure_suite() {
    Verdict v;
    CounterRng rng(kSeed, 6);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double a = rng.uniform(), b = rng.uniform();
        if (a > b) std::swap(a, b);
        worst = std::max(worst, invariance_residual(a, b, 1000000));
    }
    v.require(worst < 1e-10, "invariance max=" + fmt("%.1e", worst));

    int held = 0, total = 0;
    for (double p : {1.5, 2.0, 3.0})
        for (int n = 1; n <= 8; ++n) {
            ++total;
            held += contraction_check(p, n, 100000, kSeed).holds;
        }
    v.require(held == total, "contraction " + std::to_string(held) + "/" + std::to_string(total));

    std::vector<ExceptionalSetSpec> specs;
    for (double u : {0.7, 1.0, 2.0})
        for (double w : {0.7, 1.0, 2.0}) specs.push_back({0, 2, u, w});
    int below = 0;
    double margin = INFINITY;
    for (const auto& r : exceptional_measure_grid(specs, 1000000, kSeed)) {
        below += r.empirical <= r.bound;
        margin = std::min(margin, r.bound - r.empirical);
    }
    v.require(below == 9, "exceptional " + std::to_string(below) + "/9 min margin=" + fmt("%.3g", margin));
    return v;
}

const CotangentMomentRun& run_10007() {
    static const CotangentMomentRun run = cotangent_moments(10007, {}, {1, 2, 3, 4, 5});
    return run;
}

// Criterion 7: normalized cotangent moments and the H_1 cross-check.
Verdict cotangent_moments_band() {
    Verdict v;
    const auto& run = run_10007();
    for (int k = 1; k <= 4; ++k) {
        const double r = normalized_ratio(run.hk.at(k), k);
        v.require(r >= 0.3 && r <= 8.0, "k=" + std::to_string(k) + " ratio=" + fmt("%.4f", r));
    }
    const auto e = moment_estimate(GSeriesRef{{100000}}, 1, Measure::lebesgue, 1000000, kSeed, ProposalMix::standard(1));
    const double mc = e.value / (std::numbers::pi * std::numbers::pi);
    const double rel = std::abs(run.hk.at(1) / mc - 1.0);
    v.require(rel <= 0.15, "H1=" + fmt("%.5f", run.hk.at(1)) + " MC=" + fmt("%.5f", mc) + " rel=" + fmt("%.3f", rel));
    return v;
}

// Criterion 8: radius diagnostic on the b = 10007 run.
Verdict radius_trend() {
    Verdict v;
    const auto prof = radius_profile(run_10007());
    const double target = 1.0 / (std::numbers::pi * std::numbers::pi);
    const double d1 = std::abs(prof.rho.at(1) - target), d5 = std::abs(prof.rho.at(5) - target);
    v.require(d5 < d1, "|rho5-1/pi^2|=" + fmt("%.4f", d5) + " vs |rho1-1/pi^2|=" + fmt("%.4f", d1));
    v.require(prof.rho.at(5) > 0.03 && prof.rho.at(5) < 0.35, "rho5=" + fmt("%.4f", prof.rho.at(5)));
    return v;
}

// Criterion 9: H_k at b = 10007 within 10% of the b = 20011 value.
Verdict two_modulus() {
    Verdict v;
    const auto big = cotangent_moments(20011, {}, {1, 2, 3});
    for (int k = 1; k <= 3; ++k) {
        const double rel = std::abs(run_10007().hk.at(k) / big.hk.at(k) - 1.0);
        v.require(rel <= 0.10, "k=" + std::to_string(k) + " rel=" + fmt("%.4f", rel));
    }
    return v;
}

// Reduced-size versions of every report, concatenated.
std::string report_bundle() {
    std::ostringstream out;
    MomentConfig cfg;
    cfg.samples = 20000;
    cfg.seed = kSeed;
    out << moments_report_json({{"seed", kSeed}}, moment_table(LogReciprocal{}, {1, 2, 3, 4}, cfg));
    out << moments_csv(moment_table(TruncatedWiltonRef{24}, {1, 2, 3, 4, 5}, cfg));
    cfg.measure = Measure::gauss;
    out << moments_csv(moment_table(WiltonRef{1e-12}, {1, 2}, cfg));
    cfg.measure = Measure::lebesgue;
    cfg.samples = 2000;
    out << moments_csv(moment_table(GSeriesRef{{10000}}, {1}, cfg));
    const auto run = cotangent_moments(2003, {}, {1, 2, 3, 4, 5});
    out << cotangent_csv(run) << radius_csv(radius_profile(run));
    for (int n : {1, 4}) {
        const auto c = contraction_check(2.0, n, 10000, kSeed);
        out << format_number(c.lhs) << ',' << format_number(c.lhs_error) << ',' << format_number(c.rhs) << '\n';
    }
    for (const auto& r : exceptional_measure_grid({{0, 2, 0.7, 1.0}, {1, 2, 1.0, 0.7}}, 10000, kSeed))
        out << format_number(r.empirical) << ',' << format_number(r.std_error) << '\n';
    return out.str();
}

// Criterion 10: byte-identical reports for 1, 2 and 3 workers.
Verdict determinism() {
    Verdict v;
    std::map<std::string, std::string> bundles;
    for (const char* n : {"1", "2", "3"}) {
        setenv("WILTON_THREADS", n, 1);
        bundles[n] = report_bundle();
    }
    unsetenv("WILTON_THREADS");
    const bool same = bundles["1"] == bundles["2"] && bundles["1"] == bundles["3"];
    v.require(same, std::to_string(bundles["1"].size()) + "-byte report, workers 1/2/3 " + (same ? "identical" : "differ"));
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "gamma oracle", 30, gamma_oracle},
        {2, "zero-variance proposal", 5, zero_variance},
        {3, "truncated Wilton moments", 600, truncated_wilton_growth},
        {4, "functional equation", 5, functional_equation},
        {5, "pair bound", 30, pair_bound},
        {6, "measure suite", 120, measure_suite},
        {7, "cotangent moments", 180, cotangent_moments_band},
        {8, "radius diagnostic", 180, radius_trend},
        {9, "two-modulus stability", 600, two_modulus},
        {10, "determinism", 600, determinism},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double dt = seconds_since(t0);
        v.require(dt < c.budget_s, "time=" + fmt("%.1fs", dt) + " budget=" + fmt("%.0fs", c.budget_s));
        failed += !v.pass;
        std::printf("criterion %2d %-26s %s  %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
