#include "wilton/cf_engine.hpp"
#include "wilton/random.hpp"
#include "wilton/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <limits>

using namespace wilton;

namespace {

ExactPoint q(const char* text) { return ExactPoint::parse(text); }

std::vector<std::string> strs(const std::vector<mpz_class>& v) {
    std::vector<std::string> out;
    for (const auto& a : v) out.push_back(a.get_str());
    return out;
}

}  // namespace

TEST_CASE("ExactPoint keeps lowest terms and rejects values outside [0, 1)") {
    CHECK(q("6/16") == q("3/8"));
    CHECK(q("0/7") == ExactPoint());
    CHECK(ExactPoint().denominator() == 1);
    CHECK_THROWS_AS(q("1/1"), std::invalid_argument);
    CHECK_THROWS_AS(q("5/3"), std::invalid_argument);
    CHECK_THROWS_AS(q("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(q("1/-2"), std::invalid_argument);
    CHECK_THROWS_AS(q("abc"), std::invalid_argument);
    CHECK(q("3/8").value() == 0.375);
}

TEST_CASE("sample_point") {
    SUBCASE("one bit forces 1/2") { CHECK(sample_point(7, 1) == q("1/2")); }
    SUBCASE("odd numerator over 2^bits, deterministic") {
        const ExactPoint a = sample_point(42, 8);
        const ExactPoint b = sample_point(42, 8);
        CHECK(a == b);
        CHECK(a.denominator() == 256);
        CHECK(mpz_odd_p(a.numerator().get_mpz_t()));
        CHECK(a.numerator() > 0);
        CHECK(a.numerator() < 256);
    }
    SUBCASE("streams differ") { CHECK_FALSE(sample_point(42, 256, 0) == sample_point(42, 256, 1)); }
    SUBCASE("wide points keep the full denominator") {
        const ExactPoint x = sample_point(3, 300, 11);
        CHECK(x.denominator() == mpz_class(1) << 300);
    }
    SUBCASE("bits = 0 rejected") { CHECK_THROWS_AS(sample_point(1, 0), std::invalid_argument); }
    SUBCASE("odd residues are uniform") {
        // 4-bit points: 8 odd numerators, 16000 draws, chi-square with 7 dof
        std::array<int, 16> hist{};
        const int draws = 16000;
        for (int i = 0; i < draws; ++i) ++hist[mpz_get_ui(sample_point(9, 4, i).numerator().get_mpz_t())];
        double chi2 = 0.0;
        for (int p = 1; p < 16; p += 2) {
            const double expected = draws / 8.0;
            chi2 += (hist[p] - expected) * (hist[p] - expected) / expected;
        }
        for (int p = 0; p < 16; p += 2) CHECK(hist[p] == 0);
        CHECK(chi2 < 24.3);  // 0.999 quantile
    }
}

TEST_CASE("gauss_map") {
    CHECK(gauss_map(q("2/5")) == q("1/2"));
    CHECK(gauss_map(q("5/8")) == q("3/5"));
    CHECK(gauss_map(q("1/2")).is_zero());
    CHECK_THROWS_AS(gauss_map(ExactPoint()), std::domain_error);
}

TEST_CASE("cf_expand") {
    SUBCASE("2/5") {
        const auto cf = cf_expand(q("2/5"), 10);
        CHECK(strs(cf.quotients) == std::vector<std::string>{"2", "2"});
        REQUIRE(cf.convergents.size() == 2);
        CHECK(cf.convergents[0].p == 1);
        CHECK(cf.convergents[0].q == 2);
        CHECK(cf.convergents[1].p == 2);
        CHECK(cf.convergents[1].q == 5);
    }
    SUBCASE("5/8") {
        const auto cf = cf_expand(q("5/8"), 10);
        CHECK(strs(cf.quotients) == std::vector<std::string>{"1", "1", "1", "2"});
        const std::vector<std::pair<int, int>> want{{1, 1}, {1, 2}, {2, 3}, {5, 8}};
        for (std::size_t k = 0; k < want.size(); ++k) {
            CHECK(cf.convergents[k].p == want[k].first);
            CHECK(cf.convergents[k].q == want[k].second);
        }
    }
    SUBCASE("1/2") { CHECK(strs(cf_expand(q("1/2"), 10).quotients) == std::vector<std::string>{"2"}); }
    SUBCASE("truncation") { CHECK(cf_expand(q("5/8"), 2).quotients.size() == 2); }
    SUBCASE("huge first quotient") {
        const ExactPoint tiny(1, mpz_class(1) << 200);
        const auto cf = cf_expand(tiny, 5);
        REQUIRE(cf.quotients.size() == 1);
        CHECK(cf.quotients[0] == mpz_class(1) << 200);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(cf_expand(ExactPoint(), 5), std::invalid_argument);
        CHECK_THROWS_AS(cf_expand(q("1/3"), 0), std::invalid_argument);
    }
}

TEST_CASE("orbit") {
    SUBCASE("5/8 terminates at index 4") {
        const GaussOrbit o = orbit(q("5/8"), 4);
        REQUIRE(o.points.size() == 5);
        const char* want[] = {"5/8", "3/5", "2/3", "1/2", "0/1"};
        for (int k = 0; k < 5; ++k) CHECK(o.points[k].to_string() == want[k]);
        CHECK(o.terminated);
        CHECK(o.depth == 4);
        CHECK(o.live() == 4);
        CHECK(o.betas[1] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
        CHECK(o.betas[1] <= 0.5);
    }
    SUBCASE("depth cap") {
        const GaussOrbit o = orbit(q("5/8"), 2);
        CHECK(o.depth == 2);
        CHECK_FALSE(o.terminated);
        CHECK(o.points.size() == 3);
    }
    SUBCASE("Fibonacci ratio has unit quotients") {
        const GaussOrbit o = orbit(q("34/55"), 7);
        for (int k = 0; k < 7; ++k) {
            const auto& a = o.points[k];
            CHECK(a.denominator() / a.numerator() == 1);
        }
    }
    SUBCASE("logs and betas against long double") {
        const GaussOrbit o = orbit(q("5/8"), 4);
        const long double a[] = {5.0L / 8, 3.0L / 5, 2.0L / 3, 1.0L / 2};
        long double beta = 1.0L;
        for (int k = 0; k < 4; ++k) {
            beta *= a[k];
            CHECK(o.logs[k] == doctest::Approx(static_cast<double>(-std::log(a[k]))).epsilon(1e-15));
            CHECK(o.betas[k] == doctest::Approx(static_cast<double>(beta)).epsilon(1e-15));
        }
    }
    SUBCASE("beta recurrence within 2 ulp on deep random orbits") {
        for (int i = 0; i < 200; ++i) {
            const GaussOrbit o = orbit(sample_point(5, 256, i), 120);
            for (int k = 1; k < o.live(); ++k) {
                const double predicted = o.betas[k - 1] * o.points[k].value();
                const double ulp = std::nextafter(o.betas[k], INFINITY) - o.betas[k];
                CHECK(std::abs(predicted - o.betas[k]) <= 2 * ulp);
            }
        }
    }
    SUBCASE("json") {
        const auto j = nlohmann::json::parse(orbit_to_json(orbit(q("5/8"), 10)));
        CHECK(j["x"] == "5/8");
        CHECK(j["quotients"] == nlohmann::json({"1", "1", "1", "2"}));
        CHECK(j["alphas"].size() == 5);
    }
}

TEST_CASE("log_of_rational") {
    CHECK(log_of_rational(1, 1) == 0.0);
    CHECK(log_of_rational(8, 5) == doctest::Approx(0.4700036292457356).epsilon(1e-15));
    const mpz_class big = mpz_class(1) << 300;
    const mpz_class half = mpz_class(1) << 299;
    CHECK(log_of_rational(big, half) == std::log(2.0));
    CHECK_THROWS_AS(log_of_rational(0, 3), std::domain_error);
    CHECK_THROWS_AS(log_of_rational(3, 0), std::domain_error);

    SUBCASE("near one keeps relative accuracy") {
        // log((2^200 + 1) / 2^200) = 2^-200 to first order
        const mpz_class d = mpz_class(1) << 200;
        const double v = log_of_rational(d + 1, d);
        CHECK(v == std::ldexp(1.0, -200));
        CHECK(log_of_rational(d, d + 1) == -std::ldexp(1.0, -200));
    }
    SUBCASE("2 ulp against long double for 64-bit operands") {
        CounterRng rng(11, 0);
        for (int i = 0; i < 20000; ++i) {
            const std::uint64_t a = (rng.next() >> (rng.next() % 60)) | 1;
            const std::uint64_t b = (rng.next() >> (rng.next() % 60)) | 1;
            mpz_class pa, pb;
            mpz_import(pa.get_mpz_t(), 1, -1, 8, 0, 0, &a);
            mpz_import(pb.get_mpz_t(), 1, -1, 8, 0, 0, &b);
            const long double exact = a > b ? std::log1p(static_cast<long double>(a - b) / b)
                                            : -std::log1p(static_cast<long double>(b - a) / a);
            const double got = log_of_rational(pa, pb);
            const double want = static_cast<double>(exact);
            const double ulp = std::nextafter(std::abs(want), INFINITY) - std::abs(want);
            if (want != 0.0) CHECK(std::abs(got - want) <= 2 * ulp);
        }
    }
}

TEST_CASE("to_double_rounded rounds to nearest") {
    const mpz_class two53 = mpz_class(1) << 53;
    CHECK(to_double_rounded(two53 + 1) == 9007199254740992.0);                  // tie to even
    CHECK(to_double_rounded(two53 + 3) == 9007199254740996.0);                  // tie to even (up)
    CHECK(to_double_rounded((two53 << 20) + (mpz_class(1) << 19) + 1) == std::ldexp(9007199254740993.0, 20));
}

TEST_CASE("cf-engine invariants over random points") {
    // full-size runs (1e5 points) live in the cf verify suite and acceptance
    CHECK(determinant_violations(2000, 1, 256) == 0);
    CHECK(reconstruction_failures(2000, 1, 256) == 0);
    CHECK(pair_bound_violations(2000, 1, 256, std::numeric_limits<int>::max()) == 0);
    CHECK(quotient_mismatches(500, 1, 256) == 0);
    CHECK(depth_fraction_above(2000, 1, 256, 60) >= 0.99);
}

TEST_CASE("pair bound is attained only in the limit") {
    // x = F_n / F_{n+1}: alpha_0 alpha_1 = F_{n-1} / F_{n+1} < 1/2
    const GaussOrbit o = orbit(q("21/34"), 5);
    for (int m = 0; m + 1 < o.live(); ++m) CHECK(std::exp(-o.logs[m] - o.logs[m + 1]) <= 0.5);
    CHECK(std::exp(-o.logs[0] - o.logs[1]) == doctest::Approx(13.0 / 34.0).epsilon(1e-15));
}
