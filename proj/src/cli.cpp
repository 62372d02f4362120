#include "wilton/cli.hpp"

#include "wilton/cf_engine.hpp"
#include "wilton/cotangent.hpp"
#include "wilton/moment_lab.hpp"
#include "wilton/report.hpp"
#include "wilton/verify.hpp"
#include "wilton/wilton.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

namespace wilton {

namespace {

struct RunConfig {
    std::uint64_t seed = 1;
    std::uint64_t samples = 1000000;
    int bits = 256;
    int n = 24;
    std::int64_t b = 10007;
    double A0 = 0.51;
    double A1 = 0.99;
    bool full_interval = false;
    std::vector<int> ks{1};
    std::string output;
    std::string format = "csv";
    std::string integrand = "l";
    std::string measure = "lebesgue";
    long N = 100000;
    bool average_pair = false;
    double tol = 1e-12;
    double w_left = 0.4;
    double w_right = 0.4;
    double w_uniform = 0.2;
    std::string suite = "all";
    std::string point;
    std::int64_t r = 0;
    int max_terms = 100000;
};

std::string fixed10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return buf;
}

// Writes to --output when given, else to out.
void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.empty())
        out << text;
    else
        write_text_file(cfg.output, text);
}

nlohmann::json config_echo(const RunConfig& c, const std::string& subcommand) {
    return {{"subcommand", subcommand},
            {"seed", c.seed},
            {"samples", c.samples},
            {"bits", c.bits},
            {"n", c.n},
            {"N", c.N},
            {"average_pair", c.average_pair},
            {"tol", c.tol},
            {"b", c.b},
            {"A0", c.A0},
            {"A1", c.A1},
            {"ks", c.ks},
            {"integrand", c.integrand},
            {"measure", c.measure},
            {"proposal", {{"w_left", c.w_left}, {"w_right", c.w_right}, {"w_uniform", c.w_uniform}}}};
}

int cmd_cf(const RunConfig& c, std::ostream& out) {
    const ExactPoint x = ExactPoint::parse(c.point);
    const CFExpansion cf = cf_expand(x, c.max_terms);
    if (c.format == "json") {
        emit(c, orbit_to_json(orbit(x, static_cast<int>(cf.quotients.size()))) + "\n", out);
        return 0;
    }
    std::ostringstream os;
    os << "x = " << x.to_string() << "\nquotients:";
    for (const auto& a : cf.quotients) os << ' ' << a.get_str();
    os << "\nconvergents:";
    for (const auto& pq : cf.convergents) os << ' ' << pq.p.get_str() << '/' << pq.q.get_str();
    os << '\n';
    emit(c, os.str(), out);
    return 0;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
    const ExactPoint x = ExactPoint::parse(c.point);
    if (x.is_zero()) throw std::invalid_argument("eval: x must be in (0, 1)");
    const GaussOrbit deep = orbit(x, 4 * static_cast<int>(mpz_sizeinbase(x.denominator().get_mpz_t(), 2)) + 8);
    const double l = deep.logs[0];
    const double big_l = truncated_wilton(deep, {c.n});
    const WiltonValue w = wilton_eval(deep, c.tol);
    const GSeriesValue g = g_series(x, {c.N, c.average_pair});
    std::ostringstream os;
    if (c.format == "json") {
        nlohmann::json j{{"x", x.to_string()},
                         {"l", l},
                         {"L", big_l},
                         {"n", c.n},
                         {"W", w.value},
                         {"W_terms", w.terms_used},
                         {"W_tail_estimate", w.tail_estimate},
                         {"g", g.value},
                         {"N", c.N},
                         {"g_resonant", g.resonant},
                         {"g_minus_L", g.value - big_l}};
        os << j.dump(2) << '\n';
    } else {
        os << "x = " << x.to_string() << '\n'
           << "l(x)      = " << format_number(l) << '\n'
           << "L(x," << c.n << ")   = " << format_number(big_l) << '\n'
           << "W(x)      = " << format_number(w.value) << "  (terms " << w.terms_used << ", tail "
           << format_number(w.tail_estimate) << ")\n"
           << "g_N(x)    = " << format_number(g.value) << "  (N " << c.N << (g.resonant ? ", resonant" : "") << ")\n"
           << "g_N - L   = " << format_number(g.value - big_l) << '\n';
    }
    emit(c, os.str(), out);
    return 0;
}

IntegrandRef parse_integrand(const RunConfig& c) {
    if (c.integrand == "l") return LogReciprocal{};
    if (c.integrand == "L") return TruncatedWiltonRef{c.n};
    if (c.integrand == "g") return GSeriesRef{{c.N, c.average_pair}};
    if (c.integrand == "W") return WiltonRef{c.tol};
    throw std::invalid_argument("unknown integrand '" + c.integrand + "'");
}

int cmd_moments_integral(const RunConfig& c, std::ostream& out) {
    MomentConfig mc;
    mc.measure = c.measure == "gauss" ? Measure::gauss : Measure::lebesgue;
    mc.samples = c.samples;
    mc.seed = c.seed;
    mc.bits = c.bits;
    mc.w_left = c.w_left;
    mc.w_right = c.w_right;
    mc.w_uniform = c.w_uniform;
    const auto rows = moment_table(parse_integrand(c), c.ks, mc);
    emit(c, c.format == "json" ? moments_report_json(config_echo(c, "moments-integral"), rows) : moments_csv(rows), out);
    return 0;
}

int cmd_moments_cotangent(const RunConfig& c, std::ostream& out) {
    const auto run = cotangent_moments(c.b, {c.A0, c.A1, c.full_interval}, c.ks);
    std::optional<RadiusProfile> profile;
    if (run.hk.count(1) && run.hk.count(2) && run.hk.count(3)) profile = radius_profile(run);
    if (c.format == "json") {
        nlohmann::json j{{"config", config_echo(c, "moments-cotangent")}, {"run", to_json(run)}};
        if (profile) j["radius"] = to_json(*profile);
        emit(c, j.dump(2) + "\n", out);
    } else {
        std::string text = cotangent_csv(run);
        if (profile) text += "\n" + radius_csv(*profile);
        emit(c, text, out);
    }
    return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    const auto results = run_suite(c.suite, {c.samples, c.seed, c.bits});
    int failed = 0;
    std::ostringstream os;
    for (const auto& r : results) {
        os << (r.passed ? "PASS " : "FAIL ") << '[' << r.suite << "] " << r.name << " -- " << r.detail << '\n';
        if (!r.passed) ++failed;
    }
    os << (results.size() - static_cast<std::size_t>(failed)) << " passed, " << failed << " failed\n";
    if (failed) {
        os << "failing invariants:\n";
        for (const auto& r : results)
            if (!r.passed) os << "  [" << r.suite << "] " << r.name << '\n';
    }
    emit(c, os.str(), out);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Continued-fraction and cotangent-sum moment laboratory", "wilton_cli"};
    app.require_subcommand(1);
    RunConfig c;

    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output,-o", c.output, "Write the report to this path");
    };
    auto add_sampling = [&](CLI::App* sub, std::uint64_t default_samples) {
        c.samples = default_samples;
        sub->add_option("--seed", c.seed, "Generator seed")->capture_default_str();
        sub->add_option("--samples", c.samples, "Sample count")->capture_default_str();
        sub->add_option("--bits", c.bits, "Dyadic bit depth of sample points")->check(CLI::Range(1, 4096))->capture_default_str();
    };

    auto* cf = app.add_subcommand("cf", "Continued fraction expansion and convergents of p/q");
    cf->add_option("x", c.point, "Rational p/q in (0, 1)")->required();
    cf->add_option("--max-terms", c.max_terms, "Quotient limit")->check(CLI::PositiveNumber);
    add_format(cf);

    auto* ev = app.add_subcommand("eval", "Evaluate l, L(x,n), W, g_N and g_N - L at p/q");
    ev->add_option("x", c.point, "Rational p/q in (0, 1)")->required();
    ev->add_option("--n", c.n, "Truncation order of L")->check(CLI::NonNegativeNumber)->capture_default_str();
    ev->add_option("--N", c.N, "Terms of the g series")->check(CLI::PositiveNumber)->capture_default_str();
    ev->add_flag("--average-pair", c.average_pair, "Average the N- and 2N-term partial sums");
    ev->add_option("--tol", c.tol, "Wilton stopping tolerance")->check(CLI::PositiveNumber);
    add_format(ev);

    auto* c0 = app.add_subcommand("c0", "Cotangent sum c_0(r/b)");
    c0->add_option("r", c.r, "Numerator")->required();
    c0->add_option("b", c.b, "Modulus")->required()->check(CLI::PositiveNumber);

    auto* mi = app.add_subcommand("moments-integral", "Monte Carlo moments of l, L, g or W");
    mi->add_option("--integrand", c.integrand, "Integrand")->check(CLI::IsMember({"l", "L", "g", "W"}))->capture_default_str();
    mi->add_option("--k", c.ks, "Moment orders (2k-th powers)")->check(CLI::PositiveNumber);
    mi->add_option("--measure", c.measure, "Integration measure")->check(CLI::IsMember({"lebesgue", "gauss"}));
    mi->add_option("--n", c.n, "Truncation order of L")->check(CLI::NonNegativeNumber)->capture_default_str();
    mi->add_option("--N", c.N, "Terms of the g series")->check(CLI::PositiveNumber)->capture_default_str();
    mi->add_flag("--average-pair", c.average_pair, "Average the N- and 2N-term partial sums");
    mi->add_option("--tol", c.tol, "Wilton stopping tolerance")->check(CLI::PositiveNumber);
    mi->add_option("--w-left", c.w_left, "Left-endpoint proposal weight");
    mi->add_option("--w-right", c.w_right, "Right-endpoint proposal weight");
    mi->add_option("--w-uniform", c.w_uniform, "Uniform proposal weight");
    add_sampling(mi, 1000000);
    add_format(mi);

    auto* mc = app.add_subcommand("moments-cotangent", "Normalized cotangent-sum moments H_k and radius profile");
    mc->add_option("--b", c.b, "Modulus")->check(CLI::Range(std::int64_t{3}, std::int64_t{1} << 40))->capture_default_str();
    mc->add_option("--k", c.ks, "Moment orders")->check(CLI::NonNegativeNumber);
    mc->add_option("--A0", c.A0, "Window start")->capture_default_str();
    mc->add_option("--A1", c.A1, "Window end")->capture_default_str();
    mc->add_flag("--full-interval", c.full_interval, "Allow 0 < A0 < A1 < 1");
    add_format(mc);

    auto* vf = app.add_subcommand("verify", "Run invariant suites");
    vf->add_option("--suite", c.suite, "Suite")->check(CLI::IsMember(suite_names()))->capture_default_str();
    add_sampling(vf, 0);
    vf->add_option("--output,-o", c.output, "Write the listing to this path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (cf->parsed()) return cmd_cf(c, out);
        if (ev->parsed()) return cmd_eval(c, out);
        if (c0->parsed()) {
            out << fixed10(c0_sum(c.r, c.b)) << '\n';
            return 0;
        }
        if (mi->parsed()) return cmd_moments_integral(c, out);
        if (mc->parsed()) return cmd_moments_cotangent(c, out);
        if (vf->parsed()) return cmd_verify(c, out);
    } catch (const ReportWriteError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace wilton
