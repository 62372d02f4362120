#include "wilton/cf_engine.hpp"

#include "wilton/random.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace wilton {

static_assert(GMP_LIMB_BITS == 64, "limb arithmetic assumes 64-bit GMP limbs");

namespace {

constexpr long double kLn2 = 0.693147180559945309417232121458176568L;

// n ~ m * 2^exp with m holding the leading 64 bits (truncated); n > 0.
std::uint64_t leading_bits(const mpz_class& n, long& exp) {
    const mpz_srcptr z = n.get_mpz_t();
    const std::size_t limbs = mpz_size(z);
    const std::uint64_t hi = mpz_getlimbn(z, limbs - 1);
    const int lz = std::countl_zero(hi);
    std::uint64_t m = hi << lz;
    if (lz != 0 && limbs >= 2) m |= mpz_getlimbn(z, limbs - 2) >> (64 - lz);
    exp = static_cast<long>(64 * (limbs - 1)) - lz;
    return m;
}

long double ratio_long(const mpz_class& p, const mpz_class& q) {
    long ep = 0;
    long eq = 0;
    const std::uint64_t mp = leading_bits(p, ep);
    const std::uint64_t mq = leading_bits(q, eq);
    return std::ldexp(static_cast<long double>(mp) / static_cast<long double>(mq),
                      static_cast<int>(ep - eq));
}

}  // namespace

ExactPoint::ExactPoint() : num_(0), den_(1) {}

ExactPoint::ExactPoint(mpz_class num, mpz_class den) : num_(std::move(num)), den_(std::move(den)) {
    if (sgn(den_) <= 0) throw std::invalid_argument("ExactPoint: denominator must be positive");
    if (sgn(num_) < 0 || num_ >= den_) throw std::invalid_argument("ExactPoint: value must lie in [0, 1)");
    if (sgn(num_) == 0) {
        den_ = 1;
        return;
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
    if (g != 1) {
        mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
    }
}

ExactPoint ExactPoint::parse(std::string_view text) {
    const auto slash = text.find('/');
    auto digits = [](std::string_view s) {
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    const std::string_view p = text.substr(0, slash);
    const std::string_view q = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    if (slash == std::string_view::npos || !digits(p) || !digits(q))
        throw std::invalid_argument("expected a rational of the form p/q, got '" + std::string(text) + "'");
    return ExactPoint(mpz_class(std::string(p)), mpz_class(std::string(q)));
}

double ExactPoint::value() const { return is_zero() ? 0.0 : ratio_to_double(num_, den_); }

std::string ExactPoint::to_string() const { return num_.get_str() + "/" + den_.get_str(); }

ExactPoint sample_point(std::uint64_t seed, int bits, std::uint64_t stream) {
    if (bits < 1) throw std::invalid_argument("sample_point: bits must be >= 1");
    CounterRng rng(seed, stream);
    const std::size_t limbs = (static_cast<std::size_t>(bits) + 63) / 64;
    std::vector<std::uint64_t> words(limbs);
    for (auto& w : words) w = rng.next();
    const int top_bits = bits - 64 * static_cast<int>(limbs - 1);
    if (top_bits < 64) words.back() &= (std::uint64_t{1} << top_bits) - 1;
    words.front() |= 1;
    mpz_class num;
    mpz_import(num.get_mpz_t(), limbs, -1, sizeof(std::uint64_t), 0, 0, words.data());
    mpz_class den;
    mpz_setbit(den.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    return ExactPoint(std::move(num), std::move(den), ExactPoint::Unchecked{});
}

ExactPoint gauss_map(const ExactPoint& x) {
    if (x.is_zero()) throw std::domain_error("gauss_map: orbit terminated at 0");
    mpz_class rem;
    mpz_tdiv_r(rem.get_mpz_t(), x.denominator().get_mpz_t(), x.numerator().get_mpz_t());
    if (sgn(rem) == 0) return ExactPoint();
    // gcd(den mod num, num) = gcd(den, num) = 1
    return ExactPoint(std::move(rem), x.numerator(), ExactPoint::Unchecked{});
}

CFExpansion cf_expand(const ExactPoint& x, int max_terms) {
    if (x.is_zero()) throw std::invalid_argument("cf_expand: x must be in (0, 1)");
    if (max_terms < 1) throw std::invalid_argument("cf_expand: max_terms must be >= 1");
    CFExpansion out;
    mpz_class a = x.denominator();
    mpz_class b = x.numerator();
    mpz_class p_prev = 1, q_prev = 0, p = 0, q = 1;
    mpz_class quotient, rem;
    while (sgn(b) != 0 && static_cast<int>(out.quotients.size()) < max_terms) {
        mpz_tdiv_qr(quotient.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        mpz_class p_next = quotient * p + p_prev;
        mpz_class q_next = quotient * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(p_next);
        q = std::move(q_next);
        out.quotients.push_back(quotient);
        out.convergents.push_back({p, q});
        a = std::move(b);
        b = rem;
    }
    return out;
}

ExactPoint cf_fold(const std::vector<mpz_class>& quotients) {
    mpz_class num = 0, den = 1;
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) {
        mpz_class next_den = *it * den + num;
        num = std::move(den);
        den = std::move(next_den);
    }
    return ExactPoint(std::move(num), std::move(den));
}

GaussOrbit orbit(const ExactPoint& x, int n) {
    if (x.is_zero()) throw std::invalid_argument("orbit: x must be in (0, 1)");
    if (n < 0) throw std::invalid_argument("orbit: n must be >= 0");
    GaussOrbit out;
    OrbitTracer tracer;
    tracer.trace(x.numerator(), x.denominator(), n, out);
    out.points.reserve(static_cast<std::size_t>(out.depth) + 1);
    for (int k = 0; k <= out.depth; ++k) {
        if (out.terminated && k == out.depth)
            out.points.emplace_back();
        else
            // consecutive remainders of a reduced fraction are coprime
            out.points.push_back(ExactPoint(tracer.remainder(k + 1), tracer.remainder(k), ExactPoint::Unchecked{}));
    }
    return out;
}

double ratio_to_double(const mpz_class& p, const mpz_class& q) {
    if (sgn(q) <= 0) throw std::domain_error("ratio_to_double: denominator must be positive");
    if (sgn(p) == 0) return 0.0;
    if (sgn(p) < 0) throw std::domain_error("ratio_to_double: numerator must be nonnegative");
    return static_cast<double>(ratio_long(p, q));
}

double to_double_rounded(const mpz_class& n) {
    if (sgn(n) < 0) throw std::domain_error("to_double_rounded: negative input");
    const std::size_t nbits = mpz_sizeinbase(n.get_mpz_t(), 2);
    if (sgn(n) == 0 || nbits <= 53) return mpz_get_d(n.get_mpz_t());
    long exp = 0;
    std::uint64_t m = leading_bits(n, exp);
    // bit 0 becomes a sticky bit for the 64 -> 53 rounding
    if (nbits > 64 && mpz_scan1(n.get_mpz_t(), 0) < nbits - 64) m |= 1;
    return std::ldexp(static_cast<double>(m), static_cast<int>(exp));
}

double log_of_rational(const mpz_class& p, const mpz_class& q) {
    if (sgn(p) <= 0) throw std::domain_error("log_of_rational: numerator must be >= 1");
    if (sgn(q) <= 0) throw std::domain_error("log_of_rational: denominator must be >= 1");
    long ep = 0;
    long eq = 0;
    const std::uint64_t mp = leading_bits(p, ep);
    const std::uint64_t mq = leading_bits(q, eq);
    const long double mant = static_cast<long double>(mp) / static_cast<long double>(mq);
    const long shift = ep - eq;
    const long double rho = std::ldexp(mant, static_cast<int>(shift));
    if (rho > 0.5L && rho < 2.0L) {
        // near 1: log1p of the exact difference avoids cancellation
        thread_local mpz_class diff;
        mpz_sub(diff.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        if (sgn(diff) == 0) return 0.0;
        const int sign = sgn(diff);
        mpz_abs(diff.get_mpz_t(), diff.get_mpz_t());
        const long double t = ratio_long(diff, q);
        return static_cast<double>(std::log1p(sign > 0 ? t : -t));
    }
    return static_cast<double>(std::log(mant) + static_cast<long double>(shift) * kLn2);
}

std::string orbit_to_json(const GaussOrbit& o) {
    nlohmann::json j;
    j["x"] = o.points.empty() ? std::string("0/1") : o.points.front().to_string();
    nlohmann::json quotients = nlohmann::json::array();
    for (const auto& p : o.points) {
        if (p.is_zero()) break;
        const mpz_class a = p.denominator() / p.numerator();
        quotients.push_back(a.get_str());
    }
    nlohmann::json alphas = nlohmann::json::array();
    for (const auto& p : o.points) alphas.push_back(p.to_string());
    j["quotients"] = std::move(quotients);
    j["alphas"] = std::move(alphas);
    return j.dump();
}

void OrbitTracer::trace(const mpz_class& num, const mpz_class& den, int max_depth, OrbitTrace& out,
                        double stop_tol) {
    out.logs.clear();
    out.betas.clear();
    out.depth = 0;
    out.terminated = false;
    const std::size_t need = static_cast<std::size_t>(max_depth) + 2;
    if (rems_.size() < need) rems_.resize(need);
    rems_[0] = den;
    rems_[1] = num;
    if (sgn(num) == 0) {
        out.terminated = true;
        return;
    }
    for (int k = 0;; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double log_k = log_of_rational(rems_[ku], rems_[ku + 1]);
        const double beta_k = static_cast<double>(ratio_long(rems_[ku + 1], rems_[0]));
        const double gamma_k = k == 0 ? log_k : out.betas.back() * log_k;
        out.logs.push_back(log_k);
        out.betas.push_back(beta_k);
        out.depth = k;
        if (stop_tol > 0.0 && gamma_k < stop_tol && beta_k < stop_tol) return;
        if (k == max_depth) return;
        mpz_tdiv_r(rems_[ku + 2].get_mpz_t(), rems_[ku].get_mpz_t(), rems_[ku + 1].get_mpz_t());
        if (sgn(rems_[ku + 2]) == 0) {
            out.depth = k + 1;
            out.terminated = true;
            return;
        }
    }
}

}  // namespace wilton
