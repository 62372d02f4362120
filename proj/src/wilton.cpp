#include "wilton/wilton.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace wilton {

std::vector<double> gamma_terms(const OrbitTrace& orbit) {
    std::vector<double> out;
    out.reserve(orbit.logs.size());
    for (int k = 0; k < orbit.live(); ++k) out.push_back(transfer_pow_l(orbit, k));
    return out;
}

double transfer_pow_l(const OrbitTrace& orbit, int nu) {
    if (nu < 0) throw std::invalid_argument("transfer_pow_l: nu must be >= 0");
    if (nu < orbit.live()) {
        const auto i = static_cast<std::size_t>(nu);
        return nu == 0 ? orbit.logs[0] : orbit.betas[i - 1] * orbit.logs[i];
    }
    if (orbit.terminated) return 0.0;
    throw std::out_of_range("transfer_pow_l: orbit depth " + std::to_string(orbit.depth) + " < " +
                            std::to_string(nu));
}

double truncated_wilton(const OrbitTrace& orbit, TruncationSpec spec) {
    if (spec.n < 0) throw std::invalid_argument("truncated_wilton: n must be >= 0");
    if (!orbit.terminated && orbit.depth < spec.n)
        throw std::out_of_range("truncated_wilton: orbit too shallow for n = " + std::to_string(spec.n));
    return wilton_partial(orbit, spec.n);
}

double wilton_partial(const OrbitTrace& orbit, int last) {
    const int stop = std::min(last, orbit.live() - 1);
    double sum = 0.0;
    for (int k = 0; k <= stop; ++k) {
        const double g = transfer_pow_l(orbit, k);
        sum += (k & 1) ? -g : g;
    }
    return sum;
}

WiltonValue wilton_eval(const OrbitTrace& orbit, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("wilton_eval: tol must be positive");
    WiltonValue out;
    if (orbit.live() == 0) return out;
    if (orbit.terminated) {
        out.value = wilton_partial(orbit, orbit.live() - 1);
        out.terms_used = orbit.live();
        return out;
    }
    double sum = 0.0;
    int last = 0;
    bool converged = false;
    for (int k = 0; k < orbit.live(); ++k) {
        const double g = transfer_pow_l(orbit, k);
        sum += (k & 1) ? -g : g;
        last = k;
        if (g < tol && orbit.betas[static_cast<std::size_t>(k)] < tol) {
            converged = true;
            break;
        }
    }
    out.value = sum;
    out.terms_used = last + 1;
    const double scale = orbit.betas[static_cast<std::size_t>(last)] * kGaussMeanLog;
    if (converged && last + 1 < orbit.live())
        out.tail_estimate = std::max(transfer_pow_l(orbit, last + 1), scale);
    else
        out.tail_estimate = scale;
    return out;
}

double functional_eq_residual(const ExactPoint& x, int depth) {
    if (depth < 2) throw std::invalid_argument("functional_eq_residual: depth must be >= 2");
    if (x.is_zero()) throw std::invalid_argument("functional_eq_residual: x must be in (0, 1)");
    OrbitTracer tracer;
    OrbitTrace tx;
    tracer.trace(x.numerator(), x.denominator(), depth, tx);
    const double wx = wilton_partial(tx, depth);
    const double lx = tx.logs[0];
    const ExactPoint ax = gauss_map(x);
    if (ax.is_zero()) return std::abs(wx - lx);
    OrbitTrace ta;
    tracer.trace(ax.numerator(), ax.denominator(), depth - 1, ta);
    const double wa = wilton_partial(ta, depth - 1);
    return std::abs(wx - lx + x.value() * wa);
}

double eq3_residual(const ExactPoint& x, int n, int depth) {
    if (n < 0) throw std::invalid_argument("eq3_residual: n must be >= 0");
    if (depth < n + 5) throw std::invalid_argument("eq3_residual: depth must be >= n + 5");
    if (x.is_zero()) throw std::invalid_argument("eq3_residual: x must be in (0, 1)");
    OrbitTracer tracer;
    OrbitTrace tx;
    tracer.trace(x.numerator(), x.denominator(), depth, tx);
    const double l_n = truncated_wilton(tx, {n});
    const double wx = wilton_partial(tx, depth);
    if (tx.terminated && tx.depth <= n + 1) return std::abs(l_n - wx);

    ExactPoint y = x;
    for (int i = 0; i <= n; ++i) y = gauss_map(y);
    OrbitTrace ty;
    tracer.trace(y.numerator(), y.denominator(), depth - n - 1, ty);
    const double wy = wilton_partial(ty, depth - n - 1);
    const double sign = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
    return std::abs(l_n - wx + sign * tx.betas[static_cast<std::size_t>(n)] * wy);
}

// ---------------------------------------------------------------------------
// g series

GSeriesEvaluator::GSeriesEvaluator(GSeriesSpec spec) : spec_(spec) {
    if (spec.N < 1) throw std::invalid_argument("g_series: N must be >= 1");
    terms_ = spec.average_pair ? 2 * spec.N : spec.N;
    inv_.resize(static_cast<std::size_t>(terms_) + 1);
    inv_[0] = 0.0;
    double h = 0.0;
    for (long l = 1; l <= terms_; ++l) {
        inv_[static_cast<std::size_t>(l)] = 1.0 / static_cast<double>(l);
        h += inv_[static_cast<std::size_t>(l)];
        if (l == spec.N || l == terms_) harmonic_at_.push_back(h);
    }
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Fractional parts {l x} for x = p / 2^bits. The state for index l is
// l * P mod 2^128, P the leading 128 bits of p aligned to a whole number of
// limbs; the discarded low limbs can only add a carry into the top limb, and
// only when the state's low word is within l of overflowing, where it is
// resolved exactly. Four lanes with stride 4 keep the adds independent.
class DyadicFractions {
public:
    DyadicFractions(const mpz_class& p, unsigned long bits) {
        const std::size_t limbs = (bits + 63) / 64;
        mpz_class aligned = p;
        aligned <<= static_cast<mp_bitcnt_t>(64 * limbs - bits);
        const mpz_srcptr z = aligned.get_mpz_t();
        const u64 hi = mpz_getlimbn(z, limbs - 1);
        const u64 lo = limbs >= 2 ? mpz_getlimbn(z, limbs - 2) : 0;
        P_ = (static_cast<u128>(hi) << 64) | lo;
        if (limbs > 2) {
            low_bits_ = 64 * (limbs - 2);
            mpz_tdiv_r_2exp(low_.get_mpz_t(), z, low_bits_);
        }
        has_low_ = sgn(low_) != 0;
    }

    // sum_{l = from}^{to} {l x} / l
    double accumulate(long from, long to, const double* inv) const {
        constexpr u64 kMax = std::numeric_limits<u64>::max();
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        u64 hi[4], lo[4];
        for (int j = 0; j < 4; ++j) {
            const u128 st = static_cast<u128>(from + j) * P_;
            hi[j] = static_cast<u64>(st >> 64);
            lo[j] = static_cast<u64>(st);
        }
        const u128 stride = 4 * P_;
        const u64 step_hi = static_cast<u64>(stride >> 64), step_lo = static_cast<u64>(stride);
        long l = from;
        for (; l + 3 <= to; l += 4) {
            for (int j = 0; j < 4; ++j) {
                const u64 idx = static_cast<u64>(l + j);
                u64 top = hi[j];
                if (lo[j] > kMax - idx && has_low_) [[unlikely]]
                    top += carry(static_cast<long>(idx), lo[j]);
                acc[j] += static_cast<double>(static_cast<std::int64_t>(top >> 1)) * inv[idx];
                const u64 next = lo[j] + step_lo;
                hi[j] += step_hi + (next < lo[j] ? 1 : 0);
                lo[j] = next;
            }
        }
        for (int j = 0; l <= to; ++l, ++j) {
            u64 top = hi[j];
            if (lo[j] > kMax - static_cast<u64>(l) && has_low_) top += carry(l, lo[j]);
            acc[0] += static_cast<double>(static_cast<std::int64_t>(top >> 1)) * inv[l];
        }
        return ((acc[0] + acc[1]) + (acc[2] + acc[3])) * 0x1p-63;
    }

private:

    // carry out of the discarded limbs into the state's low word
    u64 carry(long l, u64 s_lo) const {
        mpz_class c = low_ * static_cast<unsigned long>(l);
        c >>= low_bits_;  // < l
        const u64 add = mpz_get_ui(c.get_mpz_t());
        return s_lo + add < s_lo ? 1 : 0;
    }

    u128 P_ = 0;
    mpz_class low_;
    mp_bitcnt_t low_bits_ = 0;
    bool has_low_ = false;
};

bool is_power_of_two(const mpz_class& n) { return mpz_popcount(n.get_mpz_t()) == 1; }

}  // namespace

void GSeriesEvaluator::frac_sums(const ExactPoint& x, double* out) const {
    const mpz_class& p = x.numerator();
    const mpz_class& q = x.denominator();
    const long first_stop = spec_.N;
    const double* inv = inv_.data();

    if (is_power_of_two(q) && sgn(p) != 0) {
        DyadicFractions fr(p, mpz_sizeinbase(q.get_mpz_t(), 2) - 1);
        out[0] = fr.accumulate(1, first_stop, inv);
        if (terms_ > first_stop) out[1] = out[0] + fr.accumulate(first_stop + 1, terms_, inv);
        return;
    }
    if (mpz_sizeinbase(q.get_mpz_t(), 2) <= 62) {
        const u64 qq = mpz_get_ui(q.get_mpz_t());
        const u64 pp = mpz_get_ui(p.get_mpz_t());
        const double qd = static_cast<double>(qq);
        u64 r = 0;
        double acc = 0.0;
        for (long l = 1; l <= terms_; ++l) {
            r += pp;
            if (r >= qq) r -= qq;
            acc += (static_cast<double>(r) / qd) * inv[l];
            if (l == first_stop) out[0] = acc;
        }
        if (terms_ > first_stop) out[1] = acc;
        return;
    }
    mpz_class r = 0;
    double acc = 0.0;
    for (long l = 1; l <= terms_; ++l) {
        r += p;
        if (r >= q) r -= q;
        acc += ratio_to_double(r, q) * inv[l];
        if (l == first_stop) out[0] = acc;
    }
    if (terms_ > first_stop) out[1] = acc;
}

GSeriesValue GSeriesEvaluator::evaluate(const ExactPoint& x) const {
    double sums[2] = {0.0, 0.0};
    frac_sums(x, sums);
    GSeriesValue out;
    out.resonant = x.denominator() <= static_cast<unsigned long>(terms_);
    const double first = harmonic_at_[0] - 2.0 * sums[0];
    if (spec_.average_pair) {
        const double second = harmonic_at_[1] - 2.0 * sums[1];
        out.value = 0.5 * (first + second);
    } else {
        out.value = first;
    }
    return out;
}

GSeriesValue g_series(const ExactPoint& x, GSeriesSpec spec) { return GSeriesEvaluator(spec).evaluate(x); }

double g_minus_wilton(const ExactPoint& x, GSeriesSpec gspec, int n) {
    const double g = g_series(x, gspec).value;
    return g - truncated_wilton(orbit(x, n), {n});
}

}  // namespace wilton
