#include "wilton/moment_lab.hpp"

#include "wilton/parallel.hpp"
#include "wilton/random.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wilton {

std::string to_string(Measure m) { return m == Measure::gauss ? "gauss" : "lebesgue"; }

double GaussMeasure::density(double x) noexcept { return 1.0 / ((1.0 + x) * std::numbers::ln2); }

double GaussMeasure::interval(double a, double b) { return measure_interval(a, b); }

std::string integrand_label(const IntegrandRef& f) {
    std::ostringstream os;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogReciprocal>)
                os << "l";
            else if constexpr (std::is_same_v<T, TruncatedWiltonRef>)
                os << "L(n=" << v.n << ")";
            else if constexpr (std::is_same_v<T, GSeriesRef>)
                os << "g(N=" << v.spec.N << (v.spec.average_pair ? " avg" : "") << ")";
            else
                os << "W(tol=" << v.tol << ")";
        },
        f);
    return os.str();
}

void validate(const IntegrandRef& f) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TruncatedWiltonRef>) {
                if (v.n < 0) throw std::invalid_argument("integrand L: n must be >= 0");
            } else if constexpr (std::is_same_v<T, GSeriesRef>) {
                if (v.spec.N < 1) throw std::invalid_argument("integrand g: N must be >= 1");
            } else if constexpr (std::is_same_v<T, WiltonRef>) {
                if (!(v.tol > 0.0)) throw std::invalid_argument("integrand W: tol must be positive");
            }
        },
        f);
}

void ProposalMix::validate() const {
    if (w_left < 0.0 || w_right < 0.0 || w_uniform < 0.0)
        throw std::invalid_argument("ProposalMix: weights must be nonnegative");
    if (std::abs(w_left + w_right + w_uniform - 1.0) > 1e-12)
        throw std::invalid_argument("ProposalMix: weights must sum to 1");
    if (shape < 1) throw std::invalid_argument("ProposalMix: shape must be >= 1");
}

double ProposalMix::density(double lx, double l1x) const {
    const double gamma = gamma_int(shape - 1);
    double q = w_uniform;
    if (w_left > 0.0) q += w_left * std::pow(lx, shape - 1) / gamma;
    if (w_right > 0.0) q += w_right * std::pow(l1x, shape - 1) / gamma;
    return q;
}

double gamma_int(int L) {
    if (L < 0) throw std::invalid_argument("gamma_int: L must be >= 0");
    if (L > 170) throw std::overflow_error("gamma_int: Gamma(L + 1) overflows binary64 for L > 170");
    static const std::array<double, 171> table = [] {
        std::array<double, 171> t{};
        mpz_class f = 1;
        for (unsigned long i = 0; i < t.size(); ++i) {
            if (i > 0) f *= i;
            t[i] = to_double_rounded(f);
        }
        return t;
    }();
    return table[static_cast<std::size_t>(L)];
}

double tail_log_moment(double x0, int L) {
    if (!(x0 > 0.0 && x0 < 1.0)) throw std::invalid_argument("tail_log_moment: x0 must be in (0, 1)");
    if (L < 0) throw std::invalid_argument("tail_log_moment: L must be >= 0");
    if (L == 0) return 1.0 - x0;
    const double t = -std::log(x0);
    const double a = static_cast<double>(L) + 1.0;
    if (t < a + 1.0) {
        // gamma(a, t) = t^a e^{-t} sum_n t^n / (a (a+1) ... (a+n))
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 100000; ++n) {
            term *= t / (a + n);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return std::exp(a * std::log(t) - t + std::log(sum));
    }
    // Gamma(a, t) by modified Lentz on the Legendre continued fraction
    constexpr double tiny = 1e-300;
    double bcf = t + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / bcf;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        bcf += 2.0;
        d = an * d + bcf;
        if (std::abs(d) < tiny) d = tiny;
        c = bcf + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    const double upper = std::exp(a * std::log(t) - t) * h;
    return gamma_int(L) - upper;
}

double measure_interval(double a, double b) {
    if (!(a >= 0.0 && a < b && b <= 1.0))
        throw std::invalid_argument("measure_interval: need 0 <= a < b <= 1");
    return std::log1p((b - a) / (1.0 + a)) / std::numbers::ln2;
}

double invariance_residual(double a, double b, long branch_cutoff) {
    if (branch_cutoff < 1) throw std::invalid_argument("invariance_residual: branch_cutoff must be >= 1");
    const double target = measure_interval(a, b);
    // Neumaier summation over the branches (1/(n+b), 1/(n+a))
    double sum = 0.0;
    double comp = 0.0;
    auto add = [&](double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    };
    for (long n = 1; n <= branch_cutoff; ++n) {
        const double nd = static_cast<double>(n);
        add(measure_interval(1.0 / (nd + b), 1.0 / (nd + a)));
    }
    const double c = static_cast<double>(branch_cutoff) + 1.0;
    add(std::log1p((b - a) / (c + a)) / std::numbers::ln2);
    return std::abs(target - (sum + comp));
}

// ---------------------------------------------------------------------------
// sampling

namespace {

constexpr std::uint64_t kBlockSize = 4096;

struct SampleContext {
    const mpz_class* num = nullptr;
    const mpz_class* den = nullptr;
    double x = 0.0;         // binary64 value of the sample
    double lx = 0.0;        // l(x)
    double proposal = 1.0;  // q(x)
};

// Draws a dyadic point from the proposal into num (denominator 2^bits).
// Returns false when the draw falls below 2^-bits.
class PointSampler {
public:
    PointSampler(const ProposalMix& mix, int bits) : mix_(mix), bits_(bits) {
        mpz_setbit(den_.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
        words_.resize((static_cast<std::size_t>(bits) + 63) / 64);
    }

    const mpz_class& denominator() const { return den_; }

    bool draw(CounterRng& rng, mpz_class& num) {
        const double pick = rng.uniform();
        if (pick < mix_.w_left) return endpoint(rng, num, false);
        if (pick < mix_.w_left + mix_.w_right) return endpoint(rng, num, true);
        random_bits(rng, static_cast<std::size_t>(bits_), num);
        mpz_setbit(num.get_mpz_t(), 0);
        return true;
    }

private:
    bool endpoint(CounterRng& rng, mpz_class& num, bool mirrored) {
        double u = 0.0;
        for (int j = 0; j < mix_.shape; ++j) u -= std::log(rng.uniform());
        const double z = std::exp(-u);
        if (!(z > 0.0)) return false;
        int e = 0;
        const double f = std::frexp(z, &e);
        const auto mant = static_cast<unsigned long>(std::ldexp(f, 53));
        const long shift = static_cast<long>(bits_) + e - 53;
        if (shift >= 0) {
            random_bits(rng, static_cast<std::size_t>(shift), num);  // uniform within the cell
            mpz_set_ui(tmp_.get_mpz_t(), mant);
            mpz_mul_2exp(tmp_.get_mpz_t(), tmp_.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
            mpz_ior(num.get_mpz_t(), num.get_mpz_t(), tmp_.get_mpz_t());
        } else {
            if (shift <= -53) return false;
            mpz_set_ui(num.get_mpz_t(), mant >> (-shift));
        }
        mpz_setbit(num.get_mpz_t(), 0);
        if (mirrored) mpz_sub(num.get_mpz_t(), den_.get_mpz_t(), num.get_mpz_t());
        return true;
    }

    void random_bits(CounterRng& rng, std::size_t nbits, mpz_class& out) {
        const std::size_t limbs = (nbits + 63) / 64;
        if (limbs == 0) {
            out = 0;
            return;
        }
        for (std::size_t i = 0; i < limbs; ++i) words_[i] = rng.next();
        const std::size_t top = nbits - 64 * (limbs - 1);
        if (top < 64) words_[limbs - 1] &= (std::uint64_t{1} << top) - 1;
        mpz_import(out.get_mpz_t(), limbs, -1, sizeof(std::uint64_t), 0, 0, words_.data());
    }

    ProposalMix mix_;
    int bits_;
    mpz_class den_;
    mpz_class tmp_;
    std::vector<std::uint64_t> words_;
};

// fn(ctx, out) writes one value per channel; NaN marks a rejected sample.
using SampleFn = std::function<void(const SampleContext&, double*)>;

struct ChannelStats {
    std::vector<Moments> moments;
    std::uint64_t rejected = 0;
};

// Evaluates fn on samples [0, samples) in fixed blocks and merges the per
// block statistics pairwise in block order, so the result does not depend on
// the worker count. When sink is non-null, channel 0 is stored per sample.
ChannelStats run_samples(std::uint64_t samples, std::uint64_t seed, const ProposalMix& mix, int bits,
                         std::size_t channels, const std::function<SampleFn()>& make_fn,
                         std::vector<double>* sink = nullptr) {
    mix.validate();
    if (bits < 1) throw std::invalid_argument("sampling: bits must be >= 1");
    const std::size_t blocks = static_cast<std::size_t>((samples + kBlockSize - 1) / kBlockSize);
    std::vector<std::vector<Moments>> per_block(blocks, std::vector<Moments>(channels));
    std::vector<std::uint64_t> rejected(blocks, 0);
    if (sink) sink->assign(samples, 0.0);

    for_each_block(blocks, [&](std::size_t blk) {
        PointSampler sampler(mix, bits);
        SampleFn fn = make_fn();
        mpz_class num;
        mpz_class complement;
        std::vector<double> out(channels);
        SampleContext ctx;
        ctx.num = &num;
        ctx.den = &sampler.denominator();
        const std::uint64_t begin = blk * kBlockSize;
        const std::uint64_t end = std::min<std::uint64_t>(samples, begin + kBlockSize);
        for (std::uint64_t i = begin; i < end; ++i) {
            CounterRng rng(seed, i);
            bool ok = sampler.draw(rng, num);
            if (ok) {
                mpz_sub(complement.get_mpz_t(), ctx.den->get_mpz_t(), num.get_mpz_t());
                ctx.x = ratio_to_double(num, *ctx.den);
                ctx.lx = log_of_rational(*ctx.den, num);
                const double l1x = log_of_rational(*ctx.den, complement);
                ctx.proposal = mix.density(ctx.lx, l1x);
                fn(ctx, out.data());
                for (double v : out) ok = ok && std::isfinite(v);
            }
            if (!ok) ++rejected[blk];
            for (std::size_t c = 0; c < channels; ++c) per_block[blk][c].add(ok ? out[c] : 0.0);
            if (sink) (*sink)[i] = ok ? out[0] : std::numeric_limits<double>::quiet_NaN();
        }
    });

    ChannelStats stats;
    stats.moments.resize(channels);
    std::vector<Moments> column(blocks);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t b = 0; b < blocks; ++b) column[b] = per_block[b][c];
        stats.moments[c] = merge_pairwise(column.data(), column.size());
    }
    for (auto r : rejected) stats.rejected += r;
    return stats;
}

// Per-thread evaluator of f(x) at a sample.
std::function<double(const SampleContext&)> make_integrand(const IntegrandRef& f, int bits) {
    return std::visit(
        [bits](const auto& v) -> std::function<double(const SampleContext&)> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogReciprocal>) {
                return [](const SampleContext& ctx) { return ctx.lx; };
            } else if constexpr (std::is_same_v<T, TruncatedWiltonRef>) {
                auto tracer = std::make_shared<OrbitTracer>();
                auto trace = std::make_shared<OrbitTrace>();
                const int n = v.n;
                return [tracer, trace, n](const SampleContext& ctx) {
                    tracer->trace(*ctx.num, *ctx.den, n, *trace);
                    return truncated_wilton(*trace, {n});
                };
            } else if constexpr (std::is_same_v<T, GSeriesRef>) {
                auto eval = std::make_shared<GSeriesEvaluator>(v.spec);
                return [eval](const SampleContext& ctx) {
                    return eval->evaluate(ExactPoint(*ctx.num, *ctx.den)).value;
                };
            } else {
                auto tracer = std::make_shared<OrbitTracer>();
                auto trace = std::make_shared<OrbitTrace>();
                const double tol = v.tol;
                const int max_depth = 4 * bits + 8;  // Euclid on a bits-bit denominator ends well before
                return [tracer, trace, tol, max_depth](const SampleContext& ctx) {
                    tracer->trace(*ctx.num, *ctx.den, max_depth, *trace, tol);
                    return wilton_eval(*trace, tol).value;
                };
            }
        },
        f);
}

std::function<SampleFn()> moment_fn(const IntegrandRef& f, int k, Measure measure, int bits) {
    return [f, k, measure, bits]() -> SampleFn {
        auto eval = make_integrand(f, bits);
        return [eval, k, measure](const SampleContext& ctx, double* out) {
            const double v = eval(ctx);
            double y = std::pow(v * v, k) / ctx.proposal;
            if (measure == Measure::gauss) y *= GaussMeasure::density(ctx.x);
            out[0] = y;
        };
    };
}

void check_moment_args(const IntegrandRef& f, int k, std::uint64_t samples) {
    validate(f);
    if (k < 1) throw std::invalid_argument("moment_estimate: k must be >= 1");
    if (samples < 1000) throw std::invalid_argument("moment_estimate: samples must be >= 1000");
}

}  // namespace

MomentEstimate moment_estimate(const IntegrandRef& f, int k, Measure measure, std::uint64_t samples,
                               std::uint64_t seed, const ProposalMix& proposal, int bits) {
    check_moment_args(f, k, samples);
    const ChannelStats stats = run_samples(samples, seed, proposal, bits, 1, moment_fn(f, k, measure, bits));
    MomentEstimate est;
    est.integrand = integrand_label(f);
    est.k = k;
    est.measure = measure;
    est.value = stats.moments[0].mean;
    est.std_error = std::sqrt(stats.moments[0].variance() / static_cast<double>(samples));
    est.samples = samples;
    est.seed = seed;
    est.ratio_to_2gamma = est.value / (2.0 * gamma_int(2 * k));
    est.rejected = stats.rejected;
    est.rejection_warning = static_cast<double>(stats.rejected) > 1e-3 * static_cast<double>(samples);
    return est;
}

std::vector<double> weighted_samples(const IntegrandRef& f, int k, Measure measure, std::uint64_t samples,
                                     std::uint64_t seed, const ProposalMix& proposal, int bits) {
    check_moment_args(f, k, samples);
    std::vector<double> values;
    run_samples(samples, seed, proposal, bits, 1, moment_fn(f, k, measure, bits), &values);
    return values;
}

std::vector<MomentEstimate> moment_table(const IntegrandRef& f, const std::vector<int>& ks,
                                         const MomentConfig& config) {
    if (ks.empty()) throw std::invalid_argument("moment_table: ks must be nonempty");
    validate(f);
    for (int k : ks) {
        check_moment_args(f, k, config.samples);
        config.proposal(k).validate();
    }
    std::vector<MomentEstimate> table;
    table.reserve(ks.size());
    for (int k : ks)
        table.push_back(moment_estimate(f, k, config.measure, config.samples, config.seed, config.proposal(k),
                                        config.bits));
    return table;
}

ContractionResult contraction_check(double p, int n, std::uint64_t samples, std::uint64_t seed, int bits) {
    if (!(p > 1.0)) throw std::invalid_argument("contraction_check: p must be > 1");
    if (n < 1) throw std::invalid_argument("contraction_check: n must be >= 1");
    if (samples < 2) throw std::invalid_argument("contraction_check: samples must be >= 2");
    auto make = [p, n]() -> SampleFn {
        auto tracer = std::make_shared<OrbitTracer>();
        auto trace = std::make_shared<OrbitTrace>();
        return [tracer, trace, p, n](const SampleContext& ctx, double* out) {
            tracer->trace(*ctx.num, *ctx.den, n, *trace);
            const double w = GaussMeasure::density(ctx.x) / ctx.proposal;
            out[0] = std::pow(std::abs(transfer_pow_l(*trace, n)), p) * w;
            out[1] = std::pow(ctx.lx, p) * w;
        };
    };
    const ChannelStats stats = run_samples(samples, seed, ProposalMix::uniform(), bits, 2, make);
    const double sn = static_cast<double>(samples);
    ContractionResult r;
    r.p = p;
    r.n = n;
    r.multiplier = std::pow((std::sqrt(5.0) - 1.0) / 2.0, (n - 1) * p);
    r.lhs = stats.moments[0].mean;
    r.lhs_error = std::sqrt(stats.moments[0].variance() / sn);
    r.rhs = r.multiplier * stats.moments[1].mean;
    r.rhs_error = r.multiplier * std::sqrt(stats.moments[1].variance() / sn);
    const double rel_l = r.lhs > 0.0 ? r.lhs_error / r.lhs : 0.0;
    const double rel_r = r.rhs > 0.0 ? r.rhs_error / r.rhs : 0.0;
    r.holds = r.lhs <= r.rhs * (1.0 + 5.0 * std::hypot(rel_l, rel_r));
    return r;
}

double exceptional_bound(const ExceptionalSetSpec& s) {
    const double inner = std::exp(std::exp2((s.d - 2) / 2.0) * s.u);
    return 2.0 * std::exp(-std::exp2((s.h - 2) / 2.0) * s.v * inner);
}

std::vector<ExceptionalResult> exceptional_measure_grid(const std::vector<ExceptionalSetSpec>& specs,
                                                        std::uint64_t samples, std::uint64_t seed, int bits) {
    if (specs.empty()) throw std::invalid_argument("exceptional_measure: no sets given");
    int depth = 0;
    for (const auto& s : specs) {
        if (s.d < 0 || s.h < 1 || !(s.u > 0.0) || !(s.v > 0.0))
            throw std::invalid_argument("exceptional_measure: need d >= 0, h >= 1, u > 0, v > 0");
        depth = std::max(depth, s.d + s.h);
    }
    if (samples < 2) throw std::invalid_argument("exceptional_measure: samples must be >= 2");
    auto make = [&specs, depth]() -> SampleFn {
        auto tracer = std::make_shared<OrbitTracer>();
        auto trace = std::make_shared<OrbitTrace>();
        return [tracer, trace, &specs, depth](const SampleContext& ctx, double* out) {
            tracer->trace(*ctx.num, *ctx.den, depth, *trace);
            const double w = GaussMeasure::density(ctx.x) / ctx.proposal;
            for (std::size_t j = 0; j < specs.size(); ++j) {
                const auto& s = specs[j];
                const bool hit =
                    transfer_pow_l(*trace, s.d) >= s.u && transfer_pow_l(*trace, s.d + s.h) >= s.v;
                out[j] = hit ? w : 0.0;
            }
        };
    };
    const ChannelStats stats = run_samples(samples, seed, ProposalMix::uniform(), bits, specs.size(), make);
    std::vector<ExceptionalResult> results;
    for (std::size_t j = 0; j < specs.size(); ++j) {
        ExceptionalResult r;
        r.spec = specs[j];
        r.empirical = stats.moments[j].mean;
        r.std_error = std::sqrt(stats.moments[j].variance() / static_cast<double>(samples));
        r.bound = exceptional_bound(specs[j]);
        r.holds = r.empirical <= r.bound + 5.0 * r.std_error;
        results.push_back(r);
    }
    return results;
}

ExceptionalResult exceptional_measure(const ExceptionalSetSpec& spec, std::uint64_t samples, std::uint64_t seed,
                                      int bits) {
    return exceptional_measure_grid({spec}, samples, seed, bits).front();
}

}  // namespace wilton
