#include "hpl/gowers.hpp"

#include "hpl/accum.hpp"
#include "hpl/errors.hpp"
#include "hpl/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace hpl {

namespace {

struct KernelAccum {
    cplx sum{};
    std::uint64_t terms = 0;
    KernelAccum& operator+=(const KernelAccum& o) {
        sum += o.sum;
        terms += o.terms;
        return *this;
    }
};

// Root of the 2^s power with the imaginary-residue policy: tiny residues are
// rounding noise and get truncated, anything larger means the kernel is wrong.
double take_root(cplx total, int s, const char* what) {
    const double mag = std::abs(total);
    if (std::abs(total.imag()) > 1e-9 * std::max(mag, 1.0))
        throw internal_error(std::string(what) + ": imaginary residue too large");
    double re = total.real();
    if (re < 0) {
        if (re < -1e-9 * std::max(mag, 1.0))
            throw internal_error(std::string(what) + ": negative power sum");
        re = 0;
    }
    return std::pow(re, 1.0 / static_cast<double>(1u << s));
}

// One slice of the direct Z-kernel: h[0] fixed, remaining difference
// coordinates enumerated recursively, n swept over the range keeping all 2^s
// corners inside the support window [0, H).
void direct_slice(std::span<const cplx> f, int s, long long H,
                  std::vector<long long>& h, int depth, KernelAccum& acc) {
    if (depth == s) {
        long long neg = 0, pos = 0;
        for (long long hi : h) (hi < 0 ? neg : pos) += hi;
        const long long n_lo = -neg;          // smallest corner >= 0
        const long long n_hi = H - 1 - pos;   // largest corner <= H-1
        if (n_lo > n_hi) return;

        const int corners = 1 << s;
        long long ssum[1 << kMaxGowersS];
        ssum[0] = 0;
        for (int mask = 1; mask < corners; ++mask) {
            const int low = std::countr_zero(static_cast<unsigned>(mask));
            ssum[mask] = ssum[mask & (mask - 1)] + h[static_cast<std::size_t>(low)];
        }
        PairwiseSum<cplx> inner;
        for (long long n = n_lo; n <= n_hi; ++n) {
            cplx prod = f[static_cast<std::size_t>(n)];
            for (int mask = 1; mask < corners; ++mask) {
                const cplx v = f[static_cast<std::size_t>(n + ssum[mask])];
                prod *= (std::popcount(static_cast<unsigned>(mask)) & 1) ? std::conj(v) : v;
            }
            inner.add(prod);
        }
        acc.sum += inner.total();
        acc.terms += static_cast<std::uint64_t>(n_hi - n_lo + 1);
        return;
    }
    long long used = 0;
    for (int i = 0; i < depth; ++i) used += std::llabs(h[static_cast<std::size_t>(i)]);
    const long long room = H - 1 - used;
    for (long long hd = -room; hd <= room; ++hd) {
        h[static_cast<std::size_t>(depth)] = hd;
        direct_slice(f, s, H, h, depth + 1, acc);
    }
}

// 2^s-th power of the unnormalized U^s norm of f supported on [0, H).
KernelAccum direct_kernel_power(std::span<const cplx> f, int s) {
    const long long H = static_cast<long long>(f.size());
    return parallel_chunked_sum<KernelAccum>(
        static_cast<std::size_t>(2 * H - 1), 1,
        [&](std::size_t begin, std::size_t) {
            KernelAccum acc;
            std::vector<long long> h(static_cast<std::size_t>(s));
            h[0] = static_cast<long long>(begin) - (H - 1);
            direct_slice(f, s, H, h, 1, acc);
            return acc;
        });
}

void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// 2^s-th power of the averaged cyclic norm.
double cyclic_power(std::span<const cplx> f, int s) {
    const std::size_t N = f.size();
    if (s == 1) {
        PairwiseSum<cplx> acc;
        for (const cplx& v : f) acc.add(v);
        const double m = std::abs(acc.total() / static_cast<double>(N));
        return m * m;
    }
    if (s == 2) return u2_fourth_power_fourier(f);
    PairwiseSum<double> acc;
    std::vector<cplx> g(N);
    for (std::size_t h = 0; h < N; ++h) {
        for (std::size_t n = 0; n < N; ++n)
            g[n] = std::conj(f[n]) * f[(n + h) % N];
        acc.add(cyclic_power(g, s - 1));
    }
    return acc.total() / static_cast<double>(N);
}

// Interval norm through the cyclic group, N' a power of two >= 2H. Exact by
// the interval/group bridge, and fast because both transforms are FFTs.
double interval_norm_cyclic(std::span<const cplx> f, int s) {
    const std::size_t H = f.size();
    std::size_t Np = 1;
    while (Np < 2 * H) Np <<= 1;
    std::vector<cplx> emb(Np, cplx{});
    std::copy(f.begin(), f.end(), emb.begin());
    std::vector<cplx> ind(Np, cplx{});
    std::fill(ind.begin(), ind.begin() + static_cast<long long>(H), cplx(1.0, 0.0));
    const double num = cyclic_power(emb, s);
    const double den = cyclic_power(ind, s);
    if (den <= 0) throw internal_error("interval_norm_cyclic: zero denominator");
    return std::pow(num / den, 1.0 / static_cast<double>(1u << s));
}

std::uint64_t direct_work_estimate(std::uint64_t H, int s) {
    std::uint64_t work = H;
    for (int i = 0; i < s; ++i) {
        if (work > (std::uint64_t{1} << 62) / (2 * H)) return ~std::uint64_t{0};
        work *= 2 * H;
    }
    return work;
}

void check_s(int s) {
    if (s < 1) throw invalid_argument("gowers: s must be >= 1");
    if (s > kMaxGowersS) throw invalid_argument("gowers: s capped at 5");
}

} // namespace

GowersResult gowers_unnormalized(const FiniteSequence& f, int s) {
    check_s(s);
    if (f.data.empty()) return {s, 0.0, GowersNormalization::unnormalized_z, 0};
    KernelAccum acc = direct_kernel_power(f.data, s);
    GowersResult r;
    r.s = s;
    r.normalization = GowersNormalization::unnormalized_z;
    r.term_count = acc.terms;
    r.value = take_root(acc.sum, s, "gowers_unnormalized");
    return r;
}

GowersResult gowers_interval(const FiniteSequence& f, long long lo, long long hi, int s) {
    check_s(s);
    if (lo > hi) throw invalid_argument("gowers_interval: empty interval");
    const std::uint64_t H = static_cast<std::uint64_t>(hi - lo + 1);
    std::vector<cplx> window(H);
    for (std::uint64_t i = 0; i < H; ++i)
        window[i] = f.at(lo + static_cast<long long>(i));

    GowersResult r;
    r.s = s;
    r.normalization = GowersNormalization::interval;
    if (direct_work_estimate(H, s) <= 200'000'000ull) {
        FiniteSequence g{0, window};
        KernelAccum num = direct_kernel_power(g.data, s);
        std::vector<cplx> ones(H, cplx(1.0, 0.0));
        KernelAccum den = direct_kernel_power(ones, s);
        r.term_count = num.terms;
        const double dv = take_root(den.sum, s, "gowers_interval");
        r.value = take_root(num.sum, s, "gowers_interval") / dv;
    } else {
        r.value = interval_norm_cyclic(window, s);
    }
    return r;
}

GowersResult gowers_cyclic(std::span<const cplx> f, int s) {
    check_s(s);
    if (f.empty()) throw invalid_argument("gowers_cyclic: empty input");
    GowersResult r;
    r.s = s;
    r.normalization = GowersNormalization::cyclic_group;
    r.value = std::pow(cyclic_power(f, s), 1.0 / static_cast<double>(1u << s));
    return r;
}

GowersResult gowers_cyclic_direct(std::span<const cplx> f, int s) {
    check_s(s);
    const std::size_t N = f.size();
    if (N == 0) throw invalid_argument("gowers_cyclic_direct: empty input");
    const int corners = 1 << s;
    std::vector<std::size_t> h(static_cast<std::size_t>(s), 0);
    PairwiseSum<cplx> acc;
    std::uint64_t terms = 0;
    for (;;) {
        std::size_t ssum[1 << kMaxGowersS];
        ssum[0] = 0;
        for (int mask = 1; mask < corners; ++mask) {
            const int low = std::countr_zero(static_cast<unsigned>(mask));
            ssum[mask] = ssum[mask & (mask - 1)] + h[static_cast<std::size_t>(low)];
        }
        for (std::size_t n = 0; n < N; ++n) {
            cplx prod(1.0, 0.0);
            for (int mask = 0; mask < corners; ++mask) {
                const cplx v = f[(n + ssum[mask]) % N];
                prod *= (std::popcount(static_cast<unsigned>(mask)) & 1) ? std::conj(v) : v;
            }
            acc.add(prod);
            ++terms;
        }
        int d = 0;
        while (d < s && ++h[static_cast<std::size_t>(d)] == N) {
            h[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == s) break;
    }
    GowersResult r;
    r.s = s;
    r.normalization = GowersNormalization::cyclic_group;
    r.term_count = terms;
    const double scale = std::pow(static_cast<double>(N), static_cast<double>(s + 1));
    r.value = take_root(acc.total() / scale, s, "gowers_cyclic_direct");
    return r;
}

double u2_fourth_power_fourier(std::span<const cplx> f) {
    std::vector<cplx> hat = dft(f);
    const double N = static_cast<double>(f.size());
    PairwiseSum<double> acc;
    for (const cplx& c : hat) {
        const double m = std::norm(c) / (N * N); // |f_hat|^2 with 1/N normalization
        acc.add(m * m);
    }
    return acc.total();
}

std::vector<cplx> dft(std::span<const cplx> a) {
    const std::size_t N = a.size();
    std::vector<cplx> out(a.begin(), a.end());
    if (std::has_single_bit(N)) {
        fft_pow2(out, false);
        return out;
    }
    for (std::size_t k = 0; k < N; ++k) {
        PairwiseSum<cplx> acc;
        for (std::size_t n = 0; n < N; ++n) {
            const double ang = -kTwoPi * static_cast<double>((n * k) % N) / static_cast<double>(N);
            acc.add(a[n] * cplx(std::cos(ang), std::sin(ang)));
        }
        out[k] = acc.total();
    }
    return out;
}

std::pair<double, double> lemma23_bridge(const FiniteSequence& f, std::uint64_t N,
                                         std::uint64_t N_prime, int s) {
    check_s(s);
    if (N == 0) throw invalid_argument("lemma23_bridge: N must be positive");
    if (N_prime < 2 * N)
        throw precondition_violation("lemma23_bridge: requires N' >= 2N");

    const double interval_value = gowers_interval(f, 1, static_cast<long long>(N), s).value;

    std::vector<cplx> emb(N_prime, cplx{});
    std::vector<cplx> ind(N_prime, cplx{});
    for (std::uint64_t n = 1; n <= N; ++n) {
        emb[n % N_prime] = f.at(static_cast<long long>(n));
        ind[n % N_prime] = cplx(1.0, 0.0);
    }
    const double num = gowers_cyclic(emb, s).value;
    const double den = gowers_cyclic(ind, s).value;
    return {interval_value, num / den};
}

std::pair<double, double> ap_restriction_check(const FiniteSequence& u, long long a,
                                               long long Q, long long X, long long H,
                                               int s) {
    if (s < 2)
        throw invalid_argument("ap_restriction_check: requires s >= 2");
    check_s(s);
    if (Q < 1 || a < 0 || a >= Q)
        throw invalid_argument("ap_restriction_check: need 0 <= a < Q");
    if (H < 1) throw invalid_argument("ap_restriction_check: empty window");

    FiniteSequence restricted;
    restricted.offset = X + 1;
    restricted.data.resize(static_cast<std::size_t>(H));
    for (long long i = 0; i < H; ++i) {
        const long long n = X + 1 + i;
        const long long residue = ((n % Q) + Q) % Q;
        restricted.data[static_cast<std::size_t>(i)] =
            (residue == a) ? u.at(n) : cplx{};
    }
    const double full = gowers_interval(u, X + 1, X + H, s).value;
    const double part = gowers_interval(restricted, X + 1, X + H, s).value;
    return {part, full};
}

double poly_frac(std::span<const double> poly, double n) {
    // Horner with a mod-1 reduction after each step. Dropping an integer k
    // from the accumulator perturbs the final value by an integer multiple
    // of powers of n, so the fractional part is unchanged as long as n is an
    // integer -- which is the only way this is called.
    long double acc = 0.0L;
    for (std::size_t i = poly.size(); i-- > 0;) {
        acc = acc * static_cast<long double>(n) + static_cast<long double>(poly[i]);
        acc -= std::floor(acc);
    }
    return static_cast<double>(acc);
}

cplx weighted_polynomial_expsum(const VonMangoldtTable& table, const WTrick& trick,
                                std::span<const double> poly, std::uint64_t N,
                                std::uint64_t L) {
    if (trick.W * (N + L) + trick.b > table.limit())
        throw out_of_range_error("weighted_polynomial_expsum: range beyond table");
    PairwiseSum<cplx> acc;
    for (std::uint64_t n = N; n <= N + L; ++n) {
        const double weight = w_tricked_lambda(table, trick, n) - 1.0;
        acc.add(weight * e_of(poly_frac(poly, static_cast<double>(n))));
    }
    return acc.total() / static_cast<double>(L + 1);
}

} // namespace hpl
