#include "hpl/sieve.hpp"

#include "hpl/accum.hpp"
#include "hpl/errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace hpl {

namespace {
constexpr char kMagic[4] = {'H', 'P', 'L', '1'};

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}
} // namespace

VonMangoldtTable::VonMangoldtTable(std::uint64_t limit) : limit_(limit) {
    if (limit < 2) throw invalid_argument("VonMangoldtTable: limit must be >= 2");
    values_.assign(limit + 1, 0.0);
    prime_.assign(limit + 1, true);
    prime_[0] = prime_[1] = false;
    for (std::uint64_t p = 2; p * p <= limit; ++p) {
        if (!prime_[p]) continue;
        for (std::uint64_t m = p * p; m <= limit; m += p) prime_[m] = false;
    }
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (!prime_[p]) continue;
        const double lp = std::log(static_cast<double>(p));
        for (std::uint64_t m = p; m <= limit; m *= p) {
            values_[m] = lp;
            if (m > limit / p) break; // next power would overflow the range
        }
    }
}

double VonMangoldtTable::lambda(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw out_of_range_error("lambda: index beyond table limit");
    return values_[n];
}

double VonMangoldtTable::psi(std::uint64_t x) const {
    if (x > limit_) throw out_of_range_error("psi: beyond table limit");
    PairwiseSum<double> acc;
    for (std::uint64_t n = 1; n <= x; ++n) acc.add(values_[n]);
    return acc.total();
}

void VonMangoldtTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open cache file for writing: " + path);
    out.write(kMagic, 4);
    put_u64(out, limit_);
    for (std::uint64_t n = 1; n <= limit_; ++n) {
        double v = values_[n];
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64(out, bits);
    }
    if (!out) throw error("write failed: " + path);
}

VonMangoldtTable VonMangoldtTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open cache file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw error("bad cache header: " + path);
    VonMangoldtTable t;
    t.limit_ = get_u64(in);
    if (t.limit_ < 2) throw error("bad cache limit: " + path);
    t.values_.assign(t.limit_ + 1, 0.0);
    t.prime_.assign(t.limit_ + 1, false);
    for (std::uint64_t n = 1; n <= t.limit_; ++n) {
        std::uint64_t bits = get_u64(in);
        double v;
        std::memcpy(&v, &bits, 8);
        t.values_[n] = v;
        // n is prime exactly when Lambda(n) = log n
        if (v > 0.0 && std::llround(std::exp(v)) == static_cast<long long>(n))
            t.prime_[n] = true;
    }
    if (!in) throw error("truncated cache file: " + path);
    return t;
}

std::uint64_t primorial(std::uint64_t w) {
    std::uint64_t W = 1;
    std::vector<bool> p(w + 1, true);
    for (std::uint64_t n = 2; n <= w; ++n) {
        if (!p[n]) continue;
        W *= n;
        for (std::uint64_t m = n * n; m <= w; m += n) p[m] = false;
    }
    return W;
}

std::uint64_t euler_phi(std::uint64_t n) {
    std::uint64_t result = n;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        result -= result / p;
        while (n % p == 0) n /= p;
    }
    if (n > 1) result -= result / n;
    return result;
}

WTrick primorial_trick(std::uint64_t w, std::uint64_t b) {
    if (w == 0) throw invalid_argument("primorial_trick: w must be positive");
    WTrick t;
    t.w = w;
    t.W = primorial(w);
    if (b == 0 || b > t.W)
        throw invalid_argument("primorial_trick: b out of range [1, W]");
    if (std::gcd(b, t.W) != 1)
        throw coprimality_violation("primorial_trick: gcd(b, W) != 1");
    t.b = b;
    t.phi_W = euler_phi(t.W);
    return t;
}

double w_tricked_lambda(const VonMangoldtTable& table, const WTrick& trick,
                        std::uint64_t n) {
    const std::uint64_t m = trick.W * n + trick.b;
    if (m > table.limit())
        throw out_of_range_error("w_tricked_lambda: W*n+b beyond table limit");
    return static_cast<double>(trick.phi_W) / static_cast<double>(trick.W) *
           table.lambda(m);
}

ApCountReport prime_count_ap(const VonMangoldtTable& table, double x, double y,
                             std::uint64_t q, std::uint64_t a) {
    if (q == 0) throw invalid_argument("prime_count_ap: q must be positive");
    if (y <= static_cast<double>(q))
        throw invalid_argument("prime_count_ap: requires y > q");
    if (x < 0 || x + y > static_cast<double>(table.limit()))
        throw out_of_range_error("prime_count_ap: range outside table");

    ApCountReport r;
    const std::uint64_t lo = static_cast<std::uint64_t>(std::floor(x)) + 1;
    const std::uint64_t hi = static_cast<std::uint64_t>(std::floor(x + y));
    PairwiseSum<double> lsum;
    for (std::uint64_t n = lo; n <= hi; ++n) {
        if (n % q != a % q) continue;
        if (table.is_prime(n)) ++r.count;
        lsum.add(table.lambda(n));
    }
    r.lambda_sum = lsum.total();

    const double phi_q = static_cast<double>(euler_phi(q));
    const double log_yq = std::log(y / static_cast<double>(q));
    r.brun_titchmarsh = 2.0 * y / (phi_q * log_yq);
    const double log_x = std::log(std::max(x, 2.0));
    r.lambda_main_term = 2.0 * y * log_x / (phi_q * log_yq);
    r.lambda_residual = r.lambda_sum - r.lambda_main_term;
    r.count_bound_violated = static_cast<double>(r.count) > r.brun_titchmarsh;
    return r;
}

double prime_vs_lambda_gap(const VonMangoldtTable& table,
                           const std::function<std::complex<double>(std::uint64_t)>& a,
                           std::uint64_t N) {
    if (N < 2 || N > table.limit())
        throw out_of_range_error("prime_vs_lambda_gap: N outside table");
    PairwiseSum<std::complex<double>> prime_sum, lambda_sum;
    std::uint64_t pi_N = 0;
    for (std::uint64_t n = 2; n <= N; ++n) {
        if (table.is_prime(n)) {
            prime_sum.add(a(n));
            ++pi_N;
        }
        const double l = table.lambda(n);
        if (l != 0.0) lambda_sum.add(l * a(n));
    }
    if (pi_N == 0) return 0.0;
    const std::complex<double> diff =
        prime_sum.total() / static_cast<double>(pi_N) -
        lambda_sum.total() / static_cast<double>(N);
    return std::abs(diff);
}

} // namespace hpl
