#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hpl {

// Values of the von Mangoldt function and a prime indicator for 1..limit.
// Immutable after construction; safe to share across threads.
class VonMangoldtTable {
public:
    explicit VonMangoldtTable(std::uint64_t limit);

    std::uint64_t limit() const { return limit_; }

    // Lambda(n): log p if n = p^k, else 0
    double lambda(std::uint64_t n) const;

    bool is_prime(std::uint64_t n) const {
        return n <= limit_ && prime_[n];
    }

    // psi(x) = sum_{n<=x} Lambda(n)
    double psi(std::uint64_t x) const;

    void save(const std::string& path) const;
    static VonMangoldtTable load(const std::string& path);

private:
    VonMangoldtTable() = default;
    std::uint64_t limit_ = 0;
    std::vector<double> values_;     // values_[n] = Lambda(n), index 0 unused
    std::vector<bool> prime_;
};

struct WTrick {
    std::uint64_t w = 1;
    std::uint64_t W = 1;     // primorial of w
    std::uint64_t b = 1;     // 1 <= b <= W, gcd(b, W) = 1
    std::uint64_t phi_W = 1; // Euler totient of W
};

std::uint64_t primorial(std::uint64_t w);
std::uint64_t euler_phi(std::uint64_t n);

WTrick primorial_trick(std::uint64_t w, std::uint64_t b);

// Lambda_{w,b}(n) = phi(W)/W * Lambda(W n + b)
double w_tricked_lambda(const VonMangoldtTable& table, const WTrick& trick,
                        std::uint64_t n);

struct ApCountReport {
    std::uint64_t count = 0;       // pi(x+y, q, a) - pi(x, q, a)
    double lambda_sum = 0;         // sum of Lambda(n) over the same range
    double brun_titchmarsh = 0;    // 2y / (phi(q) log(y/q))
    double lambda_main_term = 0;   // 2y log x / (phi(q) log(y/q))
    double lambda_residual = 0;    // lambda_sum - lambda_main_term (raw, no O-constants)
    bool count_bound_violated = false;
};

// Primes congruent to a mod q in (x, x+y], with the Brun-Titchmarsh bound and
// its von Mangoldt variant's main term. The Lambda-side O-constants are
// unspecified, so only the raw residual is reported for that bound.
ApCountReport prime_count_ap(const VonMangoldtTable& table, double x, double y,
                             std::uint64_t q, std::uint64_t a);

// | (1/pi(N)) sum_{p<=N} a(p) - (1/N) sum_{n<=N} Lambda(n) a(n) |
double prime_vs_lambda_gap(const VonMangoldtTable& table,
                           const std::function<std::complex<double>(std::uint64_t)>& a,
                           std::uint64_t N);

} // namespace hpl
