#include "hpl/errors.hpp"
#include "hpl/numeric.hpp"
#include "hpl/sieve.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>

using namespace hpl;

namespace {

// trial-division oracle: log p when n is a prime power, else 0
double lambda_oracle(std::uint64_t n) {
    if (n < 2) return 0;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        std::uint64_t m = n;
        while (m % p == 0) m /= p;
        return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
    }
    return std::log(static_cast<double>(n)); // n itself is prime
}

} // namespace

TEST_CASE("von Mangoldt values match trial division up to 1e4") {
    VonMangoldtTable t(10000);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        CAPTURE(n);
        CHECK(t.lambda(n) == doctest::Approx(lambda_oracle(n)).epsilon(1e-14));
        bool prime = n >= 2;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) { prime = false; break; }
        CHECK(t.is_prime(n) == prime);
    }
}

TEST_CASE("psi sums the table and tracks x") {
    VonMangoldtTable t(1000000);
    double s = 0;
    for (std::uint64_t n = 1; n <= 100000; ++n) s += t.lambda(n);
    CHECK(t.psi(100000) == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(t.psi(1000000) / 1e6 - 1.0) < 0.005);
}

TEST_CASE("primorial and totient") {
    CHECK(primorial(1) == 1);
    CHECK(primorial(2) == 2);
    CHECK(primorial(3) == 6);
    CHECK(primorial(5) == 30);
    CHECK(primorial(7) == 210);
    for (std::uint64_t n = 1; n <= 200; ++n) {
        std::uint64_t count = 0;
        for (std::uint64_t m = 1; m <= n; ++m)
            if (std::gcd(m, n) == 1) ++count;
        CHECK(euler_phi(n) == count);
    }
}

TEST_CASE("w-trick weight and coprimality") {
    VonMangoldtTable t(70000);
    WTrick w3 = primorial_trick(3, 5);
    CHECK(w3.W == 6);
    CHECK(w3.phi_W == 2);
    for (std::uint64_t n = 1; n <= 10000; ++n)
        CHECK(w_tricked_lambda(t, w3, n) ==
              doctest::Approx(2.0 / 6.0 * t.lambda(6 * n + 5)).epsilon(1e-14));

    WTrick w1 = primorial_trick(1, 1);
    CHECK(w1.W == 1);
    for (std::uint64_t n = 1; n <= 1000; ++n)
        CHECK(w_tricked_lambda(t, w1, n) == t.lambda(n + 1));

    CHECK_THROWS_AS(primorial_trick(3, 2), coprimality_violation);
    CHECK_THROWS_AS(primorial_trick(3, 8), invalid_argument);
}

TEST_CASE("cache round trip") {
    VonMangoldtTable t(50000);
    const std::string path = "sieve_cache_test.bin";
    t.save(path);
    VonMangoldtTable u = VonMangoldtTable::load(path);
    REQUIRE(u.limit() == t.limit());
    for (std::uint64_t n = 1; n <= 50000; n += 7) {
        CHECK(u.lambda(n) == t.lambda(n));
        CHECK(u.is_prime(n) == t.is_prime(n));
    }
    std::remove(path.c_str());
}

TEST_CASE("cache header magic is rejected when corrupted") {
    VonMangoldtTable t(100);
    const std::string path = "sieve_cache_bad.bin";
    t.save(path);
    {
        std::FILE* f = std::fopen(path.c_str(), "r+b");
        REQUIRE(f);
        std::fputc('X', f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(VonMangoldtTable::load(path), error);
    std::remove(path.c_str());
}

TEST_CASE("prime counts in progressions against a direct count") {
    VonMangoldtTable t(200000);
    auto rep = prime_count_ap(t, 100000, 50000, 6, 1);
    std::uint64_t direct = 0;
    for (std::uint64_t n = 100001; n <= 150000; ++n)
        if (t.is_prime(n) && n % 6 == 1) ++direct;
    CHECK(rep.count == direct);
    CHECK_FALSE(rep.count_bound_violated);
    CHECK(static_cast<double>(rep.count) <= rep.brun_titchmarsh);
}

TEST_CASE("prime average tracks the lambda average") {
    VonMangoldtTable t(100001);
    FixedAngle alpha(0.41421356237309515);
    auto a = [&](std::uint64_t n) {
        return e_of(alpha.frac_mul(static_cast<long long>(n)));
    };
    CHECK(prime_vs_lambda_gap(t, a, 100000) < 0.02);
}
