#include "hpl/ergodic.hpp"
#include "hpl/errors.hpp"
#include "hpl/numeric.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace hpl;

namespace {

const double kSqrt2m1 = 0.41421356237309515;
const double kSqrt3m1 = 0.7320508075688772;

std::complex<double> char_first(std::span<const double> x) { return e_of(x[0]); }

} // namespace

TEST_CASE("system invariants hold for all three families") {
    ErgodicSystem::torus_rotation({{kSqrt2m1, kSqrt3m1}}).check_invariants();
    ErgodicSystem::unipotent_affine(kSqrt2m1).check_invariants();
    ErgodicSystem::heisenberg_orbit(std::sqrt(2.0), 1.0, 0.0).check_invariants();
}

TEST_CASE("torus powers compose") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}, {kSqrt3m1}});
    REQUIRE(sys.map_count() == 2);
    std::vector<double> x{0.3};
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        long long m1 = static_cast<long long>(rng() % 1000000);
        long long m2 = static_cast<long long>(rng() % 1000000);
        auto once = sys.iterate(0, m1 + m2, x);
        auto twice = sys.iterate(0, m1, sys.iterate(0, m2, x));
        CHECK(circle_norm(once[0] - twice[0]) < 1e-9);
        // the two maps commute
        auto ab = sys.iterate(0, m1, sys.iterate(1, m2, x));
        auto ba = sys.iterate(1, m2, sys.iterate(0, m1, x));
        CHECK(circle_norm(ab[0] - ba[0]) < 1e-9);
    }
}

TEST_CASE("unipotent closed form matches stepwise application") {
    auto sys = ErgodicSystem::unipotent_affine(kSqrt2m1);
    std::vector<double> x{0.2, 0.7};
    for (long long m : {1, 2, 17, 200, 999}) {
        std::vector<double> y = x;
        for (long long i = 0; i < m; ++i) y = sys.iterate(0, 1, y);
        auto z = sys.iterate(0, m, x);
        CHECK(circle_norm(y[0] - z[0]) < 1e-8);
        CHECK(circle_norm(y[1] - z[1]) < 1e-8);
    }
}

TEST_CASE("heisenberg closed form matches stepwise application") {
    auto sys = ErgodicSystem::heisenberg_orbit(std::sqrt(2.0), 1.0, 0.0);
    std::vector<double> x{0.1, 0.25, 0.6};
    for (long long m : {1, 2, 31, 400}) {
        std::vector<double> y = x;
        for (long long i = 0; i < m; ++i) y = sys.iterate(0, 1, y);
        auto z = sys.iterate(0, m, x);
        for (int c = 0; c < 3; ++c) {
            CAPTURE(m); CAPTURE(c);
            CHECK(circle_norm(y[c] - z[c]) < 1e-7);
        }
    }
    CHECK_THROWS_AS(sys.iterate(0, -1, x), invalid_argument);
}

TEST_CASE("cesaro average matches a direct sum") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
    HardyExpr a = HardyExpr::parse("t^1.5");
    std::vector<double> x0{0.3};
    std::vector<std::uint64_t> cps{2000};
    auto series = multiple_average(sys, {char_first}, {{a}}, Scheme::cesaro,
                                   nullptr, nullptr, x0, cps);
    std::complex<double> acc = 0;
    for (std::uint64_t n = 1; n <= 2000; ++n) {
        bool amb = false;
        long long m = guarded_floor(a(static_cast<double>(n)), amb);
        if (amb) continue;
        acc += e_of(sys.iterate(0, m, x0)[0]);
    }
    acc /= 2000.0;
    REQUIRE(series.checkpoints.size() == 1);
    CHECK(std::abs(series.checkpoints[0].value - acc) < 1e-9);
}

TEST_CASE("lambda scheme weights by the sieve values") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
    HardyExpr a = HardyExpr::parse("t^1.5");
    VonMangoldtTable t(3000);
    std::vector<double> x0{0.0};
    std::vector<std::uint64_t> cps{3000};
    auto series = multiple_average(sys, {char_first}, {{a}}, Scheme::lambda,
                                   &t, nullptr, x0, cps);
    std::complex<double> acc = 0;
    for (std::uint64_t n = 1; n <= 3000; ++n) {
        bool amb = false;
        long long m = guarded_floor(a(static_cast<double>(n)), amb);
        if (amb || t.lambda(n) == 0.0) continue;
        acc += t.lambda(n) * e_of(sys.iterate(0, m, x0)[0]);
    }
    acc /= 3000.0;
    CHECK(std::abs(series.checkpoints[0].value - acc) < 1e-9);
}

TEST_CASE("w-tricked scheme consistency at w = 1") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
    HardyExpr a = HardyExpr::parse("t^1.5");
    VonMangoldtTable t(3000);
    WTrick w1 = primorial_trick(1, 1);
    std::vector<double> x0{0.1};
    std::vector<std::uint64_t> cps{2500};
    auto series = multiple_average(sys, {char_first}, {{a}}, Scheme::w_tricked,
                                   &t, &w1, x0, cps);
    std::complex<double> acc = 0;
    for (std::uint64_t n = 1; n <= 2500; ++n) {
        bool amb = false;
        long long m = guarded_floor(a(static_cast<double>(n + 1)), amb);
        if (amb) continue;
        acc += (t.lambda(n + 1) - 1.0) * e_of(sys.iterate(0, m, x0)[0]);
    }
    acc /= 2500.0;
    CHECK(std::abs(series.checkpoints[0].value - acc) < 1e-9);
}

TEST_CASE("starting grid is deterministic and lives in the cube") {
    auto g1 = starting_grid(3, 100);
    auto g2 = starting_grid(3, 100);
    REQUIRE(g1.size() == 100);
    CHECK(g1 == g2);
    for (const auto& p : g1) {
        REQUIRE(p.size() == 3);
        for (double c : p) {
            CHECK(c >= 0.0);
            CHECK(c < 1.0);
        }
    }
    CHECK(starting_grid(3, 100, 778) != g1);
}

TEST_CASE("comparison gap rejects iterates outside the hypothesis") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
    VonMangoldtTable t(5000);
    CHECK_THROWS_AS(comparison_gap(sys, {char_first},
                                   {{HardyExpr::parse("log(t)")}}, t, 1, 500),
                    hypothesis_violation);
}

TEST_CASE("flow lift identity") {
    auto base = ErgodicSystem::torus_rotation({{kSqrt2m1}, {kSqrt3m1}});
    auto ext = lift_to_flow(base, 2, 1);
    CHECK(lift_identity_check(ext, 300) == 0);

    auto ext2 = lift_to_flow(base, 1, 2);
    CHECK(lift_identity_check(ext2, 300) == 0);

    auto heis = ErgodicSystem::heisenberg_orbit(std::sqrt(2.0), 1.0, 0.0);
    CHECK_THROWS_AS(lift_to_flow(heis, 1, 1), invalid_argument);
}

TEST_CASE("arc unions measure and membership") {
    ArcUnion A{{{0.1, 0.3}, {0.5, 0.75}}};
    CHECK(A.measure() == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(A.contains(0.2));
    CHECK(A.contains(0.5));
    CHECK_FALSE(A.contains(0.3));
    CHECK_FALSE(A.contains(0.9));
    ArcUnion bad{{{0.4, 0.2}}};
    VonMangoldtTable t(100);
    std::vector<HardyExpr> its{HardyExpr::parse("t^1.5")};
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
    CHECK_THROWS_AS(recurrence_experiment(sys, bad, its, Scheme::prime, t, 100),
                    unsupported_set);
}

TEST_CASE("recurrence floor bound and sane averages") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt3m1}});
    ArcUnion A{{{0.0, 0.3}}};
    VonMangoldtTable t(20000);
    std::vector<HardyExpr> its{HardyExpr::parse("t^1.5")};
    auto res = recurrence_experiment(sys, A, its, Scheme::prime, t, 20000);
    CHECK(res.floor_bound == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(res.average >= 0.0);
    CHECK(res.average <= 0.3 + 1e-12);
    CHECK(res.samples > 0);
}

TEST_CASE("nil orbit haar side vanishes for characters") {
    auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
    VonMangoldtTable t(5000);
    std::vector<double> x0{0.0};
    auto res = nil_orbit_equidistribution(sys, HardyExpr::parse("t^1.5"), t,
                                          5000, {char_first}, x0);
    REQUIRE(res.haar.size() == 1);
    CHECK(std::abs(res.haar[0]) < 1e-12);
    CHECK(res.residuals[0] == doctest::Approx(std::abs(res.averages[0])));
}

TEST_CASE("short interval inequality on simple sequences") {
    VonMangoldtTable t(50000);
    WTrick w2 = primorial_trick(2, 1);
    auto zero = [](std::uint64_t) { return std::complex<double>(0.0); };
    auto res0 = short_interval_average(zero, t, w2, 0.6, 2000);
    CHECK(res0.left == 0.0);
    CHECK(res0.holds);

    auto one = [](std::uint64_t) { return std::complex<double>(1.0); };
    auto res1 = short_interval_average(one, t, w2, 0.6, 2000);
    CHECK(res1.holds);
    CHECK(res1.slack >= 0.0);
}
