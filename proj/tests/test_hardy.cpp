#include "hpl/errors.hpp"
#include "hpl/hardy.hpp"
#include "hpl/numeric.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace hpl;

namespace {

// five-point central finite difference
double fd_derivative(const HardyExpr& e, double t) {
    const double h = t * 1e-4;
    return (-e(t + 2 * h) + 8 * e(t + h) - 8 * e(t - h) + e(t - 2 * h)) /
           (12 * h);
}

} // namespace

TEST_CASE("parser and evaluation") {
    HardyExpr e = HardyExpr::parse("t^1.5 + irr(sqrt2)*t^2 + log(t)^2");
    const double t = 1000.0;
    const double expected = std::pow(t, 1.5) + std::sqrt(2.0) * t * t +
                            std::pow(std::log(t), 2.0);
    CHECK(e(t) == doctest::Approx(expected).epsilon(1e-14));

    CHECK(HardyExpr::parse("t^(3/2)")(4.0) == doctest::Approx(8.0));
    CHECK(HardyExpr::parse("exp(0.5*log(t))")(9.0) == doctest::Approx(3.0));
    CHECK(HardyExpr::parse("t/2 - 1")(8.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(HardyExpr::parse("t +* 2"), invalid_argument);
    CHECK_THROWS_AS(HardyExpr::parse("t^t"), invalid_argument);
}

TEST_CASE("symbolic derivatives against finite differences") {
    const std::vector<std::string> fns = {
        "t^1.5", "t*log(t)", "log(t)^2", "t^2 + 7/3",
        "irr(sqrt2)*t + t^2 + log(t)^2", "t^0.04", "exp(log(t)^0.5)"};
    for (const auto& s : fns) {
        HardyExpr e = HardyExpr::parse(s);
        HardyExpr d = e.derivative();
        for (double t : {1e3, 1e4, 1e5}) {
            CAPTURE(s); CAPTURE(t);
            const double fd = fd_derivative(e, t);
            CHECK(d(t) == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("derivatives simplify to closed forms") {
    CHECK(HardyExpr::parse("t^1.5").derivative().key() ==
          HardyExpr::parse("1.5*t^0.5").key());
    CHECK(HardyExpr::parse("t*log(t)").derivative(2).key() ==
          HardyExpr::parse("t^(-1)").key());
    CHECK(HardyExpr::parse("t^3").derivative(4).is_zero());
}

TEST_CASE("like-term merging keeps repeated differentiation small") {
    HardyExpr e = HardyExpr::parse("t^1.5 + log(t)^2");
    HardyExpr d = e.derivative(12);
    CHECK(std::isfinite(d(1e6)));
    // the sum of two elementary terms stays a short sum after 12 derivatives
    CHECK(d.str().size() < 400);
}

TEST_CASE("growth classification") {
    GrowthClass a = classify(HardyExpr::parse("t^1.5"));
    CHECK(a.degree == 2);
    CHECK_FALSE(a.sub_linear);
    CHECK(a.strongly_non_polynomial);
    CHECK(a.condition == ConditionTag::far_from_rational_polys);

    GrowthClass b = classify(HardyExpr::parse("log(t)^2"));
    CHECK(b.degree == 1);
    CHECK(b.sub_linear);
    CHECK(b.sub_fractional);
    CHECK(b.strongly_non_polynomial);
    CHECK(b.condition == ConditionTag::far_from_rational_polys);

    GrowthClass c = classify(HardyExpr::parse("t^2 + 7/3"));
    CHECK(c.degree == 2);
    CHECK_FALSE(c.strongly_non_polynomial);
    CHECK(c.condition == ConditionTag::essentially_rational_poly);

    // a pure power keeps a constant log-derivative, so the strictly
    // decreasing trend required for sub_fractional never fires
    GrowthClass d = classify(HardyExpr::parse("t^0.04"));
    CHECK(d.degree == 1);
    CHECK(d.sub_linear);
    CHECK_FALSE(d.sub_fractional);
}

TEST_CASE("decomposition splits growth, marked and rational parts") {
    Decomposition d = decompose(HardyExpr::parse("irr(sqrt2)*t + t^2 + log(t)^2"));
    for (double t : {1e4, 1e6, 1e8}) {
        CHECK(d.g(t) == doctest::Approx(std::pow(std::log(t), 2)).epsilon(1e-12));
        CHECK(d.p(t) == doctest::Approx(std::sqrt(2.0) * t).epsilon(1e-12));
        CHECK(d.q(t) == doctest::Approx(t * t).epsilon(1e-12));
        CHECK(d.g(t) + d.p(t) + d.q(t) ==
              doctest::Approx(HardyExpr::parse("irr(sqrt2)*t + t^2 + log(t)^2")(t))
                  .epsilon(1e-12));
    }
    Decomposition r = decompose(HardyExpr::parse("0.75*t + t^1.5"));
    CHECK(r.p.is_zero());
    CHECK(r.q(4.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(decompose(HardyExpr::parse("(irr(sqrt2)+irr(sqrt3))*t")),
                    marker_required);
}

TEST_CASE("derivative growth obeys the Hardy-field envelope") {
    // a / (t log^2 t) below |a'| below a * log t / t on the schedule
    for (const std::string s : {"t^1.5", "log(t)^2", "t^0.04"}) {
        HardyExpr e = HardyExpr::parse(s);
        HardyExpr d = e.derivative();
        for (double t : kGrowthSchedule) {
            CAPTURE(s); CAPTURE(t);
            const double a = std::abs(e(t));
            const double lg = std::log(t);
            CHECK(std::abs(d(t)) > a / (t * lg * lg));
            CHECK(std::abs(d(t)) < a * lg / t);
        }
    }
}

TEST_CASE("degree and window selection") {
    HardyExpr e = HardyExpr::parse("t^1.5");
    KLSelection pinned = select_k_and_L({e}, 0.5, 0.65);
    CHECK(pinned.L_exponent == doctest::Approx(0.65));
    REQUIRE(pinned.k.size() == 1);
    CHECK(pinned.k[0] == 4);
    CHECK(pinned.delta == doctest::Approx(0.025).epsilon(1e-9));

    KLSelection free = select_k_and_L({e}, 0.3);
    CHECK(free.L_exponent == doctest::Approx(0.375).epsilon(1e-9));
    CHECK(free.k[0] == 2);
    CHECK(free.delta >= 0.01);

    CHECK_THROWS_AS(select_k_and_L({e}, 0.5, 0.505), selection_failure);
    CHECK_THROWS_AS(select_k_and_L({e}, 0.5, 0.4), invalid_argument);
    CHECK_THROWS_AS(select_k_and_L({e}, 0.5, 1.0), invalid_argument);
}

TEST_CASE("taylor model error stays inside the remainder bound") {
    HardyExpr e = HardyExpr::parse("t^1.5");
    const std::uint64_t N = 100000;
    const std::uint64_t L = 2000;
    for (int k : {2, 3, 4}) {
        TaylorModel m = taylor_model(e, N, L, k);
        double worst = 0;
        for (std::uint64_t h = 0; h <= L; ++h) {
            const double truth = e(static_cast<double>(N + h));
            worst = std::max(worst,
                             std::abs(truth - m.eval(static_cast<double>(h))));
        }
        CAPTURE(k);
        CHECK(worst <= m.remainder_bound * (1.0 + 1e-9));
        for (std::uint64_t h = 0; h <= L; h += 97) {
            const double f = m.eval_frac(static_cast<double>(h));
            CHECK(f >= 0.0);
            CHECK(f < 1.0);
            CHECK(frac(m.eval(static_cast<double>(h))) ==
                  doctest::Approx(f).epsilon(1e-6));
        }
    }
}

TEST_CASE("tempered membership") {
    TemperedReport slow = tempered_check(HardyExpr::parse("t^0.04"));
    CHECK(slow.in_T);
    CHECK(slow.degree == 0);
    CHECK(slow.alpha == doctest::Approx(0.04).epsilon(1e-6));
    CHECK(slow.k_for_c == 1);
    CHECK(slow.delta >= 0.01);

    TemperedReport poly = tempered_check(HardyExpr::parse("t^2"));
    CHECK_FALSE(poly.in_T);

    TemperedReport mid = tempered_check(HardyExpr::parse("t^1.5"));
    CHECK(mid.in_T);
    CHECK(mid.degree == 1);
}
