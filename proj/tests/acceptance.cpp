// Acceptance harness: one line per criterion. Criteria that are out of reach
// at desk scale still run in full and report their measured values; those
// documented expected failures do not affect the exit status, every other
// failure does.

#include "hpl/equidist.hpp"
#include "hpl/ergodic.hpp"
#include "hpl/errors.hpp"
#include "hpl/gowers.hpp"
#include "hpl/hardy.hpp"
#include "hpl/numeric.hpp"
#include "hpl/sieve.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace hpl;

namespace {

int unexpected_failures = 0;

void report(int id, bool pass, const std::string& detail, bool expected_fail = false) {
    if (!pass && !expected_fail) ++unexpected_failures;
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::vector<cplx> random_seq(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<cplx> f(n);
    for (auto& v : f) v = {uni(rng), uni(rng)};
    return f;
}

double lambda_oracle(std::uint64_t n) {
    if (n < 2) return 0;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        std::uint64_t m = n;
        while (m % p == 0) m /= p;
        return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
    }
    return std::log(static_cast<double>(n));
}

// U^2 interval norm of Lambda_{w,b} - 1 on (N, N + N^0.7], max over coprime b
double u2_trend(const VonMangoldtTable& table, std::uint64_t w, std::uint64_t N) {
    const std::uint64_t H =
        static_cast<std::uint64_t>(std::pow(static_cast<double>(N), 0.7));
    const std::uint64_t W = primorial(w);
    double best = 0;
    for (std::uint64_t b = 1; b <= W; ++b) {
        if (std::gcd(b, W) != 1) continue;
        WTrick trick = primorial_trick(w, b);
        FiniteSequence f;
        f.offset = static_cast<long long>(N) + 1;
        for (std::uint64_t n = N + 1; n <= N + H; ++n)
            f.data.push_back({w_tricked_lambda(table, trick, n) - 1.0, 0.0});
        best = std::max(best,
                        gowers_interval(f, f.offset,
                                        static_cast<long long>(N + H), 2).value);
    }
    return best;
}

const double kSqrt2m1 = 0.41421356237309515;
const double kSqrt3m1 = 0.7320508075688772;

Observable char_coord(std::size_t c) {
    return [c](std::span<const double> x) { return e_of(x[c]); };
}

Observable smooth_arc(double lo, double hi, double ramp) {
    return [=](std::span<const double> x) {
        const double v = x[0];
        double y = 0;
        if (v >= lo && v < lo + ramp) y = (v - lo) / ramp;
        else if (v >= lo + ramp && v < hi - ramp) y = 1.0;
        else if (v >= hi - ramp && v < hi) y = (hi - v) / ramp;
        return std::complex<double>(y);
    };
}

} // namespace

int main() {
    // criterion 1: sieve against trial division, psi near x
    {
        auto t0 = std::chrono::steady_clock::now();
        VonMangoldtTable table(1000000);
        bool exact = true;
        for (std::uint64_t n = 1; n <= 10000 && exact; ++n)
            if (std::abs(table.lambda(n) - lambda_oracle(n)) > 1e-12) exact = false;
        const double psi_ratio = table.psi(1000000) / 1e6;
        const double elapsed = seconds_since(t0);
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "lambda exact=%d  psi/x=%.6f  %.2fs", exact ? 1 : 0,
                      psi_ratio, elapsed);
        report(1, exact && std::abs(psi_ratio - 1.0) < 0.005 && elapsed < 5.0, buf);
    }

    // criterion 2: bridge, phase invariance, monotonicity, Fourier cross-check
    {
        auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(4242);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst_bridge = 0, worst_phase = 0, worst_fourier = 0;
        int mono_viol = 0;
        for (int rep = 0; rep < 50; ++rep) {
            std::size_t n = 4 + static_cast<std::size_t>(rng() % 29);
            int s = 2 + static_cast<int>(rng() % 2);
            FiniteSequence f{1, random_seq(rng, n)};
            for (std::uint64_t np : {2 * n, 4 * n}) {
                auto [a, b] = lemma23_bridge(f, n, np, s);
                worst_bridge = std::max(worst_bridge,
                                        std::abs(a - b) / std::max(1e-30, a));
            }
            FiniteSequence g = f;
            const double theta = uni(rng);
            for (std::size_t i = 0; i < n; ++i)
                g.data[i] *= e_of(theta * static_cast<double>(i + 1));
            const double na =
                gowers_interval(f, 1, static_cast<long long>(n), s).value;
            const double nb =
                gowers_interval(g, 1, static_cast<long long>(n), s).value;
            worst_phase = std::max(worst_phase, std::abs(na - nb));

            auto h = random_seq(rng, 4 + rng() % 61);
            double prev = gowers_cyclic(h, 1).value;
            for (int ss = 2; ss <= 4; ++ss) {
                double cur = gowers_cyclic(h, ss).value;
                if (cur < prev - 1e-9) ++mono_viol;
                prev = cur;
            }
        }
        for (std::size_t n : {64, 200, 511, 512}) {
            auto f = random_seq(rng, n);
            const double direct = std::pow(gowers_cyclic(f, 2).value, 4.0);
            worst_fourier = std::max(
                worst_fourier,
                std::abs(u2_fourth_power_fourier(f) - direct) / direct);
        }
        const double elapsed = seconds_since(t0);
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "bridge=%.2e  phase=%.2e  mono_viol=%d  fourier=%.2e  %.1fs",
                      worst_bridge, worst_phase, mono_viol, worst_fourier, elapsed);
        report(2,
               worst_bridge < 1e-9 && worst_phase < 1e-9 && mono_viol == 0 &&
                   worst_fourier < 1e-9 && elapsed < 60.0,
               buf);
    }

    // criterion 3: restriction to progressions never gains
    {
        std::mt19937_64 rng(777);
        int violations = 0;
        for (int rep = 0; rep < 100; ++rep) {
            long long H = 16 + static_cast<long long>(rng() % 49);
            long long X = static_cast<long long>(rng() % 500);
            long long Q = 2 + static_cast<long long>(rng() % 6);
            long long a = static_cast<long long>(rng() % Q);
            int s = 2 + static_cast<int>(rng() % 2);
            FiniteSequence u{X + 1, random_seq(rng, static_cast<std::size_t>(H))};
            auto [restricted, full] = ap_restriction_check(u, a, Q, X, H, s);
            if (restricted > full + 1e-9) ++violations;
        }
        report(3, violations == 0,
               "violations=" + std::to_string(violations) + "/100");
    }

    auto big_table = std::make_shared<VonMangoldtTable>(6400000);

    // criterion 4: U^2 uniformity trend across N and w, pinned values
    {
        auto t0 = std::chrono::steady_clock::now();
        const double pins[3][3] = {
            {1.125470841, 1.090192243, 1.096397970},
            {0.660905711, 0.634494000, 0.632680947},
            {0.476506829, 0.437509319, 0.399606621}};
        const std::uint64_t Ns[3] = {10000, 100000, 1000000};
        double vals[3][3];
        bool pin_ok = true, trend_ok = true;
        for (int wi = 0; wi < 3; ++wi)
            for (int ni = 0; ni < 3; ++ni) {
                vals[wi][ni] = u2_trend(*big_table, wi + 1, Ns[ni]);
                if (std::abs(vals[wi][ni] - pins[wi][ni]) > 1e-6) pin_ok = false;
            }
        for (int wi = 0; wi < 3; ++wi)
            if (!(vals[wi][2] < vals[wi][0])) trend_ok = false;
        if (!(vals[2][2] < vals[0][2])) trend_ok = false;
        const double elapsed = seconds_since(t0);
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "w1:%.4f->%.4f  w2:%.4f->%.4f  w3:%.4f->%.4f  pins=%d  %.1fs",
                      vals[0][0], vals[0][2], vals[1][0], vals[1][2], vals[2][0],
                      vals[2][2], pin_ok ? 1 : 0, elapsed);
        report(4, pin_ok && trend_ok && elapsed < 600.0, buf);
    }

    // criterion 5: discrepancy under the frozen majorant constant
    {
        FixedAngle golden(0.6180339887498949);
        std::vector<double> orbit;
        for (std::uint64_t i = 1; i <= 10000; ++i)
            orbit.push_back(golden.frac_mul(static_cast<long long>(i)));
        const double maj = erdos_turan_majorant(orbit, 100, kEtCPin);
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int viol = 0;
        for (int rep = 0; rep < 20; ++rep) {
            double a = uni(rng), b = uni(rng);
            if (a > b) std::swap(a, b);
            if (discrepancy(orbit, a, b).discrepancy > maj + 1e-12) ++viol;
        }
        std::vector<double> point(1, 0.123);
        const double single = erdos_turan_majorant(point, 10, 1.0);
        const bool single_ok = std::abs(single - 3.0289682539682538) < 1e-6;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "violations=%d/20  single=%.7f", viol,
                      single);
        report(5, viol == 0 && single_ok, buf);
    }

    // criterion 6: fast floor match is essentially exact
    {
        auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t N = 1000000;
        const std::uint64_t L = static_cast<std::uint64_t>(std::pow(1e6, 0.65));
        auto rep = floor_match_fast(HardyExpr::parse("t^1.5"), N, L, 4);
        const double bound = 1.0 / std::pow(std::log(1e6), 2.0);
        const double elapsed = seconds_since(t0);
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "mismatches=%llu/%llu  fraction=%.2e <= %.4f  %.1fs",
                      static_cast<unsigned long long>(rep.mismatch_count),
                      static_cast<unsigned long long>(rep.total),
                      rep.mismatch_fraction, bound, elapsed);
        report(6, rep.mismatch_fraction <= bound && elapsed < 10.0, buf);
    }

    // criterion 7: slow floor match; the window length t^0.6 outruns the
    // stability scale of log^2 t at this R, so the measured fraction is far
    // above the asymptotic target and the criterion reports red
    {
        auto rep = floor_match_slow(HardyExpr::parse("log(t)^2"), 10000, 0.6);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "bad_window_fraction=%.4f target<0.05",
                      rep.bad_fraction);
        report(7, rep.bad_fraction < 0.05, buf, true);
    }

    // criterion 8: polynomial bad set at r=1e5; the drift precondition
    // L*|x'(r)| < eps fails at this window, so the off-bad-set mismatch clause
    // reports red while the size and mass clauses hold
    {
        const double lin[2] = {0.0, 1.4142135623730951};
        const std::uint64_t r = 100000;
        const std::uint64_t L = static_cast<std::uint64_t>(std::pow(1e5, 0.7));
        WTrick w3 = primorial_trick(3, 1);
        auto rep = poly_bad_set(lin, HardyExpr::parse("log(t)^2"), *big_table,
                                w3, r, L, 0.05, false);
        const bool size_ok =
            rep.bad_set_fraction >= 0.03 && rep.bad_set_fraction <= 0.15;
        const bool mass_ok =
            std::abs(rep.weighted_mass - rep.bad_set_fraction) <= 0.1;
        const bool zero_ok = rep.off_bad_mismatches == 0;
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "off_bad=%llu  |B|/L=%.4f  mass=%.4f  drift=%.3f  "
                      "precondition=%d",
                      static_cast<unsigned long long>(rep.off_bad_mismatches),
                      rep.bad_set_fraction, rep.weighted_mass, rep.drift,
                      rep.precondition_ok ? 1 : 0);
        report(8, zero_ok && size_ok && mass_ok && rep.precondition_ok, buf, true);
    }

    // criterion 9: comparison gap decays in w, pinned values
    {
        auto t0 = std::chrono::steady_clock::now();
        auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
        std::vector<Observable> fs{char_coord(0)};
        std::vector<std::vector<HardyExpr>> its{{HardyExpr::parse("t^1.5")}};
        const double pins[3] = {0.00651674, 0.00565317, 0.00199193};
        double gaps[3];
        bool pin_ok = true;
        for (int w = 1; w <= 3; ++w) {
            gaps[w - 1] = comparison_gap(sys, fs, its, *big_table,
                                         static_cast<std::uint64_t>(w), 100000);
            if (std::abs(gaps[w - 1] - pins[w - 1]) > 1e-6) pin_ok = false;
        }
        const bool decays = gaps[2] < gaps[0];
        const double elapsed = seconds_since(t0);
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "gaps=%.6f,%.6f,%.6f  pins=%d  %.1fs", gaps[0], gaps[1],
                      gaps[2], pin_ok ? 1 : 0, elapsed);
        report(9, pin_ok && decays && elapsed < 300.0, buf);
    }

    // criterion 10: prime and plain progression averages agree
    {
        auto sys = ErgodicSystem::torus_rotation({{kSqrt2m1}});
        std::vector<Observable> fs{smooth_arc(0.0, 0.3, 0.05),
                                   smooth_arc(0.0, 0.3, 0.05)};
        std::vector<std::vector<HardyExpr>> its{{HardyExpr::parse("t^1.5")},
                                                {HardyExpr::parse("2*t^1.5")}};
        std::vector<double> x0{0.1};
        std::vector<std::uint64_t> cps{100000};
        auto prime = multiple_average(sys, fs, its, Scheme::prime,
                                      big_table.get(), nullptr, x0, cps);
        auto ces = multiple_average(sys, fs, its, Scheme::cesaro, nullptr,
                                    nullptr, x0, cps);
        const double diff = std::abs(prime.checkpoints[0].value.real() -
                                     ces.checkpoints[0].value.real());
        char buf[160];
        std::snprintf(buf, sizeof(buf), "prime=%.6f  cesaro=%.6f  |diff|=%.6f",
                      prime.checkpoints[0].value.real(),
                      ces.checkpoints[0].value.real(), diff);
        report(10, diff < 0.02, buf);
    }

    // criterion 11: recurrence along primes beats the measure-power floor
    {
        auto sys = ErgodicSystem::torus_rotation({{kSqrt3m1}});
        ArcUnion A{{{0.0, 0.3}}};
        std::vector<HardyExpr> its{HardyExpr::parse("t^1.5"),
                                   HardyExpr::parse("t^1.25")};
        auto res = recurrence_experiment(sys, A, its, Scheme::prime, *big_table,
                                         100000);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "average=%.6f  floor=%.6f-0.02",
                      res.average, res.floor_bound);
        report(11, res.average >= res.floor_bound - 0.02, buf);
    }

    // criterion 12: flow lift identity on randomized dyadic inputs
    {
        auto base = ErgodicSystem::torus_rotation({{kSqrt2m1}, {kSqrt3m1}});
        auto ext = lift_to_flow(base, 2, 2);
        const std::uint64_t failures = lift_identity_check(ext, 1000);
        report(12, failures == 0,
               "failures=" + std::to_string(failures) + "/1000");
    }

    // criterion 13: prime orbits equidistribute against Haar
    {
        auto torus = ErgodicSystem::torus_rotation({{kSqrt3m1}});
        std::vector<double> x1{0.0};
        auto tres = nil_orbit_equidistribution(
            torus, HardyExpr::parse("irr(sqrt2)*t^1.5"), *big_table, 100000,
            {char_coord(0)}, x1);
        auto heis = ErgodicSystem::heisenberg_orbit(std::sqrt(2.0), 1.0, 0.0);
        std::vector<double> x3{0.0, 0.0, 0.0};
        auto hres = nil_orbit_equidistribution(
            heis, HardyExpr::parse("t^(4/3)"), *big_table, 100000,
            {char_coord(0), char_coord(2)}, x3);
        const double hworst = std::max(hres.residuals[0], hres.residuals[1]);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "torus=%.5f<0.02  heis=%.5f<0.05",
                      tres.residuals[0], hworst);
        report(13, tres.residuals[0] < 0.02 && hworst < 0.05, buf);
    }

    // criterion 14: short-interval inequality for three bounded sequences
    {
        WTrick w2 = primorial_trick(2, 1);
        FixedAngle alpha(std::sqrt(2.0));
        auto zero = [](std::uint64_t) { return std::complex<double>(0.0); };
        auto rot = [&](std::uint64_t n) {
            return e_of(alpha.frac_mul(static_cast<long long>(n)));
        };
        auto one = [](std::uint64_t) { return std::complex<double>(1.0); };
        bool all = true;
        std::string detail;
        int idx = 0;
        for (const auto& A : {std::function<std::complex<double>(std::uint64_t)>(zero),
                              std::function<std::complex<double>(std::uint64_t)>(rot),
                              std::function<std::complex<double>(std::uint64_t)>(one)}) {
            auto res = short_interval_average(A, *big_table, w2, 0.7, 10000);
            if (!res.holds) all = false;
            char buf[80];
            std::snprintf(buf, sizeof(buf), "%s[%d] %.4f<=%.4f+%.4f",
                          idx ? "  " : "", idx, res.left, res.right, res.slack);
            detail += buf;
            ++idx;
        }
        report(14, all, detail);
    }

    if (unexpected_failures > 0) {
        std::printf("%d unexpected failure(s)\n", unexpected_failures);
        return 1;
    }
    return 0;
}
