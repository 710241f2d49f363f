#include "hpl/equidist.hpp"

#include "hpl/accum.hpp"
#include "hpl/errors.hpp"
#include "hpl/gowers.hpp"
#include "hpl/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace hpl {

namespace {
constexpr double kFloorGuard = 1e-12;

bool near_integer(double f) { return f < kFloorGuard || f > 1.0 - kFloorGuard; }
} // namespace

DiscrepancyReport discrepancy(std::span<const double> values, double a, double b) {
    if (values.empty()) throw invalid_argument("discrepancy: empty sequence");
    if (!(0.0 <= a && a <= b && b <= 1.0))
        throw invalid_argument("discrepancy: need 0 <= a <= b <= 1");
    DiscrepancyReport r;
    r.a = a;
    r.b = b;
    for (double v : values) {
        const double f = frac(v);
        if (f != 0.0 && near_integer(f)) {
            ++r.ambiguous;
            continue;
        }
        ++r.total;
        if (a <= f && f <= b) ++r.count_in;
    }
    if (r.total == 0) throw degenerate_measure("discrepancy: all points ambiguous");
    r.discrepancy = std::abs(static_cast<double>(r.count_in) /
                                 static_cast<double>(r.total) -
                             (b - a));
    return r;
}

namespace {

double et_majorant_impl(std::span<const double> values,
                        const double* weights, int M, double C) {
    if (M < 1) throw invalid_argument("erdos_turan_majorant: M must be >= 1");
    if (C <= 0.0) throw invalid_argument("erdos_turan_majorant: C must be > 0");
    if (values.empty())
        throw invalid_argument("erdos_turan_majorant: empty sequence");

    const std::size_t n = values.size();
    double wsum = 0;
    std::vector<cplx> base(n), cur(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = weights ? weights[j] : 1.0;
        wsum += w;
        base[j] = e_of(values[j]);
        cur[j] = {1.0, 0.0};
    }
    if (wsum == 0.0)
        throw degenerate_measure("erdos_turan_majorant: total weight is zero");

    double tail = 0;
    for (int m = 1; m <= M; ++m) {
        PairwiseSum<cplx> acc;
        for (std::size_t j = 0; j < n; ++j) {
            cur[j] *= base[j];
            acc.add((weights ? weights[j] : 1.0) * cur[j]);
        }
        tail += std::abs(acc.total()) / wsum / static_cast<double>(m);
    }
    return C * (1.0 / static_cast<double>(M) + tail);
}

} // namespace

double erdos_turan_majorant(std::span<const double> values, int M, double C) {
    return et_majorant_impl(values, nullptr, M, C);
}

double erdos_turan_majorant_weighted(std::span<const double> values,
                                     std::span<const double> weights, int M,
                                     double C) {
    if (weights.size() != values.size())
        throw invalid_argument("erdos_turan_majorant: weight length mismatch");
    return et_majorant_impl(values, weights.data(), M, C);
}

WeylVerdict weyl_major_arc_test(std::span<const double> poly, std::uint64_t N,
                                double delta, double C) {
    if (poly.size() < 2)
        throw invalid_argument("weyl_major_arc_test: polynomial degree must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw invalid_argument("weyl_major_arc_test: need 0 < delta < 1");
    if (N == 0) throw invalid_argument("weyl_major_arc_test: N must be positive");

    WeylVerdict v;
    PairwiseSum<cplx> acc;
    for (std::uint64_t n = 1; n <= N; ++n)
        acc.add(e_of(poly_frac(poly, static_cast<double>(n))));
    v.sum_magnitude = std::abs(acc.total()) / static_cast<double>(N);
    if (v.sum_magnitude <= delta) return v; // minor arc
    v.major_arc = true;

    const int d = static_cast<int>(poly.size()) - 1;
    const double bound = std::pow(delta, -C);
    // the search radius is the lemma's delta^-C, capped so a tiny delta cannot
    // turn the scan into an unbounded loop; hitting the cap is reported as an
    // exhausted search
    const long long cap = 10'000'000;
    const long long qmax =
        bound > static_cast<double>(cap) ? cap : static_cast<long long>(bound);
    for (long long q = 1; q <= qmax; ++q) {
        bool ok = true;
        std::vector<double> norms(static_cast<std::size_t>(d));
        for (int k = 1; k <= d; ++k) {
            const double scaled =
                std::pow(static_cast<double>(N), k) *
                circle_norm(static_cast<double>(q) * poly[static_cast<std::size_t>(k)]);
            norms[static_cast<std::size_t>(k - 1)] = scaled;
            if (scaled > bound) {
                ok = false;
                break;
            }
        }
        if (ok) {
            v.certified = true;
            v.q = q;
            v.scaled_norms = std::move(norms);
            return v;
        }
    }
    v.counterexample_candidate = true;
    return v;
}

FloorMatchReport floor_match_fast(const HardyExpr& e, std::uint64_t N,
                                  std::uint64_t L, int k) {
    TaylorModel m = taylor_model(e, N, L, k);
    FloorMatchReport r;
    r.base = N;
    r.length = L;
    r.regime = FloorRegime::fast;
    for (std::uint64_t h = 0; h <= L; ++h) {
        const double hv = static_cast<double>(h);
        bool amb_true = false, amb_model = false;
        const long long ft = guarded_floor(
            e.eval(static_cast<double>(N) + hv), amb_true, kFloorGuard);
        const long long fm = guarded_floor(m.eval(hv), amb_model, kFloorGuard);
        if (amb_true || amb_model) {
            ++r.ambiguous;
            continue;
        }
        ++r.total;
        if (ft != fm) ++r.mismatch_count;
    }
    if (r.total)
        r.mismatch_fraction = static_cast<double>(r.mismatch_count) /
                              static_cast<double>(r.total);
    return r;
}

std::vector<double> taylor_frac_sequence(const TaylorModel& m) {
    std::vector<double> out;
    out.reserve(m.length + 1);
    for (std::uint64_t h = 0; h <= m.length; ++h)
        out.push_back(m.eval_frac(static_cast<double>(h)));
    return out;
}

SlowMatchReport floor_match_slow(const HardyExpr& e, std::uint64_t R,
                                 double L_exponent) {
    if (R == 0) throw invalid_argument("floor_match_slow: R must be positive");
    if (!(L_exponent > 0.0 && L_exponent < 1.0))
        throw invalid_argument("floor_match_slow: L exponent must be in (0,1)");
    GrowthClass gc = classify(e);
    if (!gc.sub_fractional && !e.derivative().is_zero())
        throw precondition_violation(
            "floor_match_slow: function must be sub-fractional");
    if (!e.derivative().is_zero()) {
        // must also grow beyond log t
        double r0 = std::abs(e.eval(kGrowthSchedule[0])) / std::log(kGrowthSchedule[0]);
        double r3 = std::abs(e.eval(kGrowthSchedule[3])) / std::log(kGrowthSchedule[3]);
        if (!(r3 > r0 && r3 > 2.0))
            throw precondition_violation(
                "floor_match_slow: function must dominate log t");
    }

    SlowMatchReport rep;
    rep.R = R;
    rep.L_exponent = L_exponent;
    rep.per_window.resize(R);
    for (std::uint64_t N = 1; N <= R; ++N) {
        const std::uint64_t L = static_cast<std::uint64_t>(
            std::pow(static_cast<double>(N), L_exponent));
        FloorMatchReport& w = rep.per_window[N - 1];
        w.base = N;
        w.length = L;
        w.regime = FloorRegime::slow;
        bool amb0 = false;
        const long long f0 =
            guarded_floor(e.eval(static_cast<double>(N)), amb0, kFloorGuard);
        for (std::uint64_t h = 0; h <= L; ++h) {
            bool amb = false;
            const long long fh = guarded_floor(
                e.eval(static_cast<double>(N + h)), amb, kFloorGuard);
            if (amb || amb0) {
                ++w.ambiguous;
                continue;
            }
            ++w.total;
            if (fh != f0) ++w.mismatch_count;
        }
        if (w.total)
            w.mismatch_fraction = static_cast<double>(w.mismatch_count) /
                                  static_cast<double>(w.total);
        ++rep.windows;
        if (w.mismatch_count > 0) ++rep.bad_windows;
    }
    rep.bad_fraction =
        static_cast<double>(rep.bad_windows) / static_cast<double>(rep.windows);
    return rep;
}

FloorMatchReport poly_bad_set(std::span<const double> poly, const HardyExpr& x,
                              const VonMangoldtTable& table, const WTrick& trick,
                              std::uint64_t r, std::uint64_t L, double eps,
                              bool enforce) {
    if (poly.size() < 2)
        throw invalid_argument("poly_bad_set: polynomial degree must be >= 1");
    if (!(eps > 0.0 && eps <= 0.5))
        throw invalid_argument("poly_bad_set: need 0 < eps <= 0.5");
    if (trick.W * (r + L) + trick.b > table.limit())
        throw out_of_range_error("poly_bad_set: W*(r+L)+b beyond table limit");

    FloorMatchReport rep;
    rep.base = r;
    rep.length = L;
    rep.regime = FloorRegime::poly;
    rep.drift = static_cast<double>(L) *
                std::abs(x.derivative().eval(static_cast<double>(r)));
    rep.precondition_ok = rep.drift < eps;
    if (!rep.precondition_ok && enforce)
        throw window_too_early("poly_bad_set: L * |x'(r)| = " +
                               std::to_string(rep.drift) + " is not below eps");

    const double xr = x.eval(static_cast<double>(r));
    const double frac_xr = frac(xr);
    PairwiseSum<double> mass;
    for (std::uint64_t n = r; n <= r + L; ++n) {
        const double fp = poly_frac(poly, static_cast<double>(n));
        const double shifted = frac(fp + frac_xr);
        const bool in_bad = shifted <= eps || shifted >= 1.0 - eps;
        if (in_bad) {
            ++rep.bad_set_size;
            mass.add(w_tricked_lambda(table, trick, n));
            continue;
        }
        bool amb_n = false, amb_r = false;
        const long long fn =
            guarded_floor(fp + x.eval(static_cast<double>(n)), amb_n, kFloorGuard);
        const long long fr = guarded_floor(fp + xr, amb_r, kFloorGuard);
        if (amb_n || amb_r) {
            ++rep.ambiguous;
            continue;
        }
        ++rep.total;
        if (fn != fr) {
            ++rep.mismatch_count;
            ++rep.off_bad_mismatches;
        }
    }
    if (rep.total)
        rep.mismatch_fraction = static_cast<double>(rep.mismatch_count) /
                                static_cast<double>(rep.total);
    rep.bad_set_fraction =
        static_cast<double>(rep.bad_set_size) / static_cast<double>(L);
    rep.weighted_mass = mass.total() / static_cast<double>(L);
    return rep;
}

} // namespace hpl
