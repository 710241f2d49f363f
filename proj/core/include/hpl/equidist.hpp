#pragma once

#include "hpl/hardy.hpp"
#include "hpl/sieve.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hpl {

struct DiscrepancyReport {
    double a = 0, b = 1;
    std::uint64_t count_in = 0;
    std::uint64_t total = 0;
    std::uint64_t ambiguous = 0; // values at a representation boundary, excluded
    double discrepancy = 0;      // |count_in/total - (b-a)|
    double et_majorant = 0;      // filled by callers that also run the majorant
    int M = 0;
};

// Empirical discrepancy of the fractional parts of `values` against [a,b].
DiscrepancyReport discrepancy(std::span<const double> values, double a, double b);

// C * (1/M + sum_{m<=M} |nu_hat(m)|/m) for the uniform empirical measure of
// the fractional parts.
double erdos_turan_majorant(std::span<const double> values, int M, double C);

// Same majorant for the weighted measure nu(S) = sum w_n delta_{x_n} / sum w_n.
double erdos_turan_majorant_weighted(std::span<const double> values,
                                     std::span<const double> weights, int M,
                                     double C);

// Smallest constant (0.1 granularity) for which discrepancy <= majorant held
// over the whole property corpus; computed once by oracle and frozen.
inline constexpr double kEtCPin = 0.5;

struct WeylVerdict {
    bool major_arc = false;      // |E_{n<=N} e(p(n))| > delta
    double sum_magnitude = 0;
    bool certified = false;      // a single q works for every coefficient
    long long q = 0;
    std::vector<double> scaled_norms; // N^k ||q a_k||_T for k = 1..d
    bool counterexample_candidate = false; // major arc but search exhausted
};

// Exponential-sum dichotomy for p(n) = a_0 + a_1 n + ... + a_d n^d. When the
// normalized sum exceeds delta, searches 1 <= q <= delta^-C with
// N^k ||q a_k||_T <= delta^-C for all k.
WeylVerdict weyl_major_arc_test(std::span<const double> poly, std::uint64_t N,
                                double delta, double C = 10.0);

enum class FloorRegime { fast, slow, poly };

struct FloorMatchReport {
    std::uint64_t base = 0;      // N (fast), window start (slow), r (poly)
    std::uint64_t length = 0;    // L
    std::uint64_t total = 0;     // points actually judged
    std::uint64_t mismatch_count = 0;
    std::uint64_t ambiguous = 0;
    double mismatch_fraction = 0;
    FloorRegime regime = FloorRegime::fast;
    // poly regime only
    std::uint64_t bad_set_size = 0;
    double bad_set_fraction = 0;
    double weighted_mass = 0;    // (1/L) sum of Lambda_{w,b}(n) over the bad set
    std::uint64_t off_bad_mismatches = 0;
    bool precondition_ok = true;
    double drift = 0;            // L * |x'(r)|, the checked precondition value
};

// Counts h in [0, L] with floor(e(N+h)) != floor(p_N(h)) for the degree-k
// Taylor model at N.
FloorMatchReport floor_match_fast(const HardyExpr& e, std::uint64_t N,
                                  std::uint64_t L, int k);

// {p_N(h)} for h = 0..L, for feeding discrepancy checks on the model phase.
std::vector<double> taylor_frac_sequence(const TaylorModel& m);

struct SlowMatchReport {
    std::uint64_t R = 0;
    double L_exponent = 0;
    std::uint64_t windows = 0;
    std::uint64_t bad_windows = 0;
    double bad_fraction = 0;
    std::vector<FloorMatchReport> per_window; // one entry per N <= R
};

// For each N <= R checks whether floor(e(N+h)) = floor(e(N)) on the whole
// window h in [0, N^L_exponent]; requires e sub-fractional and above log t.
SlowMatchReport floor_match_slow(const HardyExpr& e, std::uint64_t R,
                                 double L_exponent);

// B = {n in [r, r+L] : {p(n)+x(r)} within eps of an integer}; verifies the
// frozen-argument floor identity floor(p(n)+x(n)) = floor(p(n)+x(r)) off B
// and reports |B|/L plus the Lambda_{w,b}-weighted mass of B. The precondition
// L * |x'(r)| < eps raises window_too_early unless enforce is false, in which
// case the report carries the violation honestly.
FloorMatchReport poly_bad_set(std::span<const double> poly, const HardyExpr& x,
                              const VonMangoldtTable& table, const WTrick& trick,
                              std::uint64_t r, std::uint64_t L, double eps,
                              bool enforce = true);

} // namespace hpl
