#pragma once

#include "hpl/hardy.hpp"
#include "hpl/sieve.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace hpl {

using Observable = std::function<std::complex<double>(std::span<const double>)>;

// Concrete measure-preserving systems with exact closed-form iterates, so a
// single application of T^m costs O(1) regardless of m.
class ErgodicSystem {
public:
    enum class Kind { torus_rotation, unipotent_affine, heisenberg_orbit };

    // d-dimensional torus with one rotation vector per commuting map
    static ErgodicSystem torus_rotation(std::vector<std::vector<double>> alphas);
    // (x, y) -> (x + alpha, y + x) on the 2-torus
    static ErgodicSystem unipotent_affine(double alpha);
    // discrete Heisenberg element g = (a, b, c) acting on the nilmanifold in
    // Mal'cev coordinates, points reduced to [0,1)^3
    static ErgodicSystem heisenberg_orbit(double a, double b, double c);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    std::size_t map_count() const { return maps_.size(); }

    // point after applying the m-th power of map `map` to x; exact closed
    // forms with 64.64 fixed-point angles, valid for |m| up to ~1e13
    std::vector<double> iterate(std::size_t map, long long m,
                                std::span<const double> x) const;

    // commutation and measure-preservation spot checks; throws on failure
    void check_invariants(std::uint64_t seed = 12345) const;

private:
    struct MapData {
        std::vector<double> alpha;       // rotation vector (torus, affine)
        double a = 0, b = 0, c = 0;      // heisenberg element
    };
    Kind kind_ = Kind::torus_rotation;
    std::size_t dim_ = 1;
    std::vector<MapData> maps_;
};

enum class Scheme { cesaro, prime, lambda, w_tricked, short_interval };

struct Checkpoint {
    std::uint64_t N = 0;
    std::complex<double> value;
    double norm = 0;
};

struct AverageSeries {
    Scheme scheme = Scheme::cesaro;
    std::vector<Checkpoint> checkpoints;
};

// E_n weight(n) * prod_j f_j(T_1^{floor(a_1j(arg))} ... T_k^{...} x0) at each
// checkpoint. The w_tricked and short_interval schemes take arg = W n + b and
// weight Lambda_{w,b}(n) - 1; cesaro/prime/lambda take arg = n (or p). Pass
// table/trick only for the schemes that need them.
AverageSeries multiple_average(const ErgodicSystem& sys,
                               const std::vector<Observable>& fs,
                               const std::vector<std::vector<HardyExpr>>& iterates,
                               Scheme scheme, const VonMangoldtTable* table,
                               const WTrick* trick, std::span<const double> x0,
                               std::span<const std::uint64_t> checkpoints,
                               double L_exponent = 0.7);

// L2 norm (over the fixed starting grid) of the (Lambda_{w,b}-1)-weighted
// multiple average at cutoff N, maximized over b coprime to W. Each iterate
// must classify as far-from-rational-polys or essentially-rational-poly.
double comparison_gap(const ErgodicSystem& sys, const std::vector<Observable>& fs,
                      const std::vector<std::vector<HardyExpr>>& iterates,
                      const VonMangoldtTable& table, std::uint64_t w,
                      std::uint64_t N);

// seeded low-discrepancy grid of starting points used for all L2 estimates
std::vector<std::vector<double>> starting_grid(std::size_t dim, std::size_t count,
                                               std::uint64_t seed = 777);

struct FlowExtension {
    const ErgodicSystem* base = nullptr;
    std::size_t k = 0, l = 0;

    // S_{i,j,s}(x, a) = (T_i^{floor(s + a_ij)} x, a with slot (i,j) replaced
    // by {s + a_ij})
    std::pair<std::vector<double>, std::vector<double>> act(
        std::size_t i, std::size_t j, double s, std::span<const double> x,
        std::span<const double> a) const;
};

FlowExtension lift_to_flow(const ErgodicSystem& base, std::size_t k, std::size_t l);

// Randomized identity check with dyadic (exactly representable) s and a, so
// the comparison against the base floor-iterate formula is exact. Returns the
// number of failures out of `trials`.
std::uint64_t lift_identity_check(const FlowExtension& ext, std::uint64_t trials,
                                  std::uint64_t seed = 424242);

// Finite union of arcs of the circle with exact measure.
struct ArcUnion {
    std::vector<std::pair<double, double>> arcs; // [lo, hi) with 0<=lo<hi<=1
    double measure() const;
    bool contains(double x) const;
};

struct RecurrenceResult {
    double average = 0;       // prime-scheme mean of mu(A cap T^-m1 A cap ...)
    double floor_bound = 0;   // mu(A)^{k+1}
    std::uint64_t samples = 0;
};

// Intersection measures computed exactly from arc endpoints; system must be a
// one-dimensional torus rotation.
RecurrenceResult recurrence_experiment(const ErgodicSystem& sys, const ArcUnion& A,
                                       const std::vector<HardyExpr>& iterates,
                                       Scheme scheme, const VonMangoldtTable& table,
                                       std::uint64_t N);

struct NilEquiResult {
    std::vector<std::complex<double>> averages;
    std::vector<std::complex<double>> haar; // grid-computed Haar integrals
    std::vector<double> residuals;          // |average - haar| per observable
};

// Prime-scheme orbit average of each observable along g^{floor(a(p))} x0
// against the Haar integral (uniform grid, 64 points per dimension).
NilEquiResult nil_orbit_equidistribution(const ErgodicSystem& sys,
                                         const HardyExpr& a,
                                         const VonMangoldtTable& table,
                                         std::uint64_t N,
                                         const std::vector<Observable>& obs,
                                         std::span<const double> x0);

struct ShortIntervalResult {
    double left = 0;   // |E_{r<=R} (Lambda_{w,b}(r)-1) A_r|
    double right = 0;  // E_{r<=R} |E_{r<=n<=r+L(r)} (Lambda_{w,b}(n)-1) A_n|
    double slack = 0;  // finite-R weight-mismatch bound, computed not assumed
    bool holds = false; // left <= right + slack
};

// Long-average versus short-interval double average for a bounded sequence
// A_n (||A_n|| <= 1 expected), with L(t) = t^L_exponent.
ShortIntervalResult short_interval_average(
    const std::function<std::complex<double>(std::uint64_t)>& A,
    const VonMangoldtTable& table, const WTrick& trick, double L_exponent,
    std::uint64_t R);

} // namespace hpl
