#pragma once

#include "hpl/sieve.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hpl {

using cplx = std::complex<double>;

// Finitely supported sequence on Z: data[i] sits at index offset + i,
// everything outside is zero.
struct FiniteSequence {
    long long offset = 0;
    std::vector<cplx> data;

    cplx at(long long n) const {
        long long i = n - offset;
        if (i < 0 || i >= static_cast<long long>(data.size())) return {};
        return data[static_cast<std::size_t>(i)];
    }
};

enum class GowersNormalization { unnormalized_z, interval, cyclic_group };

struct GowersResult {
    int s = 1;
    double value = 0;
    GowersNormalization normalization = GowersNormalization::unnormalized_z;
    std::uint64_t term_count = 0; // lattice points visited by the direct kernel
};

inline constexpr int kMaxGowersS = 5;

// Unnormalized U^s norm over Z (sum over all parallelepipeds inside the
// support window, then the 2^s-th root).
GowersResult gowers_unnormalized(const FiniteSequence& f, int s);

// ||f||_{U^s[lo,hi]} = ||f 1_I||_{U^s(Z)} / ||1_I||_{U^s(Z)}; picks the direct
// kernel for small windows and the cyclic-group route (exact for N' >= 2H)
// for large ones.
GowersResult gowers_interval(const FiniteSequence& f, long long lo, long long hi, int s);

// Averaged U^s norm on Z_N. s=1 is |mean|; s=2 goes through the Fourier
// identity; s>=3 recurses over multiplicative derivatives.
GowersResult gowers_cyclic(std::span<const cplx> f, int s);

// Plain O(N^{s+1}) summation with wraparound. Oracle path for cross-checks.
GowersResult gowers_cyclic_direct(std::span<const cplx> f, int s);

// sum_xi |f_hat(xi)|^4 with f_hat(xi) = E_n f(n) e(-n xi / N); equals
// ||f||_{U^2(Z_N)}^4.
double u2_fourth_power_fourier(std::span<const cplx> f);

// (||f||_{U^s[1,N]}, cyclic ratio over Z_{N'}); the two agree for N' >= 2N.
std::pair<double, double> lemma23_bridge(const FiniteSequence& f, std::uint64_t N,
                                         std::uint64_t N_prime, int s);

// (||u 1_{a(Q)}||_{U^s(X,X+H]}, ||u||_{U^s(X,X+H]}); requires s >= 2.
std::pair<double, double> ap_restriction_check(const FiniteSequence& u, long long a,
                                               long long Q, long long X, long long H,
                                               int s);

// E_{N<=n<=N+L} (Lambda_{w,b}(n)-1) e(p(n)) for a real polynomial p
// (coefficients in increasing degree order).
cplx weighted_polynomial_expsum(const VonMangoldtTable& table, const WTrick& trick,
                                std::span<const double> poly, std::uint64_t N,
                                std::uint64_t L);

// {p(n)} by long-double Horner; adequate for desk-scale degrees and ranges.
double poly_frac(std::span<const double> poly, double n);

// In-place DFT helpers (power-of-two sizes use an iterative radix-2 FFT,
// everything else falls back to the quadratic transform).
std::vector<cplx> dft(std::span<const cplx> a);

} // namespace hpl
