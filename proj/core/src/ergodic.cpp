#include "hpl/ergodic.hpp"

#include "hpl/accum.hpp"
#include "hpl/errors.hpp"
#include "hpl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hpl {

using cplx = std::complex<double>;

ErgodicSystem ErgodicSystem::torus_rotation(
    std::vector<std::vector<double>> alphas) {
    if (alphas.empty())
        throw invalid_argument("torus_rotation: need at least one map");
    ErgodicSystem s;
    s.kind_ = Kind::torus_rotation;
    s.dim_ = alphas[0].size();
    if (s.dim_ == 0) throw invalid_argument("torus_rotation: zero dimension");
    for (auto& a : alphas) {
        if (a.size() != s.dim_)
            throw invalid_argument("torus_rotation: inconsistent dimensions");
        MapData m;
        m.alpha = std::move(a);
        s.maps_.push_back(std::move(m));
    }
    return s;
}

ErgodicSystem ErgodicSystem::unipotent_affine(double alpha) {
    ErgodicSystem s;
    s.kind_ = Kind::unipotent_affine;
    s.dim_ = 2;
    MapData m;
    m.alpha = {alpha};
    s.maps_.push_back(std::move(m));
    return s;
}

ErgodicSystem ErgodicSystem::heisenberg_orbit(double a, double b, double c) {
    ErgodicSystem s;
    s.kind_ = Kind::heisenberg_orbit;
    s.dim_ = 3;
    MapData m;
    m.a = a;
    m.b = b;
    m.c = c;
    s.maps_.push_back(std::move(m));
    return s;
}

std::vector<double> ErgodicSystem::iterate(std::size_t map, long long m,
                                           std::span<const double> x) const {
    if (map >= maps_.size())
        throw invalid_argument("iterate: map index out of range");
    if (x.size() != dim_) throw invalid_argument("iterate: wrong point dimension");
    const MapData& md = maps_[map];
    switch (kind_) {
        case Kind::torus_rotation: {
            std::vector<double> y(dim_);
            for (std::size_t c = 0; c < dim_; ++c)
                y[c] = frac(x[c] + FixedAngle(md.alpha[c]).frac_mul(m));
            return y;
        }
        case Kind::unipotent_affine: {
            // T^m(x, y) = (x + m a, y + m x + C(m,2) a)
            const double a = md.alpha[0];
            const long long c2 = m * (m - 1) / 2;
            double nx = frac(x[0] + FixedAngle(a).frac_mul(m));
            double ny = frac(x[1] + FixedAngle(x[0]).frac_mul(m) +
                             FixedAngle(a).frac_mul(c2));
            return {nx, ny};
        }
        case Kind::heisenberg_orbit: {
            // g^m = (m a, m b, m c + C(m,2) a b), acting on the left; the
            // result is reduced into [0,1)^3 by one lattice element on the
            // right. Third-coordinate precision relies on a*b being exactly
            // representable (integer b in practice).
            if (m < 0)
                throw invalid_argument("iterate: negative heisenberg power");
            const FixedAngle Fa(md.a), Fb(md.b), Fc(md.c), Fab(md.a * md.b);
            const long long c2 = m * (m - 1) / 2;
            const long long ia = static_cast<long long>(std::floor(md.a));
            const long long ib = static_cast<long long>(std::floor(md.b));

            const double fa = Fa.frac_mul(m);
            const double fb = Fb.frac_mul(m);
            const double X1 = frac(fa + x[0]);
            const double Y1 = frac(fb + x[1]);
            // KA = floor(m a); KY = floor(m b + x[1] part of Y0)
            const long long KA = m * ia + Fa.floor_mul(m);
            const long long KY = m * ib + Fb.floor_mul(m) +
                                 static_cast<long long>(std::floor(fb + x[1]));
            const double fC = frac(Fc.frac_mul(m) + Fab.frac_mul(c2));
            const double fAx2 =
                frac(FixedAngle(x[1]).frac_mul(KA) + fa * x[1]);
            const double z =
                frac(fC + x[2] + fAx2 - FixedAngle(X1).frac_mul(KY));
            return {X1, Y1, z};
        }
    }
    throw internal_error("iterate: unknown system kind");
}

// ---------------------------------------------------------------------------
// invariant checks

namespace {

double torus_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0;
    for (std::size_t c = 0; c < a.size(); ++c)
        d = std::max(d, circle_norm(a[c] - b[c]));
    return d;
}

} // namespace

std::vector<std::vector<double>> starting_grid(std::size_t dim, std::size_t count,
                                               std::uint64_t seed) {
    static constexpr double kIrr[6] = {
        0.41421356237309515, 0.73205080756887720, 0.23606797749978969,
        0.64575131106459059, 0.31662479035539985, 0.60555127546398912};
    // splitmix-style seed scramble for the grid offset
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    const double off = static_cast<double>(z >> 11) * 0x1.0p-53;

    std::vector<std::vector<double>> grid(count, std::vector<double>(dim));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t c = 0; c < dim; ++c)
            grid[i][c] =
                frac(off + static_cast<double>(i + 1) * kIrr[c % 6] +
                     0.5 * static_cast<double>(c));
    return grid;
}

void ErgodicSystem::check_invariants(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(dim_);
        for (auto& c : x) c = uni(rng);
        for (std::size_t i = 0; i < maps_.size(); ++i) {
            for (std::size_t j = i + 1; j < maps_.size(); ++j) {
                auto ij = iterate(i, 1, iterate(j, 1, x));
                auto ji = iterate(j, 1, iterate(i, 1, x));
                if (torus_dist(ij, ji) > 1e-12)
                    throw invalid_argument(
                        "check_invariants: maps do not commute");
            }
        }
    }

    // pushforward of a 10^4-point grid should stay close to uniform in every
    // coordinate
    const auto grid = starting_grid(dim_, 10000, seed);
    constexpr int kBins = 16;
    for (std::size_t i = 0; i < maps_.size(); ++i) {
        std::vector<std::vector<int>> hist(dim_, std::vector<int>(kBins, 0));
        for (const auto& x : grid) {
            auto y = iterate(i, 1, x);
            for (std::size_t c = 0; c < dim_; ++c) {
                int bin = static_cast<int>(y[c] * kBins);
                if (bin == kBins) bin = kBins - 1;
                ++hist[c][bin];
            }
        }
        for (std::size_t c = 0; c < dim_; ++c)
            for (int b = 0; b < kBins; ++b) {
                const double p = hist[c][b] / 10000.0;
                if (std::abs(p - 1.0 / kBins) > 0.02)
                    throw invalid_argument(
                        "check_invariants: pushforward drifts from Haar");
            }
    }
}

// ---------------------------------------------------------------------------
// multiple averages

namespace {

struct SchemeWeights {
    bool needs_table;
    bool w_shift; // evaluate iterates at W n + b
};

SchemeWeights scheme_traits(Scheme s) {
    switch (s) {
        case Scheme::cesaro: return {false, false};
        case Scheme::prime: return {true, false};
        case Scheme::lambda: return {true, false};
        case Scheme::w_tricked: return {true, true};
        case Scheme::short_interval: return {true, true};
    }
    throw internal_error("scheme_traits: unknown scheme");
}

cplx product_observable(const ErgodicSystem& sys,
                        const std::vector<Observable>& fs,
                        const std::vector<std::vector<HardyExpr>>& iterates,
                        double arg, std::span<const double> x0, bool& ambiguous) {
    cplx prod{1.0, 0.0};
    for (std::size_t j = 0; j < fs.size(); ++j) {
        std::vector<double> x(x0.begin(), x0.end());
        for (std::size_t i = 0; i < sys.map_count(); ++i) {
            bool amb = false;
            const long long m =
                guarded_floor(iterates[j][i].eval(arg), amb);
            if (amb) {
                ambiguous = true;
                return {};
            }
            x = sys.iterate(i, m, x);
        }
        prod *= fs[j](x);
    }
    return prod;
}

} // namespace

AverageSeries multiple_average(const ErgodicSystem& sys,
                               const std::vector<Observable>& fs,
                               const std::vector<std::vector<HardyExpr>>& iterates,
                               Scheme scheme, const VonMangoldtTable* table,
                               const WTrick* trick, std::span<const double> x0,
                               std::span<const std::uint64_t> checkpoints,
                               double L_exponent) {
    if (fs.empty()) throw invalid_argument("multiple_average: no observables");
    if (iterates.size() != fs.size())
        throw invalid_argument("multiple_average: iterate spec shape mismatch");
    for (const auto& row : iterates)
        if (row.size() != sys.map_count())
            throw invalid_argument("multiple_average: iterate spec shape mismatch");
    if (checkpoints.empty())
        throw invalid_argument("multiple_average: no checkpoints");
    const SchemeWeights tr = scheme_traits(scheme);
    if (tr.needs_table && (!table || (tr.w_shift && !trick)))
        throw invalid_argument("multiple_average: scheme needs table/trick");
    sys.check_invariants();

    std::vector<std::uint64_t> cps(checkpoints.begin(), checkpoints.end());
    std::sort(cps.begin(), cps.end());
    const std::uint64_t maxN = cps.back();

    AverageSeries series;
    series.scheme = scheme;

    if (scheme == Scheme::short_interval) {
        // E_{r<=R} E_{r<=n<=r+L(r)} (Lambda_{w,b}(n)-1) F(n)
        PairwiseSum<cplx> outer;
        std::size_t next = 0;
        for (std::uint64_t r = 1; r <= maxN; ++r) {
            const std::uint64_t L = static_cast<std::uint64_t>(
                std::pow(static_cast<double>(r), L_exponent));
            PairwiseSum<cplx> inner;
            for (std::uint64_t n = r; n <= r + L; ++n) {
                bool amb = false;
                const double arg = static_cast<double>(trick->W * n + trick->b);
                cplx F = product_observable(sys, fs, iterates, arg, x0, amb);
                if (amb) continue;
                inner.add((w_tricked_lambda(*table, *trick, n) - 1.0) * F);
            }
            outer.add(inner.total() / static_cast<double>(L + 1));
            while (next < cps.size() && cps[next] == r) {
                Checkpoint cp;
                cp.N = r;
                cp.value = outer.total() / static_cast<double>(r);
                cp.norm = std::abs(cp.value);
                series.checkpoints.push_back(cp);
                ++next;
            }
        }
        return series;
    }

    PairwiseSum<cplx> num;
    std::uint64_t denom_count = 0; // primes seen (prime scheme)
    std::size_t next = 0;
    for (std::uint64_t n = 1; n <= maxN; ++n) {
        double weight = 1.0;
        std::uint64_t arg_int = n;
        bool skip = false;
        switch (scheme) {
            case Scheme::cesaro: break;
            case Scheme::prime:
                if (!table->is_prime(n)) skip = true;
                else ++denom_count;
                break;
            case Scheme::lambda:
                weight = table->lambda(n);
                if (weight == 0.0) skip = true;
                break;
            case Scheme::w_tricked:
                arg_int = trick->W * n + trick->b;
                weight = w_tricked_lambda(*table, *trick, n) - 1.0;
                break;
            default: break;
        }
        if (!skip) {
            bool amb = false;
            cplx F = product_observable(sys, fs, iterates,
                                        static_cast<double>(arg_int), x0, amb);
            if (!amb) num.add(weight * F);
        }
        while (next < cps.size() && cps[next] == n) {
            Checkpoint cp;
            cp.N = n;
            const double denom = scheme == Scheme::prime
                                     ? static_cast<double>(denom_count)
                                     : static_cast<double>(n);
            cp.value = denom > 0 ? num.total() / denom : cplx{};
            cp.norm = std::abs(cp.value);
            series.checkpoints.push_back(cp);
            ++next;
        }
    }
    return series;
}

// ---------------------------------------------------------------------------
// comparison gap

double comparison_gap(const ErgodicSystem& sys, const std::vector<Observable>& fs,
                      const std::vector<std::vector<HardyExpr>>& iterates,
                      const VonMangoldtTable& table, std::uint64_t w,
                      std::uint64_t N) {
    if (fs.empty() || iterates.size() != fs.size())
        throw invalid_argument("comparison_gap: observable/iterate mismatch");
    for (const auto& row : iterates) {
        if (row.size() != sys.map_count())
            throw invalid_argument("comparison_gap: iterate spec shape mismatch");
        for (const auto& a : row) {
            GrowthClass gc = classify(a);
            if (gc.condition == ConditionTag::neither)
                throw hypothesis_violation(
                    "comparison_gap: iterate function is neither far from nor "
                    "close to a rational polynomial");
        }
    }
    sys.check_invariants();

    const std::uint64_t W = primorial(w);
    const auto grid = starting_grid(sys.dim(), 1000);

    double worst = 0;
    for (std::uint64_t b = 1; b <= W; ++b) {
        if (std::gcd(b, W) != 1) continue;
        const WTrick trick = primorial_trick(w, b);
        // per-n weights and iterate exponents, shared across the grid
        std::vector<double> weight(N + 1, 0.0);
        std::vector<std::vector<std::vector<long long>>> mexp(
            N + 1, std::vector<std::vector<long long>>(
                       fs.size(), std::vector<long long>(sys.map_count())));
        for (std::uint64_t n = 1; n <= N; ++n) {
            weight[n] = w_tricked_lambda(table, trick, n) - 1.0;
            const double arg = static_cast<double>(trick.W * n + trick.b);
            for (std::size_t j = 0; j < fs.size(); ++j)
                for (std::size_t i = 0; i < sys.map_count(); ++i) {
                    bool amb = false;
                    mexp[n][j][i] = guarded_floor(iterates[j][i].eval(arg), amb);
                }
        }

        // torus fast path: compose the commuting rotations into one offset
        std::vector<std::vector<std::vector<double>>> offs;
        if (sys.kind() == ErgodicSystem::Kind::torus_rotation) {
            offs.assign(N + 1, std::vector<std::vector<double>>(
                                   fs.size(), std::vector<double>(sys.dim(), 0.0)));
            for (std::uint64_t n = 1; n <= N; ++n)
                for (std::size_t j = 0; j < fs.size(); ++j) {
                    std::vector<double> zero(sys.dim(), 0.0);
                    std::vector<double> p = zero;
                    for (std::size_t i = 0; i < sys.map_count(); ++i)
                        p = sys.iterate(i, mexp[n][j][i], p);
                    offs[n][j] = p;
                }
        }

        const double sq = parallel_chunked_sum<double>(
            grid.size(), 16, [&](std::size_t gb, std::size_t ge) {
                PairwiseSum<double> acc;
                std::vector<double> pt(sys.dim());
                for (std::size_t g = gb; g < ge; ++g) {
                    PairwiseSum<cplx> avg;
                    for (std::uint64_t n = 1; n <= N; ++n) {
                        if (weight[n] == 0.0) continue;
                        cplx F{1.0, 0.0};
                        if (!offs.empty()) {
                            for (std::size_t j = 0; j < fs.size(); ++j) {
                                for (std::size_t c = 0; c < sys.dim(); ++c)
                                    pt[c] = frac(grid[g][c] + offs[n][j][c]);
                                F *= fs[j](pt);
                            }
                        } else {
                            for (std::size_t j = 0; j < fs.size(); ++j) {
                                std::vector<double> x = grid[g];
                                for (std::size_t i = 0; i < sys.map_count(); ++i)
                                    x = sys.iterate(i, mexp[n][j][i], x);
                                F *= fs[j](x);
                            }
                        }
                        avg.add(weight[n] * F);
                    }
                    acc.add(std::norm(avg.total() / static_cast<double>(N)));
                }
                return acc.total();
            });
        worst = std::max(worst, std::sqrt(sq / static_cast<double>(grid.size())));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// flow extension

FlowExtension lift_to_flow(const ErgodicSystem& base, std::size_t k,
                           std::size_t l) {
    if (base.kind() != ErgodicSystem::Kind::torus_rotation)
        throw invalid_argument("lift_to_flow: base must be a torus rotation");
    if (k == 0 || l == 0 || k > base.map_count())
        throw invalid_argument("lift_to_flow: bad dimensions");
    FlowExtension ext;
    ext.base = &base;
    ext.k = k;
    ext.l = l;
    return ext;
}

std::pair<std::vector<double>, std::vector<double>> FlowExtension::act(
    std::size_t i, std::size_t j, double s, std::span<const double> x,
    std::span<const double> a) const {
    if (i >= k || j >= l) throw invalid_argument("FlowExtension: bad slot");
    if (a.size() != k * l) throw invalid_argument("FlowExtension: bad phase size");
    const std::size_t idx = i * l + j;
    const double shifted = s + a[idx];
    const long long m = static_cast<long long>(std::floor(shifted));
    std::vector<double> nx = base->iterate(i, m, x);
    std::vector<double> na(a.begin(), a.end());
    na[idx] = shifted - static_cast<double>(m);
    return {std::move(nx), std::move(na)};
}

std::uint64_t lift_identity_check(const FlowExtension& ext, std::uint64_t trials,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    constexpr double kStep = 0x1.0p-20; // dyadic grid keeps floor/frac exact
    std::uniform_int_distribution<long long> sdist(-4 << 20, 4 << 20);
    std::uniform_int_distribution<long long> adist(0, (1 << 20) - 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::uint64_t failures = 0;
    const std::size_t dim = ext.base->dim();
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::size_t i = rng() % ext.k;
        const std::size_t j = rng() % ext.l;
        const long long sticks = sdist(rng);
        const long long aticks = adist(rng);
        const double s = static_cast<double>(sticks) * kStep;
        std::vector<double> x(dim);
        for (auto& c : x) c = uni(rng);
        std::vector<double> a(ext.k * ext.l, 0.0);
        a[i * ext.l + j] = static_cast<double>(aticks) * kStep;

        auto [nx, na] = ext.act(i, j, s, x, a);

        // independent integer-arithmetic oracle on the dyadic grid
        const long long total = sticks + aticks;
        const long long m = total >> 20;
        const double fr = static_cast<double>(total - (m << 20)) * kStep;
        std::vector<double> ex = ext.base->iterate(i, m, x);
        bool ok = na[i * ext.l + j] == fr;
        for (std::size_t c = 0; c < dim; ++c)
            if (nx[c] != ex[c]) ok = false;
        for (std::size_t slot = 0; slot < a.size(); ++slot)
            if (slot != i * ext.l + j && na[slot] != a[slot]) ok = false;
        if (!ok) ++failures;
    }
    return failures;
}

// ---------------------------------------------------------------------------
// recurrence

double ArcUnion::measure() const {
    double m = 0;
    for (const auto& [lo, hi] : arcs) m += hi - lo;
    return m;
}

bool ArcUnion::contains(double x) const {
    for (const auto& [lo, hi] : arcs)
        if (lo <= x && x < hi) return true;
    return false;
}

namespace {

void validate_arcs(const ArcUnion& A) {
    if (A.arcs.empty())
        throw unsupported_set("recurrence_experiment: empty arc union");
    for (const auto& [lo, hi] : A.arcs)
        if (!(0.0 <= lo && lo < hi && hi <= 1.0))
            throw unsupported_set("recurrence_experiment: malformed arc");
}

// measure of the intersection of the unions, each shifted by its offset
double intersection_measure(const ArcUnion& A, std::span<const double> shifts) {
    std::vector<double> cuts{0.0, 1.0};
    for (double s : shifts)
        for (const auto& [lo, hi] : A.arcs) {
            cuts.push_back(frac(lo + s));
            cuts.push_back(frac(hi + s));
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double mid = (cuts[c] + cuts[c + 1]) / 2;
        bool in_all = true;
        for (double s : shifts)
            if (!A.contains(frac(mid - s))) {
                in_all = false;
                break;
            }
        if (in_all) total += cuts[c + 1] - cuts[c];
    }
    return total;
}

} // namespace

RecurrenceResult recurrence_experiment(const ErgodicSystem& sys, const ArcUnion& A,
                                       const std::vector<HardyExpr>& iterates,
                                       Scheme scheme, const VonMangoldtTable& table,
                                       std::uint64_t N) {
    if (sys.kind() != ErgodicSystem::Kind::torus_rotation || sys.dim() != 1)
        throw invalid_argument(
            "recurrence_experiment: need a one-dimensional torus rotation");
    if (scheme != Scheme::prime && scheme != Scheme::cesaro)
        throw invalid_argument(
            "recurrence_experiment: scheme must be prime or cesaro");
    if (iterates.empty())
        throw invalid_argument("recurrence_experiment: no iterate functions");
    validate_arcs(A);

    RecurrenceResult res;
    const std::size_t k = iterates.size();
    PairwiseSum<double> acc;
    std::vector<double> shifts(k + 1, 0.0); // slot 0 is A itself
    for (std::uint64_t n = 2; n <= N; ++n) {
        if (scheme == Scheme::prime && !table.is_prime(n)) continue;
        bool amb = false;
        for (std::size_t i = 0; i < k; ++i) {
            const long long m =
                guarded_floor(iterates[i].eval(static_cast<double>(n)), amb);
            // x in T^-m A  <=>  x + m alpha in A, so A is shifted by -m alpha
            std::vector<double> z{0.0};
            shifts[i + 1] = -sys.iterate(0, m, z)[0];
        }
        if (amb) continue;
        acc.add(intersection_measure(A, shifts));
        ++res.samples;
    }
    if (res.samples)
        res.average = acc.total() / static_cast<double>(res.samples);
    res.floor_bound = std::pow(A.measure(), static_cast<double>(k + 1));
    return res;
}

// ---------------------------------------------------------------------------
// nil orbit equidistribution

NilEquiResult nil_orbit_equidistribution(const ErgodicSystem& sys,
                                         const HardyExpr& a,
                                         const VonMangoldtTable& table,
                                         std::uint64_t N,
                                         const std::vector<Observable>& obs,
                                         std::span<const double> x0) {
    if (obs.empty())
        throw invalid_argument("nil_orbit_equidistribution: no observables");
    if (x0.size() != sys.dim())
        throw invalid_argument("nil_orbit_equidistribution: bad base point");

    NilEquiResult res;
    std::vector<PairwiseSum<cplx>> sums(obs.size());
    std::uint64_t primes = 0;
    for (std::uint64_t p = 2; p <= N; ++p) {
        if (!table.is_prime(p)) continue;
        bool amb = false;
        const long long m = guarded_floor(a.eval(static_cast<double>(p)), amb);
        if (amb) continue;
        auto pt = sys.iterate(0, m, x0);
        ++primes;
        for (std::size_t o = 0; o < obs.size(); ++o) sums[o].add(obs[o](pt));
    }
    if (primes == 0)
        throw invalid_argument("nil_orbit_equidistribution: no primes below N");

    // Haar integral on a uniform Mal'cev grid (Haar is Lebesgue in these
    // coordinates); 64 points per dimension
    constexpr int kSide = 64;
    const std::size_t d = sys.dim();
    std::vector<PairwiseSum<cplx>> haar(obs.size());
    std::vector<double> pt(d);
    std::vector<int> idx(d, 0);
    std::uint64_t cells = 1;
    for (std::size_t c = 0; c < d; ++c) cells *= kSide;
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        std::uint64_t rem = cell;
        for (std::size_t c = 0; c < d; ++c) {
            pt[c] = (static_cast<double>(rem % kSide) + 0.5) / kSide;
            rem /= kSide;
        }
        for (std::size_t o = 0; o < obs.size(); ++o) haar[o].add(obs[o](pt));
    }

    for (std::size_t o = 0; o < obs.size(); ++o) {
        const cplx avg = sums[o].total() / static_cast<double>(primes);
        const cplx hi = haar[o].total() / static_cast<double>(cells);
        res.averages.push_back(avg);
        res.haar.push_back(hi);
        res.residuals.push_back(std::abs(avg - hi));
    }
    return res;
}

// ---------------------------------------------------------------------------
// short intervals

ShortIntervalResult short_interval_average(
    const std::function<cplx(std::uint64_t)>& A, const VonMangoldtTable& table,
    const WTrick& trick, double L_exponent, std::uint64_t R) {
    if (R == 0) throw invalid_argument("short_interval_average: R must be > 0");
    if (!(L_exponent > 0.0 && L_exponent < 1.0))
        throw invalid_argument(
            "short_interval_average: L exponent must be in (0,1)");
    auto L_of = [&](std::uint64_t t) {
        return static_cast<std::uint64_t>(
            std::pow(static_cast<double>(t), L_exponent));
    };
    const std::uint64_t n_max = R + L_of(R);
    if (trick.W * n_max + trick.b > table.limit())
        throw out_of_range_error("short_interval_average: beyond table limit");

    std::vector<cplx> Av(n_max + 1);
    std::vector<double> wt(n_max + 1);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        Av[n] = A(n);
        wt[n] = w_tricked_lambda(table, trick, n) - 1.0;
    }

    ShortIntervalResult res;
    PairwiseSum<cplx> left_acc;
    for (std::uint64_t r = 1; r <= R; ++r) left_acc.add(wt[r] * Av[r]);
    res.left = std::abs(left_acc.total()) / static_cast<double>(R);

    // window averages plus the exact double-average weight p(n)
    std::vector<double> p(n_max + 1, 0.0);
    PairwiseSum<double> right_acc;
    for (std::uint64_t r = 1; r <= R; ++r) {
        const std::uint64_t L = L_of(r);
        PairwiseSum<cplx> win;
        const double inv = 1.0 / static_cast<double>(L + 1);
        for (std::uint64_t n = r; n <= r + L; ++n) {
            win.add(wt[n] * Av[n]);
            p[n] += inv;
        }
        right_acc.add(std::abs(win.total()) * inv);
    }
    res.right = right_acc.total() / static_cast<double>(R);

    // |E_{r<=R} w_r A_r| <= |E_r window_r| + (1/R) sum |p(n)-1_{n<=R}| |w_n A_n|
    PairwiseSum<double> slack_acc;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const double indicator = n <= R ? 1.0 : 0.0;
        slack_acc.add(std::abs(p[n] - indicator) * std::abs(wt[n]) *
                      std::abs(Av[n]));
    }
    res.slack = slack_acc.total() / static_cast<double>(R);
    res.holds = res.left <= res.right + res.slack + 1e-12;
    return res;
}

} // namespace hpl
