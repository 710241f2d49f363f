// Command-line front end: builds sieve caches, runs the named experiments,
// emits CSV/JSON artifacts, and manages pinned regression values.

#include "hpl/equidist.hpp"
#include "hpl/ergodic.hpp"
#include "hpl/errors.hpp"
#include "hpl/gowers.hpp"
#include "hpl/hardy.hpp"
#include "hpl/numeric.hpp"
#include "hpl/sieve.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

using json = nlohmann::json;
using namespace hpl;

namespace {

// thrown when a pinned regression or a declared invariant fails; exit code 2
struct assertion_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct CsvWriter {
    std::ofstream file;
    std::ostream* out = nullptr;

    explicit CsvWriter(const std::string& path) {
        if (path.empty() || path == "-") {
            out = &std::cout;
        } else {
            file.open(path);
            if (!file) throw error("cannot open CSV output: " + path);
            out = &file;
        }
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) *out << ',';
            *out << cells[i];
        }
        *out << '\n';
    }
};

// named irrationals usable inside numeric CLI parameters (angles etc.)
double parse_real(std::string s) {
    static const std::vector<std::pair<std::string, std::string>> subs = {
        {"sqrt2", "irr(sqrt2)"}, {"sqrt3", "irr(sqrt3)"}, {"sqrt5", "irr(sqrt5)"},
        {"golden", "irr(golden)"}, {"pi", "irr(pi)"}};
    for (const auto& [name, repl] : subs) {
        std::size_t pos = 0;
        while ((pos = s.find(name, pos)) != std::string::npos) {
            // skip if already wrapped
            if (pos >= 4 && s.compare(pos - 4, 4, "irr(") == 0) {
                pos += name.size();
                continue;
            }
            s.replace(pos, name.size(), repl);
            pos += repl.size();
        }
    }
    return HardyExpr::parse(s).eval(0.0);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::shared_ptr<VonMangoldtTable> load_table(const std::string& cache,
                                             std::uint64_t limit) {
    if (!cache.empty()) {
        std::ifstream probe(cache);
        if (probe.good())
            return std::make_shared<VonMangoldtTable>(VonMangoldtTable::load(cache));
    }
    if (limit < 2)
        throw invalid_argument("need --cache with an existing file or --limit");
    auto t = std::make_shared<VonMangoldtTable>(limit);
    if (!cache.empty()) t->save(cache);
    return t;
}

ErgodicSystem parse_system(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw invalid_argument("system spec must look like rot:sqrt2-1");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "rot") {
        // one rotation vector per map, maps separated by ';', coords by ','
        std::vector<std::vector<double>> alphas;
        for (const auto& m : split(rest, ';')) {
            std::vector<double> a;
            for (const auto& c : split(m, ',')) a.push_back(parse_real(c));
            alphas.push_back(std::move(a));
        }
        return ErgodicSystem::torus_rotation(std::move(alphas));
    }
    if (kind == "unipotent") return ErgodicSystem::unipotent_affine(parse_real(rest));
    if (kind == "heis") {
        auto parts = split(rest, ',');
        if (parts.size() != 3)
            throw invalid_argument("heis spec needs three Mal'cev coordinates");
        return ErgodicSystem::heisenberg_orbit(
            parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]));
    }
    throw invalid_argument("unknown system kind: " + kind);
}

Observable parse_observable(const std::string& spec) {
    if (spec == "one")
        return [](std::span<const double>) { return std::complex<double>(1.0); };
    if (spec.rfind("e", 0) == 0 && spec.size() == 2 && std::isdigit(spec[1])) {
        const std::size_t c = static_cast<std::size_t>(spec[1] - '0');
        return [c](std::span<const double> x) {
            if (c >= x.size()) throw invalid_argument("observable coordinate out of range");
            return e_of(x[c]);
        };
    }
    if (spec.rfind("arc:", 0) == 0) {
        auto parts = split(spec.substr(4), ':');
        if (parts.size() != 3)
            throw invalid_argument("arc observable needs lo:hi:ramp");
        const double lo = parse_real(parts[0]), hi = parse_real(parts[1]),
                     ramp = parse_real(parts[2]);
        return [lo, hi, ramp](std::span<const double> x) {
            const double v = x[0];
            double y = 0;
            if (v >= lo && v < lo + ramp) y = (v - lo) / ramp;
            else if (v >= lo + ramp && v < hi - ramp) y = 1.0;
            else if (v >= hi - ramp && v < hi) y = (hi - v) / ramp;
            return std::complex<double>(y);
        };
    }
    throw invalid_argument("unknown observable: " + spec);
}

Scheme parse_scheme(const std::string& s) {
    if (s == "cesaro") return Scheme::cesaro;
    if (s == "prime") return Scheme::prime;
    if (s == "lambda") return Scheme::lambda;
    if (s == "w_tricked") return Scheme::w_tricked;
    if (s == "short_interval") return Scheme::short_interval;
    throw invalid_argument("unknown scheme: " + s);
}

// ---------------------------------------------------------------------------
// command options (shared by direct flags and manifest runs)

struct Options {
    std::string command;
    std::string cache, csv_path, json_path;
    std::uint64_t limit = 0;
    std::uint64_t w = 1, b = 1, N = 0, R = 10000, L = 0, r = 0;
    std::uint64_t Q = 0;
    long long a_res = 0;
    int s = 2, k = 0, M = 100;
    double C = 1.0, Lexp = 0.7, eps = 0.05, c = 0.5, delta = 0.3;
    double ia = 0, ib = 1; // discrepancy interval
    std::string fn, fns, poly, system, scheme = "cesaro", seq, orbit, obs = "e0";
    std::string window, arcs, x0, checkpoints, wlist;
    bool no_enforce = false;
    bool psi = false;
};

std::pair<std::uint64_t, std::uint64_t> parse_window(const std::string& w) {
    auto plus = w.find(":+");
    if (plus == std::string::npos)
        throw invalid_argument("window must look like START:+LENGTH");
    return {std::stoull(w.substr(0, plus)), std::stoull(w.substr(plus + 2))};
}

std::vector<double> parse_point(const std::string& s, std::size_t dim) {
    std::vector<double> x(dim, 0.0);
    if (s.empty()) return x;
    auto parts = split(s, ',');
    if (parts.size() != dim)
        throw invalid_argument("start point has wrong dimension");
    for (std::size_t i = 0; i < dim; ++i) x[i] = parse_real(parts[i]);
    return x;
}

std::vector<std::vector<HardyExpr>> parse_iterates(const std::string& s,
                                                   std::size_t maps) {
    // observables separated by ';', maps by '|'
    std::vector<std::vector<HardyExpr>> out;
    for (const auto& per_obs : split(s, ';')) {
        std::vector<HardyExpr> row;
        for (const auto& f : split(per_obs, '|')) row.push_back(HardyExpr::parse(f));
        if (row.size() == 1 && maps > 1)
            row.resize(maps, row[0]);
        if (row.size() != maps)
            throw invalid_argument("iterate spec does not match map count");
        out.push_back(std::move(row));
    }
    if (out.empty()) throw invalid_argument("no iterate functions given");
    return out;
}

// ---------------------------------------------------------------------------
// command handlers; each returns a JSON summary whose "values" map holds the
// numbers eligible for pinning

json cmd_sieve(const Options& o) {
    if (o.limit < 2) throw invalid_argument("sieve: --limit required");
    VonMangoldtTable t(o.limit);
    if (!o.cache.empty()) t.save(o.cache);
    json v;
    if (o.psi) {
        const double psi = t.psi(o.limit);
        v["psi"] = psi;
        v["psi_over_x"] = psi / static_cast<double>(o.limit);
    }
    v["limit"] = o.limit;
    return json{{"values", v}};
}

json cmd_gowers(const Options& o) {
    auto [N, H] = parse_window(o.window);
    auto table = load_table(o.cache, o.limit ? o.limit
                                             : primorial(o.w) * (N + H) + o.b + 1);
    WTrick trick = primorial_trick(o.w, o.b);
    FiniteSequence f;
    f.offset = static_cast<long long>(N) + 1;
    for (std::uint64_t n = N + 1; n <= N + H; ++n)
        f.data.push_back({w_tricked_lambda(*table, trick, n) - 1.0, 0.0});

    auto res = gowers_interval(f, f.offset, static_cast<long long>(N + H), o.s);
    // cross-check through an independent embedding size
    std::uint64_t np = 1;
    while (np < 2 * H) np *= 2;
    auto [direct, cyc] = lemma23_bridge(
        FiniteSequence{1, [&] {
                           std::vector<cplx> d(H);
                           for (std::uint64_t i = 0; i < H; ++i) d[i] = f.data[i];
                           return d;
                       }()},
        H, 2 * np, o.s);

    CsvWriter csv(o.csv_path);
    csv.row({"w", "b", "N", "H", "s", "norm", "bridge_a", "bridge_b"});
    csv.row({std::to_string(o.w), std::to_string(o.b), std::to_string(N),
             std::to_string(H), std::to_string(o.s), fmt12(res.value),
             fmt12(direct), fmt12(cyc)});
    std::cout << "U^" << o.s << " = " << fmt12(res.value)
              << "  (cross-check " << fmt12(direct) << " vs " << fmt12(cyc)
              << ")\n";
    json v{{"norm", res.value}, {"bridge_a", direct}, {"bridge_b", cyc}};
    return json{{"values", v}};
}

json cmd_discrepancy(const Options& o) {
    std::vector<double> seq;
    if (o.orbit.rfind("rot:", 0) == 0) {
        const double alpha = parse_real(o.orbit.substr(4));
        for (std::uint64_t n = 1; n <= o.N; ++n)
            seq.push_back(FixedAngle(alpha).frac_mul(static_cast<long long>(n)));
    } else if (o.orbit.rfind("file:", 0) == 0) {
        std::ifstream in(o.orbit.substr(5));
        if (!in) throw invalid_argument("cannot open orbit file");
        double x;
        while (in >> x) seq.push_back(x);
    } else {
        throw invalid_argument("orbit must be rot:ANGLE or file:PATH");
    }
    auto rep = discrepancy(seq, o.ia, o.ib);
    rep.M = o.M;
    rep.et_majorant = erdos_turan_majorant(seq, o.M, o.C);
    CsvWriter csv(o.csv_path);
    csv.row({"a", "b", "count_in", "total", "discrepancy", "et_majorant", "M"});
    csv.row({fmt12(rep.a), fmt12(rep.b), std::to_string(rep.count_in),
             std::to_string(rep.total), fmt12(rep.discrepancy),
             fmt12(rep.et_majorant), std::to_string(rep.M)});
    json v{{"discrepancy", rep.discrepancy}, {"et_majorant", rep.et_majorant}};
    return json{{"values", v}};
}

json cmd_taylor(const Options& o) {
    HardyExpr e = HardyExpr::parse(o.fn);
    KLSelection sel =
        o.Lexp > 0 ? select_k_and_L({e}, o.c, o.Lexp) : select_k_and_L({e}, o.c);
    const int k = o.k > 0 ? o.k : sel.k[0];
    const std::uint64_t N = o.N ? o.N : 1000000;
    const std::uint64_t L =
        o.L ? o.L
            : static_cast<std::uint64_t>(
                  std::pow(static_cast<double>(N), sel.L_exponent));
    TaylorModel m = taylor_model(e, N, L, k);
    CsvWriter csv(o.csv_path);
    csv.row({"N", "L", "k", "L_exponent", "delta", "theta"});
    csv.row({std::to_string(N), std::to_string(L), std::to_string(k),
             fmt12(sel.L_exponent), fmt12(sel.delta), fmt12(m.remainder_bound)});
    std::cout << "k=" << k << " L=t^" << fmt12(sel.L_exponent)
              << " delta=" << fmt12(sel.delta)
              << " theta=" << fmt12(m.remainder_bound) << "\n";
    json v{{"k", k}, {"L_exponent", sel.L_exponent}, {"delta", sel.delta},
           {"theta", m.remainder_bound}};
    return json{{"values", v}};
}

json cmd_floor_match(const Options& o) {
    HardyExpr e = HardyExpr::parse(o.fn);
    CsvWriter csv(o.csv_path);
    csv.row({"N", "L", "mismatch_count", "fraction", "bad_set_size",
             "weighted_mass"});
    json v;
    if (o.scheme == "fast") {
        const std::uint64_t L =
            o.L ? o.L
                : static_cast<std::uint64_t>(
                      std::pow(static_cast<double>(o.N), o.Lexp));
        auto rep = floor_match_fast(e, o.N, L, o.k);
        csv.row({std::to_string(rep.base), std::to_string(rep.length),
                 std::to_string(rep.mismatch_count), fmt12(rep.mismatch_fraction),
                 "0", "0"});
        v["mismatch_fraction"] = rep.mismatch_fraction;
        v["mismatch_count"] = rep.mismatch_count;
    } else if (o.scheme == "slow") {
        auto rep = floor_match_slow(e, o.R, o.Lexp);
        for (const auto& wdw : rep.per_window)
            csv.row({std::to_string(wdw.base), std::to_string(wdw.length),
                     std::to_string(wdw.mismatch_count),
                     fmt12(wdw.mismatch_fraction), "0", "0"});
        v["bad_fraction"] = rep.bad_fraction;
        std::cout << "bad windows " << rep.bad_windows << "/" << rep.windows
                  << " = " << fmt12(rep.bad_fraction) << "\n";
    } else if (o.scheme == "poly") {
        std::vector<double> coeffs;
        for (const auto& cstr : split(o.poly, ',')) coeffs.push_back(parse_real(cstr));
        auto table = load_table(
            o.cache, o.limit ? o.limit : primorial(o.w) * (o.r + o.L) + o.b + 1);
        WTrick trick = primorial_trick(o.w, o.b);
        auto rep = poly_bad_set(coeffs, e, *table, trick, o.r, o.L, o.eps,
                                !o.no_enforce);
        csv.row({std::to_string(rep.base), std::to_string(rep.length),
                 std::to_string(rep.mismatch_count), fmt12(rep.mismatch_fraction),
                 std::to_string(rep.bad_set_size), fmt12(rep.weighted_mass)});
        v["bad_set_fraction"] = rep.bad_set_fraction;
        v["weighted_mass"] = rep.weighted_mass;
        v["off_bad_mismatches"] = rep.off_bad_mismatches;
        v["drift"] = rep.drift;
    } else {
        throw invalid_argument("floor-match --regime must be fast, slow or poly");
    }
    return json{{"values", v}};
}

json cmd_average(const Options& o) {
    ErgodicSystem sys = parse_system(o.system);
    std::vector<Observable> fs;
    for (const auto& spec : split(o.obs, ';')) fs.push_back(parse_observable(spec));
    auto iterates = parse_iterates(o.fns, sys.map_count());
    if (iterates.size() != fs.size())
        throw invalid_argument("need one iterate spec per observable");
    Scheme scheme = parse_scheme(o.scheme);
    std::vector<std::uint64_t> cps;
    for (const auto& cstr : split(o.checkpoints, ',')) cps.push_back(std::stoull(cstr));
    if (cps.empty()) cps.push_back(o.N ? o.N : 10000);

    std::shared_ptr<VonMangoldtTable> table;
    std::optional<WTrick> trick;
    if (scheme != Scheme::cesaro) {
        std::uint64_t need = *std::max_element(cps.begin(), cps.end());
        if (scheme == Scheme::w_tricked || scheme == Scheme::short_interval) {
            trick = primorial_trick(o.w, o.b);
            need = trick->W * (need + static_cast<std::uint64_t>(std::pow(
                                          static_cast<double>(need), o.Lexp)) +
                               2) +
                   trick->b;
        }
        table = load_table(o.cache, o.limit ? o.limit : need + 1);
    }
    auto x0 = parse_point(o.x0, sys.dim());
    auto series = multiple_average(sys, fs, iterates, scheme, table.get(),
                                   trick ? &*trick : nullptr, x0, cps, o.Lexp);
    CsvWriter csv(o.csv_path);
    csv.row({"scheme", "N", "w", "b", "value_re", "value_im", "norm"});
    json cpjson = json::array();
    for (const auto& cp : series.checkpoints) {
        csv.row({o.scheme, std::to_string(cp.N), std::to_string(o.w),
                 std::to_string(o.b), fmt12(cp.value.real()),
                 fmt12(cp.value.imag()), fmt12(cp.norm)});
        cpjson.push_back({{"N", cp.N},
                          {"re", cp.value.real()},
                          {"im", cp.value.imag()},
                          {"norm", cp.norm}});
    }
    json v{{"final_norm", series.checkpoints.back().norm},
           {"final_re", series.checkpoints.back().value.real()},
           {"final_im", series.checkpoints.back().value.imag()}};
    return json{{"values", v}, {"checkpoints", cpjson}};
}

json cmd_compare(const Options& o) {
    ErgodicSystem sys = parse_system(o.system);
    std::vector<Observable> fs;
    for (const auto& spec : split(o.obs, ';')) fs.push_back(parse_observable(spec));
    auto iterates = parse_iterates(o.fns, sys.map_count());
    std::vector<std::uint64_t> ws;
    for (const auto& wstr : split(o.wlist, ',')) ws.push_back(std::stoull(wstr));
    if (ws.empty()) ws.push_back(o.w);
    const std::uint64_t maxW =
        primorial(*std::max_element(ws.begin(), ws.end()));
    auto table =
        load_table(o.cache, o.limit ? o.limit : maxW * (o.N + 1) + maxW + 1);

    CsvWriter csv(o.csv_path);
    csv.row({"w", "N", "gap"});
    json v;
    for (std::uint64_t w : ws) {
        const double gap = comparison_gap(sys, fs, iterates, *table, w, o.N);
        csv.row({std::to_string(w), std::to_string(o.N), fmt12(gap)});
        v["gap_w" + std::to_string(w)] = gap;
    }
    return json{{"values", v}};
}

json cmd_recur(const Options& o) {
    ErgodicSystem sys = parse_system(o.system);
    ArcUnion A;
    for (const auto& arc : split(o.arcs, ';')) {
        auto lohi = split(arc, ':');
        if (lohi.size() != 2) throw invalid_argument("arcs must be lo:hi;lo:hi");
        A.arcs.push_back({parse_real(lohi[0]), parse_real(lohi[1])});
    }
    std::vector<HardyExpr> its;
    for (const auto& f : split(o.fns, ';')) its.push_back(HardyExpr::parse(f));
    auto table = load_table(o.cache, o.limit ? o.limit : o.N + 1);
    auto res = recurrence_experiment(sys, A, its, parse_scheme(o.scheme), *table,
                                     o.N);
    CsvWriter csv(o.csv_path);
    csv.row({"N", "average", "floor_bound", "samples"});
    csv.row({std::to_string(o.N), fmt12(res.average), fmt12(res.floor_bound),
             std::to_string(res.samples)});
    std::cout << "average " << fmt12(res.average) << " >= floor "
              << fmt12(res.floor_bound) << "\n";
    json v{{"average", res.average}, {"floor_bound", res.floor_bound}};
    return json{{"values", v}};
}

json cmd_nil_equi(const Options& o) {
    ErgodicSystem sys = parse_system(o.system);
    std::vector<Observable> fs;
    std::vector<std::string> names = split(o.obs, ';');
    for (const auto& spec : names) fs.push_back(parse_observable(spec));
    auto table = load_table(o.cache, o.limit ? o.limit : o.N + 1);
    auto x0 = parse_point(o.x0, sys.dim());
    auto res = nil_orbit_equidistribution(sys, HardyExpr::parse(o.fn), *table,
                                          o.N, fs, x0);
    CsvWriter csv(o.csv_path);
    csv.row({"observable", "avg_re", "avg_im", "haar_re", "haar_im", "residual"});
    json v;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        csv.row({names[i], fmt12(res.averages[i].real()),
                 fmt12(res.averages[i].imag()), fmt12(res.haar[i].real()),
                 fmt12(res.haar[i].imag()), fmt12(res.residuals[i])});
        v["residual_" + names[i]] = res.residuals[i];
    }
    return json{{"values", v}};
}

json cmd_short_interval(const Options& o) {
    std::function<std::complex<double>(std::uint64_t)> A;
    if (o.seq == "zero")
        A = [](std::uint64_t) { return std::complex<double>(0.0); };
    else if (o.seq == "one")
        A = [](std::uint64_t) { return std::complex<double>(1.0); };
    else if (o.seq.rfind("e:", 0) == 0) {
        const double alpha = parse_real(o.seq.substr(2));
        A = [alpha](std::uint64_t n) {
            return e_of(FixedAngle(alpha).frac_mul(static_cast<long long>(n)));
        };
    } else {
        throw invalid_argument("seq must be zero, one, or e:ANGLE");
    }
    WTrick trick = primorial_trick(o.w, o.b);
    const std::uint64_t n_max =
        o.R + static_cast<std::uint64_t>(std::pow(static_cast<double>(o.R), o.Lexp));
    auto table = load_table(o.cache, o.limit ? o.limit
                                             : trick.W * n_max + trick.b + 1);
    auto res = short_interval_average(A, *table, trick, o.Lexp, o.R);
    CsvWriter csv(o.csv_path);
    csv.row({"R", "L_exponent", "left", "right", "slack", "holds"});
    csv.row({std::to_string(o.R), fmt12(o.Lexp), fmt12(res.left), fmt12(res.right),
             fmt12(res.slack), res.holds ? "1" : "0"});
    std::cout << fmt12(res.left) << " <= " << fmt12(res.right) << " + "
              << fmt12(res.slack) << " : " << (res.holds ? "holds" : "VIOLATED")
              << "\n";
    if (!res.holds)
        throw assertion_failure("short-interval inequality violated");
    json v{{"left", res.left}, {"right", res.right}, {"slack", res.slack}};
    return json{{"values", v}};
}

// ---------------------------------------------------------------------------
// dispatch, manifests, pinning

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--cache", o.cache, "sieve cache path");
    cmd->add_option("--limit", o.limit, "sieve limit when building fresh");
    cmd->add_option("--csv", o.csv_path, "CSV output path");
    cmd->add_option("--json", o.json_path, "JSON summary output path");
}

json dispatch(const Options& o) {
    if (o.command == "sieve") return cmd_sieve(o);
    if (o.command == "gowers") return cmd_gowers(o);
    if (o.command == "discrepancy") return cmd_discrepancy(o);
    if (o.command == "taylor") return cmd_taylor(o);
    if (o.command == "floor-match") return cmd_floor_match(o);
    if (o.command == "average") return cmd_average(o);
    if (o.command == "compare") return cmd_compare(o);
    if (o.command == "recur") return cmd_recur(o);
    if (o.command == "nil-equi") return cmd_nil_equi(o);
    if (o.command == "short-interval") return cmd_short_interval(o);
    throw invalid_argument("unknown command: " + o.command);
}

json params_of(const Options& o) {
    json p;
    p["command"] = o.command;
    p["w"] = o.w; p["b"] = o.b; p["N"] = o.N; p["R"] = o.R; p["L"] = o.L;
    p["r"] = o.r; p["s"] = o.s; p["k"] = o.k; p["M"] = o.M; p["C"] = o.C;
    p["Lexp"] = o.Lexp; p["eps"] = o.eps; p["c"] = o.c; p["ia"] = o.ia;
    p["ib"] = o.ib; p["fn"] = o.fn; p["fns"] = o.fns; p["poly"] = o.poly;
    p["system"] = o.system; p["scheme"] = o.scheme; p["seq"] = o.seq;
    p["orbit"] = o.orbit; p["obs"] = o.obs; p["window"] = o.window;
    p["arcs"] = o.arcs; p["x0"] = o.x0; p["checkpoints"] = o.checkpoints;
    p["wlist"] = o.wlist; p["no_enforce"] = o.no_enforce; p["limit"] = o.limit;
    return p;
}

void write_summary(const Options& o, const std::string& id, const json& result,
                   const json& assertions) {
    if (o.json_path.empty()) return;
    json out;
    out["schema"] = "hpl/1";
    out["experiment_id"] = id;
    out["parameters"] = params_of(o);
    out["values"] = result.value("values", json::object());
    out["checkpoints"] = result.value("checkpoints", json::array());
    out["pinned_regressions"] = assertions;
    std::ofstream f(o.json_path);
    if (!f) throw error("cannot open JSON output: " + o.json_path);
    f << out.dump(2) << "\n";
}

Options options_from_manifest(const std::string& path, std::string& id) {
    std::ifstream in(path);
    if (!in) throw invalid_argument("cannot open manifest: " + path);
    json m = json::parse(in);
    id = m.value("id", std::string("unnamed"));
    Options o;
    o.command = m.at("command").get<std::string>();
    const json& p = m.value("parameters", json::object());
    auto gu = [&](const char* key, std::uint64_t& dst) {
        if (p.contains(key)) dst = p.at(key).get<std::uint64_t>();
    };
    auto gi = [&](const char* key, int& dst) {
        if (p.contains(key)) dst = p.at(key).get<int>();
    };
    auto gd = [&](const char* key, double& dst) {
        if (p.contains(key)) dst = p.at(key).get<double>();
    };
    auto gs = [&](const char* key, std::string& dst) {
        if (p.contains(key)) dst = p.at(key).get<std::string>();
    };
    gu("w", o.w); gu("b", o.b); gu("N", o.N); gu("R", o.R); gu("L", o.L);
    gu("r", o.r); gu("limit", o.limit);
    gi("s", o.s); gi("k", o.k); gi("M", o.M);
    gd("C", o.C); gd("Lexp", o.Lexp); gd("eps", o.eps); gd("c", o.c);
    gd("a", o.ia); gd("b_interval", o.ib); gd("delta", o.delta);
    gs("fn", o.fn); gs("fns", o.fns); gs("poly", o.poly); gs("system", o.system);
    gs("scheme", o.scheme); gs("regime", o.scheme); gs("seq", o.seq);
    gs("orbit", o.orbit); gs("obs", o.obs); gs("window", o.window);
    gs("arcs", o.arcs); gs("x0", o.x0); gs("checkpoints", o.checkpoints);
    gs("wlist", o.wlist); gs("cache", o.cache); gs("csv", o.csv_path);
    gs("json", o.json_path);
    if (p.contains("no_enforce")) o.no_enforce = p.at("no_enforce").get<bool>();
    return o;
}

json load_pins(const std::string& path) {
    std::ifstream in(path);
    if (!in) return json::object();
    return json::parse(in);
}

// flattened numeric lookup in the summary's values map
double value_by_key(const json& result, const std::string& key) {
    const json& v = result.value("values", json::object());
    if (!v.contains(key))
        throw invalid_argument("no value named '" + key + "' in this experiment");
    return v.at(key).get<double>();
}

int run_manifest(const std::string& manifest, const std::string& pins_path) {
    std::string id;
    Options o = options_from_manifest(manifest, id);
    json result = dispatch(o);
    json assertions = json::array();
    int rc = 0;
    if (!pins_path.empty()) {
        json pins = load_pins(pins_path);
        const std::string fp = params_of(o).dump();
        for (auto& [key, pin] : pins.items()) {
            if (pin.value("experiment_id", "") != id) continue;
            json entry{{"key", key}};
            if (pin.value("fingerprint", "") != fp) {
                entry["status"] = "fingerprint-mismatch";
                std::cerr << "pin '" << key << "': fingerprint mismatch\n";
                rc = 2;
            } else {
                const double got = value_by_key(result, pin.at("value_key"));
                const double want = pin.at("value").get<double>();
                const double tol = pin.value("tolerance", 1e-6);
                if (std::abs(got - want) <= tol) {
                    entry["status"] = "pass";
                } else {
                    entry["status"] = "fail";
                    std::cerr << "pin '" << key << "': " << fmt12(got)
                              << " != " << fmt12(want) << " +- " << tol << "\n";
                    rc = 2;
                }
            }
            assertions.push_back(entry);
        }
    }
    write_summary(o, id, result, assertions);
    return rc;
}

int pin_manifest(const std::string& manifest, const std::string& key,
                 const std::string& value_key, const std::string& pins_path,
                 double tol) {
    std::string id;
    Options o = options_from_manifest(manifest, id);
    json result = dispatch(o);
    const double value = value_by_key(result, value_key);
    json pins = load_pins(pins_path);
    pins[key] = {{"experiment_id", id},
                 {"fingerprint", params_of(o).dump()},
                 {"value_key", value_key},
                 {"value", value},
                 {"tolerance", tol}};
    std::ofstream out(pins_path);
    if (!out) throw error("cannot open pin store: " + pins_path);
    out << pins.dump(2) << "\n";
    std::cout << "pinned " << key << " = " << fmt12(value) << "\n";
    write_summary(o, id, result, json::array());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laboratory for prime-weighted averages along Hardy sequences"};
    app.require_subcommand(1);

    Options o;
    std::string manifest, pins_path, pin_key, pin_value_key;
    double pin_tol = 1e-6;

    auto* sieve = app.add_subcommand("sieve", "build a von Mangoldt table");
    sieve->add_option("--out", o.cache, "cache output path");
    sieve->add_option("--limit", o.limit)->required();
    sieve->add_flag("--psi", o.psi, "also report psi(limit)");
    sieve->add_option("--csv", o.csv_path);
    sieve->add_option("--json", o.json_path);

    auto* gow = app.add_subcommand("gowers", "interval Gowers norm of Lambda_{w,b}-1");
    gow->add_option("--seq", o.seq)->default_str("vmangoldt-w");
    gow->add_option("--w", o.w);
    gow->add_option("--b", o.b);
    gow->add_option("--window", o.window, "START:+LENGTH")->required();
    gow->add_option("--s", o.s);
    add_common(gow, o);

    auto* dis = app.add_subcommand("discrepancy", "discrepancy and ET majorant");
    dis->add_option("--orbit", o.orbit, "rot:ANGLE or file:PATH")->required();
    dis->add_option("--N", o.N);
    dis->add_option("--a", o.ia);
    dis->add_option("--b", o.ib);
    dis->add_option("--M", o.M);
    dis->add_option("--C", o.C);
    add_common(dis, o);

    auto* tay = app.add_subcommand("taylor", "degree/window selection and Taylor model");
    tay->add_option("--fn", o.fn)->required();
    tay->add_option("--N", o.N);
    tay->add_option("--L", o.L);
    tay->add_option("--Lexp", o.Lexp, "pin L = t^Lexp; 0 derives L")->default_val(0.0);
    tay->add_option("--k", o.k);
    tay->add_option("--c", o.c);
    add_common(tay, o);

    auto* fm = app.add_subcommand("floor-match", "floor identity scans");
    fm->add_option("--regime", o.scheme, "fast, slow or poly")->required();
    fm->add_option("--fn", o.fn)->required();
    fm->add_option("--N", o.N);
    fm->add_option("--L", o.L);
    fm->add_option("--Lexp", o.Lexp);
    fm->add_option("--k", o.k);
    fm->add_option("--R", o.R);
    fm->add_option("--poly", o.poly, "comma-separated coefficients, constant first");
    fm->add_option("--r", o.r);
    fm->add_option("--eps", o.eps);
    fm->add_option("--w", o.w);
    fm->add_option("--b", o.b);
    fm->add_flag("--no-enforce", o.no_enforce,
                 "report precondition violations instead of failing");
    add_common(fm, o);

    auto* avg = app.add_subcommand("average", "multiple ergodic average");
    avg->add_option("--system", o.system)->required();
    avg->add_option("--obs", o.obs, "observables, ';'-separated");
    avg->add_option("--fns", o.fns, "iterate functions per observable")->required();
    avg->add_option("--scheme", o.scheme);
    avg->add_option("--w", o.w);
    avg->add_option("--b", o.b);
    avg->add_option("--N", o.N);
    avg->add_option("--checkpoints", o.checkpoints, "comma-separated N values");
    avg->add_option("--x0", o.x0, "start point coordinates");
    avg->add_option("--Lexp", o.Lexp);
    add_common(avg, o);

    auto* cmp = app.add_subcommand("compare", "w-tricked average gap per w");
    cmp->add_option("--system", o.system)->required();
    cmp->add_option("--obs", o.obs);
    cmp->add_option("--fn", o.fns, "iterate function");
    cmp->add_option("--fns", o.fns);
    cmp->add_option("--w", o.wlist, "comma-separated w values")->required();
    cmp->add_option("--N", o.N)->required();
    add_common(cmp, o);

    auto* rec = app.add_subcommand("recur", "multiple recurrence experiment");
    rec->add_option("--system", o.system)->required();
    rec->add_option("--arcs", o.arcs, "lo:hi;lo:hi")->required();
    rec->add_option("--fns", o.fns)->required();
    rec->add_option("--scheme", o.scheme)->default_str("prime");
    rec->add_option("--N", o.N)->required();
    add_common(rec, o);

    auto* nil = app.add_subcommand("nil-equi", "prime-orbit equidistribution");
    nil->add_option("--system", o.system)->required();
    nil->add_option("--fn", o.fn)->required();
    nil->add_option("--N", o.N)->required();
    nil->add_option("--obs", o.obs);
    nil->add_option("--x0", o.x0);
    add_common(nil, o);

    auto* shi = app.add_subcommand("short-interval", "Lemma-style double average");
    shi->add_option("--seq", o.seq, "zero, one, or e:ANGLE")->required();
    shi->add_option("--w", o.w);
    shi->add_option("--b", o.b);
    shi->add_option("--Lexp", o.Lexp);
    shi->add_option("--R", o.R);
    add_common(shi, o);

    auto* run = app.add_subcommand("run", "run an experiment manifest");
    run->add_option("--manifest", manifest)->required();
    run->add_option("--pins", pins_path, "pin store to assert against");

    auto* pin = app.add_subcommand("pin", "record a pinned regression value");
    pin->add_option("--manifest", manifest)->required();
    pin->add_option("--key", pin_key)->required();
    pin->add_option("--value-key", pin_value_key)->required();
    pin->add_option("--store", pins_path)->required();
    pin->add_option("--tol", pin_tol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return run_manifest(manifest, pins_path);
        if (pin->parsed()) return pin_manifest(manifest, pin_key, pin_value_key,
                                               pins_path, pin_tol);
        o.command = app.get_subcommands().front()->get_name();
        if (o.command == "sieve" && o.scheme.empty()) o.scheme = "cesaro";
        json result = dispatch(o);
        write_summary(o, o.command, result, json::array());
        return 0;
    } catch (const assertion_failure& ex) {
        std::cerr << "assertion failure: " << ex.what() << "\n";
        return 2;
    } catch (const hpl::error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
