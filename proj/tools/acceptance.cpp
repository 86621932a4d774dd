// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "lemni/ensembles.hpp"
#include "lemni/geometry.hpp"
#include "lemni/montecarlo.hpp"
#include "lemni/rng.hpp"
#include "lemni/roots.hpp"
#include "lemni/theory.hpp"

using namespace lemni;
namespace fs = std::filesystem;

namespace {

constexpr double kTargetKac = 8.3882;
constexpr std::uint64_t kMasterSeed = 1;

int g_threads = 1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string g_notes;

void note(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    g_notes += "      ";
    g_notes += buf;
    g_notes += '\n';
}

ExperimentConfig config(EnsembleSpec spec, std::vector<int> degrees, int trials) {
    ExperimentConfig cfg;
    cfg.ensemble = spec;
    cfg.degrees = std::move(degrees);
    cfg.trials_per_degree = trials;
    cfg.master_seed = kMasterSeed;
    cfg.threads = g_threads;
    return cfg;
}

double agm(double a, double b) {
    while (std::abs(a - b) > 1e-16 * a) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return a;
}

ComplexPolynomial real_poly(std::vector<double> re) {
    std::vector<Complex> c;
    for (double v : re) c.emplace_back(v, 0.0);
    return ComplexPolynomial(std::move(c));
}

// ---------------------------------------------------------------- criteria

bool kac_limit() {
    const auto t0 = Clock::now();
    const auto c = kac_limit_constant();
    const double secs = seconds_since(t0);
    note("constant %.9f (error bound %.1e, %s), target %.4f +- 1e-3, %.2f s", c.value, c.error_bound,
         c.converged ? "converged" : "not converged", kTargetKac, secs);
    return c.converged && std::abs(c.value - kTargetKac) <= 1e-3 && secs < 60.0;
}

bool finite_n_convergence() {
    const std::vector<int> ns{25, 50, 100, 200};
    const double derived = kac_limit_constant().value;
    std::vector<double> dist;
    bool ok = true;
    for (int n : ns) {
        const auto e = expected_length(EnsembleSpec::kac(n));
        ok = ok && e.converged;
        dist.push_back(std::abs(e.value - kTargetKac));
        note("n = %3d  E length %.6f  |E - 8.3882| = %.4f  |E - %.6f| = %.4f", n, e.value, dist.back(), derived,
             std::abs(e.value - derived));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < dist.size(); ++i) monotone = monotone && dist[i] < dist[i - 1];
    note("strictly closer as n grows: %s; |E_200 - 8.3882| < 0.15: %s", monotone ? "yes" : "no",
         dist.back() < 0.15 ? "yes" : "no");
    return ok && monotone && dist.back() < 0.15;
}

bool cross_validation() {
    const auto t0 = Clock::now();
    const auto run = run_length_experiment(config(EnsembleSpec::kac(1), {10, 50}, 2000));
    const double secs = seconds_since(t0);
    bool ok = !run.failed;
    for (const auto& d : run.degrees) {
        const double z = std::abs(d.length.mean - d.theory) / d.length.std_error;
        note("n = %2d  mean %.5f +- %.5f (se)  theory %.6f  |diff| = %.2f se  excluded %d", d.degree, d.length.mean,
             d.length.std_error, d.theory, z, d.length.excluded);
        ok = ok && z <= 3.0;
    }
    note("%.1f s on %d thread(s), limit 900 s", secs, g_threads);
    return ok && secs < 900.0;
}

bool sqrt_n_scaling() {
    bool ok = true;
    for (const auto& spec : {EnsembleSpec::kostlan(1), EnsembleSpec::reciprocal_binomial(1)}) {
        const double a = std::sqrt(25.0) * expected_length(spec.with_degree(25)).value;
        const double b = std::sqrt(100.0) * expected_length(spec.with_degree(100)).value;
        const double rel = std::abs(a - b) / std::max(a, b);
        note("%-11s sqrt(n) E length: n=25 %.4f  n=100 %.4f  relative gap %.2f%% (limit 5%%)",
             std::string(to_string(spec.kind)).c_str(), a, b, 100.0 * rel);
        ok = ok && rel <= 0.05;
        if (spec.kind == EnsembleKind::ReciprocalBinomial) {
            for (double R : {0.5, 0.9, 1.0}) {
                const double da = 5.0 * expected_length_in_disk(spec.with_degree(25), R).value;
                const double db = 10.0 * expected_length_in_disk(spec.with_degree(100), R).value;
                note("  restricted to |z| < %.1f: %.4f vs %.4f", R, da, db);
            }
        }
    }
    const auto run = run_length_experiment(config(EnsembleSpec::kostlan(1), {25, 100}, 1000));
    for (const auto& d : run.degrees) {
        const double z = std::abs(d.length.mean - d.theory) / d.length.std_error;
        note("kostlan MC n = %3d  mean %.4f +- %.4f  theory %.4f  |diff| = %.2f se", d.degree, d.length.mean,
             d.length.std_error, d.theory, z);
        ok = ok && z <= 3.0;
    }
    return ok && !run.failed;
}

bool weyl_convergence() {
    const double lim = weyl_limit_constant().value;
    bool ok = true;
    for (int n : {30, 60}) {
        const double e = expected_length(EnsembleSpec::weyl(n)).value;
        const double rel = std::abs(e - lim) / lim;
        note("n = %d  E length %.5f  limit %.5f  relative gap %.2f%% (limit 3%%)", n, e, lim, 100.0 * rel);
        ok = ok && rel <= 0.03;
    }
    return ok;
}

bool geometry_oracles() {
    const GridConfig grid;
    const auto z = extract_lemniscate(real_poly({0, 1}), grid);
    const auto z2m4 = extract_lemniscate(real_poly({-4, 0, 1}), grid);
    const auto bern = extract_lemniscate(real_poly({-1, 0, 1}), grid);
    const double varpi = std::numbers::pi / agm(1.0, std::numbers::sqrt2);
    const double bern_exact = 2.0 * std::numbers::sqrt2 * varpi;
    note("p = z:       length %.12f (2 pi %.12f)  b0 %d", z.total_length, 2.0 * std::numbers::pi, z.b0);
    note("p = z^2 - 4: b0 %d", z2m4.b0);
    note("p = z^2 - 1: length %.9f  2 sqrt2 varpi %.9f  (varpi = %.11f)", bern.total_length, bern_exact, varpi);
    return std::abs(z.total_length - 2.0 * std::numbers::pi) <= 1e-6 && z.b0 == 1 && z2m4.b0 == 2 &&
           std::abs(bern.total_length - bern_exact) <= 1e-3;
}

bool component_counting() {
    const auto run = run_components_experiment(config(EnsembleSpec::kac(1), {20, 50, 100, 200}, 500));
    bool ok = true;
    double prev = 0.0;
    for (const auto& d : run.degrees) {
        note("n = %3d  E b0/n %.4f +- %.4f  max b0 %d  b0 > n: %d  flagged %.2f%%", d.degree, d.b0_over_n.mean,
             d.b0_over_n.std_error, d.max_b0, d.bound_violations, 100.0 * d.exclusion_rate);
        ok = ok && d.bound_violations == 0 && d.exclusion_rate < 0.01 && d.b0_over_n.mean > prev;
        prev = d.b0_over_n.mean;
    }
    return ok;
}

bool certificate_soundness() {
    const int n = 100, trials = 200;
    const double alpha = 0.4, beta = 0.05;
    const double radius = std::pow(n, -1.0 - alpha);
    GridConfig local;
    local.initial_cells_per_axis = 16;
    local.max_depth = 18;
    int hits = 0, counterexamples = 0, polys_with_hits = 0;
    for (int t = 0; t < trials; ++t) {
        const auto p = sample(EnsembleSpec::kac(n), derive_trial_seed(kMasterSeed, n, t));
        const auto rts = roots(p);
        bool any = false;
        for (const auto& zeta : rts) {
            if (!taylor_certificate(p, zeta, alpha, beta)) continue;
            ++hits;
            any = true;
            const auto box = extract_in_box(p, zeta, radius, local, rts);
            bool found = false;
            for (const auto& loop : box.loops) {
                if (!point_in_polygon(loop, zeta)) continue;
                found = found || std::all_of(loop.begin(), loop.end(),
                                             [&](Complex v) { return std::abs(v - zeta) < radius; });
            }
            if (!found) {
                ++counterexamples;
                note("counterexample: trial %d root (%.6f, %.6f)", t, zeta.real(), zeta.imag());
            }
        }
        polys_with_hits += any;
    }
    note("%d certified roots in %d of %d polynomials, %d counterexamples, disk radius %.3e", hits, polys_with_hits,
         trials, counterexamples, radius);
    if (hits == 0) note("no root was certified, so this run checks nothing");
    return counterexamples == 0;
}

bool giant_component() {
    auto cfg = config(EnsembleSpec::kac(1), {20, 50, 100}, 5000);
    const double r = 0.5;
    const auto run = run_giant_experiment(cfg, r);
    bool ok = true;
    int unmeasured = 0;
    for (const auto& rec : run.records) {
        if (rec.giant && *rec.giant == GiantStatus::yes && std::isnan(rec.giant_length)) ++unmeasured;
    }
    for (const auto& d : run.degrees) {
        note("n = %3d  frequency %.4f  Wilson [%.4f, %.4f]  indeterminate %d  min length %.5f  short %d",
             d.degree, d.frequency.value, d.frequency.wilson95.first, d.frequency.wilson95.second,
             d.frequency.indeterminate, d.min_component_length, d.short_components);
        ok = ok && d.frequency.hits > 0 && d.short_components == 0 &&
             d.min_component_length >= std::numbers::pi - kGiantLengthTolerance;
    }
    for (std::size_t i = 0; i < run.degrees.size(); ++i) {
        for (std::size_t j = i + 1; j < run.degrees.size(); ++j) {
            const auto& a = run.degrees[i].frequency.wilson95;
            const auto& b = run.degrees[j].frequency.wilson95;
            ok = ok && a.first <= b.second && b.first <= a.second;
        }
    }
    note("events without a measured enclosing component: %d", unmeasured);
    return ok && unmeasured == 0;
}

bool annulus_count() {
    const int n = 200;
    const double s = 3.0;
    const auto run = run_annulus_experiment(config(EnsembleSpec::kac(1), {n}, 2000), s);
    const auto& d = run.degrees.at(0);
    const double z = std::abs(d.count.mean - d.asymptotic) / d.count.std_error;
    note("mean %.4f +- %.4f  n(coth s - 1/s) = %.4f  |diff| = %.2f se", d.count.mean, d.count.std_error, d.asymptotic,
         z);
    note("exact finite-n expectation %.4f  |mean - exact| = %.2f se", d.exact,
         std::abs(d.count.mean - d.exact) / d.count.std_error);
    return z <= 3.0;
}

std::vector<std::string> snapshot(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files.emplace_back(e.path().filename().string(), ss.str());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::string> out;
    for (auto& [name, body] : files) out.push_back(name + '\n' + body);
    return out;
}

bool determinism() {
    const fs::path dir = fs::temp_directory_path() / ("lemni_acceptance_" + std::to_string(::getpid()));
    struct Case {
        const char* name;
        ExperimentConfig cfg;
        std::function<void(const ExperimentConfig&)> run;
    };
    std::vector<Case> cases;
    cases.push_back({"length", config(EnsembleSpec::kac(1), {8, 20}, 40),
                     [](const ExperimentConfig& c) { run_length_experiment(c); }});
    cases.push_back({"components", config(EnsembleSpec::kac(1), {30}, 30),
                     [](const ExperimentConfig& c) { run_components_experiment(c); }});
    cases.push_back({"giant", config(EnsembleSpec::kac(1), {20}, 100),
                     [](const ExperimentConfig& c) { run_giant_experiment(c, 0.5); }});
    cases.push_back({"tail", config(EnsembleSpec::kostlan(1), {15}, 40),
                     [](const ExperimentConfig& c) { outlier_tail_estimate(c, {5.0, 10.0}); }});
    cases.push_back({"annulus", config(EnsembleSpec::weyl(1), {40}, 50),
                     [](const ExperimentConfig& c) { run_annulus_experiment(c, 1.0); }});
    bool ok = true;
    for (auto& c : cases) {
        c.cfg.output_path = dir.string();
        std::vector<std::string> first;
        bool same = true;
        for (int threads : {1, 8}) {
            fs::remove_all(dir);
            c.cfg.threads = threads;
            c.run(c.cfg);
            auto snap = snapshot(dir);
            if (first.empty()) first = std::move(snap);
            else same = snap == first;
        }
        note("%-10s %zu files, 1 vs 8 threads byte-identical: %s", c.name, first.size(), same ? "yes" : "no");
        ok = ok && same && !first.empty();
    }
    fs::remove_all(dir);
    return ok;
}

bool moment_formula() {
    CounterRng rng(kMasterSeed);
    constexpr int kPairs = 5'000'000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < kPairs; ++i) {
        const auto [g, h] = rng.next_normal_pair();
        for (double v : {g, h}) {
            // zeta ~ complex normal with mean 1 and E|zeta - 1|^2 = 1, so Re zeta ~ N(1, 1/2)
            const double x = std::abs(1.0 + v / std::numbers::sqrt2);
            sum += x;
            sumsq += x * x;
        }
    }
    const double m = 2.0 * kPairs;
    const double mean = sum / m;
    const double se = std::sqrt((sumsq / m - mean * mean) / m);
    const double formula = abs_real_moment({1.0, 0.0}, 1.0);
    const double zero = abs_real_moment({0.0, 0.0}, 1.0);
    const double zero_gap = std::abs(zero - 1.0 / std::sqrt(std::numbers::pi));
    note("formula %.8f  simulation %.8f +- %.1e (%.0f draws)  |diff| = %.2f se", formula, mean, se, m,
         std::abs(mean - formula) / se);
    note("mu = 0: %.17g vs 1/sqrt(pi), gap %.1e", zero, zero_gap);
    return std::abs(mean - formula) <= 3.0 * se && zero_gap <= 1e-13;
}

}  // namespace

int main(int argc, char** argv) {
    const unsigned hw = std::thread::hardware_concurrency();
    g_threads = hw == 0 ? 1 : static_cast<int>(hw);
    if (argc > 1) g_threads = std::max(1, std::atoi(argv[1]));

    const std::vector<std::pair<const char*, bool (*)()>> criteria{
        {"Kac limit constant", kac_limit},
        {"finite-n convergence of the Kac expectation", finite_n_convergence},
        {"theory vs simulation, Kac n = 10, 50", cross_validation},
        {"sqrt(n) scaling, Kostlan and reciprocal binomial", sqrt_n_scaling},
        {"Weyl convergence", weyl_convergence},
        {"geometry oracles", geometry_oracles},
        {"component counting", component_counting},
        {"certificate soundness", certificate_soundness},
        {"giant component", giant_component},
        {"zeros near the unit circle", annulus_count},
        {"determinism across thread counts", determinism},
        {"absolute real moment formula", moment_formula},
    };
    int failures = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        bool pass = false;
        std::string error;
        g_notes.clear();
        try {
            pass = criteria[i].second();
        } catch (const std::exception& e) {
            error = e.what();
        }
        if (!error.empty()) note("error: %s", error.c_str());
        std::printf("%s %2zu  %s  (%.1f s)\n%s", pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                    g_notes.c_str());
        std::fflush(stdout);
        failures += !pass;
    }
    std::printf("%d of %zu criteria passed in %.0f s\n", static_cast<int>(criteria.size()) - failures,
                criteria.size(), seconds_since(start));
    return failures;
}
