#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lemni/ensembles.hpp"
#include "lemni/geometry.hpp"
#include "lemni/roots.hpp"
#include "lemni/rng.hpp"
#include "lemni/serialize.hpp"
#include "lemni/theory.hpp"

namespace lemni {

/// Extraction settings used by experiments: default resolution, lengths to
/// 1e-4 relative (far below the sampling error of any feasible run).
inline GridConfig experiment_grid() {
    GridConfig g;
    g.length_refine_tolerance = 1e-4;
    return g;
}

struct ExperimentConfig {
    EnsembleSpec ensemble = EnsembleSpec::kac(1);  // degree is replaced per run
    std::vector<int> degrees;
    int trials_per_degree = 100;
    std::uint64_t master_seed = 0;
    GridConfig grid = experiment_grid();
    std::optional<double> giant_radius;
    std::string output_path;  // empty: nothing is written
    int threads = 1;
    double certificate_alpha = 0.4;
    double certificate_beta = 0.05;

    void validate() const {
        if (trials_per_degree < 1) throw InvalidArgument("trials_per_degree must be at least 1");
        if (degrees.empty()) throw InvalidArgument("degrees must not be empty");
        for (int d : degrees) {
            if (d < 1) throw InvalidArgument("every degree must be at least 1");
            if (ensemble.kind == EnsembleKind::Custom && d != ensemble.degree)
                throw InvalidSpec("a custom ensemble fixes the degree");
        }
        if (threads < 1) throw InvalidArgument("threads must be at least 1");
        if (giant_radius && !(*giant_radius > 0.0 && *giant_radius < 1.0))
            throw InvalidArgument("giant radius must lie in (0, 1)");
        grid.validate();
    }
};

struct TrialRecord {
    int degree = 0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    double total_length = std::numeric_limits<double>::quiet_NaN();
    int b0 = 0;
    int unresolved = 0;
    std::optional<GiantStatus> giant;
    double giant_length = std::numeric_limits<double>::quiet_NaN();
    int certificate_hits = 0;
    int annulus_zeros = -1;
    bool excluded = false;
    double wall_time_ms = 0.0;  // not persisted: output files must be reproducible
};

struct SummaryStats {
    int n_trials = 0;  // retained
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    std::pair<double, double> ci95{std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN()};
    int excluded = 0;
};

struct Frequency {
    int trials = 0;
    int hits = 0;
    int indeterminate = 0;
    double value = 0.0;
    std::pair<double, double> wilson95{0.0, 1.0};
};

inline constexpr double kZ95 = 1.959963984540054;

inline SummaryStats summarize(const std::vector<double>& values, int excluded = 0) {
    SummaryStats s;
    s.n_trials = static_cast<int>(values.size());
    s.excluded = excluded;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double var = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
    s.std_error = std::sqrt(var / static_cast<double>(values.size()));
    s.ci95 = {s.mean - kZ95 * s.std_error, s.mean + kZ95 * s.std_error};
    return s;
}

/// Wilson score interval for hits out of trials.
inline std::pair<double, double> wilson_interval(int hits, int trials, double z = kZ95) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = trials;
    const double p = hits / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline Frequency frequency(int hits, int trials, int indeterminate = 0) {
    Frequency f;
    f.trials = trials;
    f.hits = hits;
    f.indeterminate = indeterminate;
    f.value = trials > 0 ? static_cast<double>(hits) / trials : 0.0;
    f.wilson95 = wilson_interval(hits, trials);
    return f;
}

/// mix64(mix64(mix64(master + G) ^ degree * M1) ^ trial * M2) with the
/// SplitMix64 constants G, M1, M2. For a fixed (master, degree) the map from
/// trial index to seed is a bijection.
constexpr std::uint64_t derive_trial_seed(std::uint64_t master, int degree, int trial_index) noexcept {
    std::uint64_t s = mix64(master + 0x9e3779b97f4a7c15ULL);
    s = mix64(s ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(degree)) * 0xbf58476d1ce4e5b9ULL));
    s = mix64(s ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial_index)) * 0x94d049bb133111ebULL));
    return s;
}

/// Runs fn(i) for i in [0, count) on `threads` workers, worker w taking
/// i = w, w + threads, ... The first exception is rethrown after joining.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += threads) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline constexpr double kMaxExclusionRate = 0.05;

namespace detail {

/// Samples and evaluates every (degree, trial) pair; records come back in
/// (degree, trial_index) order whatever the thread count.
template <class TrialFn>
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, TrialFn&& trial) {
    cfg.validate();
    const int per = cfg.trials_per_degree;
    const int total = per * static_cast<int>(cfg.degrees.size());
    std::vector<TrialRecord> records(static_cast<std::size_t>(total));
    parallel_for(total, cfg.threads, [&](int idx) {
        const int d = cfg.degrees[static_cast<std::size_t>(idx / per)];
        TrialRecord& rec = records[static_cast<std::size_t>(idx)];
        rec.degree = d;
        rec.trial_index = idx % per;
        rec.seed = derive_trial_seed(cfg.master_seed, d, rec.trial_index);
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto p = sample(cfg.ensemble.with_degree(d), rec.seed);
            trial(p, rec);
        } catch (const InvalidSpec&) {
            throw;
        } catch (const Error&) {
            rec.excluded = true;
        }
        rec.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });
    return records;
}

inline std::vector<const TrialRecord*> records_for(const std::vector<TrialRecord>& records, int degree) {
    std::vector<const TrialRecord*> out;
    for (const auto& r : records) {
        if (r.degree == degree) out.push_back(&r);
    }
    return out;
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "degree,trial_index,seed,total_length,b0,unresolved,giant,giant_length,certificate_hits,annulus_zeros,excluded";

inline std::string csv_row(const TrialRecord& r) {
    std::string row;
    row += std::to_string(r.degree) + ',' + std::to_string(r.trial_index) + ',' + std::to_string(r.seed) + ',';
    row += detail::format_double(r.total_length) + ',' + std::to_string(r.b0) + ',' + std::to_string(r.unresolved) + ',';
    row += (r.giant ? std::string(to_string(*r.giant)) : std::string()) + ',';
    row += detail::format_double(r.giant_length) + ',' + std::to_string(r.certificate_hits) + ',';
    row += (r.annulus_zeros >= 0 ? std::to_string(r.annulus_zeros) : std::string()) + ',';
    row += r.excluded ? "1" : "0";
    return row;
}

inline void to_json(Json& j, const SummaryStats& s) {
    auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    j = Json{{"n_trials", s.n_trials},
             {"mean", num(s.mean)},
             {"std_error", num(s.std_error)},
             {"ci95", Json::array({num(s.ci95.first), num(s.ci95.second)})},
             {"excluded", s.excluded}};
}

inline void to_json(Json& j, const Frequency& f) {
    j = Json{{"trials", f.trials},
             {"hits", f.hits},
             {"indeterminate", f.indeterminate},
             {"frequency", f.value},
             {"wilson95", Json::array({f.wilson95.first, f.wilson95.second})}};
}

inline void to_json(Json& j, const ExperimentConfig& c) {
    j = Json{{"ensemble", c.ensemble},
             {"degrees", c.degrees},
             {"trials_per_degree", c.trials_per_degree},
             {"master_seed", c.master_seed},
             {"grid", c.grid}};
    j["giant_radius"] = c.giant_radius ? Json(*c.giant_radius) : Json(nullptr);
    j["output_path"] = c.output_path;
    j["certificate_alpha"] = c.certificate_alpha;
    j["certificate_beta"] = c.certificate_beta;
}

/// Fields absent from the JSON keep their defaults; thread count is a run
/// setting and is not read from files.
inline void from_json(const Json& j, ExperimentConfig& c) {
    if (j.contains("ensemble")) c.ensemble = j.at("ensemble").get<EnsembleSpec>();
    if (j.contains("degrees")) c.degrees = j.at("degrees").get<std::vector<int>>();
    if (j.contains("trials_per_degree")) c.trials_per_degree = j.at("trials_per_degree").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("grid")) c.grid = j.at("grid").get<GridConfig>();
    if (j.contains("giant_radius") && !j.at("giant_radius").is_null())
        c.giant_radius = j.at("giant_radius").get<double>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("certificate_alpha")) c.certificate_alpha = j.at("certificate_alpha").get<double>();
    if (j.contains("certificate_beta")) c.certificate_beta = j.at("certificate_beta").get<double>();
}

/// <out>/<ensemble>_<degree>.csv for every degree, plus <out>/summary.json.
inline void write_outputs(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records, const Json& summary) {
    if (cfg.output_path.empty()) return;
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    for (int d : cfg.degrees) {
        const fs::path file = dir / (std::string(to_string(cfg.ensemble.kind)) + "_" + std::to_string(d) + ".csv");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw Error("cannot write " + file.string());
        out << kCsvHeader << '\n';
        for (const auto* r : detail::records_for(records, d)) out << csv_row(*r) << '\n';
    }
    const fs::path file = dir / "summary.json";
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------- length

struct DegreeLength {
    int degree = 0;
    SummaryStats length;
    double theory = std::numeric_limits<double>::quiet_NaN();
    double theory_error = std::numeric_limits<double>::quiet_NaN();
    double exclusion_rate = 0.0;
};

struct LengthExperiment {
    std::vector<TrialRecord> records;
    std::vector<DegreeLength> degrees;
    bool failed = false;  // some degree excluded more than 5% of its trials
};

inline LengthExperiment run_length_experiment(const ExperimentConfig& cfg) {
    LengthExperiment out;
    out.records = detail::run_trials(cfg, [&](const ComplexPolynomial& p, TrialRecord& rec) {
        const auto curve = extract_lemniscate(p, cfg.grid);
        rec.total_length = curve.total_length;
        rec.b0 = curve.b0;
        rec.unresolved = curve.unresolved_cells;
        rec.excluded = curve.unresolved_cells > 0 || !curve.length_converged;
    });
    Json per = Json::array();
    for (int d : cfg.degrees) {
        DegreeLength dl;
        dl.degree = d;
        std::vector<double> values;
        int excluded = 0;
        for (const auto* r : detail::records_for(out.records, d)) {
            if (r->excluded) ++excluded;
            else values.push_back(r->total_length);
        }
        dl.length = summarize(values, excluded);
        dl.exclusion_rate = static_cast<double>(excluded) / cfg.trials_per_degree;
        out.failed = out.failed || dl.exclusion_rate > kMaxExclusionRate;
        try {
            const auto e = expected_length(cfg.ensemble.with_degree(d));
            dl.theory = e.value;
            dl.theory_error = e.error_bound;
        } catch (const Error&) {
        }
        per.push_back(Json{{"degree", d},
                           {"length", dl.length},
                           {"theory", std::isfinite(dl.theory) ? Json(dl.theory) : Json(nullptr)},
                           {"theory_error", std::isfinite(dl.theory_error) ? Json(dl.theory_error) : Json(nullptr)},
                           {"exclusion_rate", dl.exclusion_rate}});
        out.degrees.push_back(dl);
    }
    write_outputs(cfg, out.records,
                  Json{{"experiment", "length"}, {"config", cfg}, {"failed", out.failed}, {"degrees", per}});
    return out;
}

// ---------------------------------------------------------------- components

struct DegreeComponents {
    int degree = 0;
    SummaryStats b0_over_n;
    SummaryStats certificate_over_n;
    int max_b0 = 0;
    int bound_violations = 0;     // retained trials with b0 > n
    int certificate_excess = 0;   // retained trials with hits > b0
    double exclusion_rate = 0.0;
};

struct ComponentsExperiment {
    std::vector<TrialRecord> records;
    std::vector<DegreeComponents> degrees;
    bool failed = false;
};

inline ComponentsExperiment run_components_experiment(const ExperimentConfig& cfg) {
    ComponentsExperiment out;
    GridConfig grid = cfg.grid;
    grid.length_refine_tolerance = 1.0;
    out.records = detail::run_trials(cfg, [&](const ComplexPolynomial& p, TrialRecord& rec) {
        const auto rts = roots(p);
        const auto curve = extract_lemniscate(p, grid, rts);
        rec.b0 = curve.b0;
        rec.unresolved = curve.unresolved_cells;
        rec.excluded = curve.unresolved_cells > 0;
        try {
            for (const auto& z : rts) {
                if (taylor_certificate(p, z, cfg.certificate_alpha, cfg.certificate_beta)) ++rec.certificate_hits;
            }
        } catch (const InvalidArgument&) {
            rec.certificate_hits = 0;  // degree below the certificate's range
        }
    });
    Json per = Json::array();
    for (int d : cfg.degrees) {
        DegreeComponents dc;
        dc.degree = d;
        std::vector<double> ratio, cert;
        int excluded = 0;
        for (const auto* r : detail::records_for(out.records, d)) {
            if (r->excluded) {
                ++excluded;
                continue;
            }
            ratio.push_back(static_cast<double>(r->b0) / d);
            cert.push_back(static_cast<double>(r->certificate_hits) / d);
            dc.max_b0 = std::max(dc.max_b0, r->b0);
            if (r->b0 > d) ++dc.bound_violations;
            if (r->certificate_hits > r->b0) ++dc.certificate_excess;
        }
        dc.b0_over_n = summarize(ratio, excluded);
        dc.certificate_over_n = summarize(cert, excluded);
        dc.exclusion_rate = static_cast<double>(excluded) / cfg.trials_per_degree;
        out.failed = out.failed || dc.exclusion_rate > kMaxExclusionRate;
        per.push_back(Json{{"degree", d},
                           {"b0_over_n", dc.b0_over_n},
                           {"certificate_over_n", dc.certificate_over_n},
                           {"max_b0", dc.max_b0},
                           {"bound_violations", dc.bound_violations},
                           {"certificate_excess", dc.certificate_excess},
                           {"exclusion_rate", dc.exclusion_rate}});
        out.degrees.push_back(dc);
    }
    write_outputs(cfg, out.records,
                  Json{{"experiment", "components"}, {"config", cfg}, {"failed", out.failed}, {"degrees", per}});
    return out;
}

// ---------------------------------------------------------------- giant component

struct DegreeGiant {
    int degree = 0;
    Frequency frequency;
    double min_component_length = std::numeric_limits<double>::quiet_NaN();
    int short_components = 0;  // true events whose enclosing length < 2 pi r - tolerance
    double exclusion_rate = 0.0;
};

struct GiantExperiment {
    std::vector<TrialRecord> records;
    std::vector<DegreeGiant> degrees;
    double radius = 0.0;
    double length_tolerance = 0.0;
    bool failed = false;
};

/// Absolute slack allowed when comparing an enclosing length with 2 pi r.
inline constexpr double kGiantLengthTolerance = 1e-2;

inline GiantExperiment run_giant_experiment(const ExperimentConfig& cfg, double r) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r must lie in (0, 1)");
    GiantExperiment out;
    out.radius = r;
    out.length_tolerance = kGiantLengthTolerance;
    out.records = detail::run_trials(cfg, [&](const ComplexPolynomial& p, TrialRecord& rec) {
        rec.giant = giant_event(p, r);
        if (*rec.giant != GiantStatus::yes) return;
        const auto curve = extract_lemniscate(p, cfg.grid);
        rec.b0 = curve.b0;
        rec.unresolved = curve.unresolved_cells;
        rec.total_length = curve.total_length;
        rec.excluded = curve.unresolved_cells > 0;
        if (const auto k = enclosing_component(curve, Complex{0.0, 0.0}))
            rec.giant_length = curve.per_component_length[*k];
        else
            rec.excluded = true;
    });
    Json per = Json::array();
    for (int d : cfg.degrees) {
        DegreeGiant dg;
        dg.degree = d;
        int hits = 0, indeterminate = 0, excluded = 0;
        for (const auto* rec : detail::records_for(out.records, d)) {
            if (rec->excluded) ++excluded;
            if (!rec->giant) continue;
            if (*rec->giant == GiantStatus::indeterminate) ++indeterminate;
            if (*rec->giant != GiantStatus::yes) continue;
            ++hits;
            if (!std::isnan(rec->giant_length)) {
                dg.min_component_length = std::isnan(dg.min_component_length)
                                              ? rec->giant_length
                                              : std::min(dg.min_component_length, rec->giant_length);
                if (rec->giant_length < 2.0 * std::numbers::pi * r - kGiantLengthTolerance) ++dg.short_components;
            }
        }
        dg.frequency = frequency(hits, cfg.trials_per_degree, indeterminate);
        dg.exclusion_rate = static_cast<double>(excluded) / cfg.trials_per_degree;
        out.failed = out.failed || dg.exclusion_rate > kMaxExclusionRate;
        per.push_back(Json{{"degree", d},
                           {"frequency", dg.frequency},
                           {"min_component_length",
                            std::isnan(dg.min_component_length) ? Json(nullptr) : Json(dg.min_component_length)},
                           {"short_components", dg.short_components},
                           {"exclusion_rate", dg.exclusion_rate}});
        out.degrees.push_back(dg);
    }
    write_outputs(cfg, out.records,
                  Json{{"experiment", "giant"},
                       {"config", cfg},
                       {"radius", r},
                       {"length_tolerance", kGiantLengthTolerance},
                       {"failed", out.failed},
                       {"degrees", per}});
    return out;
}

// ---------------------------------------------------------------- length tail

struct TailRow {
    int degree = 0;
    double threshold = 0.0;
    Frequency frequency;
    double std_error = 0.0;
    double markov_bound = std::numeric_limits<double>::quiet_NaN();  // E|length| / L
};

struct TailExperiment {
    LengthExperiment lengths;
    std::vector<TailRow> rows;
};

/// Empirical P(length >= L) per degree and threshold, next to Markov's bound.
inline TailExperiment outlier_tail_estimate(const ExperimentConfig& cfg, const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw InvalidArgument("need at least one threshold");
    for (double t : thresholds) {
        if (!(t > 0.0)) throw InvalidArgument("thresholds must be positive");
    }
    ExperimentConfig quiet = cfg;
    quiet.output_path.clear();
    TailExperiment out;
    out.lengths = run_length_experiment(quiet);
    Json per = Json::array();
    for (const auto& dl : out.lengths.degrees) {
        std::vector<double> values;
        for (const auto* r : detail::records_for(out.lengths.records, dl.degree)) {
            if (!r->excluded) values.push_back(r->total_length);
        }
        for (double t : thresholds) {
            TailRow row;
            row.degree = dl.degree;
            row.threshold = t;
            const int hits = static_cast<int>(std::count_if(values.begin(), values.end(), [t](double v) { return v >= t; }));
            row.frequency = frequency(hits, static_cast<int>(values.size()));
            row.std_error = values.empty() ? 0.0
                                           : std::sqrt(row.frequency.value * (1.0 - row.frequency.value) /
                                                       static_cast<double>(values.size()));
            row.markov_bound = dl.theory / t;
            per.push_back(Json{{"degree", row.degree},
                               {"threshold", t},
                               {"frequency", row.frequency},
                               {"std_error", row.std_error},
                               {"markov_bound", std::isfinite(row.markov_bound) ? Json(row.markov_bound) : Json(nullptr)}});
            out.rows.push_back(row);
        }
    }
    write_outputs(cfg, out.lengths.records,
                  Json{{"experiment", "tail"},
                       {"config", cfg},
                       {"thresholds", thresholds},
                       {"failed", out.lengths.failed},
                       {"rows", per}});
    return out;
}

// ---------------------------------------------------------------- zeros near the circle

struct DegreeAnnulus {
    int degree = 0;
    double s = 0.0;
    SummaryStats count;
    double asymptotic = 0.0;  // n (coth s - 1/s)
    double exact = 0.0;       // finite-n expectation for the ensemble
};

struct AnnulusExperiment {
    std::vector<TrialRecord> records;
    std::vector<DegreeAnnulus> degrees;
};

/// Number of zeros in e^{-s/n} < |z| < e^{s/n}.
inline AnnulusExperiment run_annulus_experiment(const ExperimentConfig& cfg, double s) {
    if (!(s > 0.0)) throw InvalidArgument("s must be positive");
    AnnulusExperiment out;
    out.records = detail::run_trials(cfg, [&](const ComplexPolynomial& p, TrialRecord& rec) {
        const double n = p.degree();
        const double lo = std::exp(-s / n), hi = std::exp(s / n);
        int count = 0;
        for (const auto& z : roots(p)) {
            const double a = std::abs(z);
            if (a > lo && a < hi) ++count;
        }
        rec.annulus_zeros = count;
    });
    Json per = Json::array();
    for (int d : cfg.degrees) {
        DegreeAnnulus da;
        da.degree = d;
        da.s = s;
        std::vector<double> values;
        int excluded = 0;
        for (const auto* r : detail::records_for(out.records, d)) {
            if (r->excluded) ++excluded;
            else values.push_back(r->annulus_zeros);
        }
        da.count = summarize(values, excluded);
        da.asymptotic = annulus_zero_count_reference(d, s);
        const auto spec = cfg.ensemble.with_degree(d);
        da.exact = expected_zeros_in_annulus(spec, std::exp(-s / d), std::exp(s / d));
        per.push_back(Json{{"degree", d}, {"s", s}, {"count", da.count}, {"asymptotic", da.asymptotic}, {"exact", da.exact}});
        out.degrees.push_back(da);
    }
    write_outputs(cfg, out.records, Json{{"experiment", "annulus"}, {"config", cfg}, {"s", s}, {"degrees", per}});
    return out;
}

}  // namespace lemni
