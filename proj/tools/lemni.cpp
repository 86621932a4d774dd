#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lemni/ensembles.hpp"
#include "lemni/geometry.hpp"
#include "lemni/montecarlo.hpp"
#include "lemni/poly_parse.hpp"
#include "lemni/roots.hpp"
#include "lemni/serialize.hpp"
#include "lemni/svg.hpp"
#include "lemni/theory.hpp"

namespace {

using lemni::Json;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string ensemble = "kac";
    int degree = 10;
    std::vector<int> degrees;
    int trials = 100;
    std::uint64_t seed = 0;
    std::optional<double> tolerance;
    std::optional<int> grid_depth;
    double radius = 0.5;
    std::vector<double> thresholds;
    int threads = 0;
    std::string out;
    bool csv = false;
    std::string poly;
    bool limit = false;
    std::string config;
};

/// Thrown for failures after argument parsing that are the caller's fault.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

lemni::EnsembleSpec ensemble_of(const Options& o, int degree) {
    lemni::EnsembleSpec spec;
    spec.kind = lemni::parse_ensemble_kind(o.ensemble);
    if (spec.kind == lemni::EnsembleKind::Custom) throw UsageError("custom ensembles are read from --config files");
    spec.degree = degree;
    if (degree < 1) throw UsageError("--degree must be at least 1");
    return spec;
}

lemni::GridConfig grid_of(const Options& o, lemni::GridConfig g) {
    if (o.tolerance) g.length_refine_tolerance = *o.tolerance;
    if (o.grid_depth) g.max_depth = *o.grid_depth;
    g.validate();
    return g;
}

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_theory(const Options& o) {
    lemni::QuadratureConfig q;
    if (o.tolerance) q.abs_tolerance = *o.tolerance;
    q.validate();
    const auto kind = lemni::parse_ensemble_kind(o.ensemble);
    if (o.limit) {
        lemni::LengthEstimate e;
        switch (kind) {
            case lemni::EnsembleKind::Kac: e = lemni::kac_limit_constant(q); break;
            case lemni::EnsembleKind::Kostlan: e = lemni::kostlan_limit_constant(q); break;
            case lemni::EnsembleKind::Weyl: e = lemni::weyl_limit_constant(q); break;
            default: throw UsageError("--limit is available for kac, kostlan and weyl");
        }
        Json j{{"ensemble", o.ensemble}, {"constant", e.value}, {"error_bound", e.error_bound}, {"cells", e.cells_used}};
        if (o.csv) std::cout << "ensemble,constant,error_bound,cells\n"
                             << o.ensemble << ',' << lemni::detail::format_double(e.value) << ','
                             << lemni::detail::format_double(e.error_bound) << ',' << e.cells_used << '\n';
        else print(j);
        return e.converged ? kExitOk : kExitNumeric;
    }
    std::vector<int> ns = o.degrees.empty() ? std::vector<int>{o.degree} : o.degrees;
    Json rows = Json::array();
    bool ok = true;
    for (int n : ns) {
        const auto e = lemni::expected_length(ensemble_of(o, n), q);
        ok = ok && e.converged;
        rows.push_back(Json{{"ensemble", o.ensemble}, {"n", n}, {"value", e.value}, {"error_bound", e.error_bound},
                            {"cells", e.cells_used}});
    }
    if (o.csv) {
        std::cout << "ensemble,n,value,error_bound,cells\n";
        for (const auto& r : rows) {
            std::cout << o.ensemble << ',' << r["n"].get<int>() << ','
                      << lemni::detail::format_double(r["value"].get<double>()) << ','
                      << lemni::detail::format_double(r["error_bound"].get<double>()) << ','
                      << r["cells"].get<int>() << '\n';
        }
    } else {
        print(rows.size() == 1 ? rows[0] : rows);
    }
    return ok ? kExitOk : kExitNumeric;
}

lemni::ComplexPolynomial polynomial_of(const Options& o) {
    if (!o.poly.empty()) return lemni::parse_polynomial(o.poly);
    return lemni::sample(ensemble_of(o, o.degree), o.seed);
}

int cmd_sample(const Options& o) {
    const auto p = lemni::sample(ensemble_of(o, o.degree), o.seed);
    if (o.csv) {
        std::cout << "k,re,im\n";
        for (int k = 0; k <= p.degree(); ++k) {
            std::cout << k << ',' << lemni::detail::format_double(p.coefficient(k).real()) << ','
                      << lemni::detail::format_double(p.coefficient(k).imag()) << '\n';
        }
        return kExitOk;
    }
    Json coeffs = Json::array();
    for (const auto& c : p.coefficients()) coeffs.push_back(lemni::complex_to_json(c));
    print(Json{{"ensemble", o.ensemble}, {"degree", o.degree}, {"seed", o.seed}, {"coefficients", coeffs}});
    return kExitOk;
}

int cmd_trace(const Options& o) {
    const auto p = polynomial_of(o);
    const auto grid = grid_of(o, lemni::GridConfig{});
    const auto rts = lemni::roots(p);
    const auto curve = lemni::extract_lemniscate(p, grid, rts);
    if (o.csv) {
        std::cout << "component,length,roots_enclosed\n";
        for (std::size_t i = 0; i < curve.components.size(); ++i) {
            std::cout << i << ',' << lemni::detail::format_double(curve.per_component_length[i]) << ','
                      << curve.roots_enclosed[i] << '\n';
        }
    } else {
        Json j = curve;
        Json r = Json::array();
        for (const auto& z : rts) r.push_back(lemni::complex_to_json(z));
        j["roots"] = r;
        print(j);
    }
    return curve.unresolved_cells == 0 ? kExitOk : kExitNumeric;
}

int cmd_plot(const Options& o) {
    if (o.out.empty()) throw UsageError("plot needs --out <file.svg>");
    const auto p = polynomial_of(o);
    auto grid = grid_of(o, lemni::experiment_grid());
    const auto rts = lemni::roots(p);
    const auto curve = lemni::extract_lemniscate(p, grid, rts);
    lemni::emit_svg(curve, rts, o.out);
    print(Json{{"path", o.out}, {"b0", curve.b0}, {"total_length", curve.total_length},
               {"unresolved_cells", curve.unresolved_cells}});
    return curve.unresolved_cells == 0 ? kExitOk : kExitNumeric;
}

lemni::ExperimentConfig experiment_of(const Options& o, const CLI::App& sub) {
    lemni::ExperimentConfig cfg;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw UsageError("cannot read " + o.config);
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("bad config: ") + e.what());
        }
        lemni::from_json(j, cfg);
    }
    if (sub.count("--ensemble")) cfg.ensemble = ensemble_of(o, 1);
    if (sub.count("--degrees")) cfg.degrees = o.degrees;
    if (sub.count("--trials")) cfg.trials_per_degree = o.trials;
    if (sub.count("--seed")) cfg.master_seed = o.seed;
    if (sub.count("--out")) cfg.output_path = o.out;
    if (const auto* r = sub.get_option_no_throw("--radius"); r && r->count()) cfg.giant_radius = o.radius;
    cfg.grid = grid_of(o, o.config.empty() ? lemni::experiment_grid() : cfg.grid);
    cfg.threads = o.threads > 0 ? o.threads : default_threads();
    if (cfg.degrees.empty()) throw UsageError("--degrees is required");
    cfg.validate();
    return cfg;
}

Json read_summary_or(const lemni::ExperimentConfig& cfg, Json fallback) {
    if (cfg.output_path.empty()) return fallback;
    std::ifstream in(std::filesystem::path(cfg.output_path) / "summary.json");
    return in ? Json::parse(in) : fallback;
}

Json degree_summary_length(const lemni::LengthExperiment& r) {
    Json per = Json::array();
    for (const auto& d : r.degrees) {
        per.push_back(Json{{"degree", d.degree}, {"length", d.length},
                           {"theory", std::isfinite(d.theory) ? Json(d.theory) : Json(nullptr)},
                           {"exclusion_rate", d.exclusion_rate}});
    }
    return per;
}

int cmd_mc_length(const Options& o, const CLI::App& sub) {
    const auto cfg = experiment_of(o, sub);
    const auto r = lemni::run_length_experiment(cfg);
    print(read_summary_or(cfg, Json{{"experiment", "length"}, {"failed", r.failed}, {"degrees", degree_summary_length(r)}}));
    return r.failed ? kExitNumeric : kExitOk;
}

int cmd_mc_b0(const Options& o, const CLI::App& sub) {
    const auto cfg = experiment_of(o, sub);
    const auto r = lemni::run_components_experiment(cfg);
    Json per = Json::array();
    for (const auto& d : r.degrees) {
        per.push_back(Json{{"degree", d.degree}, {"b0_over_n", d.b0_over_n}, {"certificate_over_n", d.certificate_over_n},
                           {"max_b0", d.max_b0}, {"exclusion_rate", d.exclusion_rate}});
    }
    print(read_summary_or(cfg, Json{{"experiment", "components"}, {"failed", r.failed}, {"degrees", per}}));
    return r.failed ? kExitNumeric : kExitOk;
}

int cmd_mc_giant(const Options& o, const CLI::App& sub) {
    const auto cfg = experiment_of(o, sub);
    const double r = cfg.giant_radius.value_or(o.radius);
    const auto res = lemni::run_giant_experiment(cfg, r);
    Json per = Json::array();
    for (const auto& d : res.degrees) {
        per.push_back(Json{{"degree", d.degree}, {"frequency", d.frequency}, {"short_components", d.short_components},
                           {"exclusion_rate", d.exclusion_rate}});
    }
    print(read_summary_or(cfg, Json{{"experiment", "giant"}, {"radius", r}, {"failed", res.failed}, {"degrees", per}}));
    return res.failed ? kExitNumeric : kExitOk;
}

int cmd_mc_tail(const Options& o, const CLI::App& sub) {
    if (o.thresholds.empty()) throw UsageError("mc-tail needs --threshold");
    const auto cfg = experiment_of(o, sub);
    const auto res = lemni::outlier_tail_estimate(cfg, o.thresholds);
    Json rows = Json::array();
    for (const auto& t : res.rows) {
        rows.push_back(Json{{"degree", t.degree}, {"threshold", t.threshold}, {"frequency", t.frequency},
                            {"markov_bound", std::isfinite(t.markov_bound) ? Json(t.markov_bound) : Json(nullptr)}});
    }
    print(read_summary_or(cfg, Json{{"experiment", "tail"}, {"failed", res.lengths.failed}, {"rows", rows}}));
    return res.lengths.failed ? kExitNumeric : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random polynomial lemniscates: expected length by quadrature, extraction and Monte Carlo."};
    app.require_subcommand(1);
    Options o;

    auto add_ensemble = [&](CLI::App* s) {
        s->add_option("--ensemble", o.ensemble, "Coefficient model: kac, kostlan, weyl, recip_binom")
            ->check(CLI::IsMember({"kac", "kostlan", "weyl", "recip_binom"}));
    };
    auto add_degree = [&](CLI::App* s) {
        s->add_option("--degree", o.degree, "Polynomial degree")->check(CLI::Range(1, 100000));
    };
    auto add_seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "64-bit seed (master seed for experiments)"); };
    auto add_grid = [&](CLI::App* s) {
        s->add_option("--tolerance", o.tolerance, "Relative length refinement tolerance")
            ->check(CLI::PositiveNumber);
        s->add_option("--grid-depth", o.grid_depth, "Maximum quadtree depth")->check(CLI::Range(1, 28));
    };
    auto add_csv = [&](CLI::App* s) { s->add_flag("--csv", o.csv, "Print CSV instead of JSON"); };

    auto* theory = app.add_subcommand("theory", "Expected length by quadrature, or a large-degree limit");
    add_ensemble(theory);
    add_degree(theory);
    theory->add_option("--degrees", o.degrees, "Comma separated degrees to sweep")->delimiter(',')->check(CLI::PositiveNumber);
    theory->add_option("--tolerance", o.tolerance, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
    theory->add_flag("--limit", o.limit, "Large-degree constant instead of a finite degree");
    add_csv(theory);

    auto* sample = app.add_subcommand("sample", "Print the coefficients of one random polynomial");
    add_ensemble(sample);
    add_degree(sample);
    add_seed(sample);
    add_csv(sample);

    auto* trace = app.add_subcommand("trace", "Extract the lemniscate |p| = 1 of one polynomial");
    add_ensemble(trace);
    add_degree(trace);
    add_seed(trace);
    add_grid(trace);
    trace->add_option("--poly", o.poly, "Literal polynomial such as \"z^2-4\" instead of a random one");
    add_csv(trace);

    auto* plot = app.add_subcommand("plot", "Write the lemniscate, its roots and the unit circle as SVG");
    add_ensemble(plot);
    add_degree(plot);
    add_seed(plot);
    add_grid(plot);
    plot->add_option("--poly", o.poly, "Literal polynomial such as \"z^2-4\" instead of a random one");
    plot->add_option("--out", o.out, "SVG file to write")->required();

    std::vector<CLI::App*> experiments;
    auto add_experiment = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        add_ensemble(s);
        s->add_option("--degrees", o.degrees, "Comma separated degrees")->delimiter(',')->check(CLI::PositiveNumber);
        s->add_option("--trials", o.trials, "Trials per degree")->check(CLI::PositiveNumber);
        add_seed(s);
        add_grid(s);
        s->add_option("--threads", o.threads, "Worker threads (default: hardware parallelism)")
            ->envname("LEMNI_THREADS")
            ->check(CLI::PositiveNumber);
        s->add_option("--out", o.out, "Directory for per-degree CSV files and summary.json");
        s->add_option("--config", o.config, "Experiment config JSON; flags override its fields");
        experiments.push_back(s);
        return s;
    };
    auto* mc_length = add_experiment("mc-length", "Monte Carlo lemniscate length against the expected value");
    auto* mc_b0 = add_experiment("mc-b0", "Monte Carlo component counts and certified small components");
    auto* mc_giant = add_experiment("mc-giant", "Frequency of |p| < 1 on the whole circle |z| = r");
    mc_giant->add_option("--radius", o.radius, "Circle radius r in (0, 1)")->check(CLI::Range(0.0, 1.0));
    auto* mc_tail = add_experiment("mc-tail", "Tail frequencies P(length >= L) with Markov's bound");
    mc_tail->add_option("--threshold", o.thresholds, "Length thresholds L (comma separated)")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*theory) return cmd_theory(o);
        if (*sample) return cmd_sample(o);
        if (*trace) return cmd_trace(o);
        if (*plot) return cmd_plot(o);
        if (*mc_length) return cmd_mc_length(o, *mc_length);
        if (*mc_b0) return cmd_mc_b0(o, *mc_b0);
        if (*mc_giant) return cmd_mc_giant(o, *mc_giant);
        if (*mc_tail) return cmd_mc_tail(o, *mc_tail);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const lemni::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const lemni::InvalidSpec& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const lemni::RootFindingError& e) {
        Json j{{"error", e.what()}};
        Json r = Json::array();
        for (const auto& z : e.best().roots) r.push_back(lemni::complex_to_json(z));
        j["roots"] = r;
        j["log_residuals"] = e.best().log_residuals;
        print(j);
        return kExitNumeric;
    } catch (const lemni::Error& e) {
        print(Json{{"error", e.what()}});
        return kExitNumeric;
    }
    return kExitUsage;
}
