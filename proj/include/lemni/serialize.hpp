#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "lemni/ensembles.hpp"
#include "lemni/geometry.hpp"
#include "lemni/theory.hpp"

namespace lemni {

using Json = nlohmann::ordered_json;

inline void to_json(Json& j, const EnsembleSpec& s) {
    j = Json{{"kind", std::string(to_string(s.kind))}, {"degree", s.degree}};
    if (s.custom_weights) j["weights"] = *s.custom_weights;
}

inline void from_json(const Json& j, EnsembleSpec& s) {
    s.kind = parse_ensemble_kind(j.at("kind").get<std::string>());
    s.degree = j.at("degree").get<int>();
    s.custom_weights.reset();
    if (j.contains("weights")) s.custom_weights = j.at("weights").get<std::vector<double>>();
    if (s.kind == EnsembleKind::Custom) {
        if (!s.custom_weights) throw InvalidSpec("custom ensemble needs weights");
        if (static_cast<int>(s.custom_weights->size()) != s.degree + 1)
            throw InvalidSpec("custom weights must have degree + 1 entries");
    }
}

inline void to_json(Json& j, const GridConfig& g) {
    j = Json{{"initial_cells_per_axis", g.initial_cells_per_axis},
             {"max_depth", g.max_depth},
             {"vertex_tolerance", g.vertex_tolerance},
             {"length_refine_tolerance", g.length_refine_tolerance}};
}

inline void from_json(const Json& j, GridConfig& g) {
    g = GridConfig{};
    if (j.contains("initial_cells_per_axis")) g.initial_cells_per_axis = j.at("initial_cells_per_axis").get<int>();
    if (j.contains("max_depth")) g.max_depth = j.at("max_depth").get<int>();
    if (j.contains("vertex_tolerance")) g.vertex_tolerance = j.at("vertex_tolerance").get<double>();
    if (j.contains("length_refine_tolerance"))
        g.length_refine_tolerance = j.at("length_refine_tolerance").get<double>();
    g.validate();
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidArgument("complex value must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline void to_json(Json& j, const LevelSetCurve& c) {
    Json comps = Json::array();
    for (const auto& loop : c.components) {
        Json pts = Json::array();
        for (const auto& v : loop) pts.push_back(complex_to_json(v));
        comps.push_back(std::move(pts));
    }
    j = Json{{"b0", c.b0},
             {"total_length", c.total_length},
             {"unresolved_cells", c.unresolved_cells},
             {"micro_components", c.micro_components},
             {"length_converged", c.length_converged},
             {"bounding_radius", c.bounding_radius},
             {"per_component_length", c.per_component_length},
             {"roots_enclosed", c.roots_enclosed},
             {"micro", std::vector<int>(c.micro.begin(), c.micro.end())},
             {"components", std::move(comps)}};
}

inline void from_json(const Json& j, LevelSetCurve& c) {
    c = LevelSetCurve{};
    c.b0 = j.at("b0").get<int>();
    c.total_length = j.at("total_length").get<double>();
    c.unresolved_cells = j.at("unresolved_cells").get<int>();
    c.micro_components = j.value("micro_components", 0);
    c.length_converged = j.value("length_converged", true);
    c.bounding_radius = j.value("bounding_radius", 0.0);
    c.per_component_length = j.at("per_component_length").get<std::vector<double>>();
    c.roots_enclosed = j.value("roots_enclosed", std::vector<int>{});
    for (int m : j.value("micro", std::vector<int>{})) c.micro.push_back(static_cast<char>(m != 0));
    for (const auto& loop : j.at("components")) {
        std::vector<Complex> pts;
        for (const auto& v : loop) pts.push_back(complex_from_json(v));
        c.components.push_back(std::move(pts));
    }
}

inline void to_json(Json& j, const LengthEstimate& e) {
    j = Json{{"value", e.value}, {"error_bound", e.error_bound}, {"cells", e.cells_used}, {"converged", e.converged}};
}

}  // namespace lemni
