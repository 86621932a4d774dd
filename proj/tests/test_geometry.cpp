#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lemni/ensembles.hpp"
#include "lemni/geometry.hpp"
#include "lemni/roots.hpp"
#include "lemni/serialize.hpp"

using namespace lemni;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ComplexPolynomial poly(std::vector<double> re) {
    std::vector<Complex> c;
    for (double v : re) c.emplace_back(v, 0.0);
    return ComplexPolynomial(std::move(c));
}

double agm(double a, double b) {
    while (std::abs(a - b) > 1e-16 * a) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return a;
}

const double kBernoulliLength = 2.0 * std::numbers::sqrt2 * std::numbers::pi / agm(1.0, std::numbers::sqrt2);

// Connected components of {|p| < 1} on an m x m pixel grid (4-neighbour
// flood fill). The pixel holding each root is marked inside so components
// thinner than a pixel still register.
int flood_fill_components(const ComplexPolynomial& p, double R, int m, const std::vector<Complex>& rts) {
    const double h = 2.0 * R / m;
    std::vector<char> in(static_cast<std::size_t>(m) * m, 0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex z{-R + (i + 0.5) * h, -R + (j + 0.5) * h};
            in[static_cast<std::size_t>(i) * m + j] = std::abs(p(z)) < 1.0;
        }
    }
    for (const auto& r : rts) {
        const int i = static_cast<int>(std::floor((r.real() + R) / h));
        const int j = static_cast<int>(std::floor((r.imag() + R) / h));
        if (i >= 0 && i < m && j >= 0 && j < m) in[static_cast<std::size_t>(i) * m + j] = 1;
    }
    std::vector<char> seen(in.size(), 0);
    std::vector<int> stack;
    int count = 0;
    for (int start = 0; start < m * m; ++start) {
        if (!in[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) continue;
        ++count;
        stack.push_back(start);
        seen[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int i = c / m, j = c % m;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[0] >= m || q[1] < 0 || q[1] >= m) continue;
                const int k = q[0] * m + q[1];
                if (in[static_cast<std::size_t>(k)] && !seen[static_cast<std::size_t>(k)]) {
                    seen[static_cast<std::size_t>(k)] = 1;
                    stack.push_back(k);
                }
            }
        }
    }
    return count;
}

void check_curve_invariants(const ComplexPolynomial& p, const LevelSetCurve& c, double vertex_tol) {
    REQUIRE(c.b0 == static_cast<int>(c.components.size()));
    REQUIRE(c.per_component_length.size() == c.components.size());
    double sum = 0.0;
    for (double l : c.per_component_length) {
        CHECK(l >= 0.0);
        sum += l;
    }
    CHECK_THAT(c.total_length, WithinRel(sum, 1e-12));
    if (c.unresolved_cells == 0) {
        CHECK(c.b0 <= p.degree());
        int enclosed = 0;
        for (int e : c.roots_enclosed) {
            CHECK(e >= 1);
            enclosed += e;
        }
        CHECK(enclosed == p.degree());
    }
    // Vertices meet the tolerance up to the rounding error of evaluating p,
    // (n + 1) eps sum |c_k| |z|^k. Micro components are drawn circles.
    REQUIRE(c.micro.size() == c.components.size());
    double worst = 0.0;
    for (std::size_t l = 0; l < c.components.size(); ++l) {
        if (c.micro[l]) continue;
        for (const auto& v : c.components[l]) {
            double kappa = 0.0;
            for (int k = 0; k <= p.degree(); ++k) kappa += std::abs(p.coefficient(k)) * std::pow(std::abs(v), k);
            const double allowed = vertex_tol + (p.degree() + 1) * std::numeric_limits<double>::epsilon() * kappa;
            worst = std::max(worst, std::abs(std::abs(p(v)) - 1.0) / allowed);
        }
    }
    CHECK(worst <= 1.0);
}

}  // namespace

TEST_CASE("bounding radius") {
    const double r1 = bounding_radius(poly({0, 1}));
    CHECK(r1 > 1.0);
    CHECK(r1 <= 2.0);
    const auto q = poly({-4, 0, 1});
    const double r2 = bounding_radius(q);
    CHECK(r2 >= std::sqrt(5.0));
    CHECK(std::abs(q(Complex{r2, 0.0})) > 1.0);
    CHECK_THROWS_AS(bounding_radius(ComplexPolynomial({Complex{1, 0}, Complex{0, 0}})), DegeneratePolynomial);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = sample(EnsembleSpec::kac(30), seed);
        const double R = bounding_radius(p);
        double lowest = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 10000; ++k) lowest = std::min(lowest, std::abs(p(std::polar(R, 2.0 * std::numbers::pi * k / 10000))));
        CHECK(lowest > 1.0);
    }
}

TEST_CASE("roots of simple polynomials") {
    auto r = roots(poly({-4, 0, 1}));
    std::sort(r.begin(), r.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(r[0] - Complex{-2, 0}) < 1e-10);
    CHECK(std::abs(r[1] - Complex{2, 0}) < 1e-10);
    const auto cube = roots(poly({-1, 0, 0, 1}));
    for (int k = 0; k < 3; ++k) {
        const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * k / 3.0);
        double best = 1.0;
        for (const auto& z : cube) best = std::min(best, std::abs(z - w));
        CHECK(best < 1e-10);
    }
    const auto zeros = roots(poly({0, 0, 2}));
    CHECK(zeros.size() == 2);
    CHECK(std::abs(zeros[0]) == 0.0);
}

TEST_CASE("Kac roots concentrate near the unit circle") {
    int near = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = sample(EnsembleSpec::kac(50), seed);
        const auto rep = find_roots(p);
        REQUIRE(rep.converged);
        REQUIRE(rep.roots.size() == 50);
        for (std::size_t i = 0; i < rep.roots.size(); ++i) {
            CHECK(rep.log_residuals[i] <= detail::log_residual_bound(p, rep.roots[i]));
            const double a = std::abs(rep.roots[i]);
            near += a > 0.8 && a < 1.25;
            ++total;
        }
    }
    CHECK(static_cast<double>(near) / total > 0.7);
}

TEST_CASE("roots of wide-ranging ensembles") {
    for (auto spec : {EnsembleSpec::kostlan(100), EnsembleSpec::weyl(100), EnsembleSpec::reciprocal_binomial(100),
                      EnsembleSpec::kac(300)}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto rep = find_roots(sample(spec, seed));
            CHECK(rep.converged);
        }
    }
}

TEST_CASE("lemniscate of z is the unit circle") {
    const auto p = poly({0, 1});
    const GridConfig cfg;
    const auto c = extract_lemniscate(p, cfg);
    CHECK(c.b0 == 1);
    CHECK(c.unresolved_cells == 0);
    CHECK_THAT(c.total_length, WithinAbs(2.0 * std::numbers::pi, 1e-6));
    CHECK_THAT(arc_length(c), WithinAbs(2.0 * std::numbers::pi, 1e-6));
    for (const auto& v : c.components[0]) CHECK_THAT(std::abs(v), WithinAbs(1.0, 1e-10));
    check_curve_invariants(p, c, cfg.vertex_tolerance);
    CHECK(betti0(p, cfg) == 1);
}

TEST_CASE("lemniscate of z^n is the unit circle") {
    for (int n : {2, 5, 12}) {
        std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
        c.back() = 1.0;
        const auto p = poly(c);
        const auto curve = extract_lemniscate(p, GridConfig{});
        CHECK(curve.b0 == 1);
        CHECK_THAT(curve.total_length, WithinAbs(2.0 * std::numbers::pi, 1e-6));
    }
}

TEST_CASE("two distant roots give two ovals") {
    const auto p = poly({-4, 0, 1});
    const GridConfig cfg;
    const auto c = extract_lemniscate(p, cfg);
    CHECK(c.b0 == 2);
    CHECK(betti0(p, cfg) == 2);
    check_curve_invariants(p, c, cfg.vertex_tolerance);
    const auto left = enclosing_component(c, {-2.0, 0.0});
    const auto right = enclosing_component(c, {2.0, 0.0});
    REQUIRE(left);
    REQUIRE(right);
    CHECK(*left != *right);
    CHECK_FALSE(enclosing_component(c, {0.0, 0.0}));
}

TEST_CASE("Bernoulli lemniscate length") {
    const auto p = poly({-1, 0, 1});
    const GridConfig cfg;
    const auto c = extract_lemniscate(p, cfg);
    CHECK(c.b0 == 1);
    CHECK_THAT(c.total_length, WithinAbs(kBernoulliLength, 1e-3));
}

TEST_CASE("random extractions satisfy the curve invariants") {
    const GridConfig cfg;
    for (auto spec : {EnsembleSpec::kac(20), EnsembleSpec::kostlan(20), EnsembleSpec::weyl(20),
                      EnsembleSpec::reciprocal_binomial(20), EnsembleSpec::kac(80)}) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            const auto p = sample(spec, seed);
            const auto c = extract_lemniscate(p, cfg);
            CHECK(c.unresolved_cells == 0);
            CHECK(c.length_converged);
            check_curve_invariants(p, c, cfg.vertex_tolerance);
        }
    }
}

TEST_CASE("component count matches a flood fill") {
    const GridConfig cfg;
    int agree = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto p = sample(EnsembleSpec::kac(20), 1000 + seed);
        const auto rts = roots(p);
        const auto c = extract_lemniscate(p, cfg, rts);
        REQUIRE(c.unresolved_cells == 0);
        CHECK(c.b0 <= 20);
        // 4x the 32-cell initial grid refined eight times
        const int fill = flood_fill_components(p, 1.01 * c.bounding_radius, 1024, rts);
        CHECK(fill == c.b0);
        agree += fill == c.b0;
    }
    CHECK(agree == 50);
}

TEST_CASE("refinement never loses components") {
    GridConfig coarse;
    coarse.length_refine_tolerance = 1.0;
    GridConfig fine = coarse;
    fine.initial_cells_per_axis = 64;
    fine.max_depth = coarse.max_depth + 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = sample(EnsembleSpec::kac(60), seed);
        const auto a = extract_lemniscate(p, coarse);
        if (a.unresolved_cells != 0) continue;
        const auto b = extract_lemniscate(p, fine);
        CHECK(b.b0 >= a.b0);
    }
}

TEST_CASE("rotation equivariance of length") {
    const GridConfig cfg;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = sample(EnsembleSpec::kac(25), 50 + seed);
        const auto q = rotate_coefficients(p, 0.7);
        const double a = extract_lemniscate(p, cfg).total_length;
        const double b = extract_lemniscate(q, cfg).total_length;
        CHECK(std::abs(a - b) <= 2.0 * cfg.length_refine_tolerance * a);
    }
}

TEST_CASE("degree-one lemniscates are circles") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = sample(EnsembleSpec::kac(1), seed);
        const auto c = extract_lemniscate(p, GridConfig{});
        REQUIRE(c.b0 == 1);
        CHECK_THAT(c.total_length, WithinRel(2.0 * std::numbers::pi / std::abs(p.coefficient(1)), 1e-6));
    }
}

TEST_CASE("tiny components are found around their roots") {
    // a root of multiplicity one deep inside a region where |p| is huge
    const ComplexPolynomial p({Complex{-1e6, 0}, Complex{1e6, 0}, Complex{0, 0}, Complex{1, 0}});
    const auto c = extract_lemniscate(p, GridConfig{});
    CHECK(c.unresolved_cells == 0);
    const auto rts = roots(p);
    int enclosed = 0;
    for (int e : c.roots_enclosed) enclosed += e;
    CHECK(enclosed == 3);
    CHECK(c.b0 <= 3);
}

TEST_CASE("grid config validation") {
    GridConfig g;
    g.max_depth = 3;
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
    g = {};
    g.vertex_tolerance = 0.0;
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
    g = {};
    g.max_depth = 40;
    CHECK_THROWS_AS(extract_lemniscate(poly({0, 1}), g), InvalidArgument);
}

TEST_CASE("Taylor certificate on explicit examples") {
    CHECK(taylor_certificate(poly({0, 10}), {0.0, 0.0}, 0.4, 0.1));
    const auto c = extract_lemniscate(poly({0, 10}), GridConfig{});
    CHECK_THAT(c.total_length, WithinAbs(2.0 * std::numbers::pi / 10.0, 1e-7));
    CHECK_FALSE(taylor_certificate(poly({0, 1}), {0.0, 0.0}, 0.4, 0.1));
    CHECK_THROWS_AS(taylor_certificate(poly({0, 10}), {0.0, 0.0}, 0.4, 0.45), InvalidArgument);
    CHECK_THROWS_AS(taylor_certificate(poly({0, 10}), {0.0, 0.0}, 0.3, 0.2), InvalidArgument);
    CHECK_THROWS_AS(taylor_certificate(poly({0, 10}), {0.5, 0.0}), InvalidArgument);
}

TEST_CASE("certified roots own a small component") {
    const int n = 100;
    const double alpha = 0.4, beta = 0.05;
    const double radius = std::pow(n, -1.0 - alpha);
    GridConfig local;
    local.initial_cells_per_axis = 16;
    local.max_depth = 18;
    // about one certified root per hundred polynomials at this degree
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 3000 && hits < 6; ++seed) {
        const auto p = sample(EnsembleSpec::kac(n), 7000 + seed);
        const auto rts = roots(p);
        for (const auto& z : rts) {
            if (!taylor_certificate(p, z, alpha, beta)) continue;
            ++hits;
            // |p| > 1 on the whole certificate circle
            double low = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 2000; ++k) low = std::min(low, std::abs(p(z + std::polar(radius, 2.0 * std::numbers::pi * k / 2000))));
            CHECK(low > 1.0);
            const auto box = extract_in_box(p, z, radius, local, rts);
            CHECK(box.open_chains == 0);
            bool found = false;
            for (const auto& loop : box.loops) {
                if (!point_in_polygon(loop, z)) continue;
                bool inside = true;
                for (const auto& v : loop) inside = inside && std::abs(v - z) < radius;
                found = found || inside;
            }
            CHECK(found);
        }
    }
    CHECK(hits >= 6);
}

TEST_CASE("giant event") {
    CHECK(giant_event(poly({0, 0.5}), 0.5) == GiantStatus::yes);
    CHECK(giant_event(poly({3}), 0.5) == GiantStatus::no);
    CHECK_THROWS_AS(giant_event(poly({0, 1}), 1.0), InvalidArgument);
    CHECK(std::string(to_string(GiantStatus::indeterminate)) == "indeterminate");
    // a polynomial touching 1 on the circle cannot be certified either way cheaply
    CHECK(giant_event(poly({0, 2}), 0.5, 1024) != GiantStatus::yes);

    int yes = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto p = sample(EnsembleSpec::kac(50), seed);
        const auto s = giant_event(p, 0.5);
        if (s != GiantStatus::yes) continue;
        ++yes;
        const auto c = extract_lemniscate(p, GridConfig{});
        const auto k = enclosing_component(c, {0.0, 0.0});
        REQUIRE(k);
        CHECK(c.per_component_length[*k] >= std::numbers::pi - 1e-2);
    }
    CHECK(yes > 0);
}

TEST_CASE("level set curves round-trip through JSON") {
    const auto c = extract_lemniscate(poly({-4, 0, 1}), GridConfig{});
    const Json j = c;
    const auto back = Json::parse(j.dump()).get<LevelSetCurve>();
    CHECK(back.b0 == c.b0);
    CHECK(back.total_length == c.total_length);
    CHECK(back.components == c.components);
    CHECK(Json(back) == j);
}
