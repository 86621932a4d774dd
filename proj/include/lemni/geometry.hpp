#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lemni/error.hpp"
#include "lemni/polynomial.hpp"
#include "lemni/roots.hpp"

namespace lemni {

/// Quadtree resolution and tolerances for contour extraction.
///
/// The root cell is the square [-R, R]^2; `initial_cells_per_axis` cells per
/// axis are always evaluated and cells may be halved until the tree is
/// `max_depth` levels deep, counted from the single root cell (so the initial
/// grid sits at depth ceil(log2(initial_cells_per_axis))).
struct GridConfig {
    int initial_cells_per_axis = 32;
    int max_depth = 22;
    double vertex_tolerance = 1e-10;
    double length_refine_tolerance = 1e-7;

    int initial_depth() const {
        int d = 0;
        while ((1 << d) < initial_cells_per_axis) ++d;
        return d;
    }

    void validate() const {
        if (initial_cells_per_axis < 1 || initial_cells_per_axis > 4096)
            throw InvalidArgument("initial_cells_per_axis must be in [1, 4096]");
        if (max_depth < initial_depth()) throw InvalidArgument("max_depth must be at least the initial depth");
        if (max_depth > 28) throw InvalidArgument("max_depth must be at most 28");
        if (!(vertex_tolerance > 0.0) || !std::isfinite(vertex_tolerance))
            throw InvalidArgument("vertex_tolerance must be positive");
        if (!(length_refine_tolerance > 0.0) || !std::isfinite(length_refine_tolerance))
            throw InvalidArgument("length_refine_tolerance must be positive");
    }
};

/// Extracted {|p| = 1}: closed polylines, one per connected component.
struct LevelSetCurve {
    std::vector<std::vector<Complex>> components;  // cyclic; last vertex joins the first
    std::vector<double> per_component_length;
    double total_length = 0.0;
    int b0 = 0;
    int unresolved_cells = 0;

    std::vector<int> roots_enclosed;  // per component
    std::vector<char> micro;          // per component: below double resolution, drawn as a circle
    int micro_components = 0;
    bool length_converged = true;
    double bounding_radius = 0.0;
};

/// R with |p(z)| > 1 for every |z| >= R, from
/// |p(z)| >= |c_n| R^n - sum_{k<n} |c_k| R^k, by doubling then bisection.
inline double bounding_radius(const ComplexPolynomial& p) {
    const int n = p.degree();
    const double lead = std::abs(p.leading());
    if (lead == 0.0) throw DegeneratePolynomial("leading coefficient is zero");
    if (n == 0) {
        if (lead > 1.0) return 1.0;
        throw DegeneratePolynomial("constant polynomial with |c| <= 1 has no bounded lemniscate");
    }
    std::vector<double> logc(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
    for (int k = 0; k < n; ++k) {
        const double a = std::abs(p.coefficient(k));
        if (a > 0.0) logc[static_cast<std::size_t>(k)] = std::log(a);
    }
    // margin(R) = |c_n| - sum |c_k| R^{k-n} - R^{-n}, increasing in R
    auto positive = [&](double R) {
        const double lr = std::log(R);
        double s = std::exp(-n * lr);
        for (int k = 0; k < n; ++k) s += std::exp(logc[static_cast<std::size_t>(k)] + (k - n) * lr);
        return lead - s > 0.0;
    };
    double lo = 1.0, hi = 1.0;
    if (positive(1.0)) {
        while (positive(lo)) {
            hi = lo;
            lo *= 0.5;
        }
    } else {
        while (!positive(hi)) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) throw NumericError("bounding radius overflow");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (positive(mid) ? hi : lo) = mid;
    }
    return hi;
}

/// Even-odd rule; works for figure-eight polylines too.
inline bool point_in_polygon(std::span<const Complex> poly, Complex z) {
    bool inside = false;
    const std::size_t m = poly.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const double yi = poly[i].imag(), yj = poly[j].imag();
        if ((yi > z.imag()) != (yj > z.imag())) {
            const double x = poly[i].real() + (poly[j].real() - poly[i].real()) * (z.imag() - yi) / (yj - yi);
            if (z.real() < x) inside = !inside;
        }
    }
    return inside;
}

inline double polyline_length(std::span<const Complex> loop) {
    double s = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) s += std::abs(loop[(i + 1) % loop.size()] - loop[i]);
    return s;
}

/// Loops found inside one square window.
struct BoxExtraction {
    std::vector<std::vector<Complex>> loops;
    int open_chains = 0;  // level set leaving the window
    int unresolved = 0;
    std::size_t leaves = 0;
};

namespace detail {

struct RootSeed {
    Complex z;
    double target;  // cells containing z are split while larger than this
};

/// Adaptive quadtree marching squares on the sign of log|p| (negative inside).
class QuadtreeContour {
public:
    QuadtreeContour(const ComplexPolynomial& p, Complex lower_left, double width, int initial, int levels,
                    double vertex_tolerance, std::vector<RootSeed> seeds)
        : p_(p), origin_(lower_left), initial_(initial), levels_(levels), tol_(vertex_tolerance),
          seeds_(std::move(seeds)) {
        finest_ = static_cast<std::int64_t>(initial) << levels;
        hf_ = width / static_cast<double>(finest_);
    }

    BoxExtraction run() {
        std::vector<int> all(seeds_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        for (int i = 0; i < initial_; ++i) {
            for (int j = 0; j < initial_; ++j) {
                std::vector<int> mine;
                for (int s : all) {
                    if (contains(0, i, j, seeds_[static_cast<std::size_t>(s)].z)) mine.push_back(s);
                }
                build(0, i, j, mine);
            }
        }
        BoxExtraction out;
        for (int round = 0;; ++round) {
            balance();
            std::vector<Key> ambiguous;
            out.unresolved = march(ambiguous);
            if (ambiguous.empty() || round > 64) break;
            for (Key k : ambiguous) split_leaf(k);
        }
        chain(out);
        out.leaves = leaves_.size();
        return out;
    }

private:
    using Key = std::uint64_t;

    static Key cell_key(int level, std::int64_t i, std::int64_t j) {
        return (static_cast<Key>(level) << 58) | (static_cast<Key>(i) << 29) | static_cast<Key>(j);
    }
    static void decode(Key k, int& level, std::int64_t& i, std::int64_t& j) {
        level = static_cast<int>(k >> 58);
        i = static_cast<std::int64_t>((k >> 29) & ((Key{1} << 29) - 1));
        j = static_cast<std::int64_t>(k & ((Key{1} << 29) - 1));
    }
    static Key vertex_key(std::int64_t I, std::int64_t J) {
        return (static_cast<Key>(I) << 32) | static_cast<Key>(J);
    }

    std::int64_t span(int level) const { return std::int64_t{1} << (levels_ - level); }
    std::int64_t cells(int level) const { return static_cast<std::int64_t>(initial_) << level; }
    Complex point(std::int64_t I, std::int64_t J) const {
        return {origin_.real() + static_cast<double>(I) * hf_, origin_.imag() + static_cast<double>(J) * hf_};
    }
    bool contains(int level, std::int64_t i, std::int64_t j, Complex z) const {
        const double s = static_cast<double>(span(level)) * hf_;
        const double x0 = origin_.real() + static_cast<double>(i) * s;
        const double y0 = origin_.imag() + static_cast<double>(j) * s;
        return z.real() >= x0 && z.real() < x0 + s && z.imag() >= y0 && z.imag() < y0 + s;
    }

    double value(std::int64_t I, std::int64_t J) {
        const Key k = vertex_key(I, J);
        auto it = values_.find(k);
        if (it != values_.end()) return it->second;
        const double g = p_.log_abs(point(I, J));
        if (std::isnan(g) || g == std::numeric_limits<double>::infinity())
            throw NumericError("nonfinite polynomial evaluation");
        values_.emplace(k, g);
        return g;
    }

    bool should_split(int level, std::int64_t i, std::int64_t j, const std::vector<int>& seeds) {
        if (level >= levels_) return false;
        const std::int64_t s = span(level);
        const double h = static_cast<double>(s) * hf_;
        for (int sidx : seeds) {
            if (seeds_[static_cast<std::size_t>(sidx)].target < h) return true;
        }
        const std::int64_t I0 = i * s, J0 = j * s;
        const std::array<double, 4> g = {value(I0, J0), value(I0 + s, J0), value(I0 + s, J0 + s),
                                         value(I0, J0 + s)};
        const Complex c = point(I0, J0) + Complex{0.5 * h, 0.5 * h};
        const auto jet = p_.jet(c);
        if (jet.value == Complex{0.0, 0.0}) return true;
        const double lc = jet.log_abs();
        if (!std::isfinite(lc)) throw NumericError("nonfinite polynomial evaluation");
        const Complex d1 = jet.first / jet.value;
        const Complex d2 = jet.second / jet.value;
        const double f1 = std::abs(d1), f2 = std::abs(d2);

        const bool center_in = lc < 0.0;
        bool mixed = false;
        for (double v : g) mixed = mixed || ((v < 0.0) != center_in);
        const double delta = h * std::numbers::sqrt2 / 2.0;
        const double eta = f1 * delta + 0.5 * f2 * delta * delta;
        const double gap = lc >= 0.0 ? -std::expm1(-lc) : std::expm1(-lc);
        if (!mixed && 2.0 * eta < gap) return false;

        // curvature radius of the level line of log|p|
        const double bend = std::abs(d2 - d1 * d1);
        if (bend > 0.0 && h > f1 / bend) return true;
        if (mixed) {
            // second difference of |p| - 1 against its first differences
            const double gc = std::expm1(lc);
            double mean = 0.0;
            for (double v : g) mean += 0.25 * std::expm1(v);
            const double first = std::max(std::fabs(std::expm1(g[0]) - std::expm1(g[2])),
                                          std::fabs(std::expm1(g[1]) - std::expm1(g[3])));
            if (std::fabs(gc - mean) > 0.25 * first) return true;
        }
        return false;
    }

    void build(int level, std::int64_t i, std::int64_t j, const std::vector<int>& seeds) {
        const Key k = cell_key(level, i, j);
        if (!should_split(level, i, j, seeds)) {
            leaves_.insert(k);
            return;
        }
        internal_.insert(k);
        for (int di = 0; di < 2; ++di) {
            for (int dj = 0; dj < 2; ++dj) {
                const std::int64_t ci = 2 * i + di, cj = 2 * j + dj;
                std::vector<int> mine;
                for (int s : seeds) {
                    if (contains(level + 1, ci, cj, seeds_[static_cast<std::size_t>(s)].z)) mine.push_back(s);
                }
                build(level + 1, ci, cj, mine);
            }
        }
    }

    void split_leaf(Key k) {
        int level;
        std::int64_t i, j;
        decode(k, level, i, j);
        if (level >= levels_ || !leaves_.erase(k)) return;
        internal_.insert(k);
        for (int di = 0; di < 2; ++di) {
            for (int dj = 0; dj < 2; ++dj) leaves_.insert(cell_key(level + 1, 2 * i + di, 2 * j + dj));
        }
    }

    bool is_internal(int level, std::int64_t i, std::int64_t j) const {
        if (i < 0 || j < 0 || i >= cells(level) || j >= cells(level)) return false;
        return internal_.count(cell_key(level, i, j)) != 0;
    }

    std::vector<Key> sorted_leaves() const {
        std::vector<Key> keys(leaves_.begin(), leaves_.end());
        std::sort(keys.begin(), keys.end());
        return keys;
    }

    bool needs_balance(Key k) const {
        int level;
        std::int64_t i, j;
        decode(k, level, i, j);
        if (level >= levels_ - 1) return false;
        const std::array<std::array<std::int64_t, 4>, 4> probes = {{
            // neighbour i, j, then the column or row of its adjacent children
            {i + 1, j, 2 * (i + 1), -1},
            {i - 1, j, 2 * (i - 1) + 1, -1},
            {i, j + 1, -1, 2 * (j + 1)},
            {i, j - 1, -1, 2 * (j - 1) + 1},
        }};
        for (const auto& pr : probes) {
            if (!is_internal(level, pr[0], pr[1])) continue;
            for (std::int64_t t = 0; t < 2; ++t) {
                const std::int64_t ci = pr[2] >= 0 ? pr[2] : 2 * i + t;
                const std::int64_t cj = pr[3] >= 0 ? pr[3] : 2 * j + t;
                if (is_internal(level + 1, ci, cj)) return true;
            }
        }
        return false;
    }

    // 2:1 balance, so each leaf edge carries at most one hanging midpoint.
    void balance() {
        std::deque<Key> work;
        for (Key k : sorted_leaves()) work.push_back(k);
        while (!work.empty()) {
            const Key k = work.front();
            work.pop_front();
            if (!leaves_.count(k) || !needs_balance(k)) continue;
            split_leaf(k);
            int level;
            std::int64_t i, j;
            decode(k, level, i, j);
            for (int di = 0; di < 2; ++di) {
                for (int dj = 0; dj < 2; ++dj) work.push_back(cell_key(level + 1, 2 * i + di, 2 * j + dj));
            }
            if (level == 0) continue;
            const std::int64_t pi = i / 2, pj = j / 2;
            for (const auto& [ni, nj] : std::array<std::pair<std::int64_t, std::int64_t>, 4>{
                     {{pi + 1, pj}, {pi - 1, pj}, {pi, pj + 1}, {pi, pj - 1}}}) {
                if (ni < 0 || nj < 0 || ni >= cells(level - 1) || nj >= cells(level - 1)) continue;
                const Key nk = cell_key(level - 1, ni, nj);
                if (leaves_.count(nk)) work.push_back(nk);
            }
        }
    }

    int crossing(std::int64_t Ia, std::int64_t Ja, std::int64_t Ib, std::int64_t Jb) {
        Key a = vertex_key(Ia, Ja), b = vertex_key(Ib, Jb);
        if (b < a) {
            std::swap(a, b);
            std::swap(Ia, Ib);
            std::swap(Ja, Jb);
        }
        const auto key = std::make_pair(a, b);
        auto it = crossing_ids_.find(key);
        if (it != crossing_ids_.end()) return it->second;
        const int id = static_cast<int>(crossing_points_.size());
        crossing_points_.push_back(solve_edge(point(Ia, Ja), value(Ia, Ja), point(Ib, Jb), value(Ib, Jb)));
        crossing_ids_.emplace(key, id);
        return id;
    }

    // safeguarded Newton for log|p| = 0 on the segment za -> zb
    Complex solve_edge(Complex za, double ga, Complex zb, double gb) const {
        if (ga == 0.0) return za;
        if (gb == 0.0) return zb;
        const Complex d = zb - za;
        double lo = 0.0, hi = 1.0, glo = ga;
        double t = std::isfinite(ga) && std::isfinite(gb) ? ga / (ga - gb) : 0.5;
        if (!(t > 0.0 && t < 1.0)) t = 0.5;
        Complex best = za + t * d;
        double best_err = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 100; ++it) {
            const Complex z = za + t * d;
            const auto jet = p_.jet(z);
            const double g = jet.log_abs();
            const double err = std::fabs(std::expm1(g));
            if (err < best_err) {
                best_err = err;
                best = z;
            }
            if (err <= tol_) break;
            if ((g < 0.0) == (glo < 0.0)) {
                lo = t;
                glo = g;
            } else {
                hi = t;
            }
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
            double next = 0.5 * (lo + hi);
            if (jet.value != Complex{0.0, 0.0} && std::isfinite(g)) {
                const double slope = (jet.first / jet.value * d).real();
                if (slope != 0.0) {
                    const double cand = t - g / slope;
                    if (cand > lo && cand < hi) next = cand;
                }
            }
            t = next;
        }
        return best;
    }

    int march(std::vector<Key>& ambiguous) {
        segments_.clear();
        int unresolved = 0;
        std::vector<std::pair<std::int64_t, std::int64_t>> boundary;
        std::vector<int> ids;
        std::vector<std::size_t> where;
        for (Key k : sorted_leaves()) {
            int level;
            std::int64_t i, j;
            decode(k, level, i, j);
            const std::int64_t s = span(level), half = s / 2;
            const std::int64_t I0 = i * s, J0 = j * s;
            boundary.clear();
            boundary.emplace_back(I0, J0);
            if (is_internal(level, i, j - 1)) boundary.emplace_back(I0 + half, J0);
            boundary.emplace_back(I0 + s, J0);
            if (is_internal(level, i + 1, j)) boundary.emplace_back(I0 + s, J0 + half);
            boundary.emplace_back(I0 + s, J0 + s);
            if (is_internal(level, i, j + 1)) boundary.emplace_back(I0 + half, J0 + s);
            boundary.emplace_back(I0, J0 + s);
            if (is_internal(level, i - 1, j)) boundary.emplace_back(I0, J0 + half);

            const std::size_t m = boundary.size();
            std::array<bool, 8> in{};
            for (std::size_t q = 0; q < m; ++q) in[q] = value(boundary[q].first, boundary[q].second) < 0.0;
            ids.clear();
            where.clear();
            for (std::size_t q = 0; q < m; ++q) {
                const std::size_t r = (q + 1) % m;
                if (in[q] != in[r]) where.push_back(q);
            }
            if (where.empty()) continue;
            if (where.size() > 2 && level < levels_) {
                ambiguous.push_back(k);
                continue;
            }
            for (std::size_t q : where) {
                const std::size_t r = (q + 1) % m;
                ids.push_back(crossing(boundary[q].first, boundary[q].second, boundary[r].first, boundary[r].second));
            }
            if (ids.size() == 2) {
                segments_.emplace_back(ids[0], ids[1]);
                continue;
            }
            // several crossings at finest depth: decide by the centre sign
            ++unresolved;
            const Complex c = point(I0, J0) + Complex{0.5 * s * hf_, 0.5 * s * hf_};
            const bool center_in = p_.log_abs(c) < 0.0;
            const std::size_t cnt = ids.size();
            for (std::size_t q = 0; q < cnt; ++q) {
                // the arc after crossing q starts at boundary vertex where[q] + 1
                const bool arc_in = in[(where[q] + 1) % m];
                if (arc_in != center_in) segments_.emplace_back(ids[q], ids[(q + 1) % cnt]);
            }
        }
        return unresolved;
    }

    void chain(BoxExtraction& out) const {
        const std::size_t nc = crossing_points_.size();
        std::vector<std::array<int, 2>> adj(nc, {-1, -1});
        for (std::size_t s = 0; s < segments_.size(); ++s) {
            for (int end : {segments_[s].first, segments_[s].second}) {
                auto& slot = adj[static_cast<std::size_t>(end)];
                (slot[0] < 0 ? slot[0] : slot[1]) = static_cast<int>(s);
            }
        }
        std::vector<char> used(segments_.size(), 0);
        auto other = [&](int seg, int c) {
            const auto& sg = segments_[static_cast<std::size_t>(seg)];
            return sg.first == c ? sg.second : sg.first;
        };
        auto next_seg = [&](int c, int seg) {
            const auto& slot = adj[static_cast<std::size_t>(c)];
            return slot[0] == seg ? slot[1] : slot[0];
        };
        // open chains start at crossings with a single segment
        for (std::size_t c = 0; c < nc; ++c) {
            if (adj[c][0] < 0 || adj[c][1] >= 0 || used[static_cast<std::size_t>(adj[c][0])]) continue;
            int cur = static_cast<int>(c), seg = adj[c][0];
            while (seg >= 0 && !used[static_cast<std::size_t>(seg)]) {
                used[static_cast<std::size_t>(seg)] = 1;
                cur = other(seg, cur);
                seg = next_seg(cur, seg);
            }
            ++out.open_chains;
        }
        for (std::size_t s0 = 0; s0 < segments_.size(); ++s0) {
            if (used[s0]) continue;
            std::vector<Complex> loop;
            int seg = static_cast<int>(s0);
            int cur = segments_[s0].first;
            while (seg >= 0 && !used[static_cast<std::size_t>(seg)]) {
                used[static_cast<std::size_t>(seg)] = 1;
                const Complex pt = crossing_points_[static_cast<std::size_t>(cur)];
                if (loop.empty() || loop.back() != pt) loop.push_back(pt);
                cur = other(seg, cur);
                seg = next_seg(cur, seg);
            }
            while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
            out.loops.push_back(std::move(loop));
        }
    }

    const ComplexPolynomial& p_;
    Complex origin_;
    int initial_;
    int levels_;
    double tol_;
    std::vector<RootSeed> seeds_;
    std::int64_t finest_ = 0;
    double hf_ = 0.0;

    std::unordered_map<Key, double> values_;
    std::unordered_set<Key> leaves_;
    std::unordered_set<Key> internal_;
    struct PairHash {
        std::size_t operator()(const std::pair<Key, Key>& k) const {
            return std::hash<Key>{}(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
        }
    };
    std::unordered_map<std::pair<Key, Key>, int, PairHash> crossing_ids_;
    std::vector<Complex> crossing_points_;
    std::vector<std::pair<int, int>> segments_;
};

/// Joins loops that share a vertex exactly (level sets through a critical
/// point, e.g. the figure eight of |z^2 - 1| = 1) into one traversal.
inline void merge_touching(std::vector<std::vector<Complex>>& loops) {
    using Point = std::pair<double, double>;
    std::map<Point, std::size_t> owner;
    bool any = false;
    for (std::size_t l = 0; l < loops.size() && !any; ++l) {
        for (const auto& v : loops[l]) {
            auto [it, fresh] = owner.emplace(Point{v.real(), v.imag()}, l);
            if (!fresh && it->second != l) {
                any = true;
                break;
            }
        }
    }
    if (!any) return;
    std::vector<std::vector<Complex>> pending = std::move(loops);
    loops.clear();
    while (!pending.empty()) {
        std::vector<Complex> current = std::move(pending.front());
        pending.erase(pending.begin());
        for (bool grew = true; grew;) {
            grew = false;
            std::map<Point, std::size_t> here;
            for (std::size_t i = 0; i < current.size(); ++i) here.emplace(Point{current[i].real(), current[i].imag()}, i);
            for (std::size_t o = 0; o < pending.size() && !grew; ++o) {
                for (std::size_t k = 0; k < pending[o].size(); ++k) {
                    auto it = here.find(Point{pending[o][k].real(), pending[o][k].imag()});
                    if (it == here.end()) continue;
                    std::rotate(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(it->second), current.end());
                    auto other = std::move(pending[o]);
                    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(o));
                    std::rotate(other.begin(), other.begin() + static_cast<std::ptrdiff_t>(k), other.end());
                    current.insert(current.end(), other.begin(), other.end());
                    grew = true;
                    break;
                }
            }
        }
        loops.push_back(std::move(current));
    }
}

/// Newton along the gradient of log|p| from z0 onto |p| = 1.
inline std::optional<Complex> project_to_level(const ComplexPolynomial& p, Complex z0, double max_move,
                                               double tol) {
    Complex z = z0;
    for (int it = 0; it < 30; ++it) {
        const auto jet = p.jet(z);
        if (jet.value == Complex{0.0, 0.0}) return std::nullopt;
        const double g = jet.log_abs();
        if (!std::isfinite(g)) return std::nullopt;
        if (std::fabs(std::expm1(g)) <= tol) {
            if (std::abs(z - z0) > max_move) return std::nullopt;
            return z;
        }
        const Complex f1 = jet.first / jet.value;
        const double nf = std::norm(f1);
        if (!(nf > 0.0) || !std::isfinite(nf)) return std::nullopt;
        z -= g * std::conj(f1) / nf;
        if (std::abs(z - z0) > 2.0 * max_move) return std::nullopt;
    }
    return std::nullopt;
}

/// Inserts projected midpoints until every segment gains less than rel_tol of
/// its chord when split, on two successive levels (one level is fooled by
/// S-shaped arcs whose midpoint sits on the chord). Returns whether that
/// happened within the budget.
inline bool refine_loop(const ComplexPolynomial& p, std::vector<Complex>& loop, double rel_tol, double vertex_tol,
                        int max_passes = 24) {
    if (loop.size() < 3) return false;
    enum : char { kOpen, kCandidate, kSettled };
    std::vector<char> state(loop.size(), kOpen);
    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<Complex> next;
        std::vector<char> next_state;
        next.reserve(2 * loop.size());
        next_state.reserve(2 * loop.size());
        bool any_open = false;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Complex a = loop[i], b = loop[(i + 1) % loop.size()];
            next.push_back(a);
            if (state[i] == kSettled) {
                next_state.push_back(kSettled);
                continue;
            }
            const double chord = std::abs(b - a);
            const auto m = chord == 0.0 ? std::nullopt : project_to_level(p, 0.5 * (a + b), 0.5 * chord, vertex_tol);
            if (!m) {
                next_state.push_back(kSettled);
                continue;
            }
            const double gain = std::abs(*m - a) + std::abs(b - *m) - chord;
            char child = kOpen;
            if (gain <= rel_tol * chord) child = state[i] == kCandidate ? kSettled : kCandidate;
            any_open = any_open || child != kSettled;
            next.push_back(*m);
            next_state.push_back(child);
            next_state.push_back(child);
        }
        loop = std::move(next);
        state = std::move(next_state);
        if (!any_open) return true;
    }
    return false;
}

inline double root_radius_guess(const ComplexPolynomial& p, Complex zeta) {
    const Complex d = p.evaluate(zeta, 1);
    const double a = std::abs(d);
    if (a > 0.0 && std::isfinite(a)) return 1.0 / a;
    return 1e-3 * std::max(1.0, std::abs(zeta));
}

/// Distance from a root to |p| = 1 along the positive real direction.
inline double root_component_radius(const ComplexPolynomial& p, Complex zeta) {
    double hi = std::max(root_radius_guess(p, zeta), 1e-300);
    double lo = 0.0;
    for (int it = 0; it < 2000 && p.log_abs(zeta + hi) < 0.0; ++it) {
        lo = hi;
        hi *= 2.0;
    }
    if (lo == 0.0) {
        for (int it = 0; it < 2000 && hi > 1e-300; ++it) {
            const double half = 0.5 * hi;
            if (p.log_abs(zeta + half) < 0.0) {
                lo = half;
                break;
            }
            hi = half;
        }
    }
    for (int it = 0; it < 80 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p.log_abs(zeta + mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

inline std::vector<RootSeed> seeds_for(const ComplexPolynomial& p, std::span<const Complex> roots,
                                       double finest) {
    std::vector<RootSeed> seeds;
    for (const auto& r : roots) {
        const double rho = root_radius_guess(p, r);
        if (rho >= 4.0 * finest) seeds.push_back({r, 0.5 * rho});
    }
    return seeds;
}

inline constexpr int kLocalInitialCells = 8;
inline constexpr int kLocalLevels = 14;

}  // namespace detail

/// Marching squares restricted to the square of half-width `half_width`
/// around `center`. Loops leaving the window are counted in open_chains and
/// not returned.
inline BoxExtraction extract_in_box(const ComplexPolynomial& p, Complex center, double half_width,
                                    const GridConfig& cfg, std::span<const Complex> seed_roots = {}) {
    cfg.validate();
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidArgument("half_width must be positive");
    const int levels = std::max(1, cfg.max_depth - cfg.initial_depth());
    const double finest = 2.0 * half_width / static_cast<double>(std::int64_t{cfg.initial_cells_per_axis} << levels);
    std::vector<Complex> inside;
    for (const auto& r : seed_roots) {
        if (std::fabs(r.real() - center.real()) < half_width && std::fabs(r.imag() - center.imag()) < half_width)
            inside.push_back(r);
    }
    detail::QuadtreeContour q(p, center - Complex{half_width, half_width}, 2.0 * half_width,
                              cfg.initial_cells_per_axis, levels, cfg.vertex_tolerance,
                              detail::seeds_for(p, inside, finest));
    return q.run();
}

namespace detail {

inline GridConfig local_config(const GridConfig& cfg) {
    GridConfig local = cfg;
    local.initial_cells_per_axis = kLocalInitialCells;
    local.max_depth = 3 + kLocalLevels;
    return local;
}

/// Closed loop around `zeta` found by zooming in, or a circle when the
/// component is below double resolution.
struct LocalComponent {
    std::vector<Complex> loop;
    bool micro = false;
    double radius = 0.0;
};

inline std::optional<LocalComponent> local_component(const ComplexPolynomial& p, Complex zeta,
                                                     std::span<const Complex> roots, const GridConfig& cfg) {
    const double floor = 1e-9 * std::max(1.0, std::abs(zeta));
    const double r = root_component_radius(p, zeta);
    if (r < floor) {
        // p(zeta + w) ~ p'(zeta) w at this scale
        const double rho = root_radius_guess(p, zeta);
        if (!(rho < floor)) return std::nullopt;
        constexpr int kSides = 64;
        LocalComponent out;
        out.micro = true;
        out.radius = rho;
        out.loop.reserve(kSides);
        for (int k = 0; k < kSides; ++k) out.loop.push_back(zeta + std::polar(rho, 2.0 * std::numbers::pi * k / kSides));
        return out;
    }
    const GridConfig local = local_config(cfg);
    double w = 3.0 * r;
    for (int attempt = 0; attempt < 5; ++attempt, w *= 4.0) {
        auto box = extract_in_box(p, zeta, w, local, roots);
        for (auto& loop : box.loops) {
            if (loop.size() >= 3 && point_in_polygon(loop, zeta)) return LocalComponent{std::move(loop), false};
        }
    }
    return std::nullopt;
}

struct Bounds {
    double x0, x1, y0, y1;
    bool contains(Complex z) const { return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1; }
};

inline Bounds bounds_of(std::span<const Complex> loop) {
    Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& v : loop) {
        b.x0 = std::min(b.x0, v.real());
        b.x1 = std::max(b.x1, v.real());
        b.y0 = std::min(b.y0, v.imag());
        b.y1 = std::max(b.y1, v.imag());
    }
    return b;
}

}  // namespace detail

/// Extracts {|p| = 1} over [-R, R]^2 and checks that every root sits inside
/// exactly one loop; roots left outside are resolved by zooming in on them.
/// Anything that still does not add up is counted in unresolved_cells.
inline LevelSetCurve extract_lemniscate(const ComplexPolynomial& p, const GridConfig& cfg,
                                        std::span<const Complex> known_roots = {}) {
    cfg.validate();
    if (p.degree() < 1) throw InvalidArgument("degree must be at least 1");
    const double R = bounding_radius(p);
    const double half = 1.01 * R;
    std::vector<Complex> roots;
    if (known_roots.size() == static_cast<std::size_t>(p.degree())) {
        roots.assign(known_roots.begin(), known_roots.end());
    } else {
        roots = lemni::roots(p);
    }
    auto box = extract_in_box(p, Complex{0.0, 0.0}, half, cfg, roots);

    LevelSetCurve curve;
    curve.bounding_radius = R;
    curve.unresolved_cells = box.unresolved + box.open_chains;
    std::vector<std::vector<Complex>> loops;
    for (auto& l : box.loops) {
        if (l.size() >= 3) loops.push_back(std::move(l));
    }
    detail::merge_touching(loops);
    std::vector<char> micro(loops.size(), 0);
    std::vector<detail::Bounds> bounds;
    for (const auto& l : loops) bounds.push_back(detail::bounds_of(l));
    std::vector<int> enclosed(loops.size(), 0);

    std::vector<double> micro_radius(loops.size(), 0.0);
    std::vector<Complex> micro_center(loops.size());
    auto owners = [&](Complex z) {
        std::vector<std::size_t> hit;
        for (std::size_t l = 0; l < loops.size(); ++l) {
            const bool in = micro[l] ? std::abs(z - micro_center[l]) < micro_radius[l]
                                     : bounds[l].contains(z) && point_in_polygon(loops[l], z);
            if (in) hit.push_back(l);
        }
        return hit;
    };
    for (const auto& r : roots) {
        auto hit = owners(r);
        if (hit.empty()) {
            auto local = detail::local_component(p, r, roots, cfg);
            if (!local) {
                ++curve.unresolved_cells;
                continue;
            }
            loops.push_back(std::move(local->loop));
            micro.push_back(local->micro ? 1 : 0);
            micro_radius.push_back(local->radius);
            micro_center.push_back(r);
            bounds.push_back(detail::bounds_of(loops.back()));
            enclosed.push_back(0);
            hit = owners(r);
            if (hit.empty()) {
                ++curve.unresolved_cells;
                continue;
            }
        }
        if (hit.size() > 1) ++curve.unresolved_cells;
        ++enclosed[hit.front()];
    }
    for (int e : enclosed) {
        if (e == 0) ++curve.unresolved_cells;
    }

    const bool refine = cfg.length_refine_tolerance < 1.0;
    for (std::size_t l = 0; l < loops.size(); ++l) {
        if (refine && !micro[l]) {
            if (!detail::refine_loop(p, loops[l], cfg.length_refine_tolerance, cfg.vertex_tolerance))
                curve.length_converged = false;
        }
        curve.per_component_length.push_back(micro[l] ? 2.0 * std::numbers::pi * micro_radius[l]
                                                      : polyline_length(loops[l]));
        curve.total_length += curve.per_component_length.back();
        curve.micro_components += micro[l];
    }
    curve.components = std::move(loops);
    curve.roots_enclosed = std::move(enclosed);
    curve.micro = std::move(micro);
    curve.b0 = static_cast<int>(curve.components.size());
    return curve;
}

/// Sum of polyline segment lengths.
inline double arc_length(const LevelSetCurve& curve) {
    double s = 0.0;
    for (const auto& c : curve.components) s += polyline_length(c);
    return s;
}

/// Component count only; skips the length refinement.
inline int betti0(const ComplexPolynomial& p, GridConfig cfg) {
    cfg.length_refine_tolerance = 1.0;
    return extract_lemniscate(p, cfg).b0;
}

/// Index of the component whose polyline surrounds z.
inline std::optional<std::size_t> enclosing_component(const LevelSetCurve& curve, Complex z) {
    for (std::size_t l = 0; l < curve.components.size(); ++l) {
        if (point_in_polygon(curve.components[l], z)) return l;
    }
    return std::nullopt;
}

/// Local certificate for a small component around a root:
///   |p'(zeta)| > 2 n^{1+alpha},  |p^(k)(zeta)| < n^{k+1/2+beta} for k = 2..n.
/// When it holds, |p| > 1 on |z - zeta| = n^{-1-alpha}.
///
/// The degree precondition checks the finite sum
///   n^{beta+1/2-2 alpha} sum_{k=2}^n n^{-alpha(k-2)} / k! < 1
/// that the exponential bound dominates, so small n with an empty or short
/// sum are admitted.
inline bool taylor_certificate(const ComplexPolynomial& p, Complex zeta, double alpha = 0.4, double beta = 0.05) {
    if (!(beta > 0.0 && beta < alpha && alpha < 0.5 && alpha - beta > 0.5 - alpha))
        throw InvalidArgument("need 0 < beta < alpha < 1/2 and alpha - beta > 1/2 - alpha");
    const int n = p.degree();
    if (n < 1) throw InvalidArgument("degree must be at least 1");
    const double ln = std::log(static_cast<double>(n));
    double tail = 0.0;
    for (int k = 2; k <= n; ++k) {
        const double term = std::exp(-alpha * (k - 2) * ln - std::lgamma(k + 1.0));
        tail += term;
        if (term < 1e-18 * tail) break;
    }
    if (!(std::exp((beta + 0.5 - 2.0 * alpha) * ln) * tail < 1.0))
        throw InvalidArgument("degree too small for the certificate parameters");
    const double lr = p.log_abs(zeta);
    if (!(lr <= detail::log_residual_bound(p, zeta))) throw InvalidArgument("zeta is not a root of p");

    // Taylor coefficients d_k = p^(k)(zeta)/k! by repeated synthetic division
    std::vector<Complex> d(p.coefficients().begin(), p.coefficients().end());
    for (int k = 0; k < n; ++k) {
        for (int j = n - 1; j >= k; --j) d[static_cast<std::size_t>(j)] += zeta * d[static_cast<std::size_t>(j + 1)];
    }
    const double d1 = std::abs(d[1]);
    if (!(std::log(d1) > std::log(2.0) + (1.0 + alpha) * ln)) return false;
    for (int k = 2; k <= n; ++k) {
        const double a = std::abs(d[static_cast<std::size_t>(k)]);
        if (a == 0.0) continue;
        if (!(std::log(a) + std::lgamma(k + 1.0) < (k + 0.5 + beta) * ln)) return false;
    }
    return true;
}

enum class GiantStatus { no, yes, indeterminate };

inline const char* to_string(GiantStatus s) {
    switch (s) {
        case GiantStatus::no: return "false";
        case GiantStatus::yes: return "true";
        case GiantStatus::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

/// Certifies sup_{|z|=r} |p| < 1 (yes) or a sample with |p| >= 1 (no).
/// Sampling density follows the Lipschitz bound sum k |c_k| r^{k-1}.
inline GiantStatus giant_event(const ComplexPolynomial& p, double r, int max_samples = 1 << 20) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r must lie in (0, 1)");
    const int n = p.degree();
    double lip = 0.0;
    for (int k = 1; k <= n; ++k) lip += k * std::abs(p.coefficient(k)) * std::pow(r, k - 1);
    int m = 256;
    for (;;) {
        double top = 0.0;
        for (int j = 0; j < m; ++j) {
            const double v = std::abs(p(std::polar(r, 2.0 * std::numbers::pi * j / m)));
            if (!std::isfinite(v)) throw NumericError("nonfinite polynomial evaluation");
            top = std::max(top, v);
            if (top >= 1.0) return GiantStatus::no;
        }
        const double slack = lip * std::numbers::pi * r / m;
        if (top + slack < 1.0) return GiantStatus::yes;
        if (m >= max_samples) return GiantStatus::indeterminate;
        const double need = 1.25 * lip * std::numbers::pi * r / (1.0 - top);
        m = need >= static_cast<double>(max_samples) ? max_samples : std::max(2 * m, static_cast<int>(need) + 1);
    }
}

}  // namespace lemni
