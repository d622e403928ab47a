// Mesh families on the unit square: structured triangles, Lloyd-relaxed
//        clipped Voronoi, randomly distorted and agglomerated polygons, a
//        triangle with recursively halved edges, and a grid cut by a rotated
//        slender rectangular hole.
#pragma once

#include "polydg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>
#include <vector>

namespace polydg {

/// Deterministic stream of uniforms and integers, stable across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on {lo, ..., hi}.
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi)
    {
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t r;
        do r = engine_();
        while (r >= limit);
        return lo + r % span;
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Structured triangles

inline PolyMesh gen_triangular(int n)
{
    if (n < 1) throw MeshError("gen_triangular: n must be >= 1");
    std::vector<Point2> verts;
    verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
    std::vector<std::vector<Index>> loops;
    loops.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            loops.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            loops.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return build_connectivity(std::move(verts), loops);
}

// ---------------------------------------------------------------------------
// Clipped Voronoi diagrams

/// Voronoi cells of `seeds` clipped to the unit square, as CCW point loops.
inline std::vector<std::vector<Point2>> voronoi_cells(const std::vector<Point2>& seeds)
{
    const std::size_t n = seeds.size();
    const int g = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
    const double cs = 1.0 / g;
    auto bucket_of = [&](Point2 p) {
        const int bx = std::clamp(static_cast<int>(std::floor(p.x * g)), 0, g - 1);
        const int by = std::clamp(static_cast<int>(std::floor(p.y * g)), 0, g - 1);
        return std::array<int, 2>{bx, by};
    };
    std::vector<std::vector<Index>> buckets(static_cast<std::size_t>(g * g));
    for (Index i = 0; i < n; ++i) {
        const auto b = bucket_of(seeds[i]);
        buckets[static_cast<std::size_t>(b[1] * g + b[0])].push_back(i);
    }

    std::vector<std::vector<Point2>> cells(n);
    for (Index i = 0; i < n; ++i) {
        const Point2 s = seeds[i];
        std::vector<Point2> poly{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
        const auto b = bucket_of(s);
        for (int r = 0; r <= g; ++r) {
            for (int by = b[1] - r; by <= b[1] + r; ++by) {
                if (by < 0 || by >= g) continue;
                for (int bx = b[0] - r; bx <= b[0] + r; ++bx) {
                    if (bx < 0 || bx >= g) continue;
                    if (std::max(std::abs(bx - b[0]), std::abs(by - b[1])) != r) continue;
                    for (Index j : buckets[static_cast<std::size_t>(by * g + bx)]) {
                        if (j == i) continue;
                        const Point2 t = seeds[j];
                        poly = clip_halfplane(poly, 0.5 * (s + t), t - s);
                    }
                }
            }
            double reach = 0.0;
            for (const Point2& p : poly) reach = std::max(reach, distance(p, s));
            // seeds beyond ring r are at least r * cs away
            if (r * cs >= 2.0 * reach) break;
        }
        cells[i] = std::move(poly);
    }
    return cells;
}

/// Lloyd relaxation: each seed replaced by its clipped cell centroid.
inline std::vector<Point2> lloyd_relax(std::vector<Point2> seeds, int iterations)
{
    for (int it = 0; it < iterations; ++it) {
        const auto cells = voronoi_cells(seeds);
        for (std::size_t i = 0; i < seeds.size(); ++i)
            if (cells[i].size() >= 3 && signed_area(cells[i]) > 0.0) seeds[i] = centroid(cells[i]);
    }
    return seeds;
}

namespace detail {

// Weld nearly coincident points; returns the cluster id of each input point
// and fills `out` with one representative per cluster (first occurrence).
inline std::vector<Index> weld_points(const std::vector<Point2>& pts, double tol, std::vector<Point2>& out)
{
    const double cell = 4.0 * tol;
    auto key = [cell](long long i, long long j) { return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j & 0xffffffff); };
    std::unordered_map<std::uint64_t, std::vector<Index>> grid;
    std::vector<Index> parent(pts.size());
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (Index p = 0; p < pts.size(); ++p) {
        const auto ci = static_cast<long long>(std::floor(pts[p].x / cell));
        const auto cj = static_cast<long long>(std::floor(pts[p].y / cell));
        for (long long di = -1; di <= 1; ++di)
            for (long long dj = -1; dj <= 1; ++dj) {
                auto it = grid.find(key(ci + di, cj + dj));
                if (it == grid.end()) continue;
                for (Index q : it->second)
                    if (distance(pts[p], pts[q]) <= tol) {
                        const Index a = find(p), b = find(q);
                        if (a != b) parent[std::max(a, b)] = std::min(a, b);
                    }
            }
        grid[key(ci, cj)].push_back(p);
    }
    std::vector<Index> id(pts.size(), kNoElement);
    std::vector<Index> root_id(pts.size(), kNoElement);
    for (Index p = 0; p < pts.size(); ++p) {
        const Index r = find(p);
        if (root_id[r] == kNoElement) {
            root_id[r] = out.size();
            out.push_back(pts[r]);
        }
        id[p] = root_id[r];
    }
    return id;
}

// Turn independent point loops into a shared-vertex mesh. Returns false if a
// loop collapses below three distinct vertices or `min_area`.
inline bool loops_to_mesh(const std::vector<std::vector<Point2>>& cells, double min_area, PolyMesh& out)
{
    std::vector<Point2> all;
    for (const auto& c : cells) {
        if (c.size() < 3 || signed_area(c) < min_area) return false;
        all.insert(all.end(), c.begin(), c.end());
    }
    std::vector<Point2> verts;
    const auto id = weld_points(all, 1e-10, verts);
    std::vector<std::vector<Index>> loops;
    std::size_t cursor = 0;
    for (const auto& c : cells) {
        std::vector<Index> loop;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const Index v = id[cursor + i];
            if (loop.empty() || loop.back() != v) loop.push_back(v);
        }
        cursor += c.size();
        while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
        if (loop.size() < 3) return false;
        loops.push_back(std::move(loop));
    }
    out = build_connectivity(std::move(verts), loops);
    return true;
}

} // namespace detail

inline constexpr double kVoronoiMinArea = 1e-12;

/// Voronoi mesh from explicit seeds after `lloyd_iters` relaxation steps.
inline PolyMesh voronoi_from_seeds(std::vector<Point2> seeds, int lloyd_iters)
{
    seeds = lloyd_relax(std::move(seeds), lloyd_iters);
    PolyMesh mesh;
    if (!detail::loops_to_mesh(voronoi_cells(seeds), kVoronoiMinArea, mesh))
        throw MeshError("degenerate Voronoi cell");
    return mesh;
}

inline constexpr int kDefaultLloydIterations = 50;

/// Regular polygonal mesh: n_el random seeds relaxed by Lloyd iterations.
inline PolyMesh gen_voronoi_regular(int n_el, int lloyd_iters = kDefaultLloydIterations, std::uint64_t seed = 1)
{
    if (n_el < 2) throw MeshError("gen_voronoi_regular: n_el must be >= 2");
    for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
        Rng rng(seed + 0x9e3779b97f4a7c15ULL * attempt);
        std::vector<Point2> seeds(static_cast<std::size_t>(n_el));
        for (auto& s : seeds) {
            s.x = rng.uniform();
            s.y = rng.uniform();
        }
        seeds = lloyd_relax(std::move(seeds), lloyd_iters);
        PolyMesh mesh;
        try {
            if (detail::loops_to_mesh(voronoi_cells(seeds), kVoronoiMinArea, mesh)) return mesh;
        } catch (const MeshError&) {
            // fall through to a perturbed seed
        }
    }
    throw MeshError("gen_voronoi_regular: degenerate Voronoi cell after 10 attempts");
}

// ---------------------------------------------------------------------------
// Distorted polygons

/// Minimum relative spacing between inserted points and edge endpoints.
inline constexpr double kInsertionSpacing = 0.02;

/// Random collinear points inserted on interior edges of a Voronoi mesh.
inline PolyMesh distort(const PolyMesh& base, int insertions_per_edge, std::uint64_t seed)
{
    if (insertions_per_edge < 0) throw MeshError("distort: negative insertion count");
    Rng rng(seed ^ 0xd1b54a32d192ed03ULL);
    std::vector<Point2> verts = base.vertices;
    std::vector<std::vector<Index>> loops;
    for (const auto& e : base.elements) loops.push_back(e.vertices);

    // inserted vertex ids per face, ordered from face.vertices[0] to [1]
    std::vector<std::vector<Index>> inserted(base.faces.size());
    for (Index f = 0; f < base.faces.size(); ++f) {
        const Face& face = base.faces[f];
        if (!face.is_interior()) continue;
        const auto count = static_cast<int>(rng.integer(0, static_cast<std::uint64_t>(insertions_per_edge)));
        if (count == 0) continue;
        std::vector<double> ts;
        for (int attempt = 0; attempt < 1000 && static_cast<int>(ts.size()) < count; ++attempt) {
            const double t = rng.uniform();
            bool ok = t >= kInsertionSpacing && t <= 1.0 - kInsertionSpacing;
            for (double u : ts) ok = ok && std::abs(u - t) >= kInsertionSpacing;
            if (ok) ts.push_back(t);
        }
        std::sort(ts.begin(), ts.end());
        const Point2 a = verts[face.vertices[0]];
        const Point2 b = verts[face.vertices[1]];
        for (double t : ts) {
            inserted[f].push_back(verts.size());
            verts.push_back(a + t * (b - a));
        }
    }

    for (Index k = 0; k < base.n_elements(); ++k) {
        const auto& old = base.elements[k].vertices;
        std::vector<Index> loop;
        for (std::size_t i = 0; i < old.size(); ++i) {
            loop.push_back(old[i]);
            const Index f = base.element_faces[k][i];
            const auto& ins = inserted[f];
            if (base.faces[f].plus == k)
                loop.insert(loop.end(), ins.begin(), ins.end());
            else
                loop.insert(loop.end(), ins.rbegin(), ins.rend());
        }
        loops[k] = std::move(loop);
    }
    return build_connectivity(std::move(verts), loops);
}

inline PolyMesh gen_distorted(int n_base, int insertions_per_edge, std::uint64_t seed = 1)
{
    if (n_base < 2) throw MeshError("gen_distorted: n_base must be >= 2");
    return distort(gen_voronoi_regular(n_base, kDefaultLloydIterations, seed), insertions_per_edge, seed);
}

// ---------------------------------------------------------------------------
// Agglomerated polygons

/// Greedy seeded region growing over the dual graph. The smallest group grows
/// first, taking the unassigned neighbour that shares the most faces with it.
inline std::vector<Index> grow_regions(const PolyMesh& fine, int n_groups, Rng& rng)
{
    const Index n = fine.n_elements();
    std::vector<Index> group(n, kNoElement);
    std::vector<double> area(static_cast<std::size_t>(n_groups), 0.0);
    std::vector<Index> seeds;
    while (seeds.size() < static_cast<std::size_t>(n_groups)) {
        const Index c = rng.integer(0, n - 1);
        if (group[c] != kNoElement) continue;
        group[c] = seeds.size();
        area[seeds.size()] = fine.elements[c].area;
        seeds.push_back(c);
    }
    std::vector<std::vector<Index>> members(static_cast<std::size_t>(n_groups));
    for (Index g = 0; g < seeds.size(); ++g) members[g].push_back(seeds[g]);

    auto seed_center = [&](Index g) { return centroid(fine.element_points(seeds[g])); };
    std::vector<Point2> centers;
    for (Index g = 0; g < seeds.size(); ++g) centers.push_back(seed_center(g));
    std::vector<Point2> cell_center(n);
    for (Index k = 0; k < n; ++k) cell_center[k] = centroid(fine.element_points(k));

    std::vector<char> exhausted(static_cast<std::size_t>(n_groups), 0);
    Index assigned = seeds.size();
    while (assigned < n) {
        Index g = kNoElement;
        for (Index c = 0; c < static_cast<Index>(n_groups); ++c)
            if (!exhausted[c] && (g == kNoElement || area[c] < area[g])) g = c;
        if (g == kNoElement) throw MeshError("region growing stalled");
        std::map<Index, int> shared;
        for (Index k : members[g])
            for (Index f : fine.element_faces[k]) {
                const Index o = fine.other_side(fine.faces[f], k);
                if (o != kNoElement && group[o] == kNoElement) ++shared[o];
            }
        if (shared.empty()) {
            exhausted[g] = 1;
            continue;
        }
        Index best = kNoElement;
        for (const auto& [cell, cnt] : shared) {
            if (best == kNoElement || cnt > shared[best] ||
                (cnt == shared[best] && distance(cell_center[cell], centers[g]) < distance(cell_center[best], centers[g])))
                best = cell;
        }
        group[best] = g;
        members[g].push_back(best);
        area[g] += fine.elements[best].area;
        ++assigned;
    }
    return group;
}

inline PolyMesh gen_agglomerated(int n_fine, int n_coarse, std::uint64_t seed = 1)
{
    if (n_coarse < 1 || n_coarse >= n_fine) throw MeshError("gen_agglomerated: need 1 <= n_coarse < n_fine");
    const PolyMesh fine = gen_voronoi_regular(n_fine, kDefaultLloydIterations, seed);
    for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
        Rng rng(seed * 0x2545f4914f6cdd1dULL + attempt + 1);
        try {
            return merge_elements(fine, grow_regions(fine, n_coarse, rng));
        } catch (const MeshError&) {
            // re-seed the growth
        }
    }
    throw MeshError("gen_agglomerated: no valid agglomeration after 10 attempts");
}

// ---------------------------------------------------------------------------
// Degenerating edges

namespace detail {

inline void halve(Point2 a, Point2 b, int level, std::vector<Point2>& out)
{
    if (level == 0) return;
    const Point2 m = 0.5 * (a + b);
    halve(a, m, level - 1, out);
    out.push_back(m);
    halve(m, b, level - 1, out);
}

} // namespace detail

/// Element of `mesh` whose centroid is closest to (0.5, 0.5), lowest index on ties.
inline Index center_element(const PolyMesh& mesh)
{
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const double d = distance(centroid(mesh.element_points(k)), Point2{0.5, 0.5});
        if (d < best_d - 1e-14) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

/// Uniform triangular mesh whose central triangle has every edge halved
/// `level` times; the new points are shared with the neighbours.
inline PolyMesh gen_degenerate_edges(int level, int n_base = 5)
{
    if (level < 0) throw MeshError("gen_degenerate_edges: negative level");
    const PolyMesh base = gen_triangular(n_base);
    const Index c = center_element(base);
    std::vector<Point2> verts = base.vertices;
    std::vector<std::vector<Index>> loops;
    for (const auto& e : base.elements) loops.push_back(e.vertices);

    std::vector<Index> center_loop;
    const auto& cv = base.elements[c].vertices;
    for (std::size_t i = 0; i < cv.size(); ++i) {
        const Index a = cv[i];
        const Index b = cv[(i + 1) % cv.size()];
        std::vector<Point2> pts;
        detail::halve(verts[a], verts[b], level, pts);
        std::vector<Index> ids;
        for (const Point2& p : pts) {
            ids.push_back(verts.size());
            verts.push_back(p);
        }
        center_loop.push_back(a);
        center_loop.insert(center_loop.end(), ids.begin(), ids.end());
        const Face& f = base.faces[base.element_faces[c][i]];
        const Index nb = base.other_side(f, c);
        if (nb == kNoElement) continue;
        auto& nl = loops[nb];
        // neighbour traverses b -> a
        for (std::size_t j = 0; j < nl.size(); ++j) {
            if (nl[j] == b && nl[(j + 1) % nl.size()] == a) {
                nl.insert(nl.begin() + static_cast<std::ptrdiff_t>(j + 1), ids.rbegin(), ids.rend());
                break;
            }
        }
    }
    loops[c] = std::move(center_loop);
    return build_connectivity(std::move(verts), loops);
}

// ---------------------------------------------------------------------------
// Rotating slender hole

inline constexpr double kDefaultHoleWidth = 0.4;
inline constexpr double kDefaultHoleHeight = 0.06;
inline constexpr double kFragmentMinArea = 1e-14;

/// Corners (CCW) of the hole rectangle centred at (0.5, 0.5) rotated by theta degrees.
inline std::array<Point2, 4> hole_corners(double theta_deg, double width, double height)
{
    const double th = theta_deg * std::numbers::pi / 180.0;
    const Point2 u{std::cos(th), std::sin(th)};
    const Point2 v{-std::sin(th), std::cos(th)};
    const Point2 c{0.5, 0.5};
    const double a = 0.5 * width;
    const double b = 0.5 * height;
    return {c - a * u - b * v, c + a * u - b * v, c + a * u + b * v, c - a * u + b * v};
}

/// Uniform triangular mesh with a rotated rectangle removed. Triangles cut by
/// the hole become (possibly non-convex) polygons; fragments below
/// kFragmentMinArea are fused into their longest-edge neighbour.
inline PolyMesh gen_rotating_hole(double theta_deg, int base_n = 16, double hole_width = kDefaultHoleWidth,
                                  double hole_height = kDefaultHoleHeight)
{
    if (base_n < 1) throw MeshError("gen_rotating_hole: base_n must be >= 1");
    if (!(hole_width > 0.0 && hole_height > 0.0)) throw MeshError("gen_rotating_hole: hole must have positive size");
    const auto R = hole_corners(theta_deg, hole_width, hole_height);
    for (const Point2& p : R)
        if (!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0))
            throw MeshError("gen_rotating_hole: hole is not strictly inside the unit square");

    const PolyMesh base = gen_triangular(base_n);
    std::vector<Point2> verts = base.vertices;
    const double scale = 1.0 / base_n;
    static constexpr double kSnap = 1e-9;

    // Cut points per base edge, computed once on the canonical orientation.
    struct EdgeCut {
        bool hit = false;
        double t0 = 0.0, t1 = 0.0;
        Index v0 = kNoElement, v1 = kNoElement; // ids at t0 / t1 (kNoElement at 0 or 1)
    };
    std::unordered_map<std::uint64_t, EdgeCut> cuts;
    auto edge_cut = [&](Index a, Index b) -> const EdgeCut& {
        const Index lo = std::min(a, b), hi = std::max(a, b);
        auto [it, fresh] = cuts.try_emplace(detail::edge_key(lo, hi));
        if (!fresh) return it->second;
        EdgeCut& c = it->second;
        const Point2 p = verts[lo], q = verts[hi];
        if (auto iv = clip_segment_convex(p, q, R)) {
            double t0 = (*iv)[0], t1 = (*iv)[1];
            if (t1 - t0 > kSnap) {
                auto near = [](double t) { return (t > 0.0 && t < kSnap) || (t < 1.0 && t > 1.0 - kSnap); };
                if (near(t0) || near(t1)) throw MeshError("gen_rotating_hole: hole boundary passes through a mesh vertex");
                c.hit = true;
                c.t0 = t0;
                c.t1 = t1;
                if (t0 > 0.0) {
                    c.v0 = verts.size();
                    verts.push_back(p + t0 * (q - p));
                }
                if (t1 < 1.0) {
                    c.v1 = verts.size();
                    verts.push_back(p + t1 * (q - p));
                }
            }
        }
        return c;
    };
    std::array<Index, 4> corner_id{kNoElement, kNoElement, kNoElement, kNoElement};

    std::vector<std::vector<Index>> loops;
    for (Index k = 0; k < base.n_elements(); ++k) {
        const auto& tv = base.elements[k].vertices;
        const std::array<Point2, 3> T{verts[tv[0]], verts[tv[1]], verts[tv[2]]};

        // boundary pieces of T outside the hole, as directed (from, to) pairs
        std::vector<std::array<Index, 2>> pieces;
        std::vector<Index> cut_ids;
        bool any_hit = false;
        for (int e = 0; e < 3; ++e) {
            const Index p = tv[e], q = tv[(e + 1) % 3];
            const EdgeCut& c = edge_cut(p, q);
            if (!c.hit) {
                pieces.push_back({p, q});
                continue;
            }
            any_hit = true;
            const bool forward = p < q;
            const Index first = forward ? c.v0 : c.v1;  // entry into hole along p -> q
            const Index second = forward ? c.v1 : c.v0; // exit
            if (first != kNoElement) {
                pieces.push_back({p, first});
                cut_ids.push_back(first);
            }
            if (second != kNoElement) {
                pieces.push_back({second, q});
                cut_ids.push_back(second);
            }
        }

        // hole edges inside T, reversed so the fragment lies on their left
        std::vector<std::array<Index, 2>> hole_pieces;
        for (int i = 0; i < 4; ++i) {
            const Point2 a = R[static_cast<std::size_t>(i)];
            const Point2 b = R[static_cast<std::size_t>((i + 1) % 4)];
            auto iv = clip_segment_convex(a, b, T);
            if (!iv || (*iv)[1] - (*iv)[0] <= kSnap) continue;
            const double s0 = (*iv)[0], s1 = (*iv)[1];
            auto resolve = [&](double s, int corner) -> Index {
                if (s == 0.0 || s == 1.0) {
                    auto& id = corner_id[static_cast<std::size_t>(corner)];
                    if (id == kNoElement) {
                        id = verts.size();
                        verts.push_back(R[static_cast<std::size_t>(corner)]);
                    }
                    return id;
                }
                const Point2 x = a + s * (b - a);
                Index best = kNoElement;
                double best_d = kSnap * scale;
                for (Index v : cut_ids)
                    if (distance(verts[v], x) <= best_d) {
                        best_d = distance(verts[v], x);
                        best = v;
                    }
                if (best == kNoElement) throw MeshError("gen_rotating_hole: unmatched hole crossing");
                return best;
            };
            hole_pieces.push_back({resolve(s1, (i + 1) % 4), resolve(s0, i)});
        }

        if (!any_hit && hole_pieces.empty()) {
            loops.push_back(tv);
            continue;
        }
        if (pieces.empty() && hole_pieces.empty()) continue; // fully inside the hole
        pieces.insert(pieces.end(), hole_pieces.begin(), hole_pieces.end());
        std::unordered_map<Index, Index> next;
        for (const auto& pc : pieces)
            if (!next.emplace(pc[0], pc[1]).second) throw MeshError("gen_rotating_hole: inconsistent cut topology");
        std::unordered_map<Index, bool> used;
        for (const auto& pc : pieces) {
            if (used[pc[0]]) continue;
            std::vector<Index> loop;
            Index v = pc[0];
            while (!used[v]) {
                used[v] = true;
                loop.push_back(v);
                auto it = next.find(v);
                if (it == next.end()) throw MeshError("gen_rotating_hole: open cut loop");
                v = it->second;
            }
            if (v != pc[0]) throw MeshError("gen_rotating_hole: cut loop does not close");
            std::vector<Point2> pts;
            for (Index id : loop) pts.push_back(verts[id]);
            if (signed_area(pts) <= 0.0) throw MeshError("gen_rotating_hole: hole lies inside a single triangle");
            loops.push_back(std::move(loop));
        }
    }

    PolyMesh cut = build_connectivity(verts, loops);
    std::vector<Index> group(cut.n_elements());
    std::iota(group.begin(), group.end(), Index{0});
    for (Index k = 0; k < cut.n_elements(); ++k) {
        if (cut.elements[k].area >= kFragmentMinArea) continue;
        Index best = kNoElement;
        double best_len = -1.0;
        for (Index f : cut.element_faces[k]) {
            const Face& face = cut.faces[f];
            const Index o = cut.other_side(face, k);
            if (o != kNoElement && face.length > best_len) {
                best_len = face.length;
                best = o;
            }
        }
        if (best == kNoElement) throw MeshError("gen_rotating_hole: isolated tiny fragment");
        group[k] = group[best];
    }
    // compact group ids
    std::vector<Index> relabel(group.size(), kNoElement);
    Index next_id = 0;
    for (Index& g : group) {
        if (relabel[g] == kNoElement) relabel[g] = next_id++;
        g = relabel[g];
    }
    return merge_elements(cut, group);
}

} // namespace polydg
