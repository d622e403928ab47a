// Polygonal meshes: elements, faces, connectivity and validation.
#pragma once

#include "polydg/geometry.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace polydg {

using Index = std::size_t;
inline constexpr Index kNoElement = std::numeric_limits<Index>::max();

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PolyElement {
    std::vector<Index> vertices; ///< CCW loop
    double diameter = 0.0;       ///< h_K, max pairwise vertex distance
    double area = 0.0;
    BoundingBox bbox{};
    std::vector<std::array<Index, 3>> sub_triangles; ///< global vertex ids, CCW
};

enum class FaceKind { interior, boundary, hole_boundary };

struct Face {
    std::array<Index, 2> vertices{}; ///< oriented CCW as seen from `plus`
    double length = 0.0;
    FaceKind kind = FaceKind::boundary;
    Index plus = kNoElement;
    Index minus = kNoElement; ///< kNoElement on boundary faces
    Point2 normal{};          ///< unit, outward from `plus`

    bool is_interior() const { return kind == FaceKind::interior; }
};

struct PolyMesh {
    std::vector<Point2> vertices;
    std::vector<PolyElement> elements;
    std::vector<Face> faces;
    std::vector<std::vector<Index>> element_faces; ///< face ids per element, in loop order
    double domain_area = 0.0;
    int n_holes = 0;

    std::size_t n_elements() const { return elements.size(); }

    std::vector<Point2> element_points(Index k) const
    {
        std::vector<Point2> pts;
        pts.reserve(elements[k].vertices.size());
        for (Index v : elements[k].vertices) pts.push_back(vertices[v]);
        return pts;
    }

    double max_diameter() const
    {
        double h = 0.0;
        for (const auto& e : elements) h = std::max(h, e.diameter);
        return h;
    }

    Index other_side(const Face& f, Index k) const { return f.plus == k ? f.minus : f.plus; }
};

/// Triangulation of a simple polygon, as index triples into `element.vertices`' global ids.
inline std::vector<std::array<Index, 3>> sub_triangulate(const PolyElement& element, std::span<const Point2> vertices)
{
    std::vector<Point2> pts;
    pts.reserve(element.vertices.size());
    for (Index v : element.vertices) pts.push_back(vertices[v]);
    std::vector<std::array<Index, 3>> out;
    try {
        for (const auto& t : ear_clip(pts))
            out.push_back({element.vertices[t[0]], element.vertices[t[1]], element.vertices[t[2]]});
    } catch (const std::runtime_error& e) {
        throw MeshError(e.what());
    }
    return out;
}

namespace detail {

inline std::uint64_t edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Number of closed cycles formed by the boundary faces.
inline int count_boundary_loops(const PolyMesh& mesh)
{
    std::unordered_map<Index, Index> next;
    for (const Face& f : mesh.faces)
        if (!f.is_interior()) next[f.vertices[0]] = f.vertices[1];
    std::unordered_map<Index, bool> seen;
    int loops = 0;
    for (const Face& f : mesh.faces) {
        if (f.is_interior() || seen[f.vertices[0]]) continue;
        ++loops;
        Index v = f.vertices[0];
        while (!seen[v]) {
            seen[v] = true;
            auto it = next.find(v);
            if (it == next.end()) break;
            v = it->second;
        }
    }
    return loops;
}

} // namespace detail

/// Build faces and per-element geometry from CCW vertex loops.
/// Throws MeshError on non-manifold edges, self-intersecting or clockwise
/// loops and zero-area elements.
inline PolyMesh build_connectivity(std::vector<Point2> vertices, const std::vector<std::vector<Index>>& loops)
{
    PolyMesh mesh;
    mesh.vertices = std::move(vertices);
    const auto& V = mesh.vertices;
    if (loops.empty()) throw MeshError("mesh has no elements");

    const BoundingBox domain_box = bounding_box(V);
    const double scale = std::max(norm(domain_box.max - domain_box.min), 1e-300);

    mesh.elements.reserve(loops.size());
    for (std::size_t k = 0; k < loops.size(); ++k) {
        const auto& loop = loops[k];
        if (loop.size() < 3) throw MeshError("element " + std::to_string(k) + " has fewer than 3 vertices");
        for (Index v : loop)
            if (v >= V.size()) throw MeshError("element " + std::to_string(k) + " references a missing vertex");
        PolyElement e;
        e.vertices = loop;
        std::vector<Point2> pts;
        for (Index v : loop) pts.push_back(V[v]);
        e.area = signed_area(pts);
        if (std::abs(e.area) <= 1e-18 * scale * scale)
            throw MeshError("element " + std::to_string(k) + " has zero area");
        if (e.area < 0.0) throw MeshError("element " + std::to_string(k) + " is not counter-clockwise");
        if (!is_simple_loop(pts)) throw MeshError("element " + std::to_string(k) + " is self-intersecting");
        e.diameter = diameter(pts);
        e.bbox = bounding_box(pts);
        e.sub_triangles = sub_triangulate(e, V);
        mesh.elements.push_back(std::move(e));
    }

    std::unordered_map<std::uint64_t, Index> face_of;
    face_of.reserve(loops.size() * 8);
    mesh.element_faces.resize(loops.size());
    for (Index k = 0; k < loops.size(); ++k) {
        const auto& loop = mesh.elements[k].vertices;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Index a = loop[i];
            const Index b = loop[(i + 1) % loop.size()];
            const auto key = detail::edge_key(a, b);
            auto [it, fresh] = face_of.try_emplace(key, mesh.faces.size());
            if (fresh) {
                Face f;
                f.vertices = {a, b};
                f.plus = k;
                const Point2 t = V[b] - V[a];
                f.length = norm(t);
                f.normal = Point2{t.y / f.length, -t.x / f.length};
                mesh.faces.push_back(f);
            } else {
                Face& f = mesh.faces[it->second];
                if (f.minus != kNoElement)
                    throw MeshError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
                if (f.vertices[0] != b || f.vertices[1] != a)
                    throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                    ") has the same orientation in two elements");
                if (f.plus == k) throw MeshError("element " + std::to_string(k) + " repeats an edge");
                f.minus = k;
            }
            mesh.element_faces[k].push_back(it->second);
        }
    }

    const double tol = 1e-12 * scale;
    auto on_box = [&](Point2 p, Point2 q) {
        return (std::abs(p.x - domain_box.min.x) <= tol && std::abs(q.x - domain_box.min.x) <= tol) ||
               (std::abs(p.x - domain_box.max.x) <= tol && std::abs(q.x - domain_box.max.x) <= tol) ||
               (std::abs(p.y - domain_box.min.y) <= tol && std::abs(q.y - domain_box.min.y) <= tol) ||
               (std::abs(p.y - domain_box.max.y) <= tol && std::abs(q.y - domain_box.max.y) <= tol);
    };
    for (Face& f : mesh.faces) {
        if (f.minus != kNoElement)
            f.kind = FaceKind::interior;
        else
            f.kind = on_box(V[f.vertices[0]], V[f.vertices[1]]) ? FaceKind::boundary : FaceKind::hole_boundary;
    }

    for (const auto& e : mesh.elements) mesh.domain_area += e.area;
    mesh.n_holes = detail::count_boundary_loops(mesh) - 1;
    return mesh;
}

/// Euler characteristic V - E + F over referenced vertices; equals 1 - n_holes
/// for a valid mesh of a connected planar domain.
inline long euler_characteristic(const PolyMesh& mesh)
{
    std::vector<char> used(mesh.vertices.size(), 0);
    for (const auto& e : mesh.elements)
        for (Index v : e.vertices) used[v] = 1;
    long nv = 0;
    for (char u : used) nv += u;
    return nv - static_cast<long>(mesh.faces.size()) + static_cast<long>(mesh.elements.size());
}

/// Fuse elements sharing a group id into single polygons. Each group must
/// have a boundary forming one simple loop; unused vertices are dropped.
inline PolyMesh merge_elements(const PolyMesh& mesh, const std::vector<Index>& group)
{
    if (group.size() != mesh.n_elements()) throw MeshError("group vector size mismatch");
    Index n_groups = 0;
    for (Index g : group) n_groups = std::max(n_groups, g + 1);

    std::vector<std::vector<std::array<Index, 2>>> edges(n_groups);
    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const auto& loop = mesh.elements[k].vertices;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Face& f = mesh.faces[mesh.element_faces[k][i]];
            const Index other = mesh.other_side(f, k);
            if (other != kNoElement && group[other] == group[k]) continue;
            edges[group[k]].push_back({loop[i], loop[(i + 1) % loop.size()]});
        }
    }

    std::vector<std::vector<Index>> loops;
    loops.reserve(n_groups);
    for (Index g = 0; g < n_groups; ++g) {
        const auto& es = edges[g];
        if (es.empty()) throw MeshError("empty group " + std::to_string(g));
        std::unordered_map<Index, Index> next;
        for (const auto& e : es)
            if (!next.emplace(e[0], e[1]).second)
                throw MeshError("group " + std::to_string(g) + " boundary touches itself at a vertex");
        std::vector<Index> loop;
        Index v = es.front()[0];
        do {
            loop.push_back(v);
            auto it = next.find(v);
            if (it == next.end()) throw MeshError("group " + std::to_string(g) + " boundary is open");
            v = it->second;
        } while (v != es.front()[0] && loop.size() <= es.size());
        if (loop.size() != es.size())
            throw MeshError("group " + std::to_string(g) + " boundary is not a single loop");
        loops.push_back(std::move(loop));
    }

    std::vector<Index> remap(mesh.vertices.size(), kNoElement);
    std::vector<Point2> verts;
    for (auto& loop : loops)
        for (Index& v : loop) {
            if (remap[v] == kNoElement) {
                remap[v] = verts.size();
                verts.push_back(mesh.vertices[v]);
            }
            v = remap[v];
        }
    return build_connectivity(std::move(verts), loops);
}

} // namespace polydg
