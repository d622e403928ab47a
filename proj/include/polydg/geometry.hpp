// Planar points and polygon primitives used by the mesh generators.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

/// Twice the signed area of the triangle (a, b, c); positive when CCW.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

struct BoundingBox {
    Point2 min{};
    Point2 max{};

    Point2 center() const { return 0.5 * (min + max); }
    Point2 half_extents() const { return 0.5 * (max - min); }
    bool contains(Point2 p, double tol = 0.0) const
    {
        return p.x >= min.x - tol && p.x <= max.x + tol && p.y >= min.y - tol && p.y <= max.y + tol;
    }
};

/// Signed shoelace area of a closed loop.
inline double signed_area(std::span<const Point2> loop)
{
    double twice = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = loop[i];
        const Point2& b = loop[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

inline Point2 centroid(std::span<const Point2> loop)
{
    double a = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    const std::size_t n = loop.size();
    // shift to the first vertex to limit cancellation
    const Point2 o = loop[0];
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = loop[i] - o;
        const Point2 q = loop[(i + 1) % n] - o;
        const double c = p.x * q.y - q.x * p.y;
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (a == 0.0) throw std::runtime_error("centroid of a zero-area polygon");
    return Point2{o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)};
}

inline double diameter(std::span<const Point2> pts)
{
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
    return d;
}

inline BoundingBox bounding_box(std::span<const Point2> pts)
{
    BoundingBox b{pts[0], pts[0]};
    for (const Point2& p : pts) {
        b.min.x = std::min(b.min.x, p.x);
        b.min.y = std::min(b.min.y, p.y);
        b.max.x = std::max(b.max.x, p.x);
        b.max.y = std::max(b.max.y, p.y);
    }
    return b;
}

/// Proper or touching intersection test for closed segments [a,b] and [c,d].
inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d, double tol)
{
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
        ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
        return true;
    auto on_segment = [tol](Point2 p, Point2 q, Point2 r, double o) {
        // r collinear with pq and inside its box
        return std::abs(o) <= tol && r.x >= std::min(p.x, q.x) - tol && r.x <= std::max(p.x, q.x) + tol &&
               r.y >= std::min(p.y, q.y) - tol && r.y <= std::max(p.y, q.y) + tol;
    };
    return on_segment(c, d, a, d1) || on_segment(c, d, b, d2) || on_segment(a, b, c, d3) ||
           on_segment(a, b, d, d4);
}

/// True when no two non-adjacent edges of the loop touch and no vertex repeats.
inline bool is_simple_loop(std::span<const Point2> loop)
{
    const std::size_t n = loop.size();
    if (n < 3) return false;
    const double scale = std::max(1.0, diameter(loop));
    const double tol = 1e-14 * scale * scale;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (distance(loop[i], loop[j]) <= 1e-14 * scale) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = loop[i];
        const Point2 b = loop[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            const Point2 c = loop[j];
            const Point2 d = loop[(j + 1) % n];
            if (segments_intersect(a, b, c, d, tol)) return false;
        }
    }
    return true;
}

/// Ear-clipping triangulation of a simple CCW polygon. Vertices with a
/// straight angle are skipped; the returned triples index into `loop`.
inline std::vector<std::array<std::size_t, 3>> ear_clip(std::span<const Point2> loop)
{
    const double scale = std::max(diameter(loop), 1e-300);
    const double flat = 1e-13 * scale * scale;

    std::vector<std::size_t> ring;
    ring.reserve(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) ring.push_back(i);

    auto drop_straight = [&] {
        bool changed = true;
        while (changed && ring.size() > 3) {
            changed = false;
            for (std::size_t i = 0; i < ring.size(); ++i) {
                const std::size_t n = ring.size();
                const Point2 p = loop[ring[(i + n - 1) % n]];
                const Point2 c = loop[ring[i]];
                const Point2 q = loop[ring[(i + 1) % n]];
                // straight and turning forward (not a spike)
                if (std::abs(orient(p, c, q)) <= flat && dot(c - p, q - c) > 0.0) {
                    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                    changed = true;
                    break;
                }
            }
        }
    };

    std::vector<std::array<std::size_t, 3>> tris;
    drop_straight();
    while (ring.size() > 3) {
        const std::size_t n = ring.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const std::size_t ip = ring[(i + n - 1) % n];
            const std::size_t ic = ring[i];
            const std::size_t in = ring[(i + 1) % n];
            const Point2 a = loop[ip];
            const Point2 b = loop[ic];
            const Point2 c = loop[in];
            if (orient(a, b, c) <= flat) continue;
            bool empty = true;
            for (std::size_t j = 0; j < n && empty; ++j) {
                const std::size_t iv = ring[j];
                if (iv == ip || iv == ic || iv == in) continue;
                const Point2 p = loop[iv];
                if (orient(a, b, p) >= -flat && orient(b, c, p) >= -flat && orient(c, a, p) >= -flat)
                    empty = false;
            }
            if (!empty) continue;
            tris.push_back({ip, ic, in});
            ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
        }
        if (!clipped) throw std::runtime_error("ear clipping failed: polygon is not simple");
        drop_straight();
    }
    if (orient(loop[ring[0]], loop[ring[1]], loop[ring[2]]) <= 0.0)
        throw std::runtime_error("ear clipping failed: degenerate final triangle");
    tris.push_back({ring[0], ring[1], ring[2]});
    return tris;
}

/// Sutherland-Hodgman clip of a convex CCW polygon by {p : dot(p - origin, normal) <= 0}.
inline std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 origin, Point2 normal)
{
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = poly[i];
        const Point2 q = poly[(i + 1) % n];
        const double dp = dot(p - origin, normal);
        const double dq = dot(q - origin, normal);
        if (dp <= 0.0) out.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

/// Parameter interval [t0, t1] of the segment a + t (b - a), t in [0,1],
/// lying inside the convex CCW polygon `poly` (Cyrus-Beck). Empty when the
/// segment misses the polygon.
inline std::optional<std::array<double, 2>> clip_segment_convex(Point2 a, Point2 b, std::span<const Point2> poly)
{
    double t0 = 0.0;
    double t1 = 1.0;
    const Point2 d = b - a;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = poly[i];
        const Point2 e = poly[(i + 1) % n] - p;
        // inside: cross(e, x - p) >= 0
        const double num = cross(e, a - p);
        const double den = cross(e, d);
        if (den == 0.0) {
            if (num < 0.0) return std::nullopt;
            continue;
        }
        const double t = -num / den;
        if (den > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1) return std::nullopt;
    }
    return std::array<double, 2>{t0, t1};
}

} // namespace polydg
