// Gauss-Legendre rules on segments and collapsed (Duffy) rules on
//        polygons through their sub-triangulation.
#pragma once

#include "polydg/mesh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace polydg {

struct QuadratureRule {
    std::vector<Point2> points;
    std::vector<double> weights;
    int degree = 0; ///< polynomials up to this total degree are integrated exactly

    std::size_t size() const { return weights.size(); }
};

/// Largest exactness degree for which rules are generated.
inline constexpr int kMaxQuadratureOrder = 80;

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return {x, w};
}

/// Gauss-Legendre rule on the segment [a, b], exact to `order`.
inline QuadratureRule segment_quadrature(Point2 a, Point2 b, int order)
{
    if (order < 1) order = 1;
    if (order > kMaxQuadratureOrder) throw std::invalid_argument("segment_quadrature: order too high");
    const int n = (order + 2) / 2; // ceil((order + 1) / 2)
    auto [x, w] = gauss_legendre(n);
    const double len = distance(a, b);
    QuadratureRule q;
    q.degree = 2 * n - 1;
    q.points.reserve(n);
    q.weights.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (x[i] + 1.0);
        q.points.push_back(a + s * (b - a));
        q.weights.push_back(0.5 * w[i] * len);
    }
    return q;
}

/// Collapsed Gauss rule on a CCW triangle, exact to `order`. Appends to `q`.
inline void append_triangle_quadrature(Point2 a, Point2 b, Point2 c, int order, QuadratureRule& q)
{
    if (order < 0) order = 0;
    if (order > kMaxQuadratureOrder) throw std::invalid_argument("triangle quadrature: order too high");
    // the Duffy Jacobian adds one degree in the radial direction
    const int n = (order + 3) / 2;
    auto [x, w] = gauss_legendre(n);
    const double twice_area = orient(a, b, c);
    const Point2 e1 = b - a;
    const Point2 e2 = c - a;
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (x[i] + 1.0);
        for (int j = 0; j < n; ++j) {
            const double t = 0.5 * (x[j] + 1.0);
            q.points.push_back(a + s * ((1.0 - t) * e1 + t * e2));
            q.weights.push_back(0.25 * w[i] * w[j] * s * twice_area);
        }
    }
}

/// Composite rule over the sub-triangulation of element k.
inline QuadratureRule element_quadrature(const PolyMesh& mesh, Index k, int order)
{
    if (order > kMaxQuadratureOrder)
        throw std::invalid_argument("element_quadrature: order " + std::to_string(order) + " exceeds " +
                                    std::to_string(kMaxQuadratureOrder));
    QuadratureRule q;
    q.degree = std::max(order, 0);
    for (const auto& t : mesh.elements[k].sub_triangles)
        append_triangle_quadrature(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], order, q);
    return q;
}

inline QuadratureRule face_quadrature(const PolyMesh& mesh, const Face& face, int order)
{
    return segment_quadrature(mesh.vertices[face.vertices[0]], mesh.vertices[face.vertices[1]], order);
}

} // namespace polydg
