// Bounding-box scaled monomial bases on polygonal elements.
//
// On element K with bounding box center c and half extents (hx, hy) the
// basis of P^k(K) is x^a y^b with x = (X - c_x)/hx, y = (Y - c_y)/hy,
// a + b <= k, in graded lexicographic order (1, x, y, x^2, xy, y^2, ...).
// Optionally the monomials are orthonormalized in L2(K) by modified
// Gram-Schmidt, which keeps the element mass matrix at identity for
// high degrees.
#pragma once

#include "polydg/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace polydg {

inline constexpr int basis_dimension(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Exponent pairs (a, b) in basis order.
inline std::vector<std::array<int, 2>> monomial_exponents(int degree)
{
    std::vector<std::array<int, 2>> out;
    out.reserve(basis_dimension(degree));
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) out.push_back({a, d - a});
    return out;
}

struct BasisValues {
    Eigen::MatrixXd value; ///< (function, point)
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

class ElementBasis {
public:
    ElementBasis() = default;

    ElementBasis(Index element, int degree, const BoundingBox& box)
        : element_(element), degree_(degree), center_(box.center()), half_(box.half_extents()),
          exponents_(monomial_exponents(degree))
    {
        if (degree < 0) throw std::invalid_argument("ElementBasis: negative degree");
    }

    ElementBasis(const PolyMesh& mesh, Index element, int degree)
        : ElementBasis(element, degree, mesh.elements[element].bbox)
    {
    }

    Index element() const { return element_; }
    int degree() const { return degree_; }
    int size() const { return basis_dimension(degree_); }
    Point2 center() const { return center_; }
    Point2 half_extents() const { return half_; }
    bool orthonormal() const { return transform_.size() > 0; }

    /// Replace the monomials by an L2(K)-orthonormal set built with modified
    /// Gram-Schmidt (two passes) against `rule`.
    void orthonormalize(const QuadratureRule& rule)
    {
        transform_.resize(0, 0);
        const BasisValues m = evaluate(rule.points);
        const int n = size();
        Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
        const Eigen::MatrixXd gram = m.value * w.asDiagonal() * m.value.transpose();
        Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd v = c.row(i).transpose();
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < i; ++j) {
                    const Eigen::VectorXd cj = c.row(j).transpose();
                    v -= (v.dot(gram * cj)) * cj;
                }
            const double nrm = std::sqrt(v.dot(gram * v));
            if (!(nrm > 0.0)) throw std::runtime_error("orthonormalize: rank-deficient element mass matrix");
            c.row(i) = (v / nrm).transpose();
        }
        transform_ = std::move(c);
    }

    /// Coefficient rows of each function in the monomial basis (identity when
    /// not orthonormalized).
    Eigen::MatrixXd coefficients() const
    {
        return orthonormal() ? transform_ : Eigen::MatrixXd::Identity(size(), size());
    }

    BasisValues evaluate(std::span<const Point2> pts) const
    {
        const int n = size();
        const auto np = static_cast<Eigen::Index>(pts.size());
        BasisValues out{Eigen::MatrixXd(n, np), Eigen::MatrixXd(n, np), Eigen::MatrixXd(n, np)};
        std::vector<double> px(degree_ + 1), py(degree_ + 1);
        const double sx = 1.0 / half_.x;
        const double sy = 1.0 / half_.y;
        for (Eigen::Index q = 0; q < np; ++q) {
            const double x = (pts[q].x - center_.x) * sx;
            const double y = (pts[q].y - center_.y) * sy;
            px[0] = py[0] = 1.0;
            for (int i = 1; i <= degree_; ++i) {
                px[i] = px[i - 1] * x;
                py[i] = py[i - 1] * y;
            }
            for (int i = 0; i < n; ++i) {
                const auto [a, b] = exponents_[i];
                out.value(i, q) = px[a] * py[b];
                out.dx(i, q) = a > 0 ? a * px[a - 1] * py[b] * sx : 0.0;
                out.dy(i, q) = b > 0 ? b * px[a] * py[b - 1] * sy : 0.0;
            }
        }
        if (orthonormal()) {
            out.value = transform_ * out.value;
            out.dx = transform_ * out.dx;
            out.dy = transform_ * out.dy;
        }
        return out;
    }

    BasisValues evaluate(Point2 p) const { return evaluate(std::span<const Point2>(&p, 1)); }

private:
    Index element_ = 0;
    int degree_ = 0;
    Point2 center_{};
    Point2 half_{1.0, 1.0};
    std::vector<std::array<int, 2>> exponents_;
    Eigen::MatrixXd transform_;
};

/// Local L2 Gram matrix of a basis under `rule`.
inline Eigen::MatrixXd local_mass(const ElementBasis& basis, const QuadratureRule& rule)
{
    const BasisValues b = basis.evaluate(rule.points);
    Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
    return b.value * w.asDiagonal() * b.value.transpose();
}

/// 2-norm condition number of the element mass matrix (reported for
/// pathological elements, not asserted).
inline double mass_condition_number(const PolyMesh& mesh, Index k, int degree, bool orthonormal = false)
{
    const QuadratureRule rule = element_quadrature(mesh, k, 2 * degree + 2);
    ElementBasis basis(mesh, k, degree);
    if (orthonormal) basis.orthonormalize(rule);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(local_mass(basis, rule), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

} // namespace polydg
