// Stationary Stokes solve with a zero-mean pressure multiplier and
//        the error norms used by the convergence studies.
#pragma once

#include "polydg/assembly.hpp"

#include <Eigen/UmfPackSupport>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace polydg {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DiscreteSolution {
    Eigen::VectorXd U;
    Eigen::VectorXd P;
    double residual_norm = 0.0; ///< relative to the right-hand side
    double mean_pressure = 0.0; ///< 1_c^T M_p P
    double multiplier = 0.0;    ///< Lagrange multiplier of the zero-mean constraint
};

/// Bordered matrix [A B^T 0; B -S c; 0 c^T 0] with c = M_p 1_c.
inline SparseMatrix bordered_matrix(const StokesSystem& s)
{
    const auto nu = static_cast<int>(s.n_u());
    const auto np = static_cast<int>(s.n_p());
    const Eigen::VectorXd c = s.Mp * s.ones_p;
    Triplets t;
    t.reserve(static_cast<std::size_t>(s.A.nonZeros() + 2 * s.B.nonZeros() + s.S.nonZeros() + 2 * np));
    for (int j = 0; j < s.A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(s.A, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int j = 0; j < s.B.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(s.B, j); it; ++it) {
            t.emplace_back(nu + it.row(), it.col(), it.value());
            t.emplace_back(it.col(), nu + it.row(), it.value());
        }
    for (int j = 0; j < s.S.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(s.S, j); it; ++it) t.emplace_back(nu + it.row(), nu + it.col(), -it.value());
    for (int i = 0; i < np; ++i)
        if (c(i) != 0.0) {
            t.emplace_back(nu + i, nu + np, c(i));
            t.emplace_back(nu + np, nu + i, c(i));
        }
    SparseMatrix K(nu + np + 1, nu + np + 1);
    K.setFromTriplets(t.begin(), t.end());
    K.makeCompressed();
    return K;
}

/// Residual of [A B^T; B -S](U, P) + (0, c lambda) against (rhs_u, rhs_p),
/// relative to the right-hand side norm (absolute when it vanishes). The
/// multiplier absorbs the discrete incompatibility of the boundary data.
inline double stokes_residual(const StokesSystem& s, const Eigen::VectorXd& U, const Eigen::VectorXd& P,
                              double multiplier = 0.0)
{
    const Eigen::VectorXd ru = s.A * U + s.B.transpose() * P - s.rhs_u;
    const Eigen::VectorXd rp = s.B * U - s.S * P + multiplier * (s.Mp * s.ones_p) - s.rhs_p;
    const double r = std::sqrt(ru.squaredNorm() + rp.squaredNorm());
    const double b = std::sqrt(s.rhs_u.squaredNorm() + s.rhs_p.squaredNorm());
    return b > 0.0 ? r / b : r;
}

inline DiscreteSolution solve_stationary(const StokesSystem& s, double residual_tol = 1e-9)
{
    const auto nu = static_cast<Eigen::Index>(s.n_u());
    const auto np = static_cast<Eigen::Index>(s.n_p());
    const SparseMatrix K = bordered_matrix(s);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu + np + 1);
    rhs.head(nu) = s.rhs_u;
    rhs.segment(nu, np) = s.rhs_p;

    Eigen::UmfPackLU<SparseMatrix> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success)
        throw NumericalError("saddle-point factorization failed (gamma_v may be too small)");
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw NumericalError("saddle-point solve failed");

    DiscreteSolution sol;
    sol.U = x.head(nu);
    sol.P = x.segment(nu, np);
    sol.multiplier = x(nu + np);
    sol.residual_norm = stokes_residual(s, sol.U, sol.P, sol.multiplier);
    sol.mean_pressure = (s.Mp * s.ones_p).dot(sol.P);
    if (!(sol.residual_norm <= residual_tol)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "saddle-point residual %.3g exceeds tolerance %.3g", sol.residual_norm, residual_tol);
        throw NumericalError(msg);
    }
    const double pnorm = std::sqrt(sol.P.dot(s.Mp * sol.P));
    if (std::abs(sol.mean_pressure) > 1e-10 * std::max(pnorm, 1.0))
        throw NumericalError("zero-mean pressure constraint violated");
    return sol;
}

// ---------------------------------------------------------------------------
// Errors

struct ErrorReport {
    double err_u_L2 = 0.0;
    double err_u_DG = 0.0;
    double err_p_L2 = 0.0;
    double err_p_jump = 0.0;
    double h = 0.0;
    Index n_u = 0;
    Index n_p = 0;
};

/// Evaluate the discrete velocity of element k at points.
inline Eigen::MatrixXd element_velocity(const Discretization& d, const Eigen::VectorXd& U, Index k, const BasisValues& b)
{
    const int nb = d.n_velocity_basis();
    const auto off = static_cast<Eigen::Index>(d.dofs.velocity_offset[k]);
    Eigen::MatrixXd out(b.value.cols(), 6); // ux, uy, dux/dx, dux/dy, duy/dx, duy/dy
    const auto cx = U.segment(off, nb);
    const auto cy = U.segment(off + nb, nb);
    out.col(0) = b.value.transpose() * cx;
    out.col(1) = b.value.transpose() * cy;
    out.col(2) = b.dx.transpose() * cx;
    out.col(3) = b.dy.transpose() * cx;
    out.col(4) = b.dx.transpose() * cy;
    out.col(5) = b.dy.transpose() * cy;
    return out;
}

/// Error norms of (U, P) against `exact`; quadrature is raised by
/// `extra_order` above the assembly order.
inline ErrorReport compute_errors(const DiscreteSolution& sol, const StokesSystem& s, const ExactSolution& exact,
                                  int extra_order = 4)
{
    const Discretization& d = s.disc;
    const PolyMesh& mesh = *d.mesh;
    const int np = d.n_pressure_basis();
    double eu = 0.0, egrad = 0.0, ep = 0.0, ejump = 0.0;

    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(mesh, k, d.volume_order() + extra_order);
        const BasisValues bv = d.velocity_basis[k].evaluate(rule.points);
        const BasisValues bp = d.pressure_basis[k].evaluate(rule.points);
        const Eigen::MatrixXd uh = element_velocity(d, sol.U, k, bv);
        const Eigen::VectorXd ph =
            bp.value.transpose() * sol.P.segment(static_cast<Eigen::Index>(d.dofs.pressure_offset[k]), np);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            const Point2 x = rule.points[q];
            const Vec2 u = exact.velocity(x);
            const Tensor2 g = exact.velocity_gradient(x);
            const double w = rule.weights[q];
            eu += w * (std::pow(uh(qi, 0) - u[0], 2) + std::pow(uh(qi, 1) - u[1], 2));
            for (int c = 0; c < 4; ++c) egrad += w * d.mu * std::pow(uh(qi, 2 + c) - g[static_cast<std::size_t>(c)], 2);
            ep += w * std::pow(ph(qi) - exact.pressure(x), 2);
        }
    }

    for (const Face& f : mesh.faces) {
        const QuadratureRule rule = face_quadrature(mesh, f, d.face_order() + extra_order);
        const double sigma = d.face_sigma_v(f);
        const BasisValues bplus = d.velocity_basis[f.plus].evaluate(rule.points);
        const Eigen::MatrixXd up = element_velocity(d, sol.U, f.plus, bplus);
        Eigen::MatrixXd um;
        if (f.is_interior()) um = element_velocity(d, sol.U, f.minus, d.velocity_basis[f.minus].evaluate(rule.points));
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            double ax = up(qi, 0), ay = up(qi, 1);
            if (f.is_interior()) {
                ax -= um(qi, 0);
                ay -= um(qi, 1);
            } else {
                const Vec2 g = exact.boundary(rule.points[q]);
                ax -= g[0];
                ay -= g[1];
            }
            double j[4];
            detail::jump_tensor(ax, ay, f.normal, d.options.jump, j);
            egrad += rule.weights[q] * sigma * (j[0] * j[0] + j[1] * j[1] + j[2] * j[2] + j[3] * j[3]);
        }
    }

    for (const Face& f : mesh.faces) {
        if (!f.is_interior()) continue;
        const QuadratureRule rule = face_quadrature(mesh, f, d.face_order() + extra_order);
        const double sigma = d.face_sigma_p(f);
        const Eigen::VectorXd pp = d.pressure_basis[f.plus].evaluate(rule.points).value.transpose() *
                                   sol.P.segment(static_cast<Eigen::Index>(d.dofs.pressure_offset[f.plus]), np);
        const Eigen::VectorXd pm = d.pressure_basis[f.minus].evaluate(rule.points).value.transpose() *
                                   sol.P.segment(static_cast<Eigen::Index>(d.dofs.pressure_offset[f.minus]), np);
        for (std::size_t q = 0; q < rule.size(); ++q)
            ejump += rule.weights[q] * sigma * std::pow(pp(static_cast<Eigen::Index>(q)) - pm(static_cast<Eigen::Index>(q)), 2);
    }

    ErrorReport r;
    r.err_u_L2 = std::sqrt(eu);
    r.err_u_DG = std::sqrt(egrad);
    r.err_p_L2 = std::sqrt(ep);
    r.err_p_jump = std::sqrt(ejump);
    r.h = mesh.max_diameter();
    r.n_u = s.n_u();
    r.n_p = s.n_p();
    return r;
}

} // namespace polydg
