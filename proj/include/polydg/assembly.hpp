// Interior-penalty discontinuous Galerkin forms for Stokes flow on
//        polygonal meshes.
//
// Velocity and pressure live in broken spaces [P^ell(K)]^2 and P^m(K). With
// averages {.} and jumps [[.]] taken across faces (boundary faces use the
// one-sided trace), the assembled forms are
//
//   a(u, v) = (mu grad u, grad v) - <mu {grad u}, [[v]]> - <mu [[u]], {grad v}>
//             + <sigma_v [[u]], [[v]]>                       (all faces)
//   b(p, v) = -(p, div v) + <{p I}, [[v]]>                     (all faces)
//   s(p, q) = <sigma_p [[p]], [[q]]>                           (interior faces)
//
// sigma_v = gamma_v max(ell^2 mu / h_K) over the face neighbours and
// sigma_p = gamma_p min(h_K / m). The block system is [A B^T; B -S].
#pragma once

#include "polydg/basis.hpp"
#include "polydg/exact_solution.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace polydg {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct PenaltyParams {
    double gamma_v = 10.0;
    double gamma_p = 10.0;

    void validate() const
    {
        if (!(gamma_v > 0.0) || !(gamma_p > 0.0)) throw std::invalid_argument("penalty parameters must be positive");
    }
};

/// Tensor used for vector jumps: the symmetrized outer product v (.) n, or
/// the plain outer product v (x) n.
enum class JumpKind { symmetric, full };

/// Volume-divergence or gradient-plus-interior-jump realization of b.
enum class CouplingForm { divergence, gradient };

enum class Field { velocity, pressure };

struct FormOptions {
    JumpKind jump = JumpKind::full;
    bool orthonormal_basis = false;
    int volume_order = -1; ///< -1: 2 max(ell, m) + 2
    int face_order = -1;   ///< -1: 2 max(ell, m) + 2
};

// ---------------------------------------------------------------------------
// Penalty functions

inline double sigma_v(double gamma_v, int ell, double mu, double h_plus, std::optional<double> h_minus = std::nullopt)
{
    const double c = static_cast<double>(ell) * ell * mu;
    double v = c / h_plus;
    if (h_minus) v = std::max(v, c / *h_minus);
    return gamma_v * v;
}

inline double sigma_p(double gamma_p, int m, double h_plus, std::optional<double> h_minus)
{
    if (!h_minus) throw std::invalid_argument("sigma_p is defined on interior faces only");
    return gamma_p * std::min(h_plus / m, *h_minus / m);
}

// ---------------------------------------------------------------------------
// Degrees of freedom

/// Element-contiguous numbering. Velocity dofs of element K occupy
/// [velocity_offset[K], +2 N_ell), x-component first; pressure dofs occupy
/// [pressure_offset[K], +N_m).
struct DofMap {
    int velocity_local = 0; ///< 2 N_ell
    int pressure_local = 0; ///< N_m
    std::vector<Index> velocity_offset;
    std::vector<Index> pressure_offset;
    Index n_u = 0;
    Index n_p = 0;

    DofMap() = default;
    DofMap(std::size_t n_elements, int ell, int m)
        : velocity_local(2 * basis_dimension(ell)), pressure_local(basis_dimension(m))
    {
        velocity_offset.resize(n_elements);
        pressure_offset.resize(n_elements);
        for (std::size_t k = 0; k < n_elements; ++k) {
            velocity_offset[k] = n_u;
            pressure_offset[k] = n_p;
            n_u += static_cast<Index>(velocity_local);
            n_p += static_cast<Index>(pressure_local);
        }
    }
};

// ---------------------------------------------------------------------------
// Discretization context

struct Discretization {
    std::shared_ptr<const PolyMesh> mesh;
    int ell = 1;
    int m = 1;
    double mu = 1.0;
    PenaltyParams penalty{};
    FormOptions options{};
    DofMap dofs{};
    std::vector<ElementBasis> velocity_basis;
    std::vector<ElementBasis> pressure_basis;

    int n_velocity_basis() const { return basis_dimension(ell); }
    int n_pressure_basis() const { return basis_dimension(m); }

    int volume_order() const
    {
        return options.volume_order >= 0 ? options.volume_order : 2 * std::max(ell, m) + 2;
    }
    int face_order() const { return options.face_order >= 0 ? options.face_order : 2 * std::max(ell, m) + 2; }

    double face_sigma_v(const Face& f) const
    {
        const auto& E = mesh->elements;
        return sigma_v(penalty.gamma_v, ell, mu, E[f.plus].diameter,
                       f.is_interior() ? std::optional<double>(E[f.minus].diameter) : std::nullopt);
    }

    double face_sigma_p(const Face& f) const
    {
        const auto& E = mesh->elements;
        return sigma_p(penalty.gamma_p, m, E[f.plus].diameter,
                       f.is_interior() ? std::optional<double>(E[f.minus].diameter) : std::nullopt);
    }
};

inline Discretization make_discretization(std::shared_ptr<const PolyMesh> mesh, int ell, int m, double mu = 1.0,
                                          PenaltyParams penalty = {}, FormOptions options = {})
{
    if (!mesh) throw std::invalid_argument("make_discretization: null mesh");
    if (ell < 1 || m < 0) throw std::invalid_argument("make_discretization: need ell >= 1 and m >= 0");
    if (!(mu > 0.0)) throw std::invalid_argument("make_discretization: viscosity must be positive");
    penalty.validate();
    Discretization d;
    d.mesh = std::move(mesh);
    d.ell = ell;
    d.m = m;
    d.mu = mu;
    d.penalty = penalty;
    d.options = options;
    d.dofs = DofMap(d.mesh->n_elements(), ell, m);
    const int order = 2 * std::max(ell, m) + 2;
    for (Index k = 0; k < d.mesh->n_elements(); ++k) {
        d.velocity_basis.emplace_back(*d.mesh, k, ell);
        d.pressure_basis.emplace_back(*d.mesh, k, m);
        if (options.orthonormal_basis) {
            const QuadratureRule rule = element_quadrature(*d.mesh, k, order);
            d.velocity_basis.back().orthonormalize(rule);
            d.pressure_basis.back().orthonormalize(rule);
        }
    }
    return d;
}

inline Discretization make_discretization(const PolyMesh& mesh, int ell, int m, double mu = 1.0,
                                          PenaltyParams penalty = {}, FormOptions options = {})
{
    return make_discretization(std::make_shared<const PolyMesh>(mesh), ell, m, mu, penalty, options);
}

namespace detail {

inline SparseMatrix from_triplets(Index rows, Index cols, const Triplets& t)
{
    SparseMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    out.setFromTriplets(t.begin(), t.end());
    out.makeCompressed();
    return out;
}

inline void scatter(Triplets& t, const Eigen::MatrixXd& local, const std::vector<Index>& rows,
                    const std::vector<Index>& cols)
{
    for (Eigen::Index j = 0; j < local.cols(); ++j)
        for (Eigen::Index i = 0; i < local.rows(); ++i)
            if (local(i, j) != 0.0)
                t.emplace_back(static_cast<int>(rows[static_cast<std::size_t>(i)]),
                               static_cast<int>(cols[static_cast<std::size_t>(j)]), local(i, j));
}

inline std::vector<Index> range(Index start, int n)
{
    std::vector<Index> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = start + static_cast<Index>(i);
    return r;
}

inline Eigen::Map<const Eigen::VectorXd> weights(const QuadratureRule& rule)
{
    return {rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size())};
}

// Traces of the velocity basis of the elements adjacent to a face at one
// quadrature point, flattened over [plus dofs, minus dofs]:
// jump rows hold the 2x2 jump tensor of each dof (row-major), avg rows the
// averaged gradient tensor.
using TraceMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

struct FaceTrace {
    TraceMatrix jump; // (dofs, 4)
    TraceMatrix avg;  // (dofs, 4)
};

inline void jump_tensor(double ax, double ay, Point2 n, JumpKind kind, double* out)
{
    if (kind == JumpKind::full) {
        out[0] = ax * n.x;
        out[1] = ax * n.y;
        out[2] = ay * n.x;
        out[3] = ay * n.y;
    } else {
        out[0] = ax * n.x;
        out[1] = 0.5 * (ax * n.y + ay * n.x);
        out[2] = out[1];
        out[3] = ay * n.y;
    }
}

struct FaceSides {
    std::vector<Index> elements; // plus, then minus if interior
    std::vector<BasisValues> velocity;
    std::vector<BasisValues> pressure;
    double average_weight = 1.0;
};

inline FaceSides face_sides(const Discretization& d, const Face& f, const QuadratureRule& rule, bool need_pressure)
{
    FaceSides s;
    s.elements.push_back(f.plus);
    if (f.is_interior()) s.elements.push_back(f.minus);
    s.average_weight = f.is_interior() ? 0.5 : 1.0;
    for (Index k : s.elements) {
        s.velocity.push_back(d.velocity_basis[k].evaluate(rule.points));
        if (need_pressure) s.pressure.push_back(d.pressure_basis[k].evaluate(rule.points));
    }
    return s;
}

inline FaceTrace face_trace(const Discretization& d, const FaceSides& s, const Face& f, Eigen::Index q)
{
    const int nb = d.n_velocity_basis();
    const auto nsides = static_cast<int>(s.elements.size());
    FaceTrace t{TraceMatrix::Zero(2 * nb * nsides, 4), TraceMatrix::Zero(2 * nb * nsides, 4)};
    const Point2 n = f.normal;
    for (int side = 0; side < nsides; ++side) {
        const double chi = side == 0 ? 1.0 : -1.0;
        const BasisValues& b = s.velocity[static_cast<std::size_t>(side)];
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < nb; ++i) {
                const Eigen::Index row = side * 2 * nb + c * nb + i;
                const double v = chi * b.value(i, q);
                jump_tensor(c == 0 ? v : 0.0, c == 1 ? v : 0.0, n, d.options.jump, t.jump.row(row).data());
                t.avg(row, 2 * c) = s.average_weight * b.dx(i, q);
                t.avg(row, 2 * c + 1) = s.average_weight * b.dy(i, q);
            }
    }
    return t;
}

inline std::vector<Index> face_velocity_dofs(const Discretization& d, const FaceSides& s)
{
    std::vector<Index> out;
    for (Index k : s.elements) {
        auto r = range(d.dofs.velocity_offset[k], d.dofs.velocity_local);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

inline std::vector<Index> face_pressure_dofs(const Discretization& d, const FaceSides& s)
{
    std::vector<Index> out;
    for (Index k : s.elements) {
        auto r = range(d.dofs.pressure_offset[k], d.dofs.pressure_local);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Forms

inline SparseMatrix assemble_velocity_form(const Discretization& d)
{
    const PolyMesh& mesh = *d.mesh;
    const int nb = d.n_velocity_basis();
    Triplets trip;

    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(mesh, k, d.volume_order());
        const BasisValues b = d.velocity_basis[k].evaluate(rule.points);
        const auto w = detail::weights(rule);
        const Eigen::MatrixXd stiff = d.mu * (b.dx * w.asDiagonal() * b.dx.transpose() +
                                              b.dy * w.asDiagonal() * b.dy.transpose());
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
        local.topLeftCorner(nb, nb) = stiff;
        local.bottomRightCorner(nb, nb) = stiff;
        const auto dofs = detail::range(d.dofs.velocity_offset[k], 2 * nb);
        detail::scatter(trip, local, dofs, dofs);
    }

    for (const Face& f : mesh.faces) {
        const QuadratureRule rule = face_quadrature(mesh, f, d.face_order());
        const auto sides = detail::face_sides(d, f, rule, false);
        const auto dofs = detail::face_velocity_dofs(d, sides);
        const double sigma = d.face_sigma_v(f);
        const auto n = static_cast<Eigen::Index>(dofs.size());
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(rule.size()); ++q) {
            const auto t = detail::face_trace(d, sides, f, q);
            const double wq = rule.weights[static_cast<std::size_t>(q)];
            const Eigen::MatrixXd cons = t.jump * t.avg.transpose();
            local.noalias() += wq * (sigma * t.jump * t.jump.transpose() - d.mu * (cons + cons.transpose()));
        }
        detail::scatter(trip, local, dofs, dofs);
    }
    return detail::from_triplets(d.dofs.n_u, d.dofs.n_u, trip);
}

inline SparseMatrix assemble_coupling_form(const Discretization& d, CouplingForm form = CouplingForm::divergence)
{
    const PolyMesh& mesh = *d.mesh;
    const int nb = d.n_velocity_basis();
    const int np = d.n_pressure_basis();
    Triplets trip;

    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(mesh, k, d.volume_order());
        const BasisValues v = d.velocity_basis[k].evaluate(rule.points);
        const BasisValues p = d.pressure_basis[k].evaluate(rule.points);
        const auto w = detail::weights(rule);
        Eigen::MatrixXd local(np, 2 * nb);
        if (form == CouplingForm::divergence) {
            local.leftCols(nb) = -p.value * w.asDiagonal() * v.dx.transpose();
            local.rightCols(nb) = -p.value * w.asDiagonal() * v.dy.transpose();
        } else {
            local.leftCols(nb) = p.dx * w.asDiagonal() * v.value.transpose();
            local.rightCols(nb) = p.dy * w.asDiagonal() * v.value.transpose();
        }
        detail::scatter(trip, local, detail::range(d.dofs.pressure_offset[k], np),
                        detail::range(d.dofs.velocity_offset[k], 2 * nb));
    }

    for (const Face& f : mesh.faces) {
        if (form == CouplingForm::gradient && !f.is_interior()) continue;
        const QuadratureRule rule = face_quadrature(mesh, f, d.face_order());
        const auto sides = detail::face_sides(d, f, rule, true);
        const auto vd = detail::face_velocity_dofs(d, sides);
        const auto pd = detail::face_pressure_dofs(d, sides);
        const auto nsides = static_cast<int>(sides.elements.size());
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pd.size()), static_cast<Eigen::Index>(vd.size()));
        const Point2 n = f.normal;
        for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(rule.size()); ++q) {
            Eigen::VectorXd pv(static_cast<Eigen::Index>(pd.size()));
            Eigen::VectorXd vv(static_cast<Eigen::Index>(vd.size()));
            for (int side = 0; side < nsides; ++side) {
                const double chi = side == 0 ? 1.0 : -1.0;
                const auto& P = sides.pressure[static_cast<std::size_t>(side)];
                const auto& V = sides.velocity[static_cast<std::size_t>(side)];
                for (int r = 0; r < np; ++r)
                    pv(side * np + r) = (form == CouplingForm::divergence ? sides.average_weight : chi) * P.value(r, q);
                for (int c = 0; c < 2; ++c)
                    for (int i = 0; i < nb; ++i) {
                        const double nc = c == 0 ? n.x : n.y;
                        // divergence form: {p} tr[[v]] = {p} chi v.n ; gradient form: -[[p]].{v}
                        vv(side * 2 * nb + c * nb + i) = form == CouplingForm::divergence
                                                             ? chi * V.value(i, q) * nc
                                                             : -sides.average_weight * V.value(i, q) * nc;
                    }
            }
            local.noalias() += rule.weights[static_cast<std::size_t>(q)] * pv * vv.transpose();
        }
        detail::scatter(trip, local, pd, vd);
    }
    return detail::from_triplets(d.dofs.n_p, d.dofs.n_u, trip);
}

inline SparseMatrix assemble_pressure_stab(const Discretization& d)
{
    const PolyMesh& mesh = *d.mesh;
    const int np = d.n_pressure_basis();
    Triplets trip;
    for (const Face& f : mesh.faces) {
        if (!f.is_interior()) continue;
        const QuadratureRule rule = face_quadrature(mesh, f, d.face_order());
        const auto sides = detail::face_sides(d, f, rule, true);
        const auto pd = detail::face_pressure_dofs(d, sides);
        const double sigma = d.face_sigma_p(f);
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * np, 2 * np);
        for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(rule.size()); ++q) {
            Eigen::VectorXd jv(2 * np);
            jv.head(np) = sides.pressure[0].value.col(q);
            jv.tail(np) = -sides.pressure[1].value.col(q);
            local.noalias() += rule.weights[static_cast<std::size_t>(q)] * sigma * jv * jv.transpose();
        }
        detail::scatter(trip, local, pd, pd);
    }
    return detail::from_triplets(d.dofs.n_p, d.dofs.n_p, trip);
}

inline SparseMatrix assemble_mass(const Discretization& d, Field which)
{
    const PolyMesh& mesh = *d.mesh;
    Triplets trip;
    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(mesh, k, d.volume_order());
        if (which == Field::pressure) {
            const Eigen::MatrixXd local = local_mass(d.pressure_basis[k], rule);
            const auto dofs = detail::range(d.dofs.pressure_offset[k], d.n_pressure_basis());
            detail::scatter(trip, local, dofs, dofs);
        } else {
            const Eigen::MatrixXd block = local_mass(d.velocity_basis[k], rule);
            const int nb = d.n_velocity_basis();
            for (int c = 0; c < 2; ++c) {
                const auto dofs = detail::range(d.dofs.velocity_offset[k] + static_cast<Index>(c * nb), nb);
                detail::scatter(trip, block, dofs, dofs);
            }
        }
    }
    const Index n = which == Field::pressure ? d.dofs.n_p : d.dofs.n_u;
    return detail::from_triplets(n, n, trip);
}

/// Load vector (f, v) plus the Nitsche lifting of the Dirichlet data g, and
/// the pressure-row data <q, g.n> on the boundary.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_rhs(const Discretization& d, const ExactSolution& exact)
{
    const PolyMesh& mesh = *d.mesh;
    const int nb = d.n_velocity_basis();
    const int np = d.n_pressure_basis();
    Eigen::VectorXd rhs_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.dofs.n_u));
    Eigen::VectorXd rhs_p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.dofs.n_p));

    for (Index k = 0; k < mesh.n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(mesh, k, d.volume_order());
        const BasisValues b = d.velocity_basis[k].evaluate(rule.points);
        Eigen::VectorXd fx(static_cast<Eigen::Index>(rule.size())), fy(static_cast<Eigen::Index>(rule.size()));
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 f = exact.forcing(rule.points[q]);
            fx(static_cast<Eigen::Index>(q)) = rule.weights[q] * f[0];
            fy(static_cast<Eigen::Index>(q)) = rule.weights[q] * f[1];
        }
        const auto off = static_cast<Eigen::Index>(d.dofs.velocity_offset[k]);
        rhs_u.segment(off, nb) += b.value * fx;
        rhs_u.segment(off + nb, nb) += b.value * fy;
    }

    for (const Face& f : mesh.faces) {
        if (f.is_interior()) continue;
        const QuadratureRule rule = face_quadrature(mesh, f, d.face_order());
        const auto sides = detail::face_sides(d, f, rule, true);
        const double sigma = d.face_sigma_v(f);
        const auto voff = static_cast<Eigen::Index>(d.dofs.velocity_offset[f.plus]);
        const auto poff = static_cast<Eigen::Index>(d.dofs.pressure_offset[f.plus]);
        for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(rule.size()); ++q) {
            const double wq = rule.weights[static_cast<std::size_t>(q)];
            const Vec2 g = exact.boundary(rule.points[static_cast<std::size_t>(q)]);
            Eigen::Matrix<double, 4, 1> jg;
            detail::jump_tensor(g[0], g[1], f.normal, d.options.jump, jg.data());
            const auto t = detail::face_trace(d, sides, f, q);
            rhs_u.segment(voff, 2 * nb) += wq * (sigma * t.jump * jg - d.mu * t.avg * jg);
            const double gn = g[0] * f.normal.x + g[1] * f.normal.y;
            rhs_p.segment(poff, np) += wq * gn * sides.pressure[0].value.col(q);
        }
    }
    return {rhs_u, rhs_p};
}

// ---------------------------------------------------------------------------
// Projections

/// Element-wise L2 projection of a scalar function onto the pressure space.
inline Eigen::VectorXd project_pressure(const Discretization& d, const std::function<double(Point2)>& fn, int extra_order = 4)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(d.dofs.n_p));
    for (Index k = 0; k < d.mesh->n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(*d.mesh, k, d.volume_order() + extra_order);
        const BasisValues b = d.pressure_basis[k].evaluate(rule.points);
        Eigen::VectorXd wf(static_cast<Eigen::Index>(rule.size()));
        for (std::size_t q = 0; q < rule.size(); ++q) wf(static_cast<Eigen::Index>(q)) = rule.weights[q] * fn(rule.points[q]);
        const Eigen::MatrixXd M = local_mass(d.pressure_basis[k], rule);
        out.segment(static_cast<Eigen::Index>(d.dofs.pressure_offset[k]), d.n_pressure_basis()) = M.ldlt().solve(b.value * wf);
    }
    return out;
}

/// Element-wise L2 projection of a vector function onto the velocity space.
inline Eigen::VectorXd project_velocity(const Discretization& d, const std::function<Vec2(Point2)>& fn, int extra_order = 4)
{
    const int nb = d.n_velocity_basis();
    Eigen::VectorXd out(static_cast<Eigen::Index>(d.dofs.n_u));
    for (Index k = 0; k < d.mesh->n_elements(); ++k) {
        const QuadratureRule rule = element_quadrature(*d.mesh, k, d.volume_order() + extra_order);
        const BasisValues b = d.velocity_basis[k].evaluate(rule.points);
        Eigen::MatrixXd wf(static_cast<Eigen::Index>(rule.size()), 2);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 v = fn(rule.points[q]);
            wf(static_cast<Eigen::Index>(q), 0) = rule.weights[q] * v[0];
            wf(static_cast<Eigen::Index>(q), 1) = rule.weights[q] * v[1];
        }
        const Eigen::MatrixXd M = local_mass(d.velocity_basis[k], rule);
        const Eigen::MatrixXd c = M.ldlt().solve(b.value * wf);
        const auto off = static_cast<Eigen::Index>(d.dofs.velocity_offset[k]);
        out.segment(off, nb) = c.col(0);
        out.segment(off + nb, nb) = c.col(1);
    }
    return out;
}

/// Coefficients of the globally constant pressure q = 1.
inline Eigen::VectorXd constant_pressure(const Discretization& d)
{
    return project_pressure(d, [](Point2) { return 1.0; }, 0);
}

// ---------------------------------------------------------------------------
// Full system

struct StokesSystem {
    Discretization disc;
    SparseMatrix A;  ///< velocity form, n_u x n_u
    SparseMatrix B;  ///< coupling, n_p x n_u
    SparseMatrix S;  ///< pressure stabilization, n_p x n_p
    SparseMatrix Mp; ///< pressure mass
    SparseMatrix Mu; ///< velocity mass
    Eigen::VectorXd rhs_u;
    Eigen::VectorXd rhs_p;
    Eigen::VectorXd ones_p; ///< coefficients of q = 1

    const PolyMesh& mesh() const { return *disc.mesh; }
    Index n_u() const { return disc.dofs.n_u; }
    Index n_p() const { return disc.dofs.n_p; }
};

/// Assemble every block; the right-hand side is zero when `exact` is null.
inline StokesSystem assemble_system(Discretization disc, const ExactSolution* exact = nullptr)
{
    StokesSystem s;
    s.disc = std::move(disc);
    s.A = assemble_velocity_form(s.disc);
    s.B = assemble_coupling_form(s.disc);
    s.S = assemble_pressure_stab(s.disc);
    s.Mp = assemble_mass(s.disc, Field::pressure);
    s.Mu = assemble_mass(s.disc, Field::velocity);
    if (exact) {
        std::tie(s.rhs_u, s.rhs_p) = assemble_rhs(s.disc, *exact);
    } else {
        s.rhs_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.n_u()));
        s.rhs_p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.n_p()));
    }
    s.ones_p = constant_pressure(s.disc);
    return s;
}

/// Matrix Market coordinate dump (1-based indices).
inline void write_matrix_market(std::ostream& os, const SparseMatrix& M)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << '\n';
    char buf[40];
    for (int j = 0; j < M.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(M, j); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
        }
}

} // namespace polydg
