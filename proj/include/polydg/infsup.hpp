// Discrete generalized inf-sup constant.
//
// beta_h^2 is the smallest eigenvalue of
//   (B A^{-1} B^T + eta S) q = lambda M q
// on the M-orthogonal complement of the constant pressure.
#pragma once

#include "polydg/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cstdio>
#include <vector>

namespace polydg {

struct InfSupResult {
    double beta_h = 0.0;
    double lambda_min = 0.0;
    int eta = 1;
    double deflation_residual = 0.0; ///< |G 1_c| / |G|
    std::vector<double> spectrum_head;
    bool clamped = false;
};

/// Dense G = B A^{-1} B^T + eta S, formed from multi-right-hand-side solves
/// against one factorization of A.
inline Eigen::MatrixXd schur_complement(const StokesSystem& s, int eta, int block = 128)
{
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(s.A);
    if (ldlt.info() != Eigen::Success) throw NumericalError("velocity matrix factorization failed (gamma_v may be too small)");
    if ((ldlt.vectorD().array() <= 0.0).any()) throw NumericalError("velocity matrix is not positive definite (gamma_v too small)");
    const auto np = static_cast<Eigen::Index>(s.n_p());
    const SparseMatrix Bt = s.B.transpose();
    Eigen::MatrixXd G(np, np);
    for (Eigen::Index c0 = 0; c0 < np; c0 += block) {
        const Eigen::Index nc = std::min<Eigen::Index>(block, np - c0);
        const Eigen::MatrixXd rhs = Eigen::MatrixXd(Bt.middleCols(c0, nc));
        const Eigen::MatrixXd X = ldlt.solve(rhs);
        G.middleCols(c0, nc) = s.B * X;
    }
    G = 0.5 * (G + G.transpose());
    if (eta != 0) G += Eigen::MatrixXd(s.S);
    return G;
}

namespace detail {

struct Deflation {
    Eigen::MatrixXd L;       ///< Cholesky factor of M
    Eigen::VectorXd w;       ///< Householder vector, H e_1 parallel to L^T 1_c
    Eigen::MatrixXd reduced; ///< (H L^{-1} G L^{-T} H) without its first row and column
};

inline Eigen::MatrixXd householder_apply(const Eigen::VectorXd& w, Eigen::MatrixXd X)
{
    // H X with H = I - 2 w w^T / (w^T w)
    const double ww = w.squaredNorm();
    if (ww == 0.0) return X;
    X.noalias() -= (2.0 / ww) * w * (w.transpose() * X);
    return X;
}

inline Deflation deflate(const Eigen::MatrixXd& G, const Eigen::MatrixXd& M, const Eigen::VectorXd& ones)
{
    Deflation d;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw NumericalError("pressure mass matrix is not positive definite");
    d.L = llt.matrixL();
    const auto n = G.rows();
    const Eigen::VectorXd u = d.L.transpose() * ones;
    d.w = u;
    const double nu = u.norm();
    d.w(0) += (u(0) >= 0.0 ? nu : -nu);
    Eigen::MatrixXd K = llt.matrixL().solve(G);
    K = llt.matrixL().solve(K.transpose()).transpose();
    K = householder_apply(d.w, std::move(K));
    K = householder_apply(d.w, K.transpose()).transpose();
    d.reduced = 0.5 * (K.bottomRightCorner(n - 1, n - 1) + K.bottomRightCorner(n - 1, n - 1).transpose());
    return d;
}

} // namespace detail

/// M-orthonormal basis of {q : 1_c^T M q = 0}.
inline Eigen::MatrixXd deflation_basis(const Eigen::MatrixXd& M, const Eigen::VectorXd& ones)
{
    const auto n = M.rows();
    const detail::Deflation d = detail::deflate(Eigen::MatrixXd::Zero(n, n), M, ones);
    const Eigen::MatrixXd H = detail::householder_apply(d.w, Eigen::MatrixXd::Identity(n, n));
    return d.L.transpose().triangularView<Eigen::Upper>().solve(H.rightCols(n - 1));
}

inline InfSupResult beta_from_pencil(const Eigen::MatrixXd& G, const Eigen::MatrixXd& M, const Eigen::VectorXd& ones,
                                     int eta)
{
    if (G.rows() < 2) throw NumericalError("inf-sup: need at least two pressure dofs");
    InfSupResult r;
    r.eta = eta;
    const double gnorm = G.norm();
    r.deflation_residual = gnorm > 0.0 ? (G * ones).norm() / gnorm : 0.0;

    const detail::Deflation d = detail::deflate(G, M, ones);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.reduced, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("inf-sup eigensolver did not converge");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = std::max(ev.maxCoeff(), 0.0);
    r.lambda_min = ev(0);
    if (r.lambda_min < -1e-10 * lmax) throw NumericalError("inf-sup pencil has a negative eigenvalue (assembly error)");
    if (r.lambda_min < 0.0) {
        std::fprintf(stderr, "warning: clamping lambda_min = %.3e to zero\n", r.lambda_min);
        r.clamped = true;
    }
    r.beta_h = std::sqrt(std::max(r.lambda_min, 0.0));
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, ev.size()); ++i) r.spectrum_head.push_back(ev(i));
    return r;
}

inline InfSupResult compute_beta(const StokesSystem& s, int eta)
{
    if (eta != 0 && eta != 1) throw std::invalid_argument("eta must be 0 or 1");
    const Eigen::MatrixXd G = schur_complement(s, eta);
    return beta_from_pencil(G, Eigen::MatrixXd(s.Mp), s.ones_p, eta);
}

/// Reference value from the full undeflated pencil: dense inverse of A,
/// generalized eigendecomposition, and the smallest eigenvalue whose
/// eigenvector is M-orthogonal to the constant pressure.
inline double brute_force_beta(const StokesSystem& s, int eta)
{
    const Eigen::MatrixXd A(s.A);
    const Eigen::MatrixXd B(s.B);
    const Eigen::MatrixXd M(s.Mp);
    Eigen::MatrixXd G = B * A.fullPivLu().inverse() * B.transpose();
    G = 0.5 * (G + G.transpose());
    if (eta != 0) G += Eigen::MatrixXd(s.S);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(G, M);
    const Eigen::VectorXd c = M * s.ones_p / std::sqrt(s.ones_p.dot(M * s.ones_p));
    // the constant mode is the eigenvector most aligned with 1_c
    Eigen::Index skip = 0;
    (es.eigenvectors().transpose() * c).cwiseAbs().maxCoeff(&skip);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        if (i != skip) best = std::min(best, es.eigenvalues()(i));
    return std::sqrt(std::max(best, 0.0));
}

} // namespace polydg
