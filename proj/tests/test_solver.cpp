#include "polydg/solver.hpp"
#include "polydg/mesh_generators.hpp"

#include <gtest/gtest.h>

using namespace polydg;

namespace {

// u = (y^2, x^2) is divergence free; p = x - 1/2 has zero mean.
ExactSolution quadratic_pair(double mu = 1.0)
{
    ExactSolution ex;
    ex.velocity = [](Point2 p) { return Vec2{p.y * p.y, p.x * p.x}; };
    ex.velocity_gradient = [](Point2 p) { return Tensor2{0.0, 2.0 * p.y, 2.0 * p.x, 0.0}; };
    ex.pressure = [](Point2 p) { return p.x - 0.5; };
    ex.forcing = [mu](Point2) { return Vec2{-2.0 * mu + 1.0, -2.0 * mu}; };
    ex.boundary = ex.velocity;
    return ex;
}

} // namespace

TEST(Solve, ZeroDataGivesZero)
{
    const ExactSolution zero = zero_solution();
    const StokesSystem s = assemble_system(make_discretization(gen_voronoi_regular(10), 2, 1), &zero);
    const DiscreteSolution sol = solve_stationary(s);
    EXPECT_EQ(sol.U.norm(), 0.0);
    EXPECT_EQ(sol.P.norm(), 0.0);
}

TEST(Solve, MatchesDenseOracleOnTwoElements)
{
    const ExactSolution ex = manufactured_solution();
    const StokesSystem s = assemble_system(make_discretization(gen_triangular(1), 1, 1), &ex);
    const DiscreteSolution sol = solve_stationary(s);
    const Eigen::MatrixXd K(bordered_matrix(s));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K.rows());
    rhs.head(s.rhs_u.size()) = s.rhs_u;
    rhs.segment(s.rhs_u.size(), s.rhs_p.size()) = s.rhs_p;
    const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
    Eigen::VectorXd mine(K.rows() - 1);
    mine << sol.U, sol.P;
    EXPECT_LT((mine - x.head(K.rows() - 1)).norm(), 1e-10 * x.norm());
}

TEST(Solve, ResidualAndZeroMean)
{
    const ExactSolution ex = manufactured_solution();
    for (const PolyMesh& mesh : {gen_triangular(4), gen_voronoi_regular(40), gen_agglomerated(60, 10), gen_rotating_hole(40.0, 8)}) {
        const StokesSystem s = assemble_system(make_discretization(mesh, 2, 2), &ex);
        const DiscreteSolution sol = solve_stationary(s);
        EXPECT_LE(sol.residual_norm, 1e-9);
        const double pn = std::sqrt(sol.P.dot(s.Mp * sol.P));
        EXPECT_LE(std::abs(sol.mean_pressure), 1e-10 * pn);
    }
}

TEST(Solve, ReproducesPolynomialPair)
{
    const ExactSolution ex = quadratic_pair();
    for (const PolyMesh& mesh : {gen_triangular(3), gen_voronoi_regular(20), gen_distorted(20, 3), gen_agglomerated(40, 6)}) {
        const StokesSystem s = assemble_system(make_discretization(mesh, 2, 1), &ex);
        const DiscreteSolution sol = solve_stationary(s);
        const ErrorReport e = compute_errors(sol, s, ex);
        // DG norm of the exact velocity: |grad u| integrates to 8/3
        const double ref = std::sqrt(8.0 / 3.0);
        EXPECT_LT(e.err_u_DG, 1e-8 * ref);
        EXPECT_LT(e.err_u_L2, 1e-8);
        EXPECT_LT(e.err_p_L2, 1e-8);
    }
}

TEST(Solve, MultiplierAbsorbsIncompatibleBoundaryFlux)
{
    ExactSolution ex = zero_solution();
    ex.boundary = [](Point2 p) { return Vec2{p.x, 0.0}; }; // net outflow 1
    const StokesSystem s = assemble_system(make_discretization(gen_voronoi_regular(20), 2, 1), &ex);
    const DiscreteSolution sol = solve_stationary(s);
    EXPECT_NE(sol.multiplier, 0.0);
    EXPECT_LE(sol.residual_norm, 1e-12);
    EXPECT_GT(stokes_residual(s, sol.U, sol.P), 1e-3);

    const ExactSolution compatible = manufactured_solution();
    const StokesSystem c = assemble_system(make_discretization(gen_triangular(4), 2, 2), &compatible);
    EXPECT_LT(std::abs(solve_stationary(c).multiplier), 1e-6);
}

TEST(Solve, EnergyIdentityWithBoundaryData)
{
    ExactSolution ex = zero_solution();
    ex.boundary = [](Point2 p) { return Vec2{std::sin(3 * p.y), p.x * p.x}; };
    const StokesSystem s = assemble_system(make_discretization(gen_voronoi_regular(20), 2, 2), &ex);
    const DiscreteSolution sol = solve_stationary(s);
    const double full = sol.U.dot(s.A * sol.U) + sol.U.dot(s.B.transpose() * sol.P) - sol.P.dot(s.B * sol.U) +
                        sol.P.dot(s.S * sol.P);
    const double expected = sol.U.dot(s.A * sol.U) + sol.P.dot(s.S * sol.P);
    EXPECT_NEAR(full, expected, 1e-12 * std::abs(expected));
}

TEST(Errors, SelfComparisonIsZero)
{
    // a continuous discrete field injected as the exact solution
    const ExactSolution ex = quadratic_pair();
    const StokesSystem s = assemble_system(make_discretization(gen_voronoi_regular(20), 2, 1), &ex);
    DiscreteSolution sol;
    sol.U = project_velocity(s.disc, ex.velocity);
    sol.P = project_pressure(s.disc, ex.pressure);
    const ErrorReport e = compute_errors(sol, s, ex);
    EXPECT_LE(e.err_u_L2, 1e-12);
    EXPECT_LE(e.err_u_DG, 1e-12);
    EXPECT_LE(e.err_p_L2, 1e-12);
    EXPECT_LE(e.err_p_jump, 1e-12);
}

TEST(Errors, ContinuousPressureHasNoJump)
{
    const StokesSystem s = assemble_system(make_discretization(gen_agglomerated(40, 6), 2, 2));
    DiscreteSolution sol;
    sol.U = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.n_u()));
    sol.P = project_pressure(s.disc, [](Point2 p) { return p.x * p.y - 0.25; });
    EXPECT_LE(compute_errors(sol, s, zero_solution()).err_p_jump, 1e-12);
}

TEST(Errors, RefinedQuadratureAgrees)
{
    const ExactSolution ex = manufactured_solution();
    const StokesSystem s = assemble_system(make_discretization(gen_triangular(4), 2, 2), &ex);
    const DiscreteSolution sol = solve_stationary(s);
    const ErrorReport a = compute_errors(sol, s, ex);
    const ErrorReport b = compute_errors(sol, s, ex, s.disc.volume_order() + 8);
    EXPECT_NEAR(a.err_u_L2, b.err_u_L2, 1e-6 * b.err_u_L2);
    EXPECT_NEAR(a.err_u_DG, b.err_u_DG, 1e-6 * b.err_u_DG);
    EXPECT_NEAR(a.err_p_L2, b.err_p_L2, 1e-6 * b.err_p_L2);
    EXPECT_NEAR(a.err_p_jump, b.err_p_jump, 1e-6 * b.err_p_jump);
    EXPECT_GT(a.err_u_L2, 0.0);
    EXPECT_DOUBLE_EQ(a.h, s.mesh().max_diameter());
}

TEST(ManufacturedSolution, DivergenceFreeZeroMeanAndForcing)
{
    const ExactSolution ex = manufactured_solution(0.7);
    EXPECT_NEAR(integrate_unit_square(ex.pressure, 60), 0.0, 1e-14);
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const Point2 p{rng.uniform(), rng.uniform()};
        const Tensor2 g = ex.velocity_gradient(p);
        EXPECT_NEAR(g[0] + g[3], 0.0, 1e-10);
        // finite-difference check of f = -mu Lap u + grad p
        const double h = 1e-4;
        auto u = ex.velocity;
        Vec2 lap{};
        for (int c = 0; c < 2; ++c)
            lap[c] = (u({p.x + h, p.y})[c] + u({p.x - h, p.y})[c] + u({p.x, p.y + h})[c] + u({p.x, p.y - h})[c] -
                      4 * u(p)[c]) / (h * h);
        const double px = (ex.pressure({p.x + h, p.y}) - ex.pressure({p.x - h, p.y})) / (2 * h);
        const double py = (ex.pressure({p.x, p.y + h}) - ex.pressure({p.x, p.y - h})) / (2 * h);
        const Vec2 f = ex.forcing(p);
        EXPECT_NEAR(f[0], -0.7 * lap[0] + px, 1e-4);
        EXPECT_NEAR(f[1], -0.7 * lap[1] + py, 1e-4);
        // gradient against finite differences
        EXPECT_NEAR(g[1], (u({p.x, p.y + h})[0] - u({p.x, p.y - h})[0]) / (2 * h), 1e-6);
    }
}
