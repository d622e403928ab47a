#include "polydg/studies.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace polydg;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check, double time_limit_s = 0.0)
{
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (time_limit_s > 0.0 && secs > time_limit_s) {
        o.pass = false;
        o.detail += " [over time limit " + std::to_string(time_limit_s) + " s]";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s | %s | %.1f s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double ratio(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

double beta(const PolyMesh& mesh, int ell, int m, int eta)
{
    return compute_beta(assemble_system(make_discretization(mesh, ell, m)), eta).beta_h;
}

Outcome h_convergence()
{
    RunConfig c;
    c.levels = {1, 2, 3, 4};
    c.m = {4};
    const auto rows = run_h_study(c);
    const auto& r = rows.back();
    const double dg = *r.eoc_u_DG, l2u = *r.eoc_u_L2, l2p = *r.eoc_p_L2;
    const bool ok = std::abs(dg - 4.0) <= 0.3 && std::abs(l2u - 5.0) <= 0.4 && l2p >= 3.7;
    return {ok, "EOC DG " + fmt("%.3f", dg) + ", L2u " + fmt("%.3f", l2u) + ", L2p " + fmt("%.3f", l2p)};
}

Outcome p_convergence()
{
    RunConfig c;
    c.family = Family::voronoi;
    c.n_el = 160;
    c.m = {1, 2, 3, 4, 5, 6};
    const auto rows = run_p_study(c);
    bool ok = rows.front().n_el == 160;
    std::string d = "DG";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d += " " + fmt("%.3e", rows[i].errors.err_u_DG);
        if (i == 0) continue;
        const double f = rows[i].errors.err_u_DG / rows[i - 1].errors.err_u_DG;
        ok = ok && f < 1.0 && (rows[i].m < 3 || f <= 0.5);
    }
    return {ok, d};
}

Outcome h_robustness()
{
    bool ok = true;
    double worst = 0.0;
    for (Family fam : {Family::triangular, Family::voronoi})
        for (int m : {1, 2})
            for (int k : {0, 1}) {
                RunConfig c;
                c.family = fam;
                c.levels = {0, 1, 2, 3};
                c.m = {m};
                c.k = {k};
                std::vector<double> b;
                for (const auto& r : run_infsup_study(c)) b.push_back(r.beta_h);
                worst = std::max(worst, ratio(b));
                ok = ok && ratio(b) <= 1.25;
            }
    return {ok, "worst max/min " + fmt("%.4f", worst)};
}

Outcome degree_scaling()
{
    const PolyMesh mesh = gen_triangular(2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 5;
    for (int m = 1; m <= n; ++m) {
        const double x = std::log(m), y = std::log(beta(mesh, m, m, 1));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope >= -0.75 && slope <= -0.25, "slope " + fmt("%.4f", slope)};
}

Outcome degenerate_edges()
{
    bool ok = true;
    double worst = 0.0;
    for (int k : {0, 1, 2})
        for (int eta : {0, 1}) {
            if (k == 0 && eta == 0) continue;
            std::vector<double> b;
            for (int level = 0; level <= 4; ++level) b.push_back(beta(gen_degenerate_edges(level), 1 + k, 1, eta));
            worst = std::max(worst, ratio(b));
            ok = ok && ratio(b) <= 1.2;
        }
    return {ok, "worst max/min " + fmt("%.4f", worst)};
}

Outcome rotating_hole()
{
    RunConfig c;
    c.family = Family::rotating_hole;
    c.levels = {1};
    for (int t = 0; t <= 180; t += 15) c.theta_grid.push_back(t);
    c.m = {1};
    c.k = {0, 1, 2};
    c.eta = {1};
    bool ok = true;
    double worst = 0.0;
    const auto stab = run_infsup_study(c);
    for (int k : c.k) {
        std::vector<double> b;
        for (const auto& r : stab)
            if (r.k == k) b.push_back(r.beta_h);
        worst = std::max(worst, ratio(b));
        ok = ok && ratio(b) <= 1.3;
    }
    c.k = {1, 2};
    c.eta = {0};
    double min_unstab = INFINITY;
    for (const auto& r : run_infsup_study(c)) min_unstab = std::min(min_unstab, r.beta_h);
    ok = ok && min_unstab > 0.0;
    return {ok, "eta=1 worst max/min " + fmt("%.4f", worst) + ", eta=0 min beta " + fmt("%.4e", min_unstab)};
}

Outcome oracle()
{
    const StokesSystem s = assemble_system(make_discretization(gen_triangular(2), 1, 1));
    double worst = 0.0;
    for (int eta : {0, 1}) {
        const double prod = compute_beta(s, eta).beta_h;
        const double brute = brute_force_beta(s, eta);
        worst = std::max(worst, std::abs(prod - brute) / brute);
    }
    return {worst <= 1e-10, "max relative difference " + fmt("%.2e", worst)};
}

Outcome structural()
{
    double sym = 0, psd = 0, defl = 0, dual = 0, quad = 0;
    const Family families[] = {Family::triangular, Family::voronoi, Family::distorted,
                               Family::agglomerated, Family::degenerate_edges, Family::rotating_hole};
    for (Family fam : families) {
        const PolyMesh mesh = make_family_mesh({fam, 1, 1, 30.0});
        for (auto [ell, m] : {std::pair{1, 1}, {2, 1}, {2, 2}}) {
            const Discretization d = make_discretization(mesh, ell, m);
            const StokesSystem s = assemble_system(d);
            const SparseMatrix At = s.A.transpose();
            sym = std::max(sym, (s.A - At).norm() / s.A.norm());

            const Eigen::MatrixXd S(s.S);
            const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues();
            if (ev.maxCoeff() > 0.0) psd = std::max(psd, -ev.minCoeff() / ev.maxCoeff());

            for (int eta : {0, 1})
                if (ell > m || eta == 1) defl = std::max(defl, compute_beta(s, eta).deflation_residual);

            const SparseMatrix Bg = assemble_coupling_form(d, CouplingForm::gradient);
            dual = std::max(dual, (s.B - Bg).norm() / s.B.norm());

            Rng rng(7);
            Eigen::VectorXd v(s.A.rows()), q(s.S.rows());
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform() - 0.5;
            for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = rng.uniform() - 0.5;
            const double full = v.dot(s.A * v) + v.dot(s.B.transpose() * q) - q.dot(s.B * v) + q.dot(s.S * q);
            const double expected = v.dot(s.A * v) + q.dot(s.S * q);
            quad = std::max(quad, std::abs(full - expected) / std::abs(expected));
        }
    }
    const bool ok = sym <= 1e-14 && psd <= 1e-12 && defl <= 1e-10 && dual <= 1e-11 && quad <= 1e-13;
    return {ok, "asym " + fmt("%.1e", sym) + ", S min/max eig " + fmt("%.1e", -psd) + ", deflation " + fmt("%.1e", defl) +
                    ", dual forms " + fmt("%.1e", dual) + ", quadratic " + fmt("%.1e", quad)};
}

// x^a y^b over a polygon via oint x^{a+1} y^b dy / (a+1)
double green_monomial(const std::vector<Point2>& poly, int a, int b)
{
    const auto [x, w] = gauss_legendre((a + b + 2) / 2 + 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 p = poly[i], q = poly[(i + 1) % poly.size()];
        for (std::size_t g = 0; g < x.size(); ++g) {
            const Point2 s = p + 0.5 * (x[g] + 1.0) * (q - p);
            sum += 0.5 * w[g] * std::pow(s.x, a + 1) * std::pow(s.y, b) * (q.y - p.y);
        }
    }
    return sum / (a + 1);
}

Outcome quadrature_basis()
{
    double quad = 0.0;
    const PolyMesh pentagon =
        build_connectivity({{0.1, 0.05}, {0.9, 0.2}, {1.0, 0.7}, {0.45, 1.0}, {0.0, 0.6}}, {{0, 1, 2, 3, 4}});
    const PolyMesh lshape = build_connectivity({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {{0, 1, 2, 3, 4, 5}});
    for (const PolyMesh& m : {pentagon, lshape, make_family_mesh({Family::agglomerated, 0}),
                              make_family_mesh({Family::distorted, 0})})
        for (Index k = 0; k < m.n_elements(); ++k) {
            const auto poly = m.element_points(k);
            for (int d = 0; d <= 10; ++d) {
                const QuadratureRule r = element_quadrature(m, k, d);
                for (int a = 0; a <= d; ++a) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < r.size(); ++i)
                        s += r.weights[i] * std::pow(r.points[i].x, a) * std::pow(r.points[i].y, d - a);
                    const double o = green_monomial(poly, a, d - a);
                    // relative to the integral of |x^a y^b| scale where the signed value is tiny
                    const double scale = std::max(std::abs(o), 1e-3 * m.elements[k].area * std::pow(2.0, d));
                    quad = std::max(quad, std::abs(s - o) / scale);
                }
            }
        }

    double grad = 0.0;
    const PolyMesh v = make_family_mesh({Family::voronoi, 1});
    Rng rng(5);
    for (bool ortho : {false, true})
        for (Index k = 0; k < v.n_elements(); ++k) {
            ElementBasis b(v, k, 5);
            if (ortho) b.orthonormalize(element_quadrature(v, k, 12));
            const BoundingBox box = v.elements[k].bbox;
            const Point2 p{box.min.x + rng.uniform() * (box.max.x - box.min.x),
                           box.min.y + rng.uniform() * (box.max.y - box.min.y)};
            const double h = 1e-2 * std::min(b.half_extents().x, b.half_extents().y);
            const BasisValues c = b.evaluate(p);
            // sixth-order central difference: exact up to roundoff for degree <= 6
            const double w[3] = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
            Eigen::VectorXd fx = Eigen::VectorXd::Zero(b.size()), fy = fx;
            for (int j = 1; j <= 3; ++j) {
                fx += w[j - 1] * (b.evaluate(Point2{p.x + j * h, p.y}).value - b.evaluate(Point2{p.x - j * h, p.y}).value) / h;
                fy += w[j - 1] * (b.evaluate(Point2{p.x, p.y + j * h}).value - b.evaluate(Point2{p.x, p.y - j * h}).value) / h;
            }
            grad = std::max({grad, (c.dx.col(0) - fx).cwiseAbs().maxCoeff(), (c.dy.col(0) - fy).cwiseAbs().maxCoeff()});
        }
    return {quad <= 1e-11 && grad <= 1e-6, "Green oracle " + fmt("%.1e", quad) + ", gradient FD " + fmt("%.1e", grad)};
}

} // namespace

int main()
{
    report(1, "h-convergence, triangular n=4..32, l=m=4", h_convergence, 180.0);
    report(2, "p-convergence, Voronoi 160 elements, m=1..6", p_convergence, 300.0);
    report(3, "inf-sup h-robustness, eta=1", h_robustness, 300.0);
    report(4, "inf-sup degree scaling, 8-element mesh", degree_scaling);
    report(5, "degenerate-edge robustness", degenerate_edges);
    report(6, "rotating-hole robustness", rotating_hole);
    report(7, "oracle equivalence", oracle, 5.0);
    report(8, "structural invariants", structural);
    report(9, "quadrature and basis oracles", quadrature_basis);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
