// Mesh families, convergence and inf-sup study drivers, CSV output.
#pragma once

#include "polydg/infsup.hpp"
#include "polydg/mesh_generators.hpp"
#include "polydg/mesh_io.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace polydg {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { triangular, voronoi, distorted, agglomerated, degenerate_edges, rotating_hole };

inline const char* family_name(Family f)
{
    switch (f) {
    case Family::triangular: return "triangular";
    case Family::voronoi: return "voronoi";
    case Family::distorted: return "distorted";
    case Family::agglomerated: return "agglomerated";
    case Family::degenerate_edges: return "degenerate-edges";
    case Family::rotating_hole: return "rotating-hole";
    }
    return "?";
}

inline Family parse_family(const std::string& s)
{
    for (Family f : {Family::triangular, Family::voronoi, Family::distorted, Family::agglomerated,
                     Family::degenerate_edges, Family::rotating_hole})
        if (s == family_name(f)) return f;
    throw ConfigError("unknown mesh family '" + s + "'");
}

inline constexpr int kDistortInsertions = 3;
inline constexpr int kAgglomerationRatio = 6;

struct MeshSpec {
    Family family = Family::triangular;
    int level = 1;
    std::uint64_t seed = 1;
    double theta = 0.0;          ///< rotating-hole angle in degrees
    std::optional<int> n_el{};   ///< element count override for seeded families
};

/// Element count of the seeded families at a level: 5 * 4^level
/// (agglomerated: 8 * 4^level coarse cells).
inline int family_element_count(const MeshSpec& s)
{
    if (s.n_el) return *s.n_el;
    const int base = s.family == Family::agglomerated ? 8 : 5;
    return base << (2 * s.level);
}

/// Level -> mesh:
///   triangular        n = 2^(level+1) squares per side
///   voronoi           5 * 4^level Lloyd-relaxed cells
///   distorted         voronoi + up to 3 points inserted per interior edge
///   agglomerated      8 * 4^level regions grown from 6x as many cells
///   degenerate-edges  recursive midpoints, 3 * 2^level edges on the center element
///   rotating-hole     8 * 2^level triangle grid with a rotated slit
inline PolyMesh make_family_mesh(const MeshSpec& s)
{
    if (s.level < 0 || s.level > 12) throw ConfigError("level out of range: " + std::to_string(s.level));
    switch (s.family) {
    case Family::triangular: return gen_triangular(2 << s.level);
    case Family::voronoi: return gen_voronoi_regular(family_element_count(s), kDefaultLloydIterations, s.seed);
    case Family::distorted: return gen_distorted(family_element_count(s), kDistortInsertions, s.seed);
    case Family::agglomerated: {
        const int n = family_element_count(s);
        return gen_agglomerated(kAgglomerationRatio * n, n, s.seed);
    }
    case Family::degenerate_edges: return gen_degenerate_edges(s.level);
    case Family::rotating_hole: return gen_rotating_hole(s.theta, 8 << s.level);
    }
    throw ConfigError("unknown family");
}

// ---------------------------------------------------------------------------
// Records

struct ConvergenceRecord {
    std::string family;
    int level = 0;
    double h = 0.0;
    Index n_el = 0;
    int ell = 0;
    int m = 0;
    double gamma_v = 0.0;
    double gamma_p = 0.0;
    ErrorReport errors{};
    std::optional<double> eoc_u_L2, eoc_u_DG, eoc_p_L2;
};

struct InfSupRecord {
    std::string family;
    int level = 0;
    double h = 0.0;
    Index n_el = 0;
    int ell = 0;
    int m = 0;
    int k = 0;
    int eta = 1;
    double gamma_v = 0.0;
    double gamma_p = 0.0;
    std::optional<double> theta;
    double beta_h = 0.0;
};

inline double eoc(double e1, double e2, double h1, double h2) { return std::log(e1 / e2) / std::log(h1 / h2); }

inline constexpr const char* kConvergenceHeader =
    "family,level,h,n_el,ell,m,gamma_v,gamma_p,err_u_L2,err_u_DG,err_p_L2,err_p_jump,eoc_u_L2,eoc_u_DG,eoc_p_L2";
inline constexpr const char* kInfSupHeader = "family,level,h,n_el,ell,m,k,eta,gamma_v,gamma_p,theta,beta_h";

inline std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

inline void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows)
{
    os << kConvergenceHeader << '\n';
    for (const auto& r : rows)
        os << r.family << ',' << r.level << ',' << format_real(r.h) << ',' << r.n_el << ',' << r.ell << ',' << r.m << ','
           << format_real(r.gamma_v) << ',' << format_real(r.gamma_p) << ',' << format_real(r.errors.err_u_L2) << ','
           << format_real(r.errors.err_u_DG) << ',' << format_real(r.errors.err_p_L2) << ','
           << format_real(r.errors.err_p_jump) << ',' << format_optional(r.eoc_u_L2) << ','
           << format_optional(r.eoc_u_DG) << ',' << format_optional(r.eoc_p_L2) << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<InfSupRecord>& rows)
{
    os << kInfSupHeader << '\n';
    for (const auto& r : rows)
        os << r.family << ',' << r.level << ',' << format_real(r.h) << ',' << r.n_el << ',' << r.ell << ',' << r.m << ','
           << r.k << ',' << r.eta << ',' << format_real(r.gamma_v) << ',' << format_real(r.gamma_p) << ','
           << format_optional(r.theta) << ',' << format_real(r.beta_h) << '\n';
}

/// Fill EOC columns between consecutive records.
inline void fill_eoc(std::vector<ConvergenceRecord>& rows)
{
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        auto& b = rows[i];
        b.eoc_u_L2 = eoc(a.errors.err_u_L2, b.errors.err_u_L2, a.h, b.h);
        b.eoc_u_DG = eoc(a.errors.err_u_DG, b.errors.err_u_DG, a.h, b.h);
        b.eoc_p_L2 = eoc(a.errors.err_p_L2, b.errors.err_p_L2, a.h, b.h);
    }
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
    Family family = Family::triangular;
    std::vector<int> levels{1};
    std::vector<int> ell{};   ///< empty: same as m (+ k for inf-sup)
    std::vector<int> m{1};
    std::vector<int> k{0};
    std::vector<int> eta{1};
    PenaltyParams penalty{};
    double mu = 1.0;
    std::uint64_t seed = 1;
    std::vector<double> theta_grid{};
    std::optional<int> n_el{};
    int threads = 1;
    FormOptions forms{};

    void validate() const
    {
        if (levels.empty()) throw ConfigError("no levels given");
        for (int l : levels)
            if (l < 0 || l > 12) throw ConfigError("level out of range: " + std::to_string(l));
        if (m.empty()) throw ConfigError("no pressure degree given");
        for (int v : m)
            if (v < 0 || v > 12) throw ConfigError("pressure degree out of range: " + std::to_string(v));
        for (int v : ell)
            if (v < 1 || v > 12) throw ConfigError("velocity degree out of range: " + std::to_string(v));
        for (int v : k)
            if (v < 0 || v > 4) throw ConfigError("k must be in 0..4");
        for (int v : eta)
            if (v != 0 && v != 1) throw ConfigError("eta must be 0 or 1");
        if (!(penalty.gamma_v > 0.0) || !(penalty.gamma_p > 0.0)) throw ConfigError("penalty parameters must be positive");
        if (!(mu > 0.0)) throw ConfigError("viscosity must be positive");
        if (threads < 1) throw ConfigError("threads must be >= 1");
        if (n_el && *n_el < 1) throw ConfigError("element count must be positive");
        if (!theta_grid.empty() && family != Family::rotating_hole)
            throw ConfigError("theta grid applies to the rotating-hole family only");
    }

    MeshSpec mesh_spec(int level, double theta = 0.0) const { return {family, level, seed, theta, n_el}; }

    std::vector<double> thetas() const
    {
        if (family != Family::rotating_hole) return {0.0};
        if (!theta_grid.empty()) return theta_grid;
        std::vector<double> out;
        for (int t = 0; t <= 180; t += 5) out.push_back(t);
        return out;
    }
};

/// Run jobs[i] for every i on up to `threads` workers and return results in
/// index order. The first exception is rethrown after all workers stop.
template <class R>
std::vector<R> run_pool(std::size_t n, int threads, const std::function<R(std::size_t)>& job)
{
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto nt = static_cast<std::size_t>(std::max(1, threads));
    if (nt == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(nt, n); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------------------
// Studies

inline ConvergenceRecord solve_and_measure(const RunConfig& cfg, const PolyMesh& mesh, int level, int ell, int m,
                                           const ExactSolution& exact)
{
    auto mesh_ptr = std::make_shared<const PolyMesh>(mesh);
    const StokesSystem s = assemble_system(make_discretization(mesh_ptr, ell, m, cfg.mu, cfg.penalty, cfg.forms), &exact);
    const DiscreteSolution sol = solve_stationary(s);
    ConvergenceRecord r;
    r.family = family_name(cfg.family);
    r.level = level;
    r.n_el = mesh.n_elements();
    r.ell = ell;
    r.m = m;
    r.gamma_v = cfg.penalty.gamma_v;
    r.gamma_p = cfg.penalty.gamma_p;
    r.errors = compute_errors(sol, s, exact);
    r.h = r.errors.h;
    return r;
}

inline int velocity_degree(const RunConfig& cfg, std::size_t i, int m)
{
    if (cfg.ell.empty()) return std::max(m, 1);
    return cfg.ell[std::min(i, cfg.ell.size() - 1)];
}

/// One solve per level at fixed degrees; EOC between consecutive levels.
inline std::vector<ConvergenceRecord> run_h_study(const RunConfig& cfg)
{
    cfg.validate();
    const int m = cfg.m.front();
    const int ell = velocity_degree(cfg, 0, m);
    const ExactSolution exact = manufactured_solution(cfg.mu);
    auto rows = run_pool<ConvergenceRecord>(cfg.levels.size(), cfg.threads, [&](std::size_t i) {
        const int level = cfg.levels[i];
        return solve_and_measure(cfg, make_family_mesh(cfg.mesh_spec(level)), level, ell, m, exact);
    });
    fill_eoc(rows);
    return rows;
}

/// One mesh, degree sweep over cfg.m (velocity degree from cfg.ell or equal
/// to m).
inline std::vector<ConvergenceRecord> run_p_study(const RunConfig& cfg)
{
    cfg.validate();
    const int level = cfg.levels.front();
    const PolyMesh mesh = make_family_mesh(cfg.mesh_spec(level));
    const ExactSolution exact = manufactured_solution(cfg.mu);
    return run_pool<ConvergenceRecord>(cfg.m.size(), cfg.threads, [&](std::size_t i) {
        const int m = cfg.m[i];
        return solve_and_measure(cfg, mesh, level, velocity_degree(cfg, i, m), m, exact);
    });
}

inline InfSupResult beta_for(const RunConfig& cfg, const PolyMesh& mesh, int ell, int m, int eta)
{
    auto mesh_ptr = std::make_shared<const PolyMesh>(mesh);
    const StokesSystem s = assemble_system(make_discretization(mesh_ptr, ell, m, cfg.mu, cfg.penalty, cfg.forms));
    return compute_beta(s, eta);
}

/// Records for every (k, eta, m, level, theta) in that nesting order; the
/// pair is P^{m+k} - P^m. Equal order without stabilization is refused.
inline std::vector<InfSupRecord> run_infsup_study(const RunConfig& cfg)
{
    cfg.validate();
    for (int k : cfg.k)
        for (int eta : cfg.eta)
            if (k == 0 && eta == 0)
                throw ConfigError("k = 0 with eta = 0 (unstabilized equal order) is not a supported configuration");

    struct Job {
        int k, eta, m, level;
        std::optional<double> theta;
    };
    std::vector<Job> jobs;
    const bool hole = cfg.family == Family::rotating_hole;
    for (int k : cfg.k)
        for (int eta : cfg.eta)
            for (int m : cfg.m)
                for (int level : cfg.levels)
                    for (double th : cfg.thetas())
                        jobs.push_back({k, eta, m, level, hole ? std::optional<double>(th) : std::nullopt});

    return run_pool<InfSupRecord>(jobs.size(), cfg.threads, [&](std::size_t i) {
        const Job& j = jobs[i];
        const PolyMesh mesh = make_family_mesh(cfg.mesh_spec(j.level, j.theta.value_or(0.0)));
        const int ell = j.m + j.k;
        if (ell < 1) throw ConfigError("velocity degree must be at least 1");
        InfSupRecord r;
        r.family = family_name(cfg.family);
        r.level = j.level;
        r.h = mesh.max_diameter();
        r.n_el = mesh.n_elements();
        r.ell = ell;
        r.m = j.m;
        r.k = j.k;
        r.eta = j.eta;
        r.gamma_v = cfg.penalty.gamma_v;
        r.gamma_p = cfg.penalty.gamma_p;
        r.theta = j.theta;
        r.beta_h = beta_for(cfg, mesh, ell, j.m, j.eta).beta_h;
        return r;
    });
}

} // namespace polydg
