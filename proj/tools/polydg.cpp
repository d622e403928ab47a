// polydg: mesh generation, single solves and study drivers.
//
//   polydg mesh         --family F --levels L --mesh-out PATH
//   polydg solve        --family F --levels L --ell 2 --m 2 [--mesh-in PATH]
//   polydg study-h      --family F --levels 1..4 --ell 4 --m 4 --out conv.csv
//   polydg study-p      --family voronoi --n-el 160 --m 1..6 --out p.csv
//   polydg study-infsup --family F --levels 0..3 --m 1 --k 0,1,2 --eta 1 --out beta.csv
//
// Exit status: 0 success, 2 configuration error, 1 numerical failure.

#include "polydg/studies.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace polydg;

namespace {

int parse_int(const std::string& s)
{
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("not an integer: '" + s + "'");
    return v;
}

double parse_double(const std::string& s)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

// "3", "1,2,4" or "1..4"
std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    for (const auto& tok : split(s, ',')) {
        const auto dots = tok.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_int(tok));
            continue;
        }
        const int a = parse_int(tok.substr(0, dots));
        const int b = parse_int(tok.substr(dots + 2));
        if (b < a) throw ConfigError("empty range '" + tok + "'");
        for (int i = a; i <= b; ++i) out.push_back(i);
    }
    return out;
}

// "0:180:5" or "0,15,30"
std::vector<double> parse_theta_grid(const std::string& s)
{
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw ConfigError("theta grid must be start:stop:step");
        const double a = parse_double(parts[0]), b = parse_double(parts[1]), step = parse_double(parts[2]);
        if (!(step > 0.0) || b < a) throw ConfigError("invalid theta grid '" + s + "'");
        const auto n = static_cast<int>(std::floor((b - a) / step + 1e-9));
        for (int i = 0; i <= n; ++i) out.push_back(a + i * step);
        return out;
    }
    for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok));
    return out;
}

struct Options {
    std::string family = "triangular";
    std::string levels = "1";
    std::string ell;
    std::string m = "1";
    std::string k = "0";
    std::string eta = "1";
    double gamma_v = 10.0;
    double gamma_p = 10.0;
    std::uint64_t seed = 1;
    std::string theta_grid;
    std::string out;
    int threads = 1;
    std::string mesh_out;
    std::string mesh_in;
    int n_el = 0;
    std::string matrix_out;
};

void add_shared(CLI::App* sub, Options& o)
{
    sub->add_option("--family", o.family, "triangular|voronoi|distorted|agglomerated|degenerate-edges|rotating-hole");
    sub->add_option("--levels", o.levels, "refinement levels, e.g. 1..4");
    sub->add_option("--ell", o.ell, "velocity degree(s); default m (+k)");
    sub->add_option("--m", o.m, "pressure degree(s)");
    sub->add_option("--k", o.k, "velocity degree offsets for inf-sup pairs P^{m+k}-P^m");
    sub->add_option("--eta", o.eta, "pressure stabilization 0|1 (list allowed)");
    sub->add_option("--gamma-v", o.gamma_v, "velocity penalty");
    sub->add_option("--gamma-p", o.gamma_p, "pressure penalty");
    sub->add_option("--seed", o.seed, "generator seed");
    sub->add_option("--theta-grid", o.theta_grid, "rotating-hole angles: start:stop:step or list (degrees)");
    sub->add_option("--out", o.out, "CSV output path (default stdout)");
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_option("--mesh-out", o.mesh_out, "write the generated mesh");
    sub->add_option("--mesh-in", o.mesh_in, "read the mesh instead of generating it");
    sub->add_option("--n-el", o.n_el, "element count for seeded families");
}

RunConfig make_config(const Options& o)
{
    RunConfig c;
    c.family = parse_family(o.family);
    c.levels = parse_int_list(o.levels);
    if (!o.ell.empty()) c.ell = parse_int_list(o.ell);
    c.m = parse_int_list(o.m);
    c.k = parse_int_list(o.k);
    c.eta = parse_int_list(o.eta);
    c.penalty = {o.gamma_v, o.gamma_p};
    c.seed = o.seed;
    if (!o.theta_grid.empty()) c.theta_grid = parse_theta_grid(o.theta_grid);
    c.threads = o.threads;
    if (o.n_el != 0) c.n_el = o.n_el;
    c.validate();
    return c;
}

template <class Rows>
void emit(const Options& o, const Rows& rows)
{
    if (o.out.empty()) {
        write_csv(std::cout, rows);
        return;
    }
    std::ofstream os(o.out);
    if (!os) throw ConfigError("cannot open '" + o.out + "' for writing");
    write_csv(os, rows);
}

PolyMesh obtain_mesh(const Options& o, const RunConfig& c)
{
    if (!o.mesh_in.empty()) {
        try {
            return read_mesh_file(o.mesh_in);
        } catch (const MeshError& e) {
            throw ConfigError(o.mesh_in + ": " + e.what());
        }
    }
    const double theta = c.theta_grid.empty() ? 0.0 : c.theta_grid.front();
    return make_family_mesh(c.mesh_spec(c.levels.front(), theta));
}

int cmd_mesh(const Options& o)
{
    const RunConfig c = make_config(o);
    if (o.mesh_out.empty()) throw ConfigError("mesh: --mesh-out is required");
    const PolyMesh mesh = obtain_mesh(o, c);
    write_mesh_file(o.mesh_out, mesh);
    std::printf("vertices %zu\nelements %zu\nfaces %zu\nh %s\n", mesh.vertices.size(), mesh.n_elements(),
                mesh.faces.size(), format_real(mesh.max_diameter()).c_str());
    return 0;
}

int cmd_solve(const Options& o)
{
    const RunConfig c = make_config(o);
    const PolyMesh mesh = obtain_mesh(o, c);
    if (!o.mesh_out.empty()) write_mesh_file(o.mesh_out, mesh);
    const int m = c.m.front();
    const int ell = c.ell.empty() ? std::max(m, 1) : c.ell.front();
    const ExactSolution exact = manufactured_solution(c.mu);
    const StokesSystem s =
        assemble_system(make_discretization(std::make_shared<const PolyMesh>(mesh), ell, m, c.mu, c.penalty), &exact);
    if (!o.matrix_out.empty()) {
        std::ofstream os(o.matrix_out);
        if (!os) throw ConfigError("cannot open '" + o.matrix_out + "' for writing");
        write_matrix_market(os, bordered_matrix(s));
    }
    const DiscreteSolution sol = solve_stationary(s);
    const ErrorReport e = compute_errors(sol, s, exact);
    std::printf("n_el %zu\nh %s\nn_u %zu\nn_p %zu\nresidual %s\nerr_u_L2 %s\nerr_u_DG %s\nerr_p_L2 %s\nerr_p_jump %s\n",
                mesh.n_elements(), format_real(e.h).c_str(), e.n_u, e.n_p, format_real(sol.residual_norm).c_str(),
                format_real(e.err_u_L2).c_str(), format_real(e.err_u_DG).c_str(), format_real(e.err_p_L2).c_str(),
                format_real(e.err_p_jump).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Polygonal discontinuous Galerkin Stokes solver and inf-sup studies"};
    app.require_subcommand(1);
    Options o;
    auto* mesh = app.add_subcommand("mesh", "generate a mesh and write it");
    auto* solve = app.add_subcommand("solve", "solve one manufactured problem and print its errors");
    auto* sh = app.add_subcommand("study-h", "convergence under mesh refinement");
    auto* sp = app.add_subcommand("study-p", "convergence in polynomial degree on a fixed mesh");
    auto* si = app.add_subcommand("study-infsup", "discrete inf-sup constants");
    for (auto* sub : {mesh, solve, sh, sp, si}) add_shared(sub, o);
    solve->add_option("--matrix-out", o.matrix_out, "dump the bordered system in MatrixMarket format");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*mesh) return cmd_mesh(o);
        if (*solve) return cmd_solve(o);
        if (*sh) {
            emit(o, run_h_study(make_config(o)));
        } else if (*sp) {
            Options p = o;
            if (sp->count("--m") == 0) p.m = "1..6";
            if (p.family == "voronoi" && sp->count("--n-el") == 0) p.n_el = 160;
            emit(p, run_p_study(make_config(p)));
        } else if (*si) {
            emit(o, run_infsup_study(make_config(o)));
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const MeshError& e) {
        std::fprintf(stderr, "mesh error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
