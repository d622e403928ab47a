#include "polydg/studies.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace polydg;

namespace {

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(POLYDG_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("polydg_test_" + std::to_string(::getpid()) + "_" + name);
}

} // namespace

TEST(Eoc, Definition)
{
    EXPECT_NEAR(eoc(0.1, 0.05, 0.2, 0.1), 1.0, 1e-14);
    EXPECT_EQ(eoc(0.3, 0.3, 0.2, 0.1), 0.0);
    // antisymmetric in the roles of the two levels, invariant under common scaling
    EXPECT_NEAR(eoc(0.1, 0.01, 0.4, 0.1), eoc(0.01, 0.1, 0.1, 0.4), 1e-14);
    EXPECT_NEAR(eoc(0.1, 0.01, 0.4, 0.1), eoc(0.01, 0.001, 0.1, 0.025), 1e-12);
}

TEST(Family, NamesRoundTrip)
{
    for (Family f : {Family::triangular, Family::voronoi, Family::distorted, Family::agglomerated,
                     Family::degenerate_edges, Family::rotating_hole})
        EXPECT_EQ(parse_family(family_name(f)), f);
    EXPECT_THROW(parse_family("hexagonal"), ConfigError);
}

TEST(Family, LevelMapping)
{
    EXPECT_EQ(make_family_mesh({Family::triangular, 0}).n_elements(), 8u);
    EXPECT_EQ(make_family_mesh({Family::triangular, 1}).n_elements(), 32u);
    EXPECT_EQ(make_family_mesh({Family::voronoi, 1}).n_elements(), 20u);
    EXPECT_EQ(make_family_mesh({Family::distorted, 0}).n_elements(), 5u);
    EXPECT_EQ(make_family_mesh({Family::agglomerated, 0}).n_elements(), 8u);
    const PolyMesh d = make_family_mesh({Family::degenerate_edges, 2});
    EXPECT_EQ(d.elements[center_element(d)].vertices.size(), 12u);
    EXPECT_EQ(make_family_mesh({Family::rotating_hole, 1, 1, 20.0}).n_holes, 1);
    MeshSpec s{Family::voronoi, 1};
    s.n_el = 160;
    EXPECT_EQ(make_family_mesh(s).n_elements(), 160u);
    EXPECT_THROW(make_family_mesh({Family::triangular, -1}), ConfigError);
}

TEST(Config, Validation)
{
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    c.eta = {2};
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.penalty.gamma_v = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.levels = {};
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.theta_grid = {0.0, 10.0};
    EXPECT_THROW(c.validate(), ConfigError);
    c.family = Family::rotating_hole;
    EXPECT_NO_THROW(c.validate());
    c = {};
    c.k = {5};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, UnstabilizedEqualOrderRefused)
{
    RunConfig c;
    c.levels = {0};
    c.k = {0, 1};
    c.eta = {0};
    try {
        run_infsup_study(c);
        FAIL() << "accepted k = 0 with eta = 0";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("eta = 0"), std::string::npos);
    }
}

TEST(Pool, DeterministicOrder)
{
    const auto out = run_pool<int>(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
    EXPECT_THROW(run_pool<int>(5, 2, [](std::size_t i) -> int { if (i == 3) throw NumericalError("x"); return 0; }),
                 NumericalError);
}

TEST(Csv, ConvergenceFormat)
{
    RunConfig c;
    c.levels = {0, 1};
    c.m = {1};
    const auto rows = run_h_study(c);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_FALSE(rows[0].eoc_u_DG);
    ASSERT_TRUE(rows[1].eoc_u_DG);
    EXPECT_NEAR(*rows[1].eoc_u_L2, eoc(rows[0].errors.err_u_L2, rows[1].errors.err_u_L2, rows[0].h, rows[1].h), 1e-15);
    std::ostringstream os;
    write_csv(os, rows);
    std::istringstream is(os.str());
    std::string header, first, second;
    std::getline(is, header);
    std::getline(is, first);
    std::getline(is, second);
    EXPECT_EQ(header, "family,level,h,n_el,ell,m,gamma_v,gamma_p,err_u_L2,err_u_DG,err_p_L2,err_p_jump,eoc_u_L2,eoc_u_DG,eoc_p_L2");
    EXPECT_EQ(first.substr(0, 13), "triangular,0,");
    EXPECT_EQ(first.substr(first.size() - 3), ",,,");
    EXPECT_NE(second.back(), ',');
    EXPECT_EQ(std::count(second.begin(), second.end(), ','), 14);
    EXPECT_NE(first.find(format_real(rows[0].h)), std::string::npos);
}

TEST(Csv, InfSupFormat)
{
    RunConfig c;
    c.family = Family::rotating_hole;
    c.levels = {0};
    c.theta_grid = {0.0, 45.0};
    c.k = {1};
    c.eta = {0, 1};
    const auto rows = run_infsup_study(c);
    ASSERT_EQ(rows.size(), 4u);
    // nesting order: eta, then theta
    EXPECT_EQ(rows[0].eta, 0);
    EXPECT_EQ(*rows[1].theta, 45.0);
    EXPECT_EQ(rows[2].eta, 1);
    std::ostringstream os;
    write_csv(os, rows);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "family,level,h,n_el,ell,m,k,eta,gamma_v,gamma_p,theta,beta_h");
    EXPECT_EQ(row.substr(0, 16), "rotating-hole,0,");
    for (const auto& r : rows) EXPECT_GT(r.beta_h, 0.0);

    RunConfig t;
    t.levels = {0};
    std::ostringstream tri;
    write_csv(tri, run_infsup_study(t));
    std::string line;
    std::istringstream ts(tri.str());
    std::getline(ts, line);
    std::getline(ts, line);
    EXPECT_NE(line.find(",10,10,,"), std::string::npos) << line;
}

TEST(Studies, PStudyDecreases)
{
    RunConfig c;
    c.family = Family::voronoi;
    c.n_el = 20;
    c.m = {1, 2, 3};
    const auto rows = run_p_study(c);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(rows[i].errors.err_u_DG, rows[i - 1].errors.err_u_DG);
        EXPECT_EQ(rows[i].ell, rows[i].m);
        EXPECT_FALSE(rows[i].eoc_u_DG);
    }
}

TEST(Studies, RowsAreReproducible)
{
    RunConfig c;
    c.family = Family::agglomerated;
    c.levels = {0};
    c.m = {1};
    c.k = {1};
    const auto a = run_infsup_study(c);
    c.threads = 2;
    const auto b = run_infsup_study(c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].beta_h, b[i].beta_h);
    EXPECT_EQ(a[0].h, make_family_mesh(c.mesh_spec(0)).max_diameter());
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run_cli("solve --family triangular --levels 0 --m 1"), 0);
    EXPECT_EQ(run_cli("solve --family hexagonal"), 2);
    EXPECT_EQ(run_cli("solve --levels x"), 2);
    EXPECT_EQ(run_cli("solve --eta 3"), 2);
    EXPECT_EQ(run_cli("solve --bogus-flag 1"), 2);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("study-infsup --levels 0 --k 0 --eta 0"), 2);
    EXPECT_EQ(run_cli("mesh --family triangular"), 2); // missing --mesh-out
    EXPECT_EQ(run_cli("mesh --family voronoi --n-el 1 --mesh-out /dev/null"), 1);
    EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Cli, MeshRoundTripAndStudies)
{
    const auto mesh_path = temp_path("mesh.txt");
    const auto csv = temp_path("conv.csv");
    const auto beta = temp_path("beta.csv");
    const auto mtx = temp_path("k.mtx");
    ASSERT_EQ(run_cli("mesh --family voronoi --levels 1 --seed 4 --mesh-out " + mesh_path.string()), 0);
    const PolyMesh m = read_mesh_file(mesh_path.string());
    EXPECT_EQ(m.n_elements(), 20u);
    EXPECT_EQ(run_cli("solve --mesh-in " + mesh_path.string() + " --ell 2 --m 1 --matrix-out " + mtx.string()), 0);
    EXPECT_EQ(slurp(mtx).rfind("%%MatrixMarket matrix coordinate real general\n", 0), 0u);

    std::ofstream(temp_path("bad.txt")) << "POLYMESH 3\n";
    EXPECT_EQ(run_cli("solve --mesh-in " + temp_path("bad.txt").string()), 2);
    EXPECT_EQ(run_cli("solve --mesh-in /nonexistent/mesh.txt"), 2);

    ASSERT_EQ(run_cli("study-h --family triangular --levels 0..1 --m 1 --out " + csv.string()), 0);
    const std::string text = slurp(csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_EQ(text.rfind(kConvergenceHeader, 0), 0u);

    ASSERT_EQ(run_cli("study-infsup --family rotating-hole --levels 0 --m 1 --k 1 --eta 0,1 --theta-grid 0:90:45 --out " +
                      beta.string()),
              0);
    const std::string btext = slurp(beta);
    EXPECT_EQ(std::count(btext.begin(), btext.end(), '\n'), 7);

    for (const auto& p : {mesh_path, csv, beta, mtx, temp_path("bad.txt")}) std::filesystem::remove(p);
}
