#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(HJNET_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

Run run_stderr(const std::string& args) {
    std::string cmd = std::string(HJNET_CLI) + " " + args + " 2>&1 1>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string sample(const char* name) { return std::string(HJNET_SAMPLES) + "/" + name; }

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hjnet_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, SolveSingleEdge) {
    auto dir = scratch("solve");
    auto r = run("solve " + sample("single_edge.json") + " -o " + dir.string());
    ASSERT_EQ(r.status, 0);
    auto U = json::parse(slurp(dir / "U.json"));
    EXPECT_NEAR(U["x"].get<double>(), 1.0, 1e-2);
    EXPECT_NEAR(U["y"].get<double>(), 1.0, 1e-2);
    auto res = json::parse(slurp(dir / "residuals.json"));
    EXPECT_TRUE(res["all_witnessed"].get<bool>());
    std::istringstream csv(slurp(dir / "arcs.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "edge_id,s,u");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 2001u);
}

TEST(Cli, RhoAndBeta) {
    auto r = run("rho " + sample("single_edge.json") + " --edge e --alpha 0");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(std::stod(r.out), 1.0 - std::exp(-1.0), 5e-3);
    r = run("rho " + sample("single_edge.json") + " --path e,-e --alpha 0");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(std::stod(r.out), 1.0 - std::exp(-2.0), 5e-3);
    r = run("beta " + sample("single_edge.json") + " --cycle e,-e");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(std::stod(r.out), 1.0, 1e-2);
    r = run("--lambda 0.5 beta " + sample("single_edge.json") + " --cycle e,-e");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(std::stod(r.out), 2.0, 1e-2);
}

TEST(Cli, Aubry) {
    auto r = run("aubry " + sample("parallel.json"));
    ASSERT_EQ(r.status, 0);
    auto j = json::parse(r.out);
    EXPECT_EQ(j["members"], json({"x", "y"}));
    EXPECT_EQ(j["witnesses"]["x"], json({"a", "-a"}));
}

TEST(Cli, Eikonal) {
    auto dir = scratch("eikonal");
    fs::create_directories(dir);
    std::ofstream(dir / "trace.json") << R"({"x": 0.0, "y": 0.0})";
    auto r = run("eikonal " + sample("parallel.json") + " --trace " + (dir / "trace.json").string());
    ASSERT_EQ(r.status, 0);
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["critical_value"].get<double>(), -2.0, 1e-6);
    EXPECT_NEAR(j["sigma"]["b"].get<double>(), 1.0, 1e-6);
    EXPECT_NEAR(j["V"]["y"].get<double>(), 0.0, 1e-6);
    std::ofstream(dir / "bad.json") << R"({"x": 0.0, "y": 0.5})";
    EXPECT_EQ(run("eikonal " + sample("parallel.json") + " --trace " + (dir / "bad.json").string()).status, 2);
}

TEST(Cli, Sweep) {
    auto dir = scratch("sweep");
    auto r = run("sweep " + sample("single_edge.json") + " --lambdas 0.4,0.2,0.1 -o " + dir.string());
    ASSERT_EQ(r.status, 0);
    auto j = json::parse(r.out);
    ASSERT_EQ(j["steps"].size(), 3u);
    std::istringstream csv(slurp(dir / "sweep_edges.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "lambda,edge,rho,gap");
    std::map<double, double> gap;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string lambda, edge, rho, g;
        std::getline(row, lambda, ',');
        std::getline(row, edge, ',');
        std::getline(row, rho, ',');
        std::getline(row, g, ',');
        if (edge == "e") gap[std::stod(lambda)] = std::abs(std::stod(g));
    }
    EXPECT_NEAR(gap[0.4], 0.1758, 1e-3);
    EXPECT_NEAR(gap[0.2], 0.0935, 1e-3);
    EXPECT_NEAR(gap[0.1], 0.04837, 1e-3);
    EXPECT_TRUE(fs::exists(dir / "sweep_vertices.csv"));
}

TEST(Cli, Selftest) {
    auto r = run("--seed 7 selftest --count 30");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(json::parse(r.out)["failures"], 0);
}

TEST(Cli, ExitCodes) {
    auto dir = scratch("errors");
    fs::create_directories(dir);
    std::ofstream(dir / "dup.json") << R"({"vertices": [{"id": "x"}, {"id": "x"}], "edges": []})";
    auto r = run_stderr("aubry " + (dir / "dup.json").string());
    EXPECT_EQ(r.status, 2);
    auto err = json::parse(r.out);
    EXPECT_EQ(err["error"], "SchemaError");
    EXPECT_EQ(run("rho " + sample("single_edge.json") + " --edge nope --alpha 0").status, 2);
    EXPECT_EQ(run("bogus").status, 2);
    EXPECT_EQ(run("sweep " + sample("single_edge.json") + " --lambdas 0.1,abc").status, 2);
    std::ofstream(dir / "capped.json") << R"({"vertices": [{"id": "x"}, {"id": "y"}],
      "edges": [{"id": "e", "from": "x", "to": "y", "hamiltonian": {"family": "eikonal_power", "potential": 1}},
                {"id": "f", "from": "x", "to": "y", "hamiltonian": {"family": "eikonal_power", "potential": 2}}],
      "solver": {"max_iterations": 1, "N": 100}})";
    r = run_stderr("aubry " + (dir / "capped.json").string());
    EXPECT_EQ(r.status, 3);
    EXPECT_EQ(json::parse(r.out)["error"], "NoConvergence");
}
