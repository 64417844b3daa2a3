#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hjnet/hjnet.hpp"
#include "hjnet/network_io.hpp"

using namespace hjnet;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<double> tol;
    std::optional<std::size_t> grid_n;
    std::optional<double> lambda;
    unsigned seed = 1;
    bool jacobi = false;
};

Network load(const std::string& path, const Globals& g) {
    Network net = load_network(path);
    if (g.tol) {
        if (!(*g.tol > 0.0)) throw Error(Errc::invalid_argument, "--tol must be positive");
        net.solver.tol = *g.tol;
    }
    if (g.grid_n) {
        if (*g.grid_n < 2) throw Error(Errc::invalid_argument, "--grid-n must be at least 2");
        net.solver.n = *g.grid_n;
    }
    if (g.lambda) {
        if (!(*g.lambda > 0.0)) throw Error(Errc::invalid_argument, "--lambda must be positive");
        net.solver.lambda = *g.lambda;
    }
    return net;
}

DfeOptions dfe_options(const Network& net, const Globals& g) {
    DfeOptions o;
    o.tol = net.solver.tol;
    o.max_iterations = net.solver.max_iterations;
    o.jacobi = g.jacobi;
    return o;
}

double eps_aubry(const Network& net) { return net.solver.eps_aubry.value_or(default_eps_aubry); }

json vertex_map(const OrientedGraph& g, const std::vector<double>& v) {
    json out = json::object();
    for (VertexId x = 0; x < g.vertex_count(); ++x) out[g.vertex_name(x)] = std::isfinite(v[x]) ? json(v[x]) : json(nullptr);
    return out;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) throw Error(Errc::invalid_argument, "cannot write '" + (dir / name).string() + "'");
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(Errc::invalid_argument, "not a number: '" + item + "'");
        }
    }
    return out;
}

int cmd_solve(const std::string& file, const std::string& dir, const Globals& gl) {
    Network net = load(file, gl);
    const auto& g = net.graph;
    auto table = EdgeMapTable::numeric(net);
    auto sol = solve_dfe(table, g, dfe_options(net, gl));
    auto ext = extend(table, g, sol.U);
    auto vertices = verify_vertex_conditions(table, g, sol.U, 10.0 * net.solver.tol);

    json residuals{{"lambda", net.solver.lambda}, {"N", net.solver.n}, {"dfe_residual", sol.residual},
                   {"iterations", sol.iterations}};
    json arcs = json::object();
    for (const auto& a : ext)
        arcs[g.edge_name(a.edge)] = {{"interior_residual", a.interior_residual},
                                     {"trace_defect", a.trace_defect},
                                     {"sandwich_lower", a.sandwich.lower_defect},
                                     {"sandwich_upper", a.sandwich.upper_defect}};
    residuals["arcs"] = arcs;
    json witnesses = json::object();
    for (const auto& w : vertices.vertices)
        witnesses[g.vertex_name(w.vertex)] = w.edge ? json(g.edge_name(*w.edge)) : json(nullptr);
    residuals["witnesses"] = witnesses;
    residuals["all_witnessed"] = vertices.all_witnessed();

    fs::path out(dir);
    open_out(out, "U.json") << vertex_map(g, sol.U).dump(2) << "\n";
    open_out(out, "residuals.json") << residuals.dump(2) << "\n";
    auto csv = open_out(out, "arcs.csv");
    csv << "edge_id,s,u\n";
    for (const auto& a : ext)
        for (std::size_t i = 0; i <= a.profile.intervals(); ++i)
            csv << g.edge_name(a.edge) << ',' << csv_number(a.profile.s(i)) << ',' << csv_number(a.profile.values[i])
                << '\n';
    std::cout << vertex_map(g, sol.U).dump() << "\n";
    return 0;
}

int cmd_rho(const std::string& file, const std::string& edge, const std::string& path, double alpha,
            const Globals& gl) {
    Network net = load(file, gl);
    if (edge.empty() == path.empty()) throw Error(Errc::invalid_argument, "give exactly one of --edge or --path");
    Path xi = parse_path(net.graph, path.empty() ? edge : path);
    auto table = EdgeMapTable::numeric(net);
    std::cout << csv_number(rho_path(table, xi, alpha)) << "\n";
    return 0;
}

int cmd_beta(const std::string& file, const std::string& cycle, const Globals& gl) {
    Network net = load(file, gl);
    Path xi = parse_path(net.graph, cycle);
    auto table = EdgeMapTable::numeric(net);
    std::cout << csv_number(beta_cycle(table, xi)) << "\n";
    return 0;
}

int cmd_aubry(const std::string& file, const Globals& gl) {
    Network net = load(file, gl);
    auto table = EdgeMapTable::numeric(net);
    auto sol = solve_dfe(table, net.graph, dfe_options(net, gl));
    auto report = detect_aubry(table, net.graph, sol.U, eps_aubry(net), net.solver.max_paths);
    json out = aubry_json(net.graph, sol.U, report);
    out["lambda"] = net.solver.lambda;
    out["epsilon"] = eps_aubry(net);
    std::cout << out.dump(2) << "\n";
    return 0;
}

std::map<VertexId, double> load_trace(const std::string& path, const OrientedGraph& g) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::schema_error, "cannot read '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::schema_error, path + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(Errc::schema_error, path + ": expected an object vertex -> value");
    std::map<VertexId, double> out;
    for (const auto& [name, value] : doc.items()) {
        auto v = g.find_vertex(name);
        if (!v) throw Error(Errc::schema_error, path + ": unknown vertex '" + name + "'");
        if (!value.is_number()) throw Error(Errc::schema_error, path + "/" + name + ": expected a number");
        out[*v] = value.get<double>();
    }
    return out;
}

int cmd_eikonal(const std::string& file, const std::string& trace_file, const Globals& gl) {
    Network net = load(file, gl);
    const auto& g = net.graph;
    auto data = eikonal_data(net);
    json sigma = json::object();
    for (EdgeId e = 0; e < g.edge_count(); ++e) sigma[g.edge_name(e)] = data.sigma[e];
    json members = json::array();
    json witnesses = json::object();
    for (VertexId y : data.aubry.members) {
        members.push_back(g.vertex_name(y));
        witnesses[g.vertex_name(y)] = path_json(g, *data.aubry.witnesses[y]);
    }
    json out{{"critical_value", data.critical_value}, {"sigma", sigma}, {"aubry", members}, {"witnesses", witnesses}};
    if (!trace_file.empty()) {
        auto trace = load_trace(trace_file, g);
        for (const auto& [y, value] : trace)
            if (std::find(data.aubry.members.begin(), data.aubry.members.end(), y) == data.aubry.members.end())
                throw Error(Errc::invalid_argument, "trace vertex '" + g.vertex_name(y) + "' is not in the Aubry set");
        auto v = solve_eikonal_dfe(g, data.sigma, trace);
        out["V"] = vertex_map(g, v);
        out["V_defect"] = eikonal_subsolution_defect(g, data.sigma, v);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& file, const std::string& lambdas, const std::string& dir, double probe,
              const Globals& gl) {
    Network net = load(file, gl);
    const auto& g = net.graph;
    SweepConfig cfg;
    cfg.probe = probe;
    cfg.discretization = net.solver.discretization();
    cfg.dfe = dfe_options(net, gl);
    cfg.eps_aubry = eps_aubry(net);
    auto rep = lambda_sweep(net, parse_list(lambdas), cfg);

    json steps = json::array();
    for (const auto& s : rep.steps) {
        json gaps = json::object();
        for (const auto& gap : s.gaps)
            gaps[g.edge_name(gap.edge)] = gap.admissible ? json(gap.gap) : json(nullptr);
        json aubry = json::array();
        for (VertexId y : s.aubry) aubry.push_back(g.vertex_name(y));
        steps.push_back({{"lambda", s.lambda}, {"U", vertex_map(g, s.U)}, {"residual", s.residual},
                         {"iterations", s.iterations}, {"aubry", aubry}, {"included", s.included},
                         {"gaps", gaps}, {"scaled_max", s.scaled_max}, {"scaled_bound_ok", s.scaled_bound_ok},
                         {"distance_to_v", s.distance_to_v}});
    }
    json aubry = json::array();
    for (VertexId y : rep.aubry) aubry.push_back(g.vertex_name(y));
    json limit = json::array();
    for (VertexId y : rep.limit_set) limit.push_back(g.vertex_name(y));
    json out{{"critical_value", rep.critical_value}, {"aubry", aubry}, {"steps", steps},
             {"inclusion_threshold", rep.inclusion_threshold ? json(*rep.inclusion_threshold) : json(nullptr)},
             {"limit_set", limit}, {"v", vertex_map(g, rep.v)}, {"v_defect", rep.v_defect},
             {"warnings", rep.warnings}};

    if (!dir.empty()) {
        fs::path d(dir);
        open_out(d, "sweep.json") << out.dump(2) << "\n";
        auto vcsv = open_out(d, "sweep_vertices.csv");
        vcsv << "lambda,vertex,U,in_A_lambda,gap_to_V\n";
        for (const auto& s : rep.steps)
            for (VertexId x = 0; x < g.vertex_count(); ++x) {
                bool in = std::find(s.aubry.begin(), s.aubry.end(), x) != s.aubry.end();
                vcsv << csv_number(s.lambda) << ',' << g.vertex_name(x) << ',' << csv_number(s.U[x]) << ','
                     << (in ? 1 : 0) << ',' << csv_number(std::abs(s.U[x] - rep.v[x])) << '\n';
            }
        auto ecsv = open_out(d, "sweep_edges.csv");
        ecsv << "lambda,edge,rho,gap\n";
        for (const auto& s : rep.steps)
            for (const auto& gap : s.gaps) {
                if (!gap.admissible) continue;
                ecsv << csv_number(s.lambda) << ',' << g.edge_name(gap.edge) << ',' << csv_number(gap.rho) << ','
                     << csv_number(gap.gap) << '\n';
            }
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

// Randomized checks on affine tables: policy enumeration oracle, comparison,
// uniqueness and the Aubry representation.
int cmd_selftest(std::size_t count, const Globals& gl) {
    std::mt19937 rng(gl.seed);
    std::uniform_int_distribution<std::size_t> nv(1, 5);
    std::uniform_real_distribution<double> slope(0.05, 0.95), shift(-3.0, 3.0), unit(0.0, 1.0);
    std::size_t failures = 0;
    auto fail = [&](std::size_t trial, const std::string& what) {
        ++failures;
        std::cerr << json{{"trial", trial}, {"failure", what}}.dump() << "\n";
    };
    for (std::size_t trial = 0; trial < count; ++trial) {
        std::size_t n = nv(rng);
        GraphBuilder b;
        for (std::size_t v = 0; v < n; ++v) b.add_vertex("v" + std::to_string(v));
        std::size_t pairs = 0;
        for (std::size_t v = 1; v < n; ++v)
            b.add_edge_pair("p" + std::to_string(pairs++), "v" + std::to_string(rng() % v), "v" + std::to_string(v));
        std::size_t extra = 1 + rng() % 3;
        for (std::size_t k = 0; k < extra; ++k)
            b.add_edge_pair("p" + std::to_string(pairs++), "v" + std::to_string(rng() % n),
                            "v" + std::to_string(rng() % n));
        OrientedGraph g = std::move(b).build();
        std::vector<AffineMap> maps;
        for (EdgeId e = 0; e < g.edge_count(); ++e) maps.push_back({slope(rng), shift(rng)});
        auto t = EdgeMapTable::affine(g, maps);
        DfeOptions opt;
        opt.jacobi = gl.jacobi;
        auto sol = solve_dfe(t, g, opt);

        // vertexwise minimum over policies of the policy fixed points
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            std::vector<double> u(n, 0.0);
            for (int it = 0; it < 4000; ++it)
                for (VertexId x = 0; x < n; ++x) {
                    EdgeId e = g.in_edges(x)[idx[x]];
                    u[x] = maps[e].a * u[g.origin(e)] + maps[e].b;
                }
            for (VertexId x = 0; x < n; ++x) best[x] = std::min(best[x], u[x]);
            std::size_t k = 0;
            while (k < n && ++idx[k] == g.in_edges(k).size()) idx[k++] = 0;
            if (k == n) break;
        }
        for (VertexId x = 0; x < n; ++x)
            if (std::abs(best[x] - sol.U[x]) > 1e-8) fail(trial, "policy oracle at " + g.vertex_name(x));

        DfeOptions high = opt;
        high.initial_level = t.start_level() + 100.0;
        auto other = solve_dfe(t, g, high);
        for (VertexId x = 0; x < n; ++x)
            if (std::abs(other.U[x] - sol.U[x]) > 10.0 * opt.tol) fail(trial, "uniqueness at " + g.vertex_name(x));

        std::vector<double> w(n);
        for (auto& v : w) v = t.c_star() + (sol.U[0] - t.c_star()) * unit(rng);
        for (int it = 0; it < 4000; ++it) {
            auto tw = dfe_apply(t, g, w);
            for (VertexId x = 0; x < n; ++x) w[x] = std::min(w[x], tw[x]);
        }
        if (check_subsolution(t, g, w))
            for (VertexId x = 0; x < n; ++x)
                if (w[x] > sol.U[x] + 1e-9) fail(trial, "comparison at " + g.vertex_name(x));

        auto report = detect_aubry(t, g, sol.U);
        for (VertexId x = 0; x < n; ++x) {
            auto rep = aubry_representation(t, g, sol.U, report, x);
            if (std::abs(rep.value - sol.U[x]) > 10.0 * report.epsilon[x]) fail(trial, "aubry representation");
        }
    }
    std::cout << json{{"trials", count}, {"seed", gl.seed}, {"failures", failures}}.dump() << "\n";
    return failures == 0 ? 0 : 3;
}

int report_error(std::string_view code, const std::string& message, int exit_code) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discounted Hamilton-Jacobi equations on networks"};
    app.require_subcommand(1);
    Globals gl;
    app.add_option("--tol", gl.tol, "Solver tolerance");
    app.add_option("--grid-n", gl.grid_n, "Grid intervals per arc");
    app.add_option("--lambda", gl.lambda, "Discount factor");
    app.add_option("--seed", gl.seed, "Seed for selftest");
    app.add_flag("--jacobi", gl.jacobi, "Jacobi sweeps for value iteration");
    app.fallthrough();

    std::string file, dir, edge, path, cycle, trace, lambdas;
    double alpha = 0.0, probe = 0.0;
    std::size_t count = 200;

    auto* solve = app.add_subcommand("solve", "Discrete solution and arc extension");
    solve->add_option("network", file, "Network file")->required();
    solve->add_option("-o,--out", dir, "Output directory")->required();

    auto* rho = app.add_subcommand("rho", "Edge map along an edge or path");
    rho->add_option("network", file)->required();
    rho->add_option("--edge", edge);
    rho->add_option("--path", path, "Comma-separated edge ids");
    rho->add_option("--alpha", alpha)->required();

    auto* beta = app.add_subcommand("beta", "Fixed point of the map along a cycle");
    beta->add_option("network", file)->required();
    beta->add_option("--cycle", cycle)->required();

    auto* aubry = app.add_subcommand("aubry", "Aubry set of the discrete solution");
    aubry->add_option("network", file)->required();

    auto* eik = app.add_subcommand("eikonal", "Critical value, edge weights and Aubry set");
    eik->add_option("network", file)->required();
    eik->add_option("--trace", trace, "JSON object vertex -> value on the Aubry set");

    auto* sweep = app.add_subcommand("sweep", "Vanishing discount sweep");
    sweep->add_option("network", file)->required();
    sweep->add_option("--lambdas", lambdas, "Comma-separated values")->required();
    sweep->add_option("-o,--out", dir, "Directory for sweep.json and CSV files");
    sweep->add_option("--probe", probe, "Probe value for edge gaps");

    auto* self = app.add_subcommand("selftest", "Randomized property checks");
    self->add_option("--count", count, "Number of random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("UsageError", e.what(), 2);
    }

    try {
        if (*solve) return cmd_solve(file, dir, gl);
        if (*rho) return cmd_rho(file, edge, path, alpha, gl);
        if (*beta) return cmd_beta(file, cycle, gl);
        if (*aubry) return cmd_aubry(file, gl);
        if (*eik) return cmd_eikonal(file, trace, gl);
        if (*sweep) return cmd_sweep(file, lambdas, dir, probe, gl);
        if (*self) return cmd_selftest(count, gl);
    } catch (const Error& e) {
        return report_error(to_string(e.code()), e.what(), is_numerical(e.code()) ? 3 : 2);
    } catch (const std::exception& e) {
        return report_error("InternalError", e.what(), 3);
    }
    return 0;
}
