// Solves the discounted problem on a two-vertex network with H = |p| - 1 and
// prints the vertex values, the Aubry set and the edge map along a path.

#include <iostream>

#include "hjnet/hjnet.hpp"

using namespace hjnet;

int main() {
    auto h = Hamiltonian::eikonal_power(1.0, SampledFunction(1.0));
    SolverConfig cfg;
    cfg.lambda = 1.0;
    Network net = NetworkBuilder().vertex("x").vertex("y").edge("e", "x", "y", h).solver(cfg).build();

    auto table = EdgeMapTable::numeric(net);
    auto sol = solve_dfe(table, net.graph);
    for (VertexId v = 0; v < net.graph.vertex_count(); ++v)
        std::cout << net.graph.vertex_name(v) << " " << sol[v] << "\n";

    auto report = detect_aubry(table, net.graph, sol.U);
    std::cout << "aubry:";
    for (VertexId y : report.members) std::cout << " " << net.graph.vertex_name(y);
    std::cout << "\n";

    Path xi = parse_path(net.graph, "e,-e");
    std::cout << "rho(0, e -e) = " << rho_path(table, xi, 0.0) << "\n";
    std::cout << "beta(e -e) = " << beta_cycle(table, xi) << "\n";

    auto arcs = extend(table, net.graph, sol.U);
    std::cout << "arc e: u(0.5) = " << arcs[0].profile(0.5) << "\n";
}
