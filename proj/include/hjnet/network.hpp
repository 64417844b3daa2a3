#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjnet/arc_solver.hpp"
#include "hjnet/error.hpp"
#include "hjnet/graph.hpp"
#include "hjnet/hamiltonian.hpp"

namespace hjnet {

struct SolverConfig {
    double lambda = 1.0;
    std::size_t n = 2000;
    double tol = 1e-10;
    std::optional<double> eps_aubry;
    std::size_t max_paths = default_path_cap;
    std::size_t max_iterations = 10'000'000;
    std::size_t max_sweeps = 1'000'000;

    ArcDiscretization discretization() const {
        ArcDiscretization d;
        d.n = n;
        d.tol = tol;
        d.max_sweeps = max_sweeps;
        return d;
    }
};

/// Graph plus one Hamiltonian per declared (canonical) orientation.
struct Network {
    OrientedGraph graph;
    std::vector<Hamiltonian> hamiltonians;                 // indexed by pair
    std::vector<std::optional<std::vector<double>>> coords;  // indexed by vertex
    SolverConfig solver;

    /// Hamiltonian of an oriented edge; reverses synthesize H(1-s,-p).
    Hamiltonian hamiltonian(EdgeId e) const {
        const Hamiltonian& h = hamiltonians.at(e / 2);
        return is_canonical(e) ? h : h.reversed();
    }

    /// Same network with every Hamiltonian replaced by H - a.
    Network shifted(double a) const {
        Network out = *this;
        for (auto& h : out.hamiltonians) h = h.shifted(a);
        return out;
    }
};

/// Assembles a network from declarations in order.
class NetworkBuilder {
public:
    NetworkBuilder& vertex(std::string id, std::optional<std::vector<double>> coords = {}) {
        graph_.add_vertex(std::move(id));
        coords_.push_back(std::move(coords));
        return *this;
    }

    NetworkBuilder& edge(std::string id, std::string_view from, std::string_view to, Hamiltonian h) {
        graph_.add_edge_pair(std::move(id), from, to);
        hams_.push_back(std::move(h));
        return *this;
    }

    NetworkBuilder& solver(SolverConfig cfg) {
        cfg_ = cfg;
        return *this;
    }

    Network build() {
        Network net{std::move(graph_).build(), std::move(hams_), std::move(coords_), cfg_};
        return net;
    }

private:
    GraphBuilder graph_;
    std::vector<Hamiltonian> hams_;
    std::vector<std::optional<std::vector<double>>> coords_;
    SolverConfig cfg_;
};

}  // namespace hjnet
