#pragma once

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hjnet/aubry.hpp"
#include "hjnet/error.hpp"
#include "hjnet/hamiltonian.hpp"
#include "hjnet/network.hpp"

namespace hjnet {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& pointer, const std::string& what) {
    throw Error(Errc::schema_error, pointer + ": " + what);
}

inline const json& require(const json& obj, const std::string& key, const std::string& at) {
    if (!obj.is_object()) schema_fail(at, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(at + "/" + key, "missing");
    return *it;
}

inline double number(const json& v, const std::string& at) {
    if (!v.is_number()) schema_fail(at, "expected a number");
    return v.get<double>();
}

inline std::size_t count(const json& v, const std::string& at) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) schema_fail(at, "expected a nonnegative integer");
    if (v.is_number_integer() && v.get<long long>() < 0) schema_fail(at, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

inline std::string text(const json& v, const std::string& at) {
    if (!v.is_string()) schema_fail(at, "expected a string");
    return v.get<std::string>();
}

// A sampled function is a number (constant) or an array of samples.
inline SampledFunction sampled(const json& v, const std::string& at) {
    if (v.is_number()) return SampledFunction(v.get<double>());
    if (!v.is_array() || v.empty()) schema_fail(at, "expected a number or a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], at + "/" + std::to_string(i)));
    return SampledFunction(std::move(out));
}

inline json sampled_json(const SampledFunction& f) {
    if (f.is_constant()) return f.samples()[0];
    return json(std::vector<double>(f.samples().begin(), f.samples().end()));
}

inline Hamiltonian hamiltonian(const json& v, const std::string& at) {
    std::string family = text(require(v, "family", at), at + "/family");
    if (family == "eikonal_power") {
        double m = v.contains("exponent") ? number(v["exponent"], at + "/exponent") : 1.0;
        SampledFunction f = v.contains("potential") ? sampled(v["potential"], at + "/potential") : SampledFunction(0.0);
        if (!(m >= 1.0)) schema_fail(at + "/exponent", "must be >= 1");
        return Hamiltonian::eikonal_power(m, std::move(f));
    }
    if (family == "tilted_quadratic") {
        SampledFunction b = v.contains("drift") ? sampled(v["drift"], at + "/drift") : SampledFunction(0.0);
        SampledFunction f = v.contains("potential") ? sampled(v["potential"], at + "/potential") : SampledFunction(0.0);
        return Hamiltonian::tilted_quadratic(std::move(b), std::move(f));
    }
    if (family == "tabulated") {
        HamiltonianTable t;
        t.p_max = number(require(v, "p_max", at), at + "/p_max");
        const json& rows = require(v, "values", at);
        if (!rows.is_array() || rows.empty()) schema_fail(at + "/values", "expected a nonempty array of rows");
        t.s_count = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::string rat = at + "/values/" + std::to_string(i);
            if (!rows[i].is_array()) schema_fail(rat, "expected an array");
            if (i == 0) t.p_count = rows[i].size();
            if (rows[i].size() != t.p_count) schema_fail(rat, "row length differs from the first row");
            for (std::size_t k = 0; k < rows[i].size(); ++k)
                t.values.push_back(number(rows[i][k], rat + "/" + std::to_string(k)));
        }
        if (t.p_count < 2) schema_fail(at + "/values", "rows need at least two entries");
        if (!(t.p_max > 0.0)) schema_fail(at + "/p_max", "must be positive");
        t.coercive_slope = number(require(v, "coercive_slope", at), at + "/coercive_slope");
        if (v.contains("quasiconvex")) {
            if (!v["quasiconvex"].is_boolean()) schema_fail(at + "/quasiconvex", "expected a boolean");
            t.quasiconvex = v["quasiconvex"].get<bool>();
        }
        return Hamiltonian::tabulated(std::move(t));
    }
    schema_fail(at + "/family", "unknown family '" + family + "'");
}

inline json hamiltonian_json(const Hamiltonian& h) {
    json out;
    out["family"] = std::string(to_string(h.family()));
    const auto& rep = h.representation();
    if (const auto* e = std::get_if<EikonalPower>(&rep)) {
        out["exponent"] = e->exponent;
        out["potential"] = sampled_json(e->potential);
    } else if (const auto* q = std::get_if<TiltedQuadratic>(&rep)) {
        out["drift"] = sampled_json(q->drift);
        out["potential"] = sampled_json(q->potential);
    } else {
        const auto& t = std::get<HamiltonianTable>(rep);
        out["p_max"] = t.p_max;
        json rows = json::array();
        for (std::size_t i = 0; i < t.s_count; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < t.p_count; ++k) row.push_back(t.at(i, k));
            rows.push_back(row);
        }
        out["values"] = rows;
        out["coercive_slope"] = t.coercive_slope;
        out["quasiconvex"] = t.quasiconvex;
    }
    return out;
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace detail

/// Parses and validates a network document.
inline Network parse_network(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(Errc::schema_error, "line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
    }
    using detail::count;
    using detail::number;
    using detail::require;
    using detail::schema_fail;
    using detail::text;
    if (!doc.is_object()) schema_fail("", "document must be an object");

    NetworkBuilder b;
    const json& vs = require(doc, "vertices", "");
    if (!vs.is_array()) schema_fail("/vertices", "expected an array");
    std::set<std::string> vertex_ids;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::string at = "/vertices/" + std::to_string(i);
        std::string id = text(require(vs[i], "id", at), at + "/id");
        if (!vertex_ids.insert(id).second) schema_fail(at + "/id", "duplicate vertex id '" + id + "'");
        std::optional<std::vector<double>> coords;
        if (vs[i].contains("coords")) {
            const json& c = vs[i]["coords"];
            if (!c.is_array()) schema_fail(at + "/coords", "expected an array");
            coords.emplace();
            for (std::size_t k = 0; k < c.size(); ++k) coords->push_back(number(c[k], at + "/coords/" + std::to_string(k)));
        }
        b.vertex(id, std::move(coords));
    }

    const json& es = require(doc, "edges", "");
    if (!es.is_array()) schema_fail("/edges", "expected an array");
    std::set<std::string> edge_ids;
    for (std::size_t i = 0; i < es.size(); ++i) {
        std::string at = "/edges/" + std::to_string(i);
        std::string id = text(require(es[i], "id", at), at + "/id");
        if (!edge_ids.insert(id).second) schema_fail(at + "/id", "duplicate edge id '" + id + "'");
        std::string from = text(require(es[i], "from", at), at + "/from");
        std::string to = text(require(es[i], "to", at), at + "/to");
        Hamiltonian h = detail::hamiltonian(require(es[i], "hamiltonian", at), at + "/hamiltonian");
        b.edge(id, from, to, std::move(h));
    }

    SolverConfig cfg;
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (!s.is_object()) schema_fail("/solver", "expected an object");
        if (s.contains("lambda")) cfg.lambda = number(s["lambda"], "/solver/lambda");
        if (s.contains("N")) cfg.n = count(s["N"], "/solver/N");
        if (s.contains("tol")) cfg.tol = number(s["tol"], "/solver/tol");
        if (s.contains("eps_aubry")) cfg.eps_aubry = number(s["eps_aubry"], "/solver/eps_aubry");
        if (s.contains("max_paths")) cfg.max_paths = count(s["max_paths"], "/solver/max_paths");
        if (s.contains("max_iterations")) cfg.max_iterations = count(s["max_iterations"], "/solver/max_iterations");
        if (s.contains("max_sweeps")) cfg.max_sweeps = count(s["max_sweeps"], "/solver/max_sweeps");
        if (!(cfg.lambda > 0.0)) schema_fail("/solver/lambda", "must be positive");
        if (cfg.n < 2) schema_fail("/solver/N", "must be at least 2");
        if (!(cfg.tol > 0.0)) schema_fail("/solver/tol", "must be positive");
    }
    b.solver(cfg);
    return b.build();
}

inline Network load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::schema_error, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

inline json network_json(const Network& net) {
    json doc;
    json vs = json::array();
    for (VertexId v = 0; v < net.graph.vertex_count(); ++v) {
        json item{{"id", net.graph.vertex_name(v)}};
        if (v < net.coords.size() && net.coords[v]) item["coords"] = *net.coords[v];
        vs.push_back(item);
    }
    json es = json::array();
    for (std::size_t p = 0; p < net.graph.pair_count(); ++p) {
        es.push_back({{"id", net.graph.pair_name(p)},
                      {"from", net.graph.vertex_name(net.graph.origin(2 * p))},
                      {"to", net.graph.vertex_name(net.graph.terminal(2 * p))},
                      {"hamiltonian", detail::hamiltonian_json(net.hamiltonians[p])}});
    }
    const auto& c = net.solver;
    json s{{"lambda", c.lambda}, {"N", c.n}, {"tol", c.tol}, {"max_paths", c.max_paths},
           {"max_iterations", c.max_iterations}, {"max_sweeps", c.max_sweeps}};
    if (c.eps_aubry) s["eps_aubry"] = *c.eps_aubry;
    doc["vertices"] = vs;
    doc["edges"] = es;
    doc["solver"] = s;
    return doc;
}

inline std::string emit_network(const Network& net) { return network_json(net).dump(2); }

/// Same vertices, edges, Hamiltonians, coordinates and solver settings.
inline bool same_content(const Network& a, const Network& b) {
    const auto& ga = a.graph;
    const auto& gb = b.graph;
    if (ga.vertex_count() != gb.vertex_count() || ga.pair_count() != gb.pair_count()) return false;
    for (VertexId v = 0; v < ga.vertex_count(); ++v) {
        if (ga.vertex_name(v) != gb.vertex_name(v)) return false;
        auto ca = v < a.coords.size() ? a.coords[v] : std::nullopt;
        auto cb = v < b.coords.size() ? b.coords[v] : std::nullopt;
        if (ca != cb) return false;
    }
    for (EdgeId e = 0; e < ga.edge_count(); ++e) {
        if (ga.edge_name(e) != gb.edge_name(e) || ga.origin(e) != gb.origin(e)) return false;
    }
    if (a.hamiltonians != b.hamiltonians) return false;
    const auto& x = a.solver;
    const auto& y = b.solver;
    return x.lambda == y.lambda && x.n == y.n && x.tol == y.tol && x.eps_aubry == y.eps_aubry &&
           x.max_paths == y.max_paths && x.max_iterations == y.max_iterations && x.max_sweeps == y.max_sweeps;
}

/// Fixed-format number for CSV cells: 12 significant digits.
inline std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline json path_json(const OrientedGraph& g, const Path& p) {
    json out = json::array();
    for (EdgeId e : p.edges()) out.push_back(g.edge_name(e));
    return out;
}

inline json aubry_json(const OrientedGraph& g, const std::vector<double>& U, const AubryReport& r) {
    json members = json::array();
    for (VertexId y : r.members) members.push_back(g.vertex_name(y));
    json witnesses = json::object();
    json margins = json::object();
    for (VertexId y = 0; y < g.vertex_count(); ++y) {
        if (r.witnesses[y]) witnesses[g.vertex_name(y)] = path_json(g, *r.witnesses[y]);
        margins[g.vertex_name(y)] = std::isfinite(r.margins[y]) ? json(r.margins[y]) : json(nullptr);
    }
    json loops = json::array();
    for (EdgeId e : r.removable_loops) loops.push_back(g.edge_name(e));
    json values = json::object();
    for (VertexId y = 0; y < g.vertex_count(); ++y) values[g.vertex_name(y)] = U[y];
    return {{"members", members}, {"witnesses", witnesses}, {"margins", margins},
            {"removable_loops", loops}, {"U", values}};
}

}  // namespace hjnet
