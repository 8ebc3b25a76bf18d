#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rigidity/norms.hpp"

namespace rigidity {

using json = nlohmann::ordered_json;

// Schema violations carry a JSON-pointer-style path into the offending
// document.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct Graph {
    std::vector<std::string> vertex_names;
    std::vector<std::pair<int, int>> edges;  // first < second (declaration order)

    static Graph make(std::vector<std::string> names,
                      const std::vector<std::pair<std::string, std::string>>& edge_names) {
        Graph g;
        g.vertex_names = std::move(names);
        std::map<std::string, int> index;
        for (size_t i = 0; i < g.vertex_names.size(); ++i) {
            if (index.count(g.vertex_names[i]))
                throw SchemaError("/vertices/" + std::to_string(i),
                                  "duplicate vertex name '" + g.vertex_names[i] + "'");
            index[g.vertex_names[i]] = static_cast<int>(i);
        }
        for (size_t e = 0; e < edge_names.size(); ++e) {
            const std::string path = "/edges/" + std::to_string(e);
            auto a = index.find(edge_names[e].first);
            auto b = index.find(edge_names[e].second);
            if (a == index.end())
                throw SchemaError(path, "edge endpoint '" + edge_names[e].first + "' is not a declared vertex");
            if (b == index.end())
                throw SchemaError(path, "edge endpoint '" + edge_names[e].second + "' is not a declared vertex");
            int u = a->second, v = b->second;
            if (u == v) throw SchemaError(path, "loop edge at vertex '" + edge_names[e].first + "'");
            if (u > v) std::swap(u, v);
            for (const auto& prev : g.edges)
                if (prev == std::make_pair(u, v))
                    throw SchemaError(path, "duplicate edge {" + g.vertex_names[u] + "," + g.vertex_names[v] + "}");
            g.edges.emplace_back(u, v);
        }
        return g;
    }

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < vertex_names.size(); ++i)
            if (vertex_names[i] == name) return static_cast<int>(i);
        return -1;
    }

    std::pair<std::string, std::string> edge_names(int e) const {
        return {vertex_names[edges[e].first], vertex_names[edges[e].second]};
    }
};

// Mode-neutral framework document: coordinates are kept as exact rationals
// (doubles embed exactly), and exact_input records whether every coordinate
// was supplied in an exact form.
struct FrameworkSpec {
    NormSpec norm;
    Graph graph;
    std::vector<std::vector<Rational>> coords;  // per vertex, length = norm.dim
    bool exact_input = true;
};

// A framework in one scalar mode. Edge geometry is classified once at
// construction from p_v - p_w, v the smaller-indexed endpoint.
template <class T>
struct Framework {
    Graph graph;
    NormSpec norm;
    std::vector<std::vector<T>> placement;
    std::vector<EdgeGeometry<T>> edge_geometry;

    int dim() const { return norm.dim; }
    int vertex_count() const { return static_cast<int>(graph.vertex_names.size()); }
    int edge_count() const { return static_cast<int>(graph.edges.size()); }

    std::vector<T> edge_vector(int e) const {
        const auto [u, v] = graph.edges[e];
        return sub(placement[u], placement[v]);
    }
};

template <class T>
Framework<T> build_framework(const FrameworkSpec& spec) {
    Framework<T> fw;
    fw.graph = spec.graph;
    fw.norm = spec.norm;
    fw.placement.resize(spec.coords.size());
    for (size_t v = 0; v < spec.coords.size(); ++v) {
        fw.placement[v].resize(spec.norm.dim);
        for (int k = 0; k < spec.norm.dim; ++k) fw.placement[v][k] = from_rational<T>(spec.coords[v][k]);
    }
    fw.edge_geometry.reserve(fw.graph.edges.size());
    for (size_t e = 0; e < fw.graph.edges.size(); ++e)
        fw.edge_geometry.push_back(classify_edge_vector(fw.norm, fw.edge_vector(static_cast<int>(e))));
    return fw;
}

template <class T>
std::vector<T> rigidity_map(const Framework<T>& fw) {
    std::vector<T> lengths(fw.edge_count());
    for (int e = 0; e < fw.edge_count(); ++e)
        lengths[e] = norm_evaluate(fw.norm, fw.edge_vector(e));
    return lengths;
}

struct Classification {
    bool well_positioned = true;
    bool second_order_well_positioned = true;
    std::vector<int> badly_positioned_edges;         // zero-length or multiple active functionals
    std::vector<int> second_order_bad_edges;         // smooth but no Hessian
};

template <class T>
Classification classify_framework(const Framework<T>& fw) {
    Classification c;
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        if (g.badly_positioned()) {
            c.well_positioned = false;
            c.badly_positioned_edges.push_back(e);
        } else if (!g.twice_differentiable()) {
            c.second_order_bad_edges.push_back(e);
        }
    }
    c.second_order_well_positioned = c.well_positioned && c.second_order_bad_edges.empty();
    return c;
}

namespace detail {

inline Rational parse_coord(const json& value, const std::string& path, bool& exact_input) {
    if (value.is_number_integer()) return Rational(static_cast<long>(value.get<int64_t>()));
    if (value.is_number_float()) {
        exact_input = false;
        return Rational(value.get<double>());
    }
    if (value.is_string()) {
        auto q = parse_rational(value.get<std::string>());
        if (!q) throw SchemaError(path, "cannot parse '" + value.get<std::string>() + "' as a rational");
        return *q;
    }
    throw SchemaError(path, "expected a number or rational string");
}

inline json coord_to_json(const Rational& q, bool exact_style) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p())
        return json(static_cast<int64_t>(q.get_num().get_si()));
    if (exact_style) return json(rational_to_string(q));
    return json(to_double(q));
}

}  // namespace detail

inline FrameworkSpec parse_framework_spec(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "document must be a JSON object");
    for (const char* key : {"norm", "vertices", "edges", "placement"})
        if (!doc.contains(key)) throw SchemaError("/" + std::string(key), "missing required field");

    FrameworkSpec spec;

    const json& jn = doc["norm"];
    if (!jn.is_object()) throw SchemaError("/norm", "must be an object");
    if (!jn.contains("kind") || !jn["kind"].is_string())
        throw SchemaError("/norm/kind", "missing or non-string norm kind");
    if (!jn.contains("dim") || !jn["dim"].is_number_integer() || jn["dim"].get<int>() <= 0)
        throw SchemaError("/norm/dim", "missing or invalid dimension");
    const std::string kind = jn["kind"].get<std::string>();
    const int dim = jn["dim"].get<int>();
    try {
        if (kind == "euclidean") {
            spec.norm = NormSpec::euclidean(dim);
        } else if (kind == "lp") {
            if (!jn.contains("p") || !jn["p"].is_number())
                throw SchemaError("/norm/p", "lp norm requires a numeric field p");
            spec.norm = NormSpec::lp(dim, jn["p"].get<double>());
        } else if (kind == "polyhedral") {
            if (!jn.contains("functionals") || !jn["functionals"].is_array())
                throw SchemaError("/norm/functionals", "polyhedral norm requires a functionals array");
            std::vector<std::vector<Rational>> fs;
            for (size_t i = 0; i < jn["functionals"].size(); ++i) {
                const json& row = jn["functionals"][i];
                const std::string path = "/norm/functionals/" + std::to_string(i);
                if (!row.is_array() || static_cast<int>(row.size()) != dim)
                    throw SchemaError(path, "functional must be an array of length dim");
                std::vector<Rational> f(dim);
                for (int k = 0; k < dim; ++k)
                    f[k] = detail::parse_coord(row[k], path + "/" + std::to_string(k), spec.exact_input);
                fs.push_back(std::move(f));
            }
            spec.norm = NormSpec::polyhedral(dim, std::move(fs));
        } else {
            throw SchemaError("/norm/kind", "unknown norm kind '" + kind + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw SchemaError("/norm", e.what());
    }

    if (!doc["vertices"].is_array()) throw SchemaError("/vertices", "must be an array of strings");
    std::vector<std::string> names;
    for (size_t i = 0; i < doc["vertices"].size(); ++i) {
        if (!doc["vertices"][i].is_string())
            throw SchemaError("/vertices/" + std::to_string(i), "vertex name must be a string");
        names.push_back(doc["vertices"][i].get<std::string>());
    }

    if (!doc["edges"].is_array()) throw SchemaError("/edges", "must be an array of vertex pairs");
    std::vector<std::pair<std::string, std::string>> edge_names;
    for (size_t i = 0; i < doc["edges"].size(); ++i) {
        const json& e = doc["edges"][i];
        const std::string path = "/edges/" + std::to_string(i);
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw SchemaError(path, "edge must be a pair of vertex names");
        edge_names.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    spec.graph = Graph::make(std::move(names), edge_names);

    if (!doc["placement"].is_object()) throw SchemaError("/placement", "must map vertex names to coordinates");
    spec.coords.resize(spec.graph.vertex_names.size());
    for (size_t v = 0; v < spec.graph.vertex_names.size(); ++v) {
        const std::string& name = spec.graph.vertex_names[v];
        const std::string path = "/placement/" + name;
        if (!doc["placement"].contains(name)) throw SchemaError(path, "vertex has no coordinates");
        const json& pv = doc["placement"][name];
        if (!pv.is_array() || static_cast<int>(pv.size()) != spec.norm.dim)
            throw SchemaError(path, "coordinates must be an array of length " + std::to_string(spec.norm.dim));
        spec.coords[v].resize(spec.norm.dim);
        for (int k = 0; k < spec.norm.dim; ++k)
            spec.coords[v][k] = detail::parse_coord(pv[k], path + "/" + std::to_string(k), spec.exact_input);
    }
    for (const auto& [key, unused] : doc["placement"].items())
        if (spec.graph.index_of(key) < 0)
            throw SchemaError("/placement/" + key, "placement for undeclared vertex");

    return spec;
}

inline json serialize_framework_spec(const FrameworkSpec& spec) {
    json doc;
    json jn;
    switch (spec.norm.kind) {
        case NormKind::Euclidean:
            jn["kind"] = "euclidean";
            jn["dim"] = spec.norm.dim;
            break;
        case NormKind::Lp:
            jn["kind"] = "lp";
            jn["dim"] = spec.norm.dim;
            jn["p"] = spec.norm.p;
            break;
        case NormKind::Polyhedral: {
            jn["kind"] = "polyhedral";
            jn["dim"] = spec.norm.dim;
            json fs = json::array();
            for (const auto& f : spec.norm.functionals) {
                json row = json::array();
                for (const auto& x : f) row.push_back(detail::coord_to_json(x, true));
                fs.push_back(std::move(row));
            }
            jn["functionals"] = std::move(fs);
            break;
        }
    }
    doc["norm"] = std::move(jn);
    doc["vertices"] = spec.graph.vertex_names;
    json edges = json::array();
    for (const auto& [u, v] : spec.graph.edges)
        edges.push_back(json::array({spec.graph.vertex_names[u], spec.graph.vertex_names[v]}));
    doc["edges"] = std::move(edges);
    json placement;
    for (size_t v = 0; v < spec.graph.vertex_names.size(); ++v) {
        json pv = json::array();
        for (const auto& q : spec.coords[v]) pv.push_back(detail::coord_to_json(q, spec.exact_input));
        placement[spec.graph.vertex_names[v]] = std::move(pv);
    }
    doc["placement"] = std::move(placement);
    return doc;
}

// Mode selection: exact arithmetic needs exact input and a polyhedral norm
// (smooth norm values are irrational).
inline bool exact_mode_supported(const FrameworkSpec& spec) {
    return spec.exact_input && spec.norm.kind == NormKind::Polyhedral;
}

}  // namespace rigidity
