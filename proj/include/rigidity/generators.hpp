#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rigidity/firstorder.hpp"
#include "rigidity/framework.hpp"

namespace rigidity {

// m x n unit grid with double braces in selected cells; placement (i,j).
struct GridSpec {
    int m = 2;
    int n = 2;
    std::vector<std::pair<int, int>> braces;  // cells (i,j), 1 <= i < m, 1 <= j < n
    double p = 4.0;
};

inline FrameworkSpec gen_grid(const GridSpec& grid) {
    if (grid.m < 2 || grid.n < 2) throw std::invalid_argument("grid needs m, n >= 2");
    std::set<std::pair<int, int>> seen;
    for (const auto& [i, j] : grid.braces) {
        if (i < 1 || i >= grid.m || j < 1 || j >= grid.n)
            throw std::invalid_argument("brace cell (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") out of range");
        if (!seen.insert({i, j}).second)
            throw std::invalid_argument("duplicate brace cell (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
    }
    const auto name = [](int i, int j) { return "v" + std::to_string(i) + "_" + std::to_string(j); };
    FrameworkSpec spec;
    spec.norm = NormSpec::lp(2, grid.p);
    std::vector<std::string> names;
    std::vector<std::vector<Rational>> coords;
    for (int i = 1; i <= grid.m; ++i)
        for (int j = 1; j <= grid.n; ++j) {
            names.push_back(name(i, j));
            coords.push_back({Rational(i), Rational(j)});
        }
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 1; i <= grid.m; ++i)
        for (int j = 1; j <= grid.n; ++j) {
            if (i < grid.m) edges.emplace_back(name(i, j), name(i + 1, j));
            if (j < grid.n) edges.emplace_back(name(i, j), name(i, j + 1));
        }
    for (const auto& [i, j] : grid.braces) {
        edges.emplace_back(name(i, j), name(i + 1, j + 1));
        edges.emplace_back(name(i + 1, j), name(i, j + 1));
    }
    spec.graph = Graph::make(std::move(names), edges);
    spec.coords = std::move(coords);
    return spec;
}

// The named example frameworks. Decimal coordinates are stored as exact
// rationals so the polyhedral analyses can run in exact mode.
inline FrameworkSpec gen_fixture(const std::string& fixture_name, double p = 4.0) {
    FrameworkSpec spec;
    const auto q = [](long num, long den = 1) { return Rational(num, den); };
    if (fixture_name == "linf_single_bar") {
        spec.norm = NormSpec::linf(2);
        spec.graph = Graph::make({"a", "b"}, {{"a", "b"}});
        spec.coords = {{q(0), q(0)}, {q(1), q(1)}};
        return spec;
    }
    if (fixture_name == "linf_seven_vertex") {
        spec.norm = NormSpec::linf(2);
        spec.graph = Graph::make({"v1", "v2", "v3", "v4", "v5", "v6", "v7"},
                                 {{"v1", "v2"},
                                  {"v1", "v3"},
                                  {"v2", "v3"},
                                  {"v2", "v4"},
                                  {"v3", "v4"},
                                  {"v1", "v4"},
                                  {"v1", "v5"},
                                  {"v4", "v5"},
                                  {"v2", "v6"},
                                  {"v3", "v6"},
                                  {"v5", "v7"},
                                  {"v6", "v7"}});
        spec.coords = {{q(0), q(0)},      {q(1), q(0)},      {q(9, 10), q(1)}, {q(-1, 10), q(1)},
                       {q(1, 2), q(6, 5)}, {q(1, 2), q(6, 5)}, {q(13, 10), q(2)}};
        return spec;
    }
    if (fixture_name == "linf_k4_square") {
        spec.norm = NormSpec::linf(2);
        spec.graph = Graph::make(
            {"v1", "v2", "v3", "v4"},
            {{"v1", "v2"}, {"v1", "v3"}, {"v1", "v4"}, {"v2", "v3"}, {"v2", "v4"}, {"v3", "v4"}});
        spec.coords = {{q(-1), q(-1)}, {q(1), q(-1)}, {q(-1), q(1)}, {q(1), q(1)}};
        return spec;
    }
    if (fixture_name == "lp_k4_square") {
        spec.norm = NormSpec::lp(2, p);
        spec.graph = Graph::make(
            {"v1", "v2", "v3", "v4"},
            {{"v1", "v2"}, {"v1", "v3"}, {"v2", "v4"}, {"v3", "v4"}, {"v1", "v4"}, {"v2", "v3"}});
        spec.coords = {{q(0), q(0)}, {q(1), q(0)}, {q(0), q(1)}, {q(1), q(1)}};
        return spec;
    }
    if (fixture_name == "euclid_braced_square_midpoints") {
        // braced unit square with mid-edge vertices on two sides
        spec.norm = NormSpec::euclidean(2);
        spec.graph = Graph::make({"c1", "c2", "m23", "c3", "m34", "c4"},
                                 {{"c1", "c2"},
                                  {"c1", "c3"},
                                  {"c2", "m23"},
                                  {"m23", "c3"},
                                  {"c2", "c4"},
                                  {"c3", "m34"},
                                  {"m34", "c4"},
                                  {"c4", "c1"}});
        spec.coords = {{q(0), q(0)}, {q(1), q(0)}, {q(1), q(1, 2)},
                       {q(1), q(1)}, {q(1, 2), q(1)}, {q(0), q(1)}};
        return spec;
    }
    if (fixture_name == "flexible_grid_fig5i")
        return gen_grid({4, 4, {{1, 1}, {3, 1}, {1, 3}, {3, 3}}, p});
    if (fixture_name == "stable_grid_fig5ii")
        return gen_grid({4, 4, {{1, 3}, {2, 2}, {3, 1}}, p});
    throw std::invalid_argument("unknown fixture '" + fixture_name + "'");
}

// Pin a new vertex v0 onto the segment between two vertices of a base
// framework: q_v0 = (1-t) q_v1 + t q_v2, edges v0v1 and v0v2. The base must
// be infinitesimally rigid with no nonzero stress and pairwise distinct
// points.
inline FrameworkSpec gen_colinear_augmentation(const FrameworkSpec& base, const std::string& v1,
                                               const std::string& v2, const Rational& t) {
    if (!(t > 0 && t < 1)) throw std::invalid_argument("colinear parameter t must lie in (0,1)");
    const int i1 = base.graph.index_of(v1);
    const int i2 = base.graph.index_of(v2);
    if (i1 < 0 || i2 < 0) throw std::invalid_argument("colinear augmentation: unknown vertex name");
    if (i1 == i2) throw std::invalid_argument("colinear augmentation: v1 and v2 must differ");

    for (size_t a = 0; a < base.coords.size(); ++a)
        for (size_t b = a + 1; b < base.coords.size(); ++b)
            if (base.coords[a] == base.coords[b])
                throw std::invalid_argument("colinear augmentation: base has coincident points (" +
                                            base.graph.vertex_names[a] + ", " +
                                            base.graph.vertex_names[b] + ")");
    const auto fw = build_framework<double>(base);
    const auto inf = is_infinitesimally_rigid(fw);
    if (inf.outcome != Outcome::Yes)
        throw std::invalid_argument("colinear augmentation: base is not infinitesimally rigid");
    const auto stresses = stress_space(fw);
    if (!stresses || stresses->norm_stress.dim() != 0)
        throw std::invalid_argument("colinear augmentation: base has a nonzero stress");

    FrameworkSpec out = base;
    std::string v0 = "v0";
    while (out.graph.index_of(v0) >= 0) v0 += "_";
    std::vector<std::string> names = base.graph.vertex_names;
    names.push_back(v0);
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [a, b] : base.graph.edges)
        edges.emplace_back(base.graph.vertex_names[a], base.graph.vertex_names[b]);
    edges.emplace_back(v0, v1);
    edges.emplace_back(v0, v2);
    out.graph = Graph::make(std::move(names), edges);
    std::vector<Rational> pos(base.norm.dim);
    for (int k = 0; k < base.norm.dim; ++k)
        pos[k] = (Rational(1) - t) * base.coords[i1][k] + t * base.coords[i2][k];
    out.coords.push_back(std::move(pos));
    return out;
}

// Uniform placement in [-1,1]^d, bit-reproducible per seed (splitmix64).
inline FrameworkSpec gen_random_placement(const Graph& graph, const NormSpec& norm, uint64_t seed) {
    FrameworkSpec spec;
    spec.norm = norm;
    spec.graph = graph;
    spec.exact_input = true;  // dyadic doubles embed exactly in the rationals
    uint64_t state = seed;
    const auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    spec.coords.resize(graph.vertex_names.size());
    for (auto& point : spec.coords) {
        point.resize(norm.dim);
        for (int k = 0; k < norm.dim; ++k) {
            const double x = 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
            point[k] = Rational(x);
        }
    }
    return spec;
}

}  // namespace rigidity
