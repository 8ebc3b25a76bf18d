#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "rigidity/generators.hpp"
#include "rigidity/secondorder.hpp"

using namespace rigidity;

TEST_CASE("fixtures match their stated shapes") {
    const auto bar = gen_fixture("linf_single_bar");
    CHECK(bar.graph.vertex_names == std::vector<std::string>{"a", "b"});
    CHECK(bar.coords[1] == std::vector<Rational>{Rational(1), Rational(1)});
    CHECK(bar.norm.kind == NormKind::Polyhedral);

    const auto seven = gen_fixture("linf_seven_vertex");
    CHECK(seven.graph.vertex_names.size() == 7);
    CHECK(seven.graph.edges.size() == 12);
    CHECK(seven.coords[2] == std::vector<Rational>{Rational(9, 10), Rational(1)});
    CHECK(seven.coords[4] == seven.coords[5]);  // coincident but not adjacent

    const auto k4 = gen_fixture("lp_k4_square", 4.0);
    CHECK(k4.graph.edges.size() == 6);
    CHECK(k4.norm.p == 4.0);

    const auto grid = gen_fixture("stable_grid_fig5ii", 4.0);
    CHECK(grid.graph.vertex_names.size() == 16);
    CHECK(grid.graph.edges.size() == 30);

    CHECK_THROWS_AS(gen_fixture("no_such_fixture"), std::invalid_argument);
}

TEST_CASE("grid construction and validation") {
    CHECK_THROWS_AS(gen_grid({4, 4, {{0, 1}}, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(gen_grid({4, 4, {{4, 1}}, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(gen_grid({4, 4, {{1, 1}, {1, 1}}, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(gen_grid({1, 3, {}, 4.0}), std::invalid_argument);

    const auto plain = gen_grid({3, 3, {}, 4.0});
    CHECK(plain.graph.vertex_names.size() == 9);
    CHECK(plain.graph.edges.size() == 12);
}

TEST_CASE("the smallest braced grid is the K4 square") {
    const auto grid = gen_grid({2, 2, {{1, 1}}, 4.0});
    const auto k4 = gen_fixture("lp_k4_square", 4.0);
    REQUIRE(grid.graph.vertex_names.size() == 4);
    REQUIRE(grid.graph.edges.size() == 6);

    // vertex map v{i}_{j} -> K4 vertex placed at (i-1, j-1)
    const auto of_grid = [&](int v) {
        const auto& c = grid.coords[v];
        return std::pair<Rational, Rational>(c[0] - 1, c[1] - 1);
    };
    std::map<std::pair<Rational, Rational>, int> k4_at;
    for (size_t v = 0; v < k4.coords.size(); ++v)
        k4_at[{k4.coords[v][0], k4.coords[v][1]}] = static_cast<int>(v);

    std::set<std::pair<int, int>> grid_edges_mapped, k4_edges;
    for (const auto& [a, b] : grid.graph.edges) {
        int ma = k4_at.at(of_grid(a)), mb = k4_at.at(of_grid(b));
        if (ma > mb) std::swap(ma, mb);
        grid_edges_mapped.insert({ma, mb});
    }
    for (const auto& e : k4.graph.edges) k4_edges.insert(e);
    CHECK(grid_edges_mapped == k4_edges);

    // identical verdicts
    const auto fw_grid = build_framework<double>(grid);
    const auto fw_k4 = build_framework<double>(k4);
    CHECK(flex_space(fw_grid).dim() == flex_space(fw_k4).dim());
    CHECK(prestress_decide(fw_grid).outcome == prestress_decide(fw_k4).outcome);
}

TEST_CASE("colinear augmentation validation") {
    Graph k4 = Graph::make({"a", "b", "c", "d"},
                           {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
    const auto base = gen_random_placement(k4, NormSpec::lp(2, 4), 1);

    CHECK_THROWS_AS(gen_colinear_augmentation(base, "a", "a", Rational(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(gen_colinear_augmentation(base, "a", "b", Rational(0)), std::invalid_argument);
    CHECK_THROWS_AS(gen_colinear_augmentation(base, "a", "zz", Rational(1, 2)), std::invalid_argument);

    const auto aug = gen_colinear_augmentation(base, "a", "b", Rational(1, 3));
    CHECK(aug.graph.vertex_names.size() == 5);
    CHECK(aug.graph.edges.size() == 8);
    // v0 sits at the stated combination
    for (int k = 0; k < 2; ++k)
        CHECK(aug.coords[4][k] ==
              Rational(2, 3) * base.coords[0][k] + Rational(1, 3) * base.coords[1][k]);

    // an infinitesimally flexible base is rejected, naming the reason
    const auto square = gen_fixture("lp_k4_square", 4.0);
    try {
        gen_colinear_augmentation(square, "v1", "v2", Rational(1, 2));
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("rigid") != std::string::npos);
    }
}

TEST_CASE("random placements are deterministic per seed") {
    Graph g = Graph::make({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    const auto s1 = gen_random_placement(g, NormSpec::lp(2, 4), 42);
    const auto s2 = gen_random_placement(g, NormSpec::lp(2, 4), 42);
    const auto s3 = gen_random_placement(g, NormSpec::lp(2, 4), 43);
    CHECK(s1.coords == s2.coords);
    CHECK(s1.coords != s3.coords);
    for (const auto& c : s1.coords)
        for (const auto& x : c) {
            CHECK(x >= -1);
            CHECK(x <= 1);
        }

    // empty graph gives an empty framework
    Graph empty = Graph::make({}, {});
    const auto s4 = gen_random_placement(empty, NormSpec::lp(2, 4), 0);
    CHECK(s4.coords.empty());
    CHECK(build_framework<double>(s4).edge_count() == 0);
}

TEST_CASE("grid verdict law on small covering and non-covering patterns") {
    // covering pattern: rows {1,2} and columns {1,2} both hit
    const auto covered = build_framework<double>(gen_grid({3, 3, {{1, 1}, {2, 2}}, 4.0}));
    CHECK(prestress_decide(covered).outcome == Outcome::Yes);

    // row 2 uncovered: infinitesimally flexible
    const auto uncovered = build_framework<double>(gen_grid({3, 3, {{1, 1}}, 4.0}));
    const auto verdict = is_infinitesimally_rigid(uncovered);
    CHECK(verdict.outcome == Outcome::No);
    CHECK(prestress_decide(uncovered).outcome != Outcome::Yes);
}
