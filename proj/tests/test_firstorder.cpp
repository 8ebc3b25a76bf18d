#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "rigidity/firstorder.hpp"
#include "rigidity/generators.hpp"
#include "test_util.hpp"

using namespace rigidity;

namespace {

const Rational kHalf(1, 2);

// l-infinity K5 with one tied edge (v1v2) whose nine singleton rows pin every
// coordinate: infinitesimally rigid and strongly rigid despite being
// badly-positioned.
FrameworkSpec linf_k5_pinned() {
    FrameworkSpec spec;
    spec.norm = NormSpec::linf(2);
    spec.graph = Graph::make({"v1", "v2", "v3", "v4", "v5"},
                             {{"v1", "v2"},
                              {"v1", "v3"},
                              {"v1", "v4"},
                              {"v1", "v5"},
                              {"v2", "v3"},
                              {"v2", "v4"},
                              {"v2", "v5"},
                              {"v3", "v4"},
                              {"v3", "v5"},
                              {"v4", "v5"}});
    spec.coords = {{Rational(0), Rational(0)},
                   {Rational(2), Rational(2)},
                   {Rational(9), Rational(1)},
                   {Rational(1), Rational(7)},
                   {Rational(10), Rational(-3)}};
    return spec;
}

}  // namespace

TEST_CASE("trivial space dimensions") {
    const auto k4 = build_framework<double>(gen_fixture("lp_k4_square", 4.0));
    CHECK(trivial_space(k4).dim() == 2);

    // Euclidean K4: two translations plus a rotation
    auto spec = gen_fixture("lp_k4_square", 4.0);
    spec.norm = NormSpec::euclidean(2);
    spec.coords[3] = {Rational(13, 10), Rational(17, 10)};
    const auto euc = build_framework<double>(spec);
    CHECK(trivial_space(euc).dim() == 3);

    // all vertices coincident: the rotation generator vanishes
    auto coincident = spec;
    for (auto& c : coincident.coords) c = {Rational(0), Rational(0)};
    CHECK(trivial_space(build_framework<double>(coincident)).dim() == 2);
}

TEST_CASE("flex space of the single bar is the translations") {
    const auto bar = build_framework<Rational>(gen_fixture("linf_single_bar"));
    const auto flex = flex_space(bar);
    CHECK(flex.dim() == 2);
    const auto verdict = is_infinitesimally_rigid(bar);
    CHECK(verdict.outcome == Outcome::Yes);
    CHECK(verdict.trivial_dim == 2);
}

TEST_CASE("lp K4 square flexes") {
    const auto fw = build_framework<double>(gen_fixture("lp_k4_square", 4.0));
    const auto flex = flex_space(fw);
    CHECK(flex.dim() == 3);

    // the known nontrivial flex lies in the flex space and is certified by
    // the directional-derivative oracle
    const std::vector<double> ubar{1, -1, 1, 1, -1, -1, -1, 1};
    const auto residual = flex_system_matrix(fw).mul_vec(ubar);
    CHECK(norm2(residual) < 1e-9);
    CHECK(certify_flex(fw, ubar));

    const auto verdict = is_infinitesimally_rigid(fw);
    CHECK(verdict.outcome == Outcome::No);
    REQUIRE(verdict.witness.has_value());
    CHECK(certify_flex(fw, *verdict.witness));

    // a near-flex fails certification
    std::vector<double> bad = ubar;
    bad[0] += 0.01;
    CHECK(!certify_flex(fw, bad));
}

TEST_CASE("seven vertex framework is infinitesimally rigid") {
    const auto fw = build_framework<Rational>(gen_fixture("linf_seven_vertex"));
    const auto flex = flex_space(fw);
    CHECK(flex.dim() == 2);
    CHECK(is_infinitesimally_rigid(fw).outcome == Outcome::Yes);
}

TEST_CASE("braced square with midpoints is infinitesimally flexible") {
    const auto fw = build_framework<double>(gen_fixture("euclid_braced_square_midpoints"));
    const auto verdict = is_infinitesimally_rigid(fw);
    CHECK(verdict.outcome == Outcome::No);
    CHECK(verdict.trivial_dim == 3);
    CHECK(verdict.flex_dim == 5);
    REQUIRE(verdict.witness.has_value());
    CHECK(certify_flex(fw, *verdict.witness));
    // the dominant motion is at a mid-edge vertex
    const auto& u = *verdict.witness;
    double best = 0.0;
    int best_vertex = -1;
    for (int v = 0; v < fw.vertex_count(); ++v) {
        const double m = std::hypot(u[2 * v], u[2 * v + 1]);
        if (m > best) {
            best = m;
            best_vertex = v;
        }
    }
    const std::string name = fw.graph.vertex_names[best_vertex];
    CHECK((name == "m23" || name == "m34"));
}

TEST_CASE("stress spaces of the lp K4 square") {
    const auto fw = build_framework<double>(gen_fixture("lp_k4_square", 4.0));
    const auto stresses = stress_space(fw);
    REQUIRE(stresses.has_value());
    CHECK(stresses->norm_stress.dim() == 1);
    REQUIRE(stresses->power_stress.has_value());
    CHECK(stresses->power_stress->dim() == 1);

    // edge order: v1v2, v1v3, v2v4, v3v4, v1v4, v2v3; the power stress is
    // proportional to (-1,-1,-1,-1,1,1)
    auto a = stresses->power_stress->basis.col(0);
    const double scale = a[4];
    REQUIRE(scale != 0.0);
    for (double& x : a) x /= scale;
    const std::vector<double> expected{-1, -1, -1, -1, 1, 1};
    for (int e = 0; e < 6; ++e) CHECK(a[e] == Catch::Approx(expected[e]).margin(1e-9));

    // the norm stress shares the sign pattern
    auto an = stresses->norm_stress.basis.col(0);
    if (an[4] < 0)
        for (double& x : an) x = -x;
    for (int e = 0; e < 4; ++e) CHECK(an[e] < 0);
    CHECK(an[4] > 0);
    CHECK(an[5] > 0);
}

TEST_CASE("generic K4 in l4 has no stress") {
    Graph k4 = Graph::make({"a", "b", "c", "d"},
                           {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
    const auto spec = gen_random_placement(k4, NormSpec::lp(2, 4), 1);
    const auto fw = build_framework<double>(spec);
    const auto stresses = stress_space(fw);
    REQUIRE(stresses.has_value());
    CHECK(stresses->norm_stress.dim() == 0);
    CHECK(is_infinitesimally_rigid(fw).outcome == Outcome::Yes);
}

TEST_CASE("a single smooth bar carries no stress") {
    FrameworkSpec spec;
    spec.norm = NormSpec::lp(2, 4);
    spec.graph = Graph::make({"a", "b"}, {{"a", "b"}});
    spec.coords = {{Rational(0), Rational(0)}, {Rational(2), Rational(1)}};
    const auto fw = build_framework<double>(spec);
    const auto stresses = stress_space(fw);
    REQUIRE(stresses.has_value());
    CHECK(stresses->norm_stress.dim() == 0);
}

TEST_CASE("stress space needs a well-positioned framework") {
    const auto bar = build_framework<Rational>(gen_fixture("linf_single_bar"));
    CHECK(!stress_space(bar).has_value());
}

TEST_CASE("single bar: strongly flexible with a certified witness") {
    const auto fw = build_framework<Rational>(gen_fixture("linf_single_bar"));
    const auto strong = strong_flex_search(fw);
    CHECK(strong.outcome == Outcome::No);
    REQUIRE(strong.witness.has_value());
    REQUIRE(!strong.assignment.empty());
    CHECK(certify_strong_witness(fw, *strong.witness, strong.assignment));
    // the witness moves the endpoints against each other
    const auto& u = *strong.witness;
    CHECK((u[0] != u[2] || u[1] != u[3]));

    CHECK(!edge_count_bound_check(fw));  // 1 < 2*2 - 2
}

TEST_CASE("seven vertex framework is strongly flexible") {
    const auto fw = build_framework<Rational>(gen_fixture("linf_seven_vertex"));
    const auto strong = strong_flex_search(fw);
    CHECK(strong.outcome == Outcome::No);
    REQUIRE(strong.witness.has_value());
    CHECK(certify_strong_witness(fw, *strong.witness, strong.assignment));
}

TEST_CASE("linf K4 square is strongly flexible") {
    const auto fw = build_framework<Rational>(gen_fixture("linf_k4_square"));
    const auto strong = strong_flex_search(fw);
    CHECK(strong.outcome == Outcome::No);
    REQUIRE(strong.witness.has_value());
    CHECK(certify_strong_witness(fw, *strong.witness, strong.assignment));
}

TEST_CASE("float mode refuses the badly-positioned polyhedral strong search") {
    const auto fw = build_framework<double>(gen_fixture("linf_single_bar"));
    CHECK_THROWS_AS(strong_flex_search(fw), UnsupportedAnalysis);
}

TEST_CASE("zero-length edges impose nothing on the strong search") {
    // two coincident vertices joined by an edge, plus an anchored pair
    FrameworkSpec spec;
    spec.norm = NormSpec::lp(2, 4);
    spec.graph = Graph::make({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"b", "c"}});
    spec.coords = {{Rational(0), Rational(0)}, {Rational(0), Rational(0)}, {Rational(1), Rational(2)}};
    const auto fw = build_framework<double>(spec);
    CHECK(!classify_framework(fw).well_positioned);
    const auto strong = strong_flex_search(fw);
    // dropping the zero edge leaves too few constraints
    CHECK(strong.outcome == Outcome::No);
    REQUIRE(strong.witness.has_value());

    // the flex space still forces u_a = u_b through the zero-length edge
    const auto flex = flex_space(fw);
    for (int j = 0; j < flex.dim(); ++j) {
        const auto col = flex.basis.col(j);
        CHECK(col[0] == Catch::Approx(col[2]).margin(1e-9));
        CHECK(col[1] == Catch::Approx(col[3]).margin(1e-9));
    }
}

TEST_CASE("pinned K5 is strongly rigid despite the tie") {
    const auto fw = build_framework<Rational>(linf_k5_pinned());
    CHECK(!classify_framework(fw).well_positioned);
    CHECK(is_infinitesimally_rigid(fw).outcome == Outcome::Yes);
    const auto strong = strong_flex_search(fw);
    CHECK(strong.outcome == Outcome::Yes);
    CHECK(edge_count_bound_check(fw));

    // every sampled member of the product family then has rank d|V| - dim T
    const int target = 2 * 5 - 2;
    testutil::Rng rng(0);
    std::vector<std::vector<Rational>> weight_choices = {
        {Rational(1), Rational(0)}, {Rational(0), Rational(1)}, {kHalf, kHalf}};
    for (int i = 0; i < 10; ++i) {
        const Rational w(1 + rng.below(97), 101);
        weight_choices.push_back({w, Rational(1) - w});
    }
    for (const auto& w : weight_choices) {
        std::map<int, std::vector<Rational>> weights{{0, w}};
        CHECK(rank(generalized_operator_at(fw, weights)) == target);
    }
}

TEST_CASE("generalized operator of the single bar") {
    const auto fw = build_framework<Rational>(gen_fixture("linf_single_bar"));
    std::map<int, std::vector<Rational>> weights{{0, {kHalf, kHalf}}};
    const auto op = generalized_operator_at(fw, weights);
    REQUIRE(op.rows() == 1);
    CHECK(op.row(0) == std::vector<Rational>{-kHalf, -kHalf, kHalf, kHalf});
    CHECK(rank(op) == 1);

    CHECK_THROWS_AS(generalized_operator_at(fw, {}), std::invalid_argument);
    std::map<int, std::vector<Rational>> bad{{0, {Rational(2), Rational(-1)}}};
    CHECK_THROWS_AS(generalized_operator_at(fw, bad), std::invalid_argument);
}

TEST_CASE("seven vertex operator pencil ranks") {
    const auto fw = build_framework<Rational>(gen_fixture("linf_seven_vertex"));
    const int e57 = 10, e67 = 11;  // declaration order
    REQUIRE(fw.edge_geometry[e57].active_rows.size() == 2);
    REQUIRE(fw.edge_geometry[e67].active_rows.size() == 2);

    const auto rank_at = [&](const Rational& s, const Rational& t) {
        std::map<int, std::vector<Rational>> weights{{e57, {s, Rational(1) - s}},
                                                     {e67, {t, Rational(1) - t}}};
        return rank(generalized_operator_at(fw, weights));
    };
    for (const Rational& s : {Rational(0), Rational(3, 10), Rational(1)}) CHECK(rank_at(s, s) == 11);
    CHECK(rank_at(Rational(0), Rational(1)) == 12);
    CHECK(rank_at(Rational(1), Rational(0)) == 12);
    CHECK(rank_at(Rational(1, 4), Rational(3, 4)) == 12);
}

TEST_CASE("edge count bound examples") {
    CHECK(edge_count_bound_check(build_framework<double>(gen_fixture("lp_k4_square", 4.0))));
    const auto grid = build_framework<double>(gen_fixture("stable_grid_fig5ii", 4.0));
    CHECK(grid.edge_count() == 30);
    CHECK(edge_count_bound_check(grid));
}

TEST_CASE("trivial flexes always live inside the flex space") {
    testutil::Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + rng.below(6);
        std::vector<std::string> names;
        for (int v = 0; v < n; ++v) names.push_back("p" + std::to_string(v));
        std::vector<std::pair<std::string, std::string>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng.below(3) != 0) edges.emplace_back(names[a], names[b]);
        const Graph g = Graph::make(names, edges);
        const NormSpec norm = trial % 3 == 0   ? NormSpec::linf(2)
                              : trial % 3 == 1 ? NormSpec::lp(2, 4)
                                               : NormSpec::euclidean(2);
        const auto spec = gen_random_placement(g, norm, 1000 + trial);
        if (norm.kind == NormKind::Polyhedral) {
            const auto fw = build_framework<Rational>(spec);
            const auto sys = flex_system_matrix(fw);
            const auto triv = trivial_space(fw);
            const auto prod = sys * triv.basis;
            for (int i = 0; i < prod.rows(); ++i)
                for (int j = 0; j < prod.cols(); ++j) CHECK(prod(i, j) == 0);
        } else {
            const auto fw = build_framework<double>(spec);
            const auto sys = flex_system_matrix(fw);
            const auto triv = trivial_space(fw);
            CHECK((sys * triv.basis).max_abs() < 1e-9 * std::max(1.0, sys.max_abs()));
        }
    }
}

TEST_CASE("well-positioned strong verdict equals the infinitesimal one") {
    testutil::Rng rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        Graph k4 = Graph::make({"a", "b", "c", "d"},
                               {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
        const auto spec = gen_random_placement(k4, NormSpec::linf(2), 500 + trial);
        const auto fw = build_framework<Rational>(spec);
        if (!classify_framework(fw).well_positioned) continue;
        const auto inf = is_infinitesimally_rigid(fw);
        const auto strong = strong_flex_search(fw);
        CHECK(inf.outcome == strong.outcome);
    }
}
