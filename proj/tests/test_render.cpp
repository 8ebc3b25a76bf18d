#include <catch2/catch_amalgamated.hpp>

#include "rigidity/analysis.hpp"
#include "rigidity/generators.hpp"
#include "rigidity/svg.hpp"

using namespace rigidity;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("single bar renders two circles, one line and two arrows") {
    const auto spec = gen_fixture("linf_single_bar");
    const auto report = analyze(spec);
    // infinitesimally rigid, so the arrows come from the strong flex witness
    REQUIRE(report.witnesses.contains("strong_flex"));
    std::vector<double> u(4, 0.0);
    const json& vec = report.witnesses["strong_flex"]["vector"];
    for (int v = 0; v < 2; ++v)
        for (int k = 0; k < 2; ++k) {
            const json& x = vec[spec.graph.vertex_names[v]][k];
            u[2 * v + k] = x.is_string() ? to_double(*parse_rational(x.get<std::string>()))
                                         : x.get<double>();
        }
    RenderOptions opts;
    opts.flex_arrows = true;
    const auto svg = render_svg(build_framework<double>(spec), u, opts);
    CHECK(count_occurrences(svg, "<circle") == 2);
    CHECK(count_occurrences(svg, "<line") == 1);
    CHECK(count_occurrences(svg, "<path") == 2);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("arrows land on the braced-square midpoints") {
    const auto spec = gen_fixture("euclid_braced_square_midpoints");
    const auto fw = build_framework<double>(spec);
    const auto verdict = is_infinitesimally_rigid(fw);
    REQUIRE(verdict.witness.has_value());
    RenderOptions opts;
    opts.flex_arrows = true;
    const auto svg = render_svg(fw, *verdict.witness, opts);
    CHECK(count_occurrences(svg, "<circle") == 6);
    CHECK(count_occurrences(svg, "<line") == 8);
    CHECK(count_occurrences(svg, "<path") >= 1);
}

TEST_CASE("empty framework renders an empty canvas") {
    FrameworkSpec spec;
    spec.norm = NormSpec::lp(2, 4);
    spec.graph = Graph::make({}, {});
    const auto svg = render_svg(build_framework<double>(spec), std::nullopt, {});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(count_occurrences(svg, "<circle") == 0);
    CHECK(count_occurrences(svg, "<line") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    const auto spec = gen_fixture("linf_seven_vertex");
    const auto fw = build_framework<double>(spec);
    CHECK(render_svg(fw, std::nullopt, {}) == render_svg(fw, std::nullopt, {}));
}

TEST_CASE("polyhedral edge coloring distinguishes the functional classes") {
    const auto fw = build_framework<double>(gen_fixture("linf_seven_vertex"));
    const auto svg = render_svg(fw, std::nullopt, {});
    // both axis classes appear, and the tied edges are black
    CHECK(svg.find("#d62728") != std::string::npos);
    CHECK(svg.find("#1f77b4") != std::string::npos);
    CHECK(svg.find("stroke=\"#000000\"") != std::string::npos);
}
