#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rigidity/analysis.hpp"
#include "rigidity/generators.hpp"
#include "rigidity/svg.hpp"

namespace {

using namespace rigidity;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;        // schema violations, malformed input
constexpr int kExitUnsupported = 3;  // analysis not available in the requested mode

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot open '" + path + "'");
    return json::parse(in);
}

Mode parse_mode(const std::string& mode) {
    if (mode == "auto") return Mode::Auto;
    if (mode == "exact") return Mode::Exact;
    if (mode == "float") return Mode::Float;
    throw CLI::ValidationError("--mode", "expected auto, exact or float");
}

// arrows to draw: the nontrivial flex if one exists, otherwise the strong
// flex witness
std::optional<std::vector<double>> display_witness(const AnalysisReport& report,
                                                   const FrameworkSpec& spec) {
    const json* source = nullptr;
    if (report.witnesses.contains("nontrivial_flex"))
        source = &report.witnesses["nontrivial_flex"];
    else if (report.witnesses.contains("strong_flex"))
        source = &report.witnesses["strong_flex"]["vector"];
    if (!source) return std::nullopt;
    std::vector<double> u(spec.graph.vertex_names.size() * spec.norm.dim, 0.0);
    for (size_t v = 0; v < spec.graph.vertex_names.size(); ++v) {
        const json& coords = (*source)[spec.graph.vertex_names[v]];
        for (int k = 0; k < spec.norm.dim; ++k) {
            const json& x = coords[k];
            if (x.is_string()) {
                const auto q = parse_rational(x.get<std::string>());
                u[v * spec.norm.dim + k] = q ? to_double(*q) : 0.0;
            } else {
                u[v * spec.norm.dim + k] = x.get<double>();
            }
        }
    }
    return u;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::vector<std::pair<int, int>> parse_braces(const std::string& text) {
    std::vector<std::pair<int, int>> braces;
    if (text.empty()) return braces;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ';')) {
        const auto comma = cell.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("brace cell '" + cell + "' is not of the form i,j");
        braces.emplace_back(std::stoi(cell.substr(0, comma)), std::stoi(cell.substr(comma + 1)));
    }
    return braces;
}

const std::map<std::string, std::string> kFixtureAliases = {
    {"single-bar", "linf_single_bar"},
    {"seven-vertex", "linf_seven_vertex"},
    {"linf-k4", "linf_k4_square"},
    {"k4-square", "lp_k4_square"},
    {"braced-square-midpoints", "euclid_braced_square_midpoints"},
    {"grid-fig5i", "flexible_grid_fig5i"},
    {"grid-fig5ii", "stable_grid_fig5ii"},
};

int run(int argc, char** argv) {
    CLI::App app{"rigidity properties of bar-and-joint frameworks in normed spaces"};
    app.require_subcommand(1);

    std::string input_path, json_path, svg_path, mode_str = "auto", braces_str;
    double tol = 1e-9, scale = 100.0, p = 4.0;
    uint64_t seed = 0;
    bool flex_arrows = false;
    int grid_m = 4, grid_n = 4;
    std::string fixture_name;

    auto* analyze_cmd = app.add_subcommand("analyze", "analyze a framework JSON file");
    analyze_cmd->add_option("input", input_path, "framework JSON file")->required();
    analyze_cmd->add_option("--json", json_path, "write the report here instead of stdout");
    analyze_cmd->add_option("--svg", svg_path, "also render the framework to this SVG file");
    analyze_cmd->add_flag("--flex-arrows", flex_arrows, "draw the first nontrivial flex in the SVG");
    analyze_cmd->add_option("--mode", mode_str, "auto|exact|float (default auto)");
    analyze_cmd->add_option("--tol", tol, "relative rank tolerance (float mode)");
    analyze_cmd->add_option("--seed", seed, "seed for randomized second-order searches");

    auto* generate_cmd = app.add_subcommand("generate", "emit a named example framework as JSON");
    generate_cmd->add_option("name", fixture_name,
                             "single-bar|seven-vertex|linf-k4|k4-square|braced-square-midpoints|"
                             "grid-fig5i|grid-fig5ii|grid")
        ->required();
    generate_cmd->add_option("--p", p, "lp norm exponent where applicable (default 4)");
    generate_cmd->add_option("--m", grid_m, "grid rows (grid only)");
    generate_cmd->add_option("--n", grid_n, "grid columns (grid only)");
    generate_cmd->add_option("--braces", braces_str, "braced cells, e.g. \"1,3;2,2;3,1\" (grid only)");

    auto* render_cmd = app.add_subcommand("render", "draw a framework JSON file as SVG");
    render_cmd->add_option("input", input_path, "framework JSON file")->required();
    render_cmd->add_option("--svg", svg_path, "output SVG path")->required();
    render_cmd->add_flag("--flex-arrows", flex_arrows, "draw the first nontrivial flex");
    render_cmd->add_option("--scale", scale, "pixels per coordinate unit (default 100)");
    render_cmd->add_option("--mode", mode_str, "analysis mode for the arrow witness");
    render_cmd->add_option("--tol", tol, "relative rank tolerance");
    render_cmd->add_option("--seed", seed, "seed for randomized searches");

    CLI11_PARSE(app, argc, argv);

    if (*generate_cmd) {
        FrameworkSpec spec;
        if (fixture_name == "grid") {
            spec = gen_grid({grid_m, grid_n, parse_braces(braces_str), p});
        } else {
            const auto alias = kFixtureAliases.find(fixture_name);
            spec = gen_fixture(alias != kFixtureAliases.end() ? alias->second : fixture_name, p);
        }
        std::cout << serialize_framework_spec(spec).dump(2) << "\n";
        return kExitOk;
    }

    const json doc = read_json_file(input_path);
    const FrameworkSpec spec = parse_framework_spec(doc);
    AnalyzeOptions options;
    options.mode = parse_mode(mode_str);
    options.rank_tol = tol;
    options.seed = seed;

    if (*analyze_cmd) {
        const AnalysisReport report = analyze(spec, options);
        const std::string text = report.to_json().dump(2) + "\n";
        if (json_path.empty())
            std::cout << text;
        else
            write_text_file(json_path, text);
        if (!svg_path.empty()) {
            RenderOptions ropts;
            ropts.flex_arrows = flex_arrows;
            const auto witness = flex_arrows ? display_witness(report, spec) : std::nullopt;
            write_text_file(svg_path, render_svg(build_framework<double>(spec), witness, ropts));
        }
        return kExitOk;
    }

    // render
    RenderOptions ropts;
    ropts.scale = scale;
    ropts.flex_arrows = flex_arrows;
    std::optional<std::vector<double>> witness;
    if (flex_arrows) witness = display_witness(analyze(spec, options), spec);
    write_text_file(svg_path, render_svg(build_framework<double>(spec), witness, ropts));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rigidity::UnsupportedAnalysis& e) {
        std::cerr << "unsupported analysis: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const rigidity::SchemaError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const rigidity::json::parse_error& e) {
        std::cerr << "invalid JSON: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
