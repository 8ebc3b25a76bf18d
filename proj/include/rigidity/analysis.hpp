#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/firstorder.hpp"
#include "rigidity/framework.hpp"
#include "rigidity/secondorder.hpp"

namespace rigidity {

enum class Mode { Auto, Exact, Float };

struct AnalyzeOptions {
    Mode mode = Mode::Auto;
    double rank_tol = 1e-9;
    double psd_tol = 1e-8;
    double residual_tol = 1e-8;
    uint64_t seed = 0;
};

struct AnalysisReport {
    std::string mode;  // "exact" | "float"
    Classification classification;
    Outcome infinitesimal = Outcome::Undetermined;
    Outcome strong = Outcome::Undetermined;
    Outcome prestress = Outcome::NotApplicable;
    Outcome second_order = Outcome::NotApplicable;
    int flex_dim = 0;
    int trivial_dim = 0;
    int rank = 0;
    std::optional<int> stress_dim;
    bool edge_count_bound_ok = false;
    bool locally_rigid_implied = false;
    bool continuously_rigid_implied = false;
    std::vector<std::string> implication_reasons;
    json witnesses = json::object();
    json certificates = json::object();
    AnalyzeOptions options;
    Graph graph;  // vertex/edge names for serialization

    json to_json() const;
};

namespace detail {

template <class T>
json vertex_vector_json(const Graph& g, int d, const std::vector<T>& u, bool exact) {
    json out = json::object();
    for (size_t v = 0; v < g.vertex_names.size(); ++v) {
        json coords = json::array();
        for (int k = 0; k < d; ++k) {
            const T& x = u[v * d + k];
            if constexpr (scalar_traits<T>::exact)
                coords.push_back(coord_to_json(x, exact));
            else
                coords.push_back(x);
        }
        out[g.vertex_names[v]] = std::move(coords);
    }
    return out;
}

inline json edge_list_json(const Graph& g, const std::vector<int>& edges) {
    json out = json::array();
    for (int e : edges) {
        const auto [a, b] = g.edge_names(e);
        out.push_back(json::array({a, b}));
    }
    return out;
}

inline json all_edges_json(const Graph& g) {
    std::vector<int> all(g.edges.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return edge_list_json(g, all);
}

template <class T>
json edge_values_json(const std::vector<T>& values, bool exact) {
    json out = json::array();
    for (const T& v : values) {
        if constexpr (scalar_traits<T>::exact)
            out.push_back(coord_to_json(v, exact));
        else
            out.push_back(v);
    }
    return out;
}

inline json outcome_json(Outcome o) {
    switch (o) {
        case Outcome::Yes: return json(true);
        case Outcome::No: return json(false);
        case Outcome::Undetermined: return json("undetermined");
        case Outcome::NotApplicable: return json("n/a");
    }
    return json();
}

// Normalize a float stress column for reporting: canonical sign, max-|.| 1.
inline std::vector<double> normalized_edge_vector(std::vector<double> v) {
    Matrix<double> col = Matrix<double>::from_columns(static_cast<int>(v.size()), {v});
    canonicalize_column_signs(col);
    v = col.col(0);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m > 0)
        for (double& x : v) x /= m;
    return v;
}

template <class T>
void fill_first_order(AnalysisReport& report, const Framework<T>& fw, const AnalyzeOptions& opt,
                      bool exact) {
    report.classification = classify_framework(fw);
    const auto inf = is_infinitesimally_rigid(fw, opt.rank_tol);
    report.infinitesimal = inf.outcome;
    report.flex_dim = inf.flex_dim;
    report.trivial_dim = inf.trivial_dim;
    report.rank = fw.vertex_count() * fw.dim() - inf.flex_dim;
    report.edge_count_bound_ok = edge_count_bound_check(fw);
    if (inf.witness)
        report.witnesses["nontrivial_flex"] =
            vertex_vector_json(fw.graph, fw.dim(), *inf.witness, exact);

    if (const auto stresses = stress_space(fw, opt.rank_tol)) {
        report.stress_dim = stresses->norm_stress.dim();
        if (stresses->norm_stress.dim() > 0) {
            json stress_json = json::object();
            stress_json["edges"] = all_edges_json(fw.graph);
            if constexpr (scalar_traits<T>::exact) {
                stress_json["values"] = edge_values_json(stresses->norm_stress.basis.col(0), exact);
            } else {
                stress_json["values"] =
                    edge_values_json(normalized_edge_vector(stresses->norm_stress.basis.col(0)), exact);
                if (stresses->power_stress && stresses->power_stress->dim() > 0)
                    stress_json["power_values"] = edge_values_json(
                        normalized_edge_vector(stresses->power_stress->basis.col(0)), exact);
            }
            report.witnesses["stress"] = std::move(stress_json);
        }
    }

    const auto strong = strong_flex_search(fw, opt.rank_tol);
    report.strong = strong.outcome;
    report.certificates["strong_method"] = strong.method;
    if (strong.witness) {
        json sf = json::object();
        sf["vector"] = vertex_vector_json(fw.graph, fw.dim(), *strong.witness, exact);
        if (!strong.assignment.empty()) {
            json asg = json::array();
            for (const auto& a : strong.assignment) {
                const auto [na, nb] = fw.graph.edge_names(a.edge);
                asg.push_back(json{{"edge", json::array({na, nb})},
                                   {"lower", a.lower},
                                   {"upper", a.upper}});
            }
            sf["assignment"] = std::move(asg);
        }
        report.witnesses["strong_flex"] = std::move(sf);
    }
}

}  // namespace detail

// Full analysis pipeline for one framework document. Exact mode covers
// polyhedral norms with exact input; everything else runs in float mode.
inline AnalysisReport analyze(const FrameworkSpec& spec, const AnalyzeOptions& opt = {}) {
    bool exact;
    switch (opt.mode) {
        case Mode::Auto: exact = exact_mode_supported(spec); break;
        case Mode::Exact:
            if (!exact_mode_supported(spec))
                throw UnsupportedAnalysis(
                    "exact mode requires a polyhedral norm and exact rational input");
            exact = true;
            break;
        case Mode::Float: exact = false; break;
        default: exact = false; break;
    }

    AnalysisReport report;
    report.options = opt;
    report.mode = exact ? "exact" : "float";
    report.graph = spec.graph;

    if (exact) {
        const auto fw = build_framework<Rational>(spec);
        detail::fill_first_order(report, fw, opt, true);
        // Well-positioned polyhedral frameworks: all rigidity notions agree,
        // so the second-order verdicts are the first-order one. Otherwise the
        // norm is not twice differentiable on some edge and they do not apply.
        if (report.classification.well_positioned) {
            report.prestress = report.infinitesimal;
            report.second_order = report.infinitesimal;
            report.certificates["prestress_method"] = "polyhedral-first-order";
            report.certificates["second_order_method"] = "polyhedral-first-order";
        } else {
            report.prestress = Outcome::NotApplicable;
            report.second_order = Outcome::NotApplicable;
        }
    } else {
        const auto fw = build_framework<double>(spec);
        detail::fill_first_order(report, fw, opt, false);
        if (fw.norm.kind == NormKind::Polyhedral) {
            if (report.classification.well_positioned) {
                report.prestress = report.infinitesimal;
                report.second_order = report.infinitesimal;
                report.certificates["prestress_method"] = "polyhedral-first-order";
                report.certificates["second_order_method"] = "polyhedral-first-order";
            }
        } else if (report.classification.second_order_well_positioned) {
            const auto ps = prestress_decide(fw, opt.seed, opt.psd_tol, opt.rank_tol);
            const auto so = second_order_decide(fw, opt.seed, opt.psd_tol, opt.rank_tol, &ps);
            report.prestress = ps.outcome;
            report.second_order = so.outcome;
            report.certificates["prestress_method"] = ps.method;
            report.certificates["second_order_method"] = so.method;
            if (ps.stress)
                report.witnesses["prestress_stress"] =
                    json{{"edges", detail::all_edges_json(fw.graph)},
                         {"values", detail::edge_values_json(*ps.stress, false)}};
            if (so.witness) {
                report.witnesses["second_order_flex"] =
                    json{{"u", detail::vertex_vector_json(fw.graph, fw.dim(), so.witness->u, false)},
                         {"u_prime",
                          detail::vertex_vector_json(fw.graph, fw.dim(), so.witness->u_prime, false)}};
            }
        }
    }

    // Implication bookkeeping: local/continuous rigidity are reported only as
    // consequences of a sufficient condition that fired.
    if (report.strong == Outcome::Yes) {
        report.locally_rigid_implied = true;
        report.implication_reasons.push_back("strong infinitesimal rigidity implies local rigidity");
    }
    if (report.prestress == Outcome::Yes && report.classification.second_order_well_positioned) {
        report.locally_rigid_implied = true;
        report.implication_reasons.push_back("prestress stability implies local rigidity");
    }
    if (report.locally_rigid_implied) {
        report.continuously_rigid_implied = true;
        report.implication_reasons.push_back("local rigidity implies continuous rigidity");
    }

    // Hard consistency gates; a violation is an internal error, never shipped.
    if (report.strong == Outcome::Yes && report.infinitesimal != Outcome::Yes)
        throw std::logic_error("report inconsistency: strong rigidity without infinitesimal rigidity");
    if (report.classification.well_positioned && report.strong != report.infinitesimal)
        throw std::logic_error("report inconsistency: well-positioned strong verdict differs");
    if (report.strong == Outcome::Yes && !report.edge_count_bound_ok)
        throw std::logic_error("report inconsistency: strong rigidity violates the edge count bound");
    if (report.classification.second_order_well_positioned) {
        if (report.infinitesimal == Outcome::Yes && report.prestress != Outcome::Yes)
            throw std::logic_error("report inconsistency: infinitesimally rigid but not prestress stable");
        if (report.prestress == Outcome::Yes && report.second_order != Outcome::Yes)
            throw std::logic_error("report inconsistency: prestress stable but not second-order rigid");
    }

    return report;
}

inline json AnalysisReport::to_json() const {
    json doc;
    json cls;
    cls["well_positioned"] = classification.well_positioned;
    cls["second_order_well_positioned"] = classification.second_order_well_positioned;
    cls["badly_positioned_edges"] = detail::edge_list_json(graph, classification.badly_positioned_edges);
    cls["second_order_bad_edges"] = detail::edge_list_json(graph, classification.second_order_bad_edges);
    doc["classification"] = std::move(cls);

    json verdicts;
    verdicts["infinitesimally_rigid"] = detail::outcome_json(infinitesimal);
    verdicts["strongly_infinitesimally_rigid"] = detail::outcome_json(strong);
    verdicts["prestress_stable"] = detail::outcome_json(prestress);
    verdicts["second_order_rigid"] = detail::outcome_json(second_order);
    doc["verdicts"] = std::move(verdicts);

    json implications;
    implications["locally_rigid_implied"] = locally_rigid_implied;
    implications["continuously_rigid_implied"] = continuously_rigid_implied;
    implications["via"] = implication_reasons;
    doc["implications"] = std::move(implications);

    json dims;
    dims["flex"] = flex_dim;
    dims["trivial"] = trivial_dim;
    dims["stress"] = stress_dim ? json(*stress_dim) : json();
    dims["rank"] = rank;
    doc["dimensions"] = std::move(dims);

    doc["witnesses"] = witnesses;
    doc["certificates"] = certificates;
    doc["mode"] = mode;
    json tols;
    tols["rank_tol"] = options.rank_tol;
    tols["psd_tol"] = options.psd_tol;
    tols["residual_tol"] = options.residual_tol;
    tols["active_tol"] = kActiveTol;
    doc["tolerances"] = std::move(tols);
    doc["seed"] = options.seed;
    return doc;
}

}  // namespace rigidity
