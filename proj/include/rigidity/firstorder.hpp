#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidity/framework.hpp"
#include "rigidity/matrix.hpp"
#include "rigidity/simplex.hpp"

namespace rigidity {

enum class Outcome { Yes, No, Undetermined, NotApplicable };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Yes: return "yes";
        case Outcome::No: return "no";
        case Outcome::Undetermined: return "undetermined";
        case Outcome::NotApplicable: return "n/a";
    }
    return "?";
}

// Raised when a decision cannot be made in the requested scalar mode, e.g. a
// strong-rigidity search on a badly-positioned polyhedral framework in float
// mode.
class UnsupportedAnalysis : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
std::vector<T> embed_edge_row(int vertex_count, int d, int a, int b, const std::vector<T>& phi) {
    std::vector<T> row(static_cast<size_t>(vertex_count) * d, T(0));
    for (int k = 0; k < d; ++k) {
        row[static_cast<size_t>(a) * d + k] = phi[k];
        row[static_cast<size_t>(b) * d + k] = -phi[k];
    }
    return row;
}

}  // namespace detail

// |E| x d|V| operator of a well-positioned framework: one row per edge, the
// norm gradient (or the unique active functional) applied to u_v - u_w.
template <class T>
Matrix<T> rigidity_operator(const Framework<T>& fw) {
    const int d = fw.dim();
    Matrix<T> op(fw.edge_count(), fw.vertex_count() * d);
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        const auto [a, b] = fw.graph.edges[e];
        if (g.cls == EdgeGeometry<T>::Class::Smooth)
            op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, g.gradient));
        else if (g.cls == EdgeGeometry<T>::Class::PolyhedralActive && g.active_rows.size() == 1)
            op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[0]));
        else
            throw std::logic_error("rigidity_operator: framework is not well-positioned");
    }
    return op;
}

// Same shape, but smooth edges carry the p-power gradient x^(p-1) (the edge
// vector itself for Euclidean norms). Used by stress and second-order
// computations in the power formulation.
template <class T>
Matrix<T> power_rigidity_operator(const Framework<T>& fw) {
    const int d = fw.dim();
    Matrix<T> op(fw.edge_count(), fw.vertex_count() * d);
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        const auto [a, b] = fw.graph.edges[e];
        if (g.cls == EdgeGeometry<T>::Class::Smooth)
            op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, g.power_gradient));
        else if (g.cls == EdgeGeometry<T>::Class::PolyhedralActive && g.active_rows.size() == 1)
            op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[0]));
        else
            throw std::logic_error("power_rigidity_operator: framework is not well-positioned");
    }
    return op;
}

// Stacked system whose kernel is the flex space F(G,p): gradient row per
// smooth edge, every active signed functional per badly-positioned polyhedral
// edge, and d rows forcing u_v = u_w per zero-length edge (the subdifferential
// at 0 is the whole dual ball, so its common kernel pins the difference).
template <class T>
Matrix<T> flex_system_matrix(const Framework<T>& fw) {
    const int d = fw.dim();
    const int cols = fw.vertex_count() * d;
    Matrix<T> m(0, cols);
    std::vector<std::vector<T>> rows;
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        const auto [a, b] = fw.graph.edges[e];
        switch (g.cls) {
            case EdgeGeometry<T>::Class::Smooth:
                rows.push_back(detail::embed_edge_row(fw.vertex_count(), d, a, b, g.gradient));
                break;
            case EdgeGeometry<T>::Class::PolyhedralActive:
                for (const auto& phi : g.active_rows)
                    rows.push_back(detail::embed_edge_row(fw.vertex_count(), d, a, b, phi));
                break;
            case EdgeGeometry<T>::Class::ZeroLength:
                for (int k = 0; k < d; ++k) {
                    std::vector<T> unit(d, T(0));
                    unit[k] = T(1);
                    rows.push_back(detail::embed_edge_row(fw.vertex_count(), d, a, b, unit));
                }
                break;
        }
    }
    Matrix<T> out(static_cast<int>(rows.size()), cols);
    for (size_t i = 0; i < rows.size(); ++i) out.set_row(static_cast<int>(i), rows[i]);
    return out;
}

// T(p): translations for every norm; plus the rotation generators u_v = S p_v
// for Euclidean norms. Dependent generators (e.g. rotations about a fully
// coincident placement) are dropped.
template <class T>
SubspaceBasis<T> trivial_space(const Framework<T>& fw, double tol = 1e-9) {
    const int d = fw.dim();
    const int n = fw.vertex_count();
    const int ambient = n * d;
    std::vector<std::vector<T>> gens;
    for (int k = 0; k < d; ++k) {
        std::vector<T> g(ambient, T(0));
        for (int v = 0; v < n; ++v) g[static_cast<size_t>(v) * d + k] = T(1);
        gens.push_back(std::move(g));
    }
    if (fw.norm.kind == NormKind::Euclidean) {
        for (int k = 0; k < d; ++k) {
            for (int l = k + 1; l < d; ++l) {
                std::vector<T> g(ambient, T(0));
                for (int v = 0; v < n; ++v) {
                    g[static_cast<size_t>(v) * d + k] = -fw.placement[v][l];
                    g[static_cast<size_t>(v) * d + l] = fw.placement[v][k];
                }
                gens.push_back(std::move(g));
            }
        }
    }
    // keep an independent subset, in generator order
    std::vector<std::vector<T>> kept;
    for (auto& g : gens) {
        if (is_zero_vector(g)) continue;
        std::vector<std::vector<T>> trial = kept;
        trial.push_back(g);
        Matrix<T> m = Matrix<T>::from_columns(ambient, trial);
        if (rank(m, tol) == static_cast<int>(trial.size())) kept.push_back(std::move(g));
    }
    return {ambient, Matrix<T>::from_columns(ambient, kept)};
}

template <class T>
SubspaceBasis<T> flex_space(const Framework<T>& fw, double tol = 1e-9) {
    return null_space(flex_system_matrix(fw), tol);
}

template <class T>
struct StressSpaces {
    SubspaceBasis<T> norm_stress;                  // left kernel of the rigidity operator
    std::optional<SubspaceBasis<T>> power_stress;  // left kernel of the power operator (smooth norms)
};

// Not applicable for badly-positioned frameworks.
template <class T>
std::optional<StressSpaces<T>> stress_space(const Framework<T>& fw, double tol = 1e-9) {
    if (!classify_framework(fw).well_positioned) return std::nullopt;
    StressSpaces<T> s;
    s.norm_stress = left_null_space(rigidity_operator(fw), tol);
    if (fw.norm.kind != NormKind::Polyhedral)
        s.power_stress = left_null_space(power_rigidity_operator(fw), tol);
    return s;
}

template <class T>
struct InfinitesimalVerdict {
    Outcome outcome = Outcome::Yes;
    int flex_dim = 0;
    int trivial_dim = 0;
    std::optional<std::vector<T>> witness;  // a flex outside T(p) when flexible
};

namespace detail {

// Witness selection: the component of the flex basis vector farthest from
// T(p), so repeated runs report the same arrow pattern.
inline std::optional<std::vector<double>> flex_outside_trivial(const SubspaceBasis<double>& flex,
                                                               const SubspaceBasis<double>& trivial) {
    const Matrix<double> qt = orthonormal_columns(trivial.basis);
    std::vector<double> best;
    double best_norm = 0.0;
    for (int j = 0; j < flex.dim(); ++j) {
        std::vector<double> r = project_out(qt, flex.basis.col(j));
        const double nr = norm2(r);
        if (nr > best_norm) {
            best_norm = nr;
            best = std::move(r);
        }
    }
    if (best_norm <= 1e-9) return std::nullopt;
    for (double& x : best) x /= best_norm;
    Matrix<double> col = Matrix<double>::from_columns(static_cast<int>(best.size()), {best});
    canonicalize_column_signs(col);
    return col.col(0);
}

inline std::optional<std::vector<Rational>> flex_outside_trivial(const SubspaceBasis<Rational>& flex,
                                                                 const SubspaceBasis<Rational>& trivial) {
    for (int j = 0; j < flex.dim(); ++j) {
        std::vector<Rational> v = flex.basis.col(j);
        if (!in_span(trivial.basis, v)) return v;
    }
    return std::nullopt;
}

}  // namespace detail

template <class T>
InfinitesimalVerdict<T> is_infinitesimally_rigid(const Framework<T>& fw, double tol = 1e-9) {
    InfinitesimalVerdict<T> verdict;
    const SubspaceBasis<T> triv = trivial_space(fw, tol);
    const SubspaceBasis<T> flex = flex_space(fw, tol);
    verdict.flex_dim = flex.dim();
    verdict.trivial_dim = triv.dim();

    // T(p) is contained in F(G,p) for every framework; enforce it.
    const Matrix<T> sys = flex_system_matrix(fw);
    const Matrix<T> residual = sys * triv.basis;
    if constexpr (scalar_traits<T>::exact) {
        for (int i = 0; i < residual.rows(); ++i)
            for (int j = 0; j < residual.cols(); ++j)
                if (residual(i, j) != 0)
                    throw std::logic_error("trivial flexes escaped the flex space");
    } else {
        const double scale = std::max(1.0, sys.max_abs());
        if (residual.max_abs() > 1e-7 * scale)
            throw std::logic_error("trivial flexes escaped the flex space");
    }

    if (flex.dim() == triv.dim()) {
        verdict.outcome = Outcome::Yes;
        return verdict;
    }
    verdict.outcome = Outcome::No;
    verdict.witness = detail::flex_outside_trivial(flex, triv);
    return verdict;
}

// Matrix-free witness check (both one-sided derivatives vanish per edge).
template <class T>
bool certify_flex(const Framework<T>& fw, const std::vector<T>& u, double tol = 1e-8) {
    if (static_cast<int>(u.size()) != fw.vertex_count() * fw.dim()) return false;
    const int d = fw.dim();
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto [a, b] = fw.graph.edges[e];
        std::vector<T> w(d);
        for (int k = 0; k < d; ++k)
            w[k] = u[static_cast<size_t>(a) * d + k] - u[static_cast<size_t>(b) * d + k];
        const std::vector<T> x = fw.edge_vector(e);
        const T fwd = one_sided_directional(fw.norm, x, w);
        const T bwd = one_sided_directional(fw.norm, x, scaled(w, T(-1)));
        if constexpr (scalar_traits<T>::exact) {
            if (fwd != 0 || bwd != 0) return false;
        } else {
            const double scale = std::max(1.0, norm2(u));
            if (std::abs(fwd) > tol * scale || std::abs(bwd) > tol * scale) return false;
        }
    }
    return true;
}

// One convex-weight choice per badly-positioned edge instantiates a member of
// the product family of generalized rigidity operators. Zero-length edges
// contribute the zero row (the zero functional lies in the subdifferential).
template <class T>
Matrix<T> generalized_operator_at(const Framework<T>& fw,
                                  const std::map<int, std::vector<T>>& weights) {
    const int d = fw.dim();
    Matrix<T> op(fw.edge_count(), fw.vertex_count() * d);
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        const auto [a, b] = fw.graph.edges[e];
        const auto it = weights.find(e);
        if (g.cls == EdgeGeometry<T>::Class::Smooth) {
            if (it != weights.end()) throw std::invalid_argument("weights given for a smooth edge");
            op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, g.gradient));
            continue;
        }
        if (g.cls == EdgeGeometry<T>::Class::ZeroLength) {
            if (it != weights.end()) throw std::invalid_argument("weights given for a zero-length edge");
            continue;  // zero row
        }
        const size_t n_active = g.active_rows.size();
        if (n_active == 1) {
            if (it != weights.end() &&
                (it->second.size() != 1 || it->second[0] != T(1)))
                throw std::invalid_argument("weights for a well-positioned edge must be {1}");
            op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[0]));
            continue;
        }
        if (it == weights.end())
            throw std::invalid_argument("badly-positioned edge " + std::to_string(e) + " needs weights");
        const std::vector<T>& w = it->second;
        if (w.size() != n_active) throw std::invalid_argument("weight count mismatch");
        T sum(0);
        for (const T& x : w) {
            if (x < T(0)) throw std::invalid_argument("weights must be nonnegative");
            sum += x;
        }
        bool sums_to_one;
        if constexpr (scalar_traits<T>::exact)
            sums_to_one = (sum == T(1));
        else
            sums_to_one = std::abs(to_double(sum) - 1.0) <= 1e-12;
        if (!sums_to_one) throw std::invalid_argument("weights must sum to 1");
        std::vector<T> phi(d, T(0));
        for (size_t i = 0; i < n_active; ++i)
            for (int k = 0; k < d; ++k) phi[k] += w[i] * g.active_rows[i][k];
        op.set_row(e, detail::embed_edge_row(fw.vertex_count(), d, a, b, phi));
    }
    return op;
}

// Necessary edge count for strong rigidity: |E| >= d|V| - dim T(p).
template <class T>
bool edge_count_bound_check(const Framework<T>& fw) {
    const int t = trivial_space(fw).dim();
    return fw.edge_count() >= fw.dim() * fw.vertex_count() - t;
}

struct StrongAssignmentEntry {
    int edge = -1;
    int lower = 0;  // index into the active set: phi_lower(u_v - u_w) <= 0
    int upper = 0;  // index into the active set: phi_upper(u_v - u_w) >= 0
};

template <class T>
struct StrongVerdict {
    Outcome outcome = Outcome::Yes;
    std::optional<std::vector<T>> witness;          // nonzero u outside T killed by some operator
    std::vector<StrongAssignmentEntry> assignment;  // present for the LP search path
    std::string method;
};

// Decides strong infinitesimal rigidity w.r.t. the product model of per-edge
// subdifferentials. For well-positioned frameworks the verdict equals the
// infinitesimal one; badly-positioned polyhedral frameworks run the exact
// assignment/LP search. A "no" witness u qualifies because for every
// badly-positioned edge, 0 lies between the chosen active functional values,
// so some convex combination kills u.
template <class T>
StrongVerdict<T> strong_flex_search(const Framework<T>& fw, double tol = 1e-9) {
    const Classification cls = classify_framework(fw);
    StrongVerdict<T> verdict;
    if (cls.well_positioned) {
        const auto inf = is_infinitesimally_rigid(fw, tol);
        verdict.outcome = inf.outcome;
        verdict.witness = inf.witness;
        verdict.method = "well-positioned";
        return verdict;
    }

    const int d = fw.dim();
    bool has_multi_active = false;
    for (int e : cls.badly_positioned_edges)
        if (fw.edge_geometry[e].cls == EdgeGeometry<T>::Class::PolyhedralActive)
            has_multi_active = true;

    if (!has_multi_active) {
        // All bad edges are zero-length. The zero functional is the most
        // permissive subdifferential member, so the maximal kernel in the
        // product family is the kernel of the remaining rows.
        std::vector<std::vector<T>> rows;
        for (int e = 0; e < fw.edge_count(); ++e) {
            const auto& g = fw.edge_geometry[e];
            const auto [a, b] = fw.graph.edges[e];
            if (g.cls == EdgeGeometry<T>::Class::Smooth)
                rows.push_back(detail::embed_edge_row(fw.vertex_count(), d, a, b, g.gradient));
            else if (g.cls == EdgeGeometry<T>::Class::PolyhedralActive)
                rows.push_back(detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[0]));
        }
        Matrix<T> m(static_cast<int>(rows.size()), fw.vertex_count() * d);
        for (size_t i = 0; i < rows.size(); ++i) m.set_row(static_cast<int>(i), rows[i]);
        const SubspaceBasis<T> kernel = null_space(m, tol);
        const SubspaceBasis<T> triv = trivial_space(fw, tol);
        verdict.method = "zero-length-kernel";
        if (kernel.dim() == triv.dim()) {
            verdict.outcome = Outcome::Yes;
        } else {
            verdict.outcome = Outcome::No;
            verdict.witness = detail::flex_outside_trivial(kernel, triv);
        }
        return verdict;
    }

    if constexpr (!scalar_traits<T>::exact) {
        throw UnsupportedAnalysis(
            "strong rigidity of a badly-positioned polyhedral framework requires exact mode");
    } else {
        verdict.method = "assignment-lp";
        std::vector<int> multi_edges;
        double combos = 1.0;
        for (int e : cls.badly_positioned_edges) {
            const auto& g = fw.edge_geometry[e];
            if (g.cls != EdgeGeometry<T>::Class::PolyhedralActive) continue;
            multi_edges.push_back(e);
            combos *= static_cast<double>(g.active_rows.size()) * g.active_rows.size();
        }
        if (combos > 1e6)
            throw std::runtime_error("strong search refused: assignment enumeration exceeds 10^6");

        // Fixed equality rows: well-positioned edge rows vanish, u orthogonal
        // to the translations.
        std::vector<std::vector<Rational>> eq_rows;
        for (int e = 0; e < fw.edge_count(); ++e) {
            const auto& g = fw.edge_geometry[e];
            const auto [a, b] = fw.graph.edges[e];
            if (g.cls == EdgeGeometry<Rational>::Class::PolyhedralActive && g.active_rows.size() == 1)
                eq_rows.push_back(detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[0]));
        }
        for (int k = 0; k < d; ++k) {
            std::vector<Rational> row(static_cast<size_t>(fw.vertex_count()) * d, Rational(0));
            for (int v = 0; v < fw.vertex_count(); ++v) row[static_cast<size_t>(v) * d + k] = 1;
            eq_rows.push_back(std::move(row));
        }
        Matrix<Rational> equalities(static_cast<int>(eq_rows.size()), fw.vertex_count() * d);
        for (size_t i = 0; i < eq_rows.size(); ++i) equalities.set_row(static_cast<int>(i), eq_rows[i]);

        // Lexicographic odometer over (lower, upper) pairs per edge.
        std::vector<int> state(multi_edges.size(), 0);
        const auto pair_count = [&](size_t i) {
            const size_t n = fw.edge_geometry[multi_edges[i]].active_rows.size();
            return static_cast<int>(n * n);
        };
        for (;;) {
            Matrix<Rational> inequalities(0, fw.vertex_count() * d);
            std::vector<std::vector<Rational>> ineq_rows;
            std::vector<StrongAssignmentEntry> entries;
            for (size_t i = 0; i < multi_edges.size(); ++i) {
                const int e = multi_edges[i];
                const auto& g = fw.edge_geometry[e];
                const auto [a, b] = fw.graph.edges[e];
                const int n_active = static_cast<int>(g.active_rows.size());
                const int lower = state[i] / n_active;
                const int upper = state[i] % n_active;
                entries.push_back({e, lower, upper});
                ineq_rows.push_back(scaled(
                    detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[lower]),
                    Rational(-1)));
                ineq_rows.push_back(
                    detail::embed_edge_row(fw.vertex_count(), d, a, b, g.active_rows[upper]));
            }
            inequalities = Matrix<Rational>(static_cast<int>(ineq_rows.size()), fw.vertex_count() * d);
            for (size_t i = 0; i < ineq_rows.size(); ++i)
                inequalities.set_row(static_cast<int>(i), ineq_rows[i]);

            if (auto witness = lp_feasible_nonzero(inequalities, equalities)) {
                verdict.outcome = Outcome::No;
                verdict.witness = std::move(*witness);
                verdict.assignment = std::move(entries);
                return verdict;
            }

            // advance odometer, rightmost fastest
            int pos = static_cast<int>(state.size()) - 1;
            while (pos >= 0) {
                if (++state[pos] < pair_count(pos)) break;
                state[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        verdict.outcome = Outcome::Yes;
        return verdict;
    }
}

// Exact re-check of a strong-flex witness against its assignment.
inline bool certify_strong_witness(const Framework<Rational>& fw, const std::vector<Rational>& u,
                                   const std::vector<StrongAssignmentEntry>& assignment) {
    if (is_zero_vector(u)) return false;
    const int d = fw.dim();
    std::map<int, const StrongAssignmentEntry*> by_edge;
    for (const auto& a : assignment) by_edge[a.edge] = &a;
    for (int k = 0; k < d; ++k) {
        Rational s(0);
        for (int v = 0; v < fw.vertex_count(); ++v) s += u[static_cast<size_t>(v) * d + k];
        if (s != 0) return false;  // must be orthogonal to the translations
    }
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        const auto [a, b] = fw.graph.edges[e];
        std::vector<Rational> w(d);
        for (int k = 0; k < d; ++k)
            w[k] = u[static_cast<size_t>(a) * d + k] - u[static_cast<size_t>(b) * d + k];
        if (g.cls == EdgeGeometry<Rational>::Class::ZeroLength) continue;
        if (g.active_rows.size() == 1) {
            if (dot(g.active_rows[0], w) != 0) return false;
            continue;
        }
        const auto it = by_edge.find(e);
        if (it == by_edge.end()) return false;
        if (dot(g.active_rows[it->second->lower], w) > 0) return false;
        if (dot(g.active_rows[it->second->upper], w) < 0) return false;
    }
    return true;
}

}  // namespace rigidity
