#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/firstorder.hpp"
#include "rigidity/framework.hpp"
#include "rigidity/matrix.hpp"

namespace rigidity {

namespace detail {

// splitmix64; seeds recorded in reports must reproduce bit-identically.
struct SeededRng {
    uint64_t state;
    explicit SeededRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * uniform() - 1.0; }
};

}  // namespace detail

// Edge Hessian of the formulation in use: the p-power diagonal for lp norms,
// the norm Hessian for Euclidean, the zero matrix at twice-differentiable
// polyhedral points.
inline Matrix<double> edge_form_matrix(const Framework<double>& fw, int e, bool power) {
    const auto& g = fw.edge_geometry[e];
    if (g.cls == EdgeGeometry<double>::Class::PolyhedralActive)
        return Matrix<double>(fw.dim(), fw.dim());
    if (g.cls != EdgeGeometry<double>::Class::Smooth)
        throw std::logic_error("edge_form_matrix: zero-length edge has no Hessian");
    const auto& h = power ? g.power_hessian : g.hessian;
    if (!h) throw std::logic_error("edge_form_matrix: edge is not twice differentiable");
    return *h;
}

namespace detail {

inline std::vector<double> edge_difference(const Framework<double>& fw, int e,
                                           const std::vector<double>& u) {
    const int d = fw.dim();
    const auto [a, b] = fw.graph.edges[e];
    std::vector<double> w(d);
    for (int k = 0; k < d; ++k)
        w[k] = u[static_cast<size_t>(a) * d + k] - u[static_cast<size_t>(b) * d + k];
    return w;
}

inline double quad_form(const Matrix<double>& m, const std::vector<double>& w) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s += w[i] * m(i, j) * w[j];
    return s;
}

}  // namespace detail

// H_a with the norm Hessians (Euclidean mode and cross-validation).
inline double evaluate_H_a(const Framework<double>& fw, const std::vector<double>& stress,
                           const std::vector<double>& u) {
    double s = 0.0;
    for (int e = 0; e < fw.edge_count(); ++e) {
        if (stress[e] == 0.0) continue;
        const auto w = detail::edge_difference(fw, e, u);
        s += stress[e] * detail::quad_form(edge_form_matrix(fw, e, false), w);
    }
    return s;
}

// H^p_a with the diagonal p-power Hessians (lp mode; identity for Euclidean).
inline double evaluate_H_a_power(const Framework<double>& fw, const std::vector<double>& stress,
                                 const std::vector<double>& u) {
    double s = 0.0;
    for (int e = 0; e < fw.edge_count(); ++e) {
        if (stress[e] == 0.0) continue;
        const auto w = detail::edge_difference(fw, e, u);
        s += stress[e] * detail::quad_form(edge_form_matrix(fw, e, true), w);
    }
    return s;
}

// H_{a,b}(u) = sum_e a_e Delta_e(w,w) + b_e (phi_e(w))^2 with b > 0.
inline double evaluate_H_ab(const Framework<double>& fw, const std::vector<double>& stress,
                            const std::vector<double>& b, const std::vector<double>& u) {
    if (static_cast<int>(b.size()) != fw.edge_count())
        throw std::invalid_argument("evaluate_H_ab: b must have one entry per edge");
    for (double be : b)
        if (!(be > 0.0)) throw std::invalid_argument("evaluate_H_ab: b must be strictly positive");
    if (!classify_framework(fw).second_order_well_positioned)
        throw std::invalid_argument("evaluate_H_ab: framework is not second-order well-positioned");
    double s = evaluate_H_a(fw, stress, u);
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        const std::vector<double>& phi =
            g.cls == EdgeGeometry<double>::Class::Smooth ? g.gradient : g.active_rows[0];
        const double v = dot(phi, detail::edge_difference(fw, e, u));
        s += b[e] * v * v;
    }
    return s;
}

// The stress-indexed quadratic forms restricted to a complement of T(p)
// inside F(G,p), which is where both second-order decisions live.
struct RestrictedForms {
    bool applicable = false;
    bool use_power = true;               // lp (power) vs Euclidean (norm Hessian)
    SubspaceBasis<double> trivial;       // T(p)
    SubspaceBasis<double> flex;          // F(G,p)
    Matrix<double> complement;           // d|V| x f, orthonormal, orthogonal to T(p)
    Matrix<double> stress_basis;         // |E| x s
    std::vector<Matrix<double>> forms;   // Q_i, f x f, symmetric
    int f() const { return complement.cols(); }
    int s() const { return stress_basis.cols(); }
};

inline RestrictedForms restricted_forms(const Framework<double>& fw, double tol = 1e-9) {
    RestrictedForms out;
    const Classification cls = classify_framework(fw);
    if (!cls.second_order_well_positioned) return out;
    out.applicable = true;
    out.use_power = fw.norm.kind == NormKind::Lp;
    out.trivial = trivial_space(fw, tol);
    out.flex = flex_space(fw, tol);

    // Orthonormalize [T | F]; the columns kept beyond span T(p) form the
    // complement.
    const Matrix<double> joint = out.trivial.basis.hstacked(out.flex.basis);
    const Matrix<double> q = orthonormal_columns(joint, tol);
    const int f = out.flex.dim() - out.trivial.dim();
    if (q.cols() != out.flex.dim())
        throw std::logic_error("restricted_forms: complement extraction lost rank");
    std::vector<std::vector<double>> comp;
    for (int j = out.trivial.dim(); j < q.cols(); ++j) comp.push_back(q.col(j));
    out.complement = Matrix<double>::from_columns(fw.vertex_count() * fw.dim(), comp);
    if (out.complement.cols() != f)
        throw std::logic_error("restricted_forms: complement dimension mismatch");

    const auto stresses = stress_space(fw, tol);
    if (!stresses) throw std::logic_error("restricted_forms: stress space missing");
    out.stress_basis = out.use_power && stresses->power_stress ? stresses->power_stress->basis
                                                               : stresses->norm_stress.basis;

    for (int i = 0; i < out.stress_basis.cols(); ++i) {
        const std::vector<double> a = out.stress_basis.col(i);
        Matrix<double> qf(f, f);
        for (int e = 0; e < fw.edge_count(); ++e) {
            if (a[e] == 0.0) continue;
            const Matrix<double> d_e = edge_form_matrix(fw, e, out.use_power);
            std::vector<std::vector<double>> diffs(f);
            for (int j = 0; j < f; ++j) diffs[j] = detail::edge_difference(fw, e, out.complement.col(j));
            for (int j = 0; j < f; ++j) {
                const auto dj = d_e.mul_vec(diffs[j]);
                for (int k = j; k < f; ++k) {
                    const double contrib = a[e] * dot(dj, diffs[k]);
                    qf(j, k) += contrib;
                    if (k != j) qf(k, j) += contrib;
                }
            }
        }
        out.forms.push_back(std::move(qf));
    }
    return out;
}

namespace detail {

inline double max_abs_form(const std::vector<Matrix<double>>& forms) {
    double m = 0.0;
    for (const auto& q : forms) m = std::max(m, q.max_abs());
    return m;
}

// Search for a unit c with Q_i(c,c) = 0 for every i (Gauss-Newton on the
// squared residuals, restarted from seeded and eigen-structure starts).
inline std::optional<std::vector<double>> common_zero_search(const std::vector<Matrix<double>>& forms,
                                                             uint64_t seed, int starts = 100,
                                                             double res_tol = 1e-9) {
    if (forms.empty()) return std::nullopt;
    const int f = forms[0].rows();
    if (f == 0) return std::nullopt;
    const double scale = std::max(max_abs_form(forms), 1e-300);
    std::vector<Matrix<double>> q(forms);
    for (auto& m : q)
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < f; ++j) m(i, j) /= scale;

    const auto residuals = [&](const std::vector<double>& c) {
        std::vector<double> r(q.size());
        for (size_t i = 0; i < q.size(); ++i) r[i] = quad_form(q[i], c);
        return r;
    };
    const auto sum_sq = [](const std::vector<double>& r) {
        double s = 0;
        for (double x : r) s += x * x;
        return s;
    };
    const auto max_abs = [](const std::vector<double>& r) {
        double s = 0;
        for (double x : r) s = std::max(s, std::abs(x));
        return s;
    };

    std::vector<std::vector<double>> initial;
    // analytic starts from each form's eigen-structure
    for (const auto& m : q) {
        const auto e = sym_eigen(m);
        const double lo = e.values.front(), hi = e.values.back();
        if (std::abs(lo) <= 1e-9) initial.push_back(e.vectors.col(0));
        if (std::abs(hi) <= 1e-9) initial.push_back(e.vectors.col(f - 1));
        if (lo < 0.0 && hi > 0.0) {
            std::vector<double> c(f);
            const auto vlo = e.vectors.col(0);
            const auto vhi = e.vectors.col(f - 1);
            for (int i = 0; i < f; ++i)
                c[i] = vhi[i] / std::sqrt(hi) + vlo[i] / std::sqrt(-lo);
            const double n = norm2(c);
            for (double& x : c) x /= n;
            initial.push_back(std::move(c));
        }
    }
    SeededRng rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
    while (static_cast<int>(initial.size()) < starts) {
        std::vector<double> c(f);
        for (double& x : c) x = rng.symmetric();
        const double n = norm2(c);
        if (n < 1e-9) continue;
        for (double& x : c) x /= n;
        initial.push_back(std::move(c));
    }

    for (auto& c : initial) {
        auto r = residuals(c);
        double h = sum_sq(r);
        for (int iter = 0; iter < 80 && max_abs(r) > res_tol; ++iter) {
            Matrix<double> jac(static_cast<int>(q.size()), f);
            for (size_t i = 0; i < q.size(); ++i) {
                const auto qc = q[i].mul_vec(c);
                for (int j = 0; j < f; ++j) jac(static_cast<int>(i), j) = 2.0 * qc[j];
            }
            std::vector<double> neg_r(r.size());
            for (size_t i = 0; i < r.size(); ++i) neg_r[i] = -r[i];
            std::vector<double> step = lstsq_min_norm(jac, neg_r, 1e-12);
            const double cd = dot(step, c);
            for (int j = 0; j < f; ++j) step[j] -= cd * c[j];
            bool improved = false;
            for (double t = 1.0; t > 1e-6; t *= 0.5) {
                std::vector<double> cand(f);
                for (int j = 0; j < f; ++j) cand[j] = c[j] + t * step[j];
                const double n = norm2(cand);
                if (n < 1e-12) continue;
                for (double& x : cand) x /= n;
                const auto rc = residuals(cand);
                const double hc = sum_sq(rc);
                if (hc < h * (1.0 - 1e-9) || hc < h - 1e-30) {
                    c = std::move(cand);
                    r = rc;
                    h = hc;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        if (max_abs(r) <= res_tol) {
            Matrix<double> col = Matrix<double>::from_columns(f, {c});
            canonicalize_column_signs(col);
            return col.col(0);
        }
    }
    return std::nullopt;
}

}  // namespace detail

struct PrestressVerdict {
    Outcome outcome = Outcome::NotApplicable;
    std::optional<std::vector<double>> stress;       // witness stress, edge-indexed
    std::optional<std::vector<double>> common_zero;  // ambient flex killing every form (certifies "no")
    int stress_dim = 0;
    int flex_complement_dim = 0;
    std::string method;
};

// Prestress stability for second-order well-positioned frameworks: does some
// stress make the restricted quadratic form positive definite? One stress is
// an eigenvalue test; several run a concave maximization of the smallest
// eigenvalue over the stress ball.
inline PrestressVerdict prestress_decide(const Framework<double>& fw, uint64_t seed = 0,
                                         double psd_tol = 1e-8, double rank_tol = 1e-9) {
    PrestressVerdict verdict;
    const RestrictedForms rf = restricted_forms(fw, rank_tol);
    if (!rf.applicable) return verdict;
    verdict.stress_dim = rf.s();
    verdict.flex_complement_dim = rf.f();
    const int f = rf.f();
    const int s = rf.s();

    if (f == 0) {
        verdict.outcome = Outcome::Yes;
        verdict.stress = std::vector<double>(fw.edge_count(), 0.0);
        verdict.method = "infinitesimally-rigid";
        return verdict;
    }
    if (s == 0) {
        verdict.outcome = Outcome::No;
        verdict.method = "no-stress";
        return verdict;
    }
    // The stress basis and flex complement are unit-normalized, so a
    // meaningful form has entries on the order of the edge Hessians; far
    // below that the forms vanish identically on the flex complement.
    double hessian_scale = 1.0;
    for (int e = 0; e < fw.edge_count(); ++e)
        hessian_scale = std::max(hessian_scale, edge_form_matrix(fw, e, rf.use_power).max_abs());
    const double scale = detail::max_abs_form(rf.forms);
    if (scale <= 1e-10 * hessian_scale) {
        verdict.outcome = Outcome::No;
        verdict.method = "all-forms-zero";
        verdict.common_zero = rf.complement.col(0);
        return verdict;
    }

    const auto report_yes = [&](const std::vector<double>& combo, const std::string& method) {
        std::vector<double> stress(fw.edge_count(), 0.0);
        for (int i = 0; i < s; ++i)
            for (int e = 0; e < fw.edge_count(); ++e) stress[e] += combo[i] * rf.stress_basis(e, i);
        // positive rescaling only: the orientation is part of the witness
        double m = 0.0;
        for (double x : stress) m = std::max(m, std::abs(x));
        verdict.outcome = Outcome::Yes;
        verdict.stress = scaled(stress, m > 0 ? 1.0 / m : 1.0);
        verdict.method = method;
    };

    if (s == 1) {
        const auto eig = sym_eigen(rf.forms[0]);
        const double thr = psd_tol * rf.forms[0].max_abs();
        if (eig.values.front() > thr) {
            report_yes({1.0}, "definite-form");
            return verdict;
        }
        if (eig.values.back() < -thr) {
            report_yes({-1.0}, "definite-form");
            return verdict;
        }
    } else {
        // maximize lambda_min(sum x_i Q_i / scale) over ||x|| <= 1 by
        // projected supergradient ascent; the all-ones direction is a useful
        // deterministic first start.
        detail::SeededRng rng(seed);
        double best_val = -1e300;
        std::vector<double> best_x;
        for (int start = 0; start < 20; ++start) {
            std::vector<double> x(s);
            if (start == 0)
                for (int i = 0; i < s; ++i) x[i] = 1.0 / std::sqrt(static_cast<double>(s));
            else {
                for (double& xi : x) xi = rng.symmetric();
                const double n = norm2(x);
                if (n < 1e-9) continue;
                for (double& xi : x) xi /= n;
            }
            for (int k = 1; k <= 150; ++k) {
                Matrix<double> m(f, f);
                for (int i = 0; i < s; ++i)
                    for (int r = 0; r < f; ++r)
                        for (int c = 0; c < f; ++c) m(r, c) += x[i] * rf.forms[i](r, c) / scale;
                const auto eig = sym_eigen(m);
                if (eig.values.front() > best_val) {
                    best_val = eig.values.front();
                    best_x = x;
                }
                const auto v = eig.vectors.col(0);
                std::vector<double> grad(s);
                for (int i = 0; i < s; ++i) grad[i] = detail::quad_form(rf.forms[i], v) / scale;
                const double step = 0.5 / k;
                for (int i = 0; i < s; ++i) x[i] += step * grad[i];
                const double n = norm2(x);
                if (n > 1.0)
                    for (double& xi : x) xi /= n;
            }
        }
        if (best_val > psd_tol) {
            report_yes(best_x, "eigenvalue-ascent");
            return verdict;
        }
    }

    // No positive-definite combination found; a common zero of all the forms
    // certifies that no stress can work.
    if (auto zero = detail::common_zero_search(rf.forms, seed)) {
        verdict.outcome = Outcome::No;
        verdict.method = s == 1 ? "indefinite-form" : "common-zero";
        verdict.common_zero = rf.complement.mul_vec(*zero);
        return verdict;
    }
    verdict.outcome = Outcome::Undetermined;
    verdict.method = "search-exhausted";
    return verdict;
}

// Accelerations: solve the linear second-order flex equations for u' given a
// first-order flex u (least squares; consistent exactly when the quadratic
// edge vector is orthogonal to every stress).
inline std::vector<double> solve_acceleration(const Framework<double>& fw,
                                              const std::vector<double>& u) {
    const bool power = fw.norm.kind == NormKind::Lp;
    const Matrix<double> op = power ? power_rigidity_operator(fw) : rigidity_operator(fw);
    std::vector<double> rhs(fw.edge_count());
    const double factor = power ? fw.norm.p - 1.0 : 1.0;
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto w = detail::edge_difference(fw, e, u);
        rhs[e] = -factor * detail::quad_form(edge_form_matrix(fw, e, power), w);
    }
    return lstsq_min_norm(op, rhs);
}

// Per-edge residuals of the second-order flex equations for (u, u').
inline double second_order_residual(const Framework<double>& fw, const std::vector<double>& u,
                                    const std::vector<double>& uprime) {
    const bool power = fw.norm.kind == NormKind::Lp;
    const double factor = power ? fw.norm.p - 1.0 : 1.0;
    double worst = 0.0;
    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto w = detail::edge_difference(fw, e, u);
        const auto wp = detail::edge_difference(fw, e, uprime);
        const auto& g = fw.edge_geometry[e];
        const std::vector<double>& phi = power ? g.power_gradient
                                        : (g.cls == EdgeGeometry<double>::Class::Smooth
                                               ? g.gradient
                                               : g.active_rows[0]);
        const double r = factor * detail::quad_form(edge_form_matrix(fw, e, power), w) + dot(phi, wp);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

struct SecondOrderWitness {
    std::vector<double> u;
    std::vector<double> u_prime;
};

inline bool certify_second_order_witness(const Framework<double>& fw, const SecondOrderWitness& w,
                                         double tol = 1e-8, double rank_tol = 1e-9) {
    if (!classify_framework(fw).second_order_well_positioned) return false;
    if (static_cast<int>(w.u.size()) != fw.vertex_count() * fw.dim()) return false;
    if (static_cast<int>(w.u_prime.size()) != fw.vertex_count() * fw.dim()) return false;
    if (!certify_flex(fw, w.u, tol)) return false;
    const auto triv = trivial_space(fw, rank_tol);
    const auto qt = orthonormal_columns(triv.basis);
    if (norm2(project_out(qt, w.u)) <= 1e-6 * std::max(1.0, norm2(w.u))) return false;  // u trivial
    return second_order_residual(fw, w.u, w.u_prime) <= tol;
}

struct SecondOrderVerdict {
    Outcome outcome = Outcome::NotApplicable;
    std::optional<SecondOrderWitness> witness;  // on "no"
    std::string method;
};

// Second-order rigidity by stress duality: a nontrivial flex u = Uc extends
// to a second-order flex iff Q_i(c) = 0 for every stress basis element, so
// prestress stability settles "yes" and a certified common zero settles "no".
inline SecondOrderVerdict second_order_decide(const Framework<double>& fw, uint64_t seed = 0,
                                              double psd_tol = 1e-8, double rank_tol = 1e-9,
                                              const PrestressVerdict* prestress_hint = nullptr) {
    SecondOrderVerdict verdict;
    const RestrictedForms rf = restricted_forms(fw, rank_tol);
    if (!rf.applicable) return verdict;
    if (rf.f() == 0) {
        verdict.outcome = Outcome::Yes;
        verdict.method = "infinitesimally-rigid";
        return verdict;
    }

    const auto witness_from = [&](const std::vector<double>& u_ambient) -> bool {
        SecondOrderWitness w;
        w.u = u_ambient;
        w.u_prime = solve_acceleration(fw, w.u);
        if (!certify_second_order_witness(fw, w)) return false;
        verdict.witness = std::move(w);
        return true;
    };

    if (rf.s() == 0) {
        // no stresses: every nontrivial flex extends
        if (witness_from(rf.complement.col(0))) {
            verdict.outcome = Outcome::No;
            verdict.method = "no-stress";
            return verdict;
        }
        verdict.outcome = Outcome::Undetermined;
        verdict.method = "no-stress-uncertified";
        return verdict;
    }

    PrestressVerdict local;
    const PrestressVerdict& ps =
        prestress_hint ? *prestress_hint : (local = prestress_decide(fw, seed, psd_tol, rank_tol));
    if (ps.outcome == Outcome::Yes) {
        verdict.outcome = Outcome::Yes;
        verdict.method = "prestress-stable";
        return verdict;
    }
    if (ps.common_zero && witness_from(*ps.common_zero)) {
        verdict.outcome = Outcome::No;
        verdict.method = "common-zero";
        return verdict;
    }
    if (auto zero = detail::common_zero_search(rf.forms, seed)) {
        if (witness_from(rf.complement.mul_vec(*zero))) {
            verdict.outcome = Outcome::No;
            verdict.method = "common-zero";
            return verdict;
        }
    }
    verdict.outcome = Outcome::Undetermined;
    verdict.method = "search-exhausted";
    return verdict;
}

}  // namespace rigidity
