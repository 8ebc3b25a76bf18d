#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rigidity/norms.hpp"
#include "test_util.hpp"

using namespace rigidity;

namespace {

std::vector<double> random_point(testutil::Rng& rng, int d, double min_coord = 0.0) {
    std::vector<double> x(d);
    for (;;) {
        for (int i = 0; i < d; ++i) x[i] = rng.symmetric();
        double m = 1e9;
        for (double xi : x) m = std::min(m, std::abs(xi));
        if (m > min_coord) return x;
    }
}

}  // namespace

TEST_CASE("norm evaluation") {
    const auto linf = NormSpec::linf(2);
    CHECK(norm_evaluate<double>(linf, {1, 1}) == 1.0);
    CHECK(norm_evaluate<Rational>(linf, {Rational(3), Rational(-5)}) == Rational(5));

    const auto l4 = NormSpec::lp(2, 4);
    CHECK(norm_evaluate<double>(l4, {1, 1}) == Catch::Approx(std::pow(2.0, 0.25)));

    CHECK_THROWS_AS(norm_evaluate<double>(linf, {1, 2, 3}), std::invalid_argument);
    CHECK(norm_evaluate<double>(NormSpec::euclidean(2), {3, 4}) == Catch::Approx(5.0));
}

TEST_CASE("norm construction rules") {
    CHECK_THROWS_AS(NormSpec::lp(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NormSpec::lp(2, 0.5), std::invalid_argument);
    CHECK(NormSpec::lp(2, 2.0).kind == NormKind::Euclidean);
    CHECK(NormSpec::lp(2, 4.0).kind == NormKind::Lp);

    // functionals that do not span the dual are not a norm
    CHECK_THROWS_AS(NormSpec::polyhedral(2, {{Rational(1), Rational(0)}}), std::invalid_argument);
    // negation closure
    const auto poly = NormSpec::polyhedral(2, {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
    CHECK(poly.functionals.size() == 4);
    const auto l1 = NormSpec::l1(2);
    CHECK(l1.functionals.size() == 4);
    CHECK(norm_evaluate<double>(l1, {1, -2}) == Catch::Approx(3.0));
}

TEST_CASE("edge vector classification") {
    const auto linf = NormSpec::linf(2);
    const auto tie = classify_edge_vector<double>(linf, {1, 1});
    CHECK(tie.cls == EdgeGeometry<double>::Class::PolyhedralActive);
    REQUIRE(tie.active_rows.size() == 2);
    CHECK(tie.active_rows[0] == std::vector<double>{1, 0});
    CHECK(tie.active_rows[1] == std::vector<double>{0, 1});
    CHECK(tie.badly_positioned());

    const auto single = classify_edge_vector<double>(linf, {0.5, -1});
    REQUIRE(single.active_rows.size() == 1);
    CHECK(single.active_rows[0] == std::vector<double>{0, -1});
    CHECK(!single.badly_positioned());
    CHECK(single.twice_differentiable());

    const auto l4 = NormSpec::lp(2, 4);
    const auto sm = classify_edge_vector<double>(l4, {-1, -1});
    CHECK(sm.cls == EdgeGeometry<double>::Class::Smooth);
    CHECK(sm.power_gradient == std::vector<double>{-1, -1});
    CHECK(sm.power_hessian.has_value());
    CHECK(sm.hessian.has_value());

    const auto zero = classify_edge_vector<double>(l4, {0, 0});
    CHECK(zero.cls == EdgeGeometry<double>::Class::ZeroLength);
    const auto zero_poly = classify_edge_vector<Rational>(linf, {Rational(0), Rational(0)});
    CHECK(zero_poly.cls == EdgeGeometry<Rational>::Class::ZeroLength);
}

TEST_CASE("p below two loses the Hessian on the axes") {
    const auto l15 = NormSpec::lp(2, 1.5);
    const auto on_axis = classify_edge_vector<double>(l15, {1, 0});
    CHECK(on_axis.cls == EdgeGeometry<double>::Class::Smooth);
    CHECK(!on_axis.power_hessian.has_value());
    CHECK(!on_axis.hessian.has_value());
    CHECK(!on_axis.twice_differentiable());

    const auto off_axis = classify_edge_vector<double>(l15, {1, 0.5});
    CHECK(off_axis.power_hessian.has_value());

    // p > 2 keeps the Hessian everywhere away from 0
    const auto l4_axis = classify_edge_vector<double>(NormSpec::lp(2, 4), {1, 0});
    CHECK(l4_axis.power_hessian.has_value());
}

TEST_CASE("Euler relation: gradient applied to x gives the norm") {
    testutil::Rng rng(5);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto spec = NormSpec::lp(3, p);
        for (int i = 0; i < 50; ++i) {
            const auto x = random_point(rng, 3, 0.02);
            const auto g = classify_edge_vector<double>(spec, x);
            CHECK(dot(g.gradient, x) == Catch::Approx(norm_evaluate<double>(spec, x)).epsilon(1e-10));
        }
    }
}

TEST_CASE("one-sided directional derivatives") {
    const auto linf = NormSpec::linf(2);
    CHECK(one_sided_directional<double>(linf, {1, 1}, {1, -1}) == Catch::Approx(1.0));
    const auto l4 = NormSpec::lp(2, 4);
    CHECK(one_sided_directional<double>(l4, {1, 0}, {0, 5}) == Catch::Approx(0.0).margin(1e-12));
    // at x = 0 the subdifferential is the dual ball, so the value is ||u||
    CHECK(one_sided_directional<double>(l4, {0, 0}, {1, 1}) == Catch::Approx(std::pow(2.0, 0.25)));
    CHECK(one_sided_directional<Rational>(linf, {Rational(0), Rational(0)}, {Rational(3), Rational(-5)}) ==
          Rational(5));
}

TEST_CASE("directional derivative homogeneity and convexity") {
    testutil::Rng rng(9);
    const auto l4 = NormSpec::lp(2, 4);
    const auto linf = NormSpec::linf(2);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_point(rng, 2);
        const auto u = random_point(rng, 2);
        const double t = 0.1 + 3.0 * rng.uniform();
        for (const NormSpec* spec : {&l4, &linf}) {
            const double base = one_sided_directional<double>(*spec, x, u);
            const double scaled_dir = one_sided_directional<double>(*spec, x, scaled(u, t));
            CHECK(scaled_dir == Catch::Approx(t * base).margin(1e-10));
            const double fwd = one_sided_directional<double>(*spec, x, u);
            const double bwd = one_sided_directional<double>(*spec, x, scaled(u, -1.0));
            CHECK(fwd + bwd >= -1e-12);
        }
    }
}

TEST_CASE("polyhedral evaluation is an exact max in rational mode") {
    testutil::Rng rng(13);
    const auto l1 = NormSpec::l1(3);
    for (int i = 0; i < 50; ++i) {
        std::vector<Rational> x(3);
        for (auto& xi : x) xi = Rational(rng.below(41) - 20, 1 + rng.below(9));
        const Rational n = norm_evaluate(l1, x);
        Rational best(0);
        for (const auto& f : l1.functionals) {
            Rational v = dot(f, x);
            if (v < 0) v = -v;
            if (v > best) best = v;
        }
        CHECK(n == best);
    }
}

TEST_CASE("finite differences confirm the lp gradient") {
    testutil::Rng rng(17);
    for (double p : {1.5, 4.0}) {
        const auto spec = NormSpec::lp(2, p);
        int tested = 0;
        while (tested < 200) {
            const auto x = random_point(rng, 2, p < 2 ? 0.05 : 0.0);
            const double nx = norm_evaluate<double>(spec, x);
            if (nx < 0.1) continue;
            ++tested;
            const auto g = classify_edge_vector<double>(spec, x);
            const double h = 1e-5 * nx;
            for (int k = 0; k < 2; ++k) {
                auto xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                const double fd =
                    (norm_evaluate<double>(spec, xp) - norm_evaluate<double>(spec, xm)) / (2 * h);
                CHECK(std::abs(fd - g.gradient[k]) < 1e-5);
            }
        }
    }
}

TEST_CASE("finite differences confirm the lp Hessians") {
    testutil::Rng rng(29);
    const double p = 4.0;
    const auto spec = NormSpec::lp(2, p);
    int tested = 0;
    while (tested < 200) {
        const auto x = random_point(rng, 2, 0.05);
        const double nx = norm_evaluate<double>(spec, x);
        if (nx < 0.2) continue;
        ++tested;
        const auto g = classify_edge_vector<double>(spec, x);
        REQUIRE(g.hessian.has_value());
        const double h = 1e-5 * nx;
        for (int k = 0; k < 2; ++k) {
            auto xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const auto gp = classify_edge_vector<double>(spec, xp);
            const auto gm = classify_edge_vector<double>(spec, xm);
            for (int l = 0; l < 2; ++l) {
                const double fd = (gp.gradient[l] - gm.gradient[l]) / (2 * h);
                CHECK(std::abs(fd - (*g.hessian)(l, k)) < 1e-4);
            }
        }
        // Hessian of sum |x_i|^p is p(p-1) * diag(|x_i|^{p-2})
        const auto ppow = [&](const std::vector<double>& y) {
            double s = 0;
            for (double yi : y) s += std::pow(std::abs(yi), p);
            return s;
        };
        for (int k = 0; k < 2; ++k) {
            auto xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const double fd = (ppow(xp) - 2 * ppow(x) + ppow(xm)) / (h * h);
            CHECK(std::abs(fd - p * (p - 1) * (*g.power_hessian)(k, k)) < 1e-4 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("exact mode refuses smooth norms") {
    const auto l4 = NormSpec::lp(2, 4);
    CHECK_THROWS_AS((norm_evaluate<Rational>(l4, {Rational(1), Rational(1)})), std::logic_error);
    CHECK_THROWS_AS((classify_edge_vector<Rational>(NormSpec::euclidean(2), {Rational(1), Rational(1)})),
                    std::logic_error);
}
