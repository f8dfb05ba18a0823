#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "thirring/norms.hpp"
#include "thirring/solver.hpp"

using namespace thirring;

namespace {

FunctionSample from(const std::function<cplx(double)>& f, double a, double b, std::size_t n) {
    std::vector<cplx> v(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) v[k] = f(a + h * static_cast<double>(k));
    return {std::move(v), a, h};
}

}  // namespace

TEST_CASE("exponents tied to s") {
    const NormSpec spec{0.25};
    CHECK(spec.p() == doctest::Approx(4.0));
    CHECK(spec.q() == doctest::Approx(2.0));
}

TEST_CASE("lebesgue norms") {
    const auto one = from([](double) { return cplx{1.0}; }, -1.0, 1.0, 101);
    CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(lp_norm(one, 4.0) == doctest::Approx(std::pow(2.0, 0.25)));
    const auto ramp = from([](double x) { return cplx{0.0, x}; }, 0.0, 3.0, 31);
    CHECK(lp_norm(ramp, std::numeric_limits<double>::infinity()) == doctest::Approx(3.0));
    CHECK_THROWS_AS(lp_norm(one, 0.5), std::invalid_argument);
}

TEST_CASE("constants have H^s norm equal to their L2 norm") {
    const auto c = from([](double) { return cplx{0.3, 0.4}; }, -1.0, 1.0, 257);
    for (double s : {0.1, 0.25, 0.45}) {
        CHECK(hs_seminorm_sq(c, s) == 0.0);
        CHECK(hs_norm(c, s) == lp_norm(c, 2.0));
    }
}

TEST_CASE("H^s order is restricted to (0, 1/2)") {
    const auto c = from([](double x) { return cplx{x}; }, -1.0, 1.0, 17);
    CHECK_THROWS_AS(hs_norm(c, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hs_norm(c, 0.5), std::invalid_argument);
}

TEST_CASE("step-function oracle self-checks") {
    // The oracle is exact for cell-aligned boxes.
    const double exact = oracle::box_gagliardo_sq(-1.0, -0.5, 0.5, 1.0, 0.1);
    const auto box = [](double x) { return cplx{std::abs(x) < 0.5 ? 1.0 : 0.0}; };
    CHECK(oracle::gagliardo_sq(box, -1.0, 1.0, 400, 0.1) == doctest::Approx(exact).epsilon(1e-12));
    // f(x) = x converges to 2 L^{3-2s} / ((2-2s)(3-2s)).
    const double lin = 2.0 * std::pow(2.0, 2.5) / (1.5 * 2.5);
    const auto id = [](double x) { return cplx{x}; };
    CHECK(oracle::gagliardo_sq(id, -1.0, 1.0, 2560, 0.25) == doctest::Approx(lin).epsilon(1e-4));
}

TEST_CASE("hs_norm against the 10x step-function oracle") {
    const auto id = [](double x) { return cplx{x}; };
    const auto f = from(id, -1.0, 1.0, 257);
    CHECK(hs_norm(f, 0.25) == doctest::Approx(oracle::hs_norm(id, -1.0, 1.0, 2560, 0.25)).epsilon(0.01));

    const oracle::Gauss g{1.0, 0.2, 0.1, 3.0};
    const auto gs = from(g, -1.0, 1.0, 257);
    CHECK(hs_norm(gs, 0.3) == doctest::Approx(oracle::hs_norm(g, -1.0, 1.0, 2560, 0.3)).epsilon(0.01));

    const Profile box(BoxProfile{1.0, -0.5, 0.5});
    const auto bs = sample(box, -1.0, 1.0, 1025);
    const auto bo = [](double x) { return cplx{std::abs(x) < 0.5 ? 1.0 : 0.0}; };
    CHECK(hs_norm(bs, 0.1) == doctest::Approx(oracle::hs_norm(bo, -1.0, 1.0, 10240, 0.1)).epsilon(0.01));
}

TEST_CASE("rougher seminorms grow with s for a jump") {
    const Profile box(BoxProfile{1.0, -0.5, 0.5});
    const auto coarse = sample(box, -1.0, 1.0, 257);
    const auto fine = sample(box, -1.0, 1.0, 1025);
    CHECK(hs_seminorm_sq(fine, 0.45) > hs_seminorm_sq(coarse, 0.45));
    CHECK(hs_seminorm_sq(fine, 0.45) > hs_seminorm_sq(fine, 0.1));
}

TEST_CASE("whole-line norm of a constant adds the exterior pairs") {
    const double s = 0.2, c = 1.5;
    const auto f = from([&](double) { return cplx{c}; }, -1.0, 1.0, 129);
    // 2 c^2 int_{-1}^{1} ((1 + x)^{-2s} + (1 - x)^{-2s}) / (2s) dx
    const double tails = 2.0 * c * c / (2.0 * s) * 2.0 * std::pow(2.0, 1.0 - 2.0 * s) / (1.0 - 2.0 * s);
    CHECK(hs_norm_line(f, s) == doctest::Approx(std::sqrt(2.0 * c * c + tails)).epsilon(1e-12));
}

TEST_CASE("weighted mass") {
    const auto one = from([](double) { return cplx{1.0}; }, -1.0, 1.0, 64);
    CHECK(weighted_mass(one, 0.0, 0.25) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(weighted_mass(one, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(weighted_mass(one, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("W^{1,q} norm of a ramp") {
    const auto f = from([](double x) { return cplx{x}; }, 0.0, 1.0, 1001);
    CHECK(w1q_norm(f, 2.0) == doctest::Approx(1.0 / std::sqrt(3.0) + 1.0).epsilon(1e-6));
}

TEST_CASE("mixed null norms of a separable field") {
    const NullGrid g(1.0, 65);
    std::vector<cplx> psi(g.node_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) psi[g.index(i, j)] = cplx{2.0};
    }
    CHECK(yr_norm(g, psi) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(xr_norm(g, psi) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(l2beta_linfalpha(g, psi) == doctest::Approx(2.0 * std::sqrt(2.0)));
    // psi = alpha: the row norms grow linearly, the alpha-derivative is 1 on every row.
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) psi[g.index(i, j)] = cplx{g.alpha(i)};
    }
    CHECK(yr_norm(g, psi) == doctest::Approx(std::sqrt(2.0) + 2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("concentration function") {
    const auto d = generate_data({BoxProfile{1.0, 0.0, 1.0}, ZeroProfile{}}, {-1.0, 1.0 / 64, 193});
    CHECK(concentration_function(d.f, d.g, d.axis.h, 0.25) == doctest::Approx(0.5));
    CHECK(concentration_function(d.f, d.g, d.axis.h, 4.0) == doctest::Approx(1.0));
    CHECK(concentration_function(d.f, d.g, d.axis.h, 0.001) == 0.0);
}

TEST_CASE("taper and extension") {
    CHECK(taper(0.5, 1.0) == 1.0);
    CHECK(taper(-1.0, 1.0) == 1.0);
    CHECK(taper(1.5, 1.0) == doctest::Approx(0.5));
    CHECK(taper(2.0, 1.0) == 0.0);
    CHECK(taper(1.0 + 1e-9, 1.0) == doctest::Approx(1.0));

    const auto f = from([](double x) { return cplx{1.0 + x}; }, -1.0, 1.0, 9);
    const auto e = extend(f);
    REQUIRE(e.size() == 17);
    CHECK(e.a == doctest::Approx(-2.0));
    for (std::size_t k = 0; k < 9; ++k) CHECK(e.values[k + 4] == f.values[k]);
    // x = 1.5: rho(1.5) f(0.5) = 0.5 * 1.5
    CHECK(std::abs(e.values[14] - cplx{0.75}) < 1e-15);
    CHECK(e.values[16] == cplx{});
    CHECK_THROWS_AS(extend(from([](double) { return cplx{}; }, 0.0, 1.0, 9)), std::invalid_argument);
}

TEST_CASE("norm report") {
    const oracle::Gauss g{1.0, 0.3, 0.0, 0.0};
    const auto r = norm_report(from(g, -1.0, 1.0, 129), NormSpec{0.25}, "psi");
    CHECK(r.label == "psi");
    CHECK(r.samples == 129);
    CHECK(r.l2 == doctest::Approx(std::sqrt(g.mass(-1.0, 1.0))).epsilon(1e-6));
    CHECK(r.linf == doctest::Approx(1.0));
    CHECK(r.hs * r.hs == doctest::Approx(r.l2 * r.l2 + r.hs_seminorm * r.hs_seminorm));
    CHECK(r.hs > r.l2);
}

TEST_CASE("inequality checkers return finite positive ratios") {
    for (double v : {hardy_max_ratio(0.25, 8, 16, 1), product_max_ratio(0.25, 8, 16, 1),
                     tiling_max_ratio(0.25, 8, 16, 1, true), tiling_max_ratio(0.25, 8, 16, 1, false),
                     sobolev_max_ratio(0.25, 8, 16, 1), embedding_max_ratio(8, 16, 1)}) {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }
    CHECK(hardy_max_ratio(0.25, 8, 16, 1) == hardy_max_ratio(0.25, 8, 16, 1));
    CHECK_THROWS_AS(run_inequality_checkers({.family = 10}), std::invalid_argument);
}
