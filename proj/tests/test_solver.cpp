#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "thirring/solver.hpp"

using namespace thirring;

namespace {

InitialData gaussians(const NullGrid& g, double A = 1.0) {
    const DataSpec spec{GaussianProfile{A, 0.3, -0.2, 0.0}, GaussianProfile{A, 0.3, 0.2, 0.0}};
    return generate_data(spec, diagonal_axis(g));
}

double oracle_error(const LocalSolution& sol, const oracle::Gauss& f, const oracle::Gauss& g, double lambda) {
    double worst = 0.0;
    const auto& grid = sol.grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const auto p = grid.lab_point(i, j);
            const auto [psi, phi] = oracle::massless(f, g, lambda, p.t, p.x);
            worst = std::max({worst, std::abs(sol.fields.psi_at(i, j) - psi), std::abs(sol.fields.phi_at(i, j) - phi)});
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("zero data stays zero") {
    const NullGrid g(1.0, 33);
    const auto d = generate_data({}, diagonal_axis(g));
    const auto sol = solve_local(d, {1.0, 1.0}, g, {});
    CHECK(sol.converged);
    CHECK(sol.iterations == 1);
    for (const auto& z : sol.fields.psi) CHECK(z == cplx{});
}

TEST_CASE("free transport is exact when m = lambda = 0") {
    const NullGrid g(1.0, 65);
    const auto d = gaussians(g);
    for (Scheme s : {Scheme::picard, Scheme::marching}) {
        const auto sol = solve_local(d, {0.0, 0.0}, g, {.scheme = s});
        CHECK(sup_difference(sol.fields, transported(d, Extent::forward)) == 0.0);
    }
}

TEST_CASE("massless solve converges to the closed form at second order") {
    const oracle::Gauss f{1.0, 0.3, -0.2, 0.0}, g{1.0, 0.3, 0.2, 0.0};
    std::vector<double> hs, errs;
    for (std::size_t n : {65u, 129u, 257u}) {
        const NullGrid grid(1.0, n);
        const auto sol = solve_local(gaussians(grid), {0.0, 1.0}, grid, {});
        hs.push_back(grid.spacing());
        errs.push_back(oracle_error(sol, f, g, 1.0));
    }
    CHECK(errs.back() < 1e-3);
    CHECK(oracle::slope(hs, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("picard and marching agree") {
    const NullGrid g(1.0, 129);
    const auto d = gaussians(g, 0.8);
    const auto a = solve_local(d, {1.0, 1.0}, g, {.scheme = Scheme::picard, .tol = 1e-13});
    const auto b = solve_local(d, {1.0, 1.0}, g, {.scheme = Scheme::marching});
    CHECK(sup_difference(a.fields, b.fields) < 1e-12);
}

TEST_CASE("small data contracts") {
    const NullGrid g(0.5, 129);
    const DataSpec spec{GaussianProfile{0.05, 0.1, -0.1, 0.0}, GaussianProfile{0.05, 0.1, 0.1, 0.0}};
    const auto d = generate_data(spec, diagonal_axis(g));
    const auto sol = solve_local(d, {0.1, 1.0}, g, {.max_iter = 30});
    CHECK(sol.converged);
    CHECK(sol.warnings.empty());
    for (std::size_t k = 1; k < sol.diffs.size(); ++k) CHECK(sol.diffs[k] < sol.diffs[k - 1]);
}

TEST_CASE("non-convergence raises with iteration count and ratio") {
    const NullGrid g(1.0, 65);
    const auto d = gaussians(g);
    try {
        (void)solve_local(d, {1.0, 1.0}, g, {.max_iter = 1});
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations() == 1);
        CHECK(std::string(e.what()).find("did not reach") != std::string::npos);
    }
}

TEST_CASE("hypothesis warnings") {
    const NullGrid g(1.0, 65);
    const auto sol = solve_local(gaussians(g), {1.0, 1.0}, g, {});
    CHECK(sol.warnings.size() == 2);
}

TEST_CASE("solver config validation") {
    CHECK_THROWS(SolverConfig{.tol = -1.0}.validate());
    CHECK_THROWS(SolverConfig{.max_iter = 0}.validate());
    CHECK(parse_scheme("marching") == Scheme::marching);
    CHECK_THROWS(parse_scheme("euler"));
    CHECK(default_epsilon(4.0) == doctest::Approx(0.025));
}

TEST_CASE("single and tiled gluing agree") {
    const NullGrid g(2.0, 257);
    const DataSpec spec{GaussianProfile{0.5, 0.3, -0.3, 1.0}, GaussianProfile{0.5, 0.3, 0.3, 0.0}};
    const auto d = generate_data(spec, diagonal_axis(g));
    const SolverConfig cfg{.tol = 1e-12};
    const auto single = glue_solve(d, {0.5, 1.0}, 0.5, cfg, {GlueMode::single});
    const auto tiled = glue_solve(d, {0.5, 1.0}, 0.5, cfg, {GlueMode::tiled, 1.0});
    REQUIRE(single.slices.size() == tiled.slices.size());
    CHECK(tiled.tiles > 1);
    CHECK(tiled.overlap_mismatch <= 10 * cfg.tol);
    double worst = 0.0;
    for (std::size_t k = 0; k < single.slices.size(); ++k) {
        const auto& a = single.slices[k];
        const auto& b = tiled.slices[k];
        REQUIRE(a.psi.size() == b.psi.size());
        for (std::size_t m = 0; m < a.psi.size(); ++m) {
            worst = std::max({worst, std::abs(a.psi[m] - b.psi[m]), std::abs(a.phi[m] - b.phi[m])});
        }
    }
    CHECK(worst <= 10 * cfg.tol);
    CHECK(single.slices.front().t == 0.0);
    CHECK(single.slices.back().t == doctest::Approx(0.5));
}

TEST_CASE("finite propagation speed") {
    const NullGrid g(2.0, 257);
    const auto d = generate_data({BoxProfile{1.0, -1.0, 1.0}, BoxProfile{1.0, -1.0, 1.0}}, diagonal_axis(g));
    const auto out = glue_solve(d, {1.0, 1.0}, 0.5, {.scheme = Scheme::marching});
    for (const auto& s : out.slices) {
        for (std::size_t m = 0; m < s.psi.size(); ++m) {
            if (std::abs(s.axis.x(m)) > 1.0 + s.t + 1e-12) {
                CHECK(s.psi[m] == cplx{});
                CHECK(s.phi[m] == cplx{});
            }
        }
    }
}

TEST_CASE("concentration radius") {
    const auto d = generate_data({BoxProfile{1.0, 0.0, 1.0}, ZeroProfile{}}, {-2.0, 1.0 / 64, 257});
    const auto r = concentration_radius(d, 0.1, 1.0);
    CHECK_FALSE(r.underflow);
    // A window of radius r holds about 2r of a unit-height box.
    CHECK(r.radius == doctest::Approx(1.0 / 32));
    CHECK(r.window_mass < 0.1);
    CHECK(concentration_radius(d, 1e-6, 1.0).underflow);
}

TEST_CASE("global continuation conserves charge and shrinks its window") {
    const auto d = generate_data({GaussianProfile{0.5, 0.3, -0.2, 0.0}, GaussianProfile{0.5, 0.3, 0.2, 0.0}},
                                 {-3.0, 1.0 / 64, 385});
    InitialData final_state;
    std::size_t seen = 0;
    const auto log = continue_globally(d, {1.0, 1.0}, 1.0, {.epsilon = 0.1, .r_max = 1.0}, &final_state,
                                       [&](const ContinuationEntry&, const InitialData&) { ++seen; });
    CHECK(log.reached_target);
    CHECK_FALSE(log.concentration_suspected);
    CHECK(seen == log.entries.size() + 1);
    CHECK(final_state.axis.x0 == doctest::Approx(-2.0));
    CHECK(log.min_step_radius() >= 2.0 / 64);
    CHECK(final_state.charge() == doctest::Approx(d.charge()).epsilon(1e-3));
}

TEST_CASE("continuation reports concentration when the radius underflows") {
    const auto d = generate_data({BoxProfile{20.0, -0.05, 0.05}, ZeroProfile{}}, {-1.0, 1.0 / 64, 129});
    const auto log = continue_globally(d, {0.0, 1.0}, 1.0, {.epsilon = 0.1, .r_max = 0.5});
    CHECK(log.concentration_suspected);
    CHECK(log.message.find("CONCENTRATION-SUSPECTED") != std::string::npos);
}
