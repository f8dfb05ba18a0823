#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thirring/kernels.hpp"
#include "thirring/solver.hpp"

using namespace thirring;

namespace {

InitialData some_data(std::size_t n) {
    const DataSpec spec{GaussianProfile{0.6, 0.3, -0.2, 1.5}, GaussianProfile{0.5, 0.25, 0.15, -1.0}};
    return generate_data(spec, diagonal_axis(NullGrid(1.0, n)));
}

SpinorPair noisy(std::size_t n, Extent e, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> u(0.0, 0.3);
    SpinorPair s(n, e);
    for (auto& z : s.psi) z = {u(rng), u(rng)};
    for (auto& z : s.phi) z = {u(rng), u(rng)};
    return s;
}

}  // namespace

TEST_CASE("parallel picard sweep equals the serial reference") {
    const std::size_t n = 97;
    const auto d = some_data(n);
    const NullGrid g(1.0, n);
    for (Extent e : {Extent::forward, Extent::full}) {
        const SpinorPair in = noisy(n, e, 5);
        SpinorPair a(n, e), b(n, e);
        const double da = picard_sweep(g.spacing(), d.f, d.g, {0.7, 1.3}, in, a);
        const double db = reference::picard_sweep(g.spacing(), d.f, d.g, {0.7, 1.3}, in, b);
        CHECK(da == doctest::Approx(db).epsilon(1e-14));
        CHECK(sup_difference(a, b) <= 1e-14);
    }
}

TEST_CASE("parallel march equals the serial reference") {
    const std::size_t n = 129;
    const auto d = some_data(n);
    const NullGrid g(1.0, n);
    for (Extent e : {Extent::forward, Extent::full}) {
        SpinorPair a(n, e), b(n, e);
        march(g.spacing(), d.f, d.g, {1.0, 1.0}, a);
        reference::march(g.spacing(), d.f, d.g, {1.0, 1.0}, b);
        CHECK(sup_difference(a, b) <= 1e-14);
    }
}

TEST_CASE("thread count does not change results") {
    const std::size_t n = 65;
    const auto d = some_data(n);
    const NullGrid g(1.0, n);
    SpinorPair a(n, Extent::forward), b(n, Extent::forward);
    set_kernel_threads(1);
    march(g.spacing(), d.f, d.g, {1.0, 1.0}, a);
    set_kernel_threads(4);
    march(g.spacing(), d.f, d.g, {1.0, 1.0}, b);
    set_kernel_threads(-1);
    CHECK(sup_difference(a, b) == 0.0);
    CHECK(kernel_threads() >= 1);
}

TEST_CASE("marching lands on the picard fixed point") {
    const std::size_t n = 65;
    const auto d = some_data(n);
    const NullGrid g(1.0, n);
    const ModelParams p{1.0, 1.0};
    SpinorPair m(n, Extent::forward), next(n, Extent::forward);
    march(g.spacing(), d.f, d.g, p, m);
    const double change = picard_sweep(g.spacing(), d.f, d.g, p, m, next);
    CHECK(change <= 1e-13);
}

TEST_CASE("shape mismatches are reported") {
    SpinorPair s(9, Extent::forward), out(9, Extent::forward);
    std::vector<cplx> f(8), g(9);
    CHECK_THROWS_AS(picard_sweep(0.1, f, g, {}, s, out), std::invalid_argument);
    CHECK_THROWS_AS(march(0.1, f, g, {}, out), std::invalid_argument);
}

TEST_CASE("gagliardo seminorm of the linear interpolant") {
    SUBCASE("constants give zero") {
        const std::vector<cplx> c(101, cplx{2.0, -1.0});
        CHECK(gagliardo_seminorm_sq(c, 0.01, 0.3) == 0.0);
        CHECK(reference::gagliardo_seminorm_sq(c, 0.01, 0.3) == 0.0);
    }
    SUBCASE("f(x) = x is reproduced exactly by its interpolant") {
        // int int_{[0,L]^2} |x - y|^{1-2s} = 2 L^{3-2s} / ((2-2s)(3-2s))
        for (double s : {0.1, 0.25, 0.45}) {
            const std::size_t n = 65;
            const double h = 2.0 / (n - 1);
            std::vector<cplx> v(n);
            for (std::size_t k = 0; k < n; ++k) v[k] = h * static_cast<double>(k);
            const double exact = 2.0 * std::pow(2.0, 3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
            CHECK(gagliardo_seminorm_sq(v, h, s) == doctest::Approx(exact).epsilon(1e-10));
            CHECK(reference::gagliardo_seminorm_sq(v, h, s) == doctest::Approx(exact).epsilon(1e-10));
        }
    }
    SUBCASE("parallel equals reference on rough data") {
        std::mt19937_64 rng(9);
        std::normal_distribution<double> u;
        std::vector<cplx> v(513);
        for (auto& z : v) z = {u(rng), u(rng)};
        const double a = gagliardo_seminorm_sq(v, 1.0 / 256, 0.2);
        const double b = reference::gagliardo_seminorm_sq(v, 1.0 / 256, 0.2);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
    SUBCASE("smooth data against the step-function oracle") {
        const oracle::Gauss o{1.0, 0.3, 0.1, 2.0};
        const std::size_t n = 257;
        const double h = 2.0 / (n - 1);
        std::vector<cplx> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = o(-1.0 + h * static_cast<double>(k));
        const double brute = oracle::gagliardo_sq(o, -1.0, 1.0, 10 * (n - 1), 0.25);
        CHECK(gagliardo_seminorm_sq(v, h, 0.25) == doctest::Approx(brute).epsilon(5e-3));
    }
}

TEST_CASE("lag moments") {
    for (long d : {1L, 2L, 7L}) {
        const double s = 0.3, e = 1.0 - 2.0 * s;
        const auto m = lag_moments(d, s);
        // i00 in closed form: (G(d+1) - 2 G(d) + G(d-1)) / ((-2s)(1-2s)) with G(z) = z^{1-2s}.
        const double dd = static_cast<double>(d);
        const double exact = (std::pow(dd + 1.0, e) - 2.0 * std::pow(dd, e) + std::pow(dd - 1.0, e)) / ((-2.0 * s) * e);
        CHECK(m.i00 == doctest::Approx(exact).epsilon(1e-13));
        // Swapping u and v maps the lag-d kernel onto itself only through (u, v) -> (1 - v, 1 - u).
        CHECK(m.i10 == doctest::Approx(m.i00 - m.i01).epsilon(1e-13));
        if (d == 1) continue;  // the midpoint rule below converges too slowly at the singular corner
        const int N = 400;
        double i10 = 0, i11 = 0, i02 = 0;
        for (int a = 0; a < N; ++a) {
            for (int b = 0; b < N; ++b) {
                const double u = (a + 0.5) / N, v = (b + 0.5) / N;
                const double k = std::pow(dd + u - v, -1.0 - 2.0 * s) / (N * N);
                i10 += u * k;
                i11 += u * v * k;
                i02 += v * v * k;
            }
        }
        CHECK(m.i10 == doctest::Approx(i10).epsilon(1e-5));
        CHECK(m.i11 == doctest::Approx(i11).epsilon(1e-5));
        CHECK(m.i02 == doctest::Approx(i02).epsilon(1e-5));
    }
}
