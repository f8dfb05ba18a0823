#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "thirring/model.hpp"

using namespace thirring;

TEST_CASE("charge of sampled data") {
    SUBCASE("zero data") {
        const auto d = generate_data({}, {-1.0, 1.0 / 128, 257});
        CHECK(d.charge() == 0.0);
    }
    SUBCASE("unit box with node-aligned edges is exactly 1") {
        const auto d = generate_data({BoxProfile{1.0, 0.0, 1.0}, ZeroProfile{}}, {-1.0, 1.0 / 128, 385});
        CHECK(d.charge() == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("box family keeps unit charge") {
        for (double w : {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625}) {
            const auto d =
                generate_data({BoxFamilyProfile{w, -0.25}, ZeroProfile{}}, {-1.0, 1.0 / 512, 1025});
            CHECK(d.charge() == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    SUBCASE("gaussian against its closed-form mass") {
        const oracle::Gauss o{1.0, 0.3, 0.1, 2.0};
        const auto d = generate_data({GaussianProfile{1.0, 0.3, 0.1, 2.0}, ZeroProfile{}}, {-2.0, 1.0 / 256, 1025});
        CHECK(d.charge() == doctest::Approx(o.mass(-2.0, 2.0)).epsilon(1e-12));
    }
    SUBCASE("independent trapezoid") {
        const auto d = generate_data({GaussianProfile{0.5, 0.4, 0.0, 0.0}, GaussianProfile{0.3, 0.2, 0.3, 1.0}},
                                     {-1.0, 1.0 / 64, 129});
        std::vector<double> dens;
        for (std::size_t k = 0; k < d.f.size(); ++k) dens.push_back(std::norm(d.f[k]) + std::norm(d.g[k]));
        CHECK(d.charge() == doctest::Approx(oracle::trapezoid(dens, d.axis.h)).epsilon(1e-14));
    }
    CHECK_THROWS(charge(std::vector<cplx>(3), std::vector<cplx>(4), 0.1));
}

TEST_CASE("profiles") {
    const Profile gauss(GaussianProfile{2.0, 0.5, 1.0, 3.0});
    const oracle::Gauss o{2.0, 0.5, 1.0, 3.0};
    for (double x : {-1.0, 0.3, 1.0, 1.7}) {
        CHECK(std::abs(gauss(x) - o(x)) < 1e-15);
    }
    CHECK(gauss.mass(-1.0, 2.0) == doctest::Approx(o.mass(-1.0, 2.0)).epsilon(1e-14));
    CHECK(gauss.mass(2.0, -1.0) == doctest::Approx(-o.mass(-1.0, 2.0)).epsilon(1e-14));

    const Profile box(BoxProfile{2.0, -0.5, 0.5});
    CHECK(box(0.0) == cplx{2.0});
    CHECK(box(0.75) == cplx{0.0});
    CHECK(std::norm(box(0.5)) == doctest::Approx(2.0));  // mean of 4 and 0
    CHECK(box.mass(-1.0, 0.0) == doctest::Approx(2.0));

    CHECK_THROWS_AS(Profile(GaussianProfile{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Profile(BoxProfile{1.0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Profile(SobolevRandomProfile{.modes = 0}), std::invalid_argument);
}

TEST_CASE("sobolev random data is seeded and supported on its interval") {
    const SobolevRandomProfile spec{.s = 0.2, .delta = 0.05, .lo = -0.5, .hi = 0.5, .modes = 32, .seed = 42};
    const Profile a(spec), b(spec);
    auto other = spec;
    other.seed = 43;
    const Profile c(other);
    CHECK(a(0.1) == b(0.1));
    CHECK(a(0.1) != c(0.1));
    CHECK(a(0.6) == cplx{});
    CHECK(a.mass(-1.0, 1.0) > 0.0);
    const auto da = generate_data({spec, spec}, {-1.0, 1.0 / 64, 129});
    const auto db = generate_data({spec, spec}, {-1.0, 1.0 / 64, 129});
    CHECK(da.f == db.f);
}

TEST_CASE("right-hand sides") {
    const ModelParams p{0.5, 2.0};
    const cplx psi{0.3, -0.1}, phi{-0.2, 0.4};
    const cplx i{0.0, 1.0};
    CHECK(std::abs(rhs_psi(phi, psi, p) - (-i * 0.5 * phi - 4.0 * i * std::norm(phi) * psi)) < 1e-16);
    CHECK(std::abs(rhs_phi(psi, phi, p) - (-i * 0.5 * psi - 4.0 * i * std::norm(psi) * phi)) < 1e-16);
}

TEST_CASE("massless closed form") {
    const GaussianProfile fs{1.0, 0.3, -0.2, 1.0}, gs{0.8, 0.25, 0.2, 0.0};
    const Profile f(fs), g(gs);
    const oracle::Gauss of{1.0, 0.3, -0.2, 1.0}, og{0.8, 0.25, 0.2, 0.0};
    const ModelParams p{0.0, 1.0};

    SUBCASE("t = 0 is the data") {
        const auto [psi, phi] = massless_exact(f, g, p, {0.0, 0.1});
        CHECK(psi == f(0.1));
        CHECK(phi == g(0.1));
    }
    SUBCASE("matches the independent oracle") {
        for (double t : {0.1, 0.4, 0.9}) {
            for (double x : {-0.5, 0.0, 0.3}) {
                const auto [psi, phi] = massless_exact(f, g, p, {t, x});
                const auto [opsi, ophi] = oracle::massless(of, og, 1.0, t, x);
                CHECK(std::abs(psi - opsi) < 1e-14);
                CHECK(std::abs(phi - ophi) < 1e-14);
            }
        }
    }
    SUBCASE("moduli are transported") {
        const auto [psi, phi] = massless_exact(f, g, p, {0.5, 0.1});
        CHECK(std::abs(psi) == doctest::Approx(std::abs(f(-0.4))));
        CHECK(std::abs(phi) == doctest::Approx(std::abs(g(0.6))));
    }
    SUBCASE("satisfies the equations by finite differences") {
        const double t = 0.3, x = 0.05, e = 1e-4;
        auto at = [&](double tt, double xx) { return massless_exact(f, g, p, {tt, xx}); };
        const auto [psi, phi] = at(t, x);
        const cplx dpsi = (at(t + e, x + e).first - at(t - e, x - e).first) / (2.0 * e);
        const cplx dphi = (at(t + e, x - e).second - at(t - e, x + e).second) / (2.0 * e);
        CHECK(std::abs(dpsi - rhs_psi(phi, psi, p)) < 1e-6);
        CHECK(std::abs(dphi - rhs_phi(psi, phi, p)) < 1e-6);
    }
    CHECK_THROWS_AS(massless_exact(f, g, ModelParams{1.0, 1.0}, {0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("restricting data") {
    const auto d = generate_data({GaussianProfile{}, GaussianProfile{}}, {-1.0, 0.25, 9});
    const auto r = restrict_data(d, 2, 5);
    CHECK(r.axis.x0 == -0.5);
    CHECK(r.f.size() == 5);
    CHECK(r.f[0] == d.f[2]);
    CHECK_THROWS_AS(restrict_data(d, 5, 5), std::out_of_range);
}
