#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thirring/field.hpp"
#include "thirring/model.hpp"

namespace thirring {

/// Equispaced complex samples on [a, a + (size - 1) h].
struct FunctionSample {
    std::vector<cplx> values;
    double a = 0.0;
    double h = 1.0;

    FunctionSample() = default;
    FunctionSample(std::vector<cplx> values, double a, double h);

    std::size_t size() const noexcept { return values.size(); }
    double b() const noexcept { return a + static_cast<double>(values.size() - 1) * h; }
    double x(std::size_t k) const noexcept { return a + static_cast<double>(k) * h; }

    /// Samples k in [first, first + count).
    FunctionSample window(std::size_t first, std::size_t count) const;
};

FunctionSample sample(const Profile& f, double a, double b, std::size_t count);
FunctionSample sample_psi(const Slice& s);
FunctionSample sample_phi(const Slice& s);

/// Exponents tied to s:  1/2 = 1/p + s  and  1/q = 1 - 2s.
struct NormSpec {
    double s = 0.25;

    double p() const { return 2.0 / (1.0 - 2.0 * s); }
    double q() const { return 1.0 / (1.0 - 2.0 * s); }
};

/// Trapezoidal L^p norm (p < inf) or max modulus (p = inf). Throws for p < 1.
double lp_norm(const FunctionSample& f, double p);

/// Gagliardo seminorm squared over the sample interval (piecewise-linear interpolant).
double hs_seminorm_sq(const FunctionSample& f, double s);

/// sqrt(||f||_2^2 + seminorm^2) on the sample interval. Throws unless 0 < s < 1/2.
double hs_norm(const FunctionSample& f, double s);

/// H^s norm on the whole line of the zero extension of f outside its sample interval.
double hs_norm_line(const FunctionSample& f, double s);

/// ||f||_q + ||f'||_q with central differences (one-sided at the ends).
double w1q_norm(const FunctionSample& f, double q);

/// int |f(x)|^2 |x - y|^{-2 sigma} dx over the sample interval for the linear interpolant of |f|^2;
/// finite for sigma < 1/2 even when y lies inside the interval.
double weighted_mass(const FunctionSample& f, double y, double sigma);

/// max_alpha ||psi*(alpha, .)||_{L^2_beta} + int ||d_alpha psi*(alpha, .)||_{L^2_beta} d alpha (full square).
double yr_norm(const NullGrid& grid, std::span<const cplx> psi);
/// The same with alpha and beta exchanged.
double xr_norm(const NullGrid& grid, std::span<const cplx> phi);
/// ||psi*||_{L^2_beta L^inf_alpha}.
double l2beta_linfalpha(const NullGrid& grid, std::span<const cplx> psi);

/// sup over sample centres of the trapezoidal charge of |f|^2 + |g|^2 within |x - y| <= r.
/// Windows hold floor(r / h) cells on each side and are clipped at the ends.
double concentration_function(std::span<const cplx> f, std::span<const cplx> g, double h, double r);

/// Taper: 1 on |x| <= R, 0 on |x| >= 2R, 1 - S((|x| - R) / R) in between with S(u) = 10u^3 - 15u^4 + 6u^5.
double taper(double x, double R) noexcept;

/// E(f)(x) = rho(x) f(+-2R - x) for +-x > R, f itself on I_R; samples on [-2R, 2R].
/// `f` must be sampled on [-R, R] with R an integer number of spacings.
FunctionSample extend(const FunctionSample& f);

struct NormReport {
    std::string label;
    double a = 0.0, b = 0.0, h = 0.0;
    std::size_t samples = 0;
    NormSpec spec;
    double l2 = 0.0, lp = 0.0, linf = 0.0;
    double hs = 0.0, hs_seminorm = 0.0;
    double w1q = 0.0;
    std::vector<std::pair<double, double>> concentration;  // (r, value), filled for spinor reports
};

NormReport norm_report(const FunctionSample& f, const NormSpec& spec, std::string label);

// ---------------------------------------------------------------------------
// Numerical checks of the localized-Sobolev inequalities.

struct InequalityLevel {
    std::size_t family = 0;
    std::size_t resolution = 0;  // samples per unit length
    double max_ratio = 0.0;
};

struct InequalityResult {
    std::string name;
    InequalityLevel base;
    InequalityLevel doubled;
    bool pass = false;  // both maxima finite and within a factor 2 of each other
};

struct CheckerConfig {
    double s = 0.25;
    std::size_t family = 50;
    std::size_t resolution = 32;  // samples per unit length at the base level
    std::uint64_t seed = 7;
};

std::vector<InequalityResult> run_inequality_checkers(const CheckerConfig& config);

/// Individual checkers at one level; exposed for tests.
double hardy_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed);
double product_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed);
double tiling_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed, bool upper);
double sobolev_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed);
double embedding_max_ratio(std::size_t family, std::size_t resolution, std::uint64_t seed);

}  // namespace thirring
