#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "thirring/geometry.hpp"

namespace thirring {

/// Mass m and coupling lambda of the Thirring system
///   (d_t + d_x) psi = -i m phi - 2 i lambda |phi|^2 psi
///   (d_t - d_x) phi = -i m psi - 2 i lambda |psi|^2 phi
struct ModelParams {
    double m = 0.0;
    double lambda = 0.0;
};

/// Right-hand side of the psi equation at one point.
inline cplx rhs_psi(cplx phi, cplx psi, const ModelParams& p) noexcept {
    const cplx i{0.0, 1.0};
    return -i * p.m * phi - 2.0 * i * p.lambda * std::norm(phi) * psi;
}

/// Right-hand side of the phi equation at one point.
inline cplx rhs_phi(cplx psi, cplx phi, const ModelParams& p) noexcept {
    const cplx i{0.0, 1.0};
    return -i * p.m * psi - 2.0 * i * p.lambda * std::norm(psi) * phi;
}

/// Trapezoidal approximation of the charge  integral(|psi|^2 + |phi|^2) dx  on a uniform grid.
double charge(std::span<const cplx> psi, std::span<const cplx> phi, double h);
double charge(const Slice& slice);

// ---------------------------------------------------------------------------
// Initial-data profiles

struct ZeroProfile {};

/// amplitude * exp(-(x - center)^2 / width^2) * exp(i velocity x)
struct GaussianProfile {
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
    double velocity = 0.0;
};

/// height on (lo, hi), height / sqrt(2) at the two edges, zero elsewhere.
struct BoxProfile {
    double height = 1.0;
    double lo = 0.0;
    double hi = 1.0;
};

/// Box of width w and height w^{-1/2}: unit L2 norm, L-infinity norm growing as w shrinks.
struct BoxFamilyProfile {
    double width = 1.0;
    double center = 0.0;
};

/// amplitude * 1_[lo,hi](x) * sum_{k=1}^{modes} k^{-(s + 1/2 + delta)} e^{i theta_k} e^{2 pi i k (x - lo)/(hi - lo)}
/// with theta_k drawn from a seeded generator. Lies in H^r exactly for r < min(s + delta, 1/2).
struct SobolevRandomProfile {
    double s = 0.1;
    double delta = 0.05;
    double lo = -0.5;
    double hi = 0.5;
    int modes = 64;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
};

using ProfileSpec =
    std::variant<ZeroProfile, GaussianProfile, BoxProfile, BoxFamilyProfile, SobolevRandomProfile>;

const char* profile_kind(const ProfileSpec& spec) noexcept;

/// Analytic evaluation of one data component.
class Profile {
public:
    explicit Profile(ProfileSpec spec);

    cplx operator()(double x) const;

    /// Signed integral of |f|^2 from a to b (exact for gaussian and box kinds).
    double mass(double a, double b) const;

    const ProfileSpec& spec() const noexcept { return spec_; }

private:
    ProfileSpec spec_;
    std::vector<cplx> coefficients_;  // sobolev_random only
};

/// Specification of both components (f for psi, g for phi).
struct DataSpec {
    ProfileSpec f = ZeroProfile{};
    ProfileSpec g = ZeroProfile{};
};

/// Sampled initial data on a uniform lab axis, with its generator provenance.
struct InitialData {
    Axis axis;
    std::vector<cplx> f;
    std::vector<cplx> g;
    DataSpec spec;

    double charge() const;
};

/// Deterministic sampling of `spec` on `axis`.
InitialData generate_data(const DataSpec& spec, const Axis& axis);

/// Copy of data restricted to samples [first, first + count).
InitialData restrict_data(const InitialData& data, std::size_t first, std::size_t count);

/// Closed-form massless solution (m = 0):
///   psi(t, x) = f(x - t) exp(-i lambda int_{x-t}^{x+t} |g|^2),
///   phi(t, x) = g(x + t) exp(-i lambda int_{x-t}^{x+t} |f|^2).
/// Throws std::invalid_argument if p.m != 0.
std::pair<cplx, cplx> massless_exact(const Profile& f, const Profile& g, const ModelParams& p, LabPoint point);

}  // namespace thirring
