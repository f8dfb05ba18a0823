#include "thirring/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/core.h>

namespace thirring {

double charge(std::span<const cplx> psi, std::span<const cplx> phi, double h) {
    if (psi.size() != phi.size()) throw std::invalid_argument("charge: slice length mismatch");
    const std::size_t n = psi.size();
    if (n < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        sum += w * (std::norm(psi[k]) + std::norm(phi[k]));
    }
    return h * sum;
}

double charge(const Slice& slice) { return charge(slice.psi, slice.phi, slice.axis.h); }

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double overlap(double a, double b, double lo, double hi) {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

// A node sitting exactly on a jump gets the value whose square is the mean of the one-sided
// squares, so the trapezoidal charge of a box with node-aligned edges is exact.
double indicator(double x, double lo, double hi) {
    if (x < lo || x > hi) return 0.0;
    return (x == lo || x == hi) ? std::numbers::sqrt2 / 2.0 : 1.0;
}

// Uniform double in [0, 1) from the top 53 bits, independent of the standard library's distributions.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void validate(const ProfileSpec& spec) {
    std::visit(overloaded{
                   [](const ZeroProfile&) {},
                   [](const GaussianProfile& p) {
                       if (!(p.width > 0.0)) {
                           throw std::invalid_argument(fmt::format("gaussian: width must be positive, got {}", p.width));
                       }
                   },
                   [](const BoxProfile& p) {
                       if (!(p.hi > p.lo)) throw std::invalid_argument("box: interval must have hi > lo");
                   },
                   [](const BoxFamilyProfile& p) {
                       if (!(p.width > 0.0)) {
                           throw std::invalid_argument(fmt::format("box_family: width must be positive, got {}", p.width));
                       }
                   },
                   [](const SobolevRandomProfile& p) {
                       if (!(p.hi > p.lo)) throw std::invalid_argument("sobolev_random: support must have hi > lo");
                       if (p.modes < 1) throw std::invalid_argument("sobolev_random: modes must be >= 1");
                       if (!(p.s >= 0.0) || !(p.delta >= 0.0)) {
                           throw std::invalid_argument("sobolev_random: s and delta must be non-negative");
                       }
                   },
               },
               spec);
}

}  // namespace

const char* profile_kind(const ProfileSpec& spec) noexcept {
    return std::visit(overloaded{
                          [](const ZeroProfile&) { return "zero"; },
                          [](const GaussianProfile&) { return "gaussian"; },
                          [](const BoxProfile&) { return "box"; },
                          [](const BoxFamilyProfile&) { return "box_family"; },
                          [](const SobolevRandomProfile&) { return "sobolev_random"; },
                      },
                      spec);
}

Profile::Profile(ProfileSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    if (const auto* p = std::get_if<SobolevRandomProfile>(&spec_)) {
        std::mt19937_64 rng(p->seed);
        coefficients_.reserve(static_cast<std::size_t>(p->modes));
        const double decay = p->s + 0.5 + p->delta;
        for (int k = 1; k <= p->modes; ++k) {
            const double theta = 2.0 * std::numbers::pi * unit_uniform(rng);
            coefficients_.push_back(std::polar(p->amplitude * std::pow(k, -decay), theta));
        }
    }
}

cplx Profile::operator()(double x) const {
    return std::visit(
        overloaded{
            [](const ZeroProfile&) { return cplx{}; },
            [x](const GaussianProfile& p) {
                const double u = (x - p.center) / p.width;
                return std::polar(p.amplitude * std::exp(-u * u), p.velocity * x);
            },
            [x](const BoxProfile& p) { return cplx{p.height * indicator(x, p.lo, p.hi)}; },
            [x](const BoxFamilyProfile& p) {
                const double half = 0.5 * p.width;
                return cplx{indicator(x, p.center - half, p.center + half) / std::sqrt(p.width)};
            },
            [this, x](const SobolevRandomProfile& p) {
                if (x < p.lo || x > p.hi) return cplx{};
                const double phase = 2.0 * std::numbers::pi * (x - p.lo) / (p.hi - p.lo);
                cplx sum{};
                for (std::size_t k = 0; k < coefficients_.size(); ++k) {
                    sum += coefficients_[k] * std::polar(1.0, phase * static_cast<double>(k + 1));
                }
                return sum;
            },
        },
        spec_);
}

double Profile::mass(double a, double b) const {
    if (b < a) return -mass(b, a);
    return std::visit(
        overloaded{
            [](const ZeroProfile&) { return 0.0; },
            [a, b](const GaussianProfile& p) {
                // int_a^b A^2 exp(-2 (x-c)^2 / w^2) dx
                const double scale = std::sqrt(2.0) / p.width;
                return p.amplitude * p.amplitude * p.width * std::sqrt(std::numbers::pi / 8.0) *
                       (std::erf(scale * (b - p.center)) - std::erf(scale * (a - p.center)));
            },
            [a, b](const BoxProfile& p) { return p.height * p.height * overlap(a, b, p.lo, p.hi); },
            [a, b](const BoxFamilyProfile& p) {
                const double half = 0.5 * p.width;
                return overlap(a, b, p.center - half, p.center + half) / p.width;
            },
            [this, a, b](const SobolevRandomProfile& p) {
                const double lo = std::max(a, p.lo);
                const double hi = std::min(b, p.hi);
                if (!(hi > lo)) return 0.0;
                // Composite Simpson, 64 panels per shortest wavelength.
                const double wavelength = (p.hi - p.lo) / static_cast<double>(p.modes);
                std::size_t panels = static_cast<std::size_t>(std::ceil(64.0 * (hi - lo) / wavelength));
                panels += panels % 2;
                panels = std::max<std::size_t>(panels, 2);
                const double step = (hi - lo) / static_cast<double>(panels);
                double sum = std::norm((*this)(lo)) + std::norm((*this)(hi));
                for (std::size_t k = 1; k < panels; ++k) {
                    sum += (k % 2 ? 4.0 : 2.0) * std::norm((*this)(lo + static_cast<double>(k) * step));
                }
                return sum * step / 3.0;
            },
        },
        spec_);
}

double InitialData::charge() const { return thirring::charge(f, g, axis.h); }

InitialData generate_data(const DataSpec& spec, const Axis& axis) {
    if (axis.count < 2 || !(axis.h > 0.0)) throw std::invalid_argument("generate_data: axis needs >= 2 samples and h > 0");
    const Profile f(spec.f);
    const Profile g(spec.g);
    InitialData data;
    data.axis = axis;
    data.spec = spec;
    data.f.resize(axis.count);
    data.g.resize(axis.count);
    for (std::size_t k = 0; k < axis.count; ++k) {
        const double x = axis.x(k);
        data.f[k] = f(x);
        data.g[k] = g(x);
    }
    return data;
}

InitialData restrict_data(const InitialData& data, std::size_t first, std::size_t count) {
    if (first + count > data.f.size()) throw std::out_of_range("restrict_data: range outside the sample axis");
    InitialData out;
    out.axis = {data.axis.x(first), data.axis.h, count};
    out.spec = data.spec;
    out.f.assign(data.f.begin() + static_cast<long>(first), data.f.begin() + static_cast<long>(first + count));
    out.g.assign(data.g.begin() + static_cast<long>(first), data.g.begin() + static_cast<long>(first + count));
    return out;
}

std::pair<cplx, cplx> massless_exact(const Profile& f, const Profile& g, const ModelParams& p, LabPoint point) {
    if (p.m != 0.0) {
        throw std::invalid_argument(fmt::format("massless_exact: requires m = 0, got m = {}", p.m));
    }
    const double beta = point.x - point.t;
    const double alpha = point.x + point.t;
    const cplx psi = f(beta) * std::polar(1.0, -p.lambda * g.mass(beta, alpha));
    const cplx phi = g(alpha) * std::polar(1.0, -p.lambda * f.mass(beta, alpha));
    return {psi, phi};
}

}  // namespace thirring
