#pragma once

// Reference values computed without the library: closed forms, brute-force quadratures and
// a plain least-squares fit. Tests compare library output against these.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Gaussian A exp(-(x - c)^2 / w^2) exp(i v x).
struct Gauss {
    double A = 1.0, w = 1.0, c = 0.0, v = 0.0;

    cplx operator()(double x) const {
        const double u = (x - c) / w;
        return A * std::exp(-u * u) * std::exp(cplx{0.0, v * x});
    }

    /// int_a^b |.|^2 in closed form.
    double mass(double a, double b) const {
        const double k = std::sqrt(2.0) / w;
        return A * A * w * std::sqrt(std::numbers::pi / 2.0) / 2.0 * (std::erf(k * (b - c)) - std::erf(k * (a - c)));
    }
};

/// Massless solution (m = 0): each component is transported and picks up the phase of the other's mass
/// between the two characteristics through (t, x).
inline std::pair<cplx, cplx> massless(const Gauss& f, const Gauss& g, double lambda, double t, double x) {
    const double lo = x - t, hi = x + t;
    const cplx psi = f(lo) * std::exp(cplx{0.0, -lambda * g.mass(lo, hi)});
    const cplx phi = g(hi) * std::exp(cplx{0.0, -lambda * f.mass(lo, hi)});
    return {psi, phi};
}

inline double trapezoid(const std::vector<double>& y, double h) {
    if (y.size() < 2) return 0.0;
    double sum = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) sum += y[k];
    return sum * h;
}

/// Least-squares slope of log(y) against log(x).
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Squared Gagliardo seminorm over [a, b] of the step function that takes the midpoint value of f
/// on each of `cells` equal cells. For a step function the double integral is a finite sum:
/// cells d apart contribute 2 H^{1-2s} K(d) |c_i - c_{i+d}|^2 with
/// K(d) = G(d+1) - 2 G(d) + G(d-1),  G(z) = z^{1-2s} / ((-2s)(1-2s)).
/// Exact for step functions whose jumps sit on cell edges; O(H) otherwise.
inline double gagliardo_sq(const std::function<cplx(double)>& f, double a, double b, std::size_t cells, double s) {
    const double H = (b - a) / static_cast<double>(cells);
    std::vector<cplx> c(cells);
    for (std::size_t i = 0; i < cells; ++i) c[i] = f(a + (static_cast<double>(i) + 0.5) * H);
    const double e = 1.0 - 2.0 * s;
    auto G = [&](double z) { return z == 0.0 ? 0.0 : std::pow(z, e) / ((-2.0 * s) * e); };
    double total = 0.0;
    for (std::size_t d = 1; d < cells; ++d) {
        const double dd = static_cast<double>(d);
        const double K = G(dd + 1.0) - 2.0 * G(dd) + G(dd - 1.0);
        double lag = 0.0;
        for (std::size_t i = 0; i + d < cells; ++i) lag += std::norm(c[i] - c[i + d]);
        total += K * lag;
    }
    return 2.0 * std::pow(H, e) * total;
}

/// int_a^b |f|^2 by the midpoint rule on the same cells.
inline double l2_sq(const std::function<cplx(double)>& f, double a, double b, std::size_t cells) {
    const double H = (b - a) / static_cast<double>(cells);
    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) sum += std::norm(f(a + (static_cast<double>(i) + 0.5) * H));
    return sum * H;
}

/// H^s(a, b) norm of f by the step-function quadrature above.
inline double hs_norm(const std::function<cplx(double)>& f, double a, double b, std::size_t cells, double s) {
    return std::sqrt(l2_sq(f, a, b, cells) + gagliardo_sq(f, a, b, cells, s));
}

/// Seminorm squared of the indicator of (lo, hi) inside (a, b) with a <= lo < hi <= b, in closed form:
/// 2 int_lo^hi [ int_a^lo + int_hi^b ] |x - y|^{-1-2s} dy dx.
inline double box_gagliardo_sq(double a, double lo, double hi, double b, double s) {
    const double e = 1.0 - 2.0 * s;
    // int_lo^hi int_c^lo (x - y)^{-1-2s} dy dx for c < lo, and its mirror on the right.
    auto side = [&](double gap) {
        // int_0^L int_0^gap (u + v)^{-1-2s} dv du, with L = hi - lo.
        const double L = hi - lo;
        auto P = [&](double z) { return z == 0.0 ? 0.0 : std::pow(z, e); };
        return (P(L + gap) - P(L) - P(gap)) / ((-2.0 * s) * e);
    };
    return 2.0 * (side(lo - a) + side(b - hi));
}

}  // namespace oracle
