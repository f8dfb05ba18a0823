#include "thirring/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "thirring/field.hpp"

namespace thirring {

Diamond::Diamond(double center, double radius) : center(center), radius(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(center)) {
        throw std::invalid_argument(fmt::format("diamond radius must be positive and finite, got {}", radius));
    }
}

bool Diamond::contains(LabPoint p) const noexcept {
    return std::abs(p.t + p.x - center) <= radius && std::abs(p.t - p.x + center) <= radius;
}

NullGrid::NullGrid(double radius, std::size_t n) : radius_(radius), n_(n) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument(fmt::format("grid radius must be positive and finite, got {}", radius));
    }
    if (n < 2) {
        throw std::invalid_argument(fmt::format("grid needs at least 2 nodes per axis, got {}", n));
    }
    h_ = 2.0 * radius / static_cast<double>(n - 1);
}

bool NullGrid::slice_offset(double t, long& k) const noexcept {
    const double units = t / (0.5 * h_);
    const double nearest = std::round(units);
    if (std::abs(units - nearest) > 1e-9 * std::max(1.0, std::abs(units))) return false;
    k = static_cast<long>(nearest);
    return true;
}

double sup_difference(const SpinorPair& a, const SpinorPair& b) {
    if (a.n != b.n) throw std::invalid_argument("sup_difference: grid size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t j = 0; j < a.n; ++j) {
            if (!a.covers(i, j) || !b.covers(i, j)) continue;
            worst = std::max(worst, std::abs(a.psi_at(i, j) - b.psi_at(i, j)));
            worst = std::max(worst, std::abs(a.phi_at(i, j) - b.phi_at(i, j)));
        }
    }
    return worst;
}

Slice slice_at_offset(const NullGrid& grid, const SpinorPair& field, long k, double center) {
    const long n = static_cast<long>(grid.size());
    if (field.n != grid.size()) throw std::invalid_argument("time_slice: field does not match grid");
    if (k <= -n || k >= n) {
        throw std::invalid_argument(fmt::format("time_slice: offset {} outside the diamond (|k| < {})", k, n));
    }
    if (k < 0 && field.extent != Extent::full) {
        throw std::invalid_argument("time_slice: negative times need a field solved on the full square");
    }
    const std::size_t count = static_cast<std::size_t>(n - std::labs(k));
    const double h = grid.spacing();

    Slice s;
    s.t = 0.5 * h * static_cast<double>(k);
    s.axis = {center - grid.radius() + 0.5 * h * static_cast<double>(std::labs(k)), h, count};
    s.psi.resize(count);
    s.phi.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
        // i - j = k along the slice; x increases with both indices.
        const std::size_t j = k >= 0 ? m : m + static_cast<std::size_t>(-k);
        const std::size_t i = k >= 0 ? m + static_cast<std::size_t>(k) : m;
        s.psi[m] = field.psi_at(i, j);
        s.phi[m] = field.phi_at(i, j);
    }
    return s;
}

Slice time_slice(const NullGrid& grid, const SpinorPair& field, double t, double center) {
    long k = 0;
    if (!grid.slice_offset(t, k)) {
        const double step = 0.5 * grid.spacing();
        const double below = std::floor(t / step) * step;
        throw std::invalid_argument(fmt::format(
            "time_slice: t = {} is not on a grid anti-diagonal; nearest representable times are {} and {}",
            t, below, below + step));
    }
    return slice_at_offset(grid, field, k, center);
}

}  // namespace thirring
