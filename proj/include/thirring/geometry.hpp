#pragma once

#include <cstddef>
#include <vector>

#include "thirring/types.hpp"

namespace thirring {

struct LabPoint {
    double t = 0.0;
    double x = 0.0;
};

/// (alpha, beta) = (x + t, x - t).
struct NullPoint {
    double alpha = 0.0;
    double beta = 0.0;
};

constexpr NullPoint lab_to_null(LabPoint p) noexcept { return {p.x + p.t, p.x - p.t}; }

constexpr LabPoint null_to_lab(NullPoint q) noexcept {
    return {(q.alpha - q.beta) / 2.0, (q.alpha + q.beta) / 2.0};
}

/// Lab-frame causal diamond centred at x0: |t + y - x0| <= R and |t - y + x0| <= R.
struct Diamond {
    double center = 0.0;
    double radius = 1.0;

    Diamond(double center, double radius);

    bool contains(LabPoint p) const noexcept;
};

/// Uniform square lattice on [-R, R]^2 in null coordinates.
///
/// Node (i, j) sits at alpha_i = -R + i h, beta_j = -R + j h with h = 2R / (n - 1).
/// The diagonal i == j is the t = 0 line; the lines i - j = k are the lab times
/// t = k h / 2, so every representable time is a multiple of h / 2.
class NullGrid {
public:
    NullGrid(double radius, std::size_t n);

    double radius() const noexcept { return radius_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }

    double alpha(std::size_t i) const noexcept { return -radius_ + static_cast<double>(i) * h_; }
    double beta(std::size_t j) const noexcept { return -radius_ + static_cast<double>(j) * h_; }

    /// Lab point of node (i, j), relative to the diamond centre.
    LabPoint lab_point(std::size_t i, std::size_t j) const noexcept {
        return null_to_lab({alpha(i), beta(j)});
    }

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n_ + j; }
    std::size_t node_count() const noexcept { return n_ * n_; }

    /// Anti-diagonal offset k = i - j carrying lab time t, or nothing if t is off-lattice.
    bool slice_offset(double t, long& k) const noexcept;

private:
    double radius_;
    std::size_t n_;
    double h_;
};

/// Uniform lab-space sample axis x_k = x0 + k h, k = 0..count-1.
struct Axis {
    double x0 = 0.0;
    double h = 1.0;
    std::size_t count = 0;

    double x(std::size_t k) const noexcept { return x0 + static_cast<double>(k) * h; }
    double back() const noexcept { return x(count - 1); }
};

/// Values of the solution along one lab time.
struct Slice {
    double t = 0.0;
    Axis axis;
    std::vector<cplx> psi;
    std::vector<cplx> phi;
};

}  // namespace thirring
