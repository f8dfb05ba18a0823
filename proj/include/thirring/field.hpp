#pragma once

#include <cstddef>
#include <vector>

#include "thirring/geometry.hpp"

namespace thirring {

/// Which part of the null square carries solution values.
enum class Extent {
    forward,  ///< nodes with alpha >= beta (t >= 0)
    full,     ///< the whole square (both time directions)
};

/// Samples of psi*, phi* on every node of a NullGrid, stored alpha-major.
struct SpinorPair {
    std::size_t n = 0;
    Extent extent = Extent::forward;
    std::vector<cplx> psi;
    std::vector<cplx> phi;

    SpinorPair() = default;
    SpinorPair(std::size_t n, Extent extent) : n(n), extent(extent), psi(n * n), phi(n * n) {}

    cplx& psi_at(std::size_t i, std::size_t j) noexcept { return psi[i * n + j]; }
    cplx& phi_at(std::size_t i, std::size_t j) noexcept { return phi[i * n + j]; }
    const cplx& psi_at(std::size_t i, std::size_t j) const noexcept { return psi[i * n + j]; }
    const cplx& phi_at(std::size_t i, std::size_t j) const noexcept { return phi[i * n + j]; }

    bool covers(std::size_t i, std::size_t j) const noexcept {
        return extent == Extent::full || i >= j;
    }
};

/// Sup over covered nodes of max(|psi_a - psi_b|, |phi_a - phi_b|).
double sup_difference(const SpinorPair& a, const SpinorPair& b);

/// Extracts psi(t, .), phi(t, .) on the anti-diagonal carrying time t, without interpolation.
///
/// `center` shifts the lab x coordinates (diamond centre). Throws std::invalid_argument
/// when t is not a multiple of h / 2, lies outside the diamond, or falls in a half of the
/// square the field does not cover.
Slice time_slice(const NullGrid& grid, const SpinorPair& field, double t, double center = 0.0);

/// Slice by anti-diagonal offset k = i - j (t = k h / 2).
Slice slice_at_offset(const NullGrid& grid, const SpinorPair& field, long k, double center = 0.0);

}  // namespace thirring
