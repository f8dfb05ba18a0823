#pragma once

#include <vector>

#include "thirring/field.hpp"
#include "thirring/model.hpp"
#include "thirring/solver.hpp"

namespace thirring {

/// (psi, phi) = (psi_L, phi_L) + (psi_N, phi_N) on a NullGrid.
///
/// psi_L solves the transport equation with the cubic phase only and starts from f, so its
/// modulus is transported data; psi_N carries the mass coupling and starts from zero.
struct DecompositionResult {
    SpinorPair linear;     // psi_L, phi_L
    SpinorPair remainder;  // psi_N, phi_N
    double residual_sum = 0.0;    // sup |psi - psi_L - psi_N|, |phi - phi_L - phi_N|
    double modulus_error = 0.0;   // sup ||psi_L| - |f(beta)||, ||phi_L| - |g(alpha)||
    double linf_N = 0.0;          // max over slices of ||psi_N(t)||_inf + ||phi_N(t)||_inf
    double linf_psi_N = 0.0;      // max over slices of ||psi_N(t)||_inf
    double mass1_residual = 0.0;  // filled by verify_mass1
};

/// Row-wise exact phase integration:
///   psi_L = f(beta) e^{i theta},  theta = -lambda Trap int_beta^alpha |phi*|^2,
///   psi_N = e^{i theta} Trap int_beta^alpha e^{-i theta} (-i m / 2) phi*,
/// and the mirrored construction for phi along alpha-columns.
DecompositionResult delgado_split(const SpinorPair& solution, const InitialData& data, const ModelParams& params,
                                  const NullGrid& grid);

struct Mass1Report {
    double sup_residual = 0.0;
    double l2_residual = 0.0;
    double sup_lhs = 0.0;  // sup of |psi_N|^2, |phi_N|^2 for scale
};

/// Checks |psi_N*|^2 = m int_beta^alpha Im(phi* conj psi_N*) d gamma and
/// |phi_N*|^2 = m int_beta^alpha Im(psi* conj phi_N*) d gamma (trapezoidal) on every node.
/// Also stores the sup residual in result.mass1_residual.
Mass1Report verify_mass1(DecompositionResult& result, const SpinorPair& solution, const ModelParams& params,
                         const NullGrid& grid);

struct StressRow {
    double width = 0.0;
    double sup_f = 0.0;
    double linf_psi_N = 0.0;
    double charge = 0.0;
    double ratio = 0.0;  // linf_psi_N / charge
};

struct StressSpec {
    ModelParams params{1.0, 1.0};
    std::vector<double> widths{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    double box_center = -0.25;
    GaussianProfile g{1.0, 0.3, 0.25, 0.0};  // fixed partner component
    double radius = 1.0;
    std::size_t n = 1025;
};

/// Box family f (unit L2 norm, sup w^{-1/2}) against a fixed g: solve by marching, split,
/// and tabulate max_t ||psi_N(t)||_inf.
std::vector<StressRow> boundedness_stress(const StressSpec& spec);

}  // namespace thirring
