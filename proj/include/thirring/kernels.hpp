#pragma once

#include <span>

#include "thirring/field.hpp"
#include "thirring/model.hpp"

// Hot loops of the solver and of the Gagliardo quadrature. The functions in
// `thirring` are OpenMP-parallel; those in `thirring::reference` are plain
// serial transcriptions of the same formulas, kept for cross-checking and
// for the benchmark target.

namespace thirring {

/// Number of OpenMP threads used by the kernels (THIRRING_THREADS, 0 or unset = runtime default).
int kernel_threads();
void set_kernel_threads(int threads);

/// One application of the characteristic integral map:
///   psi'(i, j) = f_j + 1/2 Trap_{beta_j}^{alpha_i} F(., j)
///   phi'(i, j) = g_i - 1/2 Trap_{alpha_i}^{beta_j} G(i, .)
/// with F = rhs_psi, G = rhs_phi evaluated on `in`. `f` and `g` hold the data on the diagonal.
/// Returns the sup-norm change max |out - in| over covered nodes.
double picard_sweep(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p,
                    const SpinorPair& in, SpinorPair& out);

/// Cell-by-cell trapezoidal marching over anti-diagonals, moving outward from the diagonal.
/// Solves the same discrete equations as the fixed point of picard_sweep.
/// Throws NumericalError naming the cell if the implicit endpoint fails to settle.
void march(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p, SpinorPair& out);

/// Squared Gagliardo seminorm  int int |p(x) - p(y)|^2 / |x - y|^{1 + 2s}  of the piecewise-linear
/// interpolant p of equispaced samples `values` (spacing h), computed exactly up to the moment quadrature.
double gagliardo_seminorm_sq(std::span<const cplx> values, double h, double s);

namespace reference {

double picard_sweep(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p,
                    const SpinorPair& in, SpinorPair& out);

void march(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p, SpinorPair& out);

double gagliardo_seminorm_sq(std::span<const cplx> values, double h, double s);

}  // namespace reference

/// Moment integrals  I[a][b](d) = int_0^1 int_0^1 u^a v^b (d + u - v)^{-1-2s} du dv  for a + b <= 2, d >= 1.
struct LagMoments {
    double i00, i10, i01, i20, i11, i02;
};
LagMoments lag_moments(long d, double s);

}  // namespace thirring
