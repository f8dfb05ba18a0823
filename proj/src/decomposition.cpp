#include "thirring/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "thirring/kernels.hpp"

namespace thirring {

namespace {

const cplx I{0.0, 1.0};

// Walks one characteristic line outward from the diagonal. `at(k)` returns the node index of
// step k (k = 0 on the diagonal); `sign` is the orientation of the integral relative to the walk.
template <class Index>
void split_line(long steps, Index at, double h, double sign, double coupling, cplx source_coef, cplx start,
                const std::vector<cplx>& phase_field, const std::vector<cplx>& source_field, std::vector<cplx>& lin,
                std::vector<cplx>& rem) {
    double theta = 0.0;
    double prev_dens = std::norm(phase_field[at(0)]);
    cplx acc{};
    cplx prev_src = source_coef * source_field[at(0)];
    lin[at(0)] = start;
    rem[at(0)] = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const std::size_t idx = at(k);
        const double dens = std::norm(phase_field[idx]);
        const double theta_next = theta + sign * coupling * 0.5 * h * (prev_dens + dens);
        const cplx src = source_coef * source_field[idx];
        acc += sign * 0.5 * h * (std::polar(1.0, -theta) * prev_src + std::polar(1.0, -theta_next) * src);
        theta = theta_next;
        prev_dens = dens;
        prev_src = src;
        const cplx rot = std::polar(1.0, theta);
        lin[idx] = start * rot;
        rem[idx] = rot * acc;
    }
}

}  // namespace

DecompositionResult delgado_split(const SpinorPair& solution, const InitialData& data, const ModelParams& params,
                                  const NullGrid& grid) {
    const long n = static_cast<long>(grid.size());
    if (solution.n != grid.size() || data.f.size() != grid.size()) {
        throw std::invalid_argument("delgado_split: solution, data and grid sizes differ");
    }
    const double h = grid.spacing();
    const bool full = solution.extent == Extent::full;
    DecompositionResult r;
    r.linear = SpinorPair(grid.size(), solution.extent);
    r.remainder = SpinorPair(grid.size(), solution.extent);
    const int threads = kernel_threads();

    // psi along beta-rows: theta = -lambda int_beta^alpha |phi|^2, source -i m/2 phi.
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long j = 0; j < n; ++j) {
        const cplx fj = data.f[static_cast<std::size_t>(j)];
        split_line(n - 1 - j, [=](long k) { return static_cast<std::size_t>((j + k) * n + j); }, h, 1.0, -params.lambda,
                   -0.5 * I * params.m, fj, solution.phi, solution.phi, r.linear.psi, r.remainder.psi);
        if (full) {
            split_line(j, [=](long k) { return static_cast<std::size_t>((j - k) * n + j); }, h, -1.0, -params.lambda,
                       -0.5 * I * params.m, fj, solution.phi, solution.phi, r.linear.psi, r.remainder.psi);
        }
    }
    // phi along alpha-columns: theta' = lambda int_alpha^beta |psi|^2, source i m/2 psi.
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long i = 0; i < n; ++i) {
        const cplx gi = data.g[static_cast<std::size_t>(i)];
        split_line(i, [=](long k) { return static_cast<std::size_t>(i * n + (i - k)); }, h, -1.0, params.lambda,
                   0.5 * I * params.m, gi, solution.psi, solution.psi, r.linear.phi, r.remainder.phi);
        if (full) {
            split_line(n - 1 - i, [=](long k) { return static_cast<std::size_t>(i * n + (i + k)); }, h, 1.0,
                       params.lambda, 0.5 * I * params.m, gi, solution.psi, solution.psi, r.linear.phi,
                       r.remainder.phi);
        }
    }

    std::vector<double> slice_psi(static_cast<std::size_t>(2 * n), 0.0);
    std::vector<double> slice_phi(static_cast<std::size_t>(2 * n), 0.0);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
            if (!solution.covers(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) continue;
            const std::size_t at = static_cast<std::size_t>(i * n + j);
            r.residual_sum = std::max({r.residual_sum,
                                       std::abs(solution.psi[at] - r.linear.psi[at] - r.remainder.psi[at]),
                                       std::abs(solution.phi[at] - r.linear.phi[at] - r.remainder.phi[at])});
            r.modulus_error = std::max({r.modulus_error,
                                        std::abs(std::abs(r.linear.psi[at]) - std::abs(data.f[static_cast<std::size_t>(j)])),
                                        std::abs(std::abs(r.linear.phi[at]) - std::abs(data.g[static_cast<std::size_t>(i)]))});
            const auto k = static_cast<std::size_t>(i - j + n);
            slice_psi[k] = std::max(slice_psi[k], std::abs(r.remainder.psi[at]));
            slice_phi[k] = std::max(slice_phi[k], std::abs(r.remainder.phi[at]));
        }
    }
    for (std::size_t k = 0; k < slice_psi.size(); ++k) {
        r.linf_N = std::max(r.linf_N, slice_psi[k] + slice_phi[k]);
        r.linf_psi_N = std::max(r.linf_psi_N, slice_psi[k]);
    }
    return r;
}

Mass1Report verify_mass1(DecompositionResult& result, const SpinorPair& solution, const ModelParams& params,
                         const NullGrid& grid) {
    const long n = static_cast<long>(grid.size());
    const double h = grid.spacing();
    const auto& psiN = result.remainder.psi;
    const auto& phiN = result.remainder.phi;
    Mass1Report rep;
    double sq_sum = 0.0;
    auto record = [&](double lhs, double rhs) {
        const double d = std::abs(lhs - rhs);
        rep.sup_residual = std::max(rep.sup_residual, d);
        rep.sup_lhs = std::max(rep.sup_lhs, lhs);
        sq_sum += d * d;
    };
    // Signed trapezoid from the diagonal; orientation +1 when alpha >= beta.
    for (long j = 0; j < n; ++j) {
        for (int dir : {1, -1}) {
            if (dir < 0 && solution.extent != Extent::full) continue;
            double acc = 0.0;
            auto dens = [&](long i) {
                const std::size_t at = static_cast<std::size_t>(i * n + j);
                return params.m * std::imag(solution.phi[at] * std::conj(psiN[at]));
            };
            double prev = dens(j);
            for (long i = j + dir; i >= 0 && i < n; i += dir) {
                const double cur = dens(i);
                acc += dir * 0.5 * h * (prev + cur);
                prev = cur;
                record(std::norm(psiN[static_cast<std::size_t>(i * n + j)]), acc);
            }
        }
    }
    for (long i = 0; i < n; ++i) {
        for (int dir : {-1, 1}) {
            if (dir > 0 && solution.extent != Extent::full) continue;
            double acc = 0.0;
            auto dens = [&](long j) {
                const std::size_t at = static_cast<std::size_t>(i * n + j);
                return params.m * std::imag(solution.psi[at] * std::conj(phiN[at]));
            };
            double prev = dens(i);
            for (long j = i + dir; j >= 0 && j < n; j += dir) {
                const double cur = dens(j);
                // int_beta^alpha = -int_alpha^beta; walking in beta with step dir * h.
                acc -= dir * 0.5 * h * (prev + cur);
                prev = cur;
                record(std::norm(phiN[static_cast<std::size_t>(i * n + j)]), acc);
            }
        }
    }
    rep.l2_residual = std::sqrt(sq_sum) * h;
    result.mass1_residual = rep.sup_residual;
    return rep;
}

std::vector<StressRow> boundedness_stress(const StressSpec& spec) {
    const NullGrid grid(spec.radius, spec.n);
    std::vector<StressRow> rows;
    for (double w : spec.widths) {
        if (!(w > 0.0)) throw std::invalid_argument(fmt::format("boundedness_stress: width {} must be positive", w));
        const DataSpec ds{BoxFamilyProfile{w, spec.box_center}, spec.g};
        const InitialData data = generate_data(ds, diagonal_axis(grid));
        const LocalSolution sol = solve_marching(data, spec.params, grid);
        const DecompositionResult dec = delgado_split(sol.fields, data, spec.params, grid);
        StressRow row;
        row.width = w;
        for (const cplx& v : data.f) row.sup_f = std::max(row.sup_f, std::abs(v));
        row.linf_psi_N = dec.linf_psi_N;
        row.charge = data.charge();
        row.ratio = row.linf_psi_N / row.charge;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace thirring
