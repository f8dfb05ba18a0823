#include "thirring/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/core.h>
#include <omp.h>

namespace thirring {

namespace {

std::atomic<int> thread_override{-1};

int threads_from_env() {
    const char* env = std::getenv("THIRRING_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) return 0;
    return static_cast<int>(v);
}

void check_shapes(std::span<const cplx> f, std::span<const cplx> g, const SpinorPair& field) {
    if (f.size() != field.n || g.size() != field.n) {
        throw std::invalid_argument(
            fmt::format("kernel: data has {} / {} samples but the grid has {} nodes per axis", f.size(), g.size(), field.n));
    }
}

constexpr double inner_tol = 1e-13;
constexpr int inner_max = 8;

struct CellInput {
    cplx psi_a, phi_a;  // node preceding (i, j) along its beta-row
    cplx psi_b, phi_b;  // node preceding (i, j) along its alpha-column
};

// Trapezoidal update over one cell; c = +-h/4. The implicit endpoint is resolved by a
// Gauss-Seidel loop in which each component equation is linear in its own unknown.
bool solve_cell(const CellInput& in, double c, const ModelParams& p, cplx& psi, cplx& phi) {
    const cplx I{0.0, 1.0};
    const cplx fa = rhs_psi(in.phi_a, in.psi_a, p);
    const cplx gb = rhs_phi(in.psi_b, in.phi_b, p);
    const cplx a = in.psi_a + c * fa;
    const cplx b = in.phi_b + c * gb;
    psi = a + c * fa;
    phi = b + c * gb;
    for (int it = 0; it < inner_max; ++it) {
        const cplx psi_n = (a - I * c * p.m * phi) / (1.0 + 2.0 * I * c * p.lambda * std::norm(phi));
        const cplx phi_n = (b - I * c * p.m * psi_n) / (1.0 + 2.0 * I * c * p.lambda * std::norm(psi_n));
        const double delta = std::max(std::abs(psi_n - psi), std::abs(phi_n - phi));
        psi = psi_n;
        phi = phi_n;
        if (delta <= inner_tol * std::max(1.0, std::abs(psi) + std::abs(phi))) return true;
        if (!std::isfinite(delta)) return false;
    }
    return false;
}

}  // namespace

int kernel_threads() {
    int t = thread_override.load();
    if (t < 0) t = threads_from_env();
    return t > 0 ? t : omp_get_max_threads();
}

void set_kernel_threads(int threads) { thread_override.store(threads); }

double picard_sweep(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p,
                    const SpinorPair& in, SpinorPair& out) {
    check_shapes(f, g, in);
    const long n = static_cast<long>(in.n);
    const bool full = in.extent == Extent::full;
    if (out.n != in.n || out.extent != in.extent) out = SpinorPair(in.n, in.extent);
    const double half_h = 0.5 * h;
    const int threads = kernel_threads();
    double worst = 0.0;

#pragma omp parallel num_threads(threads) reduction(max : worst)
    {
        // psi along beta-rows. Each thread owns a block of rows and walks alpha outward,
        // so the inner loop runs over contiguous memory.
        const long nt = omp_get_num_threads();
        const long tid = omp_get_thread_num();
        const long j0 = n * tid / nt;
        const long j1 = n * (tid + 1) / nt;
        std::vector<cplx> sum(static_cast<std::size_t>(j1 - j0));
        std::vector<cplx> prev(static_cast<std::size_t>(j1 - j0));
        for (long i = 0; i < n; ++i) {
            for (long j = j0; j < std::min(j1, i + 1); ++j) {
                const std::size_t k = static_cast<std::size_t>(j - j0);
                const std::size_t at = static_cast<std::size_t>(i * n + j);
                const cplx F = rhs_psi(in.phi[at], in.psi[at], p);
                if (i == j) {
                    sum[k] = 0.0;
                    out.psi[at] = f[static_cast<std::size_t>(j)];
                } else {
                    sum[k] += half_h * (prev[k] + F);
                    out.psi[at] = f[static_cast<std::size_t>(j)] + 0.5 * sum[k];
                }
                prev[k] = F;
                worst = std::max(worst, std::abs(out.psi[at] - in.psi[at]));
            }
        }
        if (full) {
            for (long i = n - 1; i >= 0; --i) {
                for (long j = std::max(j0, i); j < j1; ++j) {
                    const std::size_t k = static_cast<std::size_t>(j - j0);
                    const std::size_t at = static_cast<std::size_t>(i * n + j);
                    const cplx F = rhs_psi(in.phi[at], in.psi[at], p);
                    if (i == j) {
                        sum[k] = 0.0;
                    } else {
                        sum[k] += half_h * (prev[k] + F);
                        out.psi[at] = f[static_cast<std::size_t>(j)] - 0.5 * sum[k];
                        worst = std::max(worst, std::abs(out.psi[at] - in.psi[at]));
                    }
                    prev[k] = F;
                }
            }
        }

        // phi along alpha-columns (contiguous in memory).
#pragma omp for schedule(static)
        for (long i = 0; i < n; ++i) {
            const cplx* psi_col = &in.psi[static_cast<std::size_t>(i * n)];
            const cplx* phi_col = &in.phi[static_cast<std::size_t>(i * n)];
            cplx* out_col = &out.phi[static_cast<std::size_t>(i * n)];
            const cplx gi = g[static_cast<std::size_t>(i)];
            out_col[i] = gi;
            worst = std::max(worst, std::abs(gi - phi_col[i]));
            cplx s = 0.0;
            cplx last = rhs_phi(psi_col[i], phi_col[i], p);
            for (long j = i - 1; j >= 0; --j) {
                const cplx G = rhs_phi(psi_col[j], phi_col[j], p);
                s += half_h * (last + G);
                last = G;
                out_col[j] = gi + 0.5 * s;
                worst = std::max(worst, std::abs(out_col[j] - phi_col[j]));
            }
            if (full) {
                s = 0.0;
                last = rhs_phi(psi_col[i], phi_col[i], p);
                for (long j = i + 1; j < n; ++j) {
                    const cplx G = rhs_phi(psi_col[j], phi_col[j], p);
                    s += half_h * (last + G);
                    last = G;
                    out_col[j] = gi - 0.5 * s;
                    worst = std::max(worst, std::abs(out_col[j] - phi_col[j]));
                }
            }
        }
    }
    return worst;
}

void march(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p, SpinorPair& out) {
    check_shapes(f, g, out);
    const long n = static_cast<long>(out.n);
    for (long i = 0; i < n; ++i) {
        out.psi_at(i, i) = f[static_cast<std::size_t>(i)];
        out.phi_at(i, i) = g[static_cast<std::size_t>(i)];
    }
    const int threads = kernel_threads();
    std::atomic<bool> failed{false};
    long bad_i = -1;
    long bad_j = -1;

    auto sweep = [&](int s) {
        const double c = s * 0.25 * h;
        for (long k = 1; k < n && !failed.load(); ++k) {
#pragma omp parallel for num_threads(threads) schedule(static)
            for (long m = 0; m < n - k; ++m) {
                const long i = s > 0 ? m + k : m;
                const long j = s > 0 ? m : m + k;
                const CellInput in{out.psi_at(i - s, j), out.phi_at(i - s, j), out.psi_at(i, j + s), out.phi_at(i, j + s)};
                cplx psi, phi;
                if (!solve_cell(in, c, p, psi, phi)) {
#pragma omp critical(thirring_march_failure)
                    if (!failed.load()) {
                        bad_i = i;
                        bad_j = j;
                        failed.store(true);
                    }
                }
                out.psi_at(i, j) = psi;
                out.phi_at(i, j) = phi;
            }
        }
    };
    sweep(+1);
    if (out.extent == Extent::full && !failed.load()) sweep(-1);
    if (failed.load()) {
        throw NumericalError(fmt::format(
            "march: implicit cell update did not settle within {} inner iterations at node (i={}, j={})", inner_max,
            bad_i, bad_j));
    }
}

LagMoments lag_moments(long d, double s) {
    using quad = boost::math::quadrature::gauss<double, 12>;
    const double sigma = 1.0 + 2.0 * s;
    const double dd = static_cast<double>(d);
    const double g2 = 1.0 / std::sqrt(3.0);
    LagMoments m{0, 0, 0, 0, 0, 0};

    auto accumulate = [&](double weight, double u, double v) {
        m.i00 += weight;
        m.i10 += weight * u;
        m.i01 += weight * v;
        m.i20 += weight * u * u;
        m.i11 += weight * u * v;
        m.i02 += weight * v * v;
    };
    // For fixed w = u - v the integrand is a polynomial of degree <= 2 in u, so a
    // two-point Gauss rule in u is exact; the w-integral carries the kernel.
    auto half = [&](double w_lo, double w_hi, bool lower) {
        const double mid = 0.5 * (w_lo + w_hi);
        const double rad = 0.5 * (w_hi - w_lo);
        const auto& x = quad::abscissa();
        const auto& wt = quad::weights();
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (double sign : {-1.0, 1.0}) {
                const double w = mid + sign * rad * x[k];
                const double kernel = wt[k] * rad * std::pow(dd + w, -sigma);
                const double u_lo = lower ? 0.0 : w;
                const double u_hi = lower ? 1.0 + w : 1.0;
                const double um = 0.5 * (u_lo + u_hi);
                const double ur = 0.5 * (u_hi - u_lo);
                for (double t : {-g2, g2}) {
                    const double u = um + ur * t;
                    accumulate(kernel * ur, u, u - w);
                }
            }
        }
    };
    half(0.0, 1.0, false);
    if (d >= 2) {
        half(-1.0, 0.0, true);
    } else {
        // d = 1, w in [-1, 0]: with z = 1 + w the kernel is z^{-1-2s} and every inner
        // integral vanishes at z = 0, leaving exact monomial integrals of z^{k - 1 - 2s}.
        const double e1 = 1.0 / (1.0 - 2.0 * s);
        const double e2 = 1.0 / (2.0 - 2.0 * s);
        const double e3 = 1.0 / (3.0 - 2.0 * s);
        m.i00 += e1;
        m.i10 += 0.5 * e2;
        m.i01 += e1 - 0.5 * e2;
        m.i20 += e3 / 3.0;
        m.i11 += 0.5 * e2 - e3 / 6.0;
        m.i02 += e1 - e2 + e3 / 3.0;
    }
    return m;
}

namespace {

constexpr long near_lags = 16;

void check_order(double s) {
    if (!(s > 0.0 && s < 0.5)) {
        throw std::invalid_argument(fmt::format("Gagliardo seminorm needs 0 < s < 1/2, got s = {}", s));
    }
}

double same_cell_factor(double s) { return 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s)); }

// Quadratic form of the difference weights (1-u, u, u-v) on
// G = (f_c - f_e, f_{c+1} - f_{e+1}, f_{e+1} - f_e).
struct DiffForm {
    double d11, d22, d33, d12, d13, d23;

    explicit DiffForm(const LagMoments& m)
        : d11(m.i00 - 2.0 * m.i10 + m.i20),
          d22(m.i20),
          d33(m.i20 - 2.0 * m.i11 + m.i02),
          d12(m.i10 - m.i20),
          d13(m.i10 - m.i01 - m.i20 + m.i11),
          d23(m.i20 - m.i11) {}

    double pair(const cplx* f, long c, long e) const {
        const cplx g1 = f[c] - f[e];
        const cplx g2 = f[c + 1] - f[e + 1];
        const cplx g3 = f[e + 1] - f[e];
        return d11 * std::norm(g1) + d22 * std::norm(g2) + d33 * std::norm(g3) +
               2.0 * (d12 * std::real(g1 * std::conj(g2)) + d13 * std::real(g1 * std::conj(g3)) +
                      d23 * std::real(g2 * std::conj(g3)));
    }
};

double dot_re(const cplx* f, long lag, long count) {
    double acc = 0.0;
    for (long e = 0; e + lag < count; ++e) acc += std::real(f[e + lag] * std::conj(f[e]));
    return acc;
}

}  // namespace

double gagliardo_seminorm_sq(std::span<const cplx> values, double h, double s) {
    check_order(s);
    const long count = static_cast<long>(values.size());
    if (count < 2) return 0.0;
    const long cells = count - 1;
    // The far-lag sums are nodal products; shifting by a sample (the seminorm is blind to
    // constants) keeps their cancellation small and makes constant data exactly zero.
    std::vector<cplx> shifted(values.begin(), values.end());
    const cplx base = shifted[0];
    for (cplx& v : shifted) v -= base;
    const cplx* f = shifted.data();
    const int threads = kernel_threads();

    double same = 0.0;
    for (long c = 0; c < cells; ++c) same += std::norm(f[c + 1] - f[c]);
    same *= same_cell_factor(s);

    // Nodal prefix sums for the far-lag closed form.
    std::vector<double> mass(static_cast<std::size_t>(count + 1), 0.0);
    std::vector<double> neighbour(static_cast<std::size_t>(count), 0.0);
    for (long t = 0; t < count; ++t) mass[t + 1] = mass[t] + std::norm(f[t]);
    for (long t = 0; t + 1 < count; ++t) neighbour[t + 1] = neighbour[t] + std::real(f[t] * std::conj(f[t + 1]));

    const long first_far = near_lags + 1;
    std::vector<double> autocorr(static_cast<std::size_t>(count + 1), 0.0);
    std::vector<double> per_lag(static_cast<std::size_t>(cells), 0.0);

#pragma omp parallel num_threads(threads)
    {
#pragma omp for schedule(dynamic, 16)
        for (long lag = first_far - 1; lag <= cells; ++lag) autocorr[lag] = dot_re(f, lag, count);

#pragma omp for schedule(dynamic, 4)
        for (long d = 1; d < cells; ++d) {
            const LagMoments m = lag_moments(d, s);
            double acc = 0.0;
            if (d <= near_lags) {
                const DiffForm form(m);
                for (long e = 0; e + d < cells; ++e) acc += form.pair(f, e + d, e);
            } else {
                // Nodal weights (1-u, u, -(1-v), -v) on (f_c, f_{c+1}, f_e, f_{e+1}), c = e + d.
                const double n11 = m.i00 - 2.0 * m.i10 + m.i20;
                const double n12 = m.i10 - m.i20;
                const double n22 = m.i20;
                const double n33 = m.i00 - 2.0 * m.i01 + m.i02;
                const double n34 = m.i01 - m.i02;
                const double n44 = m.i02;
                const double n13 = -(m.i00 - m.i10 - m.i01 + m.i11);
                const double n14 = -(m.i01 - m.i11);
                const double n23 = -(m.i10 - m.i11);
                const double n24 = -m.i11;
                const long N = cells;
                const double t11 = mass[N] - mass[d];
                const double t22 = mass[N + 1] - mass[d + 1];
                const double t33 = mass[N - d];
                const double t44 = mass[N - d + 1] - mass[1];
                const double t12 = neighbour[N] - neighbour[d];
                const double t34 = neighbour[N - d];
                const double t13 = autocorr[d] - std::real(f[N] * std::conj(f[N - d]));
                const double t24 = autocorr[d] - std::real(f[d] * std::conj(f[0]));
                const double t14 = autocorr[d - 1] - std::real(f[d - 1] * std::conj(f[0])) -
                                   std::real(f[N] * std::conj(f[N - d + 1]));
                const double t23 = autocorr[d + 1];
                acc = n11 * t11 + n22 * t22 + n33 * t33 + n44 * t44 +
                      2.0 * (n12 * t12 + n13 * t13 + n14 * t14 + n23 * t23 + n24 * t24 + n34 * t34);
            }
            per_lag[d] = acc;
        }
    }
    // Fixed-order summation keeps the result independent of the thread count.
    double cross = 0.0;
    for (long d = 1; d < cells; ++d) cross += per_lag[d];
    return std::pow(h, 1.0 - 2.0 * s) * (same + 2.0 * cross);
}

namespace reference {

double picard_sweep(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p,
                    const SpinorPair& in, SpinorPair& out) {
    check_shapes(f, g, in);
    const std::size_t n = in.n;
    out = SpinorPair(n, in.extent);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!in.covers(i, j)) continue;
            // Row j between alpha_j and alpha_i.
            const std::size_t lo = std::min(i, j);
            const std::size_t hi = std::max(i, j);
            cplx row{}, col{};
            for (std::size_t k = lo; k <= hi; ++k) {
                const double w = (k == lo || k == hi) ? 0.5 : 1.0;
                row += w * rhs_psi(in.phi_at(k, j), in.psi_at(k, j), p);
                col += w * rhs_phi(in.psi_at(i, k), in.phi_at(i, k), p);
            }
            if (lo == hi) row = col = 0.0;
            const double sign = i >= j ? 1.0 : -1.0;
            out.psi_at(i, j) = f[j] + sign * 0.5 * h * row;
            out.phi_at(i, j) = g[i] + sign * 0.5 * h * col;
            worst = std::max(worst, std::abs(out.psi_at(i, j) - in.psi_at(i, j)));
            worst = std::max(worst, std::abs(out.phi_at(i, j) - in.phi_at(i, j)));
        }
    }
    return worst;
}

namespace {

// Joint Jacobi iteration on both unknowns of one cell.
void reference_cell(const CellInput& in, double c, const ModelParams& p, long i, long j, cplx& psi, cplx& phi) {
    const cplx fa = rhs_psi(in.phi_a, in.psi_a, p);
    const cplx gb = rhs_phi(in.psi_b, in.phi_b, p);
    psi = in.psi_a;
    phi = in.phi_b;
    for (int it = 0; it < 100; ++it) {
        const cplx psi_n = in.psi_a + c * (fa + rhs_psi(phi, psi, p));
        const cplx phi_n = in.phi_b + c * (gb + rhs_phi(psi, phi, p));
        const double delta = std::max(std::abs(psi_n - psi), std::abs(phi_n - phi));
        psi = psi_n;
        phi = phi_n;
        if (delta <= 1e-15 * std::max(1.0, std::abs(psi) + std::abs(phi))) return;
    }
    throw NumericalError(fmt::format("reference march: cell (i={}, j={}) did not settle", i, j));
}

}  // namespace

void march(double h, std::span<const cplx> f, std::span<const cplx> g, const ModelParams& p, SpinorPair& out) {
    check_shapes(f, g, out);
    const long n = static_cast<long>(out.n);
    for (long i = 0; i < n; ++i) {
        out.psi_at(i, i) = f[static_cast<std::size_t>(i)];
        out.phi_at(i, i) = g[static_cast<std::size_t>(i)];
    }
    const double c = 0.25 * h;
    // Column by column: column i needs column i - 1 (psi) and its own nodes nearer the diagonal (phi).
    for (long i = 1; i < n; ++i) {
        for (long j = i - 1; j >= 0; --j) {
            const CellInput in{out.psi_at(i - 1, j), out.phi_at(i - 1, j), out.psi_at(i, j + 1), out.phi_at(i, j + 1)};
            reference_cell(in, c, p, i, j, out.psi_at(i, j), out.phi_at(i, j));
        }
    }
    if (out.extent != Extent::full) return;
    for (long i = n - 2; i >= 0; --i) {
        for (long j = i + 1; j < n; ++j) {
            const CellInput in{out.psi_at(i + 1, j), out.phi_at(i + 1, j), out.psi_at(i, j - 1), out.phi_at(i, j - 1)};
            reference_cell(in, -c, p, i, j, out.psi_at(i, j), out.phi_at(i, j));
        }
    }
}

double gagliardo_seminorm_sq(std::span<const cplx> values, double h, double s) {
    check_order(s);
    const long count = static_cast<long>(values.size());
    if (count < 2) return 0.0;
    const long cells = count - 1;
    const cplx* f = values.data();
    double same = 0.0;
    for (long c = 0; c < cells; ++c) same += std::norm(f[c + 1] - f[c]);
    double cross = 0.0;
    for (long d = 1; d < cells; ++d) {
        const DiffForm form(lag_moments(d, s));
        for (long e = 0; e + d < cells; ++e) cross += form.pair(f, e + d, e);
    }
    return std::pow(h, 1.0 - 2.0 * s) * (same * same_cell_factor(s) + 2.0 * cross);
}

}  // namespace reference

}  // namespace thirring
