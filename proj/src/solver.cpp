#include "thirring/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "thirring/kernels.hpp"
#include "thirring/norms.hpp"

namespace thirring {

const char* scheme_name(Scheme s) noexcept { return s == Scheme::picard ? "picard" : "marching"; }

Scheme parse_scheme(const std::string& name) {
    if (name == "picard") return Scheme::picard;
    if (name == "marching") return Scheme::marching;
    throw std::invalid_argument(fmt::format("unknown scheme '{}' (expected picard or marching)", name));
}

double default_epsilon(double lambda) noexcept { return 0.1 / std::max(1.0, std::abs(lambda)); }

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument(fmt::format("solver tol must be positive, got {}", tol));
    if (max_iter < 1) throw std::invalid_argument(fmt::format("solver max_iter must be >= 1, got {}", max_iter));
    if (!(epsilon_small > 0.0 && epsilon_small < 1.0)) {
        throw std::invalid_argument(fmt::format("epsilon_small must lie in (0, 1), got {}", epsilon_small));
    }
}

Axis diagonal_axis(const NullGrid& grid, double center) {
    return {center - grid.radius(), grid.spacing(), grid.size()};
}

NullGrid grid_for(const InitialData& data) {
    if (data.f.size() < 2) throw std::invalid_argument("grid_for: data needs at least 2 samples");
    return NullGrid(0.5 * data.axis.h * static_cast<double>(data.f.size() - 1), data.f.size());
}

namespace {

void check_match(const InitialData& data, const NullGrid& grid) {
    if (data.f.size() != grid.size() || data.g.size() != grid.size()) {
        throw std::invalid_argument(fmt::format("data has {} samples but the grid has {} nodes per axis",
                                                data.f.size(), grid.size()));
    }
    if (std::abs(data.axis.h - grid.spacing()) > 1e-9 * grid.spacing()) {
        throw std::invalid_argument(
            fmt::format("data spacing {} differs from grid spacing {}", data.axis.h, grid.spacing()));
    }
}

bool all_zero(const InitialData& d) {
    auto zero = [](const cplx& v) { return v == cplx{}; };
    return std::all_of(d.f.begin(), d.f.end(), zero) && std::all_of(d.g.begin(), d.g.end(), zero);
}

}  // namespace

SpinorPair transported(const InitialData& data, Extent extent) {
    const std::size_t n = data.f.size();
    SpinorPair u(n, extent);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!u.covers(i, j)) continue;
            u.psi_at(i, j) = data.f[j];
            u.phi_at(i, j) = data.g[i];
        }
    }
    return u;
}

SpinorPair picard_step(const SpinorPair& fields, const InitialData& data, const ModelParams& params,
                       const NullGrid& grid) {
    check_match(data, grid);
    SpinorPair out(fields.n, fields.extent);
    picard_sweep(grid.spacing(), data.f, data.g, params, fields, out);
    return out;
}

namespace {

std::vector<std::string> hypothesis_warnings(const InitialData& data, const ModelParams& params, const NullGrid& grid,
                                             const SolverConfig& config) {
    std::vector<std::string> w;
    if (params.m != 0.0 && grid.radius() >= 1.0 / (16.0 * std::abs(params.m))) {
        w.push_back(fmt::format("radius {} is not below 1/(16|m|) = {}; contraction is not guaranteed", grid.radius(),
                                1.0 / (16.0 * std::abs(params.m))));
    }
    const FunctionSample f(data.f, data.axis.x0, data.axis.h);
    const FunctionSample g(data.g, data.axis.x0, data.axis.h);
    const double size = lp_norm(f, 2.0) + lp_norm(g, 2.0);
    if (size >= config.epsilon_small) {
        w.push_back(fmt::format("||f|| + ||g|| = {} is not below epsilon = {}; contraction is not guaranteed", size,
                                config.epsilon_small));
    }
    return w;
}

}  // namespace

LocalSolution solve_local(const InitialData& data, const ModelParams& params, const NullGrid& grid,
                          const SolverConfig& config) {
    config.validate();
    check_match(data, grid);
    if (config.scheme == Scheme::marching) {
        LocalSolution sol = solve_marching(data, params, grid, config.extent);
        sol.warnings = hypothesis_warnings(data, params, grid, config);
        return sol;
    }
    LocalSolution sol{grid, data.axis.x0 + grid.radius(), transported(data, config.extent), {}, false, 0,
                      hypothesis_warnings(data, params, grid, config)};
    SpinorPair next(grid.size(), config.extent);
    for (int it = 1; it <= config.max_iter; ++it) {
        const double diff = picard_sweep(grid.spacing(), data.f, data.g, params, sol.fields, next);
        std::swap(sol.fields, next);
        sol.diffs.push_back(diff);
        sol.iterations = it;
        if (diff <= config.tol) {
            sol.converged = true;
            return sol;
        }
        if (!std::isfinite(diff)) break;
    }
    const std::size_t k = sol.diffs.size();
    const double ratio = k >= 2 ? sol.diffs[k - 1] / sol.diffs[k - 2] : std::numeric_limits<double>::quiet_NaN();
    throw ConvergenceError(
        fmt::format("Picard iteration did not reach tol {} in {} sweeps (last change {}, last contraction ratio {}); "
                    "data or radius too large",
                    config.tol, sol.iterations, k ? sol.diffs.back() : 0.0, ratio),
        sol.iterations, ratio);
}

LocalSolution solve_marching(const InitialData& data, const ModelParams& params, const NullGrid& grid, Extent extent) {
    check_match(data, grid);
    LocalSolution sol{grid, data.axis.x0 + grid.radius(), SpinorPair(grid.size(), extent), {}, false, 0, {}};
    march(grid.spacing(), data.f, data.g, params, sol.fields);
    sol.converged = true;
    sol.iterations = 1;
    return sol;
}

// ---------------------------------------------------------------------------

namespace {

long count_of(double length, double h, const char* what) {
    const double units = length / h;
    const double r = std::round(units);
    if (std::abs(units - r) > 1e-9 * std::max(1.0, units)) {
        throw std::invalid_argument(fmt::format("{} = {} is not a multiple of the spacing {}", what, length, h));
    }
    return static_cast<long>(r);
}

struct Stitch {
    double x0 = 0.0;  // first node of the output window for this slice
    std::vector<cplx> psi, phi;
    std::vector<char> filled;
};

}  // namespace

GlueResult glue_solve(const InitialData& data, const ModelParams& params, double T, const SolverConfig& config,
                      const GlueOptions& options) {
    config.validate();
    const std::size_t count = data.f.size();
    if (count < 3 || count % 2 == 0) throw std::invalid_argument("glue_solve: data needs an odd sample count");
    const double h = data.axis.h;
    const long half = static_cast<long>(count - 1) / 2;
    const double L = static_cast<double>(half) * h;
    const double center = data.axis.x0 + L;
    const long K = count_of(2.0 * T, h, "2T");
    if (K < 0 || K >= 2 * half) throw std::invalid_argument(fmt::format("glue_solve: need 0 <= T < L = {}, got {}", L, T));

    GlueResult res;
    res.T = T;
    res.half_width = L - T;
    const long k_lo = options.both_directions ? -K : 0;
    SolverConfig cfg = config;
    cfg.extent = options.both_directions ? Extent::full : Extent::forward;

    // Output window of slice k: nodes x = center - L + |k| h/2 + m h with |x - center| <= L - T.
    std::vector<Stitch> out;
    for (long k = k_lo; k <= K; ++k) {
        const long ak = std::labs(k);
        // Skip the (K - |k|)/2 nodes at each end that lie beyond L - T.
        const long skip = (K - ak + 1) / 2;
        const long n_k = 2 * half + 1 - ak - 2 * skip;
        Stitch s;
        s.x0 = center - L + 0.5 * h * static_cast<double>(ak) + static_cast<double>(skip) * h;
        s.psi.assign(static_cast<std::size_t>(n_k), cplx{});
        s.phi.assign(static_cast<std::size_t>(n_k), cplx{});
        s.filled.assign(static_cast<std::size_t>(n_k), 0);
        out.push_back(std::move(s));
    }

    auto absorb = [&](const SpinorPair& fields, const NullGrid& grid, double tile_center) {
        for (long k = k_lo; k <= K; ++k) {
            Stitch& s = out[static_cast<std::size_t>(k - k_lo)];
            const Slice sl = slice_at_offset(grid, fields, k, tile_center);
            for (std::size_t m = 0; m < sl.psi.size(); ++m) {
                const double pos = (sl.axis.x(m) - s.x0) / h;
                const long g = std::lround(pos);
                if (g < 0 || g >= static_cast<long>(s.psi.size())) continue;
                const auto gi = static_cast<std::size_t>(g);
                if (s.filled[gi]) {
                    res.overlap_mismatch = std::max(
                        {res.overlap_mismatch, std::abs(s.psi[gi] - sl.psi[m]), std::abs(s.phi[gi] - sl.phi[m])});
                } else {
                    s.psi[gi] = sl.psi[m];
                    s.phi[gi] = sl.phi[m];
                    s.filled[gi] = 1;
                }
            }
        }
    };

    if (options.mode == GlueMode::single) {
        const NullGrid grid(L, count);
        const LocalSolution sol = solve_local(data, params, grid, cfg);
        absorb(sol.fields, grid, center);
        res.tiles = res.tiles_solved = 1;
        res.tile_radius = L;
    } else {
        const double R = options.tile_radius > 0.0 ? options.tile_radius : std::ceil(2.0 * T / h - 1e-9) * h;
        const long rn = count_of(R, h, "tile radius");
        if (rn < 1 || rn > half) throw std::invalid_argument(fmt::format("tile radius {} must lie in [h, L]", R));
        if (K > rn) throw std::invalid_argument(fmt::format("tiled gluing needs T <= R/2 (T = {}, R = {})", T, R));
        res.tile_radius = R;
        std::vector<long> offsets;  // tile centres in units of h from the data centre
        const long reach = half - rn;
        for (long o = -(reach / rn) * rn; o <= reach; o += rn) offsets.push_back(o);
        if (offsets.back() != reach) {
            offsets.insert(offsets.begin(), -reach);
            offsets.push_back(reach);
        }
        const NullGrid grid(R, static_cast<std::size_t>(2 * rn + 1));
        for (long o : offsets) {
            const InitialData tile = restrict_data(data, static_cast<std::size_t>(half + o - rn),
                                                   static_cast<std::size_t>(2 * rn + 1));
            const double tile_center = center + static_cast<double>(o) * h;
            ++res.tiles;
            if (all_zero(tile)) {
                absorb(SpinorPair(grid.size(), cfg.extent), grid, tile_center);
                continue;
            }
            const LocalSolution sol = solve_local(tile, params, grid, cfg);
            absorb(sol.fields, grid, tile_center);
            ++res.tiles_solved;
        }
        if (res.overlap_mismatch > 10.0 * config.tol) {
            throw NumericalError(fmt::format(
                "glue_solve: overlapping diamonds disagree by {} (bound {}); uniqueness violated", res.overlap_mismatch,
                10.0 * config.tol));
        }
    }

    for (long k = k_lo; k <= K; ++k) {
        Stitch& s = out[static_cast<std::size_t>(k - k_lo)];
        if (std::find(s.filled.begin(), s.filled.end(), 0) != s.filled.end()) {
            throw NumericalError(fmt::format("glue_solve: slice k = {} not covered by the tiles", k));
        }
        Slice sl;
        sl.t = 0.5 * h * static_cast<double>(k);
        sl.axis = {s.x0, h, s.psi.size()};
        sl.psi = std::move(s.psi);
        sl.phi = std::move(s.phi);
        res.slices.push_back(std::move(sl));
    }
    return res;
}

ConcentrationRadius concentration_radius(const InitialData& data, double epsilon, double r_max) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("concentration_radius: epsilon must be positive");
    if (!(r_max > 0.0)) throw std::invalid_argument("concentration_radius: r_max must be positive");
    ConcentrationRadius out;
    for (double r = r_max; r >= data.axis.h * (1.0 - 1e-12); r *= 0.5) {
        const double mass = concentration_function(data.f, data.g, data.axis.h, r);
        if (mass < epsilon) {
            out.radius = r;
            out.window_mass = mass;
            return out;
        }
        out.window_mass = mass;
    }
    out.underflow = true;
    return out;
}

double ContinuationLog::min_step_radius() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) m = std::min(m, e.step_radius);
    return entries.empty() ? 0.0 : m;
}

ContinuationLog continue_globally(const InitialData& data, const ModelParams& params, double t_target,
                                  const ContinuationConfig& config, InitialData* final_state,
                                  const ContinuationObserver& observer) {
    if (!(t_target > 0.0)) throw std::invalid_argument("continue_globally: target time must be positive");
    ContinuationLog log;
    InitialData state = data;
    const double h = data.axis.h;
    const double cap = params.m != 0.0 ? 1.0 / (16.0 * std::abs(params.m)) : std::numeric_limits<double>::infinity();
    double t = 0.0;
    const double eps_t = 1e-9 * h;

    while (true) {
        const double L = 0.5 * h * static_cast<double>(state.f.size() - 1);
        ContinuationEntry e;
        e.t = t;
        e.charge = state.charge();
        e.half_width = L;
        if (t >= t_target - eps_t) {
            log.reached_target = true;
            if (observer) observer(e, state);
            break;
        }
        const ConcentrationRadius cr = concentration_radius(state, config.epsilon, config.r_max);
        e.concentration_radius = cr.radius;
        e.window_mass = cr.window_mass;
        double R = std::min({0.5 * cr.radius, cap, L});
        R = std::floor(R / h + 1e-9) * h;
        e.step_radius = R;
        if (observer) observer(e, state);
        if (cr.underflow || R < 2.0 * h) {
            log.entries.push_back(e);
            log.concentration_suspected = true;
            log.message = fmt::format(
                "CONCENTRATION-SUSPECTED at t = {}: step radius {} fell below 2h = {} (concentration radius {})", t, R,
                2.0 * h, cr.radius);
            break;
        }
        double T = std::min(0.5 * R, t_target - t);
        T = std::floor(T / h + 1e-9) * h;
        if (T < h) {
            log.message = fmt::format("remaining time {} is below the sample spacing", t_target - t);
            log.reached_target = true;
            break;
        }
        if (T >= L) {
            log.message = fmt::format("data window half-width {} exhausted at t = {}", L, t);
            break;
        }
        log.entries.push_back(e);
        const GlueResult glued = glue_solve(state, params, T, config.solver, {GlueMode::tiled, R, false});
        const Slice& last = glued.slices.back();
        InitialData next;
        next.axis = last.axis;
        next.f = last.psi;
        next.g = last.phi;
        next.spec = state.spec;
        state = std::move(next);
        t += T;
    }
    if (final_state) *final_state = std::move(state);
    return log;
}

}  // namespace thirring
