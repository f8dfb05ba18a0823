#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thirring/field.hpp"
#include "thirring/model.hpp"

namespace thirring {

enum class Scheme { picard, marching };

const char* scheme_name(Scheme s) noexcept;
Scheme parse_scheme(const std::string& name);

/// Default smallness constant: 0.1 / max(1, |lambda|).
double default_epsilon(double lambda) noexcept;

struct SolverConfig {
    Scheme scheme = Scheme::picard;
    double tol = 1e-12;          // sup-norm change between Picard iterates
    int max_iter = 200;
    double epsilon_small = 0.1;  // smallness threshold on ||f|| + ||g|| (warning only)
    Extent extent = Extent::forward;

    void validate() const;
};

struct LocalSolution {
    NullGrid grid;
    double center = 0.0;
    SpinorPair fields;
    std::vector<double> diffs;  // sup-norm change of each Picard sweep
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// Lab axis of the diagonal of `grid` for a diamond centred at `center`.
Axis diagonal_axis(const NullGrid& grid, double center = 0.0);

/// Grid whose diagonal carries exactly the samples of `data`.
NullGrid grid_for(const InitialData& data);

/// Free transport of the data: psi(i, j) = f_j, phi(i, j) = g_i.
SpinorPair transported(const InitialData& data, Extent extent);

/// One application of the characteristic integral map.
SpinorPair picard_step(const SpinorPair& fields, const InitialData& data, const ModelParams& params,
                       const NullGrid& grid);

/// Picard iteration from the transported data until the sup-norm change drops below config.tol.
/// Throws ConvergenceError when max_iter sweeps do not suffice. With config.scheme == marching
/// this forwards to solve_marching.
LocalSolution solve_local(const InitialData& data, const ModelParams& params, const NullGrid& grid,
                          const SolverConfig& config);

/// Anti-diagonal marching; the result satisfies the same discrete equations as the Picard fixed point.
LocalSolution solve_marching(const InitialData& data, const ModelParams& params, const NullGrid& grid,
                             Extent extent = Extent::forward);

enum class GlueMode { single, tiled };

struct GlueOptions {
    GlueMode mode = GlueMode::single;
    double tile_radius = 0.0;  // tiled mode; 0 picks 2T rounded up to the sample spacing
    bool both_directions = false;
};

struct GlueResult {
    double T = 0.0;
    double half_width = 0.0;          // output covers |x - centre| <= half_width = L - T
    std::vector<Slice> slices;        // every grid time in [-T or 0, T], ascending
    double overlap_mismatch = 0.0;    // max disagreement between tiles on shared nodes
    std::size_t tiles = 0;
    std::size_t tiles_solved = 0;
    double tile_radius = 0.0;
};

/// Lab-frame solution on [0, T] x [-(L - T), L - T] for data sampled on [-L, L] (L an integer
/// number of samples from the centre). Tiled mode solves overlapping diamonds centred at
/// x_j = j R and checks that they agree to 10 tol on every shared node.
GlueResult glue_solve(const InitialData& data, const ModelParams& params, double T, const SolverConfig& config,
                      const GlueOptions& options = {});

struct ConcentrationRadius {
    double radius = 0.0;      // largest admissible dyadic radius, 0 if none
    double window_mass = 0.0; // sup window mass at that radius
    bool underflow = false;   // even the smallest radius >= spacing failed
};

/// Largest r in {r_max 2^-k : r >= h} with sup_x int_{|x-y|<r} |f|^2 + |g|^2 < epsilon.
ConcentrationRadius concentration_radius(const InitialData& data, double epsilon, double r_max);

struct ContinuationConfig {
    double epsilon = 0.1;   // concentration threshold
    double r_max = 1.0;     // top of the dyadic radius family
    SolverConfig solver{.scheme = Scheme::marching};
};

struct ContinuationEntry {
    double t = 0.0;
    double step_radius = 0.0;
    double concentration_radius = 0.0;
    double window_mass = 0.0;
    double charge = 0.0;
    double half_width = 0.0;
};

struct ContinuationLog {
    std::vector<ContinuationEntry> entries;
    bool reached_target = false;
    bool concentration_suspected = false;
    std::string message;

    double min_step_radius() const;
};

using ContinuationObserver = std::function<void(const ContinuationEntry&, const InitialData&)>;

/// Repeated tiled solves with step radius R_j = min(r*/2, 1/(16|m|)) and time step R_j / 2.
/// The data window shrinks by the elapsed time (finite propagation speed), so the returned
/// state covers |x| <= L - t. A radius below 2h ends the run with concentration_suspected set;
/// the observer sees every state including the initial one.
ContinuationLog continue_globally(const InitialData& data, const ModelParams& params, double t_target,
                                  const ContinuationConfig& config, InitialData* final_state = nullptr,
                                  const ContinuationObserver& observer = {});

}  // namespace thirring
