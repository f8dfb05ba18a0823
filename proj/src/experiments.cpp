#include "thirring/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/core.h>

#include "thirring/decomposition.hpp"
#include "thirring/norms.hpp"

namespace thirring {

using nlohmann::json;

Criterion at_most(std::string name, double value, double bound, std::string note) {
    Criterion c{std::move(name), value, -std::numeric_limits<double>::infinity(), bound, false, std::move(note)};
    c.pass = std::isfinite(value) && value <= bound;
    return c;
}

Criterion within(std::string name, double value, double lo, double hi, std::string note) {
    Criterion c{std::move(name), value, lo, hi, false, std::move(note)};
    c.pass = std::isfinite(value) && value >= lo && value <= hi;
    return c;
}

bool StudyOutput::pass() const {
    return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json StudyOutput::verdict() const {
    json list = json::array();
    for (const Criterion& c : criteria) {
        json j{{"name", c.name}, {"value", finite_or_null(c.value)}, {"verdict", c.pass ? "PASS" : "FAIL"}};
        if (std::isfinite(c.lo)) j["lo"] = c.lo;
        if (std::isfinite(c.hi)) j["hi"] = c.hi;
        if (!c.note.empty()) j["note"] = c.note;
        list.push_back(std::move(j));
    }
    return {{"study", name}, {"verdict", pass() ? "PASS" : "FAIL"}, {"criteria", list}, {"details", details}};
}

double Baseline::get(const std::string& key) const {
    const auto it = constants.find(key);
    if (it == constants.end()) throw ConfigError(fmt::format("baseline has no constant '{}'; run `study calibrate`", key));
    return it->second;
}

Baseline Baseline::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open baseline '{}'", path.string()));
    Baseline b;
    try {
        const json j = json::parse(in);
        for (const auto& [key, value] : j.at("constants").items()) b.constants[key] = value.get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("baseline '{}': {}", path.string(), e.what()));
    }
    return b;
}

void Baseline::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write baseline '{}'", path.string()));
    json j{{"slack", 2.0}, {"constants", constants}};
    out << j.dump(2) << '\n';
}

std::filesystem::path default_baseline_path() { return THIRRING_BASELINE; }

const std::vector<std::string>& study_names() {
    static const std::vector<std::string> names{"convergence", "conservation", "contraction",    "decomposition",
                                                "boundedness", "scaling",      "reversal",       "gluing",
                                                "lipschitz",   "rough_longtime", "inequalities", "calibrate"};
    return names;
}

namespace {

GaussianProfile unit_charge_gaussian(double width, double center) {
    return {1.0 / std::sqrt(width * std::sqrt(std::numbers::pi / 2.0)), width, center, 0.0};
}

StudySpec base(const std::string& name) {
    StudySpec s;
    s.name = name;
    s.data = {GaussianProfile{1.0, 0.3, -0.2, 0.0}, GaussianProfile{1.0, 0.3, 0.2, 0.0}};
    s.params = {0.0, 1.0};
    s.ladder = {129, 257, 513};
    return s;
}

}  // namespace

StudySpec default_spec(const std::string& name) {
    StudySpec s = base(name);
    if (name == "convergence") {
        // R = 1: h = 1/64, 1/128, 1/256.
    } else if (name == "conservation") {
        s.data = {GaussianProfile{0.4, 0.15, -0.2, 0.0}, GaussianProfile{0.4, 0.15, 0.2, 0.0}};
        s.params = {1.0, 0.5};
        // 2T / h is an integer on every rung: h = 0.04, 0.02, 0.01.
        s.radius = 2.56;
        s.T = 1.0;
        s.solver.scheme = Scheme::marching;
    } else if (name == "contraction") {
        // ||f||_2 = ||g||_2 = 0.025.
        const double w = 0.1;
        const double amp = 0.025 / std::sqrt(w * std::sqrt(std::numbers::pi / 2.0));
        s.data = {GaussianProfile{amp, w, -0.1, 0.0}, GaussianProfile{amp, w, 0.1, 0.0}};
        s.params = {0.1, 1.0};
        s.radius = 0.5;
        s.ladder = {129};
        s.solver.max_iter = 30;
    } else if (name == "decomposition") {
        s.data = {GaussianProfile{1.0, 0.3, -0.2, 1.0}, GaussianProfile{0.8, 0.3, 0.2, 0.0}};
        s.params = {1.0, 1.0};
        s.solver.scheme = Scheme::marching;
    } else if (name == "boundedness") {
        const StressSpec d;
        s.data = {BoxFamilyProfile{1.0, d.box_center}, d.g};
        s.params = d.params;
        s.radius = d.radius;
        s.ladder = {d.n};
        s.sweep = d.widths;
        s.solver.scheme = Scheme::marching;
    } else if (name == "scaling") {
        s.data = {GaussianProfile{1.0, 0.3, -0.2, 1.0}, GaussianProfile{0.8, 0.3, 0.2, 0.0}};
        s.params = {1.0, 1.0};
        s.ladder = {65, 129, 257};
        s.sweep = {0.5, 2.0};
        s.solver.scheme = Scheme::marching;
    } else if (name == "reversal") {
        s.data = {GaussianProfile{1.0, 0.3, -0.2, 1.0}, GaussianProfile{0.8, 0.3, 0.2, 0.0}};
        s.params = {0.5, 1.0};
        s.ladder = {65, 129, 257};
        s.solver.scheme = Scheme::marching;
    } else if (name == "gluing") {
        s.data = {GaussianProfile{0.5, 0.3, -0.3, 1.0}, GaussianProfile{0.5, 0.3, 0.3, 0.0}};
        s.params = {0.5, 1.0};
        s.radius = 2.0;
        s.ladder = {257};
        s.T = 0.5;
        s.sweep = {1.0};  // tile radius
    } else if (name == "lipschitz") {
        s.data = {GaussianProfile{0.3, 0.3, -0.2, 0.0}, GaussianProfile{0.3, 0.3, 0.2, 0.0}};
        s.params = {0.1, 1.0};
        s.ladder = {257};
        s.sweep = {1e-2, 1e-3, 1e-4};
        s.seed = 11;
        s.solver.scheme = Scheme::marching;
    } else if (name == "rough_longtime") {
        s.data = {BoxProfile{1.0, 0.0, 1.0}, ZeroProfile{}};
        s.params = {1.0, 1.0};
        s.radius = 22.0;
        s.ladder = {2 * 22 * 512 + 1};
        s.T = 10.0;
        s.epsilon = 0.1;
        s.r_max = 0.75;
        s.s = 0.1;
        s.solver.scheme = Scheme::marching;
    } else if (name == "inequalities") {
        s.s = 0.25;
        s.seed = 7;
    } else if (name == "calibrate") {
    } else {
        throw ConfigError(fmt::format("unknown study '{}'", name));
    }
    return s;
}

StudySpec gaussian_longtime_spec() {
    StudySpec s = default_spec("rough_longtime");
    s.data = {unit_charge_gaussian(2.0, 0.0), ZeroProfile{}};
    s.radius = 28.0;
    s.ladder = {2 * 28 * 256 + 1};
    s.r_max = 1.0;
    return s;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
    if (h.size() != err.size() || h.size() < 2) throw std::invalid_argument("fit_order: need matching sizes >= 2");
    const std::size_t n = h.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += std::log(h[k]);
        my += std::log(err[k]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = std::log(h[k]) - mx;
        sxy += dx * (std::log(err[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace {

struct Run {
    NullGrid grid;
    InitialData data;
    LocalSolution sol;
};

Run run_on(const DataSpec& ds, const ModelParams& p, double radius, std::size_t n, SolverConfig cfg,
           Extent extent = Extent::forward) {
    NullGrid grid(radius, n);
    InitialData data = generate_data(ds, diagonal_axis(grid));
    cfg.extent = extent;
    LocalSolution sol = solve_local(data, p, grid, cfg);
    return {grid, std::move(data), std::move(sol)};
}

void require_ladder(const StudySpec& spec, std::size_t min_rungs) {
    if (spec.ladder.size() < min_rungs) {
        throw ConfigError(fmt::format("study {} needs a ladder of at least {} grids", spec.name, min_rungs));
    }
}

Criterion order_criterion(const std::string& what, const std::vector<double>& h, const std::vector<double>& e) {
    if (std::any_of(e.begin(), e.end(), [](double v) { return !(v > 0.0); })) {
        return within(what + " order", std::numeric_limits<double>::quiet_NaN(), 1.7, 2.3, "non-positive error");
    }
    return within(what + " order", fit_order(h, e), 1.7, 2.3);
}

// Criterion value <= C h^2 against a frozen constant, or a failing entry if the constant is missing.
Criterion baseline_bound(const std::string& what, const Baseline& b, const std::string& key, double value, double h) {
    if (!b.has(key)) {
        return {what, value, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN(), false,
                fmt::format("no baseline constant '{}'", key)};
    }
    return at_most(what, value, b.get(key) * h * h, fmt::format("{} = {} times h^2", key, b.get(key)));
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------

StudyOutput convergence_study(const StudySpec& spec) {
    StudyOutput out;
    out.name = "convergence";
    const bool oracle = spec.params.m == 0.0;
    require_ladder(spec, oracle ? 3 : 4);
    std::vector<double> hs, errs;

    if (oracle) {
        const Profile f(spec.data.f), g(spec.data.g);
        out.columns = {"n", "h", "sup_error", "transport_error"};
        double worst_transport = 0.0;
        for (std::size_t n : spec.ladder) {
            const Run r = run_on(spec.data, spec.params, spec.radius, n, spec.solver);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const auto [psi, phi] = massless_exact(f, g, spec.params, r.grid.lab_point(i, j));
                    err = std::max({err, std::abs(r.sol.fields.psi_at(i, j) - psi),
                                    std::abs(r.sol.fields.phi_at(i, j) - phi)});
                }
            }
            // Pure transport: the scheme must reproduce f(beta), g(alpha) exactly.
            const Run free = run_on(spec.data, {0.0, 0.0}, spec.radius, n, spec.solver);
            double terr = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    terr = std::max({terr, std::abs(free.sol.fields.psi_at(i, j) - f(r.grid.beta(j))),
                                     std::abs(free.sol.fields.phi_at(i, j) - g(r.grid.alpha(i)))});
                }
            }
            worst_transport = std::max(worst_transport, terr);
            hs.push_back(r.grid.spacing());
            errs.push_back(err);
            out.rows.push_back({static_cast<double>(n), r.grid.spacing(), err, terr});
        }
        out.criteria.push_back(order_criterion("oracle error", hs, errs));
        out.criteria.push_back(at_most("transport error (m = lambda = 0)", worst_transport, 1e-13));
        out.details["mode"] = "oracle";
    } else {
        // Self-convergence: differences between consecutive rungs on the coarse nodes.
        out.columns = {"n", "h", "sup_difference_to_next"};
        std::vector<Run> runs;
        for (std::size_t n : spec.ladder) runs.push_back(run_on(spec.data, spec.params, spec.radius, n, spec.solver));
        for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
            const std::size_t n = spec.ladder[k];
            if (spec.ladder[k + 1] != 2 * n - 1) {
                throw ConfigError(fmt::format("Richardson ladder must halve h: {} is not followed by {}", n, 2 * n - 1));
            }
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    d = std::max({d, std::abs(runs[k].sol.fields.psi_at(i, j) - runs[k + 1].sol.fields.psi_at(2 * i, 2 * j)),
                                  std::abs(runs[k].sol.fields.phi_at(i, j) - runs[k + 1].sol.fields.phi_at(2 * i, 2 * j))});
                }
            }
            hs.push_back(runs[k].grid.spacing());
            errs.push_back(d);
            out.rows.push_back({static_cast<double>(n), runs[k].grid.spacing(), d});
        }
        out.criteria.push_back(order_criterion("self-convergence", hs, errs));
        out.details["mode"] = "richardson";
    }
    return out;
}

namespace {

// Max relative charge drift over the slices 0 <= t <= T.
double charge_drift(const Run& r, double T) {
    const double q0 = r.data.charge();
    long kmax = 0;
    if (!r.grid.slice_offset(T, kmax)) throw ConfigError(fmt::format("T = {} is not a grid time", T));
    double worst = 0.0;
    for (long k = 0; k <= kmax; ++k) {
        const double q = charge(slice_at_offset(r.grid, r.sol.fields, k));
        worst = std::max(worst, q0 > 0.0 ? std::abs(q - q0) / q0 : std::abs(q - q0));
    }
    return worst;
}

}  // namespace

StudyOutput conservation_study(const StudySpec& spec, const Baseline& baseline) {
    require_ladder(spec, 3);
    StudyOutput out;
    out.name = "conservation";
    out.columns = {"n", "h", "relative_drift", "drift_over_h2"};
    std::vector<double> drifts;
    double c_measured = 0.0;
    for (std::size_t n : spec.ladder) {
        const Run r = run_on(spec.data, spec.params, spec.radius, n, spec.solver);
        const double h = r.grid.spacing();
        const double d = charge_drift(r, spec.T);
        drifts.push_back(d);
        c_measured = std::max(c_measured, d / (h * h));
        out.rows.push_back({static_cast<double>(n), h, d, d / (h * h)});
        out.criteria.push_back(baseline_bound(fmt::format("drift at n = {}", n), baseline, "conservation.C", d, h));
        if (n == 257) out.criteria.push_back(at_most("drift at n = 257", d, 1e-5));
    }
    for (std::size_t k = 0; k + 1 < drifts.size(); ++k) {
        out.criteria.push_back(at_most(fmt::format("drift ratio n = {} / n = {}", spec.ladder[k + 1], spec.ladder[k]),
                                       drifts[k + 1] / drifts[k], 1.0 / 3.0));
    }
    const Run zero = run_on({}, spec.params, spec.radius, spec.ladder.front(), spec.solver);
    out.criteria.push_back(at_most("zero data drift", charge_drift(zero, spec.T), 0.0));
    out.details["constants"] = {{"conservation.C", c_measured}};
    out.details["T"] = spec.T;
    return out;
}

StudyOutput contraction_study(const StudySpec& spec) {
    require_ladder(spec, 1);
    StudyOutput out;
    out.name = "contraction";
    out.columns = {"iteration", "sup_change", "ratio"};
    SolverConfig cfg = spec.solver;
    cfg.scheme = Scheme::picard;
    const NullGrid grid(spec.radius, spec.ladder.front());
    const InitialData data = generate_data(spec.data, diagonal_axis(grid));
    const FunctionSample f(data.f, data.axis.x0, data.axis.h), g(data.g, data.axis.x0, data.axis.h);
    const double size = lp_norm(f, 2.0) + lp_norm(g, 2.0);
    int iterations = -1;
    std::vector<double> diffs;
    try {
        const LocalSolution sol = solve_local(data, spec.params, grid, cfg);
        iterations = sol.iterations;
        diffs = sol.diffs;
    } catch (const ConvergenceError& e) {
        out.details["error"] = e.what();
    }
    double worst_ratio = 0.0;
    bool monotone = !diffs.empty();
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        const double ratio = k ? diffs[k] / diffs[k - 1] : std::numeric_limits<double>::quiet_NaN();
        if (k) {
            worst_ratio = std::max(worst_ratio, ratio);
            monotone = monotone && diffs[k] < diffs[k - 1];
        }
        out.rows.push_back({static_cast<double>(k + 1), diffs[k], ratio});
    }
    const double cap = spec.params.m != 0.0 ? 1.0 / (16.0 * std::abs(spec.params.m)) : std::numeric_limits<double>::infinity();
    out.criteria.push_back(within("||f||_2 + ||g||_2", size, 0.0, 0.05 * (1.0 + 1e-9)));
    out.criteria.push_back(at_most("R below 1/(16|m|)", grid.radius(), std::nextafter(cap, 0.0)));
    out.criteria.push_back(within("iterations", iterations, 1.0, 30.0));
    out.criteria.push_back(at_most("monotone sup changes", monotone ? 0.0 : 1.0, 0.0));
    out.criteria.push_back(at_most("largest contraction ratio", diffs.size() > 1 ? worst_ratio : 0.0,
                                   std::nextafter(1.0, 0.0)));
    return out;
}

StudyOutput decomposition_study(const StudySpec& spec, const Baseline& baseline) {
    require_ladder(spec, 3);
    StudyOutput out;
    out.name = "decomposition";
    out.columns = {"n", "h", "residual_sum", "mass1_sup", "mass1_l2", "modulus_error", "transport_derivative", "linf_N"};
    std::vector<double> hs, res, mass;
    double c_res = 0.0, c_mass = 0.0;
    double worst_modulus = 0.0, worst_transport = 0.0;
    for (std::size_t n : spec.ladder) {
        const Run r = run_on(spec.data, spec.params, spec.radius, n, spec.solver);
        DecompositionResult d = delgado_split(r.sol.fields, r.data, spec.params, r.grid);
        const Mass1Report m1 = verify_mass1(d, r.sol.fields, spec.params, r.grid);
        // Discrete derivative of |psi_L|^2 along beta-rows and |phi_L|^2 along alpha-columns.
        double tr = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                tr = std::max({tr, std::abs(std::norm(d.linear.psi_at(i, j)) - std::norm(d.linear.psi_at(i - 1, j))),
                               std::abs(std::norm(d.linear.phi_at(i, j)) - std::norm(d.linear.phi_at(i, j + 1)))});
            }
        }
        const double h = r.grid.spacing();
        hs.push_back(h);
        res.push_back(d.residual_sum);
        mass.push_back(m1.sup_residual);
        c_res = std::max(c_res, d.residual_sum / (h * h));
        c_mass = std::max(c_mass, m1.sup_residual / (h * h));
        worst_modulus = std::max(worst_modulus, d.modulus_error);
        worst_transport = std::max(worst_transport, tr);
        out.rows.push_back({static_cast<double>(n), h, d.residual_sum, m1.sup_residual, m1.l2_residual, d.modulus_error,
                            tr, d.linf_N});
        out.criteria.push_back(
            baseline_bound(fmt::format("residual at n = {}", n), baseline, "decomposition.residual_C", d.residual_sum, h));
        out.criteria.push_back(
            baseline_bound(fmt::format("mass1 at n = {}", n), baseline, "decomposition.mass1_C", m1.sup_residual, h));
    }
    out.criteria.push_back(at_most("| |psi_L| - |f| |, | |phi_L| - |g| |", worst_modulus, 1e-12));
    out.criteria.push_back(at_most("characteristic derivative of |psi_L|^2, |phi_L|^2", worst_transport, 1e-12));
    out.criteria.push_back(order_criterion("decomposition residual", hs, res));
    out.criteria.push_back(order_criterion("mass1 residual", hs, mass));

    // m = 0: the N parts have no source and must vanish identically.
    const ModelParams massless{0.0, spec.params.lambda};
    const Run r0 = run_on(spec.data, massless, spec.radius, spec.ladder.front(), spec.solver);
    const DecompositionResult d0 = delgado_split(r0.sol.fields, r0.data, massless, r0.grid);
    double n_max = 0.0;
    for (std::size_t k = 0; k < d0.remainder.psi.size(); ++k) {
        n_max = std::max({n_max, std::abs(d0.remainder.psi[k]), std::abs(d0.remainder.phi[k])});
    }
    out.criteria.push_back(at_most("N parts with m = 0", n_max, 0.0));
    out.details["constants"] = {{"decomposition.residual_C", c_res}, {"decomposition.mass1_C", c_mass}};
    return out;
}

StudyOutput boundedness_study(const StudySpec& spec) {
    require_ladder(spec, 1);
    StressSpec ss;
    ss.params = spec.params;
    ss.widths = spec.sweep;
    ss.radius = spec.radius;
    ss.n = spec.ladder.front();
    if (const auto* box = std::get_if<BoxFamilyProfile>(&spec.data.f)) ss.box_center = box->center;
    if (const auto* g = std::get_if<GaussianProfile>(&spec.data.g)) ss.g = *g;
    const std::vector<StressRow> rows = boundedness_stress(ss);

    StudyOutput out;
    out.name = "boundedness";
    out.columns = {"w", "sup_f", "max_linf_psi_N", "charge", "ratio"};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double q_lo = lo, q_hi = 0.0;
    for (const StressRow& r : rows) {
        out.rows.push_back({r.width, r.sup_f, r.linf_psi_N, r.charge, r.ratio});
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
        q_lo = std::min(q_lo, r.charge);
        q_hi = std::max(q_hi, r.charge);
    }
    out.criteria.push_back(at_most("max/min of max_t ||psi_N||_inf / charge", hi / lo, std::nextafter(2.0, 0.0)));
    out.criteria.push_back(at_most("relative charge spread", (q_hi - q_lo) / q_lo, 1e-12));
    if (!rows.empty()) {
        const double growth = rows.back().sup_f / rows.front().sup_f;
        const double expected = std::sqrt(rows.front().width / rows.back().width);
        out.criteria.push_back(within("sup|f| growth", growth, expected * (1.0 - 1e-12), expected * (1.0 + 1e-12)));
    }
    return out;
}

namespace {

// tau^{1/2} f(tau x) for the generated profile kinds that are closed under dilation.
ProfileSpec dilate(const ProfileSpec& p, double tau) {
    const double st = std::sqrt(tau);
    if (std::holds_alternative<ZeroProfile>(p)) return p;
    if (const auto* gp = std::get_if<GaussianProfile>(&p)) {
        return GaussianProfile{gp->amplitude * st, gp->width / tau, gp->center / tau, gp->velocity * tau};
    }
    if (const auto* b = std::get_if<BoxProfile>(&p)) return BoxProfile{b->height * st, b->lo / tau, b->hi / tau};
    throw ConfigError(fmt::format("scaling study: profile kind '{}' is not supported", profile_kind(p)));
}

// sup over nodes of run b (radius R/tau) landing on nodes of run a (radius R) of
// |tau^{1/2} u_a(tau alpha, tau beta) - u_b(alpha, beta)|; both runs share the spacing.
double scaling_difference(const Run& a, const Run& b, double tau) {
    const double st = std::sqrt(tau);
    double worst = 0.0;
    const std::size_t nb = b.grid.size();
    for (std::size_t i = 0; i < nb; ++i) {
        const double ti = tau * static_cast<double>(i);
        if (std::abs(ti - std::round(ti)) > 1e-9) continue;
        for (std::size_t j = 0; j <= i; ++j) {
            const double tj = tau * static_cast<double>(j);
            if (std::abs(tj - std::round(tj)) > 1e-9) continue;
            const auto I = static_cast<std::size_t>(std::lround(ti));
            const auto J = static_cast<std::size_t>(std::lround(tj));
            worst = std::max({worst, std::abs(st * a.sol.fields.psi_at(I, J) - b.sol.fields.psi_at(i, j)),
                              std::abs(st * a.sol.fields.phi_at(I, J) - b.sol.fields.phi_at(i, j))});
        }
    }
    return worst;
}

std::size_t nodes_for(double radius, double h) {
    const double units = 2.0 * radius / h;
    if (std::abs(units - std::round(units)) > 1e-9 * units) {
        throw ConfigError(fmt::format("radius {} is not a multiple of the spacing {}", radius, h));
    }
    return static_cast<std::size_t>(std::lround(units)) + 1;
}

}  // namespace

StudyOutput scaling_study(const StudySpec& spec, const Baseline& baseline) {
    require_ladder(spec, 3);
    StudyOutput out;
    out.name = "scaling";
    out.columns = {"tau", "n", "h", "sup_difference", "difference_over_h2", "transport_difference"};
    json constants = json::object();
    for (double tau : spec.sweep) {
        if (!(tau > 0.0)) throw ConfigError(fmt::format("scaling factor {} must be positive", tau));
        const DataSpec scaled{dilate(spec.data.f, tau), dilate(spec.data.g, tau)};
        const ModelParams scaled_params{tau * spec.params.m, spec.params.lambda};
        const std::string key = fmt::format("scaling.C_tau{}", tau);
        std::vector<double> hs, diffs;
        double c = 0.0;
        for (std::size_t n : spec.ladder) {
            const Run a = run_on(spec.data, spec.params, spec.radius, n, spec.solver);
            const double h = a.grid.spacing();
            const Run b = run_on(scaled, scaled_params, spec.radius / tau, nodes_for(spec.radius / tau, h), spec.solver);
            const double d = scaling_difference(a, b, tau);
            // lambda = m = 0: both runs are pure transport and agree to rounding.
            const Run a0 = run_on(spec.data, {}, spec.radius, n, spec.solver);
            const Run b0 = run_on(scaled, {}, spec.radius / tau, b.grid.size(), spec.solver);
            const double d0 = scaling_difference(a0, b0, tau);
            hs.push_back(h);
            diffs.push_back(d);
            c = std::max(c, d / (h * h));
            out.rows.push_back({tau, static_cast<double>(n), h, d, d / (h * h), d0});
            out.criteria.push_back(baseline_bound(fmt::format("tau = {} at n = {}", tau, n), baseline, key, d, h));
            out.criteria.push_back(at_most(fmt::format("tau = {} at n = {}, lambda = m = 0", tau, n), d0, 1e-13));
        }
        out.criteria.push_back(order_criterion(fmt::format("tau = {} agreement", tau), hs, diffs));
        constants[key] = c;
    }
    out.details["constants"] = constants;
    return out;
}

namespace {

// |psi'(i, j) - phi(j, i)| and |phi'(i, j) - psi(j, i)| over the forward half, where (psi', phi')
// is the forward solve of the swapped data with (-m, -lambda) and (psi, phi) the full-square solve.
double reversal_difference(const StudySpec& spec, std::size_t n, const ModelParams& p, double* h_out) {
    const Run full = run_on(spec.data, p, spec.radius, n, spec.solver, Extent::full);
    const Run rev = run_on({spec.data.g, spec.data.f}, {-p.m, -p.lambda}, spec.radius, n, spec.solver);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            d = std::max({d, std::abs(rev.sol.fields.psi_at(i, j) - full.sol.fields.phi_at(j, i)),
                          std::abs(rev.sol.fields.phi_at(i, j) - full.sol.fields.psi_at(j, i))});
        }
    }
    if (h_out) *h_out = full.grid.spacing();
    return d;
}

}  // namespace

StudyOutput reversal_study(const StudySpec& spec) {
    require_ladder(spec, 3);
    StudyOutput out;
    out.name = "reversal";
    out.columns = {"n", "h", "sup_difference", "transport_difference"};
    // The trapezoidal equations are mapped onto each other by the swap, so the two solves agree
    // to rounding; 1e-13 is far below any C h^2 on these grids.
    for (std::size_t n : spec.ladder) {
        double h = 0.0;
        const double d = reversal_difference(spec, n, spec.params, &h);
        const double d0 = reversal_difference(spec, n, {}, nullptr);
        out.rows.push_back({static_cast<double>(n), h, d, d0});
        out.criteria.push_back(at_most(fmt::format("reversal at n = {}", n), d, 1e-13));
        out.criteria.push_back(at_most(fmt::format("reversal at n = {}, lambda = m = 0", n), d0, 1e-13));
    }
    return out;
}

StudyOutput gluing_study(const StudySpec& spec) {
    require_ladder(spec, 1);
    StudyOutput out;
    out.name = "gluing";
    out.columns = {"t", "single_vs_tiled"};
    const NullGrid grid(spec.radius, spec.ladder.front());
    const InitialData data = generate_data(spec.data, diagonal_axis(grid));
    const double tile = spec.sweep.empty() ? 0.0 : spec.sweep.front();
    const GlueResult single = glue_solve(data, spec.params, spec.T, spec.solver, {GlueMode::single});
    const GlueResult tiled = glue_solve(data, spec.params, spec.T, spec.solver, {GlueMode::tiled, tile});
    double worst = 0.0;
    for (std::size_t k = 0; k < single.slices.size(); ++k) {
        const Slice& a = single.slices[k];
        const Slice& b = tiled.slices[k];
        const double d = std::max(max_abs_diff(a.psi, b.psi), max_abs_diff(a.phi, b.phi));
        worst = std::max(worst, d);
        out.rows.push_back({a.t, d});
    }
    const double bound = 10.0 * spec.solver.tol;
    out.criteria.push_back(at_most("single vs tiled", worst, bound));
    out.criteria.push_back(at_most("overlap mismatch between tiles", tiled.overlap_mismatch, bound));

    // t = 0 slice is the data itself.
    const Slice& s0 = tiled.slices.front();
    const auto first = static_cast<std::size_t>(std::lround((s0.axis.x0 - data.axis.x0) / data.axis.h));
    double d0 = 0.0;
    for (std::size_t m = 0; m < s0.psi.size(); ++m) {
        d0 = std::max({d0, std::abs(s0.psi[m] - data.f[first + m]), std::abs(s0.phi[m] - data.g[first + m])});
    }
    out.criteria.push_back(at_most("t = 0 slice vs data", d0, 0.0));

    // Finite propagation speed: box data on [-1, 1] leaves |x| > 1 + T untouched.
    const InitialData boxed = generate_data({BoxProfile{0.5, -1.0, 1.0}, BoxProfile{0.5, -1.0, 1.0}}, diagonal_axis(grid));
    const GlueResult gb = glue_solve(boxed, spec.params, spec.T, spec.solver, {GlueMode::tiled, tile});
    double outside = 0.0;
    for (const Slice& s : gb.slices) {
        for (std::size_t m = 0; m < s.psi.size(); ++m) {
            if (std::abs(s.axis.x(m)) > 1.0 + spec.T + 1e-12) {
                outside = std::max({outside, std::abs(s.psi[m]), std::abs(s.phi[m])});
            }
        }
    }
    out.criteria.push_back(at_most("field outside the domain of influence", outside, 0.0));
    out.details["tiles"] = tiled.tiles;
    out.details["tiles_solved"] = tiled.tiles_solved;
    out.details["tile_radius"] = tiled.tile_radius;
    return out;
}

namespace {

// Seeded smooth direction: a few complex Gaussian bumps per component, unit discrete L2 norm jointly.
std::pair<std::vector<cplx>, std::vector<cplx>> perturbation(const Axis& axis, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> df(axis.count), dg(axis.count);
    const double mid = 0.5 * (axis.x0 + axis.back());
    const double half = 0.5 * (axis.back() - axis.x0);
    for (auto* v : {&df, &dg}) {
        for (int b = 0; b < 4; ++b) {
            const cplx c{u(rng), u(rng)};
            const double center = mid + 0.5 * half * u(rng);
            const double width = 0.1 * half * (1.5 + u(rng));
            for (std::size_t k = 0; k < axis.count; ++k) {
                const double z = (axis.x(k) - center) / width;
                (*v)[k] += c * std::exp(-z * z);
            }
        }
    }
    const double norm = std::sqrt(charge(df, dg, axis.h));
    for (std::size_t k = 0; k < axis.count; ++k) {
        df[k] /= norm;
        dg[k] /= norm;
    }
    return {df, dg};
}

// max over forward slices of the L2 norm of the difference of two solutions.
double slice_l2_sup(const NullGrid& grid, const SpinorPair& a, const SpinorPair& b) {
    const std::size_t n = grid.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<cplx> dp, dq;
        for (std::size_t j = 0; j + k < n; ++j) {
            dp.push_back(a.psi_at(j + k, j) - b.psi_at(j + k, j));
            dq.push_back(a.phi_at(j + k, j) - b.phi_at(j + k, j));
        }
        worst = std::max(worst, dp.size() > 1 ? std::sqrt(charge(dp, dq, grid.spacing())) : 0.0);
    }
    return worst;
}

}  // namespace

StudyOutput lipschitz_study(const StudySpec& spec) {
    require_ladder(spec, 1);
    StudyOutput out;
    out.name = "lipschitz";
    out.columns = {"delta_fraction", "data_difference", "solution_difference", "ratio", "transport_ratio"};
    const NullGrid grid(spec.radius, spec.ladder.front());
    const InitialData data = generate_data(spec.data, diagonal_axis(grid));
    const double size = std::sqrt(data.charge());
    const auto [df, dg] = perturbation(data.axis, spec.seed);
    const LocalSolution base = solve_local(data, spec.params, grid, spec.solver);
    const LocalSolution base0 = solve_local(data, {}, grid, spec.solver);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, worst_transport = 0.0;
    for (double frac : spec.sweep) {
        if (!(frac > 0.0)) continue;  // zero perturbation: ratio undefined
        InitialData pert = data;
        const double delta = frac * size;
        for (std::size_t k = 0; k < pert.f.size(); ++k) {
            pert.f[k] += delta * df[k];
            pert.g[k] += delta * dg[k];
        }
        std::vector<cplx> ddf(pert.f.size()), ddg(pert.f.size());
        for (std::size_t k = 0; k < pert.f.size(); ++k) {
            ddf[k] = pert.f[k] - data.f[k];
            ddg[k] = pert.g[k] - data.g[k];
        }
        const double dnorm = std::sqrt(charge(ddf, ddg, data.axis.h));
        const LocalSolution sol = solve_local(pert, spec.params, grid, spec.solver);
        const double diff = slice_l2_sup(grid, base.fields, sol.fields);
        const LocalSolution sol0 = solve_local(pert, {}, grid, spec.solver);
        const double ratio0 = slice_l2_sup(grid, base0.fields, sol0.fields) / dnorm;
        const double ratio = diff / dnorm;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        worst_transport = std::max(worst_transport, std::abs(ratio0 - 1.0));
        out.rows.push_back({frac, dnorm, diff, ratio, ratio0});
    }
    out.criteria.push_back(at_most("max/min Lipschitz ratio", hi / lo, std::nextafter(2.0, 0.0)));
    out.criteria.push_back(at_most("|ratio - 1| for lambda = m = 0", worst_transport, 1e-9));
    out.details["lipschitz_constant"] = hi;
    return out;
}

StudyOutput rough_longtime_study(const StudySpec& spec, const Baseline& baseline) {
    require_ladder(spec, 1);
    StudyOutput out;
    out.name = "rough_longtime";
    out.columns = {"t", "step_radius", "concentration_radius", "window_mass", "charge", "hs_norm"};
    const NullGrid grid(spec.radius, spec.ladder.front());
    const InitialData data = generate_data(spec.data, diagonal_axis(grid));
    const double h = grid.spacing();

    ContinuationConfig cc;
    cc.epsilon = spec.epsilon;
    cc.r_max = spec.r_max;
    cc.solver = spec.solver;
    std::vector<double> trace;
    double next_trace = 0.0;
    const double every = spec.T / 10.0;
    auto observer = [&](const ContinuationEntry& e, const InitialData& state) {
        double hs = std::numeric_limits<double>::quiet_NaN();
        if (e.t >= next_trace - 1e-9 * h) {
            const FunctionSample f(state.f, state.axis.x0, state.axis.h);
            const FunctionSample g(state.g, state.axis.x0, state.axis.h);
            const double a = hs_norm(f, spec.s), b = hs_norm(g, spec.s);
            hs = std::sqrt(a * a + b * b);
            trace.push_back(hs);
            while (next_trace <= e.t + 1e-9 * h) next_trace += every;
        }
        out.rows.push_back({e.t, e.step_radius, e.concentration_radius, e.window_mass, e.charge, hs});
    };
    const ContinuationLog log = continue_globally(data, spec.params, spec.T, cc, nullptr, observer);

    double drift = 0.0;
    for (const auto& row : out.rows) drift = std::max(drift, std::abs(row[4] - out.rows.front()[4]) / out.rows.front()[4]);
    const std::string key = fmt::format("rough_longtime.C_{}", profile_kind(spec.data.f));

    const double tmin = *std::min_element(trace.begin(), trace.end());
    const double tmax = *std::max_element(trace.begin(), trace.end());
    out.criteria.push_back(at_most("reached T", log.reached_target ? 0.0 : 1.0, 0.0, log.message));
    out.criteria.push_back(at_most("concentration suspected", log.concentration_suspected ? 1.0 : 0.0, 0.0));
    out.criteria.push_back(within("min step radius / h", log.min_step_radius() / h, std::nextafter(4.0, 5.0),
                                  std::numeric_limits<double>::infinity()));
    out.criteria.push_back(at_most("H^s trace max/min", tmax / tmin, std::nextafter(100.0, 0.0)));
    out.criteria.push_back(baseline_bound("relative charge drift", baseline, key, drift, h));
    out.details["constants"] = {{key, drift / (h * h)}};
    out.details["min_step_radius"] = log.min_step_radius();
    out.details["steps"] = log.entries.size();
    out.details["h"] = h;
    out.details["message"] = log.message;
    out.details["data"] = profile_kind(spec.data.f);
    return out;
}

StudyOutput inequalities_study(const StudySpec& spec) {
    CheckerConfig cfg;
    cfg.s = spec.s;
    cfg.seed = spec.seed;
    const std::vector<InequalityResult> results = run_inequality_checkers(cfg);
    StudyOutput out;
    out.name = "inequalities";
    out.columns = {"case", "family", "resolution", "max_ratio", "family_doubled", "resolution_doubled", "max_ratio_doubled"};
    json names = json::array();
    for (std::size_t k = 0; k < results.size(); ++k) {
        const InequalityResult& r = results[k];
        out.rows.push_back({static_cast<double>(k), static_cast<double>(r.base.family),
                            static_cast<double>(r.base.resolution), r.base.max_ratio, static_cast<double>(r.doubled.family),
                            static_cast<double>(r.doubled.resolution), r.doubled.max_ratio});
        const double drift = std::max(r.base.max_ratio, r.doubled.max_ratio) /
                             std::min(r.base.max_ratio, r.doubled.max_ratio);
        out.criteria.push_back(at_most(r.name + " drift", drift, std::nextafter(2.0, 0.0)));
        names.push_back(r.name);
    }
    out.details["cases"] = names;
    out.details["s"] = spec.s;
    return out;
}

Baseline calibrate(StudyOutput* report) {
    const Baseline none;
    Baseline b;
    json raw = json::object();
    for (const StudyOutput& o : {conservation_study(default_spec("conservation"), none),
                                 decomposition_study(default_spec("decomposition"), none),
                                 scaling_study(default_spec("scaling"), none),
                                 rough_longtime_study(default_spec("rough_longtime"), none),
                                 rough_longtime_study(gaussian_longtime_spec(), none)}) {
        for (const auto& [key, value] : o.details.at("constants").items()) {
            raw[key] = value;
            b.constants[key] = 2.0 * value.get<double>();
        }
    }
    if (report) {
        report->name = "calibrate";
        report->columns = {"measured", "frozen"};
        report->rows.clear();
        report->criteria.clear();
        json order = json::array();
        for (const auto& [key, value] : b.constants) {
            report->rows.push_back({raw[key].get<double>(), value});
            order.push_back(key);
            report->criteria.push_back(within(key, value, 0.0, std::numeric_limits<double>::infinity()));
        }
        report->details["constants"] = order;
    }
    return b;
}

StudyOutput run_study(const StudySpec& spec, const Baseline& baseline) {
    const std::string& n = spec.name;
    if (n == "convergence") return convergence_study(spec);
    if (n == "conservation") return conservation_study(spec, baseline);
    if (n == "contraction") return contraction_study(spec);
    if (n == "decomposition") return decomposition_study(spec, baseline);
    if (n == "boundedness") return boundedness_study(spec);
    if (n == "scaling") return scaling_study(spec, baseline);
    if (n == "reversal") return reversal_study(spec);
    if (n == "gluing") return gluing_study(spec);
    if (n == "lipschitz") return lipschitz_study(spec);
    if (n == "rough_longtime") return rough_longtime_study(spec, baseline);
    if (n == "inequalities") return inequalities_study(spec);
    if (n == "calibrate") {
        StudyOutput out;
        calibrate(&out);
        return out;
    }
    throw ConfigError(fmt::format("unknown study '{}'", n));
}

}  // namespace thirring
