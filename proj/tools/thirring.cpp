// Command-line driver: solve, decompose, norms, study.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
// (including a study whose verdict is FAIL).

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "thirring/config.hpp"
#include "thirring/decomposition.hpp"
#include "thirring/experiments.hpp"
#include "thirring/io.hpp"
#include "thirring/kernels.hpp"
#include "thirring/norms.hpp"

using namespace thirring;
namespace fs = std::filesystem;
using io::json;

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string data;
    std::optional<double> m, lambda, radius, tol, s, t;
    std::optional<long> n, max_iter;
    std::string scheme;
    std::string input;
    std::string study;
};

Config resolve(const Options& o) {
    Config c = o.config.empty() ? Config{} : Config::load(o.config);
    if (!o.data.empty()) apply_data_preset(c, o.data, "--data");
    auto num = [&](const char* key, const auto& v, const char* flag) {
        if (v) c.set(key, io::num(static_cast<double>(*v)), flag);
    };
    num("model.m", o.m, "--m");
    num("model.lambda", o.lambda, "--lambda");
    num("grid.radius", o.radius, "--R");
    num("solver.tol", o.tol, "--tol");
    num("norms.s", o.s, "--s");
    num("norms.t", o.t, "--t");
    if (o.n) c.set("grid.n", std::to_string(*o.n), "--n");
    if (o.max_iter) c.set("solver.max_iter", std::to_string(*o.max_iter), "--max-iter");
    if (!o.scheme.empty()) c.set("solver.scheme", o.scheme, "--scheme");
    if (!o.input.empty()) c.set("norms.input", o.input, "--input");
    for (const auto& s : o.sets) c.set_assignment(s, "--set");
    if (!o.out.empty()) c.set("output.dir", o.out, "--out");
    c.check_known(known_keys());
    return c;
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path artifact_dir(const Config& c, const std::string& leaf) {
    const fs::path base = fs::path(c.get_string("output.dir", "results")) / leaf;
    const std::string stamp = timestamp();
    fs::path dir = base / stamp;
    for (int k = 1; fs::exists(dir); ++k) dir = base / fmt::format("{}-{}", stamp, k);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json config_json(const Config& c) {
    json j = json::object();
    for (const auto& [key, e] : c.entries()) j[key] = e.value;
    return j;
}

// Manifest with the resolved config, an input hash and the hash of every artifact in `dir`.
void write_manifest(const fs::path& dir, const std::string& command, const Config& c, json extra,
                    const std::string& extra_input = {}) {
    json m = std::move(extra);
    m["command"] = command;
    m["config"] = config_json(c);
    m["inputs_sha1"] = io::git_blob_sha1(c.canonical() + extra_input);
    json files = json::object();
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() != "manifest.json") paths.push_back(e.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) files[p.filename().string()] = io::git_blob_sha1(read_file(p));
    m["artifacts"] = files;
    io::write_json(dir / "manifest.json", m);
}

void require_solve_keys(const Config& c) {
    c.require({"grid.radius", "grid.n", "model.m", "model.lambda", "data.f.kind", "data.g.kind"});
}

struct Solved {
    NullGrid grid;
    InitialData data;
    LocalSolution sol;
    SolverConfig cfg;
};

Solved solve_from(const Config& c) {
    require_solve_keys(c);
    const NullGrid grid = grid_from(c);
    const SolverConfig cfg = solver_from(c);
    InitialData data = generate_data(data_from(c), diagonal_axis(grid));
    LocalSolution sol = solve_local(data, params_from(c), grid, cfg);
    for (const auto& w : sol.warnings) std::cerr << "warning: " << w << '\n';
    return {grid, std::move(data), std::move(sol), cfg};
}

json solve_json(const Config& c, const Solved& s) {
    return {{"grid", io::to_json(s.grid)},
            {"params", io::to_json(params_from(c))},
            {"solver", io::to_json(s.cfg)},
            {"data", io::to_json(s.data.spec)},
            {"diagnostics",
             {{"converged", s.sol.converged},
              {"iterations", s.sol.iterations},
              {"sup_changes", s.sol.diffs},
              {"warnings", s.sol.warnings}}}};
}

std::vector<Slice> all_slices(const Solved& s) {
    const long n = static_cast<long>(s.grid.size());
    const long lo = s.sol.fields.extent == Extent::full ? -(n - 2) : 0;
    std::vector<Slice> out;
    for (long k = lo; k <= n - 2; ++k) out.push_back(slice_at_offset(s.grid, s.sol.fields, k));
    return out;
}

int cmd_solve(const Config& c) {
    const Solved s = solve_from(c);
    const fs::path dir = artifact_dir(c, "solve");
    io::write_data_csv(dir / "data.csv", s.data);
    io::write_field_csv(dir / "field.csv", s.grid, s.sol.center, s.sol.fields);
    io::write_slices_csv(dir / "slices.csv", all_slices(s));
    write_manifest(dir, "solve", c, solve_json(c, s));
    fmt::print("converged after {} iteration(s)\nartifacts: {}\n", s.sol.iterations, dir.string());
    return 0;
}

int cmd_decompose(const Config& c) {
    const Solved s = solve_from(c);
    const ModelParams p = params_from(c);
    DecompositionResult d = delgado_split(s.sol.fields, s.data, p, s.grid);
    const Mass1Report m1 = verify_mass1(d, s.sol.fields, p, s.grid);
    const fs::path dir = artifact_dir(c, "decompose");
    io::write_data_csv(dir / "data.csv", s.data);
    io::write_field_csv(dir / "field.csv", s.grid, s.sol.center, s.sol.fields);
    io::write_decomposition_csv(dir / "decomposition.csv", s.grid, s.sol.center, d.linear, d.remainder);
    json extra = solve_json(c, s);
    extra["decomposition"] = {{"residual_sum", d.residual_sum},   {"modulus_error", d.modulus_error},
                              {"linf_N", d.linf_N},               {"linf_psi_N", d.linf_psi_N},
                              {"mass1_sup", m1.sup_residual},     {"mass1_l2", m1.l2_residual},
                              {"mass1_scale", m1.sup_lhs}};
    write_manifest(dir, "decompose", c, extra);
    fmt::print("{}\nartifacts: {}\n", extra["decomposition"].dump(2), dir.string());
    return 0;
}

int cmd_norms(const Config& c) {
    c.require({"norms.input"});
    const fs::path input = c.get_string("norms.input");
    const double t = c.get_double("norms.t", std::numeric_limits<double>::quiet_NaN());
    const NormSpec spec{c.get_double("norms.s", 0.25)};
    if (!(spec.s > 0.0 && spec.s < 0.5)) throw ConfigError(fmt::format("norms.s must lie in (0, 1/2), got {}", spec.s));
    const Slice slice = io::read_slice_csv(input, t);
    if (slice.psi.size() < 4) throw ConfigError("norms: a slice needs at least 4 samples");
    NormReport psi = norm_report(sample_psi(slice), spec, "psi");
    const NormReport phi = norm_report(sample_phi(slice), spec, "phi");
    json conc = json::array();
    const double width = slice.axis.back() - slice.axis.x0;
    for (double r = width; r >= slice.axis.h; r *= 0.5) {
        conc.push_back({{"r", r}, {"value", concentration_function(slice.psi, slice.phi, slice.axis.h, r)}});
    }
    const json report{{"t", slice.t},
                      {"psi", io::to_json(psi)},
                      {"phi", io::to_json(phi)},
                      {"spinor", {{"charge", charge(slice)}, {"concentration", conc}}}};
    const fs::path dir = artifact_dir(c, "norms");
    io::write_json(dir / "norms.json", report);
    write_manifest(dir, "norms", c, {{"s", spec.s}, {"t", slice.t}}, read_file(input));
    fmt::print("{}\nartifacts: {}\n", report.dump(2), dir.string());
    return 0;
}

int cmd_study(const Config& c, const std::string& name) {
    const auto& names = study_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string list;
        for (const auto& n : names) list += "  " + n + "\n";
        throw ConfigError(fmt::format("unknown study '{}'; available studies:\n{}", name, list));
    }
    const StudySpec spec = study_from(c, name);
    const Baseline baseline = name == "calibrate" ? Baseline{} : Baseline::load(default_baseline_path());
    const auto start = std::chrono::steady_clock::now();
    StudyOutput out;
    if (name == "calibrate") {
        const Baseline fresh = calibrate(&out);
        fresh.save(default_baseline_path());
    } else {
        out = run_study(spec, baseline);
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path dir = artifact_dir(c, name);
    io::write_table_csv(dir / (name + ".csv"), out.columns, out.rows);
    io::write_json(dir / "verdict.json", out.verdict());
    write_manifest(dir, "study " + name, c, {{"study", name}, {"seed", spec.seed}});
    for (const Criterion& cr : out.criteria) {
        fmt::print("{:<4} {} = {:.6g}\n", cr.pass ? "PASS" : "FAIL", cr.name, cr.value);
    }
    fmt::print("{} {} ({:.1f} s)\nartifacts: {}\n", name, out.pass() ? "PASS" : "FAIL", elapsed, dir.string());
    return out.pass() ? 0 : 2;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", o.sets, "override section.key=value (repeatable)");
    cmd->add_option("--out", o.out, "output base directory (default results)");
}

void add_solver(CLI::App* cmd, Options& o) {
    cmd->add_option("--data", o.data, "data preset: zero, gaussian, box, box_family, sobolev_random");
    cmd->add_option("--m", o.m, "mass");
    cmd->add_option("--lambda", o.lambda, "coupling");
    cmd->add_option("--R", o.radius, "diamond radius");
    cmd->add_option("--n", o.n, "nodes per axis (odd)");
    cmd->add_option("--scheme", o.scheme, "picard or marching");
    cmd->add_option("--tol", o.tol, "Picard sup-norm tolerance");
    cmd->add_option("--max-iter", o.max_iter, "Picard iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Characteristic solver and verification studies for the massive Thirring model"};
    app.require_subcommand(1);
    Options o;
    CLI::App* solve = app.add_subcommand("solve", "solve on one diamond and dump fields and slices");
    CLI::App* decompose = app.add_subcommand("decompose", "solve, split into linear and bounded parts, check identities");
    CLI::App* norms = app.add_subcommand("norms", "norm report of a slice dump");
    CLI::App* study = app.add_subcommand("study", "run a named study");
    for (CLI::App* cmd : {solve, decompose, norms, study}) add_common(cmd, o);
    add_solver(solve, o);
    add_solver(decompose, o);
    norms->add_option("--input", o.input, "slice CSV (t,x,re_psi,im_psi,re_phi,im_phi)");
    norms->add_option("--s", o.s, "Sobolev regularity, 0 < s < 1/2");
    norms->add_option("--t", o.t, "slice time to pick (default: first in file)");
    study->add_option("name", o.study, "study name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const Config c = resolve(o);
        if (*solve) return cmd_solve(c);
        if (*decompose) return cmd_decompose(c);
        if (*norms) return cmd_norms(c);
        return cmd_study(c, o.study);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
