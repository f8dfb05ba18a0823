#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thirring/model.hpp"
#include "thirring/solver.hpp"

namespace thirring {

/// Inputs of one study. Fields a study does not use are ignored by it.
struct StudySpec {
    std::string name;
    DataSpec data;
    ModelParams params;
    double radius = 1.0;
    std::vector<std::size_t> ladder;  // nodes per axis, coarse to fine
    double T = 1.0;
    SolverConfig solver;
    std::uint64_t seed = 0;
    std::vector<double> sweep;  // tau values, perturbation sizes or box widths
    double epsilon = 0.1;       // concentration threshold (rough_longtime)
    double r_max = 1.0;
    double s = 0.1;             // regularity of the traced H^s norm / checkers
};

/// One checked statement: pass iff lo <= value <= hi.
struct Criterion {
    std::string name;
    double value = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool pass = false;
    std::string note;
};

Criterion at_most(std::string name, double value, double bound, std::string note = {});
Criterion within(std::string name, double value, double lo, double hi, std::string note = {});

struct StudyOutput {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<Criterion> criteria;
    nlohmann::json details = nlohmann::json::object();

    bool pass() const;
    nlohmann::json verdict() const;
};

/// Regression constants frozen from a calibration run (2x slack already applied).
struct Baseline {
    std::map<std::string, double> constants;

    bool has(const std::string& key) const { return constants.count(key) != 0; }
    double get(const std::string& key) const;

    static Baseline load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Path of the checked-in baseline file.
std::filesystem::path default_baseline_path();

const std::vector<std::string>& study_names();

/// Defaults of a named study; throws ConfigError for an unknown name.
StudySpec default_spec(const std::string& name);

/// rough_longtime defaults with unit-charge Gaussian data (width 2) instead of the unit box.
StudySpec gaussian_longtime_spec();

/// Least-squares slope of log(err) against log(h).
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

StudyOutput convergence_study(const StudySpec& spec);
StudyOutput conservation_study(const StudySpec& spec, const Baseline& baseline);
StudyOutput contraction_study(const StudySpec& spec);
StudyOutput decomposition_study(const StudySpec& spec, const Baseline& baseline);
StudyOutput boundedness_study(const StudySpec& spec);
StudyOutput scaling_study(const StudySpec& spec, const Baseline& baseline);
StudyOutput reversal_study(const StudySpec& spec);
StudyOutput gluing_study(const StudySpec& spec);
StudyOutput lipschitz_study(const StudySpec& spec);
StudyOutput rough_longtime_study(const StudySpec& spec, const Baseline& baseline);
StudyOutput inequalities_study(const StudySpec& spec);

/// Runs the baseline-bearing studies with their defaults and returns the constants with 2x slack.
Baseline calibrate(StudyOutput* report = nullptr);

/// Dispatch by spec.name ("calibrate" included).
StudyOutput run_study(const StudySpec& spec, const Baseline& baseline);

}  // namespace thirring
