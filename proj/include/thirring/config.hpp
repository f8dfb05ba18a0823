#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "thirring/experiments.hpp"
#include "thirring/model.hpp"
#include "thirring/solver.hpp"

namespace thirring {

/// Plain-text configuration:
///
///     # comment
///     [grid]
///     radius = 1
///     n = 257
///
/// Keys are addressed as "section.key". Later assignments (and flag overrides) replace
/// earlier ones. Every error names the source and the line and column it refers to.
class Config {
public:
    struct Entry {
        std::string value;
        std::string source;  // "file:line:col" or "--flag"
    };

    static Config parse(const std::string& text, const std::string& source);
    static Config load(const std::filesystem::path& path);

    /// Sets "section.key" (used for command-line overrides).
    void set(const std::string& key, const std::string& value, const std::string& source);
    /// Parses "section.key=value".
    void set_assignment(const std::string& assignment, const std::string& source);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const Entry& entry(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;

    /// Throws ConfigError for the first key outside `allowed` (exact keys or "prefix.*").
    void check_known(const std::set<std::string>& allowed) const;
    /// Throws ConfigError naming the first missing key.
    void require(const std::vector<std::string>& keys) const;

    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

    /// Canonical "section.key = value" lines in key order.
    std::string canonical() const;

private:
    std::map<std::string, Entry> entries_;
};

// Typed views of the standard sections.
NullGrid grid_from(const Config& c);
ModelParams params_from(const Config& c);
SolverConfig solver_from(const Config& c);
/// Profile under "data.<component>.kind" plus its parameters.
ProfileSpec profile_from(const Config& c, const std::string& component);
DataSpec data_from(const Config& c);

/// Named data presets usable as --data: zero, gaussian, box, box_family, sobolev_random.
void apply_data_preset(Config& c, const std::string& name, const std::string& source);

/// Study defaults overridden by the [study], [model], [grid], [solver] and [data] sections.
StudySpec study_from(const Config& c, const std::string& name);

/// Every key the CLI understands.
const std::set<std::string>& known_keys();

}  // namespace thirring
