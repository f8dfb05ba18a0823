#include "thirring/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace thirring {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
    });
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
    Config c;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t col = raw.find_first_not_of(" \t") + 1;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError(fmt::format("{}:{}:{}: section header is missing ']'", source, lineno, col));
            }
            section = trim(t.substr(1, t.size() - 2));
            if (!valid_name(section)) {
                throw ConfigError(fmt::format("{}:{}:{}: bad section name '{}'", source, lineno, col + 1, section));
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("{}:{}:{}: expected 'key = value'", source, lineno, col));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key)) throw ConfigError(fmt::format("{}:{}:{}: bad key '{}'", source, lineno, col, key));
        if (section.empty()) {
            throw ConfigError(fmt::format("{}:{}:{}: key '{}' appears before any [section]", source, lineno, col, key));
        }
        if (value.empty()) {
            throw ConfigError(fmt::format("{}:{}:{}: key '{}' has no value", source, lineno, eq + 2, key));
        }
        const std::size_t vcol = line.find_first_not_of(" \t", eq + 1) + 1;
        c.entries_[section + "." + key] = {value, fmt::format("{}:{}:{}", source, lineno, vcol)};
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value, const std::string& source) {
    if (!valid_name(key) || key.find('.') == std::string::npos) {
        throw ConfigError(fmt::format("{}: bad key '{}' (expected section.key)", source, key));
    }
    entries_[key] = {value, source};
}

void Config::set_assignment(const std::string& assignment, const std::string& source) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError(fmt::format("{}: expected section.key=value, got '{}'", source, assignment));
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), source);
}

const Config::Entry& Config::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(fmt::format("missing required key '{}'", key));
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return entry(key).value; }

double Config::get_double(const std::string& key) const {
    const Entry& e = entry(key);
    double v = 0.0;
    const char* end = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("{}: '{}' for key '{}' is not a number", e.source, e.value, key));
    }
    return v;
}

long Config::get_long(const std::string& key) const {
    const Entry& e = entry(key);
    long v = 0;
    const char* end = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("{}: '{}' for key '{}' is not an integer", e.source, e.value, key));
    }
    return v;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigError(fmt::format("{}: '{}' in key '{}' is not a number", e.source, t, key));
        }
        out.push_back(v);
    }
    return out;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
long Config::get_long(const std::string& key, long fallback) const { return has(key) ? get_long(key) : fallback; }

void Config::check_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, e] : entries_) {
        if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", e.source, key));
    }
}

void Config::require(const std::vector<std::string>& keys) const {
    for (const auto& k : keys) {
        if (!has(k)) throw ConfigError(fmt::format("missing required key '{}'", k));
    }
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [key, e] : entries_) out += key + " = " + e.value + "\n";
    return out;
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> profile_params{"kind",   "amplitude", "width", "center", "velocity", "height",
                                               "lo",     "hi",        "s",     "delta",  "modes",    "seed"};

std::set<std::string> allowed_for(const std::string& kind) {
    if (kind == "zero") return {"kind"};
    if (kind == "gaussian") return {"kind", "amplitude", "width", "center", "velocity"};
    if (kind == "box") return {"kind", "height", "lo", "hi"};
    if (kind == "box_family") return {"kind", "width", "center"};
    if (kind == "sobolev_random") return {"kind", "s", "delta", "lo", "hi", "modes", "amplitude", "seed"};
    return {};
}

}  // namespace

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k{"grid.radius",     "grid.n",       "model.m",         "model.lambda",
                                "solver.scheme",   "solver.tol",   "solver.max_iter", "solver.epsilon_small",
                                "solver.extent",   "output.dir",   "norms.input",     "norms.s",
                                "norms.t",         "study.ladder", "study.T",         "study.seed",
                                "study.sweep",     "study.epsilon", "study.r_max",    "study.s"};
        for (const char* comp : {"f", "g"}) {
            for (const auto& p : profile_params) k.insert(fmt::format("data.{}.{}", comp, p));
        }
        return k;
    }();
    return keys;
}

NullGrid grid_from(const Config& c) {
    const double radius = c.get_double("grid.radius");
    const long n = c.get_long("grid.n");
    if (!(radius > 0.0)) throw ConfigError(fmt::format("{}: grid.radius must be positive", c.entry("grid.radius").source));
    if (n < 3 || n % 2 == 0) {
        throw ConfigError(fmt::format("{}: grid.n must be odd and at least 3, got {}", c.entry("grid.n").source, n));
    }
    return NullGrid(radius, static_cast<std::size_t>(n));
}

ModelParams params_from(const Config& c) { return {c.get_double("model.m"), c.get_double("model.lambda")}; }

SolverConfig solver_from(const Config& c) {
    SolverConfig s;
    s.epsilon_small = default_epsilon(c.get_double("model.lambda", 0.0));
    if (c.has("solver.scheme")) {
        try {
            s.scheme = parse_scheme(c.get_string("solver.scheme"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: {}", c.entry("solver.scheme").source, e.what()));
        }
    }
    s.tol = c.get_double("solver.tol", s.tol);
    s.max_iter = static_cast<int>(c.get_long("solver.max_iter", s.max_iter));
    s.epsilon_small = c.get_double("solver.epsilon_small", s.epsilon_small);
    const std::string extent = c.get_string("solver.extent", "forward");
    if (extent == "full") {
        s.extent = Extent::full;
    } else if (extent != "forward") {
        throw ConfigError(fmt::format("{}: solver.extent must be forward or full", c.entry("solver.extent").source));
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("solver section: {}", e.what()));
    }
    return s;
}

ProfileSpec profile_from(const Config& c, const std::string& component) {
    const std::string prefix = "data." + component + ".";
    const std::string kind = c.get_string(prefix + "kind", "zero");
    const std::set<std::string> allowed = allowed_for(kind);
    if (allowed.empty()) {
        throw ConfigError(fmt::format("{}: unknown data kind '{}' (expected zero, gaussian, box, box_family, sobolev_random)",
                                      c.entry(prefix + "kind").source, kind));
    }
    for (const auto& p : profile_params) {
        if (c.has(prefix + p) && !allowed.count(p)) {
            throw ConfigError(fmt::format("{}: key '{}' does not apply to kind '{}'", c.entry(prefix + p).source,
                                          prefix + p, kind));
        }
    }
    auto num = [&](const char* name, double fallback) { return c.get_double(prefix + name, fallback); };
    auto positive = [&](const char* name, double v) {
        if (!(v > 0.0)) {
            const std::string where = c.has(prefix + name) ? c.entry(prefix + name).source : prefix + name;
            throw ConfigError(fmt::format("{}: {} must be positive", where, prefix + name));
        }
        return v;
    };
    if (kind == "zero") return ZeroProfile{};
    if (kind == "gaussian") {
        return GaussianProfile{num("amplitude", 1.0), positive("width", num("width", 1.0)), num("center", 0.0),
                               num("velocity", 0.0)};
    }
    if (kind == "box") return BoxProfile{num("height", 1.0), num("lo", 0.0), num("hi", 1.0)};
    if (kind == "box_family") return BoxFamilyProfile{positive("width", num("width", 1.0)), num("center", 0.0)};
    SobolevRandomProfile p;
    p.s = num("s", p.s);
    p.delta = num("delta", p.delta);
    p.lo = num("lo", p.lo);
    p.hi = num("hi", p.hi);
    p.modes = static_cast<int>(c.get_long(prefix + "modes", p.modes));
    p.amplitude = num("amplitude", p.amplitude);
    p.seed = static_cast<std::uint64_t>(c.get_long(prefix + "seed", 0));
    return p;
}

DataSpec data_from(const Config& c) { return {profile_from(c, "f"), profile_from(c, "g")}; }

void apply_data_preset(Config& c, const std::string& name, const std::string& source) {
    auto put = [&](const std::string& key, const std::string& value) { c.set("data." + key, value, source); };
    // A preset replaces the whole data section.
    Config fresh;
    for (const auto& [key, e] : c.entries()) {
        if (key.rfind("data.", 0) != 0) fresh.set(key, e.value, e.source);
    }
    c = fresh;
    if (name == "zero") {
        put("f.kind", "zero");
        put("g.kind", "zero");
    } else if (name == "gaussian") {
        put("f.kind", "gaussian");
        put("f.amplitude", "1");
        put("f.width", "0.3");
        put("f.center", "-0.2");
        put("g.kind", "gaussian");
        put("g.amplitude", "1");
        put("g.width", "0.3");
        put("g.center", "0.2");
    } else if (name == "box") {
        put("f.kind", "box");
        put("f.lo", "0");
        put("f.hi", "1");
        put("g.kind", "zero");
    } else if (name == "box_family") {
        put("f.kind", "box_family");
        put("f.width", "0.25");
        put("f.center", "-0.25");
        put("g.kind", "gaussian");
        put("g.width", "0.3");
        put("g.center", "0.25");
    } else if (name == "sobolev_random") {
        put("f.kind", "sobolev_random");
        put("f.seed", "42");
        put("g.kind", "zero");
    } else {
        throw ConfigError(fmt::format("{}: unknown data preset '{}' (expected zero, gaussian, box, box_family, "
                                      "sobolev_random)",
                                      source, name));
    }
}

StudySpec study_from(const Config& c, const std::string& name) {
    StudySpec s = default_spec(name);
    if (c.has("model.m")) s.params.m = c.get_double("model.m");
    if (c.has("model.lambda")) s.params.lambda = c.get_double("model.lambda");
    if (c.has("grid.radius")) s.radius = c.get_double("grid.radius");
    if (c.has("grid.n")) s.ladder = {static_cast<std::size_t>(c.get_long("grid.n"))};
    if (c.has("study.ladder")) {
        s.ladder.clear();
        for (double v : c.get_doubles("study.ladder")) {
            if (v < 3 || v != std::floor(v) || static_cast<long>(v) % 2 == 0) {
                throw ConfigError(fmt::format("{}: ladder entries must be odd integers >= 3",
                                              c.entry("study.ladder").source));
            }
            s.ladder.push_back(static_cast<std::size_t>(v));
        }
    }
    bool has_data = false;
    for (const auto& [key, e] : c.entries()) has_data = has_data || key.rfind("data.", 0) == 0;
    if (has_data) s.data = data_from(c);
    const SolverConfig defaults = s.solver;
    if (c.has("solver.scheme") || c.has("solver.tol") || c.has("solver.max_iter") || c.has("solver.epsilon_small") ||
        c.has("solver.extent")) {
        s.solver = solver_from(c);
        if (!c.has("solver.scheme")) s.solver.scheme = defaults.scheme;
        if (!c.has("solver.max_iter")) s.solver.max_iter = defaults.max_iter;
    }
    s.T = c.get_double("study.T", s.T);
    s.seed = static_cast<std::uint64_t>(c.get_long("study.seed", static_cast<long>(s.seed)));
    if (c.has("study.sweep")) s.sweep = c.get_doubles("study.sweep");
    s.epsilon = c.get_double("study.epsilon", s.epsilon);
    s.r_max = c.get_double("study.r_max", s.r_max);
    s.s = c.get_double("study.s", s.s);
    return s;
}

}  // namespace thirring
