#include "thirring/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>
#include <openssl/sha.h>

namespace thirring::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    return out;
}

}  // namespace

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string git_blob_sha1(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
    std::string hex;
    for (unsigned char b : digest) hex += fmt::format("{:02x}", b);
    return hex;
}

json to_json(const NullGrid& grid) {
    return {{"radius", grid.radius()}, {"n", grid.size()}, {"h", grid.spacing()}};
}

json to_json(const ModelParams& p) { return {{"m", p.m}, {"lambda", p.lambda}}; }

json to_json(const SolverConfig& c) {
    return {{"scheme", scheme_name(c.scheme)},
            {"tol", c.tol},
            {"max_iter", c.max_iter},
            {"epsilon_small", c.epsilon_small},
            {"extent", c.extent == Extent::full ? "full" : "forward"}};
}

json to_json(const ProfileSpec& spec) {
    json j = std::visit(
        overloaded{
            [](const ZeroProfile&) { return json::object(); },
            [](const GaussianProfile& p) {
                return json{{"amplitude", p.amplitude}, {"width", p.width}, {"center", p.center}, {"velocity", p.velocity}};
            },
            [](const BoxProfile& p) { return json{{"height", p.height}, {"lo", p.lo}, {"hi", p.hi}}; },
            [](const BoxFamilyProfile& p) { return json{{"width", p.width}, {"center", p.center}}; },
            [](const SobolevRandomProfile& p) {
                return json{{"s", p.s},         {"delta", p.delta},         {"lo", p.lo}, {"hi", p.hi},
                            {"modes", p.modes}, {"amplitude", p.amplitude}, {"seed", p.seed}};
            },
        },
        spec);
    j["kind"] = profile_kind(spec);
    return j;
}

json to_json(const DataSpec& d) { return {{"f", to_json(d.f)}, {"g", to_json(d.g)}}; }

json to_json(const NormReport& r) {
    json conc = json::array();
    for (const auto& [radius, value] : r.concentration) conc.push_back({{"r", radius}, {"value", value}});
    return {{"label", r.label},
            {"interval", {r.a, r.b}},
            {"h", r.h},
            {"samples", r.samples},
            {"s", r.spec.s},
            {"p", r.spec.p()},
            {"q", r.spec.q()},
            {"l2", r.l2},
            {"lp", r.lp},
            {"linf", r.linf},
            {"hs", r.hs},
            {"hs_seminorm", r.hs_seminorm},
            {"w1q", r.w1q},
            {"concentration", conc}};
}

void write_field_csv(const std::filesystem::path& path, const NullGrid& grid, double center, const SpinorPair& field) {
    std::ofstream out = open_out(path);
    out << "alpha,beta,re_psi,im_psi,re_phi,im_phi\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (!field.covers(i, j)) continue;
            const cplx a = field.psi_at(i, j);
            const cplx b = field.phi_at(i, j);
            out << num(grid.alpha(i) + center) << ',' << num(grid.beta(j) + center) << ',' << num(a.real()) << ','
                << num(a.imag()) << ',' << num(b.real()) << ',' << num(b.imag()) << '\n';
        }
    }
}

void write_decomposition_csv(const std::filesystem::path& path, const NullGrid& grid, double center,
                             const SpinorPair& linear, const SpinorPair& remainder) {
    std::ofstream out = open_out(path);
    out << "alpha,beta,re_psi_L,im_psi_L,re_phi_L,im_phi_L,re_psi_N,im_psi_N,re_phi_N,im_phi_N\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (!linear.covers(i, j)) continue;
            out << num(grid.alpha(i) + center) << ',' << num(grid.beta(j) + center);
            for (const cplx v : {linear.psi_at(i, j), linear.phi_at(i, j), remainder.psi_at(i, j), remainder.phi_at(i, j)}) {
                out << ',' << num(v.real()) << ',' << num(v.imag());
            }
            out << '\n';
        }
    }
}

void write_slices_csv(const std::filesystem::path& path, const std::vector<Slice>& slices) {
    std::ofstream out = open_out(path);
    out << "t,x,re_psi,im_psi,re_phi,im_phi\n";
    for (const Slice& s : slices) {
        for (std::size_t m = 0; m < s.psi.size(); ++m) {
            out << num(s.t) << ',' << num(s.axis.x(m)) << ',' << num(s.psi[m].real()) << ',' << num(s.psi[m].imag())
                << ',' << num(s.phi[m].real()) << ',' << num(s.phi[m].imag()) << '\n';
        }
    }
}

void write_data_csv(const std::filesystem::path& path, const InitialData& data) {
    std::ofstream out = open_out(path);
    out << "x,re_f,im_f,re_g,im_g\n";
    for (std::size_t k = 0; k < data.f.size(); ++k) {
        out << num(data.axis.x(k)) << ',' << num(data.f[k].real()) << ',' << num(data.f[k].imag()) << ','
            << num(data.g[k].real()) << ',' << num(data.g[k].imag()) << '\n';
    }
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << num(row[c]);
        out << '\n';
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

Slice read_slice_csv(const std::filesystem::path& path, double t) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open slice file '{}'", path.string()));
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,x,", 0) != 0) {
        throw ConfigError(fmt::format("{}:1: expected a slice header starting with 't,x,'", path.string()));
    }
    struct Row {
        double x;
        cplx psi, phi;
    };
    std::map<double, std::vector<Row>> by_time;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double v[6];
        int k = 0;
        while (k < 6 && std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v[k] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError(fmt::format("{}:{}: column {}: '{}' is not a number", path.string(), lineno, k + 1, cell));
            }
            ++k;
        }
        if (k != 6) throw ConfigError(fmt::format("{}:{}: expected 6 columns", path.string(), lineno));
        by_time[v[0]].push_back({v[1], {v[2], v[3]}, {v[4], v[5]}});
    }
    if (by_time.empty()) throw ConfigError(fmt::format("{}: no slice rows", path.string()));
    auto pick = by_time.begin();
    if (!std::isnan(t)) {
        double best = std::numeric_limits<double>::infinity();
        for (auto it = by_time.begin(); it != by_time.end(); ++it) {
            if (std::abs(it->first - t) < best) {
                best = std::abs(it->first - t);
                pick = it;
            }
        }
    }
    const auto& rows = pick->second;
    if (rows.size() < 2) throw ConfigError(fmt::format("{}: slice at t = {} has fewer than 2 points", path.string(), pick->first));
    Slice s;
    s.t = pick->first;
    const double h = rows[1].x - rows[0].x;
    s.axis = {rows[0].x, h, rows.size()};
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (std::abs(rows[m].x - s.axis.x(m)) > 1e-9 * std::max(1.0, std::abs(rows[m].x))) {
            throw ConfigError(fmt::format("{}: slice samples are not equispaced", path.string()));
        }
        s.psi.push_back(rows[m].psi);
        s.phi.push_back(rows[m].phi);
    }
    return s;
}

}  // namespace thirring::io
