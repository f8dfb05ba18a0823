#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thirring/field.hpp"
#include "thirring/model.hpp"
#include "thirring/norms.hpp"
#include "thirring/solver.hpp"

namespace thirring::io {

using nlohmann::json;

/// Shortest decimal form that round-trips a binary64 ("%.17g").
std::string num(double v);

/// Git blob id: SHA-1 of "blob <size>\0" + content, as lowercase hex.
std::string git_blob_sha1(const std::string& content);

json to_json(const NullGrid& grid);
json to_json(const ModelParams& p);
json to_json(const SolverConfig& c);
json to_json(const ProfileSpec& p);
json to_json(const DataSpec& d);
json to_json(const NormReport& r);

/// alpha, beta, re_psi, im_psi, re_phi, im_phi on every covered node.
void write_field_csv(const std::filesystem::path& path, const NullGrid& grid, double center, const SpinorPair& field);

/// alpha, beta, then re/im of psi_L, phi_L, psi_N, phi_N on every covered node.
void write_decomposition_csv(const std::filesystem::path& path, const NullGrid& grid, double center,
                             const SpinorPair& linear, const SpinorPair& remainder);

/// t, x, re_psi, im_psi, re_phi, im_phi.
void write_slices_csv(const std::filesystem::path& path, const std::vector<Slice>& slices);

/// x, re_f, im_f, re_g, im_g.
void write_data_csv(const std::filesystem::path& path, const InitialData& data);

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& path, const json& j);

/// Reads a slice dump; with several times present, picks the one closest to `t` (or the first if t is NaN).
Slice read_slice_csv(const std::filesystem::path& path, double t);

}  // namespace thirring::io
