#pragma once

// Text persistence: CSV tables written with 17 significant digits so every
// double survives a round trip, JSON documents for run manifests and
// critical searches, and a git-compatible content hash.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "neckflow/analysis.hpp"
#include "neckflow/critical.hpp"
#include "neckflow/evolution.hpp"
#include "neckflow/geometry.hpp"
#include "neckflow/soliton.hpp"

namespace neckflow::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Column-major table with a header line.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(std::string_view name) const;
};

/// Shortest decimal text that parses back to the same double ("%.17g").
std::string format_double(double v);
double parse_double(std::string_view text);

std::string to_csv(const Table& table);
Table parse_csv(std::string_view text);

void write_text(const fs::path& path, std::string_view text);
std::string read_text(const fs::path& path);

void write_table(const fs::path& path, const Table& table);
Table read_table(const fs::path& path);

/// `theta,S,R`, plus `kappa_u,kappa_phi,H,A2,Rsc` when requested.
Table profile_table(const ProfileCurve& curve, bool with_curvatures = false);
ProfileCurve profile_from_table(const Table& table, double t = 0.0);
void write_profile(const fs::path& path, const ProfileCurve& curve, bool with_curvatures = false);
ProfileCurve read_profile(const fs::path& path, double t = 0.0);

/// `snap_<index>_t=<time>.csv`; the time is stored losslessly in the name.
std::string snapshot_name(std::size_t index, double t);
double snapshot_time(const fs::path& path);
void write_snapshots(const fs::path& dir, const std::vector<ProfileCurve>& snapshots);
std::vector<ProfileCurve> read_snapshots(const fs::path& dir);

/// `t,H_max,H_pole,R_min,R_max,convex,dt,H_center`; the loader also accepts
/// files without the last column.
Table trace_table(const FlowTrace& trace);
FlowTrace trace_from_table(const Table& table);
void write_trace(const fs::path& path, const FlowTrace& trace);
FlowTrace read_trace(const fs::path& path);

/// `x,y,beta,H`.
void write_soliton(const fs::path& path, const SolitonCurve& curve);
SolitonCurve read_soliton(const fs::path& path);

/// `lambda,outcome,H_pole_max,T_est`; outcomes are written by name.
std::string sweep_csv(const std::vector<ClassifiedRun>& runs);
std::vector<ClassifiedRun> parse_sweep_csv(std::string_view text);
void write_sweep(const fs::path& path, const std::vector<ClassifiedRun>& runs);
std::vector<ClassifiedRun> read_sweep(const fs::path& path);

json to_json(const ClassifiedRun& run);
ClassifiedRun classified_run_from_json(const json& j);
json to_json(const CriticalEstimate& est);
CriticalEstimate critical_from_json(const json& j);
json to_json(const FitResult& fit);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// Lowercase hex SHA-1 of "blob <size>\0" + bytes, as `git hash-object`.
std::string git_blob_hash(std::string_view bytes);

/// Version string of every module, for manifests.
json module_versions();

}  // namespace neckflow::io
