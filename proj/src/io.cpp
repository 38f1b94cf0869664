#include "neckflow/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "neckflow/error.hpp"

namespace neckflow::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

void require_header(const Table& t, const std::vector<std::string>& names, const char* what) {
  for (const auto& n : names) {
    if (std::find(t.header.begin(), t.header.end(), n) == t.header.end()) {
      throw Error(ErrorKind::Io, std::string(what) + " table lacks column '" + n + "'");
    }
  }
}

}  // namespace

const std::vector<double>& Table::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return columns[k];
  }
  throw Error(ErrorKind::Io, "no column '" + std::string(name) + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorKind::Io, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k) out += ',';
    out += table.header[k];
  }
  out += '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      if (k) out += ',';
      out += format_double(table.columns[k][i]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorKind::Io, "empty CSV");
  Table t;
  for (auto h : split(lines[0], ',')) t.header.emplace_back(h);
  t.columns.resize(t.header.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != t.header.size()) {
      throw Error(ErrorKind::Io, "CSV row " + std::to_string(i) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(t.header.size()));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) t.columns[k].push_back(parse_double(cells[k]));
  }
  return t;
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_table(const fs::path& path, const Table& table) { write_text(path, to_csv(table)); }

Table read_table(const fs::path& path) { return parse_csv(read_text(path)); }

// --- profiles ---------------------------------------------------------------

Table profile_table(const ProfileCurve& curve, bool with_curvatures) {
  Table t;
  t.header = {"theta", "S", "R"};
  std::vector<double> theta(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) theta[i] = curve.theta(i);
  t.columns = {theta, curve.S, curve.R};
  if (with_curvatures) {
    auto f = curvatures(curve);
    for (const char* h : {"kappa_u", "kappa_phi", "H", "A2", "Rsc"}) t.header.emplace_back(h);
    t.columns.push_back(std::move(f.kappa_u));
    t.columns.push_back(std::move(f.kappa_phi));
    t.columns.push_back(std::move(f.H));
    t.columns.push_back(std::move(f.A2));
    t.columns.push_back(std::move(f.Rsc));
  }
  return t;
}

ProfileCurve profile_from_table(const Table& table, double t) {
  require_header(table, {"S", "R"}, "profile");
  ProfileCurve c;
  c.S = table.column("S");
  c.R = table.column("R");
  c.t = t;
  return c;
}

void write_profile(const fs::path& path, const ProfileCurve& curve, bool with_curvatures) {
  write_table(path, profile_table(curve, with_curvatures));
}

ProfileCurve read_profile(const fs::path& path, double t) {
  return profile_from_table(read_table(path), t);
}

std::string snapshot_name(std::size_t index, double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return "snap_" + std::string(buf) + "_t=" + format_double(t) + ".csv";
}

double snapshot_time(const fs::path& path) {
  const std::string name = path.filename().string();
  const auto eq = name.find("_t=");
  const auto dot = name.rfind(".csv");
  if (name.rfind("snap_", 0) != 0 || eq == std::string::npos || dot == std::string::npos ||
      dot < eq) {
    throw Error(ErrorKind::Io, "not a snapshot file name: " + name);
  }
  return parse_double(std::string_view(name).substr(eq + 3, dot - eq - 3));
}

void write_snapshots(const fs::path& dir, const std::vector<ProfileCurve>& snapshots) {
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    write_profile(dir / snapshot_name(k, snapshots[k].t), snapshots[k]);
  }
}

std::vector<ProfileCurve> read_snapshots(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "no snapshot directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProfileCurve> out;
  for (const auto& f : files) out.push_back(read_profile(f, snapshot_time(f)));
  return out;
}

// --- traces -----------------------------------------------------------------

Table trace_table(const FlowTrace& trace) {
  Table t;
  t.header = {"t", "H_max", "H_pole", "R_min", "R_max", "convex", "dt", "H_center"};
  t.columns.resize(t.header.size());
  for (const auto& r : trace.records) {
    const double row[] = {r.t,     r.H_max, r.H_pole, r.R_min, r.R_max,
                          r.convex ? 1.0 : 0.0, r.dt, r.H_center};
    for (std::size_t k = 0; k < t.columns.size(); ++k) t.columns[k].push_back(row[k]);
  }
  return t;
}

FlowTrace trace_from_table(const Table& table) {
  require_header(table, {"t", "H_max", "H_pole", "R_min", "R_max", "convex", "dt"}, "trace");
  const bool has_center =
      std::find(table.header.begin(), table.header.end(), "H_center") != table.header.end();
  FlowTrace tr;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    tr.records.push_back({table.column("t")[i], table.column("H_max")[i],
                          table.column("H_pole")[i], table.column("R_min")[i],
                          table.column("R_max")[i], table.column("convex")[i] != 0.0,
                          table.column("dt")[i],
                          has_center ? table.column("H_center")[i] : std::nan("")});
  }
  return tr;
}

void write_trace(const fs::path& path, const FlowTrace& trace) {
  write_table(path, trace_table(trace));
}

FlowTrace read_trace(const fs::path& path) { return trace_from_table(read_table(path)); }

// --- soliton ----------------------------------------------------------------

void write_soliton(const fs::path& path, const SolitonCurve& curve) {
  Table t;
  t.header = {"x", "y", "beta", "H"};
  t.columns.resize(4);
  for (const auto& s : curve.samples) {
    t.columns[0].push_back(s.x);
    t.columns[1].push_back(s.y);
    t.columns[2].push_back(s.beta);
    t.columns[3].push_back(s.H);
  }
  write_table(path, t);
}

SolitonCurve read_soliton(const fs::path& path) {
  const Table t = read_table(path);
  require_header(t, {"x", "y", "beta", "H"}, "soliton");
  SolitonCurve c;
  if (t.rows() < 2) throw Error(ErrorKind::Io, "soliton table needs at least two rows");
  // H = c sin(beta) and beta = pi/2 at the tip.
  c.c = t.column("H")[0];
  double s = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    if (i > 0) {
      s += std::hypot(t.column("x")[i] - t.column("x")[i - 1],
                      t.column("y")[i] - t.column("y")[i - 1]);
    }
    c.samples.push_back(
        {s, t.column("x")[i], t.column("y")[i], t.column("beta")[i], t.column("H")[i]});
  }
  c.spacing = s / static_cast<double>(t.rows() - 1);
  return c;
}

// --- sweeps and searches ----------------------------------------------------

std::string sweep_csv(const std::vector<ClassifiedRun>& runs) {
  std::string out = "lambda,outcome,H_pole_max,T_est\n";
  for (const auto& r : runs) {
    out += format_double(r.lambda) + ',' + to_string(r.outcome) + ',' +
           format_double(r.H_pole_max) + ',' + format_double(r.T_est) + '\n';
  }
  return out;
}

std::vector<ClassifiedRun> parse_sweep_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "lambda,outcome,H_pole_max,T_est") {
    throw Error(ErrorKind::Io, "sweep CSV header must be lambda,outcome,H_pole_max,T_est");
  }
  std::vector<ClassifiedRun> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = split(lines[i], ',');
    if (c.size() != 4) throw Error(ErrorKind::Io, "sweep CSV row " + std::to_string(i));
    ClassifiedRun r;
    r.lambda = parse_double(c[0]);
    r.outcome = outcome_from_string(std::string(c[1]));
    r.H_pole_max = parse_double(c[2]);
    r.T_est = parse_double(c[3]);
    out.push_back(r);
  }
  return out;
}

void write_sweep(const fs::path& path, const std::vector<ClassifiedRun>& runs) {
  write_text(path, sweep_csv(runs));
}

std::vector<ClassifiedRun> read_sweep(const fs::path& path) {
  return parse_sweep_csv(read_text(path));
}

json to_json(const ClassifiedRun& run) {
  json j = {{"lambda", run.lambda},
            {"outcome", to_string(run.outcome)},
            {"H_pole_max", run.H_pole_max},
            {"T_est", run.T_est}};
  if (!run.error.empty()) j["error"] = run.error;
  return j;
}

ClassifiedRun classified_run_from_json(const json& j) {
  ClassifiedRun r;
  r.lambda = j.at("lambda").get<double>();
  r.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  r.H_pole_max = j.at("H_pole_max").get<double>();
  r.T_est = j.at("T_est").get<double>();
  if (j.contains("error")) r.error = j["error"].get<std::string>();
  return r;
}

json to_json(const CriticalEstimate& est) {
  json runs = json::array();
  for (const auto& r : est.runs) runs.push_back(to_json(r));
  return {{"lambda_lo", est.lambda_lo},
          {"lambda_hi", est.lambda_hi},
          {"iterations", est.iterations},
          {"n_grid", est.n_grid},
          {"runs", runs}};
}

CriticalEstimate critical_from_json(const json& j) {
  try {
    CriticalEstimate e;
    e.lambda_lo = j.at("lambda_lo").get<double>();
    e.lambda_hi = j.at("lambda_hi").get<double>();
    e.iterations = j.at("iterations").get<int>();
    e.n_grid = j.at("n_grid").get<std::size_t>();
    for (const auto& r : j.at("runs")) e.runs.push_back(classified_run_from_json(r));
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Io, std::string("critical-search JSON: ") + ex.what());
  }
}

json to_json(const FitResult& fit) {
  return {{"exponent", fit.exponent}, {"prefactor", fit.prefactor}, {"residual", fit.residual},
          {"t_lo", fit.t_lo},         {"t_hi", fit.t_hi},           {"T", fit.T},
          {"points", fit.points}};
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::Io, path.string() + ": " + ex.what());
  }
}

std::string git_blob_hash(std::string_view bytes) {
  const std::string head = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || !EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) ||
      !EVP_DigestUpdate(ctx, head.data(), head.size()) ||
      !EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) || !EVP_DigestFinal_ex(ctx, md, &len)) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorKind::Io, "SHA-1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

json module_versions() {
  return {{"geometry", "1.0"}, {"evolution", "1.1"}, {"soliton", "1.0"},
          {"analysis", "1.1"}, {"critical", "1.0"},  {"cli", "1.0"}};
}

}  // namespace neckflow::io
