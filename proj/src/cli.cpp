#include "neckflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "neckflow/analysis.hpp"
#include "neckflow/config.hpp"
#include "neckflow/critical.hpp"
#include "neckflow/error.hpp"
#include "neckflow/evolution.hpp"
#include "neckflow/io.hpp"
#include "neckflow/soliton.hpp"

namespace neckflow::cli {

namespace {

namespace fs = std::filesystem;
using io::json;
using io::Table;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Every config key may be overridden by a flag of the same name with
// dashes, e.g. --eps-pinch.
const char* const kConfigKeys[] = {
    "lambda",    "b",           "n",           "safety",   "eps_pinch",
    "eps_extinct", "a2_cap",    "dt_min",      "max_steps", "snapshot_dt",
    "snapshot_h_growth", "trace_every", "stop_early", "output_dir",
};

struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& app) {
    app.add_option("--config", file, "key = value configuration file");
    for (const char* key : kConfigKeys) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (flag == "output-dir") flag = "out";
      options[key] = app.add_option("--" + flag, values[key]);
    }
  }

  RunConfig resolve() const {
    RunConfig c = file.empty() ? RunConfig{} : load_config(file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) assign(c, key, values.at(key));
    }
    return c;
  }
};

fs::path output_root(const RunConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("NECKFLOW_OUT"); env && *env) return env;
  return ".";
}

json config_json(const RunConfig& c) {
  json j = json::object();
  const std::string text = to_text(c);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = text.substr(pos, nl - pos);
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
    pos = nl + 1;
  }
  return j;
}

json manifest_base(const std::string& command, const RunConfig& c, double wall) {
  const std::string text = to_text(c);
  return {{"command", command},
          {"config", config_json(c)},
          {"config_hash", io::git_blob_hash(text)},
          {"versions", io::module_versions()},
          {"wall_seconds", wall}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Table make_table(std::vector<std::string> header) {
  Table t;
  t.columns.resize(header.size());
  t.header = std::move(header);
  return t;
}

void add_row(Table& t, std::initializer_list<double> row) {
  std::size_t k = 0;
  for (double v : row) t.columns[k++].push_back(v);
}

// A finished evolve run as stored on disk.
struct RunDir {
  fs::path dir;
  json manifest;
  FlowTrace trace;
  ProfileCurve final_curve;

  static RunDir load(const fs::path& dir) {
    RunDir r;
    r.dir = dir;
    r.manifest = io::read_json(dir / "manifest.json");
    r.trace = io::read_trace(dir / "trace.csv");
    r.final_curve = io::read_profile(dir / "final.csv", r.manifest.at("t_final").get<double>());
    return r;
  }

  double T_est() const { return manifest.at("T_est").get<double>(); }
  double lambda() const { return std::stod(manifest.at("config").at("lambda").get<std::string>()); }
  std::vector<ProfileCurve> snapshots() const { return io::read_snapshots(dir / "snapshots"); }
};

// ---------------------------------------------------------------- evolve

int cmd_evolve(const ConfigOptions& opts, const std::vector<double>& snapshot_times,
               std::ostream& out) {
  RunConfig c = opts.resolve();
  validate(c, true);
  StepControl control = step_control(c);
  control.snapshot_times = snapshot_times;

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = evolve(CassiniShape::from_lambda(*c.lambda, c.b), c.n, control);
  const double wall = seconds_since(t0);

  const fs::path dir = output_root(c);
  io::write_text(dir / "config.txt", to_text(c));
  io::write_trace(dir / "trace.csv", result.trace);
  io::write_profile(dir / "final.csv", result.final_curve, true);
  if (!result.snapshots.empty()) io::write_snapshots(dir / "snapshots", result.snapshots);

  json m = manifest_base("evolve", c, wall);
  m["outcome"] = to_string(result.report.outcome);
  m["T_est"] = result.report.T_est;
  m["t_final"] = result.final_curve.t;
  m["steps"] = result.report.steps;
  m["detail"] = result.report.detail;
  m["snapshots"] = result.snapshots.size();
  if (result.report.pinch_location) m["pinch_location"] = *result.report.pinch_location;
  io::write_json(dir / "manifest.json", m);

  out << to_string(result.report.outcome) << " T_est=" << io::format_double(result.report.T_est)
      << " steps=" << result.report.steps << '\n';
  return result.report.outcome == Outcome::NumericalFailure ? kNumerical : kOk;
}

// ---------------------------------------------------------------- search

int cmd_search(const ConfigOptions& opts, double lo, double hi, double tol, int jobs,
               std::ostream& out) {
  RunConfig c = opts.resolve();
  validate(c, false);
  if (!(lo < hi)) throw Error(ErrorKind::Usage, "search needs --lo < --hi");
  if (!(tol >= 1e-5)) throw Error(ErrorKind::Usage, "search --tol must be >= 1e-5");
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = bisect_critical(lo, hi, tol, c.n, step_control(c, true), jobs);
  const fs::path dir = output_root(c);
  io::write_json(dir / "critical.json", io::to_json(est));
  io::write_json(dir / "search_manifest.json", manifest_base("search", c, seconds_since(t0)));
  out << "lambda_c in [" << io::format_double(est.lambda_lo) << ", "
      << io::format_double(est.lambda_hi) << "] after " << est.iterations << " iterations\n";
  return kOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const ConfigOptions& opts, std::vector<double> lambdas, double from, double to,
              int count, int jobs, std::ostream& out) {
  RunConfig c = opts.resolve();
  validate(c, false);
  if (lambdas.empty()) {
    if (count < 2 || !(from < to)) throw Error(ErrorKind::Usage, "sweep needs --lambdas or --from < --to with --count >= 2");
    for (int k = 0; k < count; ++k) lambdas.push_back(from + (to - from) * k / (count - 1));
  }
  for (double l : lambdas) {
    if (!(l >= 0.0 && l < 1.0)) throw Error(ErrorKind::Usage, "sweep lambda outside [0, 1)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = sweep(lambdas, c.n, step_control(c, true), jobs);
  const fs::path dir = output_root(c);
  io::write_sweep(dir / "sweep.csv", runs);

  // H_pole_max against lambda on the supercritical branch.
  Table fig7 = make_table({"lambda", "H_pole_max"});
  for (const auto& r : runs) {
    if (is_supercritical(r.outcome)) add_row(fig7, {r.lambda, r.H_pole_max});
  }
  io::write_table(dir / "fig7.csv", fig7);
  io::write_json(dir / "sweep_manifest.json", manifest_base("sweep", c, seconds_since(t0)));

  int failed = 0;
  for (const auto& r : runs) {
    out << io::format_double(r.lambda) << ' ' << to_string(r.outcome) << '\n';
    if (!r.error.empty()) ++failed;
  }
  check_monotone(runs);
  return failed > 0 ? kNumerical : kOk;
}

// ---------------------------------------------------------------- soliton

int cmd_soliton(double speed, double extent, double tol, const std::string& out_dir,
                std::ostream& out) {
  const auto sol = solve_soliton(speed, extent, tol);
  RunConfig c;
  c.output_dir = out_dir;
  io::write_soliton(output_root(c) / "soliton.csv", sol);
  out << "tip H=" << io::format_double(sol.samples.front().H) << " samples=" << sol.samples.size()
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------- compare

// Pole blow-ups of the last `last` snapshots against the unit soliton.
void compare_critical(const RunDir& run, double window, std::size_t last, const fs::path& dir) {
  auto snaps = run.snapshots();
  if (snaps.empty()) throw Error(ErrorKind::Io, "no snapshots in " + (run.dir / "snapshots").string());
  if (last > 0 && snaps.size() > last) snaps.erase(snaps.begin(), snaps.end() - static_cast<std::ptrdiff_t>(last));
  const auto sol = solve_soliton(1.0, 2.0 * window + 1.0);

  Table dist = make_table({"t", "Linf", "L2"});
  Table prof = make_table({"t", "x", "y"});
  std::vector<RescaledCurve> rescaled;
  for (const auto& s : snaps) {
    const auto rc = pole_blowup(s, Pole::Left);
    const auto d = compare_to_soliton(rc, sol, window);
    add_row(dist, {s.t, d.linf, d.l2});
    for (std::size_t i = 0; i < rc.x.size() && rc.x[i] <= 2.0 * window; ++i) add_row(prof, {s.t, rc.x[i], rc.y[i]});
    rescaled.push_back(rc);
  }
  for (const auto& p : sol.samples) {
    if (p.x > 2.0 * window) break;
    add_row(prof, {kNaN, p.x, p.y});
  }
  Table curv = make_table({"t", "x", "H"});
  for (const auto& cp : mean_curvature_comparison(rescaled, sol)) {
    for (std::size_t i = 0; i < cp.x.size(); ++i) {
      if (cp.x[i] <= 2.0 * window) add_row(curv, {cp.t, cp.x[i], cp.H[i]});
    }
  }
  io::write_table(dir / "compare.csv", dist);
  io::write_table(dir / "fig3.csv", prof);
  io::write_table(dir / "fig4.csv", curv);
}

// Pinch-time profile near the left pole against the soliton whose speed
// equals the pole mean curvature.
void compare_tip(const RunDir& run, Table& fig2) {
  const auto& curve = run.final_curve;
  const double c = pole_mean_curvature(curve, Pole::Left);
  const double s_pole = pole_position(curve, Pole::Left);
  std::vector<double> x{0.0}, y{0.0};
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double xi = curve.S[i] - s_pole;
    if (!(xi > x.back())) break;
    x.push_back(xi);
    y.push_back(curve.R[i]);
  }
  const auto sol = solve_soliton(c, x.back());
  std::vector<double> sx, sy;
  for (const auto& p : sol.samples) {
    if (!sx.empty() && !(p.x > sx.back())) break;
    sx.push_back(p.x);
    sy.push_back(p.y);
  }
  const double lambda = run.lambda();
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ys = kNaN;
    if (x[i] <= sx.back()) ys = monotone_resample(sx, sy, std::span(&x[i], 1)).front();
    add_row(fig2, {lambda, x[i], y[i], ys});
  }
}

int cmd_compare(const std::vector<std::string>& run_dirs, double window, std::size_t last,
                bool tip, const std::string& out_dir, std::ostream& out) {
  if (run_dirs.empty()) throw Error(ErrorKind::Usage, "compare needs --run");
  RunConfig c;
  c.output_dir = out_dir;
  const fs::path dir = output_root(c);
  if (tip) {
    Table fig2 = make_table({"lambda", "x", "R", "y_soliton"});
    for (const auto& d : run_dirs) compare_tip(RunDir::load(d), fig2);
    io::write_table(dir / "fig2.csv", fig2);
    out << "wrote " << (dir / "fig2.csv").string() << '\n';
    return kOk;
  }
  compare_critical(RunDir::load(run_dirs.front()), window, last, dir);
  out << "wrote " << (dir / "compare.csv").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- fit

TraceQuantity quantity_from(const std::string& name) {
  if (name == "H_center") return TraceQuantity::H_center;
  if (name == "H_max") return TraceQuantity::H_max;
  if (name == "H_pole") return TraceQuantity::H_pole;
  throw Error(ErrorKind::Usage, "unknown --quantity '" + name + "'");
}

double quantity_of(const TraceRecord& r, TraceQuantity q) {
  switch (q) {
    case TraceQuantity::H_center: return r.H_center;
    case TraceQuantity::H_max: return r.H_max;
    case TraceQuantity::H_pole: return r.H_pole;
  }
  return kNaN;
}

int cmd_fit(const std::string& run_dir, const std::string& quantity, double decades, bool cusp,
            double cusp_window,
            const std::string& sweep_file, std::optional<double> lambda_c, double delta,
            const std::string& out_dir, std::ostream& out) {
  RunConfig c;
  c.output_dir = out_dir;
  const fs::path dir = output_root(c);

  if (!sweep_file.empty()) {
    if (!lambda_c) throw Error(ErrorKind::Usage, "exponent fit needs --lambda-c");
    const auto runs = io::read_sweep(sweep_file);
    json j = {{"lambda_c", *lambda_c}, {"fit", io::to_json(critical_exponent(runs, *lambda_c))}};
    for (const auto& s : exponent_sensitivity(runs, *lambda_c, delta)) {
      j["sensitivity"].push_back({{"lambda_c", s.lambda_c}, {"fit", io::to_json(s.fit)}});
    }
    io::write_json(dir / "exponent.json", j);
    out << "n=" << io::format_double(j["fit"]["exponent"].get<double>()) << '\n';
    return kOk;
  }

  if (run_dir.empty()) throw Error(ErrorKind::Usage, "fit needs --run or --sweep");
  const auto run = RunDir::load(run_dir);
  if (cusp) {
    const auto f = fit_cusp(run.final_curve, cusp_window);
    Table t = make_table({"x", "R", "model"});
    for (std::size_t i = 0; i < f.x.size(); ++i) add_row(t, {f.x[i], f.y[i], f.model[i]});
    io::write_table(dir / "fig5_cusp.csv", t);
    io::write_json(dir / "cusp.json", {{"K", f.K}, {"relative_misfit", f.misfit}});
    out << "K=" << io::format_double(f.K) << " misfit=" << io::format_double(f.misfit) << '\n';
    return kOk;
  }

  const TraceQuantity q = quantity_from(quantity);
  PowerFitWindow window;
  window.decades = decades;
  const auto f = fit_power(run.trace, q, run.T_est(), window);
  Table t = make_table({"t", "tau", quantity, "model"});
  for (const auto& r : run.trace.records) {
    const double tau = f.T - r.t;
    if (r.t >= f.t_lo && r.t <= f.t_hi) {
      add_row(t, {r.t, tau, quantity_of(r, q), f.prefactor * std::pow(tau, f.exponent)});
    }
  }
  io::write_table(dir / "fig5_rate.csv", t);
  io::write_json(dir / "fit.json", {{"quantity", quantity}, {"fit", io::to_json(f)}});
  out << quantity << " exponent=" << io::format_double(f.exponent) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- hermite

int cmd_hermite(int m, const std::string& run_dir, std::optional<double> T, double at,
                double window, const std::string& out_dir, std::ostream& out) {
  if (run_dir.empty()) {
    out << json(hermite(m)).dump() << '\n';
    return kOk;
  }
  RunConfig c;
  c.output_dir = out_dir;
  const fs::path dir = output_root(c);
  const auto run = RunDir::load(run_dir);
  AsymptoteParams p;
  p.m = m;
  p.T = T.value_or(run.T_est());
  const auto snaps = run.snapshots();
  if (snaps.empty()) throw Error(ErrorKind::Io, "no snapshots in " + run.dir.string());
  const double target = at * p.T;
  const auto best = std::min_element(snaps.begin(), snaps.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.t - target) < std::abs(b.t - target);
  });
  const auto f = fit_degenerate_snapshot(*best, p, window);
  Table t = make_table({"x", "y", "model"});
  for (std::size_t i = 0; i < f.x.size(); ++i) add_row(t, {f.x[i], f.y[i], f.model[i]});
  io::write_table(dir / "fig6.csv", t);
  io::write_json(dir / "degenerate.json", {{"K", f.K}, {"m", m}, {"T", p.T}, {"t", best->t},
                                           {"rms_over_sqrt2", f.misfit}});
  out << "K=" << io::format_double(f.K) << " misfit=" << io::format_double(f.misfit) << '\n';
  return kOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Domain:
    case ErrorKind::InvalidShape:
      return kUsage;
    case ErrorKind::Io:
      return kIo;
    default:
      return kNumerical;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean curvature flow of Cassini dumbbells", "neckflow"};
  app.require_subcommand(1);

  ConfigOptions evolve_opts, search_opts, sweep_opts;
  std::vector<double> snapshot_times;
  auto* evolve = app.add_subcommand("evolve", "Run one flow and write trace, snapshots, manifest");
  evolve_opts.attach(*evolve);
  evolve->add_option("--snapshot-times", snapshot_times, "Extra snapshot times");

  double lo = 0.85, hi = 0.95, tol = 1e-3;
  int jobs = 1;
  auto* search = app.add_subcommand("search", "Bisect for the critical shape parameter");
  search_opts.attach(*search);
  search->add_option("--lo", lo);
  search->add_option("--hi", hi);
  search->add_option("--tol", tol);
  search->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  std::vector<double> lambdas;
  double from = 0.5, to = 0.98;
  int count = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Classify a list of shape parameters");
  sweep_opts.attach(*sweep_cmd);
  sweep_cmd->add_option("--lambdas", lambdas);
  sweep_cmd->add_option("--from", from);
  sweep_cmd->add_option("--to", to);
  sweep_cmd->add_option("--count", count);
  sweep_cmd->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  double speed = 1.0, extent = 5.0, sol_tol = 1e-10;
  std::string out_dir;
  auto* soliton = app.add_subcommand("soliton", "Integrate the translating soliton");
  soliton->add_option("--speed", speed);
  soliton->add_option("--extent", extent);
  soliton->add_option("--tol", sol_tol);
  soliton->add_option("--out", out_dir);

  std::vector<std::string> runs;
  double window = 2.0;
  std::size_t last = 0;
  bool tip = false;
  auto* compare = app.add_subcommand("compare", "Compare rescaled profiles with the soliton");
  compare->add_option("--run", runs, "Run directory (repeatable with --tip)");
  compare->add_option("--window", window);
  compare->add_option("--last", last, "Use only the last N snapshots");
  compare->add_flag("--tip", tip, "Pinch-time profiles against speed-matched solitons");
  compare->add_option("--out", out_dir);

  std::string run_dir, quantity = "H_center", sweep_file;
  double decades = 1.0, delta = 0.002, cusp_window = 0.1;
  bool cusp = false;
  std::optional<double> lambda_c;
  auto* fit = app.add_subcommand("fit", "Blow-up rate, cusp or critical exponent fits");
  fit->add_option("--run", run_dir);
  fit->add_option("--quantity", quantity);
  fit->add_option("--decades", decades);
  fit->add_flag("--cusp", cusp);
  fit->add_option("--cusp-window", cusp_window, "Largest |x - x0| used by the cusp fit");
  fit->add_option("--sweep", sweep_file, "Sweep CSV for the critical exponent");
  fit->add_option("--lambda-c", lambda_c);
  fit->add_option("--delta", delta);
  fit->add_option("--out", out_dir);

  int m = 4;
  std::optional<double> T;
  double at = 0.99, hwindow = 2.0;
  auto* herm = app.add_subcommand("hermite", "Hermite coefficients or degenerate neckpinch fit");
  herm->add_option("--m", m);
  herm->add_option("--run", run_dir);
  herm->add_option("--T", T);
  herm->add_option("--at", at, "Snapshot time as a fraction of T");
  herm->add_option("--window", hwindow);
  herm->add_option("--out", out_dir);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*evolve) return cmd_evolve(evolve_opts, snapshot_times, out);
    if (*search) return cmd_search(search_opts, lo, hi, tol, jobs, out);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, lambdas, from, to, count, jobs, out);
    if (*soliton) return cmd_soliton(speed, extent, sol_tol, out_dir, out);
    if (*compare) return cmd_compare(runs, window, last, tip, out_dir, out);
    if (*fit) return cmd_fit(run_dir, quantity, decades, cusp, cusp_window, sweep_file, lambda_c, delta, out_dir, out);
    if (*herm) return cmd_hermite(m, run_dir, T, at, hwindow, out_dir, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const io::json::exception& e) {
    err << "error (Io): " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace neckflow::cli
