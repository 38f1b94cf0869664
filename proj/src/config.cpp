#include "neckflow/config.hpp"

#include <charconv>
#include <sstream>

#include "neckflow/error.hpp"
#include "neckflow/io.hpp"

namespace neckflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, const std::string& why) {
  throw Error(ErrorKind::Usage, "config field '" + std::string(key) + "': " + why);
}

double real(std::string_view key, std::string_view v) {
  try {
    return io::parse_double(v);
  } catch (const Error&) {
    bad(key, "expected a number, got '" + std::string(v) + "'");
  }
}

template <class Int>
Int integer(std::string_view key, std::string_view v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    bad(key, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool boolean(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, "expected true or false, got '" + std::string(v) + "'");
}

}  // namespace

void assign(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "lambda") c.lambda = real(key, value);
  else if (key == "b") c.b = real(key, value);
  else if (key == "n") c.n = integer<std::size_t>(key, value);
  else if (key == "safety") c.safety = real(key, value);
  else if (key == "eps_pinch") c.eps_pinch = real(key, value);
  else if (key == "eps_extinct") c.eps_extinct = real(key, value);
  else if (key == "a2_cap") c.a2_cap = real(key, value);
  else if (key == "dt_min") c.dt_min = real(key, value);
  else if (key == "max_steps") c.max_steps = integer<std::int64_t>(key, value);
  else if (key == "snapshot_dt") c.snapshot_dt = real(key, value);
  else if (key == "snapshot_h_growth") c.snapshot_h_growth = real(key, value);
  else if (key == "trace_every") c.trace_every = integer<int>(key, value);
  else if (key == "stop_early") c.stop_early = boolean(key, value);
  else if (key == "output_dir") c.output_dir = std::string(value);
  else bad(key, "unknown key");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Usage, "config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
    }
    assign(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path));
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  auto put = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) put(k, io::format_double(*v));
  };
  opt("lambda", c.lambda);
  put("b", io::format_double(c.b));
  put("n", std::to_string(c.n));
  put("safety", io::format_double(c.safety));
  opt("eps_pinch", c.eps_pinch);
  opt("eps_extinct", c.eps_extinct);
  opt("a2_cap", c.a2_cap);
  opt("dt_min", c.dt_min);
  put("max_steps", std::to_string(c.max_steps));
  put("snapshot_dt", io::format_double(c.snapshot_dt));
  put("snapshot_h_growth", io::format_double(c.snapshot_h_growth));
  put("trace_every", std::to_string(c.trace_every));
  if (c.stop_early) put("stop_early", *c.stop_early ? "true" : "false");
  if (!c.output_dir.empty()) put("output_dir", c.output_dir);
  return os.str();
}

StepControl step_control(const RunConfig& c, bool early_by_default) {
  StepControl s = StepControl::for_scale(c.b);
  s.safety = c.safety;
  if (c.eps_pinch) s.eps_pinch = *c.eps_pinch;
  if (c.eps_extinct) s.eps_extinct = *c.eps_extinct;
  if (c.a2_cap) s.a2_cap = *c.a2_cap;
  if (c.dt_min) s.dt_min = *c.dt_min;
  s.max_steps = c.max_steps;
  s.snapshot_dt = c.snapshot_dt;
  s.snapshot_h_growth = c.snapshot_h_growth;
  s.trace_every = c.trace_every;
  s.stop_when_convex = c.stop_early.value_or(early_by_default);
  s.stop_when_neck_opens = s.stop_when_convex;
  return s;
}

void validate(const RunConfig& c, bool require_lambda) {
  if (require_lambda && !c.lambda) bad("lambda", "required");
  if (c.lambda && !(*c.lambda >= 0.0 && *c.lambda < 1.0)) bad("lambda", "must lie in [0, 1)");
  if (!(c.b > 0.0)) bad("b", "must be positive");
  if (c.n < 16) bad("n", "must be at least 16");
  try {
    step_control(c).validate();
  } catch (const Error& e) {
    // StepControl names its own field; surface it as a usage error.
    throw Error(ErrorKind::Usage, std::string("config ") + e.what());
  }
}

}  // namespace neckflow
