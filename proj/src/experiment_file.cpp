// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "oplearn/errors.hpp"
#include "oplearn/format.hpp"
#include "oplearn/harness.hpp"

namespace oplearn {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::size_t line,
                            const std::string& why) {
  std::string msg = "line " + std::to_string(line) + ": key '" + std::string(key) +
                    "': invalid value '" + std::string(value) + "'";
  if (!why.empty()) msg += " (" + why + ")";
  throw ConfigError(msg, line, std::string(key));
}

double parse_real(std::string_view key, std::string_view v, std::size_t line) {
  v = trim(v);
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) bad_value(key, v, line, "expected a number");
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view v, std::size_t line) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    bad_value(key, v, line, "expected a nonnegative integer");
  return out;
}

// "2^4..2^12" or a comma-separated list of counts.
std::vector<std::size_t> parse_grid(std::string_view key, std::string_view v, std::size_t line) {
  v = trim(v);
  const auto dots = v.find("..");
  if (dots != std::string_view::npos) {
    const auto lo = trim(v.substr(0, dots));
    const auto hi = trim(v.substr(dots + 2));
    if (lo.substr(0, 2) != "2^" || hi.substr(0, 2) != "2^")
      bad_value(key, v, line, "ranges are written 2^a..2^b");
    const auto a = parse_unsigned(key, lo.substr(2), line);
    const auto b = parse_unsigned(key, hi.substr(2), line);
    if (a > b || b >= 63) bad_value(key, v, line, "need a <= b < 63");
    return pow2_grid(static_cast<unsigned>(a), static_cast<unsigned>(b));
  }
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = v.substr(start, comma == std::string_view::npos ? v.npos : comma - start);
    out.push_back(parse_unsigned(key, item, line));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// fixed(J) or n_dependent(c)
TruncationPolicy parse_truncation(std::string_view key, std::string_view v, std::size_t line) {
  v = trim(v);
  const auto open = v.find('(');
  if (open == std::string_view::npos || v.back() != ')')
    bad_value(key, v, line, "expected fixed(J) or n_dependent(c)");
  const auto kind = trim(v.substr(0, open));
  const auto arg = v.substr(open + 1, v.size() - open - 2);
  if (kind == "fixed") return TruncationPolicy::fixed(parse_unsigned(key, arg, line));
  if (kind == "n_dependent") return TruncationPolicy::n_dependent(parse_real(key, arg, line));
  bad_value(key, v, line, "expected fixed(J) or n_dependent(c)");
}

template <class Fn>
auto parse_enum(std::string_view key, std::string_view v, std::size_t line, Fn fn) {
  try {
    return fn(trim(v));
  } catch (const std::invalid_argument&) {
    bad_value(key, v, line, "");
  }
}

EstimatorKind estimator_from(std::string_view v) {
  if (v == "diagonal") return EstimatorKind::diagonal;
  if (v == "matrix") return EstimatorKind::matrix;
  throw InvalidArgument("estimator");
}

ErrorKind error_from(std::string_view v) {
  if (v == "test_error") return ErrorKind::test_error;
  if (v == "excess_risk") return ErrorKind::excess_risk;
  if (v == "gen_gap") return ErrorKind::gen_gap;
  if (v == "conditional_closed_form") return ErrorKind::conditional_closed_form;
  throw InvalidArgument("error");
}

SamplerKind sampler_from(std::string_view v) {
  if (v == "auto") return SamplerKind::automatic;
  if (v == "full") return SamplerKind::full;
  if (v == "sufficient") return SamplerKind::sufficient;
  throw InvalidArgument("sampler");
}

}  // namespace

void apply_experiment_key(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                          std::size_t line) {
  key = trim(key);
  value = trim(value);
  auto& m = cfg.model;
  if (key == "truth") {
    cfg.truth = parse_enum(key, value, line, truth_kind_from_string);
  } else if (key == "estimator") {
    cfg.estimator = parse_enum(key, value, line, estimator_from);
  } else if (key == "error") {
    cfg.error = parse_enum(key, value, line, error_from);
  } else if (key == "law") {
    cfg.law = parse_enum(key, value, line, design_law_from_string);
  } else if (key == "sampler") {
    cfg.sampler = parse_enum(key, value, line, sampler_from);
  } else if (key == "alpha") {
    m.alpha = parse_real(key, value, line);
  } else if (key == "alpha_prime") {
    m.alpha_prime = parse_real(key, value, line);
  } else if (key == "z") {
    m.z = parse_real(key, value, line);
  } else if (key == "tau1") {
    m.tau1 = parse_real(key, value, line);
  } else if (key == "tau2") {
    m.tau2 = parse_real(key, value, line);
  } else if (key == "tau3") {
    m.tau3 = parse_real(key, value, line);
  } else if (key == "beta") {
    m.beta = parse_real(key, value, line);
  } else if (key == "p") {
    cfg.p_override = parse_real(key, value, line);
  } else if (key == "s") {
    cfg.s_override = parse_real(key, value, line);
  } else if (key == "gamma") {
    cfg.gamma_override = parse_real(key, value, line);
  } else if (key == "n_grid") {
    cfg.n_grid = parse_grid(key, value, line);
  } else if (key == "replications") {
    cfg.replications = parse_unsigned(key, value, line);
  } else if (key == "truncation") {
    cfg.truncation = parse_truncation(key, value, line);
  } else if (key == "fit_drop_fraction") {
    cfg.fit_drop_fraction = parse_real(key, value, line);
  } else if (key == "a_rate") {
    cfg.a_rate = parse_real(key, value, line);
  } else if (key == "galerkin_ratio") {
    cfg.galerkin_ratio = parse_unsigned(key, value, line);
  } else if (key == "seed") {
    cfg.seed = parse_unsigned(key, value, line);
  } else {
    throw ConfigError("line " + std::to_string(line) + ": unknown key '" + std::string(key) + "'",
                      line, std::string(key));
  }
}

std::vector<ExperimentConfig> parse_experiment_text(std::string_view text) {
  using Entry = std::pair<std::string, std::string>;
  struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<std::pair<Entry, std::size_t>> entries;
  };
  std::vector<std::pair<Entry, std::size_t>> defaults;
  std::vector<Section> sections;
  std::map<std::string, std::size_t> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    const auto ln = trim(raw);
    if (ln.empty()) continue;
    if (ln.front() == '[') {
      if (ln.back() != ']' || ln.size() < 3)
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header",
                          line_no, "");
      std::string name(trim(ln.substr(1, ln.size() - 2)));
      if (seen.count(name))
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate section '" + name +
                              "' (first at line " + std::to_string(seen[name]) + ")",
                          line_no, "");
      seen[name] = line_no;
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = ln.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", line_no,
                        std::string(ln));
    Entry e{std::string(trim(ln.substr(0, eq))), std::string(trim(ln.substr(eq + 1)))};
    if (e.first.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key", line_no, "");
    (sections.empty() ? defaults : sections.back().entries).push_back({e, line_no});
  }
  if (sections.empty()) throw ConfigError("no [experiment] sections found", 0, "");

  std::vector<ExperimentConfig> out;
  for (const auto& sec : sections) {
    ExperimentConfig cfg;
    cfg.name = sec.name;
    for (const auto& [e, l] : defaults) apply_experiment_key(cfg, e.first, e.second, l);
    for (const auto& [e, l] : sec.entries) apply_experiment_key(cfg, e.first, e.second, l);
    try {
      cfg.validate();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("section [" + sec.name + "] at line " + std::to_string(sec.line) + ": " +
                            ex.what(),
                        sec.line, "");
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<ExperimentConfig> load_experiment_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_text(ss.str());
}

std::string report_csv(const RateReport& r) {
  std::string out = "# schema=" + std::string(kSchemaVersion) + " experiment=" + r.config.name +
                    "\nN,mean_error,stderr,reps\n";
  for (const auto& p : r.points) {
    out += std::to_string(p.N) + ',' + format_double(p.mean_error) + ',' +
           format_double(p.stderr_) + ',' + std::to_string(p.reps) + '\n';
  }
  return out;
}

namespace {

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  const ModelConfig::Params m = resolved_params(cfg);
  nlohmann::ordered_json j;
  j["name"] = cfg.name;
  j["truth"] = to_string(cfg.truth);
  j["estimator"] = to_string(cfg.estimator);
  j["error"] = to_string(cfg.error);
  j["law"] = to_string(cfg.law);
  j["sampler"] = to_string(cfg.sampler);
  j["alpha"] = m.alpha;
  j["alpha_prime"] = m.alpha_prime;
  j["z"] = m.z;
  j["p"] = m.p;
  j["s"] = m.s;
  j["tau1"] = m.tau1;
  j["tau2"] = m.tau2;
  j["tau3"] = m.tau3;
  j["gamma"] = m.gamma;
  j["beta"] = m.beta;
  j["n_grid"] = cfg.n_grid;
  j["replications"] = cfg.replications;
  j["truncation"] = cfg.truncation.describe();
  j["fit_drop_fraction"] = cfg.fit_drop_fraction;
  if (cfg.estimator == EstimatorKind::matrix) {
    j["a_rate"] = cfg.a_rate;
    j["galerkin_ratio"] = cfg.galerkin_ratio;
  }
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

std::string report_json(const RateReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaVersion;
  j["experiment"] = r.config.name;
  j["fitted_exponent"] = r.fit.exponent;
  j["fit_stderr"] = r.fit.stderr_;
  j["fit_intercept"] = r.fit.intercept;
  j["fit_degenerate"] = r.fit.degenerate;
  j["fit_window"] = {{"first_N", r.points[r.fit_first_index].N},
                     {"last_N", r.points.back().N},
                     {"points", r.fit.points}};
  j["theory_exponent"] = r.theory.exponent;
  j["log_factor"] = to_string(r.theory.log_factor);
  j["dominant_term"] = to_string(r.theory.dominant_term);
  j["seed"] = r.config.seed;
  j["spectrum_underflows"] = r.spectrum_underflows;
  if (r.config.estimator == EstimatorKind::matrix)
    j["max_relative_residual"] = r.max_relative_residual;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"N", p.N},
                   {"modes", p.modes},
                   {"mean_error", p.mean_error},
                   {"stderr", p.stderr_},
                   {"median_error", p.median_error},
                   {"reps", p.reps},
                   {"tail_descriptor", p.tail_descriptor}});
  }
  j["per_N"] = std::move(pts);
  j["config"] = config_json(r.config);
  return j.dump(2) + "\n";
}

}  // namespace oplearn
