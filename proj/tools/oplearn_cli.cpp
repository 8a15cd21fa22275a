// SPDX-License-Identifier: Apache-2.0
// oplearn command-line front end. Talks to the library only through the C API.

#include <oplearn/oplearn.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kRuntime = 3 };

struct CliFailure {
  int code;
  std::string message;
};

void check(opl_status s, const std::string& what) {
  if (s == OPL_OK) return;
  std::string msg = what + ": " + opl_last_error();
  const int code = (s == OPL_CONFIG_ERROR || s == OPL_INVALID_ARGUMENT) ? kUsage : kRuntime;
  throw CliFailure{code, msg};
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sha256(const fs::path& p) {
  char hex[65];
  check(opl_sha256_file(p.c_str(), hex), "digest of " + p.string());
  return hex;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw CliFailure{kRuntime, "cannot write " + p.string()};
  out << text;
  if (!out) throw CliFailure{kRuntime, "failed writing " + p.string()};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{kRuntime, "cannot create " + dir.string() + ": " + ec.message()};
}

// Writes manifest.json next to the outputs, one digest per file.
void write_manifest(const fs::path& dir, const std::string& command, ordered_json config,
                    std::optional<std::uint64_t> seed, const std::string& started,
                    const std::vector<fs::path>& files) {
  ordered_json m;
  m["schema"] = opl_schema_version();
  m["artifact_version"] = opl_version();
  m["command"] = command;
  m["config"] = std::move(config);
  if (seed) m["seed"] = *seed;
  m["started_utc"] = started;
  m["finished_utc"] = utc_now();
  auto arr = ordered_json::array();
  for (const auto& f : files)
    arr.push_back({{"path", f.filename().string()}, {"sha256", sha256(f)}});
  m["outputs"] = std::move(arr);
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

const char* branch_name(opl_branch b) {
  switch (b) {
    case OPL_BRANCH_INTERIOR: return "interior";
    case OPL_BRANCH_BOUNDARY: return "boundary";
    case OPL_BRANCH_CAPPED: return "capped";
  }
  return "interior";
}

// ---- rates ----------------------------------------------------------------

struct RatesArgs {
  std::string sweep = "alpha";
  std::vector<std::string> truths{"neg_laplacian", "identity", "inv_neg_laplacian"};
  double alpha = 4.5;
  double alpha_prime = 4.5;
  double z = 0.0;
  double beta = 0.0;
  double from = 1.0;
  double to = 8.0;
  std::size_t steps = 141;
  std::string out = "out";
};

int cmd_rates(const RatesArgs& a) {
  if (a.sweep != "alpha" && a.sweep != "alpha_prime" && a.sweep != "z")
    throw CliFailure{kUsage, "--sweep must be alpha, alpha_prime or z"};
  if (a.steps < 2) throw CliFailure{kUsage, "--steps must be at least 2"};
  const std::string started = utc_now();
  ensure_dir(a.out);
  std::ostringstream csv;
  csv << "# schema=" << opl_schema_version() << " rates sweep=" << a.sweep << "\n";
  csv << "sweep_value,truth,alpha,alpha_prime,p,s,exponent,branch,log_factor,dominant_term\n";
  for (const auto& truth : a.truths) {
    double s_star = 0.0;
    check(opl_truth_s_star(truth.c_str(), &s_star), "truth '" + truth + "'");
    for (std::size_t i = 0; i < a.steps; ++i) {
      const double v = a.from + (a.to - a.from) * static_cast<double>(i) /
                                    static_cast<double>(a.steps - 1);
      double alpha = a.alpha, alpha_prime = a.alpha_prime, z = a.z;
      if (a.sweep == "alpha") alpha = v;
      if (a.sweep == "alpha_prime") alpha_prime = v;
      if (a.sweep == "z") z = v;
      const double p = s_star + 0.5 + z;
      opl_rate r{};
      const opl_status st = a.beta > 0.0
                                ? opl_colored_rate(alpha, alpha_prime, p, s_star, a.beta, &r)
                                : opl_upper_rate(alpha, alpha_prime, p, s_star, &r);
      csv << shortest(v) << ',' << truth << ',' << shortest(alpha) << ',' << shortest(alpha_prime)
          << ',' << shortest(p) << ',' << shortest(s_star) << ',';
      if (st == OPL_INVALID_ARGUMENT) {
        csv << "invalid(A5),invalid(A5),,\n";
        continue;
      }
      check(st, "rate evaluation");
      csv << shortest(r.exponent) << ',' << branch_name(r.branch) << ','
          << (r.log_factor == OPL_LOG_N ? "log_N" : "none") << ','
          << (r.dominant_term == OPL_DOMINANT_BIAS ? "bias" : "variance") << '\n';
    }
  }
  const fs::path file = fs::path(a.out) / ("rates_" + a.sweep + ".csv");
  write_text(file, csv.str());
  ordered_json cfg{{"sweep", a.sweep}, {"truths", a.truths}, {"alpha", a.alpha},
                   {"alpha_prime", a.alpha_prime}, {"z", a.z}, {"beta", a.beta},
                   {"from", a.from}, {"to", a.to}, {"steps", a.steps}};
  write_manifest(a.out, "rates", cfg, std::nullopt, started, {file});
  std::cout << "wrote " << file.string() << "\n";
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<double> fit_drop_fraction;
  std::vector<std::string> only;
};

int cmd_simulate(const SimulateArgs& a) {
  const std::string started = utc_now();
  opl_experiment_set* set = nullptr;
  check(opl_experiments_load(a.config.c_str(), &set), "config " + a.config);
  std::unique_ptr<opl_experiment_set, decltype(&opl_experiments_free)> guard(
      set, opl_experiments_free);
  if (a.seed) check(opl_experiments_override(set, "seed", std::to_string(*a.seed).c_str()), "--seed");
  if (a.fit_drop_fraction)
    check(opl_experiments_override(set, "fit_drop_fraction", shortest(*a.fit_drop_fraction).c_str()),
          "--fit-drop-fraction");
  ensure_dir(a.out);

  std::vector<fs::path> files;
  auto names = ordered_json::array();
  std::size_t ran = 0;
  for (std::size_t i = 0; i < opl_experiments_count(set); ++i) {
    const std::string name = opl_experiments_name(set, i);
    if (!a.only.empty() && std::find(a.only.begin(), a.only.end(), name) == a.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    opl_report* rep = nullptr;
    check(opl_run_experiment(set, i, a.workers, &rep), "experiment " + name);
    std::unique_ptr<opl_report, decltype(&opl_report_free)> rguard(rep, opl_report_free);
    const fs::path csv = fs::path(a.out) / (name + ".csv");
    const fs::path json = fs::path(a.out) / (name + ".json");
    write_text(csv, opl_report_csv(rep));
    write_text(json, opl_report_json(rep));
    files.push_back(csv);
    files.push_back(json);
    names.push_back(name);
    opl_fit_summary fit{};
    check(opl_report_fit(rep, &fit), "fit summary");
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-28s fitted %.3f +/- %.3f  theory %.3f%s  (%.1f s)\n", name.c_str(),
                fit.fitted_exponent, fit.fit_stderr, fit.theory_exponent,
                fit.log_factor == OPL_LOG_N ? " x log N" : "", dt);
    std::fflush(stdout);
    ++ran;
  }
  if (ran == 0) throw CliFailure{kUsage, "no experiment matched --only"};
  ordered_json cfg{{"config_file", a.config},
                   {"config_sha256", sha256(a.config)},
                   {"experiments", names},
                   {"workers", a.workers}};
  if (a.fit_drop_fraction) cfg["fit_drop_fraction"] = *a.fit_drop_fraction;
  write_manifest(a.out, "simulate", cfg, a.seed, started, files);
  return kOk;
}

// ---- covdecay -------------------------------------------------------------

struct CovdecayArgs {
  std::vector<double> alpha_tilde{1.0, 1.5, 2.0, 3.0};
  std::size_t j_min = 256;
  std::size_t j_max = 32768;
  std::size_t points = 16;
  std::size_t K = std::size_t{1} << 21;
  std::string out = "out";
};

int cmd_covdecay(const CovdecayArgs& a) {
  if (a.j_min == 0 || a.j_max <= a.j_min || a.points < 2)
    throw CliFailure{kUsage, "need 1 <= j-min < j-max and points >= 2"};
  const std::string started = utc_now();
  ensure_dir(a.out);
  // Log-spaced modes, deduplicated after rounding.
  std::vector<std::size_t> js;
  for (std::size_t i = 0; i < a.points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(a.points - 1);
    const auto j = static_cast<std::size_t>(
        std::llround(std::exp(std::log(double(a.j_min)) * (1 - t) + std::log(double(a.j_max)) * t)));
    if (js.empty() || js.back() != j) js.push_back(j);
  }
  std::ostringstream series, fits;
  series << "# schema=" << opl_schema_version() << " covdecay K=" << a.K << "\n"
         << "alpha_tilde,j,theta_sq,last_term\n";
  fits << "# schema=" << opl_schema_version() << " covdecay fit j=[" << a.j_min << ","
       << a.j_max << "]\n"
       << "alpha_tilde,fitted_decay,fit_stderr,points\n";
  for (double at : a.alpha_tilde) {
    std::vector<double> values(js.size()), last(js.size());
    check(opl_covdecay(at, js.data(), js.size(), a.K, values.data(), last.data()), "covdecay");
    std::vector<double> x(js.begin(), js.end());
    for (std::size_t i = 0; i < js.size(); ++i)
      series << shortest(at) << ',' << js[i] << ',' << shortest(values[i]) << ','
             << shortest(last[i]) << '\n';
    double slope = 0.0, se = 0.0;
    check(opl_loglog_slope(x.data(), values.data(), x.size(), &slope, &se), "decay fit");
    fits << shortest(at) << ',' << shortest(-slope) << ',' << shortest(se) << ',' << js.size()
         << '\n';
    std::printf("alpha_tilde %-5s fitted 2*alpha = %.3f +/- %.3f\n", shortest(at).c_str(), -slope, se);
  }
  const fs::path f1 = fs::path(a.out) / "covdecay.csv";
  const fs::path f2 = fs::path(a.out) / "covdecay_fit.csv";
  write_text(f1, series.str());
  write_text(f2, fits.str());
  ordered_json cfg{{"alpha_tilde", a.alpha_tilde}, {"j_min", a.j_min}, {"j_max", a.j_max},
                   {"points", a.points}, {"K", a.K}};
  write_manifest(a.out, "covdecay", cfg, std::nullopt, started, {f1, f2});
  return kOk;
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> suites;
  std::uint64_t seed = 0x5eed;
  bool inject_gap_sign_error = false;
  std::string out;
};

int cmd_validate(const ValidateArgs& a) {
  std::vector<std::string> suites = a.suites;
  if (suites.empty() || (suites.size() == 1 && suites[0] == "all")) {
    suites.clear();
    for (std::size_t i = 0; i < opl_validation_suite_count(); ++i)
      suites.emplace_back(opl_validation_suite_name(i));
  }
  bool all_ok = true;
  ordered_json report = ordered_json::array();
  for (const auto& name : suites) {
    opl_validation* v = nullptr;
    check(opl_validate(name.c_str(), a.seed, a.inject_gap_sign_error ? 1 : 0, &v),
          "suite " + name);
    std::unique_ptr<opl_validation, decltype(&opl_validation_free)> guard(v, opl_validation_free);
    const bool ok = opl_validation_passed(v) != 0;
    all_ok = all_ok && ok;
    std::printf("suite %s: %s\n", name.c_str(), ok ? "pass" : "FAIL");
    ordered_json checks = ordered_json::array();
    for (std::size_t i = 0; i < opl_validation_check_count(v); ++i) {
      opl_check c{};
      check(opl_validation_check(v, i, &c), "check");
      std::printf("  %-4s %-40s observed %-12.4g expected %-8.4g tolerance %-8.4g %s\n",
                  c.passed ? "ok" : "FAIL", c.name, c.observed, c.expected, c.tolerance, c.detail);
      checks.push_back({{"name", c.name}, {"passed", c.passed != 0}, {"observed", c.observed},
                        {"expected", c.expected}, {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    }
    report.push_back({{"suite", name}, {"passed", ok}, {"checks", std::move(checks)}});
  }
  if (!a.out.empty()) {
    ordered_json doc{{"schema", opl_schema_version()}, {"seed", a.seed},
                     {"inject_gap_sign_error", a.inject_gap_sign_error}, {"suites", report}};
    write_text(a.out, doc.dump(2) + "\n");
  }
  return all_ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oplearn: Bayesian linear operator learning rates and simulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(opl_version()));

  RatesArgs ra;
  auto* rates = app.add_subcommand("rates", "theoretical rate exponents along a parameter sweep");
  rates->add_option("--sweep", ra.sweep, "alpha, alpha_prime or z")->capture_default_str();
  rates->add_option("--truth", ra.truths, "truths to include")->capture_default_str();
  rates->add_option("--alpha", ra.alpha)->capture_default_str();
  rates->add_option("--alpha-prime", ra.alpha_prime)->capture_default_str();
  rates->add_option("--z", ra.z, "prior shift, p = s* + 1/2 + z")->capture_default_str();
  rates->add_option("--beta", ra.beta, "colored noise exponent")->capture_default_str();
  rates->add_option("--from", ra.from)->capture_default_str();
  rates->add_option("--to", ra.to)->capture_default_str();
  rates->add_option("--steps", ra.steps)->capture_default_str();
  rates->add_option("--out", ra.out, "output directory")->capture_default_str();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "run Monte Carlo rate experiments from a config file");
  sim->add_option("--config", sa.config, "experiment file")->required();
  sim->add_option("--out", sa.out, "output directory")->capture_default_str();
  sim->add_option("--seed", sa.seed, "override every experiment's seed");
  sim->add_option("--workers", sa.workers, "worker threads")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--fit-drop-fraction", sa.fit_drop_fraction,
                  "fraction of the smallest N values left out of the fit")
      ->check(CLI::Range(0.0, 0.99));
  sim->add_option("--only", sa.only, "run only the named experiments");

  CovdecayArgs ca;
  auto* cov = app.add_subcommand("covdecay", "output-basis variance decay of a sine-diagonal covariance");
  cov->add_option("--alpha-tilde", ca.alpha_tilde)->capture_default_str();
  cov->add_option("--j-min", ca.j_min)->capture_default_str();
  cov->add_option("--j-max", ca.j_max)->capture_default_str();
  cov->add_option("--points", ca.points, "log-spaced modes in the window")->capture_default_str();
  cov->add_option("--K", ca.K, "series terms")->capture_default_str();
  cov->add_option("--out", ca.out, "output directory")->capture_default_str();

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "run property suites");
  val->add_option("--suite", va.suites, "oracle, identities, lemmas, parseval or all");
  val->add_option("--seed", va.seed)->capture_default_str();
  val->add_flag("--inject-gap-sign-error", va.inject_gap_sign_error,
                "mutation fixture: flip the sign of the second gap term");
  val->add_option("--out", va.out, "optional JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*rates) return cmd_rates(ra);
    if (*sim) return cmd_simulate(sa);
    if (*cov) return cmd_covdecay(ca);
    if (*val) return cmd_validate(va);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
