// SPDX-License-Identifier: Apache-2.0
#include "oplearn/oplearn.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "oplearn/errors.hpp"
#include "oplearn/format.hpp"
#include "oplearn/harness.hpp"
#include "oplearn/spectra.hpp"
#include "oplearn/theory.hpp"
#include "oplearn/validation.hpp"

struct opl_experiment_set {
  std::vector<oplearn::ExperimentConfig> configs;
};

struct opl_report {
  oplearn::RateReport report;
  std::string csv;
  std::string json;
};

struct opl_validation {
  oplearn::SuiteReport report;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_error_line = 0;

opl_status fail(opl_status s, const std::string& msg, std::size_t line = 0) {
  g_last_error = msg;
  g_last_error_line = line;
  return s;
}

// Maps library exceptions onto status codes at the boundary.
template <class F>
opl_status guarded(F&& f) noexcept {
  try {
    f();
    return OPL_OK;
  } catch (const oplearn::DimensionMismatch& e) {
    return fail(OPL_DIMENSION_MISMATCH, e.what());
  } catch (const oplearn::ConfigError& e) {
    return fail(OPL_CONFIG_ERROR, e.what(), e.line());
  } catch (const oplearn::IoError& e) {
    return fail(OPL_IO_ERROR, e.what());
  } catch (const oplearn::NumericalError& e) {
    return fail(OPL_NUMERICAL_ERROR, e.what());
  } catch (const oplearn::ExperimentError& e) {
    return fail(OPL_NUMERICAL_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(OPL_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(OPL_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(OPL_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(OPL_INTERNAL_ERROR, "unknown error");
  }
}

opl_status null_arg(const char* who) {
  return fail(OPL_INVALID_ARGUMENT, std::string(who) + ": null argument");
}

void fill_rate(const oplearn::RatePrediction& r, oplearn::RhoBranch branch, opl_rate* out) {
  out->exponent = r.exponent;
  out->variance_exponent = r.variance_exponent;
  out->bias_exponent = r.bias_exponent;
  out->log_factor = r.log_factor == oplearn::LogFactor::log_N ? OPL_LOG_N : OPL_LOG_NONE;
  out->dominant_term =
      r.dominant_term == oplearn::DominantTerm::bias ? OPL_DOMINANT_BIAS : OPL_DOMINANT_VARIANCE;
  switch (branch) {
    case oplearn::RhoBranch::interior: out->branch = OPL_BRANCH_INTERIOR; break;
    case oplearn::RhoBranch::boundary: out->branch = OPL_BRANCH_BOUNDARY; break;
    case oplearn::RhoBranch::capped: out->branch = OPL_BRANCH_CAPPED; break;
  }
}

}  // namespace

extern "C" {

const char* opl_last_error(void) { return g_last_error.c_str(); }
size_t opl_last_error_line(void) { return g_last_error_line; }
const char* opl_version(void) { return "0.1.0"; }
const char* opl_schema_version(void) { return oplearn::kSchemaVersion; }

const char* opl_status_string(opl_status s) {
  switch (s) {
    case OPL_OK: return "ok";
    case OPL_INVALID_ARGUMENT: return "invalid argument";
    case OPL_DIMENSION_MISMATCH: return "dimension mismatch";
    case OPL_NUMERICAL_ERROR: return "numerical error";
    case OPL_CONFIG_ERROR: return "configuration error";
    case OPL_IO_ERROR: return "i/o error";
    case OPL_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

opl_status opl_truth_s_star(const char* truth, double* out) {
  if (!truth || !out) return null_arg("opl_truth_s_star");
  return guarded([&] {
    const auto kind = oplearn::truth_kind_from_string(truth);
    if (kind == oplearn::TruthKind::custom)
      throw oplearn::InvalidArgument("custom truths have no fixed s*");
    *out = oplearn::truth_s_star(kind);
  });
}

opl_status opl_upper_rate(double alpha, double alpha_prime, double p, double s, opl_rate* out) {
  if (!out) return null_arg("opl_upper_rate");
  return guarded([&] {
    fill_rate(oplearn::upper_rate_exponent(alpha, alpha_prime, p, s),
              oplearn::rho_branch(alpha, alpha_prime), out);
  });
}

opl_status opl_colored_rate(double alpha, double alpha_prime, double p, double s, double beta,
                            opl_rate* out) {
  if (!out) return null_arg("opl_colored_rate");
  return guarded([&] {
    fill_rate(oplearn::colored_rate_exponent(alpha, alpha_prime, p, s, beta),
              oplearn::rho_branch(alpha - beta, alpha_prime), out);
  });
}

opl_status opl_excess_risk_rate(double alpha, double p, double s, opl_rate* out) {
  if (!out) return null_arg("opl_excess_risk_rate");
  return guarded([&] {
    fill_rate(oplearn::excess_risk_exponents(alpha, p, s).upper,
              oplearn::rho_branch(alpha, alpha), out);
  });
}

opl_status opl_gap_rate(double alpha, double p, opl_rate* out) {
  if (!out) return null_arg("opl_gap_rate");
  return guarded([&] {
    fill_rate(oplearn::gap_rate_exponent(alpha, p), oplearn::RhoBranch::interior, out);
  });
}

opl_status opl_rho_n(double alpha, double alpha_prime, double p, double N, double* out) {
  if (!out) return null_arg("opl_rho_n");
  return guarded([&] { *out = oplearn::rho_N(alpha, alpha_prime, p, N); });
}

opl_status opl_j_n(double alpha, double p, double N, size_t* out) {
  if (!out) return null_arg("opl_j_n");
  return guarded([&] { *out = oplearn::J_N(alpha, p, N); });
}

opl_status opl_contraction_rate(double alpha, double alpha_prime, double p, double s, double N,
                                double* out) {
  if (!out) return null_arg("opl_contraction_rate");
  return guarded([&] { *out = oplearn::contraction_rate(alpha, alpha_prime, p, s, N); });
}

opl_status opl_covdecay(double alpha_tilde, const size_t* j, size_t count, size_t K,
                        double* values, double* last_terms) {
  if ((count > 0 && (!j || !values))) return null_arg("opl_covdecay");
  return guarded([&] {
    if (K == 0) throw oplearn::InvalidArgument("opl_covdecay: K must be positive");
    const oplearn::SpectralSequence lambda_sq = oplearn::matern_spectrum(15.0, alpha_tilde, K);
    for (size_t i = 0; i < count; ++i) {
      if (j[i] == 0) throw oplearn::InvalidArgument("opl_covdecay: modes start at 1");
      const auto sum = oplearn::cross_basis_variance(lambda_sq, j[i], K);
      values[i] = sum.value;
      if (last_terms) last_terms[i] = sum.last_term;
    }
  });
}

opl_status opl_loglog_slope(const double* x, const double* value, size_t count, double* slope,
                            double* slope_stderr) {
  if (!x || !value || !slope) return null_arg("opl_loglog_slope");
  return guarded([&] {
    if (count < 2) throw oplearn::InvalidArgument("opl_loglog_slope: need at least 2 points");
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(count), ly(count);
    for (size_t i = 0; i < count; ++i) {
      if (!(x[i] > 0.0) || !(value[i] > 0.0))
        throw oplearn::InvalidArgument("opl_loglog_slope: values must be positive");
      lx[i] = std::log(x[i]);
      ly[i] = std::log(value[i]);
      mx += lx[i];
      my += ly[i];
    }
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < count; ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw oplearn::InvalidArgument("opl_loglog_slope: x values coincide");
    const double b = sxy / sxx;
    *slope = b;
    if (slope_stderr) {
      double ssr = 0.0;
      for (size_t i = 0; i < count; ++i) {
        const double r = ly[i] - (my + b * (lx[i] - mx));
        ssr += r * r;
      }
      *slope_stderr = count > 2 ? std::sqrt(ssr / static_cast<double>(count - 2) / sxx) : 0.0;
    }
  });
}

opl_status opl_experiments_load(const char* path, opl_experiment_set** out) {
  if (!path || !out) return null_arg("opl_experiments_load");
  *out = nullptr;
  return guarded([&] {
    auto set = std::make_unique<opl_experiment_set>();
    set->configs = oplearn::load_experiment_file(path);
    *out = set.release();
  });
}

opl_status opl_experiments_parse(const char* text, opl_experiment_set** out) {
  if (!text || !out) return null_arg("opl_experiments_parse");
  *out = nullptr;
  return guarded([&] {
    auto set = std::make_unique<opl_experiment_set>();
    set->configs = oplearn::parse_experiment_text(text);
    *out = set.release();
  });
}

size_t opl_experiments_count(const opl_experiment_set* set) {
  return set ? set->configs.size() : 0;
}

const char* opl_experiments_name(const opl_experiment_set* set, size_t index) {
  if (!set || index >= set->configs.size()) return nullptr;
  return set->configs[index].name.c_str();
}

opl_status opl_experiments_override(opl_experiment_set* set, const char* key, const char* value) {
  if (!set || !key || !value) return null_arg("opl_experiments_override");
  return guarded([&] {
    std::vector<oplearn::ExperimentConfig> updated = set->configs;
    for (auto& cfg : updated) {
      oplearn::apply_experiment_key(cfg, key, value);
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw oplearn::ConfigError(std::string("override '") + key + "': " + e.what(), 0, key);
      }
    }
    set->configs = std::move(updated);
  });
}

void opl_experiments_free(opl_experiment_set* set) { delete set; }

opl_status opl_run_experiment(const opl_experiment_set* set, size_t index, unsigned workers,
                              opl_report** out) {
  if (!set || !out) return null_arg("opl_run_experiment");
  *out = nullptr;
  if (index >= set->configs.size())
    return fail(OPL_INVALID_ARGUMENT, "opl_run_experiment: index out of range");
  return guarded([&] {
    auto rep = std::make_unique<opl_report>();
    rep->report = oplearn::run_experiment(set->configs[index], workers);
    rep->csv = oplearn::report_csv(rep->report);
    rep->json = oplearn::report_json(rep->report);
    *out = rep.release();
  });
}

const char* opl_report_csv(const opl_report* report) {
  return report ? report->csv.c_str() : nullptr;
}

const char* opl_report_json(const opl_report* report) {
  return report ? report->json.c_str() : nullptr;
}

opl_status opl_report_fit(const opl_report* report, opl_fit_summary* out) {
  if (!report || !out) return null_arg("opl_report_fit");
  const auto& r = report->report;
  out->fitted_exponent = r.fit.exponent;
  out->fit_stderr = r.fit.stderr_;
  out->intercept = r.fit.intercept;
  out->theory_exponent = r.theory.exponent;
  out->log_factor = r.theory.log_factor == oplearn::LogFactor::log_N ? OPL_LOG_N : OPL_LOG_NONE;
  out->degenerate = r.fit.degenerate ? 1 : 0;
  out->fit_first_index = r.fit_first_index;
  return OPL_OK;
}

size_t opl_report_point_count(const opl_report* report) {
  return report ? report->report.points.size() : 0;
}

opl_status opl_report_point(const opl_report* report, size_t index, opl_rate_point* out) {
  if (!report || !out) return null_arg("opl_report_point");
  if (index >= report->report.points.size())
    return fail(OPL_INVALID_ARGUMENT, "opl_report_point: index out of range");
  const auto& p = report->report.points[index];
  *out = {p.N, p.modes, p.mean_error, p.stderr_, p.median_error, p.reps, p.tail_descriptor};
  return OPL_OK;
}

void opl_report_free(opl_report* report) { delete report; }

size_t opl_validation_suite_count(void) { return oplearn::validation_suites().size(); }

const char* opl_validation_suite_name(size_t index) {
  const auto& names = oplearn::validation_suites();
  return index < names.size() ? names[index].c_str() : nullptr;
}

opl_status opl_validate(const char* suite, uint64_t seed, int inject_gap_sign_error,
                        opl_validation** out) {
  if (!suite || !out) return null_arg("opl_validate");
  *out = nullptr;
  return guarded([&] {
    oplearn::ValidationOptions opts;
    opts.seed = seed;
    opts.inject_gap_sign_error = inject_gap_sign_error != 0;
    auto v = std::make_unique<opl_validation>();
    v->report = oplearn::run_validation_suite(suite, opts);
    *out = v.release();
  });
}

int opl_validation_passed(const opl_validation* v) { return v && v->report.passed() ? 1 : 0; }

size_t opl_validation_check_count(const opl_validation* v) {
  return v ? v->report.checks.size() : 0;
}

opl_status opl_validation_check(const opl_validation* v, size_t index, opl_check* out) {
  if (!v || !out) return null_arg("opl_validation_check");
  if (index >= v->report.checks.size())
    return fail(OPL_INVALID_ARGUMENT, "opl_validation_check: index out of range");
  const auto& c = v->report.checks[index];
  *out = {c.name.c_str(), c.passed ? 1 : 0, c.observed, c.expected, c.tolerance,
          c.detail.c_str()};
  return OPL_OK;
}

void opl_validation_free(opl_validation* v) { delete v; }

opl_status opl_sha256_file(const char* path, char* out) {
  if (!path || !out) return null_arg("opl_sha256_file");
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(OPL_IO_ERROR, std::string("cannot open '") + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    return fail(OPL_INTERNAL_ERROR, "sha256 initialization failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const int ok = EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  if (ok != 1 || in.bad()) return fail(OPL_IO_ERROR, std::string("failed reading '") + path + "'");
  for (unsigned int i = 0; i < len; ++i) std::snprintf(out + 2 * i, 3, "%02x", md[i]);
  out[2 * len] = '\0';
  return OPL_OK;
}

}  // extern "C"
