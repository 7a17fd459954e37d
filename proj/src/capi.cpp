#include "phaseret.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "phaseret/harness.hpp"
#include "phaseret/serial.hpp"

struct pr_matrix {
  phaseret::MeasurementMatrix value;
};

struct pr_table {
  phaseret::ResultTable value;
};

namespace {

thread_local std::string g_last_error;

pr_status to_status(phaseret::ErrorCode code) {
  switch (code) {
    case phaseret::ErrorCode::validation: return PR_ERR_VALIDATION;
    case phaseret::ErrorCode::numerical: return PR_ERR_NUMERICAL;
    case phaseret::ErrorCode::io: return PR_ERR_IO;
  }
  return PR_ERR_UNKNOWN;
}

template <typename Fn>
pr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PR_OK;
  } catch (const phaseret::Error& err) {
    g_last_error = err.what();
    return to_status(err.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PR_ERR_UNKNOWN;
  } catch (const std::exception& err) {
    g_last_error = err.what();
    return PR_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return PR_ERR_UNKNOWN;
  }
}

phaseret::ExperimentConfig parse_config(const char* config_json) {
  if (config_json == nullptr || *config_json == '\0') {
    phaseret::ExperimentConfig config;
    phaseret::validate(config);
    return config;
  }
  return phaseret::config_from_json(config_json);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require_arg(bool ok, const char* message) {
  phaseret::require(ok, message, phaseret::ErrorCode::validation);
}

phaseret::EmitFormat parse_format(const char* format) {
  require_arg(format != nullptr, "format must be csv or json");
  const std::string f = format;
  if (f == "csv") return phaseret::EmitFormat::csv;
  if (f == "json") return phaseret::EmitFormat::json;
  phaseret::fail(phaseret::ErrorCode::validation, "format must be csv or json");
}

}  // namespace

extern "C" {

const char* pr_last_error(void) { return g_last_error.c_str(); }

pr_status pr_design(const char* config_json, const char* label, double snr_db, pr_matrix** out) {
  return guarded([&] {
    require_arg(out != nullptr, "pr_design: out is null");
    require_arg(label != nullptr, "pr_design: label is null");
    *out = nullptr;
    phaseret::ExperimentConfig config = parse_config(config_json);
    const std::string name = label;
    phaseret::require(phaseret::is_known_label(name), "unknown matrix label '" + name + "'");
    const double sigma_w_sq = std::pow(10.0, -snr_db / 10.0);
    phaseret::MeasurementMatrix matrix;
    if (phaseret::is_per_trial_label(name)) {
      phaseret::RngStream rng(config.master_seed,
                              phaseret::derive_stream("matrix", phaseret::derive_stream(name),
                                                      static_cast<std::uint64_t>(config.m)));
      if (name == "RG") {
        const phaseret::DesignBudget budget{config.budget_p.value_or(double(config.m)), config.m,
                                            config.n, sigma_w_sq};
        matrix = phaseret::random_gaussian_matrix(budget, rng);
      } else {
        matrix = phaseret::coded_diffraction_matrix(config.m / config.n, config.n, rng);
      }
    } else {
      const phaseret::CovariancePair covariance = phaseret::covariance_for(config);
      matrix = phaseret::design_for_label(name, config, covariance, config.m, sigma_w_sq);
    }
    *out = new pr_matrix{std::move(matrix)};
  });
}

int64_t pr_matrix_rows(const pr_matrix* matrix) {
  return matrix == nullptr ? 0 : matrix->value.entries.rows();
}

int64_t pr_matrix_cols(const pr_matrix* matrix) {
  return matrix == nullptr ? 0 : matrix->value.entries.cols();
}

double pr_matrix_budget(const pr_matrix* matrix) {
  return matrix == nullptr ? 0.0 : matrix->value.budget;
}

const char* pr_matrix_label(const pr_matrix* matrix) {
  return matrix == nullptr ? "" : matrix->value.label.c_str();
}

pr_status pr_matrix_entry(const pr_matrix* matrix, int64_t row, int64_t col, double* re,
                          double* im) {
  return guarded([&] {
    require_arg(matrix != nullptr, "pr_matrix_entry: matrix is null");
    require_arg(re != nullptr && im != nullptr, "pr_matrix_entry: output pointers are null");
    require_arg(row >= 0 && row < matrix->value.entries.rows() && col >= 0 &&
                    col < matrix->value.entries.cols(),
                "pr_matrix_entry: index out of range");
    const phaseret::cxd v = matrix->value.entries(row, col);
    *re = v.real();
    *im = v.imag();
  });
}

pr_status pr_matrix_to_json(const pr_matrix* matrix, char** out_json) {
  return guarded([&] {
    require_arg(matrix != nullptr, "pr_matrix_to_json: matrix is null");
    require_arg(out_json != nullptr, "pr_matrix_to_json: out is null");
    *out_json = copy_string(phaseret::matrix_to_json(matrix->value));
  });
}

pr_status pr_matrix_from_json(const char* json, pr_matrix** out) {
  return guarded([&] {
    require_arg(json != nullptr, "pr_matrix_from_json: json is null");
    require_arg(out != nullptr, "pr_matrix_from_json: out is null");
    *out = new pr_matrix{phaseret::matrix_from_json(json)};
  });
}

pr_status pr_matrix_save(const pr_matrix* matrix, const char* path) {
  return guarded([&] {
    require_arg(matrix != nullptr, "pr_matrix_save: matrix is null");
    require_arg(path != nullptr, "pr_matrix_save: path is null");
    phaseret::save_matrix(matrix->value, path);
  });
}

pr_status pr_matrix_load(const char* path, pr_matrix** out) {
  return guarded([&] {
    require_arg(path != nullptr, "pr_matrix_load: path is null");
    require_arg(out != nullptr, "pr_matrix_load: out is null");
    *out = new pr_matrix{phaseret::load_matrix(path)};
  });
}

void pr_matrix_free(pr_matrix* matrix) { delete matrix; }

pr_status pr_run_snr_sweep(const char* config_json, pr_table** out) {
  return guarded([&] {
    require_arg(out != nullptr, "pr_run_snr_sweep: out is null");
    *out = new pr_table{phaseret::run_snr_sweep(parse_config(config_json))};
  });
}

pr_status pr_run_complexity_sweep(const char* config_json, pr_table** out) {
  return guarded([&] {
    require_arg(out != nullptr, "pr_run_complexity_sweep: out is null");
    *out = new pr_table{phaseret::run_complexity_sweep(parse_config(config_json))};
  });
}

pr_status pr_run_frobenius_table(const char* config_json, pr_table** out) {
  return guarded([&] {
    require_arg(out != nullptr, "pr_run_frobenius_table: out is null");
    *out = new pr_table{phaseret::run_frobenius_comparison(parse_config(config_json))};
  });
}

pr_status pr_table_to_string(const pr_table* table, const char* format, char** out) {
  return guarded([&] {
    require_arg(table != nullptr, "pr_table_to_string: table is null");
    require_arg(out != nullptr, "pr_table_to_string: out is null");
    *out = copy_string(phaseret::render_results(table->value, parse_format(format)));
  });
}

pr_status pr_table_write(const pr_table* table, const char* path, const char* format) {
  return guarded([&] {
    require_arg(table != nullptr, "pr_table_write: table is null");
    require_arg(path != nullptr, "pr_table_write: path is null");
    phaseret::emit_results(table->value, path, parse_format(format));
  });
}

void pr_table_free(pr_table* table) { delete table; }

pr_status pr_verify(char** out_report, int* out_failures) {
  return guarded([&] {
    require_arg(out_report != nullptr, "pr_verify: out_report is null");
    require_arg(out_failures != nullptr, "pr_verify: out_failures is null");
    const phaseret::VerifyReport report = phaseret::run_verification();
    std::string text;
    for (const auto& line : report.lines) text += line + '\n';
    *out_report = copy_string(text);
    *out_failures = report.failures;
  });
}

void pr_string_free(char* s) { std::free(s); }

}  // extern "C"
