// Command-line front end. Everything flows through the shared library's C
// interface; the only work done here is flag parsing and config overrides.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaseret.h"

namespace {

using ordered_json = nlohmann::ordered_json;

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> recovery;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_format) {
  cmd->add_option("--config", flags.config_path, "experiment config JSON file");
  cmd->add_option("--out", flags.out_path, "output path (default: stdout)");
  if (with_format)
    cmd->add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", flags.seed, "override master_seed");
  cmd->add_option("--trials", flags.trials, "override trial count");
  cmd->add_option("--recovery", flags.recovery, "override recovery solver")
      ->check(CLI::IsMember({"taf", "altmin"}));
}

int fail_with(pr_status status) {
  std::fprintf(stderr, "error: %s\n", pr_last_error());
  return static_cast<int>(status);
}

// Returns the merged config document, or an exit code on failure.
int build_config(const CommonFlags& flags, std::string& out_json) {
  ordered_json j = ordered_json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config: %s\n", flags.config_path.c_str());
      return PR_ERR_IO;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    j = ordered_json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      std::fprintf(stderr, "error: config must be a JSON object: %s\n",
                   flags.config_path.c_str());
      return PR_ERR_VALIDATION;
    }
  }
  if (flags.seed) j["master_seed"] = *flags.seed;
  if (flags.trials) j["trials"] = *flags.trials;
  if (flags.recovery) j["recovery"] = *flags.recovery;
  out_json = j.dump();
  return PR_OK;
}

int emit_table(pr_table* table, const CommonFlags& flags) {
  int rc = 0;
  if (flags.out_path.empty()) {
    char* text = nullptr;
    const pr_status status = pr_table_to_string(table, flags.format.c_str(), &text);
    if (status != PR_OK) {
      rc = fail_with(status);
    } else {
      std::fputs(text, stdout);
      pr_string_free(text);
    }
  } else {
    const pr_status status = pr_table_write(table, flags.out_path.c_str(), flags.format.c_str());
    if (status != PR_OK) rc = fail_with(status);
  }
  pr_table_free(table);
  return rc;
}

int run_sweep(const CommonFlags& flags, pr_status (*runner)(const char*, pr_table**)) {
  std::string config;
  if (const int rc = build_config(flags, config); rc != PR_OK) return rc;
  pr_table* table = nullptr;
  if (const pr_status status = runner(config.c_str(), &table); status != PR_OK)
    return fail_with(status);
  return emit_table(table, flags);
}

int run_design(const CommonFlags& flags, const std::string& label, double snr_db) {
  std::string config;
  if (const int rc = build_config(flags, config); rc != PR_OK) return rc;
  pr_matrix* matrix = nullptr;
  if (const pr_status status = pr_design(config.c_str(), label.c_str(), snr_db, &matrix);
      status != PR_OK)
    return fail_with(status);
  int rc = 0;
  if (flags.out_path.empty()) {
    char* text = nullptr;
    const pr_status status = pr_matrix_to_json(matrix, &text);
    if (status != PR_OK) {
      rc = fail_with(status);
    } else {
      std::fputs(text, stdout);
      pr_string_free(text);
    }
  } else {
    const pr_status status = pr_matrix_save(matrix, flags.out_path.c_str());
    if (status != PR_OK) rc = fail_with(status);
  }
  pr_matrix_free(matrix);
  return rc;
}

int run_verify() {
  char* report = nullptr;
  int failures = 0;
  if (const pr_status status = pr_verify(&report, &failures); status != PR_OK)
    return fail_with(status);
  std::fputs(report, stdout);
  pr_string_free(report);
  return failures == 0 ? 0 : PR_ERR_NUMERICAL;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measurement-matrix design and recovery experiments for phase retrieval"};
  app.require_subcommand(1);

  CommonFlags design_flags;
  std::string design_label = "UC";
  double design_snr_db = 10.0;
  CLI::App* design = app.add_subcommand("design", "design one measurement matrix");
  add_common(design, design_flags, false);
  design->add_option("--label", design_label, "matrix label (OK, UC, UC_I, MF, MF_I, RG, CD)");
  design->add_option("--snr-db", design_snr_db, "operating SNR in dB");

  CommonFlags snr_flags;
  CLI::App* snr = app.add_subcommand("snr-sweep", "recovery error across the SNR grid");
  add_common(snr, snr_flags, true);

  CommonFlags complexity_flags;
  CLI::App* complexity =
      app.add_subcommand("complexity-sweep", "recovery error across m/n ratios");
  add_common(complexity, complexity_flags, true);

  CommonFlags frobenius_flags;
  CLI::App* frobenius =
      app.add_subcommand("frobenius-table", "alternating-design fit objectives");
  add_common(frobenius, frobenius_flags, true);

  app.add_subcommand("verify", "run the library self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : PR_ERR_VALIDATION;
  }

  if (design->parsed()) return run_design(design_flags, design_label, design_snr_db);
  if (snr->parsed()) return run_sweep(snr_flags, pr_run_snr_sweep);
  if (complexity->parsed()) return run_sweep(complexity_flags, pr_run_complexity_sweep);
  if (frobenius->parsed()) return run_sweep(frobenius_flags, pr_run_frobenius_table);
  return run_verify();
}
