#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaseret/analysis.hpp"
#include "phaseret/design.hpp"
#include "phaseret/retrieval.hpp"
#include "phaseret/soi.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

enum class SweepKind { snr, complexity, frobenius };
enum class RecoveryKind { taf, altmin };

struct ExperimentConfig {
  SoiKind soi = SoiKind::sum_exponentials;
  Index n = 10;
  Index m = 60;                    // snr sweep / frobenius / design
  std::optional<double> budget_p;  // defaults to m (P = m protocol)
  std::vector<double> snr_db = {-30, -26, -22, -18, -14, -10, -6, -2, 0, 2,
                                6,   10,  14,  18,  22,  26,  30};
  double fixed_snr_db = 10.0;                              // complexity sweep
  std::vector<Index> complexity_ratios = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> matrices = {"OK", "UC", "MF", "RG", "CD"};
  int trials = 200;
  std::uint64_t master_seed = 1;
  RecoveryKind recovery = RecoveryKind::taf;
  Index covariance_samples = 200000;
  DesignOptions design;
  int multi_start = 1;
  TafOptions taf;
  AltminOptions altmin;
};

void validate(const ExperimentConfig& config);

// Labels: OK (rank-one low-SNR optimum), UC / UC_I (unconstrained alternating
// design, _I = no alignment iterations), MF / MF_I (masked Fourier), RG
// (Gaussian baseline, fresh per trial), CD (octanary masks, fresh per trial).
bool is_known_label(const std::string& label);
bool is_per_trial_label(const std::string& label);

struct TrialRecord {
  std::string label;
  double snr_db = 0.0;
  Index m = 0;
  Index n = 0;
  int trial = 0;
  double eps = 0.0;
  int iterations = 0;
};

struct CellSummary {
  std::string label;
  double snr_db = 0.0;
  Index m = 0;
  Index n = 0;
  int trials = 0;
  double mean_eps = 0.0;
  double median_eps = 0.0;
  double stderr_eps = 0.0;
  double objective = 0.0;     // frobenius tables only
  std::string status = "ok";  // "collapsed" marks failed design cells
};

struct ResultTable {
  SweepKind kind = SweepKind::snr;
  std::vector<TrialRecord> records;
  std::vector<CellSummary> cells;
};

// Covariances feeding the designs: analytic Kronecker-symmetric pair for the
// Gaussian SOI, empirical (seeded off master_seed) for the exponentials.
CovariancePair covariance_for(const ExperimentConfig& config);

SoiModel soi_model_for(const ExperimentConfig& config);

// Build the matrix for a designed label at one sweep cell. Per-trial labels
// (RG, CD) are redrawn by the sweep loops instead.
MeasurementMatrix design_for_label(const std::string& label, const ExperimentConfig& config,
                                   const CovariancePair& covariance, Index m, double sigma_w_sq);

ResultTable run_snr_sweep(const ExperimentConfig& config);
ResultTable run_complexity_sweep(const ExperimentConfig& config);
ResultTable run_frobenius_comparison(const ExperimentConfig& config);

enum class EmitFormat { csv, json };

std::string render_results(const ResultTable& table, EmitFormat format);
void emit_results(const ResultTable& table, const std::string& path, EmitFormat format);

// Fast self-checks of the library's core identities; returns human-readable
// pass/fail lines and the failure count.
struct VerifyReport {
  std::vector<std::string> lines;
  int failures = 0;
};
VerifyReport run_verification();

}  // namespace phaseret
