#include "phaseret/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "phaseret/kron.hpp"

namespace phaseret {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double sigma_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

CellSummary summarize(const std::string& label, double snr_db, Index m, Index n,
                      std::vector<double> eps) {
  CellSummary cell;
  cell.label = label;
  cell.snr_db = snr_db;
  cell.m = m;
  cell.n = n;
  cell.trials = static_cast<int>(eps.size());
  const double mean = std::accumulate(eps.begin(), eps.end(), 0.0) / double(eps.size());
  std::sort(eps.begin(), eps.end());
  const size_t half = eps.size() / 2;
  cell.mean_eps = mean;
  cell.median_eps = eps.size() % 2 ? eps[half] : 0.5 * (eps[half - 1] + eps[half]);
  double ss = 0.0;
  for (double e : eps) ss += (e - mean) * (e - mean);
  cell.stderr_eps =
      eps.size() > 1 ? std::sqrt(ss / double(eps.size() - 1)) / std::sqrt(double(eps.size())) : 0.0;
  return cell;
}

CellSummary collapsed_cell(const std::string& label, double snr_db, Index m, Index n) {
  CellSummary cell;
  cell.label = label;
  cell.snr_db = snr_db;
  cell.m = m;
  cell.n = n;
  cell.trials = 0;
  cell.mean_eps = cell.median_eps = cell.stderr_eps = cell.objective = kNan;
  cell.status = "collapsed";
  return cell;
}

// UC/MF run the alternating loop to convergence; the _I variants freeze the
// alignment at identity, keeping only the initial rank-one fit.
DesignOutput run_alternating(const std::string& label, const ExperimentConfig& config,
                             const CovariancePair& covariance, Index m, double sigma_w_sq) {
  const DesignBudget budget{config.budget_p.value_or(double(m)), m, config.n, sigma_w_sq};
  DesignOptions opts = config.design;
  const bool frozen = label == "UC_I" || label == "MF_I";
  if (frozen) opts.max_iters = 0;
  const KrpConstraint constraint = (label == "MF" || label == "MF_I")
                                       ? KrpConstraint::masked_fourier
                                       : KrpConstraint::unconstrained;
  if (!frozen && config.multi_start > 1) {
    RngStream rng(config.master_seed,
                  derive_stream("design", derive_stream(label), static_cast<std::uint64_t>(m),
                                std::bit_cast<std::uint64_t>(sigma_w_sq)));
    return multi_start_design(covariance.c_x, budget, constraint, opts, config.multi_start, rng);
  }
  return alternating_design(covariance.c_x, budget, constraint, opts);
}

void run_recovery_cell(const ExperimentConfig& config, const CovariancePair& covariance,
                       const SoiModel& model, const std::string& label, double snr_db, Index m,
                       std::uint64_t cell_key, ResultTable& table) {
  const double sigma_w_sq = sigma_from_snr_db(snr_db);
  const Index n = config.n;
  MeasurementMatrix designed;
  if (!is_per_trial_label(label)) {
    try {
      designed = design_for_label(label, config, covariance, m, sigma_w_sq);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::numerical) throw;
      table.cells.push_back(collapsed_cell(label, snr_db, m, n));
      return;
    }
  }

  const std::uint64_t label_key = derive_stream(label);
  std::vector<double> eps;
  eps.reserve(static_cast<size_t>(config.trials));
  for (int trial = 0; trial < config.trials; ++trial) {
    RngStream rng(config.master_seed,
                  derive_stream("trial", label_key, cell_key, static_cast<std::uint64_t>(trial)));
    const MeasurementMatrix* a = &designed;
    MeasurementMatrix fresh;
    if (label == "RG") {
      const DesignBudget budget{config.budget_p.value_or(double(m)), m, n, sigma_w_sq};
      fresh = random_gaussian_matrix(budget, rng);
      a = &fresh;
    } else if (label == "CD") {
      fresh = coded_diffraction_matrix(m / n, n, rng);
      a = &fresh;
    }
    const CVec u = sample_soi(model, rng);
    const Observation obs = forward_observe(*a, u, sigma_w_sq, rng);
    const RecoveryResult rec = config.recovery == RecoveryKind::taf
                                   ? taf_recover(a->entries, obs, config.taf)
                                   : altmin_recover(a->entries, obs, config.altmin);
    const double e = phase_aligned_error(u, rec.estimate);
    eps.push_back(e);
    table.records.push_back(TrialRecord{label, snr_db, m, n, trial, e, rec.iterations});
  }
  table.cells.push_back(summarize(label, snr_db, m, n, std::move(eps)));
}

}  // namespace

void validate(const ExperimentConfig& config) {
  require(config.n >= 2, "config: n must be at least 2");
  require(config.n <= config.m && config.m <= config.n * config.n,
          "config: need n <= m <= n^2");
  if (config.budget_p)
    require(std::isfinite(*config.budget_p) && *config.budget_p > 0.0,
            "config: budget_p must be positive");
  require(!config.snr_db.empty(), "config: snr_db grid is empty");
  for (double v : config.snr_db) require(std::isfinite(v), "config: snr_db must be finite");
  require(std::isfinite(config.fixed_snr_db), "config: fixed_snr_db must be finite");
  require(!config.complexity_ratios.empty(), "config: complexity_ratios is empty");
  for (Index r : config.complexity_ratios)
    require(r >= 1, "config: complexity ratios must be positive");
  require(!config.matrices.empty(), "config: matrices list is empty");
  for (const auto& label : config.matrices)
    require(is_known_label(label), "config: unknown matrix label '" + label + "'");
  require(config.trials >= 1, "config: trials must be positive");
  require(config.covariance_samples >= 1, "config: covariance_samples must be positive");
  require(config.multi_start >= 1, "config: multi_start must be positive");
  require(config.design.max_iters >= 0, "config: design.max_iters must be nonnegative");
  require(std::isfinite(config.design.tol) && config.design.tol >= 0.0,
          "config: design.tol must be nonnegative");
  require(config.taf.max_iters >= 1 && config.altmin.max_iters >= 1,
          "config: recovery iteration caps must be positive");
  require(std::isfinite(config.taf.step) && config.taf.step > 0.0, "config: taf.step > 0");
  require(std::isfinite(config.taf.gamma) && config.taf.gamma > 0.0, "config: taf.gamma > 0");
  require(std::isfinite(config.altmin.tol) && config.altmin.tol >= 0.0,
          "config: altmin.tol must be nonnegative");
}

bool is_known_label(const std::string& label) {
  return label == "OK" || label == "UC" || label == "UC_I" || label == "MF" || label == "MF_I" ||
         label == "RG" || label == "CD";
}

bool is_per_trial_label(const std::string& label) { return label == "RG" || label == "CD"; }

CovariancePair covariance_for(const ExperimentConfig& config) {
  if (config.soi == SoiKind::proper_gaussian)
    return analytic_covariance_pair(gaussian_covariance_expdecay(config.n));
  RngStream rng(config.master_seed, derive_stream("covariance"));
  return empirical_lifted_covariance(SoiModel::sum_exponentials(config.n),
                                     config.covariance_samples, rng);
}

SoiModel soi_model_for(const ExperimentConfig& config) {
  if (config.soi == SoiKind::proper_gaussian)
    return SoiModel::proper_gaussian(gaussian_covariance_expdecay(config.n));
  return SoiModel::sum_exponentials(config.n);
}

MeasurementMatrix design_for_label(const std::string& label, const ExperimentConfig& config,
                                   const CovariancePair& covariance, Index m,
                                   double sigma_w_sq) {
  require(is_known_label(label), "unknown matrix label '" + label + "'");
  require(!is_per_trial_label(label), label + " is drawn per trial, not designed once");
  if (label == "OK") {
    const DesignBudget budget{config.budget_p.value_or(double(m)), m, config.n, sigma_w_sq};
    return low_snr_optimal_matrix(covariance.c_u, budget);
  }
  DesignOutput out = run_alternating(label, config, covariance, m, sigma_w_sq);
  out.matrix.label = label;
  return std::move(out.matrix);
}

ResultTable run_snr_sweep(const ExperimentConfig& config) {
  validate(config);
  const CovariancePair covariance = covariance_for(config);
  const SoiModel model = soi_model_for(config);
  ResultTable table;
  table.kind = SweepKind::snr;
  for (const auto& label : config.matrices)
    for (size_t cell = 0; cell < config.snr_db.size(); ++cell)
      run_recovery_cell(config, covariance, model, label, config.snr_db[cell], config.m,
                        static_cast<std::uint64_t>(cell), table);
  return table;
}

ResultTable run_complexity_sweep(const ExperimentConfig& config) {
  validate(config);
  const CovariancePair covariance = covariance_for(config);
  const SoiModel model = soi_model_for(config);
  for (Index r : config.complexity_ratios)
    require(r <= config.n, "complexity sweep: ratios must not exceed n (m <= n^2)");
  ResultTable table;
  table.kind = SweepKind::complexity;
  for (const auto& label : config.matrices)
    for (size_t cell = 0; cell < config.complexity_ratios.size(); ++cell) {
      const Index m = config.complexity_ratios[cell] * config.n;
      run_recovery_cell(config, covariance, model, label, config.fixed_snr_db, m,
                        static_cast<std::uint64_t>(cell), table);
    }
  return table;
}

ResultTable run_frobenius_comparison(const ExperimentConfig& config) {
  validate(config);
  const CovariancePair covariance = covariance_for(config);
  const double sigma_w_sq = sigma_from_snr_db(config.fixed_snr_db);
  ResultTable table;
  table.kind = SweepKind::frobenius;
  // Alignment on/off for both constraint families; the objective is the fit
  // error before the norm is restored.
  for (const std::string label : {"UC", "UC_I", "MF", "MF_I"}) {
    CellSummary cell;
    try {
      const DesignOutput out = run_alternating(label, config, covariance, config.m, sigma_w_sq);
      cell.label = label;
      cell.snr_db = config.fixed_snr_db;
      cell.m = config.m;
      cell.n = config.n;
      cell.trials = 0;
      cell.mean_eps = cell.median_eps = cell.stderr_eps = kNan;
      cell.objective = out.final_objective;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::numerical) throw;
      cell = collapsed_cell(label, config.fixed_snr_db, config.m, config.n);
    }
    table.cells.push_back(std::move(cell));
  }
  return table;
}

VerifyReport run_verification() {
  VerifyReport report;
  auto check = [&report](const char* name, bool ok) {
    report.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + name);
    if (!ok) ++report.failures;
  };

  {
    RngStream a(7, derive_stream("replay"));
    RngStream b(7, derive_stream("replay"));
    bool same = true;
    for (int i = 0; i < 16; ++i) same = same && a.next_u64() == b.next_u64();
    check("rng streams replay bit-for-bit", same);
  }
  {
    RngStream rng(3, derive_stream("lift"));
    const Index n = 5, m = 11;
    CMat a(m, n);
    for (Index p = 0; p < m; ++p) a.row(p) = rng.cnormal_vector(n).transpose();
    const CVec u = rng.cnormal_vector(n);
    const CVec lhs = row_wise_krp(a) * lift_signal(u);
    const RVec rhs = (a * u).cwiseAbs2();
    check("lifted rows reproduce |Au|^2", (lhs - rhs.cast<cxd>()).norm() <= 1e-10 * rhs.norm());
    const CVec fast = apply_lifted_fast(a, lift_signal(u));
    check("fast lifted apply matches dense product", (fast - lhs).norm() <= 1e-10 * lhs.norm());
  }
  {
    CMat c_x = CMat::Zero(4, 4);
    c_x(0, 0) = 4.0;
    c_x(1, 1) = 1.0;
    const DesignBudget budget{std::sqrt(6.0), 2, 2, 1.0};
    const WaterfillResult wf = waterfill_lifted(c_x, budget);
    check("waterfilling matches the two-mode worked example",
          std::abs(wf.water_level - 2.75) <= 1e-12 &&
              std::abs(wf.allocations(0) - 2.25) <= 1e-12 &&
              std::abs(wf.allocations(1) - 0.75) <= 1e-12);
  }
  {
    const CMat f = dft_matrix(8);
    check("dft matrix is unitary", is_unitary(f));
  }
  {
    RngStream rng(11, derive_stream("procrustes"));
    const Index n = 3, m = 6;
    CMat target(m, n * n);
    for (Index p = 0; p < m; ++p) target.row(p) = rng.cnormal_vector(n * n).transpose();
    const DesignBudget budget{double(m), m, n, 1.0};
    DesignOptions opts;
    opts.max_iters = 40;
    const DesignOutput out =
        alternating_design_from_target(target, budget, KrpConstraint::unconstrained, opts);
    bool monotone = true;
    for (size_t i = 1; i < out.objective_trace.size(); ++i)
      monotone = monotone && out.objective_trace[i] <= out.objective_trace[i - 1] + 1e-9;
    check("alternating design objective is nonincreasing", monotone);
  }
  {
    const Index n = 3, m = 5;
    const CMat c_u = gaussian_covariance_expdecay(n);
    RngStream rng(13, derive_stream("trace"));
    CMat a(m, n);
    for (Index p = 0; p < m; ++p) a.row(p) = rng.cnormal_vector(n).transpose();
    const CMat lifted = row_wise_krp(a);
    const CMat c_x = lifted_covariance_kron_symmetric(c_u);
    const double direct = mi_low_snr_proxy(lifted, c_x, 0.5);
    const double closed = kron_sym_trace(a, c_u);
    check("kronecker trace identity matches the dense proxy",
          std::abs(direct - closed) <= 1e-8 * std::max(1.0, std::abs(closed)));
  }
  {
    const Index n = 4, m = 16;
    const CMat c_u = gaussian_covariance_expdecay(n);
    const CMat c_x = lifted_covariance_kron_symmetric(c_u);
    const double sigma_w_sq = 0.25;
    DesignOptions opts;
    opts.max_iters = 25;
    const DesignBudget budget{double(m), m, n, sigma_w_sq};
    const DesignOutput white =
        alternating_design(c_x, budget, KrpConstraint::unconstrained, opts);
    const CMat c_w = sigma_w_sq * CMat::Identity(m, m);
    const ColoredDesign colored =
        design_with_colored_noise(c_x, double(m), c_w, KrpConstraint::unconstrained, opts);
    const double gap =
        (white.matrix.entries - colored.design.matrix.entries).norm() / white.matrix.entries.norm();
    check("scalar colored noise reduces to the white design", gap <= 1e-8);
  }
  return report;
}

}  // namespace phaseret
