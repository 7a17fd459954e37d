#include "phaseret/analysis.hpp"

#include <cmath>
#include <limits>

#include "phaseret/kron.hpp"

namespace phaseret {

CMat lmmse_matrix(const CMat& lifted, const CMat& c_x, double sigma_w_sq) {
  const Index m = lifted.rows();
  require(c_x.rows() == lifted.cols() && c_x.cols() == lifted.cols(),
          "lmmse_matrix: dimension mismatch");
  require(std::isfinite(sigma_w_sq) && sigma_w_sq > 0.0,
          "lmmse_matrix: sigma_w_sq must be positive");
  require_hermitian_psd(c_x, "lmmse_matrix");

  const CMat cross = lifted * c_x;  // m x n^2
  const CMat inner = hermitian_part(2.0 * sigma_w_sq * CMat::Identity(m, m) +
                                    cross * lifted.adjoint());
  Eigen::LLT<CMat> llt(inner);
  require(llt.info() == Eigen::Success, "lmmse_matrix: inner matrix is not positive definite",
          ErrorCode::numerical);
  return hermitian_part(c_x - cross.adjoint() * llt.solve(cross));
}

double mi_low_snr_proxy(const CMat& lifted, const CMat& c_x, double sigma_w_sq) {
  require(c_x.rows() == lifted.cols() && c_x.cols() == lifted.cols(),
          "mi_low_snr_proxy: dimension mismatch");
  require(std::isfinite(sigma_w_sq) && sigma_w_sq > 0.0,
          "mi_low_snr_proxy: sigma_w_sq must be positive");
  const double trace = ((lifted * c_x).cwiseProduct(lifted.conjugate())).sum().real();
  return std::max(trace, 0.0) / (2.0 * sigma_w_sq);
}

double kron_sym_trace(const CMat& a, const CMat& c_u) {
  require(c_u.rows() == a.cols() && c_u.cols() == a.cols(), "kron_sym_trace: dimension mismatch");
  require_hermitian_psd(c_u, "kron_sym_trace");
  const CMat conj_cov = c_u.conjugate();
  double total = 0.0;
  for (Index k = 0; k < a.rows(); ++k) {
    const CVec row = a.row(k).transpose();
    const double quad = (row.adjoint() * conj_cov * row)(0).real();
    total += quad * quad;
  }
  return total;
}

MmseEstimate mmse_matrix_importance_sampling(const CMat& a, const SoiModel& model,
                                             double sigma_w_sq, Index num_outer, Index num_inner,
                                             RngStream& rng) {
  const Index n = model.n;
  require(a.cols() == n, "mmse_matrix_importance_sampling: dimension mismatch");
  require(n <= 4 && a.rows() <= 6,
          "mmse_matrix_importance_sampling: oracle restricted to n <= 4, m <= 6");
  require(num_outer >= 16 && num_inner >= 16,
          "mmse_matrix_importance_sampling: sample counts too small");
  require(std::isfinite(sigma_w_sq) && sigma_w_sq > 0.0,
          "mmse_matrix_importance_sampling: sigma_w_sq must be positive");
  ensure_finite(a, "mmse_matrix_importance_sampling");

  const Index m = a.rows();
  const double inv_two_sigma = 1.0 / (2.0 * sigma_w_sq);
  CMat accum = CMat::Zero(n * n, n * n);
  double ess_proxy = 0.0;

  std::vector<double> log_w(static_cast<size_t>(num_inner));
  std::vector<CVec> inner_x(static_cast<size_t>(num_inner));
  for (Index outer = 0; outer < num_outer; ++outer) {
    const CVec u = sample_soi(model, rng);
    RVec y = (a * u).cwiseAbs2();
    for (Index i = 0; i < m; ++i) y(i) += std::sqrt(sigma_w_sq) * rng.normal();

    double max_log = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < num_inner; ++j) {
      const CVec cand = sample_soi(model, rng);
      inner_x[static_cast<size_t>(j)] = lift_signal(cand);
      const double miss = (y - (a * cand).cwiseAbs2()).squaredNorm();
      log_w[static_cast<size_t>(j)] = -miss * inv_two_sigma;
      max_log = std::max(max_log, log_w[static_cast<size_t>(j)]);
    }
    CVec posterior_mean = CVec::Zero(n * n);
    double sum_w = 0.0, sum_w_sq = 0.0;
    for (Index j = 0; j < num_inner; ++j) {
      const double w = std::exp(log_w[static_cast<size_t>(j)] - max_log);
      posterior_mean += w * inner_x[static_cast<size_t>(j)];
      sum_w += w;
      sum_w_sq += w * w;
    }
    posterior_mean /= sum_w;
    ess_proxy += std::sqrt(sum_w_sq) / sum_w;  // = 1/sqrt(ESS)

    const CVec err = lift_signal(u) - posterior_mean;
    accum.selfadjointView<Eigen::Lower>().rankUpdate(err);
  }

  MmseEstimate out;
  out.matrix = hermitian_part(CMat(accum.selfadjointView<Eigen::Lower>()) / double(num_outer));
  out.num_samples = num_outer;
  out.std_error_proxy = ess_proxy / double(num_outer);
  return out;
}

NecessaryConditionReport necessary_condition_residual(const CMat& a, const CMat& e) {
  const Index n = a.cols();
  require(e.rows() == n * n && e.cols() == n * n,
          "necessary_condition_residual: e must be n^2 x n^2");
  const double herm_dev = (e - e.adjoint()).norm();
  require(herm_dev <= 1e-8 * std::max(e.norm(), 1e-300) + 1e-300,
          "necessary_condition_residual: e must be Hermitian");

  const Index m = a.rows();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  NecessaryConditionReport report;
  report.per_row_lambda = RVec::Constant(m, nan);
  report.per_row_residual = RVec::Constant(m, nan);

  const double row_scale = a.norm();
  const CMat identity = CMat::Identity(n, n);
  double lambda_min = std::numeric_limits<double>::infinity();
  double lambda_max = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < m; ++k) {
    const CVec row = a.row(k).transpose();
    const double norm = row.norm();
    if (norm <= 1e-12 * std::max(row_scale, 1e-300)) {
      ++report.zero_rows;
      continue;
    }
    const CMat left = kron(identity, CMat(row.transpose()));   // n x n^2
    const CMat right = kron(CMat(row.transpose()), identity);  // n x n^2
    const CMat h = left * e.transpose() * left.adjoint() + right * e * right.adjoint();
    const CVec image = h * row;
    const double lambda = (row.dot(image)).real() / (norm * norm);
    const double residual = (image - lambda * row).norm() / norm;
    report.per_row_lambda(k) = lambda;
    report.per_row_residual(k) = residual;
    report.max_residual = std::max(report.max_residual, residual);
    lambda_min = std::min(lambda_min, lambda);
    lambda_max = std::max(lambda_max, lambda);
  }
  report.lambda_dispersion = report.zero_rows == m ? 0.0 : lambda_max - lambda_min;
  return report;
}

}  // namespace phaseret
