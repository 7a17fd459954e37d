#include "phaseret/soi.hpp"

#include <cmath>
#include <numbers>

namespace phaseret {

namespace {

// F = V sqrt(D) with tiny negative eigenvalues clipped to zero.
CMat psd_factor(const CMat& c_u) {
  require_hermitian_psd(c_u, "sample_pc_gaussian");
  const HermitianEig eig = hermitian_eig_descending(c_u);
  CMat f = eig.vectors;
  for (Index k = 0; k < f.cols(); ++k) f.col(k) *= std::sqrt(std::max(eig.values(k), 0.0));
  return f;
}

}  // namespace

void require_hermitian_psd(const CMat& m, const char* label) {
  require(m.rows() == m.cols(), std::string(label) + ": covariance must be square");
  ensure_finite(m, label);
  const double scale = m.norm();
  require((m - m.adjoint()).norm() <= 1e-12 * std::max(scale, 1e-300) + 1e-300,
          std::string(label) + ": covariance must be Hermitian");
  const double trace = m.real().trace();
  Eigen::SelfAdjointEigenSolver<CMat> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, std::string(label) + ": eigensolve failed",
          ErrorCode::numerical);
  require(solver.eigenvalues().minCoeff() >= -1e-10 * std::max(trace, 1e-300),
          std::string(label) + ": covariance is not PSD within tolerance");
}

SoiModel SoiModel::sum_exponentials(Index n) {
  require(n >= 1, "SoiModel: n must be positive");
  return SoiModel{SoiKind::sum_exponentials, n, CMat()};
}

SoiModel SoiModel::proper_gaussian(CMat covariance) {
  require_hermitian_psd(covariance, "SoiModel");
  const Index n = covariance.rows();
  return SoiModel{SoiKind::proper_gaussian, n, std::move(covariance)};
}

CVec sample_soi(const SoiModel& model, RngStream& rng) {
  switch (model.kind) {
    case SoiKind::sum_exponentials:
      return sample_sum_exponentials(model.n, rng);
    case SoiKind::proper_gaussian:
      return sample_pc_gaussian(model.covariance, rng);
  }
  fail(ErrorCode::validation, "sample_soi: unknown model kind");
}

CVec sample_sum_exponentials(Index n, RngStream& rng) {
  require(n >= 1, "sample_sum_exponentials: n must be positive");
  CVec u = CVec::Zero(n);
  for (int l = 0; l < 6; ++l) {
    const double amplitude = rng.normal();
    // frequency uniform on [0, pi]: the process occupies half the band,
    // which is what makes a prior-matched design worth anything here
    const double omega = std::numbers::pi * rng.uniform();
    for (Index k = 0; k < n; ++k) {
      const double arg = omega * double(k + 1);
      u(k) += amplitude * cxd(std::cos(arg), std::sin(arg));
    }
  }
  return u;
}

CMat gaussian_covariance_expdecay(Index n) {
  require(n >= 1, "gaussian_covariance_expdecay: n must be positive");
  CMat c(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < n; ++l) {
      const double d = double(k) - double(l);
      const double arg = 2.0 * std::numbers::pi * d / double(n);
      c(k, l) = 6.0 * std::exp(-std::abs(d)) * cxd(std::cos(arg), std::sin(arg));
    }
  return c;
}

CVec sample_pc_gaussian(const CMat& c_u, RngStream& rng) {
  const CMat f = psd_factor(c_u);
  return f * rng.cnormal_vector(c_u.rows());
}

CMat lifted_covariance_kron_symmetric(const CMat& c_u) {
  require_hermitian_psd(c_u, "lifted_covariance_kron_symmetric");
  return kron(c_u, c_u.conjugate());
}

CovariancePair analytic_covariance_pair(const CMat& c_u) {
  CovariancePair pair;
  pair.c_u = hermitian_part(c_u);
  pair.c_x = lifted_covariance_kron_symmetric(pair.c_u);
  pair.provenance = CovarianceProvenance::analytic_kron_symmetric;
  return pair;
}

CovariancePair empirical_lifted_covariance(const SoiModel& model, Index num_samples,
                                           RngStream& rng) {
  const Index n = model.n;
  require(num_samples >= 10 * n * n, "empirical_lifted_covariance: too few samples");

  // Pre-factor the Gaussian model once; per-sample eigensolves would dominate.
  CMat factor;
  if (model.kind == SoiKind::proper_gaussian) factor = psd_factor(model.covariance);

  CVec mean_u = CVec::Zero(n);
  CVec mean_x = CVec::Zero(n * n);
  CMat raw_u = CMat::Zero(n, n);
  CMat raw_x = CMat::Zero(n * n, n * n);
  for (Index s = 0; s < num_samples; ++s) {
    const CVec u = model.kind == SoiKind::proper_gaussian
                       ? CVec(factor * rng.cnormal_vector(n))
                       : sample_sum_exponentials(n, rng);
    const CVec x = lift_signal(u);
    mean_u += u;
    mean_x += x;
    raw_u.selfadjointView<Eigen::Lower>().rankUpdate(u);
    raw_x.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  const double inv = 1.0 / double(num_samples);
  mean_u *= inv;
  mean_x *= inv;

  CovariancePair pair;
  pair.c_u = hermitian_part(CMat(raw_u.selfadjointView<Eigen::Lower>()) * inv -
                            mean_u * mean_u.adjoint());
  pair.c_x = hermitian_part(CMat(raw_x.selfadjointView<Eigen::Lower>()) * inv -
                            mean_x * mean_x.adjoint());
  pair.provenance = CovarianceProvenance::empirical;
  pair.num_samples = num_samples;
  return pair;
}

double kron_symmetry_deviation(const CovariancePair& pair) {
  const CMat reference = kron(pair.c_u, pair.c_u.conjugate());
  const double denom = reference.norm();
  require(denom > 0.0, "kron_symmetry_deviation: reference covariance is zero");
  return (pair.c_x - reference).norm() / denom;
}

}  // namespace phaseret
