#include <doctest.h>

#include <cmath>

#include "phaseret/analysis.hpp"
#include "phaseret/design.hpp"
#include "phaseret/soi.hpp"
#include "test_util.hpp"

using namespace phaseret;
using testutil::random_cmat;
using testutil::random_psd;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("lmmse with no measurements is the prior covariance") {
  RngStream rng(41, 0);
  CMat c_x = random_psd(4, rng);
  CMat lifted = CMat::Zero(3, 4);
  CMat e = lmmse_matrix(lifted, c_x, 1.0);
  CHECK((e - c_x).norm() <= 1e-12 * c_x.norm());
}

TEST_CASE("lmmse approaches the prior as noise dominates") {
  RngStream rng(41, 1);
  CMat c_x = random_psd(4, rng);
  CMat lifted = random_cmat(3, 4, rng);
  CMat e = lmmse_matrix(lifted, c_x, 1e12);
  CHECK((e - c_x).norm() <= 1e-6 * c_x.norm());
}

TEST_CASE("lmmse scalar case in closed form") {
  // c = 2, a = 1, 2 sigma^2 = 2: E = 2 - 2*2/(2+2) = 1
  CMat c_x(1, 1), lifted(1, 1);
  c_x << cxd(2, 0);
  lifted << cxd(1, 0);
  CMat e = lmmse_matrix(lifted, c_x, 1.0);
  CHECK(std::abs(e(0, 0) - cxd(1, 0)) <= 1e-12);
}

TEST_CASE("lmmse never exceeds the prior") {
  RngStream rng(41, 2);
  CMat c_x = random_psd(6, rng);
  CMat lifted = random_cmat(4, 6, rng);
  CMat e = lmmse_matrix(lifted, c_x, 0.3);
  HermitianEig gap = hermitian_eig_descending(CMat(c_x - e));
  CHECK(gap.values.minCoeff() >= -1e-10 * c_x.norm());
  // and E itself stays PSD
  HermitianEig eig = hermitian_eig_descending(e);
  CHECK(eig.values.minCoeff() >= -1e-10 * c_x.norm());
}

TEST_CASE("low-snr proxy basics") {
  RngStream rng(41, 3);
  CMat c_x = random_psd(4, rng);
  CHECK(mi_low_snr_proxy(CMat::Zero(3, 4), c_x, 1.0) == 0.0);

  CMat lifted = random_cmat(3, 4, rng);
  double base = mi_low_snr_proxy(lifted, c_x, 1.0);
  CHECK(base > 0.0);
  // scales linearly in the quadratic form, inverse in the noise
  CHECK(mi_low_snr_proxy(lifted, CMat(2.0 * c_x), 1.0) == doctest::Approx(2.0 * base));
  CHECK(mi_low_snr_proxy(lifted, c_x, 2.0) == doctest::Approx(0.5 * base));
}

TEST_CASE("kron-symmetric trace shortcut matches the dense proxy") {
  RngStream rng(41, 4);
  for (int t = 0; t < 10; ++t) {
    const Index n = 3, m = 4;
    CMat c_u = random_psd(n, rng);
    CMat a = random_cmat(m, n, rng);
    double fast = kron_sym_trace(a, c_u);
    double dense =
        mi_low_snr_proxy(row_wise_krp(a), lifted_covariance_kron_symmetric(c_u), 0.5);
    CHECK(fast == doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("kron-symmetric trace on identity rows") {
  // rows e_1, e_2 against c_u = diag(2, 1): sum of (c_u conj-quadratic)^2 = 4 + 1
  CMat c_u = CMat::Zero(2, 2);
  c_u(0, 0) = 2.0;
  c_u(1, 1) = 1.0;
  CMat a = CMat::Identity(2, 2);
  CHECK(kron_sym_trace(a, c_u) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(kron_sym_trace(CMat::Zero(2, 2), c_u) == 0.0);
}

TEST_CASE("importance-sampled mmse approaches the prior at very low snr") {
  // at -40 dB the observations say nothing: E ~ C_X
  const Index n = 2, m = 3;
  CMat c_u = gaussian_covariance_expdecay(n);
  SoiModel model = SoiModel::proper_gaussian(c_u);
  CMat c_x = lifted_covariance_kron_symmetric(c_u);
  RngStream drng(41, 5);
  DesignBudget budget{double(m), m, n, 1e4};
  MeasurementMatrix a = random_gaussian_matrix(budget, drng);

  RngStream rng(41, 6);
  MmseEstimate est = mmse_matrix_importance_sampling(a.entries, model, 1e4, 8000, 256, rng);
  CHECK(est.num_samples == 8000);
  CHECK((est.matrix - est.matrix.adjoint()).norm() <= 1e-10 * est.matrix.norm());
  CHECK((est.matrix - c_x).norm() < 0.1 * c_x.norm());
  CHECK(est.std_error_proxy < 0.2);
}

TEST_CASE("zero measurement matrix leaves the prior covariance") {
  const Index n = 2;
  CMat c_u = gaussian_covariance_expdecay(n);
  SoiModel model = SoiModel::proper_gaussian(c_u);
  CMat c_x = lifted_covariance_kron_symmetric(c_u);
  RngStream rng(41, 7);
  MmseEstimate est =
      mmse_matrix_importance_sampling(CMat::Zero(3, n), model, 1.0, 8000, 256, rng);
  CHECK((est.matrix - c_x).norm() < 0.1 * c_x.norm());
}

TEST_CASE("more outer draws tighten the mmse estimate") {
  const Index n = 2, m = 3;
  CMat c_u = gaussian_covariance_expdecay(n);
  SoiModel model = SoiModel::proper_gaussian(c_u);
  CMat c_x = lifted_covariance_kron_symmetric(c_u);
  RngStream drng(41, 8);
  MeasurementMatrix a = random_gaussian_matrix(DesignBudget{3.0, m, n, 1e4}, drng);

  RngStream r1(41, 9), r2(41, 9);
  MmseEstimate small = mmse_matrix_importance_sampling(a.entries, model, 1e4, 50, 400, r1);
  MmseEstimate large = mmse_matrix_importance_sampling(a.entries, model, 1e4, 800, 400, r2);
  double err_small = (small.matrix - c_x).norm();
  double err_large = (large.matrix - c_x).norm();
  CHECK(err_large < err_small);
}

TEST_CASE("stationarity residual with an identity error matrix") {
  // e = I makes H_k = 2 ||a_k||^2 I exactly: every row is an eigenvector and
  // the shared eigenvalue is twice the squared row norm only if rows share norms
  RngStream rng(41, 10);
  const Index n = 3, m = 4;
  CMat a = random_cmat(m, n, rng);
  for (Index k = 0; k < m; ++k) a.row(k) *= 1.7 / a.row(k).norm();
  NecessaryConditionReport report = necessary_condition_residual(a, CMat::Identity(n * n, n * n));
  CHECK(report.zero_rows == 0);
  CHECK(report.max_residual <= 1e-10);
  for (Index k = 0; k < m; ++k)
    CHECK(report.per_row_lambda(k) == doctest::Approx(2.0 * 1.7 * 1.7).epsilon(1e-10));
  CHECK(report.lambda_dispersion <= 1e-10);
}

TEST_CASE("stationarity report flags zero rows") {
  CMat a = CMat::Zero(3, 2);
  NecessaryConditionReport report = necessary_condition_residual(a, CMat::Identity(4, 4));
  CHECK(report.zero_rows == 3);
  CHECK(report.max_residual == 0.0);
  CHECK(report.lambda_dispersion == 0.0);
  for (Index k = 0; k < 3; ++k) CHECK(std::isnan(report.per_row_lambda(k)));
}

TEST_CASE("rank-one optimum satisfies the stationarity condition") {
  const Index n = 3, m = 4;
  CMat c_u = gaussian_covariance_expdecay(n);
  MeasurementMatrix ok = low_snr_optimal_matrix(c_u, DesignBudget{double(m), m, n, 1.0});
  CMat e = lifted_covariance_kron_symmetric(c_u);
  NecessaryConditionReport report = necessary_condition_residual(ok.entries, e);
  CHECK(report.zero_rows == 0);
  CHECK(report.max_residual <= 1e-8);
  CHECK(report.lambda_dispersion <= 1e-8 * std::abs(report.per_row_lambda(0)));
}

TEST_CASE("stationarity rejects a non-hermitian error matrix") {
  RngStream rng(41, 11);
  CMat a = random_cmat(2, 2, rng);
  CMat e = random_cmat(4, 4, rng);  // not Hermitian
  CHECK_THROWS_AS(necessary_condition_residual(a, e), Error);
}

TEST_SUITE_END();
