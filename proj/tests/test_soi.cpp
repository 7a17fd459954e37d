#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phaseret/soi.hpp"
#include "test_util.hpp"

using namespace phaseret;

TEST_SUITE_BEGIN("soi");

TEST_CASE("sum-of-exponentials moments") {
  const Index n = 10;
  const int draws = 100000;
  RngStream rng(3, 100);
  CVec mean = CVec::Zero(n);
  RVec power = RVec::Zero(n);
  for (int i = 0; i < draws; ++i) {
    CVec u = sample_sum_exponentials(n, rng);
    mean += u;
    power += u.cwiseAbs2();
  }
  mean /= draws;
  power /= draws;
  // E u_k = 0; E |u_k|^2 = 6 (six unit-variance weights, unit-modulus phasors).
  // se of each |u_k|^2 average ~ sqrt(E|u|^4 - 36)/sqrt(draws) ~ 0.03
  for (Index k = 0; k < n; ++k) {
    CHECK(std::abs(mean(k)) < 0.05);
    CHECK(power(k) == doctest::Approx(6.0).epsilon(0.04));
  }
  // matched energy across the two SOI families: trace ~ 6n
  CHECK(power.sum() == doctest::Approx(60.0).epsilon(0.02));
}

TEST_CASE("sum-of-exponentials determinism and shape") {
  RngStream a(7, 1), b(7, 1);
  CVec u1 = sample_sum_exponentials(10, a);
  CVec u2 = sample_sum_exponentials(10, b);
  CHECK((u1 - u2).norm() == 0.0);
  CHECK(u1.size() == 10);
  CHECK_THROWS_AS(sample_sum_exponentials(0, a), Error);
}

TEST_CASE("expdecay covariance entries") {
  CMat c = gaussian_covariance_expdecay(10);
  CHECK(c(0, 0) == cxd(6, 0));
  for (Index k = 0; k < 10; ++k) CHECK(c(k, k) == cxd(6, 0));
  cxd want = 6.0 * std::exp(cxd(-1.0, -0.2 * std::numbers::pi));
  CHECK(std::abs(c(0, 1) - want) < 1e-14);
  CHECK((c - c.adjoint()).norm() < 1e-14);
  HermitianEig eig = hermitian_eig_descending(c);
  CHECK(eig.values(9) > 0.0);
}

TEST_CASE("pc gaussian sampling hits its covariance and is proper") {
  const Index n = 4;
  CMat c_u = gaussian_covariance_expdecay(n);
  RngStream rng(3, 101);
  const int draws = 100000;
  CMat cov = CMat::Zero(n, n);
  CMat pseudo = CMat::Zero(n, n);
  for (int i = 0; i < draws; ++i) {
    CVec u = sample_pc_gaussian(c_u, rng);
    cov += u * u.adjoint();
    pseudo += u * u.transpose();
  }
  cov /= draws;
  pseudo /= draws;
  CHECK((cov - c_u).norm() < 0.05 * c_u.norm());
  CHECK(pseudo.norm() < 0.05 * c_u.norm());
}

TEST_CASE("pc gaussian edge cases") {
  RngStream rng(3, 102);
  CVec u = sample_pc_gaussian(CMat::Zero(3, 3), rng);
  CHECK(u.norm() == 0.0);

  CMat not_psd = -CMat::Identity(2, 2);
  CHECK_THROWS_AS(sample_pc_gaussian(not_psd, rng), Error);
}

TEST_CASE("kron-symmetric lifted covariance") {
  CMat c2 = lifted_covariance_kron_symmetric(CMat::Identity(2, 2));
  CHECK((c2 - CMat::Identity(4, 4)).norm() == 0.0);

  // eigenvalues of kron(c, conj(c)) are pairwise products of those of c
  CMat c_u = gaussian_covariance_expdecay(3);
  HermitianEig base = hermitian_eig_descending(c_u);
  HermitianEig lifted = hermitian_eig_descending(lifted_covariance_kron_symmetric(c_u));
  std::vector<double> products;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) products.push_back(base.values(i) * base.values(j));
  std::sort(products.begin(), products.end(), std::greater<>());
  for (Index k = 0; k < 9; ++k)
    CHECK(lifted.values(k) == doctest::Approx(products[k]).epsilon(1e-10));
}

TEST_CASE("analytic covariance pair") {
  CMat c_u = gaussian_covariance_expdecay(3);
  CovariancePair pair = analytic_covariance_pair(c_u);
  CHECK(pair.provenance == CovarianceProvenance::analytic_kron_symmetric);
  CHECK((pair.c_x - lifted_covariance_kron_symmetric(c_u)).norm() == 0.0);
  CHECK(kron_symmetry_deviation(pair) == 0.0);
}

TEST_CASE("empirical covariance of the gaussian model approaches the kron form") {
  const Index n = 3;
  SoiModel model = SoiModel::proper_gaussian(gaussian_covariance_expdecay(n));
  RngStream rng(3, 103);
  CovariancePair pair = empirical_lifted_covariance(model, 30000, rng);
  CHECK(pair.provenance == CovarianceProvenance::empirical);
  CHECK(pair.num_samples == 30000);
  CHECK((pair.c_u - gaussian_covariance_expdecay(n)).norm() < 0.05 * 6 * n);
  // fourth-moment estimate converges slower; loose band
  CHECK(kron_symmetry_deviation(pair) < 0.10);
  require_hermitian_psd(pair.c_x, "empirical c_x");
}

TEST_CASE("empirical covariance of the exponential model is not kron symmetric") {
  SoiModel model = SoiModel::sum_exponentials(8);
  RngStream rng(3, 104);
  CovariancePair pair = empirical_lifted_covariance(model, 20000, rng);
  double dev = kron_symmetry_deviation(pair);
  CHECK(std::isfinite(dev));
  // the weights are real Gaussians, not proper complex ones; the lift keeps
  // strong fourth-moment structure that the kron form cannot express
  CHECK(dev > 0.1);
  require_hermitian_psd(pair.c_x, "empirical c_x");
}

TEST_CASE("empirical covariance determinism and validation") {
  SoiModel model = SoiModel::sum_exponentials(4);
  RngStream a(9, 5), b(9, 5);
  CovariancePair p1 = empirical_lifted_covariance(model, 500, a);
  CovariancePair p2 = empirical_lifted_covariance(model, 500, b);
  CHECK((p1.c_x - p2.c_x).norm() == 0.0);
  CHECK((p1.c_u - p2.c_u).norm() == 0.0);

  CHECK_THROWS_AS(empirical_lifted_covariance(model, 1, a), Error);
}

TEST_CASE("kron symmetry deviation of a hand-built pair") {
  CovariancePair pair;
  pair.c_u = CMat::Identity(2, 2);
  pair.c_x = CMat::Identity(4, 4) * 2.0;
  pair.provenance = CovarianceProvenance::empirical;
  // ||2I - I|| / ||I|| = 1
  CHECK(kron_symmetry_deviation(pair) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("require_hermitian_psd accepts and rejects") {
  CHECK_NOTHROW(require_hermitian_psd(CMat::Identity(3, 3), "id"));
  CMat neg = CMat::Identity(3, 3);
  neg(2, 2) = -1.0;
  CHECK_THROWS_AS(require_hermitian_psd(neg, "neg"), Error);
  CMat skew(2, 2);
  skew << cxd(1, 0), cxd(1, 0), cxd(0, 0), cxd(1, 0);
  CHECK_THROWS_AS(require_hermitian_psd(skew, "skew"), Error);
}

TEST_CASE("sample_soi dispatches on the model kind") {
  RngStream a(4, 0), b(4, 0);
  SoiModel exp_model = SoiModel::sum_exponentials(5);
  CHECK((sample_soi(exp_model, a) - sample_sum_exponentials(5, b)).norm() == 0.0);

  RngStream c(4, 1), d(4, 1);
  CMat c_u = gaussian_covariance_expdecay(5);
  SoiModel g_model = SoiModel::proper_gaussian(c_u);
  CHECK((sample_soi(g_model, c) - sample_pc_gaussian(c_u, d)).norm() == 0.0);
}

TEST_SUITE_END();
