#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "phaseret/retrieval.hpp"
#include "phaseret/soi.hpp"
#include "test_util.hpp"

using namespace phaseret;
using testutil::random_cvec;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MeasurementMatrix gaussian_matrix(Index m, Index n, std::uint64_t stream) {
  RngStream rng(55, stream);
  return random_gaussian_matrix(DesignBudget{double(m), m, n, 1.0}, rng);
}

}  // namespace

TEST_SUITE_BEGIN("retrieval");

TEST_CASE("noiseless forward model squares magnitudes") {
  MeasurementMatrix a{CMat::Identity(2, 2), 2.0, "ID"};
  CVec u(2);
  u << cxd(1, 0), cxd(0, 1);
  RngStream rng(55, 0);
  Observation obs = forward_observe(a, u, 0.0, rng);
  CHECK(obs.y(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(obs.y(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(obs.matrix_label == "ID");
  CHECK(obs.sigma_w_sq == 0.0);
  CHECK((obs.truth - u).norm() == 0.0);
}

TEST_CASE("observations are invariant to a global phase of the signal") {
  MeasurementMatrix a = gaussian_matrix(8, 3, 1);
  RngStream rng(55, 2);
  CVec u = random_cvec(3, rng);
  CVec u_rot = u * std::polar(1.0, 1.234);
  RngStream r1(55, 3), r2(55, 3);
  Observation o1 = forward_observe(a, u, 0.25, r1);
  Observation o2 = forward_observe(a, u_rot, 0.25, r2);
  CHECK((o1.y - o2.y).norm() <= 1e-12 * o1.y.norm());
}

TEST_CASE("noiseless observation equals the lifted linear map") {
  MeasurementMatrix a = gaussian_matrix(6, 3, 4);
  RngStream rng(55, 5);
  CVec u = random_cvec(3, rng);
  Observation obs = forward_observe(a, u, 0.0, rng);
  CVec linear = (row_wise_krp(a.entries) * lift_signal(u)).real();
  CHECK((obs.y - linear).norm() <= 1e-12 * linear.norm());
}

TEST_CASE("noise has the configured variance") {
  MeasurementMatrix a{CMat::Zero(1, 1), 1.0, "Z"};
  CVec u = CVec::Zero(1);
  RngStream rng(55, 6);
  const int draws = 100000;
  double s1 = 0, s2 = 0;
  const double var = 0.49;
  for (int i = 0; i < draws; ++i) {
    Observation obs = forward_observe(a, u, var, rng);
    s1 += obs.y(0);
    s2 += obs.y(0) * obs.y(0);
  }
  s1 /= draws;
  s2 /= draws;
  CHECK(std::abs(s1) < 0.01);
  CHECK(s2 - s1 * s1 == doctest::Approx(var).epsilon(0.03));
}

TEST_CASE("taf solves the noiseless gaussian problem") {
  const Index n = 10, m = 60;
  std::vector<double> errs;
  for (int t = 0; t < 100; ++t) {
    MeasurementMatrix a = gaussian_matrix(m, n, 100 + std::uint64_t(t));
    RngStream rng(56, std::uint64_t(t));
    CVec u = random_cvec(n, rng);
    Observation obs = forward_observe(a, u, 0.0, rng);
    RecoveryResult rec = taf_recover(a.entries, obs);
    CHECK(rec.algorithm == "taf");
    errs.push_back(phase_aligned_error(u, rec.estimate));
  }
  CHECK(median(errs) < 1e-3);
}

TEST_CASE("taf is deterministic") {
  MeasurementMatrix a = gaussian_matrix(16, 4, 7);
  RngStream rng(55, 8);
  CVec u = random_cvec(4, rng);
  Observation obs = forward_observe(a, u, 0.01, rng);
  RecoveryResult r1 = taf_recover(a.entries, obs);
  RecoveryResult r2 = taf_recover(a.entries, obs);
  CHECK((r1.estimate - r2.estimate).norm() == 0.0);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("taf tolerates an all-zero observation") {
  MeasurementMatrix a = gaussian_matrix(9, 3, 9);
  Observation obs;
  obs.y = RVec::Zero(9);
  obs.sigma_w_sq = 1.0;
  RecoveryResult rec = taf_recover(a.entries, obs);
  CHECK(std::isfinite(rec.estimate.norm()));
  CHECK(rec.estimate.norm() <= 1e-6);
}

TEST_CASE("rank-one sensing cannot resolve a generic signal") {
  // the theorem-form matrix only measures one prior direction; away from that
  // direction the reconstruction keeps a large angle even without noise
  const Index n = 4, m = 4;
  CMat c_u = gaussian_covariance_expdecay(n);
  MeasurementMatrix ok = low_snr_optimal_matrix(c_u, DesignBudget{double(m), m, n, 1.0});
  RngStream rng(55, 10);
  std::vector<double> errs;
  for (int t = 0; t < 30; ++t) {
    CVec u = random_cvec(n, rng);
    Observation obs = forward_observe(ok, u, 0.0, rng);
    errs.push_back(phase_aligned_error(u, taf_recover(ok.entries, obs).estimate));
  }
  CHECK(median(errs) > 0.3);
}

TEST_CASE("truncation keeps a nonempty working set") {
  // indirect check: from a spectral start the very first gradient step moves,
  // which requires kept rows; run one iteration and compare
  MeasurementMatrix a = gaussian_matrix(40, 10, 11);
  RngStream rng(55, 12);
  CVec u = random_cvec(10, rng);
  Observation obs = forward_observe(a, u, 0.0, rng);
  TafOptions one;
  one.max_iters = 1;
  RecoveryResult rec = taf_recover(a.entries, obs, one);
  CVec start = spectral_init(a.entries, obs.y);
  CHECK((rec.estimate - start).norm() > 1e-12);
}

TEST_CASE("altmin solves masked fourier measurements") {
  const Index n = 10, b = 6;
  std::vector<double> errs;
  for (int t = 0; t < 100; ++t) {
    RngStream rng(57, std::uint64_t(t));
    MeasurementMatrix a = coded_diffraction_matrix(b, n, rng);
    CVec u = random_cvec(n, rng);
    Observation obs = forward_observe(a, u, 0.0, rng);
    RecoveryResult rec = altmin_recover(a.entries, obs);
    CHECK(rec.algorithm == "altmin");
    errs.push_back(phase_aligned_error(u, rec.estimate));
  }
  CHECK(median(errs) < 1e-2);
}

TEST_CASE("altmin amplitude residual does not increase with more iterations") {
  MeasurementMatrix a = gaussian_matrix(25, 5, 13);
  RngStream rng(55, 14);
  CVec u = random_cvec(5, rng);
  Observation obs = forward_observe(a, u, 0.04, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (int iters : {1, 3, 10, 50, 200}) {
    AltminOptions opts;
    opts.max_iters = iters;
    opts.tol = 0.0;
    RecoveryResult rec = altmin_recover(a.entries, obs, opts);
    CHECK(rec.final_objective <= prev + 1e-9);
    prev = rec.final_objective;
  }
}

TEST_CASE("altmin returns zero for a zero observation") {
  MeasurementMatrix a = gaussian_matrix(9, 3, 15);
  Observation obs;
  obs.y = RVec::Zero(9);
  obs.sigma_w_sq = 0.5;
  RecoveryResult rec = altmin_recover(a.entries, obs);
  CHECK(rec.estimate.norm() <= 1e-9);
}

TEST_CASE("phase-aligned error closed forms") {
  CVec u(1), v(1);
  u << cxd(1, 0);
  v << cxd(0, 2);  // alignable: best c v = (2, 0), error |1-2|/1
  CHECK(phase_aligned_error(u, v) == doctest::Approx(1.0).epsilon(1e-12));

  CVec u2(2), v2(2);
  u2 << cxd(1, 0), cxd(0, 1);
  v2 << cxd(0, 1), cxd(-1, 0);  // v2 = j u2 exactly
  CHECK(phase_aligned_error(u2, v2) <= 1e-15);

  // orthogonal estimate: no phase helps; error sqrt(2) relative... norms equal
  CVec u3(2), v3(2);
  u3 << cxd(1, 0), cxd(0, 0);
  v3 << cxd(0, 0), cxd(1, 0);
  CHECK(phase_aligned_error(u3, v3) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // zero estimate scores 1
  CHECK(phase_aligned_error(u3, CVec::Zero(2)) == doctest::Approx(1.0));
  // zero truth is undefined
  CHECK_THROWS_AS(phase_aligned_error(CVec::Zero(2), v3), Error);
}

TEST_CASE("phase-aligned error matches a dense phase grid") {
  RngStream rng(55, 16);
  for (int t = 0; t < 10; ++t) {
    CVec u = random_cvec(4, rng);
    CVec v = random_cvec(4, rng);
    double closed = phase_aligned_error(u, v);
    double grid = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
      double theta = 2.0 * std::numbers::pi * double(k) / 10000.0;
      grid = std::min(grid, (u - std::polar(1.0, theta) * v).norm() / u.norm());
    }
    CHECK(closed <= grid + 1e-6);
    CHECK(closed >= grid - 1e-3);  // grid resolution
  }
}

TEST_SUITE_END();
