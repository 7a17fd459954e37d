#include "phaseret/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "phaseret/kron.hpp"

namespace phaseret {

namespace {

RVec amplitudes(const RVec& y) {
  return y.cwiseMax(0.0).cwiseSqrt();
}

cxd unit_phase(cxd value) {
  const double mag = std::abs(value);
  return mag > 0.0 ? value / mag : cxd(0.0, 0.0);
}

double amplitude_residual(const CMat& a, const CVec& z, const RVec& psi) {
  return (psi - (a * z).cwiseAbs()).norm();
}

}  // namespace

Observation forward_observe(const MeasurementMatrix& a, const CVec& u, double sigma_w_sq,
                            RngStream& rng) {
  require(a.entries.cols() == u.size(), "forward_observe: dimension mismatch");
  require(std::isfinite(sigma_w_sq) && sigma_w_sq >= 0.0,
          "forward_observe: sigma_w_sq must be nonnegative");
  ensure_finite(a.entries, "forward_observe");
  ensure_finite(CMat(u), "forward_observe");

  Observation obs;
  obs.y = (a.entries * u).cwiseAbs2();
  if (sigma_w_sq > 0.0) {
    const double sigma = std::sqrt(sigma_w_sq);
    for (Index i = 0; i < obs.y.size(); ++i) obs.y(i) += sigma * rng.normal();
  }
  obs.matrix_label = a.label;
  obs.sigma_w_sq = sigma_w_sq;
  obs.truth = u;
  return obs;
}

CVec spectral_init(const CMat& a, const RVec& y) {
  const Index m = a.rows(), n = a.cols();
  require(y.size() == m, "spectral_init: observation length mismatch");
  require(m >= n, "spectral_init: need m >= n");
  const RVec psi = amplitudes(y);
  if (a.squaredNorm() == 0.0) return CVec::Zero(n);

  // Rows with the smallest psi_i/||a_i|| are nearly orthogonal to the truth;
  // the signal direction is the one least covered by them.
  std::vector<Index> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  RVec ratio(m);
  for (Index i = 0; i < m; ++i) {
    const double norm = a.row(i).norm();
    ratio(i) = norm > 0.0 ? psi(i) / norm : std::numeric_limits<double>::infinity();
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Index lhs, Index rhs) { return ratio(lhs) < ratio(rhs); });
  const Index subset = (m + 5) / 6;  // ceil(m/6)

  CMat y0 = CMat::Zero(n, n);
  for (Index s = 0; s < subset; ++s) {
    const Index i = order[static_cast<size_t>(s)];
    const double norm_sq = a.row(i).squaredNorm();
    if (norm_sq == 0.0) continue;
    y0.selfadjointView<Eigen::Lower>().rankUpdate(CVec(a.row(i).adjoint()), 1.0 / norm_sq);
  }
  const CMat y0_full = CMat(y0.selfadjointView<Eigen::Lower>());

  // Smallest eigendirection of y0 via power iterations on (mu I - y0); the
  // trace bounds the spectrum from above for a PSD sum of rank ones.
  const double mu = y0_full.real().trace() + 1.0;
  const CMat shifted = mu * CMat::Identity(n, n) - y0_full;
  CVec z = CVec::Constant(n, cxd(1.0 / std::sqrt(double(n)), 0.0));
  for (int it = 0; it < 100; ++it) {
    z = shifted * z;
    const double norm = z.norm();
    if (norm == 0.0) return CVec::Zero(n);
    z /= norm;
  }
  z = fix_phase(z);

  // Ridge-stabilized amplitude fit: plain least squares divides by ||A d||^2,
  // which rank-deficient designs (all rows near-parallel) drive to ~0 and the
  // estimate norm explodes. The ridge is far below any healthy direction's
  // energy, so full-rank behavior is unchanged.
  const double ridge = 1e-9 * a.squaredNorm();
  auto ls_scaled = [&](const CVec& direction) -> CVec {
    const RVec magnitudes = (a * direction).cwiseAbs();
    const double scale = magnitudes.dot(psi) / (magnitudes.squaredNorm() + ridge);
    return scale * direction;
  };

  // Second candidate: the magnitude-weighted aligned direction, which carries
  // measurement energy whenever the data does. Blind least-covered directions
  // fit the amplitudes poorly, so the residual comparison below rejects them.
  CMat y1 = CMat::Zero(n, n);
  for (Index i = 0; i < m; ++i) {
    if (psi(i) == 0.0) continue;
    y1.selfadjointView<Eigen::Lower>().rankUpdate(CVec(a.row(i).adjoint()), psi(i) * psi(i));
  }
  const CMat y1_full = CMat(y1.selfadjointView<Eigen::Lower>());
  CVec w = CVec::Zero(n);
  if (y1_full.real().trace() > 0.0) {
    w = CVec::Constant(n, cxd(1.0 / std::sqrt(double(n)), 0.0));
    for (int it = 0; it < 100; ++it) {
      w = y1_full * w;
      const double norm = w.norm();
      if (norm == 0.0) break;
      w /= norm;
    }
    if (w.norm() > 0.0) w = fix_phase(w);
  }

  const CVec candidate_orth = ls_scaled(z);
  if (w.norm() == 0.0) return candidate_orth;
  const CVec candidate_aligned = ls_scaled(w);
  const double residual_orth = (psi - (a * candidate_orth).cwiseAbs()).norm();
  const double residual_aligned = (psi - (a * candidate_aligned).cwiseAbs()).norm();
  return residual_aligned < residual_orth ? candidate_aligned : candidate_orth;
}

RecoveryResult taf_recover(const CMat& a, const Observation& obs, const TafOptions& opts) {
  const Index m = a.rows();
  require(m >= a.cols(), "taf_recover: need m >= n");
  require(obs.y.size() == m, "taf_recover: observation length mismatch");
  require(opts.max_iters >= 0 && opts.step > 0.0 && opts.gamma > 0.0,
          "taf_recover: bad options");
  ensure_finite(a, "taf_recover");
  ensure_finite(obs.y, "taf_recover");

  const RVec psi = amplitudes(obs.y);
  const double accept = 1.0 / (1.0 + opts.gamma);

  CVec z = spectral_init(a, obs.y);
  CVec best = z;
  double best_obj = amplitude_residual(a, z, psi);
  const double target = 1e-14 * std::max(psi.norm(), 1.0);

  int performed = 0;
  CVec mismatch(m);
  for (int it = 0; it < opts.max_iters; ++it) {
    const CVec field = a * z;
    for (Index i = 0; i < m; ++i) {
      const bool keep = std::abs(field(i)) >= accept * psi(i);
      mismatch(i) = keep ? field(i) - psi(i) * unit_phase(field(i)) : cxd(0.0, 0.0);
    }
    z -= (opts.step / double(m)) * (a.adjoint() * mismatch);
    ++performed;

    const double obj = amplitude_residual(a, z, psi);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
    if (best_obj <= target) break;
  }
  return RecoveryResult{std::move(best), performed, best_obj, "taf"};
}

RecoveryResult altmin_recover(const CMat& a, const Observation& obs, const AltminOptions& opts) {
  const Index m = a.rows();
  require(m >= a.cols(), "altmin_recover: need m >= n");
  require(obs.y.size() == m, "altmin_recover: observation length mismatch");
  require(opts.max_iters >= 0 && opts.tol >= 0.0, "altmin_recover: bad options");
  ensure_finite(a, "altmin_recover");
  ensure_finite(obs.y, "altmin_recover");

  const RVec psi = amplitudes(obs.y);
  // Min-norm least-squares step keeps the classical residual monotone even
  // for rank-deficient matrices.
  Eigen::CompleteOrthogonalDecomposition<CMat> pinv(a);

  CVec z = spectral_init(a, obs.y);
  CVec best = z;
  double best_obj = amplitude_residual(a, z, psi);
  const double target = 1e-14 * std::max(psi.norm(), 1.0);

  int performed = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const CVec field = a * z;
    CVec matched(m);
    for (Index i = 0; i < m; ++i) matched(i) = psi(i) * unit_phase(field(i));
    const CVec next = pinv.solve(matched);
    const double delta = (next - z).norm();
    z = next;
    ++performed;

    const double obj = amplitude_residual(a, z, psi);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
    if (best_obj <= target || delta <= opts.tol * std::max(z.norm(), 1.0)) break;
  }
  return RecoveryResult{std::move(best), performed, best_obj, "altmin"};
}

double phase_aligned_error(const CVec& u, const CVec& u_hat) {
  require(u.size() == u_hat.size(), "phase_aligned_error: dimension mismatch");
  const double norm_u = u.norm();
  require(norm_u > 0.0, "phase_aligned_error: truth vector is zero");
  const cxd inner = u_hat.dot(u);  // u_hat^H u
  const double mag = std::abs(inner);
  if (mag == 0.0) {
    return std::sqrt(norm_u * norm_u + u_hat.squaredNorm()) / norm_u;
  }
  return (u - (inner / mag) * u_hat).norm() / norm_u;
}

}  // namespace phaseret
