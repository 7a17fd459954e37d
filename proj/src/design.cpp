#include "phaseret/design.hpp"

#include <cmath>
#include <numbers>

#include "phaseret/soi.hpp"

namespace phaseret {

namespace {

Index isqrt_exact(Index n2, const char* label) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(double(n2))));
  require(n > 0 && n * n == n2, std::string(label) + ": column count must be a perfect square");
  return n;
}

CMat step_nearest(const CMat& lifted_target, const CMat& v, KrpConstraint constraint, Index b,
                  Index n) {
  if (constraint == KrpConstraint::unconstrained) return nearest_krp_rows(lifted_target, v);
  return assemble_masked_fourier(masked_fourier_masks(lifted_target, v, b, n));
}

}  // namespace

void validate(const DesignBudget& budget) {
  require(std::isfinite(budget.p) && budget.p > 0.0, "budget: P must be positive");
  require(std::isfinite(budget.sigma_w_sq) && budget.sigma_w_sq > 0.0,
          "budget: sigma_w_sq must be positive");
  require(budget.n >= 1, "budget: n must be positive");
  require(budget.n <= budget.m && budget.m <= budget.n * budget.n,
          "budget: must have n <= m <= n^2");
}

WaterfillResult waterfill_lifted(const CMat& c_x, const DesignBudget& budget) {
  validate(budget);
  const Index m = budget.m, n = budget.n;
  require(c_x.rows() == n * n && c_x.cols() == n * n, "waterfill_lifted: c_x must be n^2 x n^2");
  require_hermitian_psd(c_x, "waterfill_lifted");

  const HermitianEig eig = hermitian_eig_descending(c_x);
  const double d_max = eig.values(0);
  require(d_max > 0.0, "waterfill_lifted: all top-m eigenvalues zero", ErrorCode::numerical);

  // Modes below the relative cutoff carry no water; eigenvalues descend, so
  // the usable modes form a prefix and so does the active set.
  std::vector<double> floors;
  for (Index k = 0; k < m; ++k) {
    if (eig.values(k) <= 1e-12 * d_max) break;
    floors.push_back(2.0 * budget.sigma_w_sq / eig.values(k));
  }

  const double total = budget.p * budget.p / double(m);
  double prefix = 0.0;
  std::vector<double> prefix_sums(floors.size());
  for (size_t j = 0; j < floors.size(); ++j) {
    prefix += floors[j];
    prefix_sums[j] = prefix;
  }
  Index active = 0;
  double level = 0.0;
  for (auto j = static_cast<Index>(floors.size()); j >= 1; --j) {
    const double candidate = (total + prefix_sums[j - 1]) / double(j);
    if (candidate > floors[j - 1]) {
      active = j;
      level = candidate;
      break;
    }
  }
  require(active > 0, "waterfill_lifted: no feasible water level", ErrorCode::numerical);

  WaterfillResult out;
  out.allocations = RVec::Zero(m);
  for (Index k = 0; k < active; ++k) out.allocations(k) = level - floors[k];
  out.water_level = level;
  out.eigen_basis = eig.vectors;
  out.eigenvalues = eig.values;
  out.lifted_target = CMat::Zero(m, n * n);
  for (Index k = 0; k < m; ++k) {
    if (out.allocations(k) <= 0.0) continue;
    out.lifted_target.row(k) = std::sqrt(out.allocations(k)) * eig.vectors.col(k).adjoint();
  }
  return out;
}

CMat low_snr_lifted_target(const CMat& c_u, const DesignBudget& budget) {
  validate(budget);
  require(c_u.rows() == budget.n && c_u.cols() == budget.n,
          "low_snr_lifted_target: c_u must be n x n");
  require_hermitian_psd(c_u, "low_snr_lifted_target");
  const HermitianEig eig = hermitian_eig_descending(c_u);
  require(eig.values(0) > 0.0, "low_snr_lifted_target: zero covariance", ErrorCode::numerical);
  if (budget.n > 1) {
    require(eig.values(0) - eig.values(1) >= 1e-10 * eig.values(0),
            "low_snr_lifted_target: leading eigenvalue tie between modes 1 and 2",
            ErrorCode::numerical);
  }
  CMat target = CMat::Zero(budget.m, budget.n * budget.n);
  target.row(0) =
      (budget.p / std::sqrt(double(budget.m))) * lift_signal(eig.vectors.col(0)).adjoint();
  return target;
}

CMat nearest_krp_rows(const CMat& lifted_target, const CMat& v) {
  const Index m = lifted_target.rows();
  const Index n = isqrt_exact(lifted_target.cols(), "nearest_krp_rows");
  require(v.rows() == m && v.cols() == m, "nearest_krp_rows: alignment dimension mismatch");
  require(is_unitary(v), "nearest_krp_rows: alignment must be unitary");

  const CMat target = v * lifted_target;
  CMat a = CMat::Zero(m, n);
  for (Index k = 0; k < m; ++k) {
    const CMat h = hermitian_part(unvec(target.row(k).transpose(), n));
    const HermitianEig eig = hermitian_eig_descending(h);
    // All-negative spectrum: the best rank-one fit of the Hermitian part is
    // the zero row.
    if (eig.values(0) <= 0.0) continue;
    a.row(k) = std::sqrt(eig.values(0)) * eig.vectors.col(0).conjugate().transpose();
  }
  return a;
}

CMat dft_matrix(Index n) {
  require(n >= 1, "dft_matrix: n must be positive");
  CMat f(n, n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < n; ++l) {
      const double arg = -2.0 * std::numbers::pi * double(k) * double(l) / double(n);
      f(k, l) = scale * cxd(std::cos(arg), std::sin(arg));
    }
  return f;
}

MaskSet masked_fourier_masks(const CMat& lifted_target, const CMat& v, Index b, Index n) {
  require(b >= 1 && n >= 1 && b <= n, "masked_fourier_masks: need 1 <= b <= n");
  require(lifted_target.cols() == n * n && lifted_target.rows() == b * n,
          "masked_fourier_masks: target must be (b*n) x n^2");
  require(v.rows() == b * n && v.cols() == b * n, "masked_fourier_masks: alignment mismatch");
  require(is_unitary(v), "masked_fourier_masks: alignment must be unitary");

  const CMat target = v * lifted_target;
  const CMat f = dft_matrix(n);
  MaskSet out;
  out.n = n;
  out.masks.reserve(static_cast<size_t>(b));
  for (Index l = 0; l < b; ++l) {
    CMat h = CMat::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
      const CMat mh = hermitian_part(unvec(target.row(l * n + k).transpose(), n));
      // F~_k M F~_k^* has entries F(k,p) M(p,q) conj(F(k,q)): a Hadamard mask.
      h += mh.cwiseProduct(f.row(k).transpose() * f.row(k).conjugate());
    }
    const HermitianEig eig = hermitian_eig_descending(h);
    if (eig.values(0) <= 0.0) {
      out.masks.push_back(CVec::Zero(n));
      continue;
    }
    out.masks.push_back(std::sqrt(double(n) * eig.values(0)) * eig.vectors.col(0).conjugate());
  }
  return out;
}

CMat assemble_masked_fourier(const MaskSet& masks) {
  const Index n = masks.n;
  const auto b = static_cast<Index>(masks.masks.size());
  require(n >= 1 && b >= 1, "assemble_masked_fourier: empty mask set");
  const CMat f = dft_matrix(n);
  CMat a(b * n, n);
  for (Index l = 0; l < b; ++l) {
    require(masks.masks[static_cast<size_t>(l)].size() == n,
            "assemble_masked_fourier: mask length mismatch");
    a.middleRows(l * n, n) = f * masks.masks[static_cast<size_t>(l)].asDiagonal();
  }
  return a;
}

CMat procrustes_align(const CMat& a, const CMat& lifted_target) {
  const Index m = lifted_target.rows();
  require(a.rows() == m, "procrustes_align: row count mismatch");
  require(a.cols() * a.cols() == lifted_target.cols(), "procrustes_align: dimension mismatch");
  const SvdResult svd = svd_phase_fixed(row_wise_krp(a) * lifted_target.adjoint());
  return svd.u * svd.v.adjoint();
}

CMat finalize_norm(const CMat& a_hat, double p) {
  require(std::isfinite(p) && p > 0.0, "finalize_norm: P must be positive");
  const double norm = a_hat.norm();
  require(norm > 0.0, "finalize_norm: design collapsed to the zero matrix",
          ErrorCode::numerical);
  return a_hat * (std::sqrt(p) / norm);
}

DesignOutput alternating_design_from_target(const CMat& lifted_target,
                                            const DesignBudget& budget, KrpConstraint constraint,
                                            const DesignOptions& opts) {
  validate(budget);
  const Index m = budget.m, n = budget.n;
  require(lifted_target.rows() == m && lifted_target.cols() == n * n,
          "alternating_design: target must be m x n^2");
  require(opts.max_iters >= 0, "alternating_design: max_iters must be nonnegative");
  require(std::isfinite(opts.tol) && opts.tol >= 0.0, "alternating_design: bad tolerance");
  Index b = 0;
  if (constraint == KrpConstraint::masked_fourier) {
    require(m % n == 0, "alternating_design: masked Fourier needs m divisible by n");
    b = m / n;
  }

  CMat v = opts.initial_v ? *opts.initial_v : CMat(CMat::Identity(m, m));
  require(v.rows() == m && is_unitary(v), "alternating_design: initial alignment must be unitary");

  auto objective = [&](const CMat& vcur, const CMat& a_hat) {
    return (vcur * lifted_target - row_wise_krp(a_hat)).norm();
  };

  CMat a_hat = step_nearest(lifted_target, v, constraint, b, n);
  DesignOutput out;
  out.objective_trace.push_back(objective(v, a_hat));
  double prev = out.objective_trace.back();
  for (int it = 1; it <= opts.max_iters; ++it) {
    v = procrustes_align(a_hat, lifted_target);
    out.objective_trace.push_back(objective(v, a_hat));
    a_hat = step_nearest(lifted_target, v, constraint, b, n);
    out.objective_trace.push_back(objective(v, a_hat));
    out.iterations = it;
    const double cur = out.objective_trace.back();
    if (prev - cur <= opts.tol * std::max(prev, 1e-300)) {
      out.termination = Termination::converged;
      break;
    }
    prev = cur;
  }
  out.alignment = v;
  out.final_objective = out.objective_trace.back();
  out.matrix = MeasurementMatrix{finalize_norm(a_hat, budget.p), budget.p, ""};
  return out;
}

DesignOutput alternating_design(const CMat& c_x, const DesignBudget& budget,
                                KrpConstraint constraint, const DesignOptions& opts) {
  const WaterfillResult wf = waterfill_lifted(c_x, budget);
  return alternating_design_from_target(wf.lifted_target, budget, constraint, opts);
}

DesignOutput multi_start_design(const CMat& c_x, const DesignBudget& budget,
                                KrpConstraint constraint, const DesignOptions& opts,
                                int num_starts, RngStream& rng) {
  require(num_starts >= 1, "multi_start_design: need at least one start");
  const WaterfillResult wf = waterfill_lifted(c_x, budget);
  DesignOutput best;
  for (int s = 0; s < num_starts; ++s) {
    DesignOptions run = opts;
    if (s > 0) run.initial_v = random_unitary(budget.m, rng);
    DesignOutput candidate = alternating_design_from_target(wf.lifted_target, budget, constraint, run);
    if (s == 0 || candidate.final_objective < best.final_objective) best = std::move(candidate);
  }
  return best;
}

MeasurementMatrix low_snr_optimal_matrix(const CMat& c_u, const DesignBudget& budget,
                                         const std::optional<CVec>& c) {
  validate(budget);
  require(c_u.rows() == budget.n && c_u.cols() == budget.n,
          "low_snr_optimal_matrix: c_u must be n x n");
  require_hermitian_psd(c_u, "low_snr_optimal_matrix");
  const HermitianEig eig = hermitian_eig_descending(c_u);
  require(eig.values(0) > 0.0, "low_snr_optimal_matrix: zero covariance", ErrorCode::numerical);
  if (budget.n > 1) {
    require(eig.values(0) - eig.values(1) >= 1e-10 * eig.values(0),
            "low_snr_optimal_matrix: leading eigenvalue tie between modes 1 and 2",
            ErrorCode::numerical);
  }

  CVec weights;
  if (c) {
    weights = *c;
    require(weights.size() == budget.m, "low_snr_optimal_matrix: c must have m entries");
    ensure_finite(CMat(weights), "low_snr_optimal_matrix");
    require(std::abs(weights.squaredNorm() - budget.p) <= 1e-9 * budget.p,
            "low_snr_optimal_matrix: ||c||^2 must equal P");
  } else {
    weights.resize(budget.m);
    const double mag = std::sqrt(budget.p / double(budget.m));
    for (Index k = 0; k < budget.m; ++k) {
      const double arg = 2.0 * std::numbers::pi * double(k) / double(budget.m);
      weights(k) = mag * cxd(std::cos(arg), std::sin(arg));
    }
  }
  return MeasurementMatrix{weights * eig.vectors.col(0).adjoint(), budget.p, "OK"};
}

MeasurementMatrix random_gaussian_matrix(const DesignBudget& budget, RngStream& rng) {
  validate(budget);
  const double scale = 1.0 / std::sqrt(double(budget.n));
  CMat a(budget.m, budget.n);
  for (Index p = 0; p < budget.m; ++p)
    for (Index k = 0; k < budget.n; ++k) a(p, k) = scale * rng.cnormal();
  return MeasurementMatrix{std::move(a), budget.p, "RG"};
}

MeasurementMatrix coded_diffraction_matrix(Index b, Index n, RngStream& rng) {
  require(b >= 1 && n >= 1, "coded_diffraction_matrix: b and n must be positive");
  static const cxd quads[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
  MaskSet masks;
  masks.n = n;
  masks.masks.reserve(static_cast<size_t>(b));
  for (Index l = 0; l < b; ++l) {
    CVec g(n);
    for (Index k = 0; k < n; ++k) {
      const cxd d1 = quads[rng.next_u64() & 3];
      const double d2 = rng.uniform() <= 0.8 ? std::numbers::sqrt2 / 2.0 : std::sqrt(3.0);
      g(k) = d1 * d2;
    }
    masks.masks.push_back(std::move(g));
  }
  return MeasurementMatrix{assemble_masked_fourier(masks), double(b * n), "CD"};
}

WhitenedProblem whiten_for_colored_noise(const CMat& c_w, const CMat& lifted_target) {
  const Index m = lifted_target.rows();
  require(c_w.rows() == m && c_w.cols() == m, "whiten_for_colored_noise: c_w must be m x m");
  require_hermitian_psd(c_w, "whiten_for_colored_noise");
  const HermitianEig eig = hermitian_eig_descending(c_w);
  require(eig.values(0) > 0.0 && eig.values.minCoeff() > 1e-12 * eig.values(0),
          "whiten_for_colored_noise: c_w is singular", ErrorCode::numerical);

  CMat half = eig.vectors;
  CMat inv_half = eig.vectors;
  for (Index k = 0; k < m; ++k) {
    const double root = std::sqrt(eig.values(k));
    half.col(k) *= root;
    inv_half.col(k) /= root;
  }
  WhitenedProblem out;
  out.whitener = inv_half * eig.vectors.adjoint();
  out.lifted_target = half * eig.vectors.adjoint() * lifted_target;
  return out;
}

ColoredDesign design_with_colored_noise(const CMat& c_x, double p, const CMat& c_w,
                                        KrpConstraint constraint, const DesignOptions& opts) {
  const Index m = c_w.rows();
  const Index n = isqrt_exact(c_x.rows(), "design_with_colored_noise");
  require(std::isfinite(p) && p > 0.0, "design_with_colored_noise: P must be positive");
  const double sigma_bar_sq = c_w.real().trace() / double(m);
  require(sigma_bar_sq > 0.0, "design_with_colored_noise: c_w has nonpositive trace");

  // Whitened channel carries unit noise; transferring the budget as
  // P/sigma_bar keeps tr(A~ A~^H) at the physical P^2/m for scalar c_w.
  const DesignBudget whitened{p / std::sqrt(sigma_bar_sq), m, n, 1.0};
  const WaterfillResult wf = waterfill_lifted(c_x, whitened);
  const WhitenedProblem wp = whiten_for_colored_noise(c_w, wf.lifted_target);
  const DesignBudget physical{p, m, n, sigma_bar_sq};
  ColoredDesign out;
  out.design = alternating_design_from_target(wp.lifted_target, physical, constraint, opts);
  out.whitener = wp.whitener;
  return out;
}

}  // namespace phaseret
