#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phaseret/kron.hpp"
#include "phaseret/rng.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

struct DesignBudget {
  double p;            // Frobenius-squared budget: ||A||^2 = P
  Index m;             // observations
  Index n;             // SOI dimension
  double sigma_w_sq;   // per-component real noise variance
};

void validate(const DesignBudget& budget);

struct MeasurementMatrix {
  CMat entries;  // m x n
  double budget;
  std::string label;
};

struct WaterfillResult {
  CMat lifted_target;  // m x n^2, rows sqrt(allocation_k) * v_k^H
  RVec allocations;    // m, nonincreasing, sums to P^2/m
  double water_level;
  CMat eigen_basis;    // n^2 x n^2, descending eigenvalue order, phase-fixed
  RVec eigenvalues;    // n^2, descending
};

// Power allocation over the top m eigendirections of c_x:
// allocation_k = (level - 2 sigma^2 / d_k)^+ with the level chosen so the
// allocations sum to P^2/m. Eigenvalues below 1e-12 * d_max count as zero.
WaterfillResult waterfill_lifted(const CMat& c_x, const DesignBudget& budget);

// Rank-one target (P/sqrt(m)) e_1 (v_max ⊗ conj(v_max))^H; requires a
// strictly largest eigenvalue of c_u.
CMat low_snr_lifted_target(const CMat& c_u, const DesignBudget& budget);

// Per row k of v * lifted_target: take the Hermitian part of the unvec'd row
// and keep its leading eigenpair; rows with no positive eigenvalue are zero.
CMat nearest_krp_rows(const CMat& lifted_target, const CMat& v);

struct MaskSet {
  Index n = 0;
  std::vector<CVec> masks;  // b mask vectors of length n
};

MaskSet masked_fourier_masks(const CMat& lifted_target, const CMat& v, Index b, Index n);

CMat dft_matrix(Index n);  // unitary: entries exp(-2 pi j k l / n) / sqrt(n)

// A[(l-1)n + k, p] = (g_l)_p * (F_n)_{k,p}: each n-row block is F_n diag(g_l).
CMat assemble_masked_fourier(const MaskSet& masks);

// Unitary V minimizing ||V * lifted_target - row_wise_krp(a)||, from the SVD
// of row_wise_krp(a) * lifted_target^H.
CMat procrustes_align(const CMat& a, const CMat& lifted_target);

CMat finalize_norm(const CMat& a_hat, double p);

enum class KrpConstraint { unconstrained, masked_fourier };
enum class Termination { converged, max_iters };

struct DesignOptions {
  int max_iters = 200;
  double tol = 1e-8;  // relative objective decrease per full iteration
  std::optional<CMat> initial_v;
};

struct DesignOutput {
  MeasurementMatrix matrix;  // finalized: ||A||^2 = P
  CMat alignment;            // final V
  std::vector<double> objective_trace;  // recorded each half-iteration
  int iterations = 0;
  Termination termination = Termination::max_iters;
  double final_objective = 0.0;  // ||V * lifted_target - row_wise_krp(a_hat)||
};

DesignOutput alternating_design(const CMat& c_x, const DesignBudget& budget,
                                KrpConstraint constraint, const DesignOptions& opts = {});

// Same loop against an externally supplied target (whitened problems, tests).
DesignOutput alternating_design_from_target(const CMat& lifted_target,
                                            const DesignBudget& budget, KrpConstraint constraint,
                                            const DesignOptions& opts = {});

// Start 0 is V = I, further starts draw Haar-random initial alignments; the
// loop is not convex so the best final objective wins (ties: lowest start).
DesignOutput multi_start_design(const CMat& c_x, const DesignBudget& budget,
                                KrpConstraint constraint, const DesignOptions& opts,
                                int num_starts, RngStream& rng);

// Theorem-form rank-one optimum A = c v_max^H; default c has equal moduli
// sqrt(P/m) and phases 2 pi (k-1)/m.
MeasurementMatrix low_snr_optimal_matrix(const CMat& c_u, const DesignBudget& budget,
                                         const std::optional<CVec>& c = std::nullopt);

// i.i.d. proper complex entries of variance 1/n: expected squared row norm 1,
// matching the designed matrices' average under the P = m protocol.
MeasurementMatrix random_gaussian_matrix(const DesignBudget& budget, RngStream& rng);

// Octanary masks d = d1 d2 with d1 uniform on {1,-1,j,-j} and d2 = sqrt(2)/2
// w.p. 4/5, sqrt(3) w.p. 1/5, assembled as masked Fourier blocks.
MeasurementMatrix coded_diffraction_matrix(Index b, Index n, RngStream& rng);

struct WhitenedProblem {
  CMat lifted_target;  // c_w^{1/2} * input target
  CMat whitener;       // c_w^{-1/2}, for transforming observations
};

WhitenedProblem whiten_for_colored_noise(const CMat& c_w, const CMat& lifted_target);

struct ColoredDesign {
  DesignOutput design;
  CMat whitener;
};

// Waterfill the whitened channel at unit noise with the budget transferred as
// P_eff = P / sigma_bar, sigma_bar^2 = tr(c_w)/m (exact for c_w = sigma^2 I),
// then fit rows against c_w^{1/2} * target and finalize at the physical P.
ColoredDesign design_with_colored_noise(const CMat& c_x, double p, const CMat& c_w,
                                        KrpConstraint constraint, const DesignOptions& opts = {});

}  // namespace phaseret
