#pragma once

#include <string>

#include "phaseret/design.hpp"
#include "phaseret/rng.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

struct Observation {
  RVec y;  // m squared magnitudes plus real Gaussian noise; may be negative
  std::string matrix_label;
  double sigma_w_sq = 0.0;
  CVec truth;  // optional, for evaluation
};

Observation forward_observe(const MeasurementMatrix& a, const CVec& u, double sigma_w_sq,
                            RngStream& rng);

struct RecoveryResult {
  CVec estimate;
  int iterations = 0;
  double final_objective = 0.0;  // amplitude residual ||psi - |A z|||
  std::string algorithm;
};

struct TafOptions {
  int max_iters = 600;
  double step = 1.0;
  double gamma = 0.9;  // truncation: keep i with |a_i^H z| >= psi_i / (1 + gamma)
};

struct AltminOptions {
  int max_iters = 600;
  double tol = 1e-12;  // relative iterate change
};

// Start shared by both solvers. Primary direction: the one least covered by
// the ceil(m/6) rows with the smallest |y|-to-row-norm ratio (orthogonality
// promoting), via 100 power iterations from the all-ones vector (seedless).
// A magnitude-weighted aligned direction is fit alongside and wins when it
// explains the amplitudes better; rank-deficient designs blind the primary
// direction, which would otherwise start the solvers at a wild scale.
CVec spectral_init(const CMat& a, const RVec& y);

// Truncated amplitude-flow gradient descent; deterministic given (a, y, opts).
RecoveryResult taf_recover(const CMat& a, const Observation& obs, const TafOptions& opts = {});

// Classical alternating projection: z <- pinv(A) (psi ⊙ phase(A z)).
RecoveryResult altmin_recover(const CMat& a, const Observation& obs,
                              const AltminOptions& opts = {});

// min over unit-modulus c of ||u - c u_hat|| / ||u||.
double phase_aligned_error(const CVec& u, const CVec& u_hat);

}  // namespace phaseret
