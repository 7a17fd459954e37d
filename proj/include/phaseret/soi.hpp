#pragma once

#include <string>

#include "phaseret/kron.hpp"
#include "phaseret/rng.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

enum class SoiKind {
  sum_exponentials,  // six real-Gaussian-weighted complex exponentials
  proper_gaussian,   // zero-mean proper complex Gaussian with given covariance
};

struct SoiModel {
  SoiKind kind;
  Index n;
  CMat covariance;  // proper_gaussian only; n x n Hermitian PSD

  static SoiModel sum_exponentials(Index n);
  static SoiModel proper_gaussian(CMat covariance);
};

CVec sample_soi(const SoiModel& model, RngStream& rng);

// (U_S)_k = sum_{l=1..6} M_l e^{j omega_l k}, M_l real standard normal,
// omega_l uniform on [0, pi], k = 1..n. Draw order: (M_l, omega_l) pairs.
CVec sample_sum_exponentials(Index n, RngStream& rng);

// (C_U)_{k,l} = 6 e^{-|k-l| + j 2 pi (k-l)/n}; diagonal entries all 6.
CMat gaussian_covariance_expdecay(Index n);

// u = F z with F F^H = c_u (eigen-factor) and z i.i.d. proper complex
// standard normal, so E{u u^H} = c_u and E{u u^T} = 0.
CVec sample_pc_gaussian(const CMat& c_u, RngStream& rng);

CMat lifted_covariance_kron_symmetric(const CMat& c_u);  // kron(c_u, conj(c_u))

enum class CovarianceProvenance { analytic_kron_symmetric, empirical };

struct CovariancePair {
  CMat c_u;  // n x n
  CMat c_x;  // n^2 x n^2, covariance of lift_signal(u)
  CovarianceProvenance provenance;
  Index num_samples = 0;  // empirical only
};

CovariancePair analytic_covariance_pair(const CMat& c_u);

// Plain sample covariances (mean removed, 1/N normalization) of u and of
// lift_signal(u); c_x symmetrized via hermitian_part.
CovariancePair empirical_lifted_covariance(const SoiModel& model, Index num_samples,
                                           RngStream& rng);

// ||c_x - kron(c_u, conj(c_u))|| / ||kron(c_u, conj(c_u))||
double kron_symmetry_deviation(const CovariancePair& pair);

// Eigenvalues must clear -1e-10 * trace; negatives within tolerance clip to 0
// in factorizations.
void require_hermitian_psd(const CMat& m, const char* label);

}  // namespace phaseret
