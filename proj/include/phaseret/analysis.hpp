#pragma once

#include <vector>

#include "phaseret/rng.hpp"
#include "phaseret/soi.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

// E_L = C_X - C_X A~^H (2 sigma^2 I + A~ C_X A~^H)^{-1} A~ C_X.
CMat lmmse_matrix(const CMat& lifted, const CMat& c_x, double sigma_w_sq);

// Low-SNR mutual-information surrogate tr(A~ C_X A~^H) / (2 sigma^2).
double mi_low_snr_proxy(const CMat& lifted, const CMat& c_x, double sigma_w_sq);

// Closed form of the proxy trace for Kronecker-symmetric C_X:
// sum_k (a_k^H conj(c_u) a_k)^2 over the rows of a.
double kron_sym_trace(const CMat& a, const CMat& c_u);

struct MmseEstimate {
  CMat matrix;  // n^2 x n^2 Hermitian
  Index num_samples = 0;
  // Mean of 1/sqrt(ESS) over outer draws; near 1 flags degenerate importance
  // weights rather than raising.
  double std_error_proxy = 0.0;
};

// Importance-sampling estimate of the MMSE error covariance of the lifted
// signal: posterior means from prior draws weighted by the Gaussian
// likelihood exp(-||y - |a u|^2||^2 / (2 sigma^2)). Desk-scale only.
MmseEstimate mmse_matrix_importance_sampling(const CMat& a, const SoiModel& model,
                                             double sigma_w_sq, Index num_outer, Index num_inner,
                                             RngStream& rng);

struct NecessaryConditionReport {
  RVec per_row_lambda;    // Rayleigh quotients; NaN on skipped zero rows
  RVec per_row_residual;  // ||H_k a_k - lambda_k a_k|| / ||a_k||; NaN on zero rows
  double max_residual = 0.0;
  double lambda_dispersion = 0.0;  // max - min over nonzero rows
  Index zero_rows = 0;
};

// Stationarity check for each row a_k against an injected error matrix e:
// H_k = (I ⊗ a_k^T) e^T (I ⊗ conj(a_k)) + (a_k^T ⊗ I) e (conj(a_k) ⊗ I)
// must have a_k as an eigenvector, with one shared eigenvalue across rows.
NecessaryConditionReport necessary_condition_residual(const CMat& a, const CMat& e);

}  // namespace phaseret
