#pragma once

#include "phaseret/rng.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

// Column stacking: vec(M)[(j-1)n + i] = M(i, j) in 1-based index terms.
CVec vec(const CMat& m);
// Inverse of vec for a square target: vec(unvec(x, n)) == x.
CMat unvec(const CVec& x, Index n);

CMat kron(const CMat& a, const CMat& b);

// Row-wise Khatri-Rao self-product: row p equals kron(row p of A, conj(row p
// of A)), i.e. out(p, (k-1)n + l) = A(p,k) * conj(A(p,l)).
CMat row_wise_krp(const CMat& a);

// m x m^2 0/1 matrix with ones at (k, (k-1)m + k); selects the "diagonal"
// rows of a Kronecker square, so row_wise_krp(A) == selection_matrix(m) * kron(A, conj(A)).
CMat selection_matrix(Index m);

CVec lift_signal(const CVec& u);  // u ⊗ conj(u)

// row_wise_krp(a) * q without materializing the m x n^2 matrix.
CVec apply_lifted_fast(const CMat& a, const CVec& q);

CMat hermitian_part(const CMat& m);

struct UnliftResult {
  CVec signal;
  double second_singular_value;  // relative to the leading one
};

// x must be numerically a lifted vector: unvec(x, n)^T Hermitian PSD rank
// one. The returned signal carries the canonical phase (below).
UnliftResult unlift_signal(const CVec& x, double rel_tol = 1e-6);

// Phase convention applied to every eigen/singular vector this library
// exposes: rotate so the largest-magnitude entry is real positive, ties
// broken by lowest index. Zero vectors pass through unchanged.
Index phase_anchor(const CVec& v);
CVec fix_phase(const CVec& v);

struct HermitianEig {
  RVec values;   // descending
  CMat vectors;  // columns, phase-fixed
};
HermitianEig hermitian_eig_descending(const CMat& m);

struct SvdResult {
  CMat u;
  RVec singular_values;  // descending
  CMat v;                // m = u * diag(s) * v^H
};
// Thin SVD with the phase convention on each left singular vector and the
// matching counter-rotation on the right one (u_i s v_i^H is invariant).
SvdResult svd_phase_fixed(const CMat& m);

bool is_unitary(const CMat& v, double tol = 1e-10);

// Haar-distributed via QR of a Gaussian matrix with the sign-of-R fix.
CMat random_unitary(Index n, RngStream& rng);

}  // namespace phaseret
