#include "phaseret/kron.hpp"

#include <cmath>

namespace phaseret {

void ensure_finite(const CMat& m, const char* label) {
  require(m.allFinite(), std::string(label) + ": entries must be finite");
}

void ensure_finite(const CVec& v, const char* label) {
  require(v.allFinite(), std::string(label) + ": entries must be finite");
}

void ensure_finite(const RVec& v, const char* label) {
  require(v.allFinite(), std::string(label) + ": entries must be finite");
}

CVec vec(const CMat& m) {
  require(m.rows() == m.cols(), "vec: matrix must be square");
  return m.reshaped();
}

CMat unvec(const CVec& x, Index n) {
  require(n > 0 && x.size() == n * n, "unvec: length must equal n^2");
  return x.reshaped(n, n);
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat row_wise_krp(const CMat& a) {
  const Index m = a.rows(), n = a.cols();
  CMat out(m, n * n);
  for (Index p = 0; p < m; ++p)
    for (Index k = 0; k < n; ++k)
      out.row(p).segment(k * n, n) = a(p, k) * a.row(p).conjugate();
  return out;
}

CMat selection_matrix(Index m) {
  require(m > 0, "selection_matrix: m must be positive");
  CMat s = CMat::Zero(m, m * m);
  for (Index k = 0; k < m; ++k) s(k, k * m + k) = 1.0;
  return s;
}

CVec lift_signal(const CVec& u) {
  const Index n = u.size();
  CVec x(n * n);
  for (Index k = 0; k < n; ++k) x.segment(k * n, n) = u(k) * u.conjugate();
  return x;
}

CVec apply_lifted_fast(const CMat& a, const CVec& q) {
  const Index n = a.cols();
  require(q.size() == n * n, "apply_lifted_fast: q length must equal n^2");
  const CMat qt = unvec(q, n).transpose();
  // Row p: sum_{k,l} A(p,k) conj(A(p,l)) Q(l,k) = (A Q^T)(p,:) · conj(A(p,:)).
  return ((a * qt).cwiseProduct(a.conjugate())).rowwise().sum();
}

CMat hermitian_part(const CMat& m) {
  require(m.rows() == m.cols(), "hermitian_part: matrix must be square");
  return 0.5 * (m + m.adjoint());
}

Index phase_anchor(const CVec& v) {
  Index best = 0;
  double mag = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > mag) {
      mag = a;
      best = i;
    }
  }
  return best;
}

CVec fix_phase(const CVec& v) {
  if (v.size() == 0) return v;
  const cxd pivot = v(phase_anchor(v));
  const double mag = std::abs(pivot);
  if (mag == 0.0) return v;
  return v * (std::conj(pivot) / mag);
}

HermitianEig hermitian_eig_descending(const CMat& m) {
  require(m.rows() == m.cols(), "hermitian_eig: matrix must be square");
  ensure_finite(m, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<CMat> solver(hermitian_part(m));
  require(solver.info() == Eigen::Success, "hermitian_eig: decomposition failed",
          ErrorCode::numerical);
  const Index n = m.rows();
  HermitianEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) out.vectors.col(k) = fix_phase(solver.eigenvectors().col(n - 1 - k));
  return out;
}

SvdResult svd_phase_fixed(const CMat& m) {
  ensure_finite(m, "svd");
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.singular_values = svd.singularValues();
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  for (Index k = 0; k < out.u.cols(); ++k) {
    const cxd pivot = out.u(phase_anchor(out.u.col(k)), k);
    const double mag = std::abs(pivot);
    if (mag == 0.0) continue;
    const cxd rot = std::conj(pivot) / mag;
    out.u.col(k) *= rot;
    out.v.col(k) *= rot;
  }
  return out;
}

bool is_unitary(const CMat& v, double tol) {
  if (v.rows() != v.cols()) return false;
  const Index n = v.rows();
  return (v.adjoint() * v - CMat::Identity(n, n)).norm() <= tol * std::sqrt(double(n));
}

CMat random_unitary(Index n, RngStream& rng) {
  CMat g(n, n);
  for (Index j = 0; j < n; ++j) g.col(j) = rng.cnormal_vector(n);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the column phases by the sign of R's diagonal so the distribution is
  // Haar, then apply the library-wide phase convention.
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    q.col(j) = fix_phase(q.col(j));
  }
  return q;
}

UnliftResult unlift_signal(const CVec& x, double rel_tol) {
  const Index n2 = x.size();
  const auto n = static_cast<Index>(std::llround(std::sqrt(double(n2))));
  require(n > 0 && n * n == n2, "unlift_signal: length must be a perfect square");
  ensure_finite(x, "unlift_signal");

  // uu^H = unvec(u ⊗ conj(u))^T; deviations from rank-one Hermitian PSD are
  // reported through the second singular value.
  const CMat outer = unvec(x, n).transpose();
  const CMat h = hermitian_part(outer);
  const double scale = h.norm();
  require((outer - h).norm() <= rel_tol * std::max(scale, 1e-300) + 1e-300,
          "unlift_signal: matrix is not Hermitian within tolerance", ErrorCode::numerical);

  const HermitianEig eig = hermitian_eig_descending(h);
  const double lead = eig.values(0);
  double second = 0.0;
  for (Index k = 1; k < n; ++k) second = std::max(second, std::abs(eig.values(k)));
  if (!(lead > 0.0) || second > rel_tol * lead) {
    throw Error(ErrorCode::numerical,
                "unlift_signal: input is not rank-one PSD within tolerance", second);
  }
  UnliftResult out;
  out.signal = std::sqrt(lead) * eig.vectors.col(0);
  out.second_singular_value = lead > 0.0 ? second / lead : second;
  return out;
}

}  // namespace phaseret
