#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phaseret {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode {
  validation,  // bad arguments, malformed input, violated preconditions
  numerical,   // collapse: rank loss, degenerate spectra, non-convergence
  io,          // filesystem or serialization failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Error(ErrorCode code, const std::string& what, double detail)
      : std::runtime_error(what), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  // Carries a diagnostic scalar where one exists (e.g. the second singular
  // value of a failed unlift).
  std::optional<double> detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<double> detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, const std::string& msg, ErrorCode code = ErrorCode::validation) {
  if (!cond) fail(code, msg);
}

// NaN/Inf poisons every downstream decomposition silently; reject at entry.
void ensure_finite(const CMat& m, const char* label);
void ensure_finite(const CVec& v, const char* label);
void ensure_finite(const RVec& v, const char* label);

}  // namespace phaseret
