#include "semieff/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semieff/errors.hpp"

namespace semieff {

const char* to_string(LownerOrder order) {
  switch (order) {
    case LownerOrder::equal: return "equal";
    case LownerOrder::greater: return "greater";
    case LownerOrder::less: return "less";
    case LownerOrder::incomparable: return "incomparable";
  }
  return "unknown";
}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Mat& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool is_symmetric_psd(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) return false;
  return min_eigenvalue(a) >= -tol;
}

LownerOrder lowner_compare(const Mat& a, const Mat& b, double tol, double eq_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError("Loewner comparison of matrices with different shapes");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(a - b), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  if (std::max(std::abs(lo), std::abs(hi)) <= eq_tol * scale) return LownerOrder::equal;
  if (lo >= -tol) return LownerOrder::greater;
  if (hi <= tol) return LownerOrder::less;
  return LownerOrder::incomparable;
}

Mat spd_inverse(const Mat& a, const std::string& what) {
  const Mat s = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const Vec& ev = es.eigenvalues();
  if (ev.size() == 0 || !(ev.minCoeff() > 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff()))) {
    std::ostringstream msg;
    msg << what << " is not positive definite (smallest eigenvalue "
        << (ev.size() ? ev.minCoeff() : 0.0) << ")";
    throw NumericalError(msg.str());
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Mat godambe_form(const Mat& s, const Mat& v) {
  return symmetrize(s * spd_inverse(v, "variability matrix V") * s.transpose());
}

}  // namespace semieff
