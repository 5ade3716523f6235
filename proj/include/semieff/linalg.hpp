#pragma once

#include <string>

#include "semieff/measure.hpp"

namespace semieff {

/// Outcome of comparing A against B in the Loewner order.
enum class LownerOrder { equal, greater, less, incomparable };

const char* to_string(LownerOrder order);

Mat symmetrize(const Mat& a);
double min_eigenvalue(const Mat& symmetric);
double max_eigenvalue(const Mat& symmetric);

/// True when `a` is symmetric within 1e-8 relative and its smallest eigenvalue
/// is at least -tol.
bool is_symmetric_psd(const Mat& a, double tol = 1e-8);

/// Compares A with B through the eigenvalues of A - B. `tol` is the slack on
/// the sign of the extreme eigenvalues; differences with every |eigenvalue|
/// below eq_tol * max(1, |A|, |B|) count as equal.
LownerOrder lowner_compare(const Mat& a, const Mat& b, double tol, double eq_tol);

/// Inverse of a symmetric positive definite matrix; throws NumericalError
/// naming `what` when it is not.
Mat spd_inverse(const Mat& a, const std::string& what);

/// Godambe information S V^-1 S^T.
Mat godambe_form(const Mat& s, const Mat& v);

}  // namespace semieff
