#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "semieff/measure.hpp"

namespace semieff {

/// Arithmetic expression over x, theta_i and z_i; grammar in docs/model-grammar.md.
///
/// Parsed once into a postfix program; evaluation is allocation-free apart from
/// a small fixed stack and is safe to call concurrently.
class Expression {
 public:
  static Expression parse(std::string_view source);

  double eval(double x, const Vec& theta, const Vec& z) const;

  const std::string& source() const { return source_; }
  /// Highest 1-based theta / z index referenced (0 if none).
  int max_theta_index() const { return max_theta_; }
  int max_z_index() const { return max_z_; }
  bool uses_z() const { return max_z_ > 0; }

 private:
  enum class Op { constant, x, theta, z, add, sub, mul, div, neg, pow, exp, log };
  struct Instr {
    Op op;
    double value = 0.0;
    int index = 0;
  };
  friend class ExpressionParser;

  std::string source_;
  std::vector<Instr> program_;
  int max_theta_ = 0;
  int max_z_ = 0;
  int max_depth_ = 0;
};

}  // namespace semieff
