#pragma once

namespace semieff {

/// Default numerical tolerances. Every field is overridable from a run config.
struct Tolerances {
  double mass = 1e-6;    // |integral of p - 1| and centering of L2_0 members
  double orth = 1e-8;    // projection residual orthogonality, relative to |f|
  double path = 1e-4;    // final remainder norm for a "converging" verdict
  double grad = 1e-5;    // absolute slope residual in gradient verification
  double sub = 1e-6;     // principal-angle cosine deviation for subspace equality
  double equiv = 1e-6;   // relative least-squares residual for equivalence
  double root = 1e-8;    // per-dimension |sum psi|/n at a converged root
  double lowner = 1e-8;  // min eigenvalue slack in Loewner comparisons
};

}  // namespace semieff
