#pragma once

#include <string>
#include <vector>

namespace matsl {

// Every numeric threshold used by the library, overridable by name
// (CLI --tol-override KEY=VAL and the MATSPEC_TOL_FILE config file).
struct Tolerances {
  double integrator_rel = 1e-10;     // integrator relative local error target
  double wronskian = 1e-8;           // Wronskian-constancy sanity bound
  double near_singular = 1e12;       // effective condition limit for V(phi)
  double dkernel_coincide = 1e-8;    // |lambda-mu| below which D uses the integral form
  double refine_residual = 1e-8;     // |Delta| <= this * max|Delta| on contour
  double residue_agree = 1e-8;       // residue node-doubling agreement
  double cluster_rel = 5e-4;         // cluster merge radius: cluster_rel*(1+|lambda|)^(1/4)
  double omega_group = 1e-6;         // channel grouping, scaled by (1+||omega||)
  double omega_diag = 1e-8;          // omega diagonality report threshold
  double rank_rel = 1e-7;            // numerical rank: sigma > rank_rel*||alpha||
  double main_singular = 1e12;       // condition limit for I + R-tilde
  double tail_warn = 1e-3;           // truncation-indicator warning threshold
  double check_lambda_real = 1e-8;   // (S) |Im lambda| <= tol*(1+|lambda|)
  double check_hermitian = 1e-8;     // (S) ||alpha - alpha^dagger||
  double check_psd = 1e-8;           // (S) min eigenvalue >= -tol
  double check_gram_sigma = 1e-6;    // (C) sigma_min acceptance bound
  double check_tail_factor = 10.0;   // (A) upper-half tail <= factor * lower-half tail
  double structural_kernel = 1e-6;   // V(phi(lambda_nq)) alpha_nq residual
  double structural_sym = 1e-6;      // Lemma sym residuals
  double structural_weyl = 1e-7;     // M == M* residual
  double contour_nodes = 64;         // starting trapezoid node count (contours)
  double max_contour_nodes = 16384;  // adaptive refinement cap

  // Throws InvalidArgument for unknown keys.
  void set(const std::string& key, double value);
  double get(const std::string& key) const;
  static std::vector<std::string> keys();
};

}  // namespace matsl
