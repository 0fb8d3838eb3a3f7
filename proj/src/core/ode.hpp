#pragma once
// Matrix ODE integration for -Y'' + Q(x) Y = lambda Y and the derived
// spectral objects: boundary forms, characteristic determinant Delta,
// Weyl matrix M, and the two-spectra kernel D(x, lambda, mu).

#include <vector>

#include "problem.hpp"
#include "tolerances.hpp"

namespace matsl {

// phi, S and the dual phi* sampled on the problem grid at one lambda.
struct SolutionSample {
  cx lambda{};
  std::vector<double> grid;
  std::vector<Mat> phi, dphi, S, dS, phistar, dphistar;
};

// Values of phi and S at x = pi (fast path for contour work).
struct Endpoint {
  Mat phi, dphi, S, dS;
};

enum class Scheme { RK4, CV8 };

class Integrator {
 public:
  Integrator(const BoundaryProblem& p, const Tolerances& tol, Scheme scheme = Scheme::CV8);

  // Full-grid sample including the dual solution (via the transposed problem).
  SolutionSample sample(cx lambda) const;

  // phi and S at x = pi only.
  Endpoint endpoint(cx lambda) const;

  // Fixed substep count per grid interval; used by step-halving tests.
  Endpoint endpoint_substeps(cx lambda, int substeps) const;

  // V(Y) = Y'(pi) + H Y(pi)
  Mat Vform(const Mat& Ypi, const Mat& dYpi) const { return dYpi + prob_.H * Ypi; }
  // U(Y) = Y'(0) - h Y(0)
  Mat Uform(const Mat& Y0, const Mat& dY0) const { return dY0 - prob_.h * Y0; }

  // Delta(lambda) = det V(phi)
  cx char_det(cx lambda) const;

  // M(lambda) = -(V(phi))^{-1} V(S); throws NearSingular too close to the spectrum.
  Mat weyl(cx lambda) const;

  const BoundaryProblem& problem() const { return prob_; }

 private:
  friend struct IntegratorTestHook;
  void run(cx lambda, int fixed_substeps, bool with_dual, bool store,
           SolutionSample* out, Endpoint* ep) const;
  int substeps_for(double len, cx lambda) const;

  BoundaryProblem prob_;
  BoundaryProblem probT_;
  Tolerances tol_;
  Scheme scheme_;
  double q_sup_ = 0.0;
};

// D(x_k, lambda, mu) = <phi*(x,mu), phi(x,lambda)>/(lambda - mu)
//                    = int_0^{x_k} phi*(t,mu) phi(t,lambda) dt.
// Quotient form away from coincidence, grid quadrature of the integral form
// for |lambda - mu| < coincide_tol. `a` carries lambda, `b` carries mu.
Mat d_kernel(const SolutionSample& a, const SolutionSample& b, int node, double coincide_tol = 1e-8);

// int_0^pi phi*(t, mu) phi(t, lambda) dt over the full grid.
Mat integral_phistar_phi(const SolutionSample& mu_sample, const SolutionSample& lambda_sample);

}  // namespace matsl
