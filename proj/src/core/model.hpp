#pragma once
// Model problem L-tilde for omega in class D: Q-tilde = (2/pi) omega,
// h-tilde = H-tilde = 0, with closed-form solutions, spectral data and
// D-kernel (no ODE integration anywhere).

#include "ode.hpp"
#include "spectral_data.hpp"

namespace matsl {

// nu_q(lambda) = sqrt(lambda - 2 omega_q / pi) on the Re >= 0 branch.
inline cx model_nu(cx omega_q, cx lambda) { return sqrt_branch(lambda - 2.0 * omega_q / kPi); }

// The model boundary problem on the given grid.
BoundaryProblem model_problem(const Vec& omega, const std::vector<double>& grid);

// Diagonal closed-form values at one x.
Mat model_phi(const Vec& omega, cx lambda, double x);       // diag cos(nu_q x)
Mat model_dphi(const Vec& omega, cx lambda, double x);      // diag -nu_q sin(nu_q x)
Mat model_S(const Vec& omega, cx lambda, double x);         // diag sin(nu_q x)/nu_q
Mat model_dS(const Vec& omega, cx lambda, double x);        // diag cos(nu_q x)
// The dual solutions coincide with the primal ones (diagonal potential).

// Full SolutionSample on a grid (matches Integrator::sample of model_problem).
SolutionSample model_sample(const Vec& omega, const std::vector<double>& grid, cx lambda);

// D-tilde(x, lambda, mu) = int_0^x phi*(t,mu) phi(t,lambda) dt, closed form:
// diagonal entries (sin((a-b)x)/(a-b) + sin((a+b)x)/(a+b))/2 with a = nu_q(lambda),
// b = nu_q(mu); removable singularities handled by the stable sinc.
Mat model_dkernel(const Vec& omega, cx lambda, cx mu, double x);

// Spectral data of the model: lambda_nq = n^2 + 2 omega_q/pi,
// alpha weights 1/pi (n = 0) and 2/pi (n >= 1) on the generating channels,
// summed over coincident eigenvalues (within and across bands). Band-0
// entries are labeled in ascending |lambda| order, matching the forward
// module's convention.
SpectralData model_spectral_data(const Vec& omega, int n_max, const Tolerances& tol);

}  // namespace matsl
