#pragma once
// Forward spectral problem: eigenvalue location by argument-principle
// contours around the spectral bands and weight matrices by contour residues
// of the Weyl matrix.

#include "ode.hpp"
#include "spectral_data.hpp"

namespace matsl {

struct OmegaInfo {
  Mat full;       // h + H + (1/2) int_0^pi Q dx  (trapezoid)
  Vec diag;       // diagonal entries
  bool diagonal;  // off-diagonal mass within tolerance
};

OmegaInfo compute_omega(const BoundaryProblem& p, const Tolerances& tol);

// Eigenvalues lambda_nq for n <= n_max with multiplicities and cluster
// bookkeeping; alpha matrices are left empty (see weight_matrices).
// Throws CountMismatch when a band contour does not enclose exactly m zeros
// (after one widen-and-retry), InvalidArgument when omega is not diagonal.
SpectralData locate_eigenvalues(const Integrator& integ, int n_max, const Tolerances& tol,
                                int workers = 0);

// Fills alpha_nq = Res_{lambda_nq} M(lambda) by trapezoid contours with node
// doubling. Cross-checks numerical rank against multiplicity and throws
// AssumptionOneViolated on mismatch; ContourCollision when two clusters sit
// closer than twice the minimum radius.
void weight_matrices(const Integrator& integ, SpectralData& data, const Tolerances& tol,
                     int workers = 0);

// Full forward pass: locate + weights on a CV8 integrator with a tightened
// local tolerance.
SpectralData forward_spectral_data(const BoundaryProblem& p, int n_max, const Tolerances& tol,
                                   int workers = 0);

namespace detail {
// Minimal Jonker-style Hungarian solver; returns assignment row -> col.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);
}  // namespace detail

}  // namespace matsl
