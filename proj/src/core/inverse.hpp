#pragma once
// Method of spectral mappings: truncated main equation and reconstruction
// of (Q, h, H) from spectral data (Algorithm 1).

#include <string>
#include <vector>

#include "model.hpp"
#include "problem.hpp"

namespace matsl {

// One flattened index (n, q, i): band n, channel q (1-based),
// i = 0 for the given data, i = 1 for the model data.
struct IndexTriple {
  int n = 0;
  int q = 1;
  int i = 0;
};

struct XiReport {
  std::vector<double> xi;          // xi_n, n = 0..n_max
  double Omega = 0.0;              // (sum ((n+1) xi_n)^2)^{1/2}
  bool tail_nondecreasing = false; // upper-half l2 tail >= lower half
};

// The five-summand xi_n sequence comparing two data sets over a shared
// omega / group partition, and the weighted Omega aggregate.
XiReport xi_sequence(const SpectralData& data, const SpectralData& model_data,
                     const Tolerances& tol);

// The dense truncated main equation at one grid point x.
//
// The unknown psi is a row vector of m x m blocks indexed by the triples
// (n, q, i), n <= N_trunc, flattened in lexicographic order.  Triples of one
// band whose rho coincide share a single unknown (functions on G_n take equal
// values at equal points); `cls` maps each triple to its unknown slot and
// `rep` picks the lexicographically least member of each slot.  A holds
// I + R-tilde(x) in the row convention (row = source slot, column =
// destination slot), so the solve step factors A^T.
struct MainEquationSystem {
  double x = 0.0;
  int m = 0;
  int n_trunc = 0;
  std::vector<IndexTriple> triples;  // size 2m(N_trunc+1), lex order
  std::vector<cx> lambda;            // per triple
  std::vector<int> cls;              // triple -> slot
  std::vector<int> rep;              // slot -> representative triple
  Mat A;                             // side m * rep.size()
  Mat rhs;                           // m x (m * rep.size()), model phi blocks
};

MainEquationSystem build_main_system(const SpectralData& data,
                                     const SpectralData& model_data, double x,
                                     int n_trunc, const Tolerances& tol);

struct MainSolution {
  Mat psi;               // m x (m * slots), solved row blocks
  double residual = 0.0; // ||psi_tilde - psi A|| / ||psi_tilde||
  double cond = 0.0;     // LU condition estimate
};

MainSolution solve_main_equation(const MainEquationSystem& sys,
                                 const Tolerances& tol);

struct ReconstructionResult {
  int m = 0;
  int n_trunc = 0;
  std::vector<double> grid;
  std::vector<Mat> Q;      // Q-tilde + eps per node
  Mat h, H;                // -eps0(0), eps0(pi)
  std::vector<Mat> eps0;   // per node
  std::vector<IndexTriple> triples;
  std::vector<std::vector<Mat>> psi;  // per node, per triple (expanded)
  std::vector<double> residuals;      // main-equation residual per node
  std::vector<double> xi;
  double Omega = 0.0;
  double truncation_indicator = 0.0;  // max_x of the last band's eps0 term
  double max_residual = 0.0;
  double max_cond = 0.0;
  std::vector<std::string> warnings;

  BoundaryProblem as_problem() const;
};

// Algorithm 1: model data from data.omega, main equation solved per grid
// node, eps0 assembled with the stabilized grouping, eps = -2 eps0' by
// five-point finite differences.
ReconstructionResult reconstruct(const SpectralData& data, int n_trunc,
                                 const std::vector<double>& grid,
                                 const Tolerances& tol, int workers = 0);

}  // namespace matsl
