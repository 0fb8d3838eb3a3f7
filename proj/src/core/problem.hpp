#pragma once
// Boundary value problem L = L(Q, h, H) for the matrix Sturm-Liouville
// equation -Y'' + Q(x) Y = lambda Y on (0, pi) with
//   U(Y) = Y'(0) - h Y(0),   V(Y) = Y'(pi) + H Y(pi).

#include <vector>

#include "algebra.hpp"

namespace matsl {

struct BoundaryProblem {
  int m = 0;
  std::vector<double> grid;  // strictly increasing, grid.front()=0, grid.back()=pi
  std::vector<Mat> Q;        // potential samples, one m x m matrix per node
  Mat h, H;
  bool selfadjoint_hint = false;

  // Throws InvalidArgument / DimensionMismatch on malformed input.
  void validate() const;

  // Problem with Q, h, H transposed; its phi/S are the transposed dual
  // solutions phi*^T, S*^T of this problem.
  BoundaryProblem transposed() const;

  // sup_x ||Q(x)|| in the row-sum norm
  double q_sup() const;

  // Uniform grid with `nodes` samples of a constant potential.
  static BoundaryProblem constant(int m, const Mat& Qc, const Mat& h, const Mat& H,
                                  int nodes = 129);

  // Uniform grid sampling of a callable Q(x) -> Mat.
  template <typename F>
  static BoundaryProblem sampled(int m, F&& f, const Mat& h, const Mat& H, int nodes = 129) {
    BoundaryProblem p;
    p.m = m;
    p.h = h;
    p.H = H;
    p.grid.resize(nodes);
    p.Q.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
      p.grid[i] = kPi * i / (nodes - 1);
      p.Q[i] = f(p.grid[i]);
    }
    p.grid.back() = kPi;
    p.validate();
    return p;
  }

  // Piecewise-linear interpolation helpers used by the integrator.
  int interval_of(double x) const;
};

inline std::vector<double> uniform_grid(int nodes) {
  std::vector<double> g(nodes);
  for (int i = 0; i < nodes; ++i) g[i] = kPi * i / (nodes - 1);
  g.back() = kPi;
  return g;
}

}  // namespace matsl
