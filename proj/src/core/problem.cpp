#include "problem.hpp"

#include <algorithm>
#include <string>

namespace matsl {

void BoundaryProblem::validate() const {
  if (m < 1) raise(ErrorCode::InvalidArgument, "m must be >= 1");
  if (grid.size() < 2) raise(ErrorCode::InvalidArgument, "grid needs at least 2 nodes");
  if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - kPi) > 1e-12)
    raise(ErrorCode::InvalidArgument, "grid must span [0, pi]");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i + 1] > grid[i]))
      raise(ErrorCode::InvalidArgument, "grid must be strictly increasing (node " + std::to_string(i + 1) + ")");
  if (Q.size() != grid.size())
    raise(ErrorCode::DimensionMismatch,
          "Q has " + std::to_string(Q.size()) + " samples for " + std::to_string(grid.size()) + " grid nodes");
  for (size_t i = 0; i < Q.size(); ++i) {
    if (Q[i].rows() != m || Q[i].cols() != m)
      raise(ErrorCode::DimensionMismatch, "Q[" + std::to_string(i) + "] is not " + std::to_string(m) + "x" + std::to_string(m));
    if (!all_finite(Q[i]))
      raise(ErrorCode::InvalidArgument, "Q[" + std::to_string(i) + "] has non-finite entries");
  }
  if (h.rows() != m || h.cols() != m || H.rows() != m || H.cols() != m)
    raise(ErrorCode::DimensionMismatch, "h and H must be " + std::to_string(m) + "x" + std::to_string(m));
  if (!all_finite(h) || !all_finite(H))
    raise(ErrorCode::InvalidArgument, "h or H has non-finite entries");
}

BoundaryProblem BoundaryProblem::transposed() const {
  BoundaryProblem t;
  t.m = m;
  t.grid = grid;
  t.Q.reserve(Q.size());
  for (const Mat& q : Q) t.Q.push_back(q.transpose());
  t.h = h.transpose();
  t.H = H.transpose();
  t.selfadjoint_hint = selfadjoint_hint;
  return t;
}

double BoundaryProblem::q_sup() const {
  double best = 0.0;
  for (const Mat& q : Q) best = std::max(best, row_sum_norm(q));
  return best;
}

BoundaryProblem BoundaryProblem::constant(int m, const Mat& Qc, const Mat& h, const Mat& H, int nodes) {
  return sampled(m, [&](double) { return Qc; }, h, H, nodes);
}

int BoundaryProblem::interval_of(double x) const {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  int i = static_cast<int>(it - grid.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(grid.size()) - 2);
}

}  // namespace matsl
