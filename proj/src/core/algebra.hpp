#pragma once
// Small numeric helpers shared across modules.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace matsl {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

// sqrt branch used for rho = sqrt(lambda): Re >= 0, ties broken toward Im >= 0.
inline cx sqrt_branch(cx z) {
  cx r = std::sqrt(z);
  if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
  return r;
}

// Row-sum (infinity) matrix norm ||A|| = max_j sum_k |a_jk|.
inline double row_sum_norm(const Mat& A) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) s += std::abs(A(i, j));
    if (s > best) best = s;
  }
  return best;
}

// sin(c x)/c with the removable singularity at c = 0 filled in.
inline cx sinc_scaled(cx c, double x) {
  cx cxv = c * x;
  if (std::abs(cxv) < 1e-4) {
    cx c2 = cxv * cxv;
    return x * (1.0 - c2 / 6.0 * (1.0 - c2 / 20.0 * (1.0 - c2 / 42.0)));
  }
  return std::sin(cxv) / c;
}

inline bool all_finite(const Mat& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      cx v = A(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  return true;
}

inline bool is_uniform_grid(const std::vector<double>& g, double rel = 1e-9) {
  if (g.size() < 3) return true;
  double h0 = g[1] - g[0];
  for (size_t i = 1; i + 1 < g.size(); ++i)
    if (std::abs((g[i + 1] - g[i]) - h0) > rel * std::max(1.0, std::abs(h0))) return false;
  return true;
}

// Quadrature of matrix samples over grid nodes [0, upto]. Uses composite
// Simpson on uniform grids (falling back to a trapezoid closing panel when the
// node count is even) and plain trapezoid otherwise.
inline Mat grid_quadrature(const std::vector<Mat>& f, const std::vector<double>& g, size_t upto) {
  if (f.empty() || upto >= g.size())
    raise(ErrorCode::InvalidArgument, "grid_quadrature: bad range");
  Mat acc = Mat::Zero(f[0].rows(), f[0].cols());
  if (upto == 0) return acc;
  if (is_uniform_grid(g)) {
    double h = g[1] - g[0];
    size_t n = upto;  // number of panels
    if (n == 1) return (f[0] + f[1]) * (0.5 * h);
    if (n == 2) return (f[0] + 4.0 * f[1] + f[2]) * (h / 3.0);
    size_t simpson_end = (n % 2 == 0) ? n : n - 3;
    if (simpson_end >= 2) {
      acc += f[0] + f[simpson_end];
      for (size_t i = 1; i < simpson_end; ++i) acc += f[i] * static_cast<double>(i % 2 ? 4 : 2);
      acc *= h / 3.0;
    }
    if (simpson_end != n)  // odd panel count: close with one Simpson-3/8 panel
      acc += (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]) * (3.0 * h / 8.0);
    return acc;
  }
  for (size_t i = 0; i < upto; ++i) acc += (f[i] + f[i + 1]) * (0.5 * (g[i + 1] - g[i]));
  return acc;
}

inline Mat unit_projector(int m, int q /* 0-based */) {
  Mat P = Mat::Zero(m, m);
  P(q, q) = 1.0;
  return P;
}

}  // namespace matsl
