#pragma once
// Independent closed-form and quadrature oracles used by the test suites.
// Everything here is derived from textbook formulas only, so the main
// library cannot "agree with itself" through shared code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline cx sqrt_re_branch(cx z) {
  // principal-like branch with Re >= 0, ties toward Im >= 0
  cx r = std::sqrt(z);
  if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
  return r;
}

// sin(c x)/c, stable near c = 0
inline cx sinc_scaled(cx c, double x) {
  cx cx_ = c * x;
  if (std::abs(cx_) < 1e-4) {
    cx c2 = cx_ * cx_;
    return x * (1.0 - c2 / 6.0 * (1.0 - c2 / 20.0 * (1.0 - c2 / 42.0)));
  }
  return std::sin(cx_) / c;
}

// Scalar Sturm-Liouville problem with constant potential c on (0, pi):
//   -y'' + c y = lambda y,  phi(0)=1, phi'(0)=h,  S(0)=0, S'(0)=1.
struct ScalarConst {
  cx c{0.0}, h{0.0}, H{0.0};

  cx nu(cx lambda) const { return sqrt_re_branch(lambda - c); }
  cx phi(double x, cx lambda) const {
    cx v = nu(lambda);
    return std::cos(v * x) + h * sinc_scaled(v, x);
  }
  cx dphi(double x, cx lambda) const {
    cx v = nu(lambda);
    return -v * std::sin(v * x) + h * std::cos(v * x);
  }
  cx S(double x, cx lambda) const { return sinc_scaled(nu(lambda), x); }
  cx dS(double x, cx lambda) const { return std::cos(nu(lambda) * x); }
  // V(y) = y'(pi) + H y(pi)
  static constexpr double kPi = 3.14159265358979323846;
  cx Vphi(cx lambda) const { return dphi(kPi, lambda) + H * phi(kPi, lambda); }
  cx VS(cx lambda) const { return dS(kPi, lambda) + H * S(kPi, lambda); }
  cx Delta(cx lambda) const { return Vphi(lambda); }
  cx weyl(cx lambda) const { return -VS(lambda) / Vphi(lambda); }
};

// Composite Simpson quadrature for complex integrands (n even subintervals).
inline cx simpson(const std::function<cx(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  cx acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

inline Mat simpson_mat(const std::function<Mat(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  Mat acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

// int_0^x cos(a t) cos(b t) dt, closed form (product-to-sum).
inline cx cos_cos_integral(cx a, cx b, double x) {
  return 0.5 * (sinc_scaled(a - b, x) + sinc_scaled(a + b, x));
}

inline double row_sum_norm(const Mat& A) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) s += std::abs(A(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace oracle
