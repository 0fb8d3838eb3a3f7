#pragma once
// Self-contained reference computations used to pin expected test values.
// Everything here follows from textbook closed forms (constant-coefficient
// ODEs, product-to-sum identities) or elementary composite quadrature, and is
// written independently of the library's numerics on purpose: agreement
// between the two routes is the point of the tests.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline constexpr double PI = 3.14159265358979323846;

// cos(sqrt(z) x): entire in z, so any square root branch works.
inline cx cos_sqrt(cx z, double x) {
  return std::cos(std::sqrt(z) * x);
}

// sin(sqrt(z) x)/sqrt(z) with the removable singularity at z = 0.
inline cx sinc_sqrt(cx z, double x) {
  cx w = z * (x * x);
  if (std::abs(w) < 1e-8) return x * (1.0 - w / 6.0 + w * w / 120.0);
  cx nu = std::sqrt(z);
  return std::sin(nu * x) / nu;
}

// sin(c x)/c with the removable singularity at c = 0 (sin and the square
// root are both odd, so the branch cancels).
inline cx sin_over(cx c, double x) { return sinc_sqrt(c * c, x); }

// int_0^x cos(a t) cos(b t) dt, complex a, b.
inline cx cos_cos_integral(cx a, cx b, double x) {
  return 0.5 * (sinc_sqrt((a - b) * (a - b), x) + sinc_sqrt((a + b) * (a + b), x));
}

// Scalar constant-potential problem -y'' + c y = lambda y on (0, pi) with
// y'(0) = h y(0) type initial data: phi(0)=1, phi'(0)=h; S(0)=0, S'(0)=1.
struct ScalarConst {
  cx c{}, h{}, H{};

  cx phi(cx lambda, double x) const {
    cx z = lambda - c;
    return cos_sqrt(z, x) + h * sinc_sqrt(z, x);
  }
  cx dphi(cx lambda, double x) const {
    cx z = lambda - c;
    return -z * sinc_sqrt(z, x) + h * cos_sqrt(z, x);
  }
  cx S(cx lambda, double x) const { return sinc_sqrt(lambda - c, x); }
  cx dS(cx lambda, double x) const { return cos_sqrt(lambda - c, x); }

  cx Vphi(cx lambda) const { return dphi(lambda, PI) + H * phi(lambda, PI); }
  cx VS(cx lambda) const { return dS(lambda, PI) + H * S(lambda, PI); }
  cx weyl(cx lambda) const { return -VS(lambda) / Vphi(lambda); }
};

// Constant m x m potential: phi(x) = C(x) + Sig(x) h, S(x) = Sig(x) where
// C = sum K^n x^{2n}/(2n)!, Sig = sum K^n x^{2n+1}/(2n+1)!, K = Q - lambda I,
// evaluated through the eigendecomposition of K.
struct MatrixConst {
  Mat Q, h, H;

  struct Pair {
    Mat C, Sig, dC, dSig;
  };

  Pair fundamentals(cx lambda, double x) const {
    const int m = static_cast<int>(Q.rows());
    Eigen::ComplexEigenSolver<Mat> es(Q - lambda * Mat::Identity(m, m));
    Mat E = es.eigenvectors();
    Mat Einv = E.inverse();
    Mat C = Mat::Zero(m, m), Sig = Mat::Zero(m, m), dC = Mat::Zero(m, m),
        dSig = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      cx k = es.eigenvalues()(i);  // phi'' = k phi channelwise
      // cos/sinc in sqrt(-k): C'' = k C with C(0)=1, C'(0)=0 etc.
      cx cv = cos_sqrt(-k, x);
      cx sv = sinc_sqrt(-k, x);
      Mat proj = E.col(i) * Einv.row(i);
      C += cv * proj;
      Sig += sv * proj;
      dC += k * sv * proj;    // C' = k Sig
      dSig += cv * proj;      // Sig' = C
    }
    return {C, Sig, dC, dSig};
  }

  Mat phi(cx lambda, double x) const {
    Pair p = fundamentals(lambda, x);
    return p.C + p.Sig * h;
  }
  Mat dphi(cx lambda, double x) const {
    Pair p = fundamentals(lambda, x);
    return p.dC + p.dSig * h;
  }
  Mat S(cx lambda, double x) const { return fundamentals(lambda, x).Sig; }
  Mat dS(cx lambda, double x) const { return fundamentals(lambda, x).dSig; }

  Mat Vphi(cx lambda) const { return dphi(lambda, PI) + H * phi(lambda, PI); }
  Mat VS(cx lambda) const { return dS(lambda, PI) + H * S(lambda, PI); }
  Mat weyl(cx lambda) const { return -Vphi(lambda).inverse() * VS(lambda); }
};

// Composite Simpson over uniformly sampled matrix values (count must be odd;
// the last interval falls back to trapezoid when it is not).
inline Mat simpson(const std::vector<Mat>& f, double a, double b) {
  const int n = static_cast<int>(f.size());
  const double hstep = (b - a) / (n - 1);
  Mat acc = Mat::Zero(f[0].rows(), f[0].cols());
  int pairs = (n - 1) / 2;
  for (int p = 0; p < pairs; ++p)
    acc += (hstep / 3.0) * (f[2 * p] + 4.0 * f[2 * p + 1] + f[2 * p + 2]);
  if ((n - 1) % 2 != 0) acc += (hstep / 2.0) * (f[n - 2] + f[n - 1]);
  return acc;
}

inline cx simpson_fn(const std::function<cx(double)>& f, double a, double b, int nodes) {
  std::vector<Mat> vals(nodes, Mat(1, 1));
  for (int i = 0; i < nodes; ++i)
    vals[i](0, 0) = f(a + (b - a) * i / (nodes - 1));
  return simpson(vals, a, b)(0, 0);
}

}  // namespace oracle
