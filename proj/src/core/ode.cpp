#include "ode.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace matsl {

namespace {

constexpr int kMaxStages = 11;

struct Tableau {
  int stages = 0;
  int order = 0;
  double a[kMaxStages][kMaxStages] = {};
  double b[kMaxStages] = {};
  double c[kMaxStages] = {};
};

const Tableau& tableau_rk4() {
  static const Tableau t = [] {
    Tableau t;
    t.stages = 4;
    t.order = 4;
    t.c[1] = 0.5;
    t.c[2] = 0.5;
    t.c[3] = 1.0;
    t.a[1][0] = 0.5;
    t.a[2][1] = 0.5;
    t.a[3][2] = 1.0;
    t.b[0] = 1.0 / 6;
    t.b[1] = 1.0 / 3;
    t.b[2] = 1.0 / 3;
    t.b[3] = 1.0 / 6;
    return t;
  }();
  return t;
}

// Cooper-Verner, 11 stages, order 8 (coefficients closed-form in sqrt(21)).
const Tableau& tableau_cv8() {
  static const Tableau t = [] {
    Tableau t;
    const double s = std::sqrt(21.0);
    t.stages = 11;
    t.order = 8;
    t.c[0] = 0.0;
    t.c[1] = 0.5;
    t.c[2] = 0.5;
    t.c[3] = (7.0 + s) / 14;
    t.c[4] = (7.0 + s) / 14;
    t.c[5] = 0.5;
    t.c[6] = (7.0 - s) / 14;
    t.c[7] = (7.0 - s) / 14;
    t.c[8] = 0.5;
    t.c[9] = (7.0 + s) / 14;
    t.c[10] = 1.0;
    t.a[1][0] = 0.5;
    t.a[2][0] = 0.25;
    t.a[2][1] = 0.25;
    t.a[3][0] = 1.0 / 7;
    t.a[3][1] = -(7.0 + 3.0 * s) / 98;
    t.a[3][2] = (21.0 + 5.0 * s) / 49;
    t.a[4][0] = (11.0 + s) / 84;
    t.a[4][2] = (18.0 + 4.0 * s) / 63;
    t.a[4][3] = (21.0 - s) / 252;
    t.a[5][0] = (5.0 + s) / 48;
    t.a[5][2] = (9.0 + s) / 36;
    t.a[5][3] = (-231.0 + 14.0 * s) / 360;
    t.a[5][4] = (63.0 - 7.0 * s) / 80;
    t.a[6][0] = (10.0 - s) / 42;
    t.a[6][2] = (-432.0 + 92.0 * s) / 315;
    t.a[6][3] = (633.0 - 145.0 * s) / 90;
    t.a[6][4] = (-504.0 + 115.0 * s) / 70;
    t.a[6][5] = (63.0 - 13.0 * s) / 35;
    t.a[7][0] = 1.0 / 14;
    t.a[7][4] = (14.0 - 3.0 * s) / 126;
    t.a[7][5] = (13.0 - 3.0 * s) / 63;
    t.a[7][6] = 1.0 / 9;
    t.a[8][0] = 1.0 / 32;
    t.a[8][4] = (91.0 - 21.0 * s) / 576;
    t.a[8][5] = 11.0 / 72;
    t.a[8][6] = -(385.0 + 75.0 * s) / 1152;
    t.a[8][7] = (63.0 + 13.0 * s) / 128;
    t.a[9][0] = 1.0 / 14;
    t.a[9][4] = 1.0 / 9;
    t.a[9][5] = -(733.0 + 147.0 * s) / 2205;
    t.a[9][6] = (515.0 + 111.0 * s) / 504;
    t.a[9][7] = -(51.0 + 11.0 * s) / 56;
    t.a[9][8] = (132.0 + 28.0 * s) / 245;
    t.a[10][4] = (-42.0 + 7.0 * s) / 18;
    t.a[10][5] = (-18.0 + 28.0 * s) / 45;
    t.a[10][6] = -(273.0 + 53.0 * s) / 72;
    t.a[10][7] = (301.0 + 53.0 * s) / 72;
    t.a[10][8] = (28.0 - 28.0 * s) / 45;
    t.a[10][9] = (49.0 - 7.0 * s) / 18;
    t.b[0] = 0.05;
    t.b[7] = 49.0 / 180;
    t.b[8] = 16.0 / 45;
    t.b[9] = 49.0 / 180;
    t.b[10] = 0.05;
    return t;
  }();
  return t;
}

// One grid interval [xa, xa+len] with nsub equal substeps.
// State columns solve Y'' = (Qlin(x) - lambda) Y, Qlin linear from Qa to Qb.
void step_interval(const Tableau& tab, const Mat& Qa, const Mat& Qb, double len, int nsub,
                   cx lambda, Mat& Y, Mat& Z) {
  const int m = static_cast<int>(Qa.rows());
  const Eigen::Index w = Y.cols();
  const double dt = len / nsub;
  Mat dQ = Qb - Qa;
  Mat A(m, m), Ys(m, w), Zs(m, w);
  Mat kY[kMaxStages], kZ[kMaxStages];
  for (int i = 0; i < tab.stages; ++i) {
    kY[i].resize(m, w);
    kZ[i].resize(m, w);
  }
  for (int step = 0; step < nsub; ++step) {
    const double t0 = static_cast<double>(step) / nsub;
    for (int i = 0; i < tab.stages; ++i) {
      Ys = Y;
      Zs = Z;
      for (int j = 0; j < i; ++j) {
        if (tab.a[i][j] == 0.0) continue;
        const double w_ij = dt * tab.a[i][j];
        Ys.noalias() += w_ij * kY[j];
        Zs.noalias() += w_ij * kZ[j];
      }
      const double frac = t0 + tab.c[i] * (dt / len);
      A = Qa + frac * dQ;
      A.diagonal().array() -= lambda;
      kY[i] = Zs;
      kZ[i].noalias() = A * Ys;
    }
    for (int i = 0; i < tab.stages; ++i) {
      if (tab.b[i] == 0.0) continue;
      Y.noalias() += (dt * tab.b[i]) * kY[i];
      Z.noalias() += (dt * tab.b[i]) * kZ[i];
    }
  }
}

}  // namespace

Integrator::Integrator(const BoundaryProblem& p, const Tolerances& tol, Scheme scheme)
    : prob_(p), probT_(p.transposed()), tol_(tol), scheme_(scheme) {
  prob_.validate();
  q_sup_ = prob_.q_sup();
}

int Integrator::substeps_for(double len, cx lambda) const {
  const Tableau& tab = scheme_ == Scheme::CV8 ? tableau_cv8() : tableau_rk4();
  double nu = std::abs(sqrt_branch(lambda)) + std::sqrt(q_sup_);
  double tol = std::max(tol_.integrator_rel, 1e-15);
  double target = tab.order == 8 ? std::pow(tol * 1e4, 1.0 / 9.0) : std::pow(tol * 120.0, 1.0 / 5.0);
  target = std::min(target, 0.35);
  double h = target / std::max(nu, 1.0);
  return std::max(2, static_cast<int>(std::ceil(len / h)));
}

void Integrator::run(cx lambda, int fixed_substeps, bool with_dual, bool store,
                     SolutionSample* out, Endpoint* ep) const {
  const Tableau& tab = scheme_ == Scheme::CV8 ? tableau_cv8() : tableau_rk4();
  const int m = prob_.m;
  const size_t nodes = prob_.grid.size();

  // primal state [phi | S]
  Mat Y(m, 2 * m), Z(m, 2 * m);
  Y.leftCols(m) = Mat::Identity(m, m);
  Y.rightCols(m).setZero();
  Z.leftCols(m) = prob_.h;
  Z.rightCols(m) = Mat::Identity(m, m);

  if (store) {
    out->lambda = lambda;
    out->grid = prob_.grid;
    out->phi.resize(nodes);
    out->dphi.resize(nodes);
    out->S.resize(nodes);
    out->dS.resize(nodes);
    out->phi[0] = Y.leftCols(m);
    out->dphi[0] = Z.leftCols(m);
    out->S[0] = Y.rightCols(m);
    out->dS[0] = Z.rightCols(m);
  }
  for (size_t i = 0; i + 1 < nodes; ++i) {
    double len = prob_.grid[i + 1] - prob_.grid[i];
    int nsub = fixed_substeps > 0 ? fixed_substeps : substeps_for(len, lambda);
    step_interval(tab, prob_.Q[i], prob_.Q[i + 1], len, nsub, lambda, Y, Z);
    if (!all_finite(Y) || !all_finite(Z))
      raise(ErrorCode::NonFiniteState, "integration overflow at grid node " + std::to_string(i + 1));
    if (store) {
      out->phi[i + 1] = Y.leftCols(m);
      out->dphi[i + 1] = Z.leftCols(m);
      out->S[i + 1] = Y.rightCols(m);
      out->dS[i + 1] = Z.rightCols(m);
    }
  }
  if (ep) {
    ep->phi = Y.leftCols(m);
    ep->dphi = Z.leftCols(m);
    ep->S = Y.rightCols(m);
    ep->dS = Z.rightCols(m);
  }

  if (!with_dual) return;

  // dual: W'' = (Q^T - lambda) W, W(0) = I, W'(0) = h^T; phi* = W^T
  Mat W = Mat::Identity(m, m), Wp = probT_.h;
  out->phistar.resize(nodes);
  out->dphistar.resize(nodes);
  out->phistar[0] = W.transpose();
  out->dphistar[0] = Wp.transpose();
  for (size_t i = 0; i + 1 < nodes; ++i) {
    double len = probT_.grid[i + 1] - probT_.grid[i];
    int nsub = fixed_substeps > 0 ? fixed_substeps : substeps_for(len, lambda);
    step_interval(tab, probT_.Q[i], probT_.Q[i + 1], len, nsub, lambda, W, Wp);
    if (!all_finite(W) || !all_finite(Wp))
      raise(ErrorCode::NonFiniteState, "dual integration overflow at grid node " + std::to_string(i + 1));
    out->phistar[i + 1] = W.transpose();
    out->dphistar[i + 1] = Wp.transpose();
  }
}

SolutionSample Integrator::sample(cx lambda) const {
  SolutionSample s;
  run(lambda, 0, /*with_dual=*/true, /*store=*/true, &s, nullptr);
  return s;
}

Endpoint Integrator::endpoint(cx lambda) const {
  Endpoint ep;
  run(lambda, 0, false, false, nullptr, &ep);
  return ep;
}

Endpoint Integrator::endpoint_substeps(cx lambda, int substeps) const {
  Endpoint ep;
  run(lambda, substeps, false, false, nullptr, &ep);
  return ep;
}

cx Integrator::char_det(cx lambda) const {
  Endpoint ep = endpoint(lambda);
  return Vform(ep.phi, ep.dphi).determinant();
}

Mat Integrator::weyl(cx lambda) const {
  Endpoint ep = endpoint(lambda);
  Mat Vphi = Vform(ep.phi, ep.dphi);
  Mat VS = Vform(ep.S, ep.dS);
  Eigen::JacobiSVD<Mat> svd(Vphi);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  // Natural off-spectrum scale of V(phi) is ~ (1+|rho|) e^{|Im rho| pi}; using
  // it keeps the guard meaningful for m = 1 where cond(V) is identically 1.
  cx rho = sqrt_branch(lambda);
  double scale = std::max(smax, 0.1 * (1.0 + std::abs(rho)) * std::exp(std::abs(rho.imag()) * kPi));
  if (!(smin > 0.0) || scale / smin > tol_.near_singular)
    raise(ErrorCode::NearSingular,
          "V(phi) effectively singular at lambda = (" + std::to_string(lambda.real()) + "," +
              std::to_string(lambda.imag()) + ")");
  return -Vphi.partialPivLu().solve(VS);
}

Mat d_kernel(const SolutionSample& a, const SolutionSample& b, int node, double coincide_tol) {
  if (a.grid.size() != b.grid.size())
    raise(ErrorCode::GridMismatch, "samples live on different grids");
  for (size_t i = 0; i < a.grid.size(); ++i)
    if (a.grid[i] != b.grid[i]) raise(ErrorCode::GridMismatch, "samples live on different grids");
  if (node < 0 || node >= static_cast<int>(a.grid.size()))
    raise(ErrorCode::InvalidArgument, "d_kernel: node out of range");
  if (b.phistar.empty()) raise(ErrorCode::InvalidArgument, "d_kernel: mu sample lacks dual solutions");

  cx dl = a.lambda - b.lambda;
  if (std::abs(dl) >= coincide_tol) {
    return (b.dphistar[node] * a.phi[node] - b.phistar[node] * a.dphi[node]) / dl;
  }
  std::vector<Mat> f(node + 1);
  for (int t = 0; t <= node; ++t) f[t] = b.phistar[t] * a.phi[t];
  return grid_quadrature(f, a.grid, node);
}

Mat integral_phistar_phi(const SolutionSample& mu_sample, const SolutionSample& lambda_sample) {
  if (mu_sample.grid.size() != lambda_sample.grid.size())
    raise(ErrorCode::GridMismatch, "samples live on different grids");
  size_t n = lambda_sample.grid.size();
  std::vector<Mat> f(n);
  for (size_t t = 0; t < n; ++t) f[t] = mu_sample.phistar[t] * lambda_sample.phi[t];
  return grid_quadrature(f, lambda_sample.grid, n - 1);
}

}  // namespace matsl
