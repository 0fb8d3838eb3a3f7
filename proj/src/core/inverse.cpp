#include "inverse.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace matsl {

namespace {

// Relative rho tolerance under which two points of one collection G_n are
// the same point (functions on G_n must take equal values there).
constexpr double kRhoCoincide = 1e-12;

void require_compatible(const SpectralData& a, const SpectralData& b,
                        const char* where) {
  if (a.m != b.m)
    raise(ErrorCode::DimensionMismatch,
          std::string(where) + ": data sets have different m");
  if (a.n_max != b.n_max)
    raise(ErrorCode::DimensionMismatch,
          std::string(where) + ": data sets have different n_max");
  double scale = 1.0 + a.omega.cwiseAbs().maxCoeff();
  if ((a.omega - b.omega).cwiseAbs().maxCoeff() > 1e-6 * scale)
    raise(ErrorCode::DimensionMismatch,
          std::string(where) + ": data sets have different omega");
  if (a.groups.groups != b.groups.groups)
    raise(ErrorCode::DimensionMismatch,
          std::string(where) + ": data sets have different group partitions");
}

// Fornberg finite-difference weights for the first derivative at z over the
// nodes x[0..n-1].
std::vector<double> fd1_weights(double z, const double* x, int n) {
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, 1);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][1];
  return w;
}

}  // namespace

XiReport xi_sequence(const SpectralData& data, const SpectralData& model_data,
                     const Tolerances& tol) {
  (void)tol;
  require_compatible(data, model_data, "xi_sequence");
  const GroupPartition& gp = data.groups;
  XiReport rep;
  rep.xi.resize(data.n_max + 1, 0.0);
  for (int n = 0; n <= data.n_max; ++n) {
    double v = 0.0;
    for (int q = 1; q <= data.m; ++q)
      v += std::abs(data.at(n, q).rho - model_data.at(n, q).rho);
    for (int s = 0; s < gp.count(); ++s) {
      int ms = gp.rep[s] + 1;
      for (int q0 : gp.groups[s]) {
        v += std::abs(data.at(n, q0 + 1).rho - data.at(n, ms).rho);
        v += std::abs(model_data.at(n, q0 + 1).rho - model_data.at(n, ms).rho);
      }
      v += row_sum_norm(data.group_sum(n, s) - model_data.group_sum(n, s)) /
           std::max(n, 1);
    }
    v += row_sum_norm(data.alpha_n(n) - model_data.alpha_n(n));
    rep.xi[n] = v;
  }
  double acc = 0.0;
  for (int n = 0; n <= data.n_max; ++n) {
    double t = (n + 1) * rep.xi[n];
    acc += t * t;
  }
  rep.Omega = std::sqrt(acc);
  if (data.n_max >= 3) {
    int mid = (data.n_max + 1) / 2;
    double lo = 0.0, hi = 0.0;
    for (int n = 1; n <= data.n_max; ++n)
      (n <= mid ? lo : hi) += rep.xi[n] * rep.xi[n];
    rep.tail_nondecreasing = std::sqrt(hi) > std::sqrt(lo) + 1e-15;
  }
  return rep;
}

MainEquationSystem build_main_system(const SpectralData& data,
                                     const SpectralData& model_data, double x,
                                     int n_trunc, const Tolerances& tol) {
  if (x < -1e-12 || x > kPi + 1e-12)
    raise(ErrorCode::InvalidArgument, "build_main_system: x outside [0, pi]");
  if (n_trunc < 0)
    raise(ErrorCode::InvalidArgument, "build_main_system: negative N_trunc");
  if (n_trunc > data.n_max || n_trunc > model_data.n_max)
    raise(ErrorCode::TruncationTooLarge,
          "build_main_system: N_trunc exceeds n_max of a data set");
  require_compatible(data, model_data, "build_main_system");

  const int m = data.m;
  MainEquationSystem sys;
  sys.x = x;
  sys.m = m;
  sys.n_trunc = n_trunc;
  const int ntrip = 2 * m * (n_trunc + 1);
  sys.triples.reserve(ntrip);
  sys.lambda.reserve(ntrip);
  std::vector<cx> rho(ntrip);
  for (int n = 0; n <= n_trunc; ++n)
    for (int q = 1; q <= m; ++q)
      for (int i = 0; i < 2; ++i) {
        const SpectralDatum& d =
            (i == 0) ? data.at(n, q) : model_data.at(n, q);
        sys.triples.push_back({n, q, i});
        sys.lambda.push_back(d.lambda);
        rho[static_cast<int>(sys.lambda.size()) - 1] = d.rho;
      }

  // Coincident points within one collection G_n share an unknown slot.
  sys.cls.assign(ntrip, -1);
  for (int t = 0; t < ntrip; ++t) {
    for (int u = sys.triples[t].n * 2 * m; u < t; ++u) {
      if (std::abs(rho[t] - rho[u]) <= kRhoCoincide * (1.0 + std::abs(rho[u]))) {
        sys.cls[t] = sys.cls[u];
        break;
      }
    }
    if (sys.cls[t] < 0) {
      sys.cls[t] = static_cast<int>(sys.rep.size());
      sys.rep.push_back(t);
    }
  }

  const int slots = static_cast<int>(sys.rep.size());
  const Vec& omega = model_data.omega;
  sys.A = Mat::Identity(m * slots, m * slots);
  for (int t = 0; t < ntrip; ++t) {
    const IndexTriple& tr = sys.triples[t];
    const SpectralDatum& src =
        (tr.i == 0) ? data.at(tr.n, tr.q) : model_data.at(tr.n, tr.q);
    if (!src.cluster_head) continue;  // alpha' vanishes off cluster heads
    double sign = (tr.i == 0) ? 1.0 : -1.0;
    for (int d = 0; d < slots; ++d) {
      Mat D = model_dkernel(omega, sys.lambda[sys.rep[d]], sys.lambda[t], x);
      sys.A.block(sys.cls[t] * m, d * m, m, m) +=
          sign * (src.alpha_primed * D);
    }
  }
  sys.rhs.resize(m, m * slots);
  for (int d = 0; d < slots; ++d)
    sys.rhs.block(0, d * m, m, m) = model_phi(omega, sys.lambda[sys.rep[d]], x);
  (void)tol;
  return sys;
}

MainSolution solve_main_equation(const MainEquationSystem& sys,
                                 const Tolerances& tol) {
  MainSolution out;
  Eigen::PartialPivLU<Mat> lu(sys.A.transpose());
  double rc = lu.rcond();
  out.cond = (rc > 0.0) ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(out.cond < tol.main_singular)) {
    std::ostringstream os;
    os << "main equation near-singular at x = " << sys.x
       << " (cond estimate " << out.cond << ")";
    raise(ErrorCode::MainEquationSingular, os.str());
  }
  out.psi = lu.solve(sys.rhs.transpose()).transpose();
  double denom = std::max(row_sum_norm(sys.rhs), 1e-300);
  out.residual = row_sum_norm(sys.rhs - out.psi * sys.A) / denom;
  if (!all_finite(out.psi))
    raise(ErrorCode::MainEquationSingular,
          "main equation solution is not finite");
  return out;
}

BoundaryProblem ReconstructionResult::as_problem() const {
  BoundaryProblem p;
  p.m = m;
  p.grid = grid;
  p.Q = Q;
  p.h = h;
  p.H = H;
  double herm = row_sum_norm(h - h.adjoint().eval()) +
                row_sum_norm(H - H.adjoint().eval());
  for (const Mat& q : Q) herm += row_sum_norm(q - q.adjoint().eval());
  p.selfadjoint_hint = herm <= 1e-8 * (1.0 + static_cast<double>(Q.size()));
  return p;
}

ReconstructionResult reconstruct(const SpectralData& data, int n_trunc,
                                 const std::vector<double>& grid,
                                 const Tolerances& tol, int workers) {
  data.validate();
  if (n_trunc < 0 || n_trunc > data.n_max)
    raise(ErrorCode::TruncationTooLarge,
          "reconstruct: N_trunc outside [0, n_max]");
  const int nodes = static_cast<int>(grid.size());
  if (nodes < 5)
    raise(ErrorCode::InvalidArgument, "reconstruct: grid needs >= 5 nodes");
  if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - kPi) > 1e-12)
    raise(ErrorCode::InvalidArgument, "reconstruct: grid must span [0, pi]");
  for (int i = 1; i < nodes; ++i)
    if (!(grid[i] > grid[i - 1]))
      raise(ErrorCode::InvalidArgument, "reconstruct: grid not increasing");

  const int m = data.m;
  SpectralData model_data = model_spectral_data(data.omega, data.n_max, tol);
  XiReport xi = xi_sequence(data, model_data, tol);

  ReconstructionResult out;
  out.m = m;
  out.n_trunc = n_trunc;
  out.grid = grid;
  out.xi = xi.xi;
  out.Omega = xi.Omega;
  if (xi.tail_nondecreasing)
    out.warnings.push_back(
        "XiTailNonDecreasing: xi_n tail does not decay; data may violate "
        "the asymptotic condition (A)");

  out.eps0.assign(nodes, Mat::Zero(m, m));
  out.psi.assign(nodes, {});
  out.residuals.assign(nodes, 0.0);
  std::vector<double> conds(nodes, 0.0), tail(nodes, 0.0);
  const GroupPartition& gp = data.groups;
  const Vec& omega = data.omega;

  parallel_for(nodes, workers, [&](int ix) {
    double x = grid[ix];
    MainEquationSystem sys = build_main_system(data, model_data, x, n_trunc, tol);
    MainSolution sol = solve_main_equation(sys, tol);
    out.residuals[ix] = sol.residual;
    conds[ix] = sol.cond;
    if (ix == 0) out.triples = sys.triples;

    const int ntrip = static_cast<int>(sys.triples.size());
    std::vector<Mat> P(ntrip), T(ntrip);
    for (int t = 0; t < ntrip; ++t) {
      P[t] = sol.psi.block(0, sys.cls[t] * m, m, m);
      T[t] = model_phi(omega, sys.lambda[t], x);
    }
    out.psi[ix] = P;

    // index of triple (k, l, j) in the lex layout
    auto at = [&](int k, int l, int j) { return (k * m + (l - 1)) * 2 + j; };

    Mat eps0 = Mat::Zero(m, m);
    for (int k = 0; k <= n_trunc; ++k) {
      Mat term = Mat::Zero(m, m);
      for (int l = 1; l <= m; ++l) {
        const Mat& a0 = data.at(k, l).alpha_primed;
        term += (P[at(k, l, 0)] - P[at(k, l, 1)]) * a0 * T[at(k, l, 0)];
        term += P[at(k, l, 1)] * a0 * (T[at(k, l, 0)] - T[at(k, l, 1)]);
      }
      for (int s = 0; s < gp.count(); ++s) {
        int ms = gp.rep[s] + 1;
        for (int q0 : gp.groups[s]) {
          int l = q0 + 1;
          Mat da = data.at(k, l).alpha_primed - model_data.at(k, l).alpha_primed;
          term += (P[at(k, l, 1)] - P[at(k, ms, 1)]) * da * T[at(k, l, 1)];
          term += P[at(k, ms, 1)] * da * (T[at(k, l, 1)] - T[at(k, ms, 1)]);
        }
        Mat dA = data.group_sum(k, s) - model_data.group_sum(k, s);
        term += (P[at(k, ms, 1)] - P[at(k, 1, 1)]) * dA * T[at(k, ms, 1)];
        term += P[at(k, 1, 1)] * dA * (T[at(k, ms, 1)] - T[at(k, 1, 1)]);
      }
      term += P[at(k, 1, 1)] * (data.alpha_n(k) - model_data.alpha_n(k)) *
              T[at(k, 1, 1)];
      eps0 += term;
      if (k == n_trunc) tail[ix] = row_sum_norm(term);
    }
    out.eps0[ix] = eps0;
  });

  out.max_residual = *std::max_element(out.residuals.begin(), out.residuals.end());
  out.max_cond = *std::max_element(conds.begin(), conds.end());
  out.truncation_indicator = *std::max_element(tail.begin(), tail.end());

  double eps0_sup = 0.0;
  for (const Mat& e : out.eps0) eps0_sup = std::max(eps0_sup, row_sum_norm(e));
  if (out.truncation_indicator > tol.tail_warn * eps0_sup) {
    std::ostringstream os;
    os << "TailTooLarge: last band contributes " << out.truncation_indicator
       << " to eps0 (sup " << eps0_sup << "); increase N_trunc";
    out.warnings.push_back(os.str());
  }

  Mat Qt = Mat::Zero(m, m);
  for (int c = 0; c < m; ++c) Qt(c, c) = 2.0 * omega(c) / kPi;
  out.Q.assign(nodes, Qt);
  for (int i = 0; i < nodes; ++i) {
    int w = std::clamp(i - 2, 0, nodes - 5);
    std::vector<double> wts = fd1_weights(grid[i], grid.data() + w, 5);
    Mat der = Mat::Zero(m, m);
    for (int j = 0; j < 5; ++j) der += wts[j] * out.eps0[w + j];
    out.Q[i] -= 2.0 * der;  // eps = -2 eps0'
  }
  out.h = -out.eps0.front();
  out.H = out.eps0.back();
  return out;
}

}  // namespace matsl
