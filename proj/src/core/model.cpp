#include "model.hpp"

#include <algorithm>
#include <numeric>

namespace matsl {

BoundaryProblem model_problem(const Vec& omega, const std::vector<double>& grid) {
  const int m = static_cast<int>(omega.size());
  BoundaryProblem p;
  p.m = m;
  p.grid = grid;
  Mat Qc = Mat::Zero(m, m);
  Qc.diagonal() = (2.0 / kPi) * omega;
  p.Q.assign(grid.size(), Qc);
  p.h = Mat::Zero(m, m);
  p.H = Mat::Zero(m, m);
  bool real_omega = true;
  for (int q = 0; q < m; ++q)
    if (std::abs(omega(q).imag()) > 0) real_omega = false;
  p.selfadjoint_hint = real_omega;
  p.validate();
  return p;
}

Mat model_phi(const Vec& omega, cx lambda, double x) {
  const int m = static_cast<int>(omega.size());
  Mat v = Mat::Zero(m, m);
  for (int q = 0; q < m; ++q) v(q, q) = std::cos(model_nu(omega(q), lambda) * x);
  return v;
}

Mat model_dphi(const Vec& omega, cx lambda, double x) {
  const int m = static_cast<int>(omega.size());
  Mat v = Mat::Zero(m, m);
  for (int q = 0; q < m; ++q) {
    cx nu = model_nu(omega(q), lambda);
    v(q, q) = -nu * std::sin(nu * x);
  }
  return v;
}

Mat model_S(const Vec& omega, cx lambda, double x) {
  const int m = static_cast<int>(omega.size());
  Mat v = Mat::Zero(m, m);
  for (int q = 0; q < m; ++q) v(q, q) = sinc_scaled(model_nu(omega(q), lambda), x);
  return v;
}

Mat model_dS(const Vec& omega, cx lambda, double x) {
  return model_phi(omega, lambda, x);
}

SolutionSample model_sample(const Vec& omega, const std::vector<double>& grid, cx lambda) {
  SolutionSample s;
  s.lambda = lambda;
  s.grid = grid;
  const size_t nodes = grid.size();
  s.phi.resize(nodes);
  s.dphi.resize(nodes);
  s.S.resize(nodes);
  s.dS.resize(nodes);
  s.phistar.resize(nodes);
  s.dphistar.resize(nodes);
  for (size_t i = 0; i < nodes; ++i) {
    s.phi[i] = model_phi(omega, lambda, grid[i]);
    s.dphi[i] = model_dphi(omega, lambda, grid[i]);
    s.S[i] = model_S(omega, lambda, grid[i]);
    s.dS[i] = model_dS(omega, lambda, grid[i]);
    s.phistar[i] = s.phi[i];
    s.dphistar[i] = s.dphi[i];
  }
  return s;
}

Mat model_dkernel(const Vec& omega, cx lambda, cx mu, double x) {
  const int m = static_cast<int>(omega.size());
  Mat v = Mat::Zero(m, m);
  for (int q = 0; q < m; ++q) {
    cx a = model_nu(omega(q), lambda);
    cx b = model_nu(omega(q), mu);
    v(q, q) = 0.5 * (sinc_scaled(a - b, x) + sinc_scaled(a + b, x));
  }
  return v;
}

SpectralData model_spectral_data(const Vec& omega, int n_max, const Tolerances& tol) {
  const int m = static_cast<int>(omega.size());
  SpectralData data;
  data.m = m;
  data.n_max = n_max;
  data.omega = omega;
  data.groups = SpectralData::group_channels(omega, tol.omega_group);

  struct Gen {  // generating channel of an entry, before labeling
    cx lambda;
    int chan;  // 0-based
  };
  data.entries.reserve(static_cast<size_t>(n_max + 1) * m);
  std::vector<int> source_chan;
  for (int n = 0; n <= n_max; ++n) {
    std::vector<Gen> band(m);
    for (int c = 0; c < m; ++c)
      band[c] = {static_cast<double>(n) * n + 2.0 * omega(c) / kPi, c};
    if (n == 0)
      std::stable_sort(band.begin(), band.end(), [](const Gen& a, const Gen& b) {
        return std::abs(a.lambda) < std::abs(b.lambda);
      });
    for (int q = 1; q <= m; ++q) {
      SpectralDatum d;
      d.n = n;
      d.q = q;
      d.lambda = band[q - 1].lambda;
      d.rho = sqrt_branch(d.lambda);
      d.alpha = Mat::Zero(m, m);
      data.entries.push_back(d);
      source_chan.push_back(band[q - 1].chan);
    }
  }

  // Coincidence: same omega-group within a band, near-exact match across bands.
  const int count = static_cast<int>(data.entries.size());
  std::vector<int> root(count);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int i) {
    while (root[i] != i) {
      root[i] = root[root[i]];
      i = root[i];
    }
    return i;
  };
  auto join = [&](int i, int j) {
    int a = find(i), b = find(j);
    if (a != b) root[std::max(a, b)] = std::min(a, b);
  };
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const auto& ei = data.entries[i];
      const auto& ej = data.entries[j];
      bool coincident;
      if (ei.n == ej.n)
        coincident = data.groups.group_of[source_chan[i]] == data.groups.group_of[source_chan[j]];
      else
        coincident = std::abs(ei.lambda - ej.lambda) <= 1e-9 * (1.0 + std::abs(ei.lambda));
      if (coincident) join(i, j);
    }

  // Residue of M-tilde at each cluster: sum of generating-channel projectors.
  std::vector<Mat> cluster_alpha;
  std::vector<int> cluster_size;
  std::vector<int> id_of(count, -1);
  int next_id = 0;
  for (int i = 0; i < count; ++i) {
    int r = find(i);
    if (id_of[r] < 0) {
      id_of[r] = next_id++;
      cluster_alpha.push_back(Mat::Zero(m, m));
      cluster_size.push_back(0);
    }
    int id = id_of[r];
    double w = data.entries[i].n == 0 ? 1.0 / kPi : 2.0 / kPi;
    cluster_alpha[id](source_chan[i], source_chan[i]) += w;
    ++cluster_size[id];
  }
  for (int i = 0; i < count; ++i) {
    int r = find(i);
    SpectralDatum& d = data.entries[i];
    d.cluster_id = id_of[r];
    d.cluster_head = (r == i);
    d.multiplicity = cluster_size[id_of[r]];
    d.alpha = cluster_alpha[id_of[r]];
    d.alpha_primed = d.cluster_head ? d.alpha : Mat::Zero(m, m);
  }
  return data;
}

}  // namespace matsl
