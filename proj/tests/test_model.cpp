#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "core/model.hpp"
#include "oracles.hpp"

using namespace matsl;
using oracle::PI;

namespace {
const Tolerances kTol;
double mdiff(const Mat& a, const Mat& b) { return row_sum_norm(a - b); }
}  // namespace

TEST_CASE("model problem fields: Q = (2/pi) omega constant, h = H = 0") {
  Vec omega(2);
  omega << cx(0.4, 0.0), cx(-0.7, 0.1);
  std::vector<double> grid = uniform_grid(65);
  BoundaryProblem p = model_problem(omega, grid);
  p.validate();
  CHECK(p.m == 2);
  CHECK(row_sum_norm(p.h) == 0.0);
  CHECK(row_sum_norm(p.H) == 0.0);
  Mat want = (2.0 / kPi) * omega.asDiagonal().toDenseMatrix();
  for (const Mat& Qi : p.Q) CHECK(mdiff(Qi, want) <= 1e-15);
}

TEST_CASE("model_phi closed forms") {
  SUBCASE("omega = 0: phi = cos(sqrt(lambda) x) I") {
    Vec omega = Vec::Zero(1);
    for (double x : {0.0, 0.7, 2.2, PI}) {
      CHECK(std::abs(model_phi(omega, 3.1, x)(0, 0) -
                     std::cos(std::sqrt(3.1) * x)) <= 1e-14);
    }
  }
  SUBCASE("lambda at the channel shift: removable, entry = 1") {
    Vec omega(1);
    omega << cx(0.9, 0.0);
    cx lambda = 2.0 * omega(0) / kPi;
    for (double x : {0.3, 1.9, PI})
      CHECK(std::abs(model_phi(omega, lambda, x)(0, 0) - 1.0) <= 1e-14);
  }
  SUBCASE("omega = diag(pi/2, pi), lambda = 5: diag(cos 2x, cos sqrt3 x)") {
    Vec omega(2);
    omega << cx(kPi / 2, 0.0), cx(kPi, 0.0);
    for (double x : {0.4, 1.3, 2.8}) {
      Mat f = model_phi(omega, 5.0, x);
      CHECK(std::abs(f(0, 0) - std::cos(2 * x)) <= 1e-14);
      CHECK(std::abs(f(1, 1) - std::cos(std::sqrt(3.0) * x)) <= 1e-14);
      CHECK(std::abs(f(0, 1)) == 0.0);
    }
  }
}

TEST_CASE("core integration of the model problem reproduces the closed forms") {
  Vec omega(2);
  omega << cx(0.4, 0.0), cx(-0.7, 0.0);
  std::vector<double> grid = uniform_grid(257);
  BoundaryProblem p = model_problem(omega, grid);
  Integrator integ(p, kTol);
  for (cx lambda : {cx(0.3, 0.0), cx(2.0, 0.5), cx(9.7, 0.0), cx(25.0, 1.0)}) {
    SolutionSample s = integ.sample(lambda);
    for (size_t i = 0; i < grid.size(); i += 32) {
      double x = grid[i];
      CHECK(mdiff(s.phi[i], model_phi(omega, lambda, x)) <= 1e-8);
      CHECK(mdiff(s.dphi[i], model_dphi(omega, lambda, x)) <= 1e-8);
      CHECK(mdiff(s.S[i], model_S(omega, lambda, x)) <= 1e-8);
      CHECK(mdiff(s.dS[i], model_dS(omega, lambda, x)) <= 1e-8);
      // diagonal potential: the dual solution coincides with phi
      CHECK(mdiff(s.phistar[i], model_phi(omega, lambda, x)) <= 1e-8);
    }
  }
}

TEST_CASE("model_sample mirrors Integrator::sample layout") {
  Vec omega(1);
  omega << cx(0.25, 0.0);
  std::vector<double> grid = uniform_grid(33);
  SolutionSample s = model_sample(omega, grid, cx(4.4, 0.3));
  REQUIRE(s.grid.size() == grid.size());
  REQUIRE(s.phi.size() == grid.size());
  REQUIRE(s.phistar.size() == grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(mdiff(s.phi[i], model_phi(omega, s.lambda, grid[i])) == 0.0);
    CHECK(mdiff(s.dS[i], model_dS(omega, s.lambda, grid[i])) == 0.0);
  }
}

TEST_CASE("model D-kernel") {
  Vec omega0 = Vec::Zero(1);

  SUBCASE("lambda = mu = 0, x = pi: entry is pi") {
    CHECK(std::abs(model_dkernel(omega0, 0.0, 0.0, PI)(0, 0) - PI) <= 1e-14);
  }
  SUBCASE("lambda = 1, mu = 4, x = pi: cosine orthogonality") {
    CHECK(std::abs(model_dkernel(omega0, 1.0, 4.0, PI)(0, 0)) <= 1e-14);
  }
  SUBCASE("coincident-argument limit: x/2 + sin(2 nu x)/(4 nu)") {
    Vec omega(1);
    omega << cx(0.6, 0.0);
    cx lambda(5.2, 0.0);
    cx nu = model_nu(omega(0), lambda);
    for (double x : {0.8, 2.1}) {
      cx want = x / 2.0 + std::sin(2.0 * nu * x) / (4.0 * nu);
      CHECK(std::abs(model_dkernel(omega, lambda, lambda, x)(0, 0) - want) <=
            1e-13);
    }
    // nu = 0: entry = x
    cx l0 = 2.0 * omega(0) / kPi;
    CHECK(std::abs(model_dkernel(omega, l0, l0, 1.234)(0, 0) - 1.234) <= 1e-13);
  }
  SUBCASE("matches the product-to-sum oracle entrywise") {
    Vec omega(2);
    omega << cx(0.4, 0.0), cx(-0.7, 0.2);
    for (cx lambda : {cx(3.3, 0.1), cx(7.9, -0.4)}) {
      for (cx mu : {cx(1.1, 0.0), cx(12.6, 0.3)}) {
        for (double x : {0.9, 2.6, PI}) {
          Mat D = model_dkernel(omega, lambda, mu, x);
          for (int q = 0; q < 2; ++q) {
            cx a = model_nu(omega(q), lambda);
            cx b = model_nu(omega(q), mu);
            CHECK(std::abs(D(q, q) - oracle::cos_cos_integral(a, b, x)) <= 1e-12);
          }
        }
      }
    }
  }
  SUBCASE("matches the generic d_kernel on the model problem") {
    Vec omega(2);
    omega << cx(0.4, 0.0), cx(-0.7, 0.0);
    std::vector<double> grid = uniform_grid(257);
    Integrator integ(model_problem(omega, grid), kTol);
    cx lambda(6.2, 0.4), mu(2.9, -0.7);
    SolutionSample a = integ.sample(lambda);
    SolutionSample b = integ.sample(mu);
    for (size_t node : {size_t(64), size_t(192), size_t(256)}) {
      Mat via_ode = d_kernel(a, b, static_cast<int>(node));
      Mat closed = model_dkernel(omega, lambda, mu, grid[node]);
      CHECK(mdiff(via_ode, closed) <= 1e-9);
    }
  }
}

TEST_CASE("model spectral data") {
  SUBCASE("omega = 0, m = 1: plain cosine data") {
    Vec omega = Vec::Zero(1);
    SpectralData d = model_spectral_data(omega, 6, kTol);
    d.validate();
    CHECK(d.n_max == 6);
    for (int n = 0; n <= 6; ++n) {
      const SpectralDatum& e = d.at(n, 1);
      CHECK(std::abs(e.lambda - cx(n * n, 0.0)) <= 1e-15);
      double w = (n == 0) ? 1.0 / kPi : 2.0 / kPi;
      CHECK(std::abs(e.alpha(0, 0) - w) <= 1e-15);
      CHECK(e.multiplicity == 1);
      CHECK(e.cluster_head);
    }
  }

  SUBCASE("omega = diag(pi/2, pi): lambda = 2 is one cluster across bands") {
    Vec omega(2);
    omega << cx(kPi / 2, 0.0), cx(kPi, 0.0);
    SpectralData d = model_spectral_data(omega, 5, kTol);
    d.validate();
    CHECK(d.groups.count() == 2);
    for (int n = 0; n <= 5; ++n) {
      CHECK(std::abs(d.at(n, 1).lambda - cx(n * n + 1.0, 0.0)) <= 1e-14);
      CHECK(std::abs(d.at(n, 2).lambda - cx(n * n + 2.0, 0.0)) <= 1e-14);
    }
    const SpectralDatum& a02 = d.at(0, 2);
    const SpectralDatum& a11 = d.at(1, 1);
    CHECK(a02.cluster_id == a11.cluster_id);
    CHECK(a02.multiplicity == 2);
    CHECK(a11.multiplicity == 2);
    CHECK(a02.cluster_head);
    CHECK_FALSE(a11.cluster_head);
    Mat cluster = (Mat(2, 2) << 2.0 / kPi, 0.0, 0.0, 1.0 / kPi).finished();
    CHECK(mdiff(a02.alpha, cluster) <= 1e-15);
    CHECK(mdiff(a11.alpha, cluster) <= 1e-15);
    CHECK(mdiff(a02.alpha_primed, cluster) <= 1e-15);
    CHECK(row_sum_norm(a11.alpha_primed) == 0.0);
    // a non-clustered entry stays channel-local
    Mat e11 = (2.0 / kPi) * unit_projector(2, 0);
    CHECK(mdiff(d.at(2, 1).alpha, e11) <= 1e-14);
  }

  SUBCASE("omega = 0, m = 2: in-band clusters of multiplicity 2") {
    Vec omega = Vec::Zero(2);
    SpectralData d = model_spectral_data(omega, 4, kTol);
    d.validate();
    CHECK(d.groups.count() == 1);
    for (int n = 0; n <= 4; ++n) {
      const SpectralDatum& e1 = d.at(n, 1);
      const SpectralDatum& e2 = d.at(n, 2);
      CHECK(e1.cluster_id == e2.cluster_id);
      CHECK(e1.multiplicity == 2);
      double w = (n == 0) ? 1.0 / kPi : 2.0 / kPi;
      CHECK(mdiff(e1.alpha, w * Mat::Identity(2, 2)) <= 1e-15);
      // alpha_n^{(1)} = alpha_n: single group sums the primed weights
      CHECK(mdiff(d.group_sum(n, 0), d.alpha_n(n)) == 0.0);
      CHECK(mdiff(d.alpha_n(n), w * Mat::Identity(2, 2)) <= 1e-15);
    }
  }
}

TEST_CASE("model data satisfies the forward invariants in closed form") {
  Vec omega(2);
  omega << cx(0.35, 0.0), cx(1.1, 0.0);
  const int n_max = 8;
  SpectralData d = model_spectral_data(omega, n_max, kTol);

  SUBCASE("kernel identity V(phi) alpha = 0") {
    for (const SpectralDatum& e : d.entries) {
      Mat V = model_dphi(omega, e.lambda, kPi);  // H-tilde = 0
      CHECK(row_sum_norm(V * e.alpha) <= 1e-10);
    }
  }
  SUBCASE("Lemma sym, both relations, via the closed-form kernel") {
    std::vector<const SpectralDatum*> heads;
    for (const SpectralDatum& e : d.entries)
      if (e.cluster_head) heads.push_back(&e);
    for (const SpectralDatum* a : heads) {
      Mat B = model_dkernel(omega, a->lambda, a->lambda, kPi);
      CHECK(row_sum_norm(a->alpha * B * a->alpha - a->alpha) <= 1e-10);
      for (const SpectralDatum* b : heads) {
        if (a == b) continue;
        Mat C = model_dkernel(omega, b->lambda, a->lambda, kPi);
        CHECK(row_sum_norm(a->alpha * C * b->alpha) <= 1e-10);
      }
    }
  }
}
