#pragma once
// Numerical checkers for the characterization conditions (A), (R), (S), (C)
// and the structural identity suite (prodVal, Lemma sym, M = M*).

#include <string>
#include <utility>
#include <vector>

#include "ode.hpp"
#include "spectral_data.hpp"

namespace matsl {

enum class Verdict { Pass, Fail, Indeterminate };

const char* verdict_name(Verdict v);

struct ConditionItem {
  std::string condition;  // "A", "R", "S", "C", "structural"
  Verdict verdict = Verdict::Indeterminate;
  std::vector<std::pair<std::string, double>> metrics;  // ordered
  std::vector<std::string> notes;

  double metric(const std::string& key, double fallback = 0.0) const;
};

struct ConditionReport {
  std::vector<ConditionItem> items;

  const ConditionItem* find(const std::string& condition) const;
  bool all_passed() const;  // every item Pass
  std::string render_table() const;
};

// (A): the four residual sequences of the eigenvalue / weight asymptotics,
// pass iff each upper-half tail l2 <= check_tail_factor * lower half and
// max ||alpha_nq|| is finite.  Indeterminate when n_max < 8.
ConditionItem check_A(const SpectralData& data, const Tolerances& tol);

// (R): numerical rank of each cluster-head alpha equals the multiplicity.
ConditionItem check_R(const SpectralData& data, const Tolerances& tol);

// (S): lambda real, alpha Hermitian, alpha >= 0.
ConditionItem check_S(const SpectralData& data, const Tolerances& tol);

// (C): sigma_min of the normalized Gram matrix of {cos(rho_nq x) E_nq^(i)},
// n <= n_bands, where E are range bases of alpha'.
ConditionItem check_C(const SpectralData& data, int n_bands,
                      const Tolerances& tol);

// Structural identities of the forward problem: V(phi(lambda)) alpha = 0,
// the two Lemma sym relations, and M(lambda) = M*(lambda) at sample points.
ConditionItem check_structural(const BoundaryProblem& problem,
                               const SpectralData& data, const Tolerances& tol,
                               int workers = 0);

}  // namespace matsl
