#pragma once
// Spectral data {lambda_nq, alpha_nq} with the cluster bookkeeping and the
// omega-group partition used throughout the forward and inverse modules.

#include <vector>

#include "algebra.hpp"
#include "tolerances.hpp"

namespace matsl {

struct SpectralDatum {
  int n = 0;
  int q = 1;  // channel, 1-based
  cx lambda{};
  cx rho{};            // sqrt_branch(lambda)
  Mat alpha;           // weight matrix, shared by every entry of a cluster
  Mat alpha_primed;    // alpha at the cluster head, zero elsewhere
  int multiplicity = 1;
  int cluster_id = 0;
  bool cluster_head = false;
};

// Partition of channels {1..m} into groups J_s of coincident omega values;
// representatives m_s are the smallest channel of each group.
struct GroupPartition {
  std::vector<std::vector<int>> groups;  // 0-based channel indices, sorted
  std::vector<int> rep;                  // m_s, 0-based
  std::vector<int> group_of;             // channel -> group index

  int count() const { return static_cast<int>(groups.size()); }
  Mat projector(int s, int m) const {  // I^{(s)}
    Mat P = Mat::Zero(m, m);
    for (int q : groups[s]) P(q, q) = 1.0;
    return P;
  }
};

struct SpectralData {
  int m = 0;
  int n_max = 0;
  Vec omega;  // diagonal entries of omega = h + H + (1/2) int Q
  std::vector<SpectralDatum> entries;  // (n_max+1)*m entries in lex (n, q) order
  GroupPartition groups;

  int index_of(int n, int q1) const { return n * m + (q1 - 1); }
  const SpectralDatum& at(int n, int q1) const { return entries[index_of(n, q1)]; }
  SpectralDatum& at(int n, int q1) { return entries[index_of(n, q1)]; }

  // alpha_n^{(s)} = sum_{q in J_s} alpha'_{nq}
  Mat group_sum(int n, int s) const;
  // alpha_n = sum_s alpha_n^{(s)}
  Mat alpha_n(int n) const;

  void validate() const;

  static GroupPartition group_channels(const Vec& omega, double omega_group_tol);

  // Recomputes cluster ids, heads, primed weights and (optionally)
  // multiplicities from lambda coincidence. Heads are lexicographically
  // least (n, q). Coincidence radius: rel*(1+|lambda|)^{1/4}.
  void rebuild_clusters(double cluster_rel, bool set_multiplicity_from_size);
};

}  // namespace matsl
