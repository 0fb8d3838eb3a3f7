#include "spectral_data.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace matsl {

Mat SpectralData::group_sum(int n, int s) const {
  Mat acc = Mat::Zero(m, m);
  for (int q0 : groups.groups[s]) acc += at(n, q0 + 1).alpha_primed;
  return acc;
}

Mat SpectralData::alpha_n(int n) const {
  Mat acc = Mat::Zero(m, m);
  for (int s = 0; s < groups.count(); ++s) acc += group_sum(n, s);
  return acc;
}

void SpectralData::validate() const {
  if (m < 1) raise(ErrorCode::InvalidArgument, "m must be >= 1");
  if (n_max < 0) raise(ErrorCode::InvalidArgument, "n_max must be >= 0");
  if (omega.size() != m) raise(ErrorCode::DimensionMismatch, "omega must have m entries");
  if (entries.size() != static_cast<size_t>((n_max + 1) * m))
    raise(ErrorCode::DimensionMismatch,
          "expected " + std::to_string((n_max + 1) * m) + " entries, found " + std::to_string(entries.size()));
  for (int n = 0; n <= n_max; ++n)
    for (int q = 1; q <= m; ++q) {
      const SpectralDatum& d = entries[index_of(n, q)];
      if (d.n != n || d.q != q)
        raise(ErrorCode::DimensionMismatch,
              "entries[" + std::to_string(index_of(n, q)) + "] is mislabeled (expected n=" + std::to_string(n) +
                  ", q=" + std::to_string(q) + ")");
      if (d.alpha.rows() != m || d.alpha.cols() != m)
        raise(ErrorCode::DimensionMismatch, "alpha of entry (n=" + std::to_string(n) + ", q=" + std::to_string(q) +
                                                ") is not " + std::to_string(m) + "x" + std::to_string(m));
      if (!all_finite(d.alpha))
        raise(ErrorCode::InvalidArgument, "alpha of entry (n=" + std::to_string(n) + ", q=" + std::to_string(q) +
                                              ") has non-finite entries");
    }
}

GroupPartition SpectralData::group_channels(const Vec& omega, double tol) {
  const int m = static_cast<int>(omega.size());
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(omega(i)));
  const double eps = tol * (1.0 + scale);

  GroupPartition part;
  part.group_of.assign(m, -1);
  for (int q = 0; q < m; ++q) {
    if (part.group_of[q] >= 0) continue;
    int s = part.count();
    part.groups.push_back({q});
    part.rep.push_back(q);
    part.group_of[q] = s;
    for (int r = q + 1; r < m; ++r)
      if (part.group_of[r] < 0 && std::abs(omega(r) - omega(q)) <= eps) {
        part.groups[s].push_back(r);
        part.group_of[r] = s;
      }
  }
  return part;
}

void SpectralData::rebuild_clusters(double cluster_rel, bool set_multiplicity_from_size) {
  const int count = static_cast<int>(entries.size());
  std::vector<int> root(count);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int i) {
    while (root[i] != i) {
      root[i] = root[root[i]];
      i = root[i];
    }
    return i;
  };

  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      double r = cluster_rel * std::pow(1.0 + std::abs(entries[i].lambda), 0.25);
      if (std::abs(entries[i].lambda - entries[j].lambda) <= r) {
        int a = find(i), b = find(j);
        if (a != b) root[std::max(a, b)] = std::min(a, b);
      }
    }

  int next_id = 0;
  std::vector<int> id_of(count, -1);
  for (int i = 0; i < count; ++i) {
    int r = find(i);
    if (id_of[r] < 0) id_of[r] = next_id++;
    entries[i].cluster_id = id_of[r];
    entries[i].cluster_head = (r == i);  // lex least index is the head
    entries[i].alpha_primed = entries[i].cluster_head ? entries[i].alpha : Mat::Zero(m, m);
  }
  if (set_multiplicity_from_size) {
    std::vector<int> size(next_id, 0);
    for (const auto& e : entries) ++size[e.cluster_id];
    for (auto& e : entries) e.multiplicity = size[e.cluster_id];
  }
}

}  // namespace matsl
