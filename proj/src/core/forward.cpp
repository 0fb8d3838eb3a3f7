#include "forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "parallel.hpp"

namespace matsl {

namespace {

double merge_radius(const Tolerances& tol, cx lambda) {
  return tol.cluster_rel * std::pow(1.0 + std::abs(lambda), 0.25);
}

struct ContourScan {
  int winding = 0;
  bool ok = false;
  double delta_scale = 0.0;  // max |Delta| seen on the contour
};

// Argument-principle winding of f along |z - c| = r with node doubling and
// value reuse. Fails (ok = false) if the phase cannot be resolved within the
// node budget or a sample is nearly zero/non-finite.
template <typename F>
ContourScan winding_on_circle(F&& f, cx c, double r, int start_nodes, int max_nodes) {
  ContourScan out;
  std::vector<cx> vals;
  int K = std::max(16, start_nodes);
  vals.resize(K);
  for (int k = 0; k < K; ++k) {
    double th = 2.0 * kPi * k / K;
    vals[k] = f(c + r * cx(std::cos(th), std::sin(th)));
  }
  for (;;) {
    double scale = 0.0;
    for (const cx& v : vals) scale = std::max(scale, std::abs(v));
    out.delta_scale = scale;
    if (!(scale > 0.0) || !std::isfinite(scale)) return out;

    bool resolved = true;
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      cx a = vals[k];
      cx b = vals[(k + 1) % K];
      if (std::abs(a) < 1e-13 * scale || std::abs(b) < 1e-13 * scale) return out;  // sample on a zero
      double d = std::arg(b / a);
      if (std::abs(d) > 0.5 * kPi) {
        resolved = false;
        break;
      }
      total += d;
    }
    if (resolved) {
      double w = total / (2.0 * kPi);
      double rounded = std::round(w);
      if (std::abs(w - rounded) < 0.1) {
        out.winding = static_cast<int>(rounded);
        out.ok = true;
        return out;
      }
    }
    if (2 * K > max_nodes) return out;
    std::vector<cx> next(2 * K);
    for (int k = 0; k < K; ++k) {
      next[2 * k] = vals[k];
      double th = 2.0 * kPi * (2 * k + 1) / (2 * K);
      next[2 * k + 1] = f(c + r * cx(std::cos(th), std::sin(th)));
    }
    vals.swap(next);
    K *= 2;
  }
}

struct NewtonOut {
  cx z{};
  double resid = std::numeric_limits<double>::infinity();
  bool converged = false;
};

template <typename F>
NewtonOut newton_zero(F&& f, cx seed, double target_abs) {
  NewtonOut out;
  cx z = seed;
  double fz = std::abs(f(z));
  for (int it = 0; it < 80; ++it) {
    double delta = 1e-5 * std::sqrt(1.0 + std::abs(z));
    cx fp = (f(z + delta) - f(z - delta)) / (2.0 * delta);
    if (!(std::abs(fp) > 0.0)) break;
    cx step = f(z) / fp;
    double cap = 2.0 * (1.0 + std::sqrt(std::abs(z)));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    z -= step;
    fz = std::abs(f(z));
    if (fz <= 0.01 * target_abs && std::abs(step) <= 1e-10 * (1.0 + std::abs(z))) break;
  }
  out.z = z;
  out.resid = fz;
  out.converged = fz <= target_abs;
  return out;
}

struct FoundZero {
  cx z{};
  int mult = 0;
};

// First Newton-sum centroid of the zeros inside |z - c| = r  (divided by the
// count k this is the polished cluster center).
template <typename F>
cx newton_sum_centroid(F&& f, cx c, double r, int k) {
  const int K = 256;
  cx acc = 0.0;
  for (int j = 0; j < K; ++j) {
    double th = 2.0 * kPi * j / K;
    cx e = cx(std::cos(th), std::sin(th));
    cx z = c + r * e;
    double delta = 1e-3 * r;
    cx fp = (f(z + delta) - f(z - delta)) / (2.0 * delta);
    acc += (z - c) * (fp / f(z)) * (r * e);  // (z-c) f'/f dlambda/dtheta / i
  }
  cx s1 = acc / static_cast<double>(K);  // (1/2pi i) contour integral, trapezoid
  return c + s1 / static_cast<double>(k);
}

// Two-stage centroid: the finite-difference step inside newton_sum_centroid
// limits a single pass on a wide circle to ~(1e-3 r)^2 relative accuracy, so
// recompute on a circle shrunk around the first estimate.
template <typename F>
cx polished_centroid(F&& f, cx c, double r, int k, const Tolerances& tol, int max_nodes) {
  cx first = newton_sum_centroid(f, c, r, k);
  double r2 = std::max(4.0 * merge_radius(tol, first), 16.0 * std::abs(first - c));
  if (!(r2 < r)) return first;
  ContourScan chk = winding_on_circle(f, first, r2, 32, max_nodes);
  if (!chk.ok || chk.winding != k) return first;
  return newton_sum_centroid(f, first, r2, k);
}

struct DiskScan {
  std::vector<FoundZero> zeros;
  int expected = 0;
  double delta_scale = 0.0;
  bool counted = false;
};

template <typename F>
DiskScan scan_disk(F&& f, cx center, double radius, const std::vector<cx>& seeds,
                   const Tolerances& tol) {
  DiskScan scan;
  const int start_nodes = static_cast<int>(tol.contour_nodes);
  const int max_nodes = static_cast<int>(tol.max_contour_nodes);

  double r = radius;
  ContourScan cs;
  for (double nudge : {1.0, 1.043, 0.956, 1.087}) {
    cs = winding_on_circle(f, center, radius * nudge, start_nodes, max_nodes);
    if (cs.ok) {
      r = radius * nudge;
      break;
    }
  }
  if (!cs.ok) return scan;
  scan.counted = true;
  scan.expected = cs.winding;
  scan.delta_scale = cs.delta_scale;
  if (cs.winding <= 0) return scan;

  const double target = tol.refine_residual * cs.delta_scale;
  std::vector<cx> points;  // distinct polished zeros, deduplicated
  auto try_add = [&](cx s) {
    NewtonOut nw = newton_zero(f, s, target);
    if (!nw.converged || std::abs(nw.z - center) > r * 0.999) return false;
    for (cx w : points)
      if (std::abs(nw.z - w) <= std::max(merge_radius(tol, nw.z), merge_radius(tol, w)))
        return false;
    points.push_back(nw.z);
    return true;
  };

  for (cx s : seeds) try_add(s);
  try_add(center);

  for (int round = 0; round < 8; ++round) {
    std::sort(points.begin(), points.end(), [](cx a, cx b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });

    // multiplicity of each point by a tight winding circle; the radius never
    // reaches a neighbouring found point, so a winding above 1 means either
    // a genuine multiple zero or an unfound zero hiding nearby
    scan.zeros.clear();
    int total = 0;
    bool mult_ok = true;
    std::vector<std::pair<cx, double>> crowded;  // circles with winding > 1
    for (size_t i = 0; i < points.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < points.size(); ++j)
        if (j != i) nearest = std::min(nearest, std::abs(points[i] - points[j]));
      double rm = std::min({0.35 * nearest, 0.2, 2.0 * r});
      rm = std::max(rm, std::min(4.0 * merge_radius(tol, points[i]), 0.45 * nearest));
      ContourScan ms = winding_on_circle(f, points[i], rm, 32, max_nodes);
      if (!ms.ok || ms.winding < 1) {
        mult_ok = false;
        break;
      }
      if (ms.winding > 1) crowded.emplace_back(points[i], rm);
      FoundZero fz;
      fz.mult = ms.winding;
      fz.z = ms.winding > 1 ? polished_centroid(f, points[i], rm, ms.winding, tol, max_nodes)
                            : points[i];
      scan.zeros.push_back(fz);
      total += ms.winding;
    }
    if (mult_ok && total == scan.expected && !points.empty()) return scan;

    // rescue: collect fresh Newton starts.  Round 0 sprinkles cheap rings;
    // circles that counted more zeros than points get targeted starts; later
    // rounds walk a winding-guided subdivision of the disk so that a zero
    // missed by every seed is still found deterministically.
    std::vector<cx> starts;
    if (round == 0)
      for (int ring = 1; ring <= 2; ++ring)
        for (int j = 0; j < 8; ++j) {
          double th = 2.0 * kPi * (j + 0.5 * ring) / 8;
          starts.push_back(center + (0.4 * ring * r) * cx(std::cos(th), std::sin(th)));
        }
    for (const auto& [c0, rm0] : crowded)
      for (int j = 0; j < 8; ++j) {
        double th = 2.0 * kPi * j / 8;
        starts.push_back(c0 + 0.6 * rm0 * cx(std::cos(th), std::sin(th)));
      }
    if (round >= 1) {
      struct Disk {
        cx c;
        double r;
        int depth;
      };
      std::vector<Disk> work;
      work.push_back({center, 0.60 * r, 0});
      for (int j = 0; j < 6; ++j) {
        double th = kPi * j / 3.0;
        work.push_back({center + 0.65 * r * cx(std::cos(th), std::sin(th)), 0.60 * r, 0});
      }
      int budget = 40 + 40 * round;
      const int max_depth = std::min(round + 1, 6);
      for (size_t w = 0; w < work.size() && budget > 0; ++w) {
        Disk d = work[w];
        ContourScan win = winding_on_circle(f, d.c, d.r, 16, 2048);
        --budget;
        if (!win.ok) {
          win = winding_on_circle(f, d.c, d.r * 1.09, 16, 2048);
          --budget;
          if (!win.ok) continue;
        }
        int known = 0;
        for (cx z : points)
          if (std::abs(z - d.c) <= d.r) ++known;
        if (win.winding <= known) continue;
        starts.push_back(d.c);
        if (d.depth < max_depth && d.r > 4.0 * merge_radius(tol, d.c)) {
          work.push_back({d.c, 0.60 * d.r, d.depth + 1});
          for (int j = 0; j < 6; ++j) {
            double th = kPi * j / 3.0 + 0.5 * d.depth;
            work.push_back({d.c + 0.65 * d.r * cx(std::cos(th), std::sin(th)), 0.60 * d.r,
                            d.depth + 1});
          }
        }
      }
    }

    bool any_new = false;
    for (cx s : starts) any_new = try_add(s) || any_new;
    if (!any_new && round >= 4) break;
  }
  scan.zeros.clear();  // caller treats as count mismatch
  return scan;
}

}  // namespace

OmegaInfo compute_omega(const BoundaryProblem& p, const Tolerances& tol) {
  OmegaInfo info;
  Mat integral = Mat::Zero(p.m, p.m);
  for (size_t i = 0; i + 1 < p.grid.size(); ++i)
    integral += 0.5 * (p.grid[i + 1] - p.grid[i]) * (p.Q[i] + p.Q[i + 1]);
  info.full = p.h + p.H + 0.5 * integral;
  info.diag = info.full.diagonal();
  double off = 0.0;
  for (int i = 0; i < p.m; ++i)
    for (int j = 0; j < p.m; ++j)
      if (i != j) off = std::max(off, std::abs(info.full(i, j)));
  info.diagonal = off <= tol.omega_diag * (1.0 + row_sum_norm(info.full));
  return info;
}

namespace detail {

std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(n + 1);
  std::vector<int> p(n + 1), way(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = -1;
      double delta = INF;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j)
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

SpectralData locate_eigenvalues(const Integrator& integ, int n_max, const Tolerances& tol,
                                int workers) {
  const BoundaryProblem& p = integ.problem();
  OmegaInfo om = compute_omega(p, tol);
  if (!om.diagonal)
    raise(ErrorCode::InvalidArgument, "omega is not diagonal within tolerance; problem is outside class D");
  const int m = p.m;

  double omega_norm = 0.0;
  for (int q = 0; q < m; ++q) omega_norm = std::max(omega_norm, std::abs(om.diag(q)));
  const double r_band = (2.0 / kPi) * std::max(3.0 * omega_norm, 2.0);

  // first band whose contour is provably disjoint from its lower neighbor
  int n_safe = 1;
  while (2.0 * n_safe - 1.0 - 2.0 * r_band < 0.5) ++n_safe;
  n_safe = std::min(n_safe, n_max + 1);

  auto seed_of = [&](int n, int q0) { return cx(static_cast<double>(n) * n, 0.0) + 2.0 * om.diag(q0) / kPi; };
  auto delta = [&](cx z) { return integ.char_det(z); };

  struct Scope {
    int n_lo = 0, n_hi = 0;  // bands [n_lo, n_hi]
    cx center{};
    double radius = 0.0;
    double max_radius = 0.0;
  };
  std::vector<Scope> scopes;
  {
    Scope low;
    low.n_lo = 0;
    low.n_hi = std::min(n_safe - 1, n_max);
    double lo = -r_band;
    double hi_cap = static_cast<double>(low.n_hi) * low.n_hi + low.n_hi + 0.375;  // stay clear of the next band
    double hi = std::min(static_cast<double>(low.n_hi) * low.n_hi + r_band, hi_cap);
    low.center = 0.5 * (lo + hi);
    low.radius = 0.5 * (hi - lo);
    low.max_radius = hi_cap - low.center.real();
    scopes.push_back(low);
  }
  for (int n = n_safe; n <= n_max; ++n) {
    Scope s;
    s.n_lo = s.n_hi = n;
    s.center = static_cast<double>(n) * n;
    s.radius = r_band;
    s.max_radius = std::max(r_band, (2.0 * n - 1.0 - 0.3) / 2.0);
    scopes.push_back(s);
  }

  struct ScopeResult {
    std::vector<SpectralDatum> entries;
    std::string failure;
  };
  std::vector<ScopeResult> results(scopes.size());

  parallel_for(static_cast<int>(scopes.size()), workers, [&](int si) {
    const Scope& sc = scopes[si];
    ScopeResult& res = results[si];
    const int bands = sc.n_hi - sc.n_lo + 1;
    const int expected = bands * m;

    std::vector<cx> seeds;
    for (int n = sc.n_lo; n <= sc.n_hi; ++n)
      for (int q0 = 0; q0 < m; ++q0) seeds.push_back(seed_of(n, q0));

    DiskScan scan;
    int total = 0;
    double radius = sc.radius;
    for (int attempt = 0; attempt < 2; ++attempt) {
      scan = scan_disk(delta, sc.center, radius, seeds, tol);
      total = 0;
      for (const FoundZero& z : scan.zeros) total += z.mult;
      if (scan.counted && total == expected && scan.expected == expected) break;
      // widen and retry once, keeping contours disjoint from neighbors
      radius = std::min(radius * 1.3, std::max(sc.max_radius, radius));
    }
    if (!scan.counted || scan.zeros.empty() || total != expected || scan.expected != expected) {
      res.failure = "bands " + std::to_string(sc.n_lo) + ".." + std::to_string(sc.n_hi) + ": located " +
                    std::to_string(total) + " zeros (contour count " + std::to_string(scan.expected) +
                    "), expected " + std::to_string(expected);
      return;
    }

    // expand zeros into unit items and assign slots (n, q) by rho proximity
    std::vector<int> item_zero;
    for (size_t zi = 0; zi < scan.zeros.size(); ++zi)
      for (int c = 0; c < scan.zeros[zi].mult; ++c) item_zero.push_back(static_cast<int>(zi));

    std::vector<std::vector<double>> cost(expected, std::vector<double>(expected));
    for (int slot = 0; slot < expected; ++slot) {
      int n = sc.n_lo + slot / m;
      int q0 = slot % m;
      cx rho_seed = sqrt_branch(seed_of(n, q0));
      for (int it = 0; it < expected; ++it)
        cost[slot][it] = std::abs(sqrt_branch(scan.zeros[item_zero[it]].z) - rho_seed);
    }
    std::vector<int> assign = detail::min_cost_assignment(cost);

    res.entries.resize(expected);
    for (int slot = 0; slot < expected; ++slot) {
      const FoundZero& z = scan.zeros[item_zero[assign[slot]]];
      SpectralDatum d;
      d.n = sc.n_lo + slot / m;
      d.q = slot % m + 1;
      d.lambda = z.z;
      d.rho = sqrt_branch(z.z);
      d.multiplicity = z.mult;
      res.entries[slot] = d;
    }
    // band-0 labels: ascending |lambda|
    if (sc.n_lo == 0) {
      std::stable_sort(res.entries.begin(), res.entries.begin() + m,
                       [](const SpectralDatum& a, const SpectralDatum& b) {
                         return std::abs(a.lambda) < std::abs(b.lambda);
                       });
      for (int q0 = 0; q0 < m; ++q0) res.entries[q0].q = q0 + 1;
    }
  });

  for (const ScopeResult& res : results)
    if (!res.failure.empty()) raise(ErrorCode::CountMismatch, res.failure);

  SpectralData data;
  data.m = m;
  data.n_max = n_max;
  data.omega = om.diag;
  data.groups = SpectralData::group_channels(om.diag, tol.omega_group);
  for (const ScopeResult& res : results)
    for (const SpectralDatum& d : res.entries) data.entries.push_back(d);
  for (auto& e : data.entries) {
    e.alpha = Mat::Zero(m, m);
    e.alpha_primed = Mat::Zero(m, m);
  }
  data.rebuild_clusters(tol.cluster_rel, /*set_multiplicity_from_size=*/false);
  data.validate();
  return data;
}

void weight_matrices(const Integrator& integ, SpectralData& data, const Tolerances& tol,
                     int workers) {
  struct Cluster {
    cx lambda{};
    int mult = 1;
    std::vector<int> members;
  };
  std::vector<Cluster> clusters;
  {
    int max_id = -1;
    for (const auto& e : data.entries) max_id = std::max(max_id, e.cluster_id);
    clusters.resize(max_id + 1);
    for (size_t i = 0; i < data.entries.size(); ++i) {
      const auto& e = data.entries[i];
      Cluster& c = clusters[e.cluster_id];
      if (e.cluster_head) {
        c.lambda = e.lambda;
        c.mult = e.multiplicity;
      }
      c.members.push_back(static_cast<int>(i));
    }
  }

  std::vector<Mat> alphas(clusters.size());
  std::vector<std::string> failures(clusters.size());

  parallel_for(static_cast<int>(clusters.size()), workers, [&](int ci) {
    const Cluster& c = clusters[ci];
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < clusters.size(); ++j)
      if (static_cast<int>(j) != ci) dmin = std::min(dmin, std::abs(clusters[j].lambda - c.lambda));
    double r = std::isfinite(dmin) ? 0.5 * dmin : 1.0;
    if (r < 1e-6) {
      failures[ci] = "clusters collide near lambda = (" + std::to_string(c.lambda.real()) + "," +
                     std::to_string(c.lambda.imag()) + ")";
      return;
    }

    const int m = data.m;
    auto residue = [&](int K, const std::vector<Mat>& prev) {
      std::vector<Mat> vals(K);
      if (!prev.empty())
        for (size_t k = 0; k < prev.size(); ++k) vals[2 * k] = prev[k];
      for (int k = 0; k < K; ++k) {
        if (!prev.empty() && k % 2 == 0) continue;
        double th = 2.0 * kPi * k / K;
        vals[k] = integ.weyl(c.lambda + r * cx(std::cos(th), std::sin(th)));
      }
      return vals;
    };
    auto sum_residue = [&](const std::vector<Mat>& vals) {
      Mat acc = Mat::Zero(m, m);
      int K = static_cast<int>(vals.size());
      for (int k = 0; k < K; ++k) {
        double th = 2.0 * kPi * k / K;
        acc += vals[k] * cx(std::cos(th), std::sin(th));
      }
      return Mat((r / K) * acc);
    };

    int K = std::max(16, static_cast<int>(tol.contour_nodes));
    std::vector<Mat> vals = residue(K, {});
    Mat alpha = sum_residue(vals);
    bool converged = false;
    while (K <= 4096) {
      vals = residue(2 * K, vals);
      K *= 2;
      Mat next = sum_residue(vals);
      double diff = row_sum_norm(Mat(next - alpha));
      alpha = next;
      if (diff <= tol.residue_agree * (1.0 + row_sum_norm(alpha))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      failures[ci] = "residue contour did not converge at lambda = (" + std::to_string(c.lambda.real()) +
                     "," + std::to_string(c.lambda.imag()) + "); pole is not simple";
      return;
    }

    Eigen::JacobiSVD<Mat> svd(alpha);
    int rank = 0;
    double anorm = row_sum_norm(alpha);
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol.rank_rel * anorm) ++rank;
    if (rank != c.mult) {
      const auto& head = data.entries[c.members.front()];
      failures[ci] = "rank(alpha) = " + std::to_string(rank) + " but multiplicity = " +
                     std::to_string(c.mult) + " at (n=" + std::to_string(head.n) + ", q=" +
                     std::to_string(head.q) + ")";
      return;
    }
    alphas[ci] = alpha;
  });

  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    if (!failures[ci].empty()) {
      if (failures[ci].find("collide") != std::string::npos)
        raise(ErrorCode::ContourCollision, failures[ci]);
      raise(ErrorCode::AssumptionOneViolated, failures[ci]);
    }
    for (int idx : clusters[ci].members) {
      data.entries[idx].alpha = alphas[ci];
      data.entries[idx].alpha_primed =
          data.entries[idx].cluster_head ? alphas[ci] : Mat::Zero(data.m, data.m);
    }
  }
}

SpectralData forward_spectral_data(const BoundaryProblem& p, int n_max, const Tolerances& tol,
                                   int workers) {
  if (n_max < 0) raise(ErrorCode::InvalidArgument, "n_max must be >= 0");
  Tolerances tight = tol;
  tight.integrator_rel = tol.integrator_rel * 1e-2;
  Integrator integ(p, tight, Scheme::CV8);
  SpectralData data = locate_eigenvalues(integ, n_max, tol, workers);
  weight_matrices(integ, data, tol, workers);
  data.validate();
  return data;
}

}  // namespace matsl
