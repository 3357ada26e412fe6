#include "core/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace jeanie {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gamma(double gamma) {
  require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::InvalidArgument, "gamma must be positive");
}

void check_tensor(const DistanceTensor& d4) {
  require(d4.K >= 1 && d4.Kp >= 1 && d4.tau >= 1 && d4.taup >= 1, ErrorCode::EmptyInput,
          "distance tensor has an empty axis");
  require(d4.values.size() == static_cast<std::size_t>(d4.K) * d4.Kp * d4.tau * d4.taup,
          ErrorCode::DimensionMismatch, "distance tensor storage does not match its shape");
  for (double v : d4.values)
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
            "distance tensor entries must be finite and nonnegative");
}

// Temporal predecessor offsets in canonical order; the same order is used by
// soft_dtw and jeanie so the degenerate-grid reduction is bitwise.
constexpr int kSteps[3][2] = {{0, 1}, {1, 0}, {1, 1}};

struct SoftminAcc {
  double m = kInf;
  // collect, then finish() applies the max-shift formula
  std::vector<double> vals;
  void add(double v) {
    vals.push_back(v);
    if (v < m) m = v;
  }
  double finish(double gamma) const {
    if (vals.empty() || !std::isfinite(m)) return kInf;
    double sum = 0.0;
    for (double v : vals) sum += std::exp(-(v - m) / gamma);
    return m - gamma * std::log(sum);
  }
};

}  // namespace

double softmin(std::span<const double> values, double gamma) {
  check_gamma(gamma);
  require(!values.empty(), ErrorCode::EmptyInput, "softmin over an empty list");
  double m = kInf;
  for (double v : values) {
    require(!(v < kInf && !std::isfinite(v)) && !std::isnan(v), ErrorCode::InvalidArgument,
            "softmin inputs must be finite or +inf");
    m = std::min(m, v);
  }
  if (!std::isfinite(m)) return kInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(-(v - m) / gamma);
  return m - gamma * std::log(sum);
}

double base_distance(std::span<const double> x, std::span<const double> y,
                     BaseDistanceKind kind, double sigma) {
  require(x.size() == y.size(), ErrorCode::DimensionMismatch,
          "base distance requires equal dimensions");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  if (kind == BaseDistanceKind::Euclidean) return std::sqrt(sq);
  require(sigma > 0.0, ErrorCode::InvalidArgument, "rbf sigma must be positive");
  const double k = std::exp(-sq / (2.0 * sigma * sigma));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * k));
}

DistanceTensor distance_tensor(const FeatureMap& query, const FeatureMap& support,
                               const AlignmentParams& params) {
  require(query.dim == support.dim, ErrorCode::DimensionMismatch,
          "query/support feature dimensions differ");
  require(support.K == 1 && support.Kp == 1, ErrorCode::InvalidArgument,
          "support map must be single-view here");
  DistanceTensor d4;
  d4.K = query.K;
  d4.Kp = query.Kp;
  d4.tau = query.tau;
  d4.taup = support.tau;
  d4.values.resize(static_cast<std::size_t>(d4.K) * d4.Kp * d4.tau * d4.taup);
  const std::size_t dim = static_cast<std::size_t>(query.dim);
  for (int k = 0; k < d4.K; ++k)
    for (int kp = 0; kp < d4.Kp; ++kp)
      for (int t = 0; t < d4.tau; ++t)
        for (int tp = 0; tp < d4.taup; ++tp)
          d4.at(k, kp, t, tp) = base_distance({query.slice(k, kp, t), dim},
                                              {support.slice(0, 0, tp), dim},
                                              params.base, params.sigma);
  return d4;
}

AlignmentResult soft_dtw(const std::vector<double>& d2, int tau, int taup, double gamma,
                         bool want_grad, bool want_path) {
  check_gamma(gamma);
  require(tau >= 1 && taup >= 1, ErrorCode::EmptyInput, "empty cost matrix");
  require(d2.size() == static_cast<std::size_t>(tau) * taup, ErrorCode::DimensionMismatch,
          "cost matrix storage does not match its shape");
  for (double v : d2)
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
            "cost matrix entries must be finite and nonnegative");

  auto idx = [taup](int t, int tp) { return static_cast<std::size_t>(t) * taup + tp; };
  std::vector<double> r(d2.size(), kInf);

  for (int t = 0; t < tau; ++t)
    for (int tp = 0; tp < taup; ++tp) {
      if (t == 0 && tp == 0) {
        r[idx(0, 0)] = d2[idx(0, 0)];
        continue;
      }
      SoftminAcc acc;
      for (const auto& s : kSteps) {
        const int pt = t - s[0], ptp = tp - s[1];
        if (pt < 0 || ptp < 0) continue;
        acc.add(r[idx(pt, ptp)]);
      }
      r[idx(t, tp)] = d2[idx(t, tp)] + acc.finish(gamma);
    }

  AlignmentResult res;
  res.distance = r[idx(tau - 1, taup - 1)];

  if (want_grad) {
    std::vector<double> adj(d2.size(), 0.0);
    adj[idx(tau - 1, taup - 1)] = 1.0;
    for (int t = tau - 1; t >= 0; --t)
      for (int tp = taup - 1; tp >= 0; --tp) {
        const double a = adj[idx(t, tp)];
        if (a == 0.0 || (t == 0 && tp == 0)) continue;
        SoftminAcc acc;
        for (const auto& s : kSteps) {
          const int pt = t - s[0], ptp = tp - s[1];
          if (pt < 0 || ptp < 0) continue;
          acc.add(r[idx(pt, ptp)]);
        }
        double sum = 0.0;
        for (double v : acc.vals) sum += std::exp(-(v - acc.m) / gamma);
        std::size_t slot = 0;
        for (const auto& s : kSteps) {
          const int pt = t - s[0], ptp = tp - s[1];
          if (pt < 0 || ptp < 0) continue;
          adj[idx(pt, ptp)] += a * std::exp(-(acc.vals[slot] - acc.m) / gamma) / sum;
          ++slot;
        }
      }
    res.gradient = std::move(adj);
  }

  if (want_path) {
    std::vector<PathStep> rev;
    int t = tau - 1, tp = taup - 1;
    rev.push_back({0, 0, t, tp});
    while (t != 0 || tp != 0) {
      double best = kInf;
      int best_rank = 3, bt = t, btp = tp;
      // ties prefer the diagonal step, then enumeration order
      const int rank[3] = {1, 2, 0};
      for (int s = 0; s < 3; ++s) {
        const int pt = t - kSteps[s][0], ptp = tp - kSteps[s][1];
        if (pt < 0 || ptp < 0) continue;
        const double v = r[idx(pt, ptp)];
        if (v < best || (v == best && rank[s] < best_rank)) {
          best = v;
          best_rank = rank[s];
          bt = pt;
          btp = ptp;
        }
      }
      t = bt;
      tp = btp;
      rev.push_back({0, 0, t, tp});
    }
    std::reverse(rev.begin(), rev.end());
    res.path = std::move(rev);
  }
  return res;
}

namespace {

// Iterates the admissible predecessors of (k,kp,t,tp) in canonical order:
// temporal steps (0,1),(1,0),(1,1), view shifts ascending per axis, clamped
// to the grid so a degenerate grid does exactly soft-DTW's work.
template <typename Fn>
void for_each_pred(const DistanceTensor& d4, int iota, int k, int kp, int t, int tp, Fn&& fn) {
  const int ilo = std::max(-iota, k - d4.K + 1), ihi = std::min(iota, k);
  const int plo = std::max(-iota, kp - d4.Kp + 1), phi = std::min(iota, kp);
  for (int s = 0; s < 3; ++s) {
    const int pt = t - kSteps[s][0], ptp = tp - kSteps[s][1];
    if (pt < 0 || ptp < 0) continue;
    for (int i = ilo; i <= ihi; ++i)
      for (int ip = plo; ip <= phi; ++ip) fn(k - i, kp - ip, pt, ptp, s, i, ip);
  }
}

}  // namespace

AlignmentResult jeanie(const DistanceTensor& d4, const AlignmentParams& params,
                       bool want_grad, bool want_path) {
  check_gamma(params.gamma);
  require(params.iota >= 0, ErrorCode::InvalidArgument, "iota must be nonnegative");
  check_tensor(d4);

  const double gamma = params.gamma;
  const int iota = params.iota;
  std::vector<double> r(d4.values.size(), kInf);

  for (int t = 0; t < d4.tau; ++t)
    for (int tp = 0; tp < d4.taup; ++tp)
      for (int k = 0; k < d4.K; ++k)
        for (int kp = 0; kp < d4.Kp; ++kp) {
          const std::size_t c = d4.index(k, kp, t, tp);
          if (t == 0 && tp == 0) {
            r[c] = d4.values[c];
            continue;
          }
          SoftminAcc acc;
          for_each_pred(d4, iota, k, kp, t, tp,
                        [&](int pk, int pkp, int pt, int ptp, int, int, int) {
                          acc.add(r[d4.index(pk, pkp, pt, ptp)]);
                        });
          r[c] = d4.values[c] + acc.finish(gamma);
        }

  SoftminAcc ends;
  for (int k = 0; k < d4.K; ++k)
    for (int kp = 0; kp < d4.Kp; ++kp) ends.add(r[d4.index(k, kp, d4.tau - 1, d4.taup - 1)]);

  AlignmentResult res;
  res.distance = ends.finish(gamma);

  if (want_grad) {
    std::vector<double> adj(r.size(), 0.0);
    {
      double sum = 0.0;
      for (double v : ends.vals) sum += std::exp(-(v - ends.m) / gamma);
      std::size_t slot = 0;
      for (int k = 0; k < d4.K; ++k)
        for (int kp = 0; kp < d4.Kp; ++kp) {
          adj[d4.index(k, kp, d4.tau - 1, d4.taup - 1)] =
              std::exp(-(ends.vals[slot] - ends.m) / gamma) / sum;
          ++slot;
        }
    }
    for (int t = d4.tau - 1; t >= 0; --t)
      for (int tp = d4.taup - 1; tp >= 0; --tp)
        for (int k = 0; k < d4.K; ++k)
          for (int kp = 0; kp < d4.Kp; ++kp) {
            const std::size_t c = d4.index(k, kp, t, tp);
            const double a = adj[c];
            if (a == 0.0 || (t == 0 && tp == 0) || !std::isfinite(r[c])) continue;
            SoftminAcc acc;
            for_each_pred(d4, iota, k, kp, t, tp,
                          [&](int pk, int pkp, int pt, int ptp, int, int, int) {
                            acc.add(r[d4.index(pk, pkp, pt, ptp)]);
                          });
            double sum = 0.0;
            for (double v : acc.vals) sum += std::exp(-(v - acc.m) / gamma);
            std::size_t slot = 0;
            for_each_pred(d4, iota, k, kp, t, tp,
                          [&](int pk, int pkp, int pt, int ptp, int, int, int) {
                            adj[d4.index(pk, pkp, pt, ptp)] +=
                                a * std::exp(-(acc.vals[slot] - acc.m) / gamma) / sum;
                            ++slot;
                          });
          }
    res.gradient = std::move(adj);
  }

  if (want_path) {
    int k = 0, kp = 0;
    double best = kInf;
    for (int ck = 0; ck < d4.K; ++ck)
      for (int ckp = 0; ckp < d4.Kp; ++ckp) {
        const double v = r[d4.index(ck, ckp, d4.tau - 1, d4.taup - 1)];
        if (v < best) {
          best = v;
          k = ck;
          kp = ckp;
        }
      }
    int t = d4.tau - 1, tp = d4.taup - 1;
    std::vector<PathStep> rev;
    rev.push_back({k, kp, t, tp});
    while (t != 0 || tp != 0) {
      // ties prefer the diagonal temporal step, then the smaller view shift,
      // then enumeration order
      double bv = kInf;
      long brank = std::numeric_limits<long>::max();
      int bk = k, bkp = kp, bt = t, btp = tp;
      long pos = 0;
      for_each_pred(d4, iota, k, kp, t, tp,
                    [&](int pk, int pkp, int pt, int ptp, int s, int i, int ip) {
                      const double v = r[d4.index(pk, pkp, pt, ptp)];
                      const long shift = std::abs(i) + std::abs(ip);
                      const long rank = ((s == 2 ? 0L : 1L) << 40) | (shift << 32) | pos;
                      if (v < bv || (v == bv && rank < brank)) {
                        bv = v;
                        brank = rank;
                        bk = pk;
                        bkp = pkp;
                        bt = pt;
                        btp = ptp;
                      }
                      ++pos;
                    });
      k = bk;
      kp = bkp;
      t = bt;
      tp = btp;
      rev.push_back({k, kp, t, tp});
    }
    std::reverse(rev.begin(), rev.end());
    res.path = std::move(rev);
  }
  return res;
}

AlignmentResult fvm(const DistanceTensor& d4, const AlignmentParams& params,
                    bool want_grad, bool want_path) {
  check_gamma(params.gamma);
  check_tensor(d4);
  const int views = d4.K * d4.Kp;
  std::vector<double> collapsed(static_cast<std::size_t>(d4.tau) * d4.taup);
  std::vector<double> view_vals(views);
  for (int t = 0; t < d4.tau; ++t)
    for (int tp = 0; tp < d4.taup; ++tp) {
      std::size_t slot = 0;
      for (int k = 0; k < d4.K; ++k)
        for (int kp = 0; kp < d4.Kp; ++kp) view_vals[slot++] = d4.at(k, kp, t, tp);
      collapsed[static_cast<std::size_t>(t) * d4.taup + tp] = softmin(view_vals, params.gamma);
    }

  AlignmentResult dtw = soft_dtw(collapsed, d4.tau, d4.taup, params.gamma, want_grad, want_path);
  AlignmentResult res;
  res.distance = dtw.distance;

  if (want_grad) {
    std::vector<double> grad(d4.values.size(), 0.0);
    for (int t = 0; t < d4.tau; ++t)
      for (int tp = 0; tp < d4.taup; ++tp) {
        const double g = (*dtw.gradient)[static_cast<std::size_t>(t) * d4.taup + tp];
        if (g == 0.0) continue;
        double m = kInf;
        for (int k = 0; k < d4.K; ++k)
          for (int kp = 0; kp < d4.Kp; ++kp) m = std::min(m, d4.at(k, kp, t, tp));
        double sum = 0.0;
        for (int k = 0; k < d4.K; ++k)
          for (int kp = 0; kp < d4.Kp; ++kp)
            sum += std::exp(-(d4.at(k, kp, t, tp) - m) / params.gamma);
        for (int k = 0; k < d4.K; ++k)
          for (int kp = 0; kp < d4.Kp; ++kp)
            grad[d4.index(k, kp, t, tp)] =
                g * std::exp(-(d4.at(k, kp, t, tp) - m) / params.gamma) / sum;
      }
    res.gradient = std::move(grad);
  }

  if (want_path) {
    std::vector<PathStep> path;
    for (const PathStep& s : *dtw.path) {
      int bk = 0, bkp = 0;
      double best = kInf;
      for (int k = 0; k < d4.K; ++k)
        for (int kp = 0; kp < d4.Kp; ++kp)
          if (d4.at(k, kp, s.t, s.tp) < best) {
            best = d4.at(k, kp, s.t, s.tp);
            bk = k;
            bkp = kp;
          }
      path.push_back({bk, bkp, s.t, s.tp});
    }
    res.path = std::move(path);
  }
  return res;
}

AlignmentResult fvm_expanded(const FeatureMap& query, const FeatureMap& support,
                             const AlignmentParams& params) {
  check_gamma(params.gamma);
  require(query.dim == support.dim, ErrorCode::DimensionMismatch,
          "query/support feature dimensions differ");
  const std::size_t dim = static_cast<std::size_t>(query.dim);
  std::vector<double> collapsed(static_cast<std::size_t>(query.tau) * support.tau);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(query.K) * query.Kp * support.K * support.Kp);
  for (int t = 0; t < query.tau; ++t)
    for (int tp = 0; tp < support.tau; ++tp) {
      vals.clear();
      for (int k = 0; k < query.K; ++k)
        for (int kp = 0; kp < query.Kp; ++kp)
          for (int m = 0; m < support.K; ++m)
            for (int mp = 0; mp < support.Kp; ++mp)
              vals.push_back(base_distance({query.slice(k, kp, t), dim},
                                           {support.slice(m, mp, tp), dim},
                                           params.base, params.sigma));
      collapsed[static_cast<std::size_t>(t) * support.tau + tp] = softmin(vals, params.gamma);
    }
  return soft_dtw(collapsed, query.tau, support.tau, params.gamma, false, false);
}

double brute_force_jeanie(const DistanceTensor& d4, const AlignmentParams& params,
                          std::size_t max_paths) {
  check_gamma(params.gamma);
  require(params.iota >= 0, ErrorCode::InvalidArgument, "iota must be nonnegative");
  check_tensor(d4);

  const double gamma = params.gamma;
  const int iota = params.iota;

  // streaming log-sum-exp over path costs
  double m = -kInf;
  double s = 0.0;
  std::size_t count = 0;

  auto account = [&](double cost) {
    if (++count > max_paths) raise(ErrorCode::TooLarge, "path enumeration limit exceeded");
    const double e = -cost / gamma;
    if (e <= m) {
      s += std::exp(e - m);
    } else {
      s = s * std::exp(m - e) + 1.0;
      m = e;
    }
  };

  // depth-first over successor states, independent of the DP above
  auto walk = [&](auto&& self, int k, int kp, int t, int tp, double cost) -> void {
    cost += d4.at(k, kp, t, tp);
    if (t == d4.tau - 1 && tp == d4.taup - 1) {
      account(cost);
      return;
    }
    for (const auto& step : kSteps) {
      const int nt = t + step[0], ntp = tp + step[1];
      if (nt >= d4.tau || ntp >= d4.taup) continue;
      for (int dk = -iota; dk <= iota; ++dk) {
        const int nk = k + dk;
        if (nk < 0 || nk >= d4.K) continue;
        for (int dkp = -iota; dkp <= iota; ++dkp) {
          const int nkp = kp + dkp;
          if (nkp < 0 || nkp >= d4.Kp) continue;
          self(self, nk, nkp, nt, ntp, cost);
        }
      }
    }
  };

  for (int k = 0; k < d4.K; ++k)
    for (int kp = 0; kp < d4.Kp; ++kp) walk(walk, k, kp, 0, 0, 0.0);

  return -gamma * (m + std::log(s));
}

}  // namespace jeanie
