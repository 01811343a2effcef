#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ghzqec/threshold.hpp"

namespace ghzqec::testing {

// Synthetic finite-size-scaling family: r in (0.3, 0.9) on the grid below.
inline const Beta kSyntheticTruth{0.75, -30.0, -2500.0, -0.5, 0.0025, 1.2, 1.0};

inline std::vector<double> synthetic_p() {
  std::vector<double> p;
  for (int i = 0; i < 8; ++i) p.push_back(0.0015 + i * 0.002 / 7);
  return p;
}

inline std::vector<int> synthetic_d() { return {4, 6, 8, 10}; }

inline std::vector<DataPoint> exact_points(const Beta& b, long shots) {
  std::vector<DataPoint> pts;
  for (int d : synthetic_d())
    for (double p : synthetic_p()) {
      DataPoint pt;
      pt.p = p;
      pt.d = d;
      pt.r = model(b, p, d);
      pt.n = shots;
      pt.sigma = std::sqrt(pt.r * (1 - pt.r) / shots);
      pts.push_back(pt);
    }
  return pts;
}

inline std::vector<DataPoint> noisy_points(const Beta& b, long shots, std::mt19937_64& rng) {
  std::vector<DataPoint> pts;
  for (int d : synthetic_d())
    for (double p : synthetic_p()) {
      std::binomial_distribution<long> bin(shots, model(b, p, d));
      pts.push_back(DataPoint::from_counts(p, d, bin(rng), shots));
    }
  return pts;
}

// Worst relative gap between the analytic Jacobian and central differences.
inline double jacobian_fd_gap(const Beta& b, const std::vector<DataPoint>& pts, double rel_step = 1e-6) {
  Eigen::MatrixXd J = jacobian(b, pts);
  double worst = 0;
  for (int k = 0; k < 7; ++k) {
    double h = rel_step * std::max(std::abs(b[k]), 1e-3);
    Beta up = b, dn = b;
    up[k] += h;
    dn[k] -= h;
    for (size_t i = 0; i < pts.size(); ++i) {
      double fd = (model(up, pts[i].p, pts[i].d) - model(dn, pts[i].p, pts[i].d)) / (2 * h);
      worst = std::max(worst, std::abs(fd - J(i, k)) / std::max(std::abs(J(i, k)), 1e-8));
    }
  }
  return worst;
}

struct Coverage {
  int covered = 0, failed = 0;
};

inline Coverage ci_coverage(int replicates, long shots, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Coverage c;
  for (int rep = 0; rep < replicates; ++rep) {
    auto pts = noisy_points(kSyntheticTruth, shots, rng);
    try {
      FitResult f = fit_threshold(pts);
      c.covered += f.ci_lo <= kSyntheticTruth[kPth] && kSyntheticTruth[kPth] <= f.ci_hi;
    } catch (const FitError&) {
      ++c.failed;
    }
  }
  return c;
}

}  // namespace ghzqec::testing
