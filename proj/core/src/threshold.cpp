#include "ghzqec/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

namespace ghzqec {

DataPoint DataPoint::from_counts(double p, int d, long successes, long shots) {
  if (shots <= 0 || successes < 0 || successes > shots) throw std::invalid_argument("bad counts");
  DataPoint pt;
  pt.p = p;
  pt.d = d;
  pt.n = shots;
  pt.r = double(successes) / shots;
  pt.sigma = std::sqrt(pt.r * (1 - pt.r) / shots);
  return pt;
}

double fit_sigma(const DataPoint& pt) {
  if (pt.sigma > 0) return pt.sigma;
  // r at 0 or 1: Laplace-smoothed rate
  if (pt.n > 0) {
    double rs = (pt.r * pt.n + 1) / (pt.n + 2.0);
    return std::sqrt(rs * (1 - rs) / pt.n);
  }
  throw std::invalid_argument("data point has zero sigma and no shot count");
}

double model(const Beta& b, double p, double L) {
  double u = p - b[kPth];
  double s = std::pow(L, 1.0 / b[kKappa]);
  return b[kA] + b[kB] * u * s + b[kC] * u * u * s * s + b[kE] * std::pow(L, -1.0 / b[kZeta]);
}

Eigen::MatrixXd jacobian(const Beta& b, const std::vector<DataPoint>& pts) {
  Eigen::MatrixXd J(pts.size(), 7);
  for (size_t i = 0; i < pts.size(); ++i) {
    const double L = pts[i].d, lnL = std::log(L);
    const double u = pts[i].p - b[kPth];
    const double s = std::pow(L, 1.0 / b[kKappa]);
    const double g = std::pow(L, -1.0 / b[kZeta]);
    const double k2 = b[kKappa] * b[kKappa];
    J(i, kA) = 1;
    J(i, kB) = u * s;
    J(i, kC) = u * u * s * s;
    J(i, kE) = g;
    J(i, kPth) = -b[kB] * s - 2 * b[kC] * u * s * s;
    J(i, kKappa) = -(b[kB] * u * s + 2 * b[kC] * u * u * s * s) * lnL / k2;
    J(i, kZeta) = b[kE] * g * lnL / (b[kZeta] * b[kZeta]);
  }
  return J;
}

namespace {

double q_stat(const std::vector<DataPoint>& pts, const Beta& b) {
  double q = 0;
  for (const auto& pt : pts) {
    double e = (pt.r - model(b, pt.p, pt.d)) / fit_sigma(pt);
    q += e * e;
  }
  return q;
}

}  // namespace

double reduced_chi2(const std::vector<DataPoint>& pts, const Beta& beta) {
  int nu = static_cast<int>(pts.size()) - 7;
  if (nu <= 0) throw std::invalid_argument("reduced chi2 needs more than 7 points");
  return q_stat(pts, beta) / nu;
}

double student_t95(int nu) {
  if (nu <= 0) throw std::invalid_argument("degrees of freedom must be positive");
  if (nu > 200) return 1.96;
  boost::math::students_t dist(nu);
  return boost::math::quantile(dist, 0.975);
}

Beta initial_guess(const std::vector<DataPoint>& pts) {
  std::set<double> ds;
  for (const auto& pt : pts) ds.insert(pt.d);
  if (ds.size() < 2) throw std::invalid_argument("need at least two distances");
  double L2 = *ds.rbegin(), L1 = *std::next(ds.rbegin());
  std::map<double, double> c1, c2;
  for (const auto& pt : pts) {
    if (pt.d == L1) c1[pt.p] = pt.r;
    if (pt.d == L2) c2[pt.p] = pt.r;
  }
  std::vector<std::pair<double, double>> diff;  // (p, r_L2 - r_L1)
  for (const auto& [p, r] : c2)
    if (c1.count(p)) diff.push_back({p, r - c1[p]});
  if (diff.empty()) throw std::invalid_argument("largest distances share no p values");
  double pth = diff.front().first;
  double best = std::abs(diff.front().second);
  bool crossed = false;
  for (size_t i = 1; i < diff.size() && !crossed; ++i) {
    auto [pa, fa] = diff[i - 1];
    auto [pb, fb] = diff[i];
    if ((fa > 0) != (fb > 0)) {
      pth = pa + (pb - pa) * fa / (fa - fb);
      crossed = true;
    }
  }
  if (!crossed)
    for (auto [p, f] : diff)
      if (std::abs(f) < best) best = std::abs(f), pth = p;

  Beta b{0, 0, 0, 0, pth, 1.0, 1.0};
  Eigen::MatrixXd A(pts.size(), 4);
  Eigen::VectorXd y(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    double w = 1.0 / fit_sigma(pts[i]);
    double u = pts[i].p - pth, L = pts[i].d;
    A(i, 0) = w;
    A(i, 1) = w * u * L;
    A(i, 2) = w * u * u * L * L;
    A(i, 3) = w / L;
    y(i) = w * pts[i].r;
  }
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
  for (int k = 0; k < 4; ++k) b[k] = x(k);
  return b;
}

FitResult fit_threshold(const std::vector<DataPoint>& pts, std::optional<Beta> init, int max_iter, double tol) {
  std::set<double> ds, ps;
  for (const auto& pt : pts) {
    ds.insert(pt.d);
    ps.insert(pt.p);
  }
  if (ds.size() < 3 || ps.size() < 4) throw std::invalid_argument("fit needs >= 3 distances and >= 4 error rates");
  const int n = static_cast<int>(pts.size()), nu = n - 7;
  if (nu <= 0) throw std::invalid_argument("fit needs more than 7 points");

  Beta beta = init ? *init : initial_guess(pts);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = 1.0 / fit_sigma(pts[i]);

  FitResult res;
  double q = q_stat(pts, beta);
  bool converged = false;
  auto normal = [&](const Beta& b, Eigen::MatrixXd& A, Eigen::VectorXd& g) {
    Eigen::MatrixXd Jw = w.asDiagonal() * jacobian(b, pts);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps(i) = w(i) * (pts[i].r - model(b, pts[i].p, pts[i].d));
    A = Jw.transpose() * Jw;
    g = Jw.transpose() * eps;
    // condition of the column-scaled system
    Eigen::VectorXd scale = A.diagonal().cwiseSqrt();
    for (int k = 0; k < 7; ++k)
      if (scale(k) == 0) scale(k) = 1;
    Eigen::MatrixXd As = scale.cwiseInverse().asDiagonal() * A * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As);
    double cond = svd.singularValues()(0) / svd.singularValues()(6);
    if (!std::isfinite(cond) || cond > 1e15) {
      std::ostringstream os;
      os << "singular normal matrix (scaled condition " << cond << ", singular values";
      for (int k = 0; k < 7; ++k) os << ' ' << svd.singularValues()(k);
      os << ")";
      throw FitError(os.str(), b);
    }
  };

  for (int it = 0; it < max_iter && !converged; ++it) {
    Eigen::MatrixXd A;
    Eigen::VectorXd g;
    normal(beta, A, g);
    Eigen::VectorXd step = A.ldlt().solve(g);
    double lambda = 1.0;
    bool accepted = false;
    Beta trial{};
    for (int h = 0; h < 40; ++h) {
      for (int k = 0; k < 7; ++k) trial[k] = beta[k] + lambda * step(k);
      double qt = trial[kKappa] > 0 && trial[kZeta] > 0 ? q_stat(pts, trial) : INFINITY;
      if (std::isfinite(qt) && qt <= q) {
        accepted = true;
        q = qt;
        break;
      }
      lambda *= 0.5;
    }
    double rel = 0;
    for (int k = 0; k < 7; ++k) rel = std::max(rel, std::abs(lambda * step(k)) / (std::abs(beta[k]) + 1e-12));
    res.iterations = it + 1;
    if (!accepted) {
      // at the floor of Q: a further step cannot lower it
      double full = 0;
      for (int k = 0; k < 7; ++k) full = std::max(full, std::abs(step(k)) / (std::abs(beta[k]) + 1e-12));
      if (full < 1e-6) {
        converged = true;
        break;
      }
      throw FitError("Gauss-Newton step could not reduce Q", beta);
    }
    beta = trial;
    res.q_log.push_back(q);
    if (rel < tol) converged = true;
  }
  if (!converged) throw FitError("Gauss-Newton did not converge in " + std::to_string(max_iter) + " iterations", beta);

  Eigen::MatrixXd A;
  Eigen::VectorXd g;
  normal(beta, A, g);
  res.beta = beta;
  res.covariance = A.inverse();
  res.covariance = 0.5 * (res.covariance + res.covariance.transpose()).eval();
  res.chi2_nu = q / nu;
  if (res.chi2_nu > 1) res.covariance *= res.chi2_nu;
  res.t_factor = student_t95(nu);
  double half = res.t_factor * std::sqrt(std::max(0.0, res.covariance(kPth, kPth)));
  res.ci_lo = beta[kPth] - half;
  res.ci_hi = beta[kPth] + half;
  return res;
}

const CutoffEval* CutoffScan::best() const {
  if (!best_x) return nullptr;
  for (const auto& e : evals)
    if (e.x == *best_x) return &e;
  return nullptr;
}

CutoffScan optimize_cutoff(const std::function<CutoffEval(double)>& evaluate, double x_lo, double x_hi, int budget) {
  if (!(x_lo > 0 && x_hi <= 1 && x_lo <= x_hi)) throw std::invalid_argument("cut-off range must lie in (0, 1]");
  if (budget < 3) throw std::invalid_argument("cut-off scan needs a budget of at least 3");
  CutoffScan scan;
  std::map<double, CutoffEval> done;
  auto run = [&](double x) {
    if (done.count(x)) return false;
    CutoffEval e = evaluate(x);
    e.x = x;
    done[x] = e;
    return true;
  };
  int used = 0;
  for (double x : {x_lo, x_hi, 0.5 * (x_lo + x_hi)}) used += run(x);
  bool toggle = false;
  while (used < budget) {
    auto best = done.end();
    for (auto it = done.begin(); it != done.end(); ++it)
      if (it->second.fit && (best == done.end() || it->second.fit->p_th() > best->second.fit->p_th())) best = it;
    double next;
    if (best == done.end()) {
      // nothing fitted yet: split the widest gap
      double gap = -1;
      next = x_lo;
      for (auto it = std::next(done.begin()); it != done.end(); ++it) {
        double g = it->first - std::prev(it)->first;
        if (g > gap) gap = g, next = 0.5 * (it->first + std::prev(it)->first);
      }
    } else {
      double left = best == done.begin() ? best->first : std::prev(best)->first;
      double right = std::next(best) == done.end() ? best->first : std::next(best)->first;
      double gl = best->first - left, gr = right - best->first;
      bool go_right = gr > gl || (gr == gl && toggle);
      toggle = !toggle;
      double gap = go_right ? gr : gl;
      if (gap < 1e-6) break;
      next = go_right ? 0.5 * (best->first + right) : 0.5 * (left + best->first);
    }
    if (!run(next)) break;
    ++used;
  }
  for (auto& [x, e] : done) scan.evals.push_back(e);
  for (const auto& e : scan.evals)
    if (e.fit && (!scan.best_x || e.fit->p_th() > scan.best()->fit->p_th())) scan.best_x = e.x;
  return scan;
}

}  // namespace ghzqec
