#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ghzqec {

struct DataPoint {
  double p = 0.0;      // physical error rate
  double d = 0.0;      // code distance (L in the model)
  double r = 0.0;      // logical success rate M/N
  double sigma = 0.0;  // sqrt(r(1-r)/N)
  long n = 0;

  static DataPoint from_counts(double p, int d, long successes, long shots);
};

// beta = (a, b, c, e, p_th, kappa, zeta)
using Beta = std::array<double, 7>;
enum BetaIndex { kA = 0, kB, kC, kE, kPth, kKappa, kZeta };

double model(const Beta& beta, double p, double L);
Eigen::MatrixXd jacobian(const Beta& beta, const std::vector<DataPoint>& pts);
double reduced_chi2(const std::vector<DataPoint>& pts, const Beta& beta);
double fit_sigma(const DataPoint& pt);  // sigma used as weight; floored when r is 0 or 1

struct FitResult {
  Beta beta{};
  Eigen::MatrixXd covariance;
  double chi2_nu = 0.0;
  double t_factor = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  int iterations = 0;
  std::vector<double> q_log;  // Q after each accepted step
  double p_th() const { return beta[kPth]; }
  double p_th_err() const { return std::sqrt(covariance(kPth, kPth)); }
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, const Beta& last) : std::runtime_error(what), last_iterate(last) {}
  Beta last_iterate;
};

// Two-sided 95% Student-t factor; 1.96 beyond nu = 200.
double student_t95(int nu);

// Crossing of the two largest-d curves, kappa = zeta = 1, a..e by linear least squares.
Beta initial_guess(const std::vector<DataPoint>& pts);

FitResult fit_threshold(const std::vector<DataPoint>& pts, std::optional<Beta> init = std::nullopt,
                        int max_iter = 200, double tol = 1e-9);

struct CutoffEval {
  double x = 0.0;
  std::optional<FitResult> fit;  // empty when rejected or the fit failed
  std::string note;
};

struct CutoffScan {
  std::vector<CutoffEval> evals;  // sorted by x
  std::optional<double> best_x;
  const CutoffEval* best() const;
};

// Refines around the best point, halving the bracket each step, until
// `budget` evaluations are spent.
CutoffScan optimize_cutoff(const std::function<CutoffEval(double)>& evaluate, double x_lo, double x_hi, int budget);

}  // namespace ghzqec
