#pragma once

#include <array>

#include "eyetrack/matrix.hpp"

namespace eyetrack {

struct SvrHyperParams {
  double C = 1.0;
  double epsilon = 0.1;  // tube half-width
  // gamma <= 0 selects the scale heuristic 1 / (n_dims * flat variance of
  // the standardized design), which lands near 1/4 here.
  double gamma = 0.0;
  double tol = 1e-3;
  long max_iter = 20'000'000;
  double cache_mb = 512.0;
};

// Per-dimension standardizer fit on training inputs only.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  // population std, constant columns fall back to 1

  void fit(const Mat& X);
  Mat transform(const Mat& X) const;
};

// One epsilon-SVR with RBF kernel: f(x) = sum_i coef_i * K(x, sv_i) + b.
struct SvrFeatureModel {
  Mat support_vectors;  // standardized rows
  Vec dual_coefs;       // alpha - alpha*
  double intercept = 0.0;
  double gamma = 0.0;
};

struct SvrModel {
  Standardizer scaler;
  SvrHyperParams params;
  std::array<SvrFeatureModel, kNumFeatures> per_feature;
};

SvrModel fit_svr(const Mat& X, const Mat& Y, SvrHyperParams hp = {});
Mat predict_svr(const SvrModel& m, const Mat& X);
Vec predict_svr_feature(const SvrFeatureModel& m, const Mat& X_std);

// SMO solver over the 2l-variable dual; exposed for the oracle tests.
struct SmoResult {
  Vec beta;  // alpha - alpha*, one per training row
  double bias = 0.0;
  double objective = 0.0;
  long iterations = 0;
};

SmoResult solve_epsilon_svr(const Mat& X_std, const Vec& y, double C, double epsilon,
                            double gamma, double tol, long max_iter, double cache_mb);

double svr_gamma_heuristic(const Mat& X_std);

}  // namespace eyetrack
