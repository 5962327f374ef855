#include "eyetrack/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "eyetrack/errors.hpp"

namespace eyetrack {

void Standardizer::fit(const Mat& X) {
  if (X.rows() == 0) throw IntegrityError("standardizer fit on empty matrix");
  mean = X.colwise().mean();
  Mat centered = X.rowwise() - mean;
  scale = (centered.array().square().colwise().sum() / X.rows()).sqrt();
  for (Eigen::Index c = 0; c < scale.size(); ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;  // constant column
  }
}

Mat Standardizer::transform(const Mat& X) const {
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

double svr_gamma_heuristic(const Mat& X_std) {
  const double n = static_cast<double>(X_std.size());
  const double mean = X_std.sum() / n;
  const double var = (X_std.array() - mean).square().sum() / n;
  if (var <= 0.0) return 1.0 / static_cast<double>(X_std.cols());
  return 1.0 / (static_cast<double>(X_std.cols()) * var);
}

namespace {

// LRU cache of base kernel columns, float like the usual SMO solvers.
class KernelCache {
 public:
  KernelCache(const Mat& X, double gamma, double cache_mb)
      : X_(X), gamma_(gamma) {
    const double bytes_per_col = static_cast<double>(X.rows()) * sizeof(float);
    max_cols_ = std::max<std::size_t>(2, static_cast<std::size_t>(cache_mb * 1024.0 * 1024.0 /
                                                                  bytes_per_col));
  }

  const Eigen::VectorXf& column(long i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      entries_.splice(entries_.begin(), entries_, it->second);
      return it->second->second;
    }
    if (entries_.size() >= max_cols_) {
      index_.erase(entries_.back().first);
      entries_.pop_back();
    }
    Eigen::VectorXd sq = (X_.rowwise() - X_.row(i)).rowwise().squaredNorm();
    entries_.emplace_front(i, (-gamma_ * sq.array()).exp().cast<float>());
    index_[i] = entries_.begin();
    return entries_.front().second;
  }

 private:
  const Mat& X_;
  double gamma_;
  std::size_t max_cols_;
  std::list<std::pair<long, Eigen::VectorXf>> entries_;
  std::unordered_map<long, std::list<std::pair<long, Eigen::VectorXf>>::iterator> index_;
};

constexpr double kTau = 1e-12;

}  // namespace

SmoResult solve_epsilon_svr(const Mat& X_std, const Vec& y, double C, double epsilon,
                            double gamma, double tol, long max_iter, double cache_mb) {
  const long l = X_std.rows();
  if (l == 0) throw IntegrityError("SVR training on empty data");
  if (C <= 0.0 || epsilon < 0.0 || gamma <= 0.0) {
    throw ConfigError("SVR requires C > 0, epsilon >= 0, gamma > 0");
  }

  // Variables s in [0, 2l): s < l is the alpha side (sign +1), s >= l the
  // alpha* side (sign -1). Q[s][t] = sign_s * sign_t * K(s % l, t % l).
  KernelCache cache(X_std, gamma, cache_mb);
  std::vector<double> a(2 * l, 0.0);
  std::vector<double> G(2 * l);
  for (long i = 0; i < l; ++i) {
    G[i] = epsilon - y(i);
    G[i + l] = epsilon + y(i);
  }
  auto sign_of = [l](long s) { return s < l ? 1.0 : -1.0; };

  long iter = 0;
  bool optimal = false;
  long wi = -1, wj = -1;
  while (iter < max_iter) {
    // Working set: maximal violating pair with a second-order pick for j.
    double gmax = -std::numeric_limits<double>::infinity();
    wi = -1;
    for (long s = 0; s < 2 * l; ++s) {
      if (s < l) {  // sign +1: can increase while below C
        if (a[s] < C && -G[s] >= gmax) {
          gmax = -G[s];
          wi = s;
        }
      } else {  // sign -1: can "increase" along -y while above 0
        if (a[s] > 0.0 && G[s] >= gmax) {
          gmax = G[s];
          wi = s;
        }
      }
    }
    if (wi < 0) {
      optimal = true;
      break;
    }
    const long pi = wi % l;
    const double si = sign_of(wi);
    const Eigen::VectorXf& Ki = cache.column(pi);

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    wj = -1;
    for (long s = 0; s < 2 * l; ++s) {
      const double Kis = static_cast<double>(Ki(s % l));
      // Quad term along the feasible direction is K_ii + K_ss - 2 K_is,
      // and K(x,x) = 1 for the RBF kernel.
      double quad = 2.0 - 2.0 * Kis;
      if (quad <= 0.0) quad = kTau;
      if (s < l) {
        if (a[s] > 0.0) {
          const double grad_diff = gmax + G[s];
          if (G[s] >= gmax2) gmax2 = G[s];
          if (grad_diff > 0.0) {
            const double obj = -(grad_diff * grad_diff) / quad;
            if (obj <= best_obj) {
              best_obj = obj;
              wj = s;
            }
          }
        }
      } else {
        if (a[s] < C) {
          const double grad_diff = gmax - G[s];
          if (-G[s] >= gmax2) gmax2 = -G[s];
          if (grad_diff > 0.0) {
            const double obj = -(grad_diff * grad_diff) / quad;
            if (obj <= best_obj) {
              best_obj = obj;
              wj = s;
            }
          }
        }
      }
    }
    if (gmax + gmax2 < tol || wj < 0) {
      optimal = true;
      break;
    }

    ++iter;
    const long pj = wj % l;
    const double sj = sign_of(wj);
    const Eigen::VectorXf& Kj = cache.column(pj);
    const double Kij = static_cast<double>(Ki(pj));

    const double old_ai = a[wi];
    const double old_aj = a[wj];
    double quad = 2.0 - 2.0 * Kij;
    if (quad <= 0.0) quad = kTau;
    if (si != sj) {
      const double delta = (-G[wi] - G[wj]) / quad;
      const double diff = a[wi] - a[wj];
      a[wi] += delta;
      a[wj] += delta;
      if (diff > 0.0) {
        if (a[wj] < 0.0) {
          a[wj] = 0.0;
          a[wi] = diff;
        }
      } else {
        if (a[wi] < 0.0) {
          a[wi] = 0.0;
          a[wj] = -diff;
        }
      }
      if (diff > 0.0) {
        if (a[wi] > C) {
          a[wi] = C;
          a[wj] = C - diff;
        }
      } else {
        if (a[wj] > C) {
          a[wj] = C;
          a[wi] = C + diff;
        }
      }
    } else {
      const double delta = (G[wi] - G[wj]) / quad;
      const double sum = a[wi] + a[wj];
      a[wi] -= delta;
      a[wj] += delta;
      if (sum > C) {
        if (a[wi] > C) {
          a[wi] = C;
          a[wj] = sum - C;
        }
      } else {
        if (a[wj] < 0.0) {
          a[wj] = 0.0;
          a[wi] = sum;
        }
      }
      if (sum > C) {
        if (a[wj] > C) {
          a[wj] = C;
          a[wi] = sum - C;
        }
      } else {
        if (a[wi] < 0.0) {
          a[wi] = 0.0;
          a[wj] = sum;
        }
      }
    }

    const double dai = si * (a[wi] - old_ai);
    const double daj = sj * (a[wj] - old_aj);
    for (long t = 0; t < l; ++t) {
      const double v = dai * static_cast<double>(Ki(t)) + daj * static_cast<double>(Kj(t));
      G[t] += v;
      G[t + l] -= v;
    }
  }

  // Objective value 0.5 * a'Qa + p'a = 0.5 * sum a_s (G_s + p_s).
  double objective = 0.0;
  for (long i = 0; i < l; ++i) {
    objective += a[i] * (G[i] + epsilon - y(i));
    objective += a[i + l] * (G[i + l] + epsilon + y(i));
  }
  objective *= 0.5;

  if (!optimal) {
    throw TrainingError("SVR did not converge within " + std::to_string(max_iter) +
                            " iterations (partial objective " + std::to_string(objective) +
                            ")",
                        objective);
  }

  // Bias from the KKT conditions on free variables, midpoint fallback.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  long n_free = 0;
  for (long s = 0; s < 2 * l; ++s) {
    const double sg = sign_of(s);
    const double yg = sg * G[s];
    if (a[s] >= C) {
      if (sg < 0.0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (a[s] <= 0.0) {
      if (sg > 0.0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : (upper + lower) / 2.0;

  SmoResult result;
  result.beta = Vec(l);
  for (long i = 0; i < l; ++i) result.beta(i) = a[i] - a[i + l];
  result.bias = -rho;
  result.objective = objective;
  result.iterations = iter;
  return result;
}

SvrModel fit_svr(const Mat& X, const Mat& Y, SvrHyperParams hp) {
  if (X.rows() != Y.rows()) throw IntegrityError("fit_svr: X/Y row mismatch");
  if (X.rows() == 0) throw IntegrityError("fit_svr on empty data");

  SvrModel model;
  model.params = hp;
  model.scaler.fit(X);
  const Mat Xs = model.scaler.transform(X);
  const double gamma = hp.gamma > 0.0 ? hp.gamma : svr_gamma_heuristic(Xs);

  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    const SmoResult sol = solve_epsilon_svr(Xs, Y.col(f), hp.C, hp.epsilon, gamma, hp.tol,
                                            hp.max_iter, hp.cache_mb);
    SvrFeatureModel& fm = model.per_feature[f];
    fm.gamma = gamma;
    fm.intercept = sol.bias;
    std::vector<long> sv;
    for (long i = 0; i < sol.beta.size(); ++i) {
      if (sol.beta(i) != 0.0) sv.push_back(i);
    }
    fm.support_vectors = Mat(sv.size(), Xs.cols());
    fm.dual_coefs = Vec(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) {
      fm.support_vectors.row(k) = Xs.row(sv[k]);
      fm.dual_coefs(k) = sol.beta(sv[k]);
    }
  }
  return model;
}

Vec predict_svr_feature(const SvrFeatureModel& m, const Mat& X_std) {
  Vec out(X_std.rows());
  if (m.support_vectors.rows() == 0) {
    out.setConstant(m.intercept);
    return out;
  }
  constexpr Eigen::Index kChunk = 512;  // bound the kernel block size
  for (Eigen::Index start = 0; start < X_std.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, X_std.rows() - start);
    Mat sq(n, m.support_vectors.rows());
    for (Eigen::Index r = 0; r < n; ++r) {
      sq.row(r) =
          (m.support_vectors.rowwise() - X_std.row(start + r)).rowwise().squaredNorm();
    }
    out.segment(start, n) =
        ((-m.gamma * sq.array()).exp().matrix() * m.dual_coefs).array() + m.intercept;
  }
  return out;
}

Mat predict_svr(const SvrModel& m, const Mat& X) {
  const Mat Xs = m.scaler.transform(X);
  Mat out(X.rows(), kNumFeatures);
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    out.col(f) = predict_svr_feature(m.per_feature[f], Xs);
  }
  return out;
}

}  // namespace eyetrack
