#include "eyetrack/baselines.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "eyetrack/errors.hpp"

namespace eyetrack {

using nlohmann::json;

FeatureMatrix featurize(const Dataset& d, const FrequencyTable& table) {
  const std::size_t n = d.token_count();
  if (n == 0) throw IntegrityError("featurize over an empty dataset");
  FeatureMatrix X(n, kNumSurfaceFeatures);
  Eigen::Index i = 0;
  for (const auto& s : d.sentences) {
    for (const auto& t : s.tokens) {
      const SurfaceFeatures f = extract_surface(t.word, table);
      X(i, 0) = static_cast<double>(f.length);
      X(i, 1) = f.log_freq;
      X(i, 2) = f.has_upper ? 1.0 : 0.0;
      X(i, 3) = f.has_punct ? 1.0 : 0.0;
      ++i;
    }
  }
  return X;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw IntegrityError("median of zero values");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

MedianModel fit_median(const Dataset& train) {
  const Mat Y = target_matrix(train);
  MedianModel m;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    std::vector<double> col(Y.rows());
    for (Eigen::Index i = 0; i < Y.rows(); ++i) col[i] = Y(i, f);
    m.medians[f] = lower_median(std::move(col));
  }
  return m;
}

std::vector<GazeTargets> predict_median(const MedianModel& m, std::size_t n_tokens) {
  GazeTargets g;
  for (std::size_t f = 0; f < kNumFeatures; ++f) g[f] = m.medians[f];
  return std::vector<GazeTargets>(n_tokens, g);
}

LinearModel fit_linear(const FeatureMatrix& X, const Mat& Y) {
  if (X.rows() != Y.rows()) throw IntegrityError("fit_linear: X/Y row mismatch");
  if (X.rows() == 0) throw IntegrityError("fit_linear on empty data");

  Mat design(X.rows(), X.cols() + 1);
  design << X, Mat::Ones(X.rows(), 1);

  LinearModel m;
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  Mat coef;
  if (qr.rank() < design.cols()) {
    // Rank-deficient design: tiny ridge keeps the solve determinate.
    std::cerr << "warning: rank-deficient design (rank " << qr.rank() << " of "
              << design.cols() << "), using ridge fallback lambda=1e-8\n";
    m.used_ridge_fallback = true;
    const Mat gram =
        design.transpose() * design + 1e-8 * Mat::Identity(design.cols(), design.cols());
    coef = gram.ldlt().solve(design.transpose() * Y);
  } else {
    coef = qr.solve(Y);
  }
  m.weights = coef.topRows(X.cols());
  m.intercept = coef.row(X.cols());
  if (!m.weights.allFinite() || !m.intercept.allFinite()) {
    throw TrainingError("linear regression produced non-finite parameters");
  }
  return m;
}

Mat predict_linear(const LinearModel& m, const FeatureMatrix& X) {
  return (X * m.weights).rowwise() + m.intercept;
}

std::vector<GazeTargets> predict_baseline(const BaselineModel& model, const FeatureMatrix& X) {
  if (std::holds_alternative<MedianModel>(model)) {
    return predict_median(std::get<MedianModel>(model), X.rows());
  }
  if (std::holds_alternative<LinearModel>(model)) {
    return to_gaze_rows(predict_linear(std::get<LinearModel>(model), X));
  }
  return to_gaze_rows(predict_svr(std::get<SvrModel>(model), X));
}

namespace {

constexpr int kModelVersion = 1;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

}  // namespace

void save_baseline_model(const BaselineModel& model, const std::filesystem::path& path) {
  json j;
  j["format"] = "eyetrack-baseline";
  j["version"] = kModelVersion;
  if (const auto* median = std::get_if<MedianModel>(&model)) {
    j["kind"] = "median";
    j["medians"] = median->medians;
  } else if (const auto* linear = std::get_if<LinearModel>(&model)) {
    j["kind"] = "linear";
    j["weights"] = matrix_to_json(linear->weights);
    json icpt = json::array();
    for (Eigen::Index c = 0; c < linear->intercept.size(); ++c) icpt.push_back(linear->intercept(c));
    j["intercept"] = std::move(icpt);
    j["used_ridge_fallback"] = linear->used_ridge_fallback;
  } else {
    const auto& svr = std::get<SvrModel>(model);
    j["kind"] = "svr";
    j["C"] = svr.params.C;
    j["epsilon"] = svr.params.epsilon;
    json mean = json::array(), scale = json::array();
    for (Eigen::Index c = 0; c < svr.scaler.mean.size(); ++c) {
      mean.push_back(svr.scaler.mean(c));
      scale.push_back(svr.scaler.scale(c));
    }
    j["scaler"] = {{"mean", std::move(mean)}, {"scale", std::move(scale)}};
    json feats = json::array();
    for (const auto& fm : svr.per_feature) {
      json coefs = json::array();
      for (Eigen::Index i = 0; i < fm.dual_coefs.size(); ++i) coefs.push_back(fm.dual_coefs(i));
      feats.push_back({{"support_vectors", matrix_to_json(fm.support_vectors)},
                       {"dual_coefs", std::move(coefs)},
                       {"intercept", fm.intercept},
                       {"gamma", fm.gamma}});
    }
    j["per_feature"] = std::move(feats);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write model file: " + path.string());
  f << j.dump(2) << "\n";
}

BaselineModel load_baseline_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open model file: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid model file " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "eyetrack-baseline") {
    throw SchemaError("not a baseline model file: " + path.string());
  }
  const std::string kind = j.value("kind", "");
  if (kind == "median") {
    MedianModel m;
    const auto& arr = j.at("medians");
    for (std::size_t f5 = 0; f5 < kNumFeatures; ++f5) m.medians[f5] = arr.at(f5).get<double>();
    return m;
  }
  if (kind == "linear") {
    LinearModel m;
    m.weights = matrix_from_json(j.at("weights"));
    const auto& icpt = j.at("intercept");
    m.intercept = Eigen::RowVectorXd(icpt.size());
    for (std::size_t c = 0; c < icpt.size(); ++c) m.intercept(c) = icpt.at(c).get<double>();
    m.used_ridge_fallback = j.value("used_ridge_fallback", false);
    return m;
  }
  if (kind == "svr") {
    SvrModel m;
    m.params.C = j.value("C", 1.0);
    m.params.epsilon = j.value("epsilon", 0.1);
    const auto& mean = j.at("scaler").at("mean");
    const auto& scale = j.at("scaler").at("scale");
    m.scaler.mean = Eigen::RowVectorXd(mean.size());
    m.scaler.scale = Eigen::RowVectorXd(scale.size());
    for (std::size_t c = 0; c < mean.size(); ++c) {
      m.scaler.mean(c) = mean.at(c).get<double>();
      m.scaler.scale(c) = scale.at(c).get<double>();
    }
    const auto& feats = j.at("per_feature");
    for (std::size_t f5 = 0; f5 < kNumFeatures; ++f5) {
      auto& fm = m.per_feature[f5];
      fm.support_vectors = matrix_from_json(feats.at(f5).at("support_vectors"));
      const auto& coefs = feats.at(f5).at("dual_coefs");
      fm.dual_coefs = Vec(coefs.size());
      for (std::size_t i = 0; i < coefs.size(); ++i) fm.dual_coefs(i) = coefs.at(i).get<double>();
      fm.intercept = feats.at(f5).at("intercept").get<double>();
      fm.gamma = feats.at(f5).at("gamma").get<double>();
    }
    return m;
  }
  throw SchemaError("unknown baseline model kind '" + kind + "' in " + path.string());
}

}  // namespace eyetrack
