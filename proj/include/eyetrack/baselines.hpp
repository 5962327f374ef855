#pragma once

#include <array>
#include <filesystem>
#include <variant>

#include "eyetrack/features.hpp"
#include "eyetrack/matrix.hpp"
#include "eyetrack/svr.hpp"

namespace eyetrack {

// Design matrix over tokens, columns (length, log_freq, has_upper, has_punct).
using FeatureMatrix = Mat;
inline constexpr int kNumSurfaceFeatures = 4;

FeatureMatrix featurize(const Dataset& d, const FrequencyTable& table);

// Constant predictor; lower median per feature (sorted element (n-1)/2).
struct MedianModel {
  std::array<double, kNumFeatures> medians{};
};

double lower_median(std::vector<double> values);
MedianModel fit_median(const Dataset& train);
std::vector<GazeTargets> predict_median(const MedianModel& m, std::size_t n_tokens);

// Ordinary least squares per output feature over raw surface features.
struct LinearModel {
  Mat weights;                   // 4 x 5
  Eigen::RowVectorXd intercept;  // 1 x 5
  bool used_ridge_fallback = false;
};

LinearModel fit_linear(const FeatureMatrix& X, const Mat& Y);
Mat predict_linear(const LinearModel& m, const FeatureMatrix& X);

using BaselineModel = std::variant<MedianModel, LinearModel, SvrModel>;

std::vector<GazeTargets> predict_baseline(const BaselineModel& model, const FeatureMatrix& X);

// JSON model files with a version field.
void save_baseline_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_baseline_model(const std::filesystem::path& path);

}  // namespace eyetrack
