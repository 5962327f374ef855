#pragma once

#include <Eigen/Dense>

#include "eyetrack/corpus.hpp"

namespace eyetrack {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// token_count x 5 matrix of gold targets, token order.
Mat target_matrix(const Dataset& d);

// Rows of an n x 5 matrix as GazeTargets.
std::vector<GazeTargets> to_gaze_rows(const Mat& m);

}  // namespace eyetrack
