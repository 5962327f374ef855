#include "eyetrack/matrix.hpp"

#include "eyetrack/errors.hpp"

namespace eyetrack {

Mat target_matrix(const Dataset& d) {
  if (!d.has_targets) throw IntegrityError("target_matrix requires a dataset with targets");
  Mat out(d.token_count(), kNumFeatures);
  Eigen::Index i = 0;
  for (const auto& s : d.sentences) {
    for (const auto& t : s.tokens) {
      for (std::size_t f = 0; f < kNumFeatures; ++f) out(i, f) = (*t.targets)[f];
      ++i;
    }
  }
  return out;
}

std::vector<GazeTargets> to_gaze_rows(const Mat& m) {
  if (m.cols() != static_cast<Eigen::Index>(kNumFeatures)) {
    throw IntegrityError("expected a 5-column matrix");
  }
  std::vector<GazeTargets> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) out[i][f] = m(i, f);
  }
  return out;
}

}  // namespace eyetrack
