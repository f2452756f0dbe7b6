#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cogspeech/audio.hpp"
#include "cogspeech/named_vector.hpp"

namespace cogspeech {

struct MrcgOptions {
  int n_channels = 64;
  double frame1_s = 0.020;   // high-resolution frame
  double frame2_s = 0.200;   // low-resolution frame, sampled on the same grid
  double hop_s = 0.010;
  int smooth1 = 11;          // square mean-filter sizes over the CG1 plane
  int smooth2 = 23;
};

// Frame-level feature stack: 4 cochleagram resolutions x channels, plus
// first and second regression deltas. 768 rows under the defaults.
struct FrameFeatureMatrix {
  Eigen::MatrixXd values;              // rows x frames
  std::vector<std::string> row_names;  // stable across segments
};

// Square mean filter with zero padding and a fixed k*k denominator.
Eigen::MatrixXd mean_smooth(const Eigen::MatrixXd &m, int k);

// Regression delta over +/-2 frames with edge replication.
Eigen::MatrixXd regression_delta(const Eigen::MatrixXd &m);

FrameFeatureMatrix mrcg_frames(const AudioSignal &signal,
                               const MrcgOptions &options = {});

// The nine per-row statistics, in fixed order.
const std::vector<std::string> &functional_names();

// Applies the nine functionals to every row; names are <row>_<functional>.
// 6,912 entries under the default feature stack.
NamedVector functionals(const FrameFeatureMatrix &frames);

// Frame-feature extraction followed by functionals.
NamedVector mrcg_segment_features(const AudioSignal &signal,
                                  const MrcgOptions &options = {});

}  // namespace cogspeech
