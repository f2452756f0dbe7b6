#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cogspeech {

// A feature vector with stable per-entry names.
struct NamedVector {
  std::vector<std::string> names;
  Eigen::VectorXd values;

  double at(const std::string &name) const;  // throws if absent
};

}  // namespace cogspeech
