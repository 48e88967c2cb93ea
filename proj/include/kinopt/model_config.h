#ifndef KINOPT_MODEL_CONFIG_H_
#define KINOPT_MODEL_CONFIG_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <kinopt/kinematics.h>
#include <kinopt/metrics.h>
#include <kinopt/solver.h>

namespace kinopt {

/// Parse or validation failure. The message starts with the file name and
/// either a line number or the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic pose measurement of one body: a quadratic pose target placed at
// the ground truth perturbed by Gaussian noise (radians, meters).
struct Measurement {
  double weight_r = 1e4;
  double weight_t = 1e5;
  double noise_r = 0.0;
  double noise_t = 0.0;
};

// Scripted joint coordinate: offset + amplitude * sin(2 pi step / period),
// added to the initial joint configuration.
struct Drive {
  int body = 0;
  int coordinate = 0;
  double offset = 0.0;
  double amplitude = 0.0;
  double period = 1.0;

  double ValueAt(int step) const;
};

struct ModelConfig {
  KinematicStructure structure;  // tree plus closure constraints
  std::vector<std::vector<Mesh>> meshes;  // per body
  std::vector<Measurement> measurements;  // per body
  std::vector<Drive> drives;
  int iterations = 1;
  Regularization regularization;
  double error_threshold = 0.0;
};

// Relative mesh paths are resolved against the directory of the file.
ModelConfig LoadModelConfig(const std::string &path);
ModelConfig ParseModelConfig(const std::string &text,
                             const std::string &base_dir,
                             const std::string &source_name = "<config>");

}  // namespace kinopt

#endif  // KINOPT_MODEL_CONFIG_H_
