#ifndef KINOPT_METRICS_H_
#define KINOPT_METRICS_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include <kinopt/se3.h>

namespace kinopt {

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
};

// Reads the "v x y z" lines of an ASCII OBJ file; everything else is
// ignored. Throws std::runtime_error if the file cannot be read or has no
// vertices.
Mesh LoadObjVertices(const std::string &path);

// _M T_MGT from the estimated and ground-truth model poses.
Pose RelativeModelPose(const Pose &estimate, const Pose &ground_truth);

// Mean distance between each vertex and its transformed copy.
double AddError(const Mesh &mesh, const Pose &relative);
// Mean distance between each vertex and the closest transformed vertex.
// Brute force, O(n_v^2).
double AddSError(const Mesh &mesh, const Pose &relative);

// Bodies with several meshes average the per-mesh errors.
double AddError(const std::vector<Mesh> &meshes, const Pose &relative);
double AddSError(const std::vector<Mesh> &meshes, const Pose &relative);

// Mean of max(1 - e / e_t, 0) over an n_bodies x n_frames error matrix.
double AucScore(const Eigen::MatrixXd &errors, double error_threshold);

}  // namespace kinopt

#endif  // KINOPT_METRICS_H_
