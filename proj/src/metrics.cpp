#include <kinopt/metrics.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kinopt {

namespace {

void CheckMesh(const Mesh &mesh) {
  if (mesh.vertices.empty())
    throw std::invalid_argument("mesh has no vertices");
}

template <typename Metric>
double AverageOverMeshes(const std::vector<Mesh> &meshes, const Pose &relative,
                         Metric metric) {
  if (meshes.empty()) throw std::invalid_argument("body has no meshes");
  double sum = 0.0;
  for (const Mesh &mesh : meshes) sum += metric(mesh, relative);
  return sum / static_cast<double>(meshes.size());
}

}  // namespace

Mesh LoadObjVertices(const std::string &path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open mesh file '" + path + "'");
  Mesh mesh;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    if (line.size() < 2 || line[0] != 'v' || (line[1] != ' ' && line[1] != '\t'))
      continue;
    std::istringstream fields(line.substr(2));
    Eigen::Vector3d vertex;
    if (!(fields >> vertex.x() >> vertex.y() >> vertex.z()))
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": malformed vertex line");
    mesh.vertices.push_back(vertex);
  }
  if (mesh.vertices.empty())
    throw std::runtime_error("mesh file '" + path + "' has no vertices");
  return mesh;
}

Pose RelativeModelPose(const Pose &estimate, const Pose &ground_truth) {
  return estimate.Inverse() * ground_truth;
}

double AddError(const Mesh &mesh, const Pose &relative) {
  CheckMesh(mesh);
  double sum = 0.0;
  for (const Eigen::Vector3d &vertex : mesh.vertices)
    sum += (vertex - relative * vertex).norm();
  return sum / static_cast<double>(mesh.vertices.size());
}

double AddSError(const Mesh &mesh, const Pose &relative) {
  CheckMesh(mesh);
  std::vector<Eigen::Vector3d> moved;
  moved.reserve(mesh.vertices.size());
  for (const Eigen::Vector3d &vertex : mesh.vertices)
    moved.push_back(relative * vertex);
  double sum = 0.0;
  for (const Eigen::Vector3d &vertex : mesh.vertices) {
    double closest = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector3d &other : moved)
      closest = std::min(closest, (vertex - other).norm());
    sum += closest;
  }
  return sum / static_cast<double>(mesh.vertices.size());
}

double AddError(const std::vector<Mesh> &meshes, const Pose &relative) {
  return AverageOverMeshes(meshes, relative, [](const Mesh &m, const Pose &p) {
    return AddError(m, p);
  });
}

double AddSError(const std::vector<Mesh> &meshes, const Pose &relative) {
  return AverageOverMeshes(meshes, relative, [](const Mesh &m, const Pose &p) {
    return AddSError(m, p);
  });
}

double AucScore(const Eigen::MatrixXd &errors, double error_threshold) {
  if (!(error_threshold > 0.0))
    throw std::invalid_argument("error threshold must be positive");
  if (errors.size() == 0) throw std::invalid_argument("no errors to score");
  const Eigen::ArrayXXd scores =
      (1.0 - errors.array() / error_threshold).max(0.0);
  return scores.sum() / static_cast<double>(errors.size());
}

}  // namespace kinopt
