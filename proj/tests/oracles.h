// Reference computations for the tests, built on Eigen's geometry module and
// plain 4x4 matrices instead of the library's own SE(3) code.
#ifndef KINOPT_TESTS_ORACLES_H_
#define KINOPT_TESTS_ORACLES_H_

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <kinopt/kinematics.h>
#include <kinopt/metrics.h>
#include <kinopt/se3.h>

namespace oracle {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFdStep = 1e-6;

inline double MaxAbs(const Eigen::MatrixXd &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix3d Rotation(const Vector3d &rotvec) {
  const double angle = rotvec.norm();
  if (angle == 0.0) return Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, rotvec / angle).toRotationMatrix();
}

// Angle in [0, pi] times the axis, via Eigen's quaternion conversion.
inline Vector3d RotVec(const Matrix3d &rotation) {
  Eigen::Quaterniond q(rotation);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double s = q.vec().norm();
  if (s == 0.0) return Vector3d::Zero();
  return 2.0 * std::atan2(s, q.w()) * q.vec() / s;
}

inline Vector3d QuaternionCompose(const Vector3d &first, const Vector3d &second) {
  const Eigen::Quaterniond a(Rotation(first));
  const Eigen::Quaterniond b(Rotation(second));
  return RotVec((a * b).normalized().toRotationMatrix());
}

inline Matrix4d Homogeneous(const Vector3d &rotvec, const Vector3d &trans) {
  Matrix4d m = Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = Rotation(rotvec);
  m.topRightCorner<3, 1>() = trans;
  return m;
}

inline Matrix4d Homogeneous(const kinopt::Pose &pose) {
  Matrix4d m = Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = pose.rotation();
  m.topRightCorner<3, 1>() = pose.translation();
  return m;
}

inline Vector3d RandomUnit(std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Vector3d v;
  do {
    v = {normal(rng), normal(rng), normal(rng)};
  } while (v.norm() < 1e-9);
  return v.normalized();
}

inline double Uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector3d RandomRotVec(std::mt19937_64 &rng, double min_angle,
                             double max_angle) {
  return RandomUnit(rng) * Uniform(rng, min_angle, max_angle);
}

inline kinopt::Pose RandomPose(std::mt19937_64 &rng, double max_angle = kPi,
                               double max_trans = 1.0) {
  return kinopt::Pose::FromRotVec(RandomRotVec(rng, 0.0, max_angle),
                                  RandomUnit(rng) * Uniform(rng, 0, max_trans));
}

// Central-difference Jacobian of f at x.
inline Eigen::MatrixXd NumericJacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd &)> &f,
    const Eigen::VectorXd &x, double step = kFdStep) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jacobian(f0.size(), x.size());
  for (int k = 0; k < x.size(); ++k) {
    Eigen::VectorXd plus = x, minus = x;
    plus(k) += step;
    minus(k) -= step;
    jacobian.col(k) = (f(plus) - f(minus)) / (2.0 * step);
  }
  return jacobian;
}

// Pose change of every body, measured in the body frame by the log of the
// relative transform, after applying theta_k to a copy of the structure.
inline std::vector<Eigen::VectorXd> BodyVariations(
    const kinopt::KinematicStructure &structure, const Eigen::VectorXd &theta_k) {
  kinopt::KinematicStructure moved = structure;
  moved.UpdatePoses(theta_k);
  std::vector<Eigen::VectorXd> variations;
  for (int i = 0; i < structure.n_bodies(); ++i) {
    const Matrix4d relative = Homogeneous(structure.body(i).pose).inverse() *
                              Homogeneous(moved.body(i).pose);
    Eigen::VectorXd v(6);
    v << RotVec(relative.topLeftCorner<3, 3>()), relative.topRightCorner<3, 1>();
    variations.push_back(v);
  }
  return variations;
}

// Random tree of n bodies with random joint masks and geometry. Bodies are
// attached to a random earlier body.
inline kinopt::KinematicStructure RandomTree(int n, std::mt19937_64 &rng) {
  kinopt::KinematicStructure tree;
  kinopt::Joint root;
  root.joint_to_model = RandomPose(rng, 1.0, 0.3);
  tree.AddBody("body0", RandomPose(rng), std::nullopt, root);
  for (int i = 1; i < n; ++i) {
    kinopt::Joint joint;
    do {
      for (bool &axis : joint.free_axes)
        axis = std::bernoulli_distribution(0.4)(rng);
    } while (kinopt::CountAxes(joint.free_axes) == 0);
    joint.parent_to_joint = RandomPose(rng, kPi, 0.5);
    joint.joint_to_model = RandomPose(rng, kPi, 0.5);
    if (std::bernoulli_distribution(0.5)(rng))
      joint.fixed_side = kinopt::FixedSide::kParentToJoint;
    const int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    tree.AddChild("body" + std::to_string(i), parent, joint);
  }
  return tree;
}

inline kinopt::AxisMask RandomMask(std::mt19937_64 &rng) {
  kinopt::AxisMask mask;
  do {
    for (bool &axis : mask) axis = std::bernoulli_distribution(0.5)(rng);
  } while (kinopt::CountAxes(mask) == 0);
  return mask;
}

// Random tree plus a closure constraint between two random bodies whose
// relative pose differs from the constraint frames by up to 3 rad and 1 m.
inline kinopt::KinematicStructure RandomClosedStructure(std::mt19937_64 &rng,
                                                        int n_bodies) {
  kinopt::KinematicStructure structure = RandomTree(n_bodies, rng);
  const int a = std::uniform_int_distribution<int>(0, n_bodies - 1)(rng);
  int b = a;
  while (b == a) b = std::uniform_int_distribution<int>(0, n_bodies - 1)(rng);
  const kinopt::Pose frame_a = RandomPose(rng);
  const kinopt::Pose violation = kinopt::Pose::FromRotVec(
      RandomRotVec(rng, 0, 3.0), RandomUnit(rng) * Uniform(rng, 0, 1));
  // _B T_Mb chosen so that _A T_B equals the violation.
  const kinopt::Pose frame_b =
      ((frame_a * structure.body(a).pose.Inverse() * structure.body(b).pose)
           .Inverse() *
       violation)
          .Inverse();
  structure.AddConstraint({a, b, frame_a, frame_b, RandomMask(rng)});
  structure.AddOrthogonalityConstraint({a, b, frame_a, frame_b});
  structure.ComputeBodyJacobians();
  return structure;
}

// Brute force with homogeneous coordinates.
inline double AddOracle(const kinopt::Mesh &mesh, const kinopt::Pose &relative) {
  const Eigen::Matrix4d t = Homogeneous(relative);
  double sum = 0.0;
  for (const auto &x : mesh.vertices)
    sum += (x.homogeneous() - t * x.homogeneous()).norm();
  return sum / mesh.vertices.size();
}

inline double AddSOracle(const kinopt::Mesh &mesh, const kinopt::Pose &relative) {
  const Eigen::Matrix4d t = Homogeneous(relative);
  double sum = 0.0;
  for (const auto &x : mesh.vertices) {
    double best = 1e300;
    for (const auto &y : mesh.vertices)
      best = std::min(best, (x.homogeneous() - t * y.homogeneous()).norm());
    sum += best;
  }
  return sum / mesh.vertices.size();
}

}  // namespace oracle

#endif  // KINOPT_TESTS_ORACLES_H_
