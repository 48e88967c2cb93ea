#ifndef KINOPT_SE3_H_
#define KINOPT_SE3_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace kinopt {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Layout of a 6-DoF variation vector: rotation vector first, translation
// second. Every 6x6 block in the library follows this ordering.
inline constexpr int kRotOffset = 0;
inline constexpr int kTransOffset = 3;

// Below this angle the trigonometric ratios switch to Taylor series.
inline constexpr double kSmallAngle = 1e-4;

Eigen::Matrix3d Skew(const Eigen::Vector3d &v);

// Rotation matrix of a rotation vector (Rodrigues formula).
Eigen::Matrix3d ExpRotVec(const Eigen::Vector3d &rotvec);

// Principal rotation vector with angle in [0, pi]. At exactly pi the axis
// sign is ambiguous; the representative whose first nonzero component is
// positive is returned.
Eigen::Vector3d LogRotation(const Eigen::Matrix3d &rotation);

// Maps any rotation vector onto the principal branch (angle <= pi).
Eigen::Vector3d CanonicalRotVec(const Eigen::Vector3d &rotvec);

// log(exp([theta]x) * exp([r]x)) via the half-angle composition formula.
Eigen::Vector3d ComposeRotVecs(const Eigen::Vector3d &theta,
                               const Eigen::Vector3d &r);

bool IsRotation(const Eigen::Matrix3d &m, double tolerance = 1e-9);

/// Rigid transform _A T_B: maps coordinates in frame B to frame A.
class Pose {
 public:
  Pose() = default;
  Pose(const Eigen::Matrix3d &rotation, const Eigen::Vector3d &translation)
      : rotation_{rotation}, translation_{translation} {}

  static Pose Identity() { return Pose{}; }
  static Pose FromRotVec(const Eigen::Vector3d &rotvec,
                         const Eigen::Vector3d &translation);
  static Pose FromMatrix(const Eigen::Matrix4d &matrix);

  /// T(theta): exp of the rotational part, translation added as is.
  static Pose FromVariation(const Vector6d &theta);

  const Eigen::Matrix3d &rotation() const { return rotation_; }
  const Eigen::Vector3d &translation() const { return translation_; }
  Eigen::Vector3d rotvec() const { return LogRotation(rotation_); }

  Pose Inverse() const;
  Pose operator*(const Pose &other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d &point) const;
  Eigen::Matrix4d Matrix() const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

// Pose after a variation in its own (model) frame: pose * T(theta). Energies
// and constraints share this convention.
Pose PoseUnderVariation(const Pose &pose, const Vector6d &theta);

// Variation that takes `before` to `after` under PoseUnderVariation, i.e.
// [log(R_b^T R_a) | R_b^T (t_a - t_b)].
Vector6d VariationBetween(const Pose &before, const Pose &after);

// Ad(_A T_B) = [[R, 0], [[t]x R, R]] projecting variations from B to A.
Matrix6d Adjoint(const Pose &pose);

/// First-order change of a rotation vector r under a subsequent
/// infinitesimal rotation theta: d log(exp([theta]x) exp([r]x)) / d theta.
///
///   C = (a/2) cot(a/2) I - (a/2) [e]x + (1 - (a/2) cot(a/2)) e e^T
///
/// r is an eigenvector of C and C^T, C is normal, and R = C^T C^-1.
class VariationMatrix {
 public:
  explicit VariationMatrix(const Eigen::Vector3d &rotvec);

  const Eigen::Matrix3d &matrix() const { return c_; }
  const Eigen::Vector3d &source_rotvec() const { return source_rotvec_; }

 private:
  Eigen::Matrix3d c_;
  Eigen::Vector3d source_rotvec_;
};

}  // namespace kinopt

#endif  // KINOPT_SE3_H_
