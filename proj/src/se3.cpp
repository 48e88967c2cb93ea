#include <kinopt/se3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kinopt {

namespace {

constexpr double kPi = std::numbers::pi;

// Beyond this angle the axis is taken from the symmetric part of R.
constexpr double kNearPi = kPi - 1e-2;

// sin(a) of an exact half turn is numerical noise below this level.
constexpr double kHalfTurnSin = 1e-12;

Eigen::Vector3d Vee(const Eigen::Matrix3d &m) {
  return Eigen::Vector3d{m(2, 1) - m(1, 2), m(0, 2) - m(2, 0),
                         m(1, 0) - m(0, 1)};
}

// Half-turn branch rule: first nonzero component positive.
Eigen::Vector3d ApplyHalfTurnBranch(const Eigen::Vector3d &rotvec) {
  for (int i = 0; i < 3; ++i) {
    if (rotvec(i) > 0.0) return rotvec;
    if (rotvec(i) < 0.0) return -rotvec;
  }
  return rotvec;
}

// sin(|v|/2) / |v|, continuous at zero.
double HalfSinc(double angle) {
  if (angle < kSmallAngle) return 0.5 - angle * angle / 48.0;
  return std::sin(0.5 * angle) / angle;
}

}  // namespace

Eigen::Matrix3d Skew(const Eigen::Vector3d &v) {
  Eigen::Matrix3d m;
  m << 0.0, -v(2), v(1), v(2), 0.0, -v(0), -v(1), v(0), 0.0;
  return m;
}

Eigen::Matrix3d ExpRotVec(const Eigen::Vector3d &rotvec) {
  const double angle = rotvec.norm();
  const Eigen::Matrix3d k = Skew(rotvec);
  if (angle < kSmallAngle) {
    const double a2 = angle * angle;
    return Eigen::Matrix3d::Identity() + (1.0 - a2 / 6.0) * k +
           (0.5 - a2 / 24.0) * k * k;
  }
  const Eigen::Matrix3d e = k / angle;
  const double s = std::sin(0.5 * angle);
  return Eigen::Matrix3d::Identity() + std::sin(angle) * e +
         2.0 * s * s * e * e;
}

Eigen::Vector3d LogRotation(const Eigen::Matrix3d &rotation) {
  const Eigen::Vector3d w = 0.5 * Vee(rotation);
  const double sin_a = w.norm();
  const double cos_a =
      std::clamp(0.5 * (rotation.trace() - 1.0), -1.0, 1.0);
  const double angle = std::atan2(sin_a, cos_a);

  if (angle < kSmallAngle) return (1.0 + angle * angle / 6.0) * w;
  if (angle < kNearPi) return (angle / sin_a) * w;

  // e e^T = (sym(R) - cos(a) I) / (1 - cos(a)); use the largest diagonal
  // entry as pivot for the remaining components.
  const Eigen::Matrix3d sym = 0.5 * (rotation + rotation.transpose());
  const double one_minus_cos = 1.0 - cos_a;
  int pivot = 0;
  sym.diagonal().maxCoeff(&pivot);
  Eigen::Vector3d axis;
  axis(pivot) =
      std::sqrt(std::max(0.0, (sym(pivot, pivot) - cos_a) / one_minus_cos));
  for (int j = 0; j < 3; ++j) {
    if (j != pivot) axis(j) = sym(pivot, j) / (one_minus_cos * axis(pivot));
  }
  axis.normalize();
  if (sin_a < kHalfTurnSin) return ApplyHalfTurnBranch(angle * axis);
  if (axis.dot(w) < 0.0) axis = -axis;
  return angle * axis;
}

Eigen::Vector3d CanonicalRotVec(const Eigen::Vector3d &rotvec) {
  const double angle = rotvec.norm();
  if (angle < kPi) return rotvec;
  if (angle == kPi) return ApplyHalfTurnBranch(rotvec);
  const double wrapped = std::remainder(angle, 2.0 * kPi);
  const Eigen::Vector3d result = (wrapped / angle) * rotvec;
  if (std::abs(std::abs(wrapped) - kPi) == 0.0)
    return ApplyHalfTurnBranch(result);
  return result;
}

Eigen::Vector3d ComposeRotVecs(const Eigen::Vector3d &theta,
                               const Eigen::Vector3d &r) {
  const double theta_angle = theta.norm();
  const double r_angle = r.norm();
  const double cos_theta = std::cos(0.5 * theta_angle);
  const double cos_r = std::cos(0.5 * r_angle);
  const Eigen::Vector3d sin_theta_v = HalfSinc(theta_angle) * theta;
  const Eigen::Vector3d sin_r_e = HalfSinc(r_angle) * r;

  // x = cos(gamma/2), y = sin(gamma/2) n
  double x = cos_theta * cos_r - sin_theta_v.dot(sin_r_e);
  Eigen::Vector3d y =
      cos_theta * sin_r_e + cos_r * sin_theta_v + sin_theta_v.cross(sin_r_e);
  if (x == 0.0) return LogRotation(ExpRotVec(theta) * ExpRotVec(r));
  if (x < 0.0) {
    x = -x;
    y = -y;
  }
  const double y_norm = y.norm();
  const double gamma = 2.0 * std::atan2(y_norm, x);
  if (gamma < kSmallAngle) return (2.0 / x) * y;
  return (gamma / y_norm) * y;
}

bool IsRotation(const Eigen::Matrix3d &m, double tolerance) {
  return (m.transpose() * m - Eigen::Matrix3d::Identity()).norm() <=
             tolerance &&
         std::abs(m.determinant() - 1.0) <= tolerance;
}

Pose Pose::FromRotVec(const Eigen::Vector3d &rotvec,
                      const Eigen::Vector3d &translation) {
  return Pose{ExpRotVec(rotvec), translation};
}

Pose Pose::FromMatrix(const Eigen::Matrix4d &matrix) {
  return Pose{matrix.topLeftCorner<3, 3>(), matrix.topRightCorner<3, 1>()};
}

Pose Pose::FromVariation(const Vector6d &theta) {
  return Pose{ExpRotVec(theta.segment<3>(kRotOffset)),
              theta.segment<3>(kTransOffset)};
}

Pose Pose::Inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return Pose{rt, -rt * translation_};
}

Pose Pose::operator*(const Pose &other) const {
  return Pose{rotation_ * other.rotation_,
              rotation_ * other.translation_ + translation_};
}

Eigen::Vector3d Pose::operator*(const Eigen::Vector3d &point) const {
  return rotation_ * point + translation_;
}

Eigen::Matrix4d Pose::Matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose PoseUnderVariation(const Pose &pose, const Vector6d &theta) {
  return pose * Pose::FromVariation(theta);
}

Vector6d VariationBetween(const Pose &before, const Pose &after) {
  const Eigen::Matrix3d rt = before.rotation().transpose();
  Vector6d theta;
  theta.segment<3>(kRotOffset) = LogRotation(rt * after.rotation());
  theta.segment<3>(kTransOffset) =
      rt * (after.translation() - before.translation());
  return theta;
}

Matrix6d Adjoint(const Pose &pose) {
  Matrix6d ad = Matrix6d::Zero();
  const Eigen::Matrix3d &r = pose.rotation();
  ad.block<3, 3>(kRotOffset, kRotOffset) = r;
  ad.block<3, 3>(kTransOffset, kRotOffset) = Skew(pose.translation()) * r;
  ad.block<3, 3>(kTransOffset, kTransOffset) = r;
  return ad;
}

VariationMatrix::VariationMatrix(const Eigen::Vector3d &rotvec)
    : source_rotvec_{CanonicalRotVec(rotvec)} {
  const double angle = source_rotvec_.norm();
  double half_cot;  // (a/2) cot(a/2)
  double outer;     // (1 - (a/2) cot(a/2)) / a^2
  if (angle < kSmallAngle) {
    const double a2 = angle * angle;
    half_cot = 1.0 - a2 / 12.0;
    outer = 1.0 / 12.0 + a2 / 720.0;
  } else {
    const double half = 0.5 * angle;
    half_cot = half * std::cos(half) / std::sin(half);
    outer = (1.0 - half_cot) / (angle * angle);
  }
  c_ = half_cot * Eigen::Matrix3d::Identity() - 0.5 * Skew(source_rotvec_) +
       outer * source_rotvec_ * source_rotvec_.transpose();
}

}  // namespace kinopt
