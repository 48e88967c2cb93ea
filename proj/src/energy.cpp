#include <kinopt/energy.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace kinopt {

QuadraticPoseTarget::QuadraticPoseTarget(const Pose &target, double weight_r,
                                         double weight_t)
    : target_{target}, weight_r_{weight_r}, weight_t_{weight_t} {
  if (weight_r < 0.0 || weight_t < 0.0)
    throw std::invalid_argument("pose target weights must be non-negative");
}

BodyEnergy QuadraticPoseTarget::Evaluate(int, const Pose &pose) const {
  const Eigen::Vector3d r =
      LogRotation(target_.rotation().transpose() * pose.rotation());
  const double angle = r.norm();
  double half_cot;  // (a/2) cot(a/2)
  double outer;     // (1 - (a/2) cot(a/2)) / a^2
  if (angle < kSmallAngle) {
    half_cot = 1.0 - angle * angle / 12.0;
    outer = 1.0 / 12.0 + angle * angle / 720.0;
  } else {
    const double half = 0.5 * angle;
    half_cot = half * std::cos(half) / std::sin(half);
    outer = (1.0 - half_cot) / (angle * angle);
  }

  BodyEnergy energy;
  energy.gradient.segment<3>(kRotOffset) = 2.0 * weight_r_ * r;
  energy.gradient.segment<3>(kTransOffset) =
      2.0 * weight_t_ * pose.rotation().transpose() *
      (pose.translation() - target_.translation());
  energy.hessian.block<3, 3>(kRotOffset, kRotOffset) =
      2.0 * weight_r_ *
      (half_cot * Eigen::Matrix3d::Identity() + outer * r * r.transpose());
  energy.hessian.block<3, 3>(kTransOffset, kTransOffset) =
      2.0 * weight_t_ * Eigen::Matrix3d::Identity();
  return energy;
}

double QuadraticPoseTarget::Value(int, const Pose &pose) const {
  const Eigen::Vector3d r =
      LogRotation(target_.rotation().transpose() * pose.rotation());
  return weight_r_ * r.squaredNorm() +
         weight_t_ * (pose.translation() - target_.translation()).squaredNorm();
}

PointRegistration::PointRegistration(
    std::vector<Eigen::Vector3d> model_points,
    std::vector<Eigen::Vector3d> observed_points)
    : model_points_{std::move(model_points)},
      observed_points_{std::move(observed_points)} {
  if (model_points_.size() != observed_points_.size())
    throw std::invalid_argument(
        "point registration needs equally many model and observed points");
  if (model_points_.size() < 3)
    throw std::invalid_argument("point registration needs at least 3 points");
}

BodyEnergy PointRegistration::Evaluate(int, const Pose &pose) const {
  BodyEnergy energy;
  Eigen::Matrix<double, 3, 6> jacobian;
  for (size_t i = 0; i < model_points_.size(); ++i) {
    const Eigen::Vector3d error = pose * model_points_[i] - observed_points_[i];
    jacobian.block<3, 3>(0, kRotOffset) =
        -pose.rotation() * Skew(model_points_[i]);
    jacobian.block<3, 3>(0, kTransOffset) = pose.rotation();
    energy.gradient += 2.0 * jacobian.transpose() * error;
    energy.hessian += 2.0 * jacobian.transpose() * jacobian;
  }
  return energy;
}

double PointRegistration::Value(int, const Pose &pose) const {
  double value = 0.0;
  for (size_t i = 0; i < model_points_.size(); ++i)
    value += (pose * model_points_[i] - observed_points_[i]).squaredNorm();
  return value;
}

void StructureEnergy::Add(int body, std::shared_ptr<const EnergyProvider> term) {
  if (!term) throw std::invalid_argument("energy term must not be null");
  terms_[body].push_back(std::move(term));
}

BodyEnergy StructureEnergy::Evaluate(int body, const Pose &pose) const {
  BodyEnergy energy;
  const auto it = terms_.find(body);
  if (it == terms_.end()) return energy;
  for (const auto &term : it->second) energy += term->Evaluate(body, pose);
  return energy;
}

double StructureEnergy::Value(int body, const Pose &pose) const {
  double value = 0.0;
  const auto it = terms_.find(body);
  if (it == terms_.end()) return value;
  for (const auto &term : it->second) value += term->Value(body, pose);
  return value;
}

bool IsSymmetric(const Matrix6d &m, double tolerance) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tolerance;
}

bool IsPositiveSemidefinite(const Matrix6d &m, double tolerance) {
  const Eigen::SelfAdjointEigenSolver<Matrix6d> solver(0.5 *
                                                       (m + m.transpose()));
  return solver.eigenvalues().minCoeff() >= -tolerance;
}

}  // namespace kinopt
