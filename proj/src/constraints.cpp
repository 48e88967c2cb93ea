#include <kinopt/constraints.h>

#include <array>
#include <utility>

#include <kinopt/kinematics.h>

namespace kinopt {

namespace {

constexpr std::array<std::pair<int, int>, 3> kOrthogonalPairs{
    {{0, 1}, {1, 2}, {2, 0}}};

Eigen::MatrixXd SelectRows(const Eigen::MatrixXd &full, const AxisMask &axes) {
  Eigen::MatrixXd selected(CountAxes(axes), full.cols());
  for (int axis = 0, row = 0; axis < 6; ++axis) {
    if (axes[axis]) selected.row(row++) = full.row(axis);
  }
  return selected;
}

}  // namespace

Pose RelativeConstraintPose(const Pose &frame_a, const Pose &pose_a,
                            const Pose &pose_b, const Pose &frame_b) {
  return frame_a * pose_a.Inverse() * pose_b * frame_b.Inverse();
}

Vector6d ExtendedResidual(const Constraint &constraint,
                          const KinematicStructure &structure) {
  const Pose a_to_b = RelativeConstraintPose(
      constraint.frame_a, structure.body(constraint.body_a).pose,
      structure.body(constraint.body_b).pose, constraint.frame_b);
  Vector6d residual;
  residual.segment<3>(kRotOffset) = a_to_b.rotvec();
  residual.segment<3>(kTransOffset) = a_to_b.translation();
  return residual;
}

Eigen::VectorXd EvaluateConstraint(const Constraint &constraint,
                                   const KinematicStructure &structure) {
  return SelectRows(ExtendedResidual(constraint, structure), constraint.axes);
}

ConstraintPartials ExtendedConstraintPartials(
    const Constraint &constraint, const KinematicStructure &structure) {
  const Pose &pose_a = structure.body(constraint.body_a).pose;
  const Pose &pose_b = structure.body(constraint.body_b).pose;
  const Pose model_b_to_b = constraint.frame_b.Inverse();
  const Pose model_a_to_model_b = pose_a.Inverse() * pose_b;
  const Pose a_to_model_b = constraint.frame_a * model_a_to_model_b;
  const Pose a_to_b = a_to_model_b * model_b_to_b;

  const Eigen::Matrix3d &r_a_ma = constraint.frame_a.rotation();
  const Eigen::Matrix3d &r_a_mb = a_to_model_b.rotation();
  const Eigen::Vector3d t_ma_b = (model_a_to_model_b * model_b_to_b).translation();
  const Eigen::Vector3d &t_mb_b = model_b_to_b.translation();
  const Eigen::Matrix3d c = VariationMatrix{a_to_b.rotvec()}.matrix();

  ConstraintPartials partials{Matrix6d::Zero(), Matrix6d::Zero()};
  partials.wrt_a.block<3, 3>(kRotOffset, kRotOffset) = -c * r_a_ma;
  partials.wrt_a.block<3, 3>(kTransOffset, kRotOffset) = r_a_ma * Skew(t_ma_b);
  partials.wrt_a.block<3, 3>(kTransOffset, kTransOffset) = -r_a_ma;
  partials.wrt_b.block<3, 3>(kRotOffset, kRotOffset) = c * r_a_mb;
  partials.wrt_b.block<3, 3>(kTransOffset, kRotOffset) = -r_a_mb * Skew(t_mb_b);
  partials.wrt_b.block<3, 3>(kTransOffset, kTransOffset) = r_a_mb;
  return partials;
}

Eigen::MatrixXd ConstraintJacobian(const Constraint &constraint,
                                   const KinematicStructure &structure) {
  const ConstraintPartials partials =
      ExtendedConstraintPartials(constraint, structure);
  const Eigen::MatrixXd full =
      partials.wrt_a * structure.jacobian(constraint.body_a) +
      partials.wrt_b * structure.jacobian(constraint.body_b);
  return SelectRows(full, constraint.axes);
}

Eigen::Vector3d EvaluateOrthogonality(
    const OrthogonalityConstraint &constraint,
    const KinematicStructure &structure) {
  const Eigen::Matrix3d r_a_b =
      RelativeConstraintPose(constraint.frame_a,
                             structure.body(constraint.body_a).pose,
                             structure.body(constraint.body_b).pose,
                             constraint.frame_b)
          .rotation();
  Eigen::Vector3d residual;
  for (int row = 0; row < 3; ++row) {
    const auto [i, j] = kOrthogonalPairs[row];
    residual(row) = r_a_b(i, j);
  }
  return residual;
}

OrthogonalityPartials ComputeOrthogonalityPartials(
    const OrthogonalityConstraint &constraint,
    const KinematicStructure &structure) {
  const Pose &pose_a = structure.body(constraint.body_a).pose;
  const Pose &pose_b = structure.body(constraint.body_b).pose;
  const Pose a_to_model_b = constraint.frame_a * pose_a.Inverse() * pose_b;
  const Eigen::Matrix3d r_a_b =
      (a_to_model_b * constraint.frame_b.Inverse()).rotation();
  const Eigen::Matrix3d &r_a_ma = constraint.frame_a.rotation();
  const Eigen::Matrix3d &r_a_mb = a_to_model_b.rotation();

  OrthogonalityPartials partials;
  partials.wrt_a.setZero();
  partials.wrt_b.setZero();
  for (int row = 0; row < 3; ++row) {
    const auto [i, j] = kOrthogonalPairs[row];
    const Eigen::RowVector3d lever = Skew(r_a_b.col(j)).row(i);
    partials.wrt_a.block<1, 3>(row, kRotOffset) = lever * r_a_ma;
    partials.wrt_b.block<1, 3>(row, kRotOffset) = -lever * r_a_mb;
  }
  return partials;
}

Eigen::MatrixXd OrthogonalityJacobian(
    const OrthogonalityConstraint &constraint,
    const KinematicStructure &structure) {
  const OrthogonalityPartials partials =
      ComputeOrthogonalityPartials(constraint, structure);
  return partials.wrt_a * structure.jacobian(constraint.body_a) +
         partials.wrt_b * structure.jacobian(constraint.body_b);
}

}  // namespace kinopt
