#ifndef KINOPT_CONSTRAINTS_H_
#define KINOPT_CONSTRAINTS_H_

#include <utility>

#include <Eigen/Core>

#include <kinopt/axes.h>
#include <kinopt/se3.h>

namespace kinopt {

class KinematicStructure;

/// Drives selected components of the relative pose between frame A on body
/// a and frame B on body b to zero. Rows follow the extended residual
/// [_A r_B | _A t_B], filtered by `axes` (expressed in frame A).
struct Constraint {
  int body_a = 0;
  int body_b = 0;
  Pose frame_a;  // _A T_Ma
  Pose frame_b;  // _B T_Mb
  AxisMask axes = kAllAxes;

  int rows() const { return CountAxes(axes); }
};

/// Baseline rotational constraint e_i^T _A R_B e_j = 0 for the axis pairs
/// (x,y), (y,z) and (z,x).
struct OrthogonalityConstraint {
  int body_a = 0;
  int body_b = 0;
  Pose frame_a;  // _A T_Ma
  Pose frame_b;  // _B T_Mb

  static constexpr int kRows = 3;
};

// _A T_B = _A T_Ma * _Ma T_Mb * _Mb T_B for given body poses.
Pose RelativeConstraintPose(const Pose &frame_a, const Pose &pose_a,
                            const Pose &pose_b, const Pose &frame_b);

// [log(_A R_B) | _A t_B], all six rows.
Vector6d ExtendedResidual(const Constraint &constraint,
                          const KinematicStructure &structure);

// The rows of the extended residual selected by the constraint axes.
Eigen::VectorXd EvaluateConstraint(const Constraint &constraint,
                                   const KinematicStructure &structure);

/// Derivatives of the extended residual with respect to the 6-DoF body
/// variations theta_a and theta_b:
///
///   d/dtheta_a = [[-C R_AMa,           0      ],
///                 [ R_AMa [_Ma t_B]x,  -R_AMa ]]
///   d/dtheta_b = [[ C R_AMb,           0      ],
///                 [-R_AMb [_Mb t_B]x,   R_AMb ]]
struct ConstraintPartials {
  Matrix6d wrt_a;
  Matrix6d wrt_b;
};
ConstraintPartials ExtendedConstraintPartials(
    const Constraint &constraint, const KinematicStructure &structure);

// B_ab = db/dtheta_a J_a + db/dtheta_b J_b, rows selected by the axes.
// Requires valid body Jacobians.
Eigen::MatrixXd ConstraintJacobian(const Constraint &constraint,
                                   const KinematicStructure &structure);

Eigen::Vector3d EvaluateOrthogonality(
    const OrthogonalityConstraint &constraint,
    const KinematicStructure &structure);

// 3x6 partials, translational columns zero.
struct OrthogonalityPartials {
  Eigen::Matrix<double, 3, 6> wrt_a;
  Eigen::Matrix<double, 3, 6> wrt_b;
};
OrthogonalityPartials ComputeOrthogonalityPartials(
    const OrthogonalityConstraint &constraint,
    const KinematicStructure &structure);

Eigen::MatrixXd OrthogonalityJacobian(
    const OrthogonalityConstraint &constraint,
    const KinematicStructure &structure);

}  // namespace kinopt

#endif  // KINOPT_CONSTRAINTS_H_
