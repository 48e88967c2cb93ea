#ifndef KINOPT_KINEMATICS_H_
#define KINOPT_KINEMATICS_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <kinopt/axes.h>
#include <kinopt/constraints.h>
#include <kinopt/se3.h>

namespace kinopt {

enum class FixedSide { kJointToModel, kParentToJoint };

struct Joint {
  AxisMask free_axes = kAllAxes;
  Pose joint_to_model;   // _J T_M
  Pose parent_to_joint;  // _P T_J, unused for roots
  FixedSide fixed_side = FixedSide::kJointToModel;
  // Optional 6 x n_j derivative d(theta_bar_j)/d(theta_j) for coupled
  // joints such as screws. Empty means plain column selection.
  Eigen::MatrixXd coupling;

  int dof() const;
  // d(theta_bar_j)/d(theta_j): the coupling matrix or the column selection
  // of the free axes.
  Eigen::MatrixXd Expansion() const;
};

// Scatters the joint coordinates onto the 6-DoF joint variation.
Vector6d ExpandJointVariation(const Joint &joint,
                              const Eigen::VectorXd &theta_j);

struct Body {
  std::string name;
  Pose pose;  // _A T_M in the world / camera frame A
  std::optional<int> parent;
  Joint joint;
};

/// A forest of bodies connected by joints plus pose constraints that may
/// close kinematic chains.
///
/// Bodies are stored parent-before-child. The stacked variation theta_k
/// concatenates the joint coordinates in depth-first order starting from
/// each root. Jacobians are cached and recomputed lazily after any pose
/// change.
///
/// Single writer: pose updates and Jacobian computation mutate the
/// structure.
class KinematicStructure {
 public:
  // Adds a body with a known pose. For non-root bodies the transform that is
  // not declared fixed is inferred from the parent and body poses.
  int AddBody(const std::string &name, const Pose &pose,
              std::optional<int> parent, const Joint &joint);

  // Adds a non-root body whose pose follows from the parent pose and both
  // joint transforms: _A T_P * _P T_J * _J T_M.
  int AddChild(const std::string &name, int parent, const Joint &joint);

  int AddConstraint(const Constraint &constraint);
  int AddOrthogonalityConstraint(const OrthogonalityConstraint &constraint);

  int n_bodies() const { return static_cast<int>(bodies_.size()); }
  int n_k() const { return n_k_; }
  const Body &body(int index) const { return bodies_.at(index); }
  const std::vector<Body> &bodies() const { return bodies_; }
  int dof_offset(int index) const { return dof_offsets_.at(index); }
  std::optional<int> FindBody(const std::string &name) const;

  const std::vector<Constraint> &constraints() const { return constraints_; }
  const std::vector<OrthogonalityConstraint> &orthogonality_constraints()
      const {
    return orthogonality_constraints_;
  }
  int n_constraint_rows() const;

  // True for coordinates of theta_k that vary a rotation.
  const std::vector<bool> &rotational_coordinates() const {
    return rotational_coordinates_;
  }

  void SetPose(int index, const Pose &pose);

  // J_i = Ad(_M T_P) J_parent + [0 Ad(_M T_J) dtheta_bar/dtheta_j 0].
  void ComputeBodyJacobians();
  // Recomputes the Jacobians if any pose changed since the last call.
  const std::vector<Eigen::MatrixXd> &BodyJacobians();
  bool jacobians_valid() const { return jacobians_valid_; }
  // Requires valid Jacobians; throws std::logic_error otherwise.
  const Eigen::MatrixXd &jacobian(int index) const;

  // Root:     _A T_M+ = _A T_M * _M T_J * T(theta_bar_j) * _J T_M
  // Non-root: _A T_M+ = _A T_P+ * _P T_J * T(theta_bar_j) * _J T_M
  // Afterwards the non-fixed joint transform of every joint is recomputed
  // from the updated poses.
  void UpdatePoses(const Eigen::VectorXd &theta_k);

 private:
  void RebuildOffsets();
  void RecomputeJointTransform(int index);
  void CheckBodyIndex(int index, const char *what) const;

  std::vector<Body> bodies_;
  std::vector<std::vector<int>> children_;
  std::vector<int> dof_offsets_;
  std::vector<bool> rotational_coordinates_;
  int n_k_ = 0;
  std::vector<Constraint> constraints_;
  std::vector<OrthogonalityConstraint> orthogonality_constraints_;
  std::vector<Eigen::MatrixXd> jacobians_;
  bool jacobians_valid_ = false;
};

// Every body becomes its own root with a free 6-DoF joint at its model
// frame; joints and constraints are dropped.
KinematicStructure DetachBodies(const KinematicStructure &structure);

// Pose constraint locking the non-free axes of a body's joint, between the
// joint frame attached to the parent (A) and the one attached to the body
// (B). The body must not be a root.
Constraint JointAsConstraint(const KinematicStructure &structure, int body);

}  // namespace kinopt

#endif  // KINOPT_KINEMATICS_H_
