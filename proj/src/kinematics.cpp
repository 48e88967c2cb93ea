#include <kinopt/kinematics.h>

#include <stdexcept>

namespace kinopt {

int Joint::dof() const {
  if (coupling.size() > 0) return static_cast<int>(coupling.cols());
  return CountAxes(free_axes);
}

Eigen::MatrixXd Joint::Expansion() const {
  if (coupling.size() > 0) {
    if (coupling.rows() != 6)
      throw std::invalid_argument("joint coupling matrix must have 6 rows");
    return coupling;
  }
  Eigen::MatrixXd selection = Eigen::MatrixXd::Zero(6, CountAxes(free_axes));
  for (int axis = 0, column = 0; axis < 6; ++axis) {
    if (free_axes[axis]) selection(axis, column++) = 1.0;
  }
  return selection;
}

Vector6d ExpandJointVariation(const Joint &joint,
                              const Eigen::VectorXd &theta_j) {
  if (theta_j.size() != joint.dof())
    throw std::invalid_argument("joint variation has " +
                                std::to_string(theta_j.size()) +
                                " entries, joint has " +
                                std::to_string(joint.dof()) + " DoF");
  return joint.Expansion() * theta_j;
}

void KinematicStructure::CheckBodyIndex(int index, const char *what) const {
  if (index < 0 || index >= n_bodies())
    throw std::out_of_range(std::string{what} + " index " +
                            std::to_string(index) + " out of range");
}

int KinematicStructure::AddBody(const std::string &name, const Pose &pose,
                                std::optional<int> parent,
                                const Joint &joint) {
  if (parent) CheckBodyIndex(*parent, "parent");
  if (joint.coupling.size() > 0 && joint.coupling.rows() != 6)
    throw std::invalid_argument("joint coupling of body '" + name +
                                "' must have 6 rows");
  Body body{name, pose, parent, joint};
  bodies_.push_back(body);
  children_.emplace_back();
  if (parent) children_[*parent].push_back(n_bodies() - 1);
  if (parent) RecomputeJointTransform(n_bodies() - 1);
  RebuildOffsets();
  return n_bodies() - 1;
}

int KinematicStructure::AddChild(const std::string &name, int parent,
                                 const Joint &joint) {
  CheckBodyIndex(parent, "parent");
  const Pose pose =
      bodies_[parent].pose * joint.parent_to_joint * joint.joint_to_model;
  return AddBody(name, pose, parent, joint);
}

int KinematicStructure::AddConstraint(const Constraint &constraint) {
  CheckBodyIndex(constraint.body_a, "constraint body_a");
  CheckBodyIndex(constraint.body_b, "constraint body_b");
  if (constraint.body_a == constraint.body_b)
    throw std::invalid_argument("constraint must connect two distinct bodies");
  if (constraint.rows() < 1)
    throw std::invalid_argument("constraint must constrain at least one axis");
  constraints_.push_back(constraint);
  return static_cast<int>(constraints_.size()) - 1;
}

int KinematicStructure::AddOrthogonalityConstraint(
    const OrthogonalityConstraint &constraint) {
  CheckBodyIndex(constraint.body_a, "constraint body_a");
  CheckBodyIndex(constraint.body_b, "constraint body_b");
  if (constraint.body_a == constraint.body_b)
    throw std::invalid_argument("constraint must connect two distinct bodies");
  orthogonality_constraints_.push_back(constraint);
  return static_cast<int>(orthogonality_constraints_.size()) - 1;
}

std::optional<int> KinematicStructure::FindBody(const std::string &name) const {
  for (int i = 0; i < n_bodies(); ++i) {
    if (bodies_[i].name == name) return i;
  }
  return std::nullopt;
}

int KinematicStructure::n_constraint_rows() const {
  int rows = 0;
  for (const auto &constraint : constraints_) rows += constraint.rows();
  rows += OrthogonalityConstraint::kRows *
          static_cast<int>(orthogonality_constraints_.size());
  return rows;
}

void KinematicStructure::RebuildOffsets() {
  dof_offsets_.assign(bodies_.size(), 0);
  rotational_coordinates_.clear();
  int offset = 0;
  std::vector<int> stack;
  for (int root = n_bodies() - 1; root >= 0; --root) {
    if (!bodies_[root].parent) stack.push_back(root);
  }
  while (!stack.empty()) {
    const int index = stack.back();
    stack.pop_back();
    const Joint &joint = bodies_[index].joint;
    dof_offsets_[index] = offset;
    offset += joint.dof();
    const Eigen::MatrixXd expansion = joint.Expansion();
    for (int c = 0; c < expansion.cols(); ++c) {
      rotational_coordinates_.push_back(
          expansion.col(c).segment<3>(kRotOffset).norm() >=
          expansion.col(c).segment<3>(kTransOffset).norm());
    }
    const auto &children = children_[index];
    for (auto it = children.rbegin(); it != children.rend(); ++it)
      stack.push_back(*it);
  }
  n_k_ = offset;
  jacobians_valid_ = false;
}

void KinematicStructure::RecomputeJointTransform(int index) {
  Body &body = bodies_[index];
  if (!body.parent) return;
  const Pose &parent_pose = bodies_[*body.parent].pose;
  Joint &joint = body.joint;
  if (joint.fixed_side == FixedSide::kJointToModel) {
    joint.parent_to_joint =
        parent_pose.Inverse() * body.pose * joint.joint_to_model.Inverse();
  } else {
    joint.joint_to_model =
        joint.parent_to_joint.Inverse() * parent_pose.Inverse() * body.pose;
  }
}

void KinematicStructure::SetPose(int index, const Pose &pose) {
  CheckBodyIndex(index, "body");
  bodies_[index].pose = pose;
  RecomputeJointTransform(index);
  for (int child : children_[index]) RecomputeJointTransform(child);
  jacobians_valid_ = false;
}

void KinematicStructure::ComputeBodyJacobians() {
  jacobians_.assign(bodies_.size(), Eigen::MatrixXd::Zero(6, n_k_));
  for (int i = 0; i < n_bodies(); ++i) {
    const Body &body = bodies_[i];
    Eigen::MatrixXd &jacobian = jacobians_[i];
    if (body.parent) {
      const Pose model_to_parent =
          body.pose.Inverse() * bodies_[*body.parent].pose;
      jacobian = Adjoint(model_to_parent) * jacobians_[*body.parent];
    }
    const Pose model_to_joint = body.joint.joint_to_model.Inverse();
    const Eigen::MatrixXd joint_columns =
        Adjoint(model_to_joint) * body.joint.Expansion();
    jacobian.middleCols(dof_offsets_[i], joint_columns.cols()) +=
        joint_columns;
  }
  jacobians_valid_ = true;
}

const std::vector<Eigen::MatrixXd> &KinematicStructure::BodyJacobians() {
  if (!jacobians_valid_) ComputeBodyJacobians();
  return jacobians_;
}

const Eigen::MatrixXd &KinematicStructure::jacobian(int index) const {
  if (!jacobians_valid_)
    throw std::logic_error("body Jacobians are stale; call ComputeBodyJacobians");
  return jacobians_.at(index);
}

void KinematicStructure::UpdatePoses(const Eigen::VectorXd &theta_k) {
  if (theta_k.size() != n_k_)
    throw std::invalid_argument("theta_k has " +
                                std::to_string(theta_k.size()) +
                                " entries, structure has " +
                                std::to_string(n_k_) + " DoF");
  for (int i = 0; i < n_bodies(); ++i) {
    Body &body = bodies_[i];
    const Joint &joint = body.joint;
    const Vector6d theta_bar = ExpandJointVariation(
        joint, theta_k.segment(dof_offsets_[i], joint.dof()));
    const Pose joint_motion = Pose::FromVariation(theta_bar);
    if (body.parent) {
      body.pose = bodies_[*body.parent].pose * joint.parent_to_joint *
                  joint_motion * joint.joint_to_model;
    } else {
      body.pose = body.pose * joint.joint_to_model.Inverse() * joint_motion *
                  joint.joint_to_model;
    }
  }
  for (int i = 0; i < n_bodies(); ++i) RecomputeJointTransform(i);
  jacobians_valid_ = false;
}

KinematicStructure DetachBodies(const KinematicStructure &structure) {
  KinematicStructure detached;
  for (const Body &body : structure.bodies()) {
    detached.AddBody(body.name, body.pose, std::nullopt, Joint{});
  }
  return detached;
}

Constraint JointAsConstraint(const KinematicStructure &structure, int body) {
  const Body &child = structure.body(body);
  if (!child.parent)
    throw std::invalid_argument("body '" + child.name +
                                "' is a root and has no joint to constrain");
  if (child.joint.coupling.size() > 0)
    throw std::invalid_argument("coupled joint of body '" + child.name +
                                "' cannot be expressed as an axis constraint");
  Constraint constraint;
  constraint.body_a = *child.parent;
  constraint.body_b = body;
  constraint.frame_a = child.joint.parent_to_joint.Inverse();
  constraint.frame_b = child.joint.joint_to_model;
  constraint.axes = InvertAxes(child.joint.free_axes);
  return constraint;
}

}  // namespace kinopt
