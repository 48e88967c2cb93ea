#include "doctest.h"
#include "oracles.h"

#include <kinopt/kinematics.h>

using namespace kinopt;
using oracle::MaxAbs;

namespace {

Joint Revolute(const Pose &parent_to_joint, const Pose &joint_to_model = {}) {
  Joint joint;
  joint.free_axes = {false, false, true, false, false, false};
  joint.parent_to_joint = parent_to_joint;
  joint.joint_to_model = joint_to_model;
  return joint;
}

Eigen::MatrixXd FiniteDifferenceJacobian(const KinematicStructure &structure,
                                         int body) {
  auto variation = [&](const Eigen::VectorXd &theta) -> Eigen::VectorXd {
    return oracle::BodyVariations(structure, theta)[body];
  };
  return oracle::NumericJacobian(variation,
                                 Eigen::VectorXd::Zero(structure.n_k()));
}

}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("joint variation expansion") {
  Joint joint;
  joint.free_axes = {false, false, true, false, false, false};
  CHECK(joint.dof() == 1);
  Vector6d expected = Vector6d::Zero();
  expected(2) = 0.3;
  CHECK(ExpandJointVariation(joint, Eigen::VectorXd::Constant(1, 0.3)) == expected);

  joint.free_axes = kAllAxes;
  const Vector6d v = (Vector6d() << 1, 2, 3, 4, 5, 6).finished();
  CHECK(ExpandJointVariation(joint, v) == v);

  joint.free_axes = {true, false, false, false, true, false};
  expected << 0.7, 0, 0, 0, -0.2, 0;
  CHECK(ExpandJointVariation(joint, Eigen::Vector2d{0.7, -0.2}) == expected);
  CHECK_THROWS_AS(ExpandJointVariation(joint, Eigen::Vector3d::Zero()),
                  std::invalid_argument);
}

TEST_CASE("coupled joint expansion") {
  Joint screw;
  screw.coupling = Eigen::MatrixXd::Zero(6, 1);
  screw.coupling(2, 0) = 1.0;
  screw.coupling(5, 0) = 0.01;
  CHECK(screw.dof() == 1);
  const Vector6d v = ExpandJointVariation(screw, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(v(2) == 2.0);
  CHECK(v(5) == doctest::Approx(0.02));

  KinematicStructure structure;
  structure.AddBody("root", Pose::Identity(), std::nullopt, Joint{});
  structure.AddChild("screw", 0, screw);
  CHECK(structure.n_k() == 7);
  CHECK(structure.rotational_coordinates()[6]);
  structure.ComputeBodyJacobians();
  CHECK(MaxAbs(structure.jacobian(1) - FiniteDifferenceJacobian(structure, 1)) < 1e-5);

  Joint bad;
  bad.coupling = Eigen::MatrixXd::Zero(5, 1);
  CHECK_THROWS_AS(structure.AddChild("bad", 0, bad), std::invalid_argument);
}

TEST_CASE("root Jacobian is the identity when the joint sits at the model frame") {
  KinematicStructure structure;
  structure.AddBody("root", Pose::FromRotVec({0.2, 0.4, -1}, {1, 2, 3}),
                    std::nullopt, Joint{});
  structure.ComputeBodyJacobians();
  CHECK(MaxAbs(structure.jacobian(0) - Eigen::MatrixXd::Identity(6, 6)) == 0.0);
}

TEST_CASE("revolute child column is the rot_z column of Ad(_M T_J)") {
  KinematicStructure structure;
  structure.AddBody("root", Pose::Identity(), std::nullopt, Joint{});
  const Pose joint_to_model = Pose::FromRotVec({0.3, 0.1, 0}, {0.1, 0.2, 0});
  structure.AddChild("child", 0, Revolute(Pose::FromRotVec({0, 0, 0.5}, {1, 0, 0}),
                                          joint_to_model));
  structure.ComputeBodyJacobians();
  const Eigen::MatrixXd &j = structure.jacobian(1);
  CHECK(j.cols() == 7);
  CHECK(MaxAbs(j.col(6) - Adjoint(joint_to_model.Inverse()).col(2)) < 1e-15);
}

TEST_CASE("depth-first coordinate order") {
  KinematicStructure structure;
  const int root = structure.AddBody("root", Pose::Identity(), std::nullopt, Joint{});
  const int left = structure.AddChild("left", root, Revolute(Pose::Identity()));
  Joint prismatic;
  prismatic.free_axes = {false, false, false, true, true, false};
  const int right = structure.AddChild("right", root, prismatic);
  const int leaf = structure.AddChild("leaf", left, Revolute(Pose::Identity()));
  CHECK(structure.dof_offset(root) == 0);
  CHECK(structure.dof_offset(left) == 6);
  CHECK(structure.dof_offset(leaf) == 7);
  CHECK(structure.dof_offset(right) == 8);
  CHECK(structure.n_k() == 10);
  const std::vector<bool> expected{true, true, true, false, false, false,
                                   true, true, false, false};
  CHECK(structure.rotational_coordinates() == expected);
  CHECK(structure.FindBody("leaf") == leaf);
  CHECK_FALSE(structure.FindBody("missing"));
}

TEST_CASE("body Jacobians match finite differences on random chains") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    KinematicStructure structure = oracle::RandomTree(2 + trial % 5, rng);
    structure.ComputeBodyJacobians();
    for (int i = 0; i < structure.n_bodies(); ++i)
      CHECK(MaxAbs(structure.jacobian(i) - FiniteDifferenceJacobian(structure, i)) < 1e-5);
  }
}

TEST_CASE("stale Jacobians are rejected and recomputed lazily") {
  std::mt19937_64 rng(22);
  KinematicStructure structure = oracle::RandomTree(3, rng);
  CHECK_THROWS_AS(structure.jacobian(0), std::logic_error);
  structure.BodyJacobians();
  CHECK(structure.jacobians_valid());
  structure.UpdatePoses(Eigen::VectorXd::Constant(structure.n_k(), 0.01));
  CHECK_FALSE(structure.jacobians_valid());
  structure.SetPose(0, Pose::Identity());
  CHECK(structure.BodyJacobians().size() == 3);
  CHECK(structure.jacobians_valid());
}

TEST_CASE("zero update keeps every pose") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    KinematicStructure structure = oracle::RandomTree(5, rng);
    const KinematicStructure before = structure;
    structure.UpdatePoses(Eigen::VectorXd::Zero(structure.n_k()));
    for (int i = 0; i < structure.n_bodies(); ++i)
      CHECK(MaxAbs(structure.body(i).pose.Matrix() - before.body(i).pose.Matrix()) < 1e-12);
  }
}

TEST_CASE("revolute update equals the hand-composed matrix chain") {
  const Pose parent_pose = Pose::FromRotVec({0.1, -0.3, 0.2}, {0.5, 0, 1});
  const Eigen::Vector3d p_r_j{0, 0.4, 0.1}, p_t_j{0.3, 0, 0};
  const Eigen::Vector3d j_r_m{0.2, 0, 0}, j_t_m{0, 0.05, 0};
  KinematicStructure structure;
  structure.AddBody("parent", parent_pose, std::nullopt, Joint{});
  structure.AddChild("child", 0, Revolute(Pose::FromRotVec(p_r_j, p_t_j),
                                          Pose::FromRotVec(j_r_m, j_t_m)));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(7);
  theta(6) = 0.7;
  structure.UpdatePoses(theta);
  const Eigen::Matrix4d expected =
      oracle::Homogeneous(parent_pose) * oracle::Homogeneous(p_r_j, p_t_j) *
      oracle::Homogeneous(Eigen::Vector3d{0, 0, 0.7}, Eigen::Vector3d::Zero()) *
      oracle::Homogeneous(j_r_m, j_t_m);
  CHECK(MaxAbs(structure.body(1).pose.Matrix() - expected) < 1e-12);
}

TEST_CASE("root translation acts in the joint frame") {
  const Pose root_pose = Pose::FromRotVec({0.4, 0.2, -0.5}, {1, -1, 2});
  KinematicStructure structure;
  structure.AddBody("root", root_pose, std::nullopt, Joint{});
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(6);
  theta.tail<3>() << 0.1, -0.2, 0.3;
  structure.UpdatePoses(theta);
  CHECK(MaxAbs(structure.body(0).pose.translation() -
               (root_pose.translation() + root_pose.rotation() * theta.tail<3>())) < 1e-15);
  CHECK(MaxAbs(structure.body(0).pose.rotation() - root_pose.rotation()) == 0.0);
}

TEST_CASE("root with an offset joint frame") {
  Joint joint;
  joint.free_axes = {false, false, true, false, false, false};
  joint.joint_to_model = Pose::FromRotVec({0, 0, 0}, {0.5, 0, 0});
  KinematicStructure structure;
  structure.AddBody("root", Pose::Identity(), std::nullopt, joint);
  structure.UpdatePoses(Eigen::VectorXd::Constant(1, oracle::kPi / 2));
  CHECK(MaxAbs(structure.body(0).pose.translation() - Eigen::Vector3d{-0.5, 0.5, 0}) < 1e-15);
}

TEST_CASE("first-order projection consistency") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    KinematicStructure structure = oracle::RandomTree(2 + trial % 5, rng);
    structure.ComputeBodyJacobians();
    Eigen::VectorXd theta(structure.n_k());
    for (int k = 0; k < theta.size(); ++k) theta(k) = oracle::Uniform(rng, -1, 1);
    theta *= 1e-4 / theta.norm();
    const auto variations = oracle::BodyVariations(structure, theta);
    for (int i = 0; i < structure.n_bodies(); ++i)
      CHECK(MaxAbs(variations[i] - structure.jacobian(i) * theta) < 1e-6);
  }
}

TEST_CASE("updates only move joints along free axes") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    KinematicStructure structure = oracle::RandomTree(5, rng);
    for (int update = 0; update < 3; ++update) {
      const KinematicStructure before = structure;
      Eigen::VectorXd theta(structure.n_k());
      for (int k = 0; k < theta.size(); ++k) theta(k) = oracle::Uniform(rng, -0.5, 0.5);
      structure.UpdatePoses(theta);
      for (int i = 1; i < structure.n_bodies(); ++i) {
        const Body &old_body = before.body(i);
        const Body &new_body = structure.body(i);
        const Pose &old_parent = before.body(*old_body.parent).pose;
        const Pose &new_parent = structure.body(*new_body.parent).pose;
        // Joint motion seen between the old joint frames on parent and child.
        const Pose motion = old_body.joint.parent_to_joint.Inverse() *
                            new_parent.Inverse() * new_body.pose *
                            old_body.joint.joint_to_model.Inverse();
        const Pose old_motion = old_body.joint.parent_to_joint.Inverse() *
                                old_parent.Inverse() * old_body.pose *
                                old_body.joint.joint_to_model.Inverse();
        const Vector6d delta = VariationBetween(old_motion, motion);
        for (int axis = 0; axis < 6; ++axis) {
          if (!old_body.joint.free_axes[axis]) CHECK(std::abs(delta(axis)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("the non-fixed joint transform follows the poses") {
  std::mt19937_64 rng(26);
  for (FixedSide side : {FixedSide::kJointToModel, FixedSide::kParentToJoint}) {
    Joint joint = Revolute(oracle::RandomPose(rng), oracle::RandomPose(rng));
    joint.fixed_side = side;
    KinematicStructure structure;
    structure.AddBody("root", oracle::RandomPose(rng), std::nullopt, Joint{});
    structure.AddChild("child", 0, joint);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(7);
    theta << 0.1, 0.2, -0.1, 0.3, 0, 0.1, 0.8;
    structure.UpdatePoses(theta);
    const Joint &updated = structure.body(1).joint;
    const Pose recomposed =
        structure.body(0).pose * updated.parent_to_joint * updated.joint_to_model;
    CHECK(MaxAbs(recomposed.Matrix() - structure.body(1).pose.Matrix()) < 1e-12);
    if (side == FixedSide::kJointToModel) {
      CHECK(MaxAbs(updated.joint_to_model.Matrix() - joint.joint_to_model.Matrix()) == 0.0);
    } else {
      CHECK(MaxAbs(updated.parent_to_joint.Matrix() - joint.parent_to_joint.Matrix()) == 0.0);
    }
  }
}

TEST_CASE("invalid structures are rejected") {
  KinematicStructure structure;
  CHECK_THROWS_AS(structure.AddBody("orphan", Pose::Identity(), 0, Joint{}),
                  std::out_of_range);
  structure.AddBody("root", Pose::Identity(), std::nullopt, Joint{});
  CHECK_THROWS_AS(structure.UpdatePoses(Eigen::VectorXd::Zero(5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(structure.AddConstraint({0, 0, {}, {}, kAllAxes}),
                  std::invalid_argument);
  structure.AddBody("other", Pose::Identity(), std::nullopt, Joint{});
  CHECK_THROWS_AS(structure.AddConstraint({0, 1, {}, {}, AxisMask{}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(structure.AddConstraint({0, 7, {}, {}, kAllAxes}),
                  std::out_of_range);
  CHECK_THROWS_AS(JointAsConstraint(structure, 0), std::invalid_argument);
}

TEST_CASE("detaching and re-expressing joints as constraints") {
  std::mt19937_64 rng(27);
  const KinematicStructure tree = oracle::RandomTree(4, rng);
  const KinematicStructure detached = DetachBodies(tree);
  CHECK(detached.n_k() == 24);
  for (int i = 0; i < tree.n_bodies(); ++i) {
    CHECK_FALSE(detached.body(i).parent);
    CHECK(detached.body(i).pose.Matrix() == tree.body(i).pose.Matrix());
  }
  for (int i = 1; i < tree.n_bodies(); ++i) {
    const Constraint c = JointAsConstraint(tree, i);
    CHECK(c.axes == InvertAxes(tree.body(i).joint.free_axes));
    CHECK(MaxAbs(EvaluateConstraint(c, detached)) < 1e-12);
  }
}

}
