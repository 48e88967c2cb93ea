#ifndef KINOPT_ENERGY_H_
#define KINOPT_ENERGY_H_

#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include <kinopt/se3.h>

namespace kinopt {

/// Gradient and Hessian of a body energy with respect to the body's 6-DoF
/// variation theta_i, evaluated at theta_i = 0.
struct BodyEnergy {
  Vector6d gradient = Vector6d::Zero();
  Matrix6d hessian = Matrix6d::Zero();

  BodyEnergy &operator+=(const BodyEnergy &other) {
    gradient += other.gradient;
    hessian += other.hessian;
    return *this;
  }
};

/// Measurement model of the bodies in a structure. Implementations are
/// immutable after construction and may be queried concurrently.
///
/// The variation convention is PoseUnderVariation: pose * T(theta).
class EnergyProvider {
 public:
  virtual ~EnergyProvider() = default;
  virtual BodyEnergy Evaluate(int body, const Pose &pose) const = 0;
  // Scalar energy E_i at the given pose (for line checks and tests).
  virtual double Value(int body, const Pose &pose) const = 0;
};

class ZeroEnergy final : public EnergyProvider {
 public:
  BodyEnergy Evaluate(int, const Pose &) const override { return {}; }
  double Value(int, const Pose &) const override { return 0.0; }
};

/// E = w_r ||log(R_target^T R)||^2 + w_t ||t - t_target||^2.
///
/// Rotational gradient 2 w_r r and exact Hessian
/// 2 w_r [(a/2) cot(a/2) (I - e e^T) + e e^T] with r = a e the rotation
/// vector of R_target^T R; translational gradient 2 w_t R^T (t - t_target)
/// and Hessian 2 w_t I.
class QuadraticPoseTarget final : public EnergyProvider {
 public:
  QuadraticPoseTarget(const Pose &target, double weight_r, double weight_t);

  BodyEnergy Evaluate(int body, const Pose &pose) const override;
  double Value(int body, const Pose &pose) const override;

 private:
  Pose target_;
  double weight_r_;
  double weight_t_;
};

/// ICP-like term E = sum ||pose * T(theta) * p_i - o_i||^2 with Gauss-Newton
/// Hessian. Model points live in the body frame, observations in frame A.
class PointRegistration final : public EnergyProvider {
 public:
  PointRegistration(std::vector<Eigen::Vector3d> model_points,
                    std::vector<Eigen::Vector3d> observed_points);

  BodyEnergy Evaluate(int body, const Pose &pose) const override;
  double Value(int body, const Pose &pose) const override;

 private:
  std::vector<Eigen::Vector3d> model_points_;
  std::vector<Eigen::Vector3d> observed_points_;
};

/// Constant gradient and Hessian regardless of the pose, used by synthetic
/// experiments. Value() is always zero.
class FixedEnergy final : public EnergyProvider {
 public:
  explicit FixedEnergy(const BodyEnergy &energy) : energy_{energy} {}

  BodyEnergy Evaluate(int, const Pose &) const override { return energy_; }
  double Value(int, const Pose &) const override { return 0.0; }

 private:
  BodyEnergy energy_;
};

/// Routes queries to per-body terms. Bodies without terms have zero energy;
/// several terms on one body are summed.
class StructureEnergy final : public EnergyProvider {
 public:
  void Add(int body, std::shared_ptr<const EnergyProvider> term);

  BodyEnergy Evaluate(int body, const Pose &pose) const override;
  double Value(int body, const Pose &pose) const override;

 private:
  std::map<int, std::vector<std::shared_ptr<const EnergyProvider>>> terms_;
};

bool IsSymmetric(const Matrix6d &m, double tolerance = 1e-9);
bool IsPositiveSemidefinite(const Matrix6d &m, double tolerance = 1e-9);

}  // namespace kinopt

#endif  // KINOPT_ENERGY_H_
