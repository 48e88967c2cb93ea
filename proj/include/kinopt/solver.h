#ifndef KINOPT_SOLVER_H_
#define KINOPT_SOLVER_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <kinopt/energy.h>
#include <kinopt/kinematics.h>

namespace kinopt {

enum class SolverMode { kIndependent, kProjected, kConstrained, kCombined };

const char *ModeName(SolverMode mode);
// Accepts "independent", "projected", "constrained" and "combined".
SolverMode ParseMode(const std::string &name);

// True if the mode appends constraint rows to the KKT system.
inline bool UsesConstraints(SolverMode mode) {
  return mode == SolverMode::kConstrained || mode == SolverMode::kCombined;
}

/// Diagonal damping added to H_k.
struct Regularization {
  double rotational = 100.0;
  double translational = 1000.0;
};

struct SolverConfig {
  SolverMode mode = SolverMode::kCombined;
  int iterations = 1;
  Regularization regularization;
};

/// [[H, B^T], [B, 0]] [theta; lambda] = -[g; b]
struct KktSystem {
  Eigen::MatrixXd hessian;              // H_k, n_k x n_k
  Eigen::VectorXd gradient;             // g_k
  Eigen::MatrixXd constraint_jacobian;  // B_k, m x n_k
  Eigen::VectorXd constraint_residual;  // b_k
  Eigen::VectorXd theta;                // solution theta_k
  Eigen::VectorXd lambda;               // Lagrange multipliers

  int n() const { return static_cast<int>(gradient.size()); }
  int m() const { return static_cast<int>(constraint_residual.size()); }
  int size() const { return n() + m(); }
};

class FactorizationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepReport {
  double theta_norm = 0.0;
  // One entry per constraint, followed by the orthogonality constraints.
  std::vector<double> residual_before;
  std::vector<double> residual_after;
};

// Stacked residual of all constraints and orthogonality constraints.
Eigen::VectorXd StackedConstraintResidual(const KinematicStructure &structure);
std::vector<double> ConstraintResidualNorms(
    const KinematicStructure &structure);

// Builds the structure a mode operates on from a tree with optional closure
// constraints. Projected drops all constraints, Combined keeps them.
// Independent detaches every body. Constrained detaches every body and
// re-expresses each joint's locked axes as a constraint.
KinematicStructure StructureForMode(const KinematicStructure &tree,
                                    SolverMode mode);

// Requires valid body Jacobians and one BodyEnergy per body. Independent and
// Constrained modes expect a structure of detached 6-DoF bodies.
KktSystem Assemble(const KinematicStructure &structure,
                   const std::vector<BodyEnergy> &energies, SolverMode mode,
                   const Regularization &regularization);

// Fills theta and lambda. Throws FactorizationFailed if the system is
// singular or the solution misses the residual contract.
void SolveKkt(KktSystem &system);

// Jacobians, energies, assembly, solve and pose update.
StepReport Step(KinematicStructure &structure, const EnergyProvider &provider,
                const SolverConfig &config);

// Runs config.iterations steps.
std::vector<StepReport> Solve(KinematicStructure &structure,
                              const EnergyProvider &provider,
                              const SolverConfig &config);

}  // namespace kinopt

#endif  // KINOPT_SOLVER_H_
