#include <kinopt/solver.h>

#include <cmath>

#include <Eigen/Cholesky>

namespace kinopt {

namespace {

constexpr double kPivotTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-7;

bool IsDetached(const KinematicStructure &structure) {
  for (const Body &body : structure.bodies()) {
    if (body.parent || body.joint.dof() != 6) return false;
  }
  return true;
}

template <typename Factorization>
void CheckPivots(const Factorization &ldlt, const char *what) {
  if (ldlt.info() != Eigen::Success)
    throw FactorizationFailed(std::string{what} + " factorization failed");
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  if (pivots.size() == 0) return;
  if (!pivots.allFinite() ||
      pivots.minCoeff() <= kPivotTolerance * std::max(pivots.maxCoeff(), 1.0))
    throw FactorizationFailed(std::string{what} +
                              " is singular (contradictory or duplicate "
                              "constraints, or missing regularization)");
}

double RelativeError(const Eigen::VectorXd &lhs, const Eigen::VectorXd &rhs) {
  return (lhs - rhs).norm() / std::max(rhs.norm(), 1.0);
}

}  // namespace

const char *ModeName(SolverMode mode) {
  switch (mode) {
    case SolverMode::kIndependent: return "independent";
    case SolverMode::kProjected: return "projected";
    case SolverMode::kConstrained: return "constrained";
    case SolverMode::kCombined: return "combined";
  }
  return "unknown";
}

SolverMode ParseMode(const std::string &name) {
  for (SolverMode mode :
       {SolverMode::kIndependent, SolverMode::kProjected,
        SolverMode::kConstrained, SolverMode::kCombined}) {
    if (name == ModeName(mode)) return mode;
  }
  throw std::invalid_argument("unknown solver mode '" + name + "'");
}

Eigen::VectorXd StackedConstraintResidual(const KinematicStructure &structure) {
  Eigen::VectorXd residual(structure.n_constraint_rows());
  int row = 0;
  for (const Constraint &constraint : structure.constraints()) {
    residual.segment(row, constraint.rows()) =
        EvaluateConstraint(constraint, structure);
    row += constraint.rows();
  }
  for (const auto &constraint : structure.orthogonality_constraints()) {
    residual.segment<OrthogonalityConstraint::kRows>(row) =
        EvaluateOrthogonality(constraint, structure);
    row += OrthogonalityConstraint::kRows;
  }
  return residual;
}

std::vector<double> ConstraintResidualNorms(
    const KinematicStructure &structure) {
  std::vector<double> norms;
  for (const Constraint &constraint : structure.constraints())
    norms.push_back(EvaluateConstraint(constraint, structure).norm());
  for (const auto &constraint : structure.orthogonality_constraints())
    norms.push_back(EvaluateOrthogonality(constraint, structure).norm());
  return norms;
}

KinematicStructure StructureForMode(const KinematicStructure &tree,
                                    SolverMode mode) {
  KinematicStructure result;
  switch (mode) {
    case SolverMode::kProjected:
    case SolverMode::kCombined:
      for (const Body &body : tree.bodies())
        result.AddBody(body.name, body.pose, body.parent, body.joint);
      break;
    case SolverMode::kIndependent:
    case SolverMode::kConstrained:
      result = DetachBodies(tree);
      break;
  }
  if (mode == SolverMode::kConstrained) {
    for (int i = 0; i < tree.n_bodies(); ++i) {
      const Body &body = tree.body(i);
      if (body.parent && body.joint.dof() < 6)
        result.AddConstraint(JointAsConstraint(tree, i));
    }
  }
  if (UsesConstraints(mode)) {
    for (const Constraint &constraint : tree.constraints())
      result.AddConstraint(constraint);
    for (const auto &constraint : tree.orthogonality_constraints())
      result.AddOrthogonalityConstraint(constraint);
  }
  return result;
}

KktSystem Assemble(const KinematicStructure &structure,
                   const std::vector<BodyEnergy> &energies, SolverMode mode,
                   const Regularization &regularization) {
  if (static_cast<int>(energies.size()) != structure.n_bodies())
    throw std::invalid_argument(
        "expected " + std::to_string(structure.n_bodies()) +
        " body energies, got " + std::to_string(energies.size()));
  if ((mode == SolverMode::kIndependent ||
       mode == SolverMode::kConstrained) &&
      !IsDetached(structure))
    throw std::invalid_argument(std::string{ModeName(mode)} +
                                " mode needs detached 6-DoF bodies");
  if (regularization.rotational < 0.0 || regularization.translational < 0.0)
    throw std::invalid_argument("regularization must be non-negative");

  const int n = structure.n_k();
  KktSystem system;
  system.gradient = Eigen::VectorXd::Zero(n);
  system.hessian = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < structure.n_bodies(); ++i) {
    const Eigen::MatrixXd &jacobian = structure.jacobian(i);
    system.gradient.noalias() += jacobian.transpose() * energies[i].gradient;
    system.hessian.noalias() +=
        jacobian.transpose() * energies[i].hessian * jacobian;
  }
  const std::vector<bool> &rotational = structure.rotational_coordinates();
  for (int k = 0; k < n; ++k) {
    system.hessian(k, k) += rotational[k] ? regularization.rotational
                                          : regularization.translational;
  }

  const int m = UsesConstraints(mode) ? structure.n_constraint_rows() : 0;
  system.constraint_jacobian = Eigen::MatrixXd::Zero(m, n);
  system.constraint_residual = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    system.constraint_residual = StackedConstraintResidual(structure);
    int row = 0;
    for (const Constraint &constraint : structure.constraints()) {
      system.constraint_jacobian.middleRows(row, constraint.rows()) =
          ConstraintJacobian(constraint, structure);
      row += constraint.rows();
    }
    for (const auto &constraint : structure.orthogonality_constraints()) {
      system.constraint_jacobian.middleRows(row,
                                            OrthogonalityConstraint::kRows) =
          OrthogonalityJacobian(constraint, structure);
      row += OrthogonalityConstraint::kRows;
    }
  }
  return system;
}

void SolveKkt(KktSystem &system) {
  const int n = system.n();
  const int m = system.m();
  if (system.hessian.rows() != n || system.hessian.cols() != n ||
      system.constraint_jacobian.rows() != m ||
      system.constraint_jacobian.cols() != n)
    throw std::invalid_argument("inconsistent KKT system dimensions");

  if (m == 0) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system.hessian);
    CheckPivots(ldlt, "Hessian");
    system.theta = ldlt.solve(-system.gradient);
    system.lambda.resize(0);
    if (!system.theta.allFinite() ||
        RelativeError(system.hessian * system.theta, -system.gradient) >
            kResidualTolerance)
      throw FactorizationFailed("Newton step misses the residual check");
    return;
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = system.hessian;
  kkt.topRightCorner(n, m) = system.constraint_jacobian.transpose();
  kkt.bottomLeftCorner(m, n) = system.constraint_jacobian;
  Eigen::VectorXd rhs(n + m);
  rhs << -system.gradient, -system.constraint_residual;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(kkt);
  CheckPivots(ldlt, "KKT matrix");
  const Eigen::VectorXd solution = ldlt.solve(rhs);
  system.theta = solution.head(n);
  system.lambda = solution.tail(m);

  const Eigen::VectorXd stationarity =
      system.hessian * system.theta +
      system.constraint_jacobian.transpose() * system.lambda;
  const Eigen::VectorXd feasibility =
      system.constraint_jacobian * system.theta;
  if (!solution.allFinite() ||
      RelativeError(stationarity, -system.gradient) > kResidualTolerance ||
      RelativeError(feasibility, -system.constraint_residual) >
          kResidualTolerance)
    throw FactorizationFailed("KKT solution misses the residual check");
}

StepReport Step(KinematicStructure &structure, const EnergyProvider &provider,
                const SolverConfig &config) {
  structure.ComputeBodyJacobians();
  std::vector<BodyEnergy> energies;
  energies.reserve(structure.n_bodies());
  for (int i = 0; i < structure.n_bodies(); ++i)
    energies.push_back(provider.Evaluate(i, structure.body(i).pose));

  StepReport report;
  report.residual_before = ConstraintResidualNorms(structure);
  KktSystem system =
      Assemble(structure, energies, config.mode, config.regularization);
  SolveKkt(system);
  structure.UpdatePoses(system.theta);
  report.theta_norm = system.theta.norm();
  report.residual_after = ConstraintResidualNorms(structure);
  return report;
}

std::vector<StepReport> Solve(KinematicStructure &structure,
                              const EnergyProvider &provider,
                              const SolverConfig &config) {
  if (config.iterations < 1)
    throw std::invalid_argument("solver needs at least one iteration");
  std::vector<StepReport> reports;
  for (int i = 0; i < config.iterations; ++i)
    reports.push_back(Step(structure, provider, config));
  return reports;
}

}  // namespace kinopt
