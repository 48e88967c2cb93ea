#ifndef KINOPT_EXPERIMENTS_H_
#define KINOPT_EXPERIMENTS_H_

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <kinopt/model_config.h>
#include <kinopt/solver.h>

namespace kinopt {

// Seed of trial `index`, independent of how trials are scheduled.
std::uint64_t TrialSeed(std::uint64_t master_seed, std::uint64_t index);

// Unit axis uniform on the sphere times a length uniform on
// [-max_length, max_length].
Eigen::Vector3d SampleScaledAxis(std::mt19937_64 &rng, double max_length);
// Rotation length on [-pi, pi], translation length on [-1, 1].
Pose SampleRandomPose(std::mt19937_64 &rng);

// ---- Constraint convergence ----------------------------------------------

enum class ConstraintKind { kRotVec, kTrans, kFull, kOrthogonality };

const char *KindName(ConstraintKind kind);
// Accepts "rotvec", "trans", "full" and "ortho".
ConstraintKind ParseKind(const std::string &name);

struct ConvergenceOptions {
  int trials = 1000;
  int iterations = 4;
  ConstraintKind kind = ConstraintKind::kFull;
  std::uint64_t seed = 0;
  // Random SPD Hessians and random gradients on both bodies instead of
  // zero energies.
  bool random_energy = false;
  // Constraint frames coincide with the model frames.
  bool equal_frames = false;
  Regularization regularization;
};

struct ConvergenceTrial {
  std::uint64_t seed = 0;
  Pose frame_a;
  Pose frame_b;
  Pose initial_difference;  // _A T_B before the first iteration
  // Entry k holds the errors after k iterations; entry 0 is the initial one.
  std::vector<double> rot_errors;
  std::vector<double> trans_errors;
  bool failed = false;  // the KKT factorization failed at some iteration
};

struct ConvergenceStudy {
  ConvergenceOptions options;
  std::vector<ConvergenceTrial> trials;

  // Errors of every trial after `iteration` iterations.
  std::vector<double> RotErrors(int iteration) const;
  std::vector<double> TransErrors(int iteration) const;
  int failures() const;
};

struct PercentileRow {
  int iteration = 0;
  int percentile = 0;
  double rot_err = 0.0;
  double trans_err = 0.0;
};

// Two free bodies whose joints carry the DoF class of the constraint kind,
// driven by zero (or random) energies plus regularization.
ConvergenceTrial RunConvergenceTrial(const ConvergenceOptions &options,
                                     std::uint64_t trial_seed);
ConvergenceStudy RunConvergenceStudy(const ConvergenceOptions &options);

// Linear interpolation between order statistics; p in [0, 100].
double Percentile(std::vector<double> values, double p);
// Percentiles 1..99 for every iteration 0..N.
std::vector<PercentileRow> PercentileTable(const ConvergenceStudy &study);
void WriteConvergenceCsv(std::ostream &out, const ConvergenceStudy &study);

// ---- Runtime scaling -------------------------------------------------------

struct ScalingSample {
  SolverMode mode = SolverMode::kProjected;
  int n_bodies = 0;
  int unknowns = 0;     // n_k
  int constraints = 0;  // m
  double seconds_per_iter = 0.0;

  int kkt_size() const { return unknowns + constraints; }
};

// Serial chain: a free root followed by n - 1 revolute links.
KinematicStructure BuildSerialChain(int n_bodies, std::mt19937_64 &rng);

// For n = 1..max_bodies, median wall time of one Step() in Projected and
// Constrained mode after warm-up.
std::vector<ScalingSample> RunScalingStudy(int max_bodies, int repetitions,
                                           std::uint64_t seed);
void WriteScalingCsv(std::ostream &out,
                     const std::vector<ScalingSample> &samples);

// ---- Synthetic tracking ---------------------------------------------------

struct TrackingRow {
  int step = 0;
  int body = 0;
  double add = 0.0;
  double add_s = 0.0;
  // Largest closure-constraint residual norm of the estimate.
  double closure_residual = 0.0;
};

struct TrackingReport {
  SolverMode mode = SolverMode::kCombined;
  std::vector<std::string> body_names;
  std::vector<TrackingRow> rows;
  double mean_add = 0.0;
  double mean_add_s = 0.0;
  double auc_add = 0.0;
  double auc_add_s = 0.0;
  double max_closure_residual = 0.0;
};

// Moves the ground truth by the scripted drives (closure restored by a
// constrained solve), feeds noisy pose measurements of every body to the
// estimator and scores the estimate after each step. Every body needs a mesh.
TrackingReport RunSyntheticTracking(const ModelConfig &config,
                                    SolverMode mode, int steps,
                                    std::uint64_t seed);
TrackingReport RunSyntheticTracking(const std::string &config_path,
                                    SolverMode mode, int steps,
                                    std::uint64_t seed);
void WriteTrackingCsv(std::ostream &out, const TrackingReport &report);

}  // namespace kinopt

#endif  // KINOPT_EXPERIMENTS_H_
