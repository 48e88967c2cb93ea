#include <kinopt/experiments.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <stdexcept>

namespace kinopt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCsvPrecision = 12;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Matrix6d RandomSpd(std::mt19937_64 &rng, double scale) {
  std::normal_distribution<double> normal;
  Matrix6d m;
  for (int i = 0; i < m.size(); ++i) m(i) = normal(rng);
  return scale * (m * m.transpose() / 6.0 + 0.1 * Matrix6d::Identity());
}

Vector6d RandomVector6(std::mt19937_64 &rng, double scale) {
  std::normal_distribution<double> normal;
  Vector6d v;
  for (int i = 0; i < 6; ++i) v(i) = scale * normal(rng);
  return v;
}

AxisMask JointAxesFor(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kRotVec:
    case ConstraintKind::kOrthogonality:
      return kRotationAxes;
    case ConstraintKind::kTrans:
      return kTranslationAxes;
    case ConstraintKind::kFull:
      break;
  }
  return kAllAxes;
}

AxisMask ConstraintAxesFor(ConstraintKind kind) {
  return JointAxesFor(kind);
}

double Median(std::vector<double> values) { return Percentile(std::move(values), 50.0); }

double MaxClosureResidual(const KinematicStructure &tree,
                          const KinematicStructure &estimate) {
  double worst = 0.0;
  for (const Constraint &c : tree.constraints()) {
    const Pose a_to_b =
        RelativeConstraintPose(c.frame_a, estimate.body(c.body_a).pose,
                               estimate.body(c.body_b).pose, c.frame_b);
    Vector6d extended;
    extended << a_to_b.rotvec(), a_to_b.translation();
    double squared = 0.0;
    for (int axis = 0; axis < 6; ++axis) {
      if (c.axes[axis]) squared += extended(axis) * extended(axis);
    }
    worst = std::max(worst, std::sqrt(squared));
  }
  return worst;
}

// Ground-truth motion: the driven joint coordinates follow their script, the
// roots stay put and the remaining coordinates move as little as needed to
// keep the closure constraints satisfied.
class GroundTruth {
 public:
  GroundTruth(const ModelConfig &config)
      : structure_{config.structure},
        drives_{config.drives},
        applied_(config.drives.size(), 0.0),
        regularization_{config.regularization} {
    std::set<int> driven;
    for (const Drive &drive : drives_)
      driven.insert(structure_.dof_offset(drive.body) + drive.coordinate);
    for (int i = 0; i < structure_.n_bodies(); ++i) {
      if (structure_.body(i).parent) continue;
      for (int k = 0; k < structure_.body(i).joint.dof(); ++k) {
        const int coordinate = structure_.dof_offset(i) + k;
        if (!driven.count(coordinate)) locked_.push_back(coordinate);
      }
    }
  }

  const KinematicStructure &structure() const { return structure_; }

  void MoveTo(int step) {
    std::vector<double> increments(drives_.size());
    for (size_t d = 0; d < drives_.size(); ++d)
      increments[d] = drives_[d].ValueAt(step) - applied_[d];

    const std::vector<BodyEnergy> zero(structure_.n_bodies());
    constexpr int kMaxIterations = 50;
    for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
      structure_.ComputeBodyJacobians();
      KktSystem system = Assemble(structure_, zero, SolverMode::kCombined,
                                  regularization_);
      const int m = system.m();
      const int extra = static_cast<int>(locked_.size() + drives_.size());
      system.constraint_jacobian.conservativeResize(m + extra, Eigen::NoChange);
      system.constraint_residual.conservativeResize(m + extra);
      system.constraint_jacobian.bottomRows(extra).setZero();
      int row = m;
      for (int coordinate : locked_) {
        system.constraint_jacobian(row, coordinate) = 1.0;
        system.constraint_residual(row++) = 0.0;
      }
      for (size_t d = 0; d < drives_.size(); ++d) {
        const int coordinate =
            structure_.dof_offset(drives_[d].body) + drives_[d].coordinate;
        system.constraint_jacobian(row, coordinate) = 1.0;
        system.constraint_residual(row++) = -increments[d];
      }
      SolveKkt(system);
      structure_.UpdatePoses(system.theta);
      for (size_t d = 0; d < drives_.size(); ++d) {
        applied_[d] += increments[d];
        increments[d] = 0.0;
      }
      if (StackedConstraintResidual(structure_).norm() < 1e-12) return;
    }
    throw std::runtime_error("ground truth cannot satisfy the closure "
                             "constraints at step " + std::to_string(step));
  }

 private:
  KinematicStructure structure_;
  std::vector<Drive> drives_;
  std::vector<double> applied_;
  std::vector<int> locked_;
  Regularization regularization_;
};

}  // namespace

std::uint64_t TrialSeed(std::uint64_t master_seed, std::uint64_t index) {
  return SplitMix64(master_seed ^ SplitMix64(index));
}

Eigen::Vector3d SampleScaledAxis(std::mt19937_64 &rng, double max_length) {
  std::normal_distribution<double> normal;
  Eigen::Vector3d axis;
  do {
    axis = Eigen::Vector3d{normal(rng), normal(rng), normal(rng)};
  } while (axis.norm() < 1e-12);
  std::uniform_real_distribution<double> length(-max_length, max_length);
  return axis.normalized() * length(rng);
}

Pose SampleRandomPose(std::mt19937_64 &rng) {
  const Eigen::Vector3d rotvec = SampleScaledAxis(rng, kPi);
  const Eigen::Vector3d trans = SampleScaledAxis(rng, 1.0);
  return Pose::FromRotVec(rotvec, trans);
}

const char *KindName(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kRotVec: return "rotvec";
    case ConstraintKind::kTrans: return "trans";
    case ConstraintKind::kFull: return "full";
    case ConstraintKind::kOrthogonality: return "ortho";
  }
  return "unknown";
}

ConstraintKind ParseKind(const std::string &name) {
  for (ConstraintKind kind :
       {ConstraintKind::kRotVec, ConstraintKind::kTrans, ConstraintKind::kFull,
        ConstraintKind::kOrthogonality}) {
    if (name == KindName(kind)) return kind;
  }
  throw std::invalid_argument("unknown constraint kind '" + name + "'");
}

std::vector<double> ConvergenceStudy::RotErrors(int iteration) const {
  std::vector<double> errors;
  errors.reserve(trials.size());
  for (const auto &trial : trials) errors.push_back(trial.rot_errors.at(iteration));
  return errors;
}

std::vector<double> ConvergenceStudy::TransErrors(int iteration) const {
  std::vector<double> errors;
  errors.reserve(trials.size());
  for (const auto &trial : trials)
    errors.push_back(trial.trans_errors.at(iteration));
  return errors;
}

int ConvergenceStudy::failures() const {
  return static_cast<int>(std::count_if(
      trials.begin(), trials.end(), [](const auto &t) { return t.failed; }));
}

ConvergenceTrial RunConvergenceTrial(const ConvergenceOptions &options,
                                     std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  ConvergenceTrial trial;
  trial.seed = trial_seed;
  if (!options.equal_frames) {
    trial.frame_a = SampleRandomPose(rng);
    trial.frame_b = SampleRandomPose(rng);
  }
  trial.initial_difference = SampleRandomPose(rng);
  const Pose pose_a = SampleRandomPose(rng);
  const Pose pose_b = pose_a * trial.frame_a.Inverse() *
                      trial.initial_difference * trial.frame_b;

  Joint joint;
  joint.free_axes = JointAxesFor(options.kind);
  KinematicStructure structure;
  const int a = structure.AddBody("a", pose_a, std::nullopt, joint);
  const int b = structure.AddBody("b", pose_b, std::nullopt, joint);
  if (options.kind == ConstraintKind::kOrthogonality) {
    structure.AddOrthogonalityConstraint({a, b, trial.frame_a, trial.frame_b});
  } else {
    structure.AddConstraint({a, b, trial.frame_a, trial.frame_b,
                             ConstraintAxesFor(options.kind)});
  }

  StructureEnergy random_energy;
  if (options.random_energy) {
    for (int body : {a, b}) {
      BodyEnergy energy;
      energy.hessian = RandomSpd(rng, 100.0);
      energy.gradient = RandomVector6(rng, 100.0);
      random_energy.Add(body, std::make_shared<FixedEnergy>(energy));
    }
  }
  const ZeroEnergy zero_energy;
  const EnergyProvider &provider =
      options.random_energy ? static_cast<const EnergyProvider &>(random_energy)
                            : zero_energy;
  const SolverConfig config{SolverMode::kCombined, 1, options.regularization};

  auto record = [&] {
    const Pose a_to_b =
        RelativeConstraintPose(trial.frame_a, structure.body(a).pose,
                               structure.body(b).pose, trial.frame_b);
    trial.rot_errors.push_back(a_to_b.rotvec().norm());
    trial.trans_errors.push_back(a_to_b.translation().norm());
  };
  record();
  for (int iteration = 0; iteration < options.iterations; ++iteration) {
    if (!trial.failed) {
      try {
        Step(structure, provider, config);
      } catch (const FactorizationFailed &) {
        trial.failed = true;
      }
    }
    record();
  }
  return trial;
}

ConvergenceStudy RunConvergenceStudy(const ConvergenceOptions &options) {
  if (options.trials < 1 || options.iterations < 1)
    throw std::invalid_argument("convergence study needs at least one trial "
                                "and one iteration");
  ConvergenceStudy study;
  study.options = options;
  study.trials.reserve(options.trials);
  for (int i = 0; i < options.trials; ++i)
    study.trials.push_back(
        RunConvergenceTrial(options, TrialSeed(options.seed, i)));
  return study;
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("no values");
  std::sort(values.begin(), values.end());
  const double position =
      std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<size_t>(std::floor(position));
  const size_t upper = std::min(lower + 1, values.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return values[lower] + fraction * (values[upper] - values[lower]);
}

std::vector<PercentileRow> PercentileTable(const ConvergenceStudy &study) {
  std::vector<PercentileRow> rows;
  for (int iteration = 0; iteration <= study.options.iterations; ++iteration) {
    std::vector<double> rot = study.RotErrors(iteration);
    std::vector<double> trans = study.TransErrors(iteration);
    std::sort(rot.begin(), rot.end());
    std::sort(trans.begin(), trans.end());
    for (int p = 1; p <= 99; ++p)
      rows.push_back({iteration, p, Percentile(rot, p), Percentile(trans, p)});
  }
  return rows;
}

void WriteConvergenceCsv(std::ostream &out, const ConvergenceStudy &study) {
  out << "kind,iteration,percentile,rot_err,trans_err\n"
      << std::setprecision(kCsvPrecision);
  for (const PercentileRow &row : PercentileTable(study)) {
    out << KindName(study.options.kind) << ',' << row.iteration << ','
        << row.percentile << ',' << row.rot_err << ',' << row.trans_err << '\n';
  }
}

KinematicStructure BuildSerialChain(int n_bodies, std::mt19937_64 &rng) {
  if (n_bodies < 1) throw std::invalid_argument("chain needs a body");
  KinematicStructure chain;
  chain.AddBody("link0", Pose::Identity(), std::nullopt, Joint{});
  Joint revolute;
  revolute.free_axes = {false, false, true, false, false, false};
  for (int i = 1; i < n_bodies; ++i) {
    revolute.parent_to_joint = Pose::FromRotVec(SampleScaledAxis(rng, 0.5),
                                                Eigen::Vector3d{0.1, 0.0, 0.0});
    chain.AddChild("link" + std::to_string(i), i - 1, revolute);
  }
  return chain;
}

std::vector<ScalingSample> RunScalingStudy(int max_bodies, int repetitions,
                                           std::uint64_t seed) {
  if (max_bodies < 1 || repetitions < 1)
    throw std::invalid_argument("scaling study needs bodies and repetitions");
  constexpr int kWarmup = 2;
  std::vector<ScalingSample> samples;
  for (int n = 1; n <= max_bodies; ++n) {
    std::mt19937_64 rng(TrialSeed(seed, n));
    const KinematicStructure chain = BuildSerialChain(n, rng);
    StructureEnergy energy;
    for (int i = 0; i < n; ++i) {
      BodyEnergy body;
      body.hessian = RandomSpd(rng, 10.0);
      body.gradient = RandomVector6(rng, 1.0);
      energy.Add(i, std::make_shared<FixedEnergy>(body));
    }
    for (SolverMode mode : {SolverMode::kProjected, SolverMode::kConstrained}) {
      const KinematicStructure structure = StructureForMode(chain, mode);
      const SolverConfig config{mode, 1, Regularization{}};
      for (int i = 0; i < kWarmup; ++i) {
        KinematicStructure scratch = structure;
        Step(scratch, energy, config);
      }
      std::vector<double> seconds;
      for (int r = 0; r < repetitions; ++r) {
        KinematicStructure scratch = structure;
        const auto start = std::chrono::steady_clock::now();
        Step(scratch, energy, config);
        const auto stop = std::chrono::steady_clock::now();
        seconds.push_back(std::chrono::duration<double>(stop - start).count());
      }
      ScalingSample sample;
      sample.mode = mode;
      sample.n_bodies = n;
      sample.unknowns = structure.n_k();
      sample.constraints = structure.n_constraint_rows();
      sample.seconds_per_iter = Median(seconds);
      samples.push_back(sample);
    }
  }
  return samples;
}

void WriteScalingCsv(std::ostream &out,
                     const std::vector<ScalingSample> &samples) {
  out << "mode,n_bodies,seconds_per_iter\n" << std::setprecision(kCsvPrecision);
  for (const ScalingSample &sample : samples) {
    out << ModeName(sample.mode) << ',' << sample.n_bodies << ','
        << sample.seconds_per_iter << '\n';
  }
}

TrackingReport RunSyntheticTracking(const ModelConfig &config,
                                    SolverMode mode, int steps,
                                    std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("tracking needs at least one step");
  const int n_bodies = config.structure.n_bodies();
  for (int i = 0; i < n_bodies; ++i) {
    if (config.meshes.at(i).empty())
      throw ConfigError("body '" + config.structure.body(i).name +
                        "' needs a mesh_path for tracking");
  }

  GroundTruth truth{config};
  truth.MoveTo(0);
  KinematicStructure estimate = StructureForMode(truth.structure(), mode);
  const SolverConfig solver{mode, config.iterations, config.regularization};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  TrackingReport report;
  report.mode = mode;
  for (const Body &body : config.structure.bodies())
    report.body_names.push_back(body.name);
  Eigen::MatrixXd add(n_bodies, steps);
  Eigen::MatrixXd add_s(n_bodies, steps);

  for (int step = 1; step <= steps; ++step) {
    truth.MoveTo(step);
    StructureEnergy energy;
    for (int i = 0; i < n_bodies; ++i) {
      const Measurement &m = config.measurements.at(i);
      Vector6d noise;
      for (int k = 0; k < 6; ++k)
        noise(k) = normal(rng) * (k < 3 ? m.noise_r : m.noise_t);
      const Pose target =
          PoseUnderVariation(truth.structure().body(i).pose, noise);
      energy.Add(i, std::make_shared<QuadraticPoseTarget>(target, m.weight_r,
                                                          m.weight_t));
    }
    Solve(estimate, energy, solver);

    const double closure = MaxClosureResidual(config.structure, estimate);
    report.max_closure_residual = std::max(report.max_closure_residual, closure);
    for (int i = 0; i < n_bodies; ++i) {
      const Pose relative = RelativeModelPose(estimate.body(i).pose,
                                              truth.structure().body(i).pose);
      TrackingRow row{step, i, AddError(config.meshes[i], relative),
                      AddSError(config.meshes[i], relative), closure};
      add(i, step - 1) = row.add;
      add_s(i, step - 1) = row.add_s;
      report.rows.push_back(row);
    }
  }
  report.mean_add = add.mean();
  report.mean_add_s = add_s.mean();
  report.auc_add = AucScore(add, config.error_threshold);
  report.auc_add_s = AucScore(add_s, config.error_threshold);
  return report;
}

TrackingReport RunSyntheticTracking(const std::string &config_path,
                                    SolverMode mode, int steps,
                                    std::uint64_t seed) {
  return RunSyntheticTracking(LoadModelConfig(config_path), mode, steps, seed);
}

void WriteTrackingCsv(std::ostream &out, const TrackingReport &report) {
  out << "step,body,add,add_s,closure_residual\n"
      << std::setprecision(kCsvPrecision);
  for (const TrackingRow &row : report.rows) {
    out << row.step << ',' << report.body_names.at(row.body) << ',' << row.add
        << ',' << row.add_s << ',' << row.closure_residual << '\n';
  }
}

}  // namespace kinopt
