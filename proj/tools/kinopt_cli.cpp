// kinopt: constraint-convergence, runtime-scaling and synthetic tracking
// experiments. Results go to CSV, a short summary to stdout.
//
// Exit codes: 0 success, 1 configuration or argument error, 2 solver failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include <kinopt/experiments.h>

namespace {

constexpr int kExitConfigError = 1;
constexpr int kExitSolverFailure = 2;

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream out(path);
  if (!out) throw kinopt::ConfigError("cannot write '" + path + "'");
  return out;
}

void RunConverge(const kinopt::ConvergenceOptions &options,
                 const std::string &out_path) {
  const kinopt::ConvergenceStudy study = kinopt::RunConvergenceStudy(options);
  std::ofstream out = OpenOutput(out_path);
  kinopt::WriteConvergenceCsv(out, study);

  std::cout << "kind " << kinopt::KindName(options.kind) << ", "
            << options.trials << " trials, " << study.failures()
            << " factorization failures\n";
  for (int it = 0; it <= options.iterations; ++it) {
    std::cout << "  iteration " << it << ": rot p50 "
              << kinopt::Percentile(study.RotErrors(it), 50) << " p99 "
              << kinopt::Percentile(study.RotErrors(it), 99) << " | trans p50 "
              << kinopt::Percentile(study.TransErrors(it), 50) << " p99 "
              << kinopt::Percentile(study.TransErrors(it), 99) << '\n';
  }
}

void RunScaling(int max_bodies, int reps, std::uint64_t seed,
                const std::string &out_path) {
  const auto samples = kinopt::RunScalingStudy(max_bodies, reps, seed);
  std::ofstream out = OpenOutput(out_path);
  kinopt::WriteScalingCsv(out, samples);
  for (const auto &sample : samples) {
    if (sample.n_bodies != max_bodies && sample.n_bodies % 10 != 0 &&
        sample.n_bodies != 1)
      continue;
    std::cout << kinopt::ModeName(sample.mode) << " n=" << sample.n_bodies
              << " kkt=" << sample.kkt_size() << " "
              << sample.seconds_per_iter * 1e3 << " ms\n";
  }
}

void RunTrack(const std::string &config_path, const std::string &mode_name,
              int steps, std::uint64_t seed, const std::string &out_path) {
  const kinopt::SolverMode mode = kinopt::ParseMode(mode_name);
  const kinopt::TrackingReport report =
      kinopt::RunSyntheticTracking(config_path, mode, steps, seed);
  std::ofstream out = OpenOutput(out_path);
  kinopt::WriteTrackingCsv(out, report);
  std::cout << "mode " << kinopt::ModeName(mode) << ", " << steps
            << " steps\n  mean ADD " << report.mean_add << " m, mean ADD-S "
            << report.mean_add_s << " m\n  AUC (ADD) " << report.auc_add
            << ", AUC (ADD-S) " << report.auc_add_s
            << "\n  max closure residual " << report.max_closure_residual
            << '\n';
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Kinematic-structure pose optimization experiments"};
  app.require_subcommand(1);

  kinopt::ConvergenceOptions converge;
  std::string kind = "full";
  std::string converge_out;
  auto *converge_cmd =
      app.add_subcommand("converge", "Constraint convergence percentiles");
  converge_cmd->add_option("--trials", converge.trials, "Random trials")
      ->check(CLI::PositiveNumber);
  converge_cmd->add_option("--iters", converge.iterations, "Newton iterations")
      ->check(CLI::PositiveNumber);
  converge_cmd->add_option("--kind", kind, "rotvec, trans, full or ortho")
      ->check(CLI::IsMember({"rotvec", "trans", "full", "ortho"}));
  converge_cmd->add_option("--seed", converge.seed, "Master seed");
  converge_cmd->add_option("--out", converge_out, "CSV output")->required();
  converge_cmd->add_flag("--random-energy", converge.random_energy,
                         "Random SPD Hessians and gradients");
  converge_cmd->add_flag("--equal-frames", converge.equal_frames,
                         "Constraint frames at the model frames");
  converge_cmd->add_option("--lambda-r", converge.regularization.rotational,
                           "Rotational regularization")
      ->check(CLI::NonNegativeNumber);
  converge_cmd->add_option("--lambda-t", converge.regularization.translational,
                           "Translational regularization")
      ->check(CLI::NonNegativeNumber);

  int max_bodies = 50;
  int reps = 21;
  std::uint64_t scaling_seed = 0;
  std::string scaling_out;
  auto *scaling_cmd =
      app.add_subcommand("scaling", "Per-iteration time of serial chains");
  scaling_cmd->add_option("--max-bodies", max_bodies, "Longest chain")
      ->check(CLI::PositiveNumber);
  scaling_cmd->add_option("--reps", reps, "Timed repetitions per size")
      ->check(CLI::PositiveNumber);
  scaling_cmd->add_option("--seed", scaling_seed, "Master seed");
  scaling_cmd->add_option("--out", scaling_out, "CSV output")->required();

  std::string config_path;
  std::string mode = "combined";
  int steps = 100;
  std::uint64_t track_seed = 0;
  std::string track_out;
  auto *track_cmd =
      app.add_subcommand("track", "Synthetic tracking of a configured model");
  track_cmd->add_option("--config", config_path, "Model JSON")->required();
  track_cmd->add_option("--mode", mode,
                        "independent, projected, constrained or combined")
      ->check(CLI::IsMember(
          {"independent", "projected", "constrained", "combined"}));
  track_cmd->add_option("--steps", steps, "Trajectory steps")
      ->check(CLI::PositiveNumber);
  track_cmd->add_option("--seed", track_seed, "Measurement noise seed");
  track_cmd->add_option("--out", track_out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*converge_cmd) {
      converge.kind = kinopt::ParseKind(kind);
      RunConverge(converge, converge_out);
    } else if (*scaling_cmd) {
      RunScaling(max_bodies, reps, scaling_seed, scaling_out);
    } else if (*track_cmd) {
      RunTrack(config_path, mode, steps, track_seed, track_out);
    }
  } catch (const kinopt::FactorizationFailed &error) {
    std::cerr << "solver failure: " << error.what() << '\n';
    return kExitSolverFailure;
  } catch (const std::exception &error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitConfigError;
  }
  return 0;
}
