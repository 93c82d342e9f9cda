#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tab/device_model.hpp"
#include "tab/network.hpp"

namespace tab {

enum class TaskKind { sin, cube, sinc, custom };

std::string to_string(TaskKind kind);
TaskKind parse_task(std::string_view name);

/// Regression target on [x_lo, x_hi].
///   sin  : sin(pi x)
///   cube : x^3
///   sinc : sin(8 pi x) / (8 pi x), 1 at x = 0
struct TaskSpec {
  TaskKind name = TaskKind::sin;
  double x_lo = -1.0;
  double x_hi = 1.0;
  int n_train = 256;
  int n_test = 255;
  std::function<double(double)> custom;  // used when name == custom

  void validate() const;
  double target(double x) const;
  /// n_train evenly spaced points including both ends.
  std::vector<double> train_grid() const;
  /// Cell centres of n_test equal cells; with n_test = n_train - 1 these are
  /// the midpoints between training points.
  std::vector<double> test_grid() const;
};

struct ExperimentConfig {
  TaskSpec task;
  int L = 34;
  OffsetScheme offsets = UniformSpan{0.0, 1.2};
  MismatchSpec mismatch;
  std::optional<int> quant_bits;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "tab_out";

  NeuronParams nominal;
  PhysicalConstants constants;
  InputMap input_map;
  double ridge = 0.0;

  void validate() const;
};

/// In-memory result of one train/evaluate pass; nothing is written.
struct RegressionOutcome {
  double train_nrmse = 0.0;
  double test_nrmse = 0.0;
  std::optional<double> test_nrmse_real;  // set when weights were quantized
  Eigen::Index capacity = 0;
  Eigen::Index rank = 0;
  double condition_number = 0.0;
  bool ridge_active = false;
  std::vector<double> test_x;
  Eigen::VectorXd y_target;
  Eigen::VectorXd y_hat;
};

RegressionOutcome evaluate_regression(const ExperimentConfig& cfg);

struct ReportFile {
  std::string path;  // relative to the output directory
  std::size_t rows = 0;  // data rows, header excluded
};

struct ExperimentReport {
  ExperimentConfig config;
  double train_nrmse = 0.0;
  double test_nrmse = 0.0;
  std::optional<double> test_nrmse_real;
  Eigen::Index capacity = 0;
  Eigen::Index rank = 0;
  double condition_number = 0.0;
  bool ridge_active = false;
  std::vector<ReportFile> files;
  double wall_clock_seconds = 0.0;
};

/// Trains on the configured task and writes regress_<task>.csv
/// (x, y_target, y_hat) plus regress_<task>.json.
ExperimentReport run_regression(const ExperimentConfig& cfg, bool include_timing = false);

struct ArmResult {
  std::string arm;
  Eigen::Index rank = 0;
  Eigen::Index capacity = 0;
  double condition_number = 0.0;
  double train_nrmse = 0.0;
  double test_nrmse = 0.0;
};

struct HeterogeneityReport {
  ExperimentConfig config;
  std::vector<ArmResult> arms;  // homogeneous, mismatch_only, uniform_span
  /// Test NRMSE of the best a + b * h(x) fit, h the homogeneous tuning curve.
  double baseline_nrmse = 0.0;
  std::vector<ReportFile> files;
  double wall_clock_seconds = 0.0;

  const ArmResult& arm(std::string_view name) const;
};

HeterogeneityReport evaluate_heterogeneity(const ExperimentConfig& cfg);
HeterogeneityReport heterogeneity_study(const ExperimentConfig& cfg, bool include_timing = false);

struct BitDepthRow {
  std::optional<int> bits;  // nullopt for real-valued weights
  double train_nrmse = 0.0;
  double test_nrmse = 0.0;
};

struct BitDepthReport {
  ExperimentConfig config;
  std::vector<BitDepthRow> rows;  // real weights first, then bits_list order
  std::vector<ReportFile> files;
  double wall_clock_seconds = 0.0;

  double real_test_nrmse() const;
  double test_nrmse(int bits) const;
};

BitDepthReport evaluate_bitdepth(const ExperimentConfig& cfg, std::span<const int> bits_list);
BitDepthReport bitdepth_sweep(const ExperimentConfig& cfg, std::span<const int> bits_list,
                              bool include_timing = false);

struct ChipResult {
  std::uint64_t seed = 0;
  double train_nrmse = 0.0;
  double test_nrmse = 0.0;
  Eigen::Index capacity = 0;
  Eigen::Index rank = 0;
  double condition_number = 0.0;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Linear-interpolated percentiles (q in [0, 1]) and moments.
Summary summarize(std::span<const double> values);

struct MonteCarloReport {
  ExperimentConfig config;
  int n_chips = 0;
  std::vector<ChipResult> chips;  // sorted by seed
  Summary test_nrmse;
  Summary capacity;
  std::vector<ReportFile> files;
  double wall_clock_seconds = 0.0;
};

/// One regression per chip, seeds cfg.seed + i. Chips run on OpenMP workers.
std::vector<ChipResult> simulate_chips(const ExperimentConfig& cfg, int n_chips);
/// Single-threaded reference for simulate_chips.
std::vector<ChipResult> simulate_chips_serial(const ExperimentConfig& cfg, int n_chips);

MonteCarloReport evaluate_mismatch_mc(const ExperimentConfig& cfg, int n_chips);
MonteCarloReport mismatch_mc(const ExperimentConfig& cfg, int n_chips, bool include_timing = false);

}  // namespace tab
