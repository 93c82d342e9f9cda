#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tab/network.hpp"
#include "tab/weight_splitter.hpp"

namespace tab {

struct PseudoinverseResult {
  Eigen::MatrixXd pinv;  // L x C
  Eigen::Index effective_rank = 0;
  double tolerance_used = 0.0;  // relative to the largest singular value
};

/// Default relative singular-value cutoff: max(C, L) * machine epsilon.
double auto_tolerance(const Eigen::MatrixXd& h);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// tol * sigma_max are treated as zero; `tol` defaults to auto_tolerance().
PseudoinverseResult pseudoinverse(const Eigen::MatrixXd& h, std::optional<double> tol = {});

struct TrainOptions {
  std::optional<int> quant_bits;
  std::optional<double> tol;
  /// Tikhonov term added to H^T H; 0 gives the plain pseudoinverse.
  double ridge = 0.0;
  double capacity_tol = 1e-6;
};

struct TrainReport {
  Eigen::MatrixXd weights;  // L x K
  std::optional<std::vector<QuantizedWeightVector>> quantized;
  double train_rmse = 0.0;
  double train_nrmse = 0.0;
  std::optional<double> quantized_train_rmse;
  std::optional<double> quantized_train_nrmse;
  Eigen::Index capacity = 0;
  Eigen::Index effective_rank = 0;
  bool ridge_active = false;

  /// Dequantized L x K weights; requires `quantized`.
  Eigen::MatrixXd quantized_weights() const;
};

/// W = H^+ Y, optionally followed by per-output quantization.
TrainReport train(const Eigen::MatrixXd& h, const Eigen::MatrixXd& y, const TrainOptions& opts = {});

struct CapacityResult {
  Eigen::Index capacity = 0;
  bool full = false;
};

/// Counts rows of H H^+ that match the identity row within `tol`.
CapacityResult encoding_capacity(const Eigen::MatrixXd& h, double tol = 1e-6);

struct ConditionDiagnostics {
  Eigen::Index rank = 0;
  double condition_number = 0.0;  // sigma_max / smallest retained sigma
  double min_sv = 0.0;            // smallest retained sigma
};

ConditionDiagnostics condition_diagnostics(const Eigen::MatrixXd& h);

double rmse(const Eigen::MatrixXd& target, const Eigen::MatrixXd& estimate);

/// RMSE over the standard deviation of all target entries; falls back to
/// plain RMSE when the target is constant.
double nrmse(const Eigen::MatrixXd& target, const Eigen::MatrixXd& estimate);

}  // namespace tab
