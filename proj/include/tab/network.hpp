#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tab/device_model.hpp"
#include "tab/weight_splitter.hpp"

namespace tab {

/// C x L activation matrix; column i is hidden neuron i sampled at every input.
using HiddenMatrix = Eigen::MatrixXd;

/// Affine map from task-space x to the input voltage V_in.
struct InputMap {
  double x_lo = -1.0;
  double x_hi = 1.0;
  double v_lo = 0.0;
  double v_hi = 1.2;

  void validate() const;
  double gain() const { return (v_hi - v_lo) / (x_hi - x_lo); }
  double operator()(double x) const { return v_lo + gain() * (x - x_lo); }
  double inverse(double v) const { return x_lo + (v - v_lo) / gain(); }
};

/// SISO training set; targets are C x K.
struct Dataset {
  std::vector<double> inputs;
  Eigen::MatrixXd targets;

  std::size_t size() const { return inputs.size(); }
  void validate() const;
};

/// Three-layer TAB: fixed hidden population, linear trained readout.
///
/// Activations are neuron currents divided by the nominal bias current so the
/// readout works on O(1) numbers. Set the weights once before sharing the
/// network across threads; everything else is immutable.
class TabNetwork {
 public:
  TabNetwork(std::vector<NeuronParams> population, PhysicalConstants constants,
             InputMap input_map, double nominal_bias, int outputs = 1);

  std::size_t size() const { return population_.size(); }
  int outputs() const { return outputs_; }
  const std::vector<NeuronParams>& population() const { return population_; }
  const PhysicalConstants& constants() const { return constants_; }
  const InputMap& input_map() const { return input_map_; }
  double nominal_bias() const { return nominal_bias_; }

  /// Normalized activation of neuron i at task input x.
  double activation(double x, std::size_t i) const;
  /// Throws if x maps more than 1 V outside the declared voltage swing.
  double input_voltage(double x) const;

  /// L x K real weights.
  void set_weights(Eigen::MatrixXd weights);
  /// One quantized vector per output.
  void set_weights(std::vector<QuantizedWeightVector> weights);
  bool has_weights() const;
  bool has_quantized_weights() const;
  /// Weights as an L x K real matrix (dequantized when quantized).
  Eigen::MatrixXd effective_weights() const;

  Eigen::VectorXd forward(double x) const;
  /// Row-per-input predictions, C x K.
  Eigen::MatrixXd predict(std::span<const double> inputs) const;

 private:
  std::vector<NeuronParams> population_;
  PhysicalConstants constants_;
  InputMap input_map_;
  double nominal_bias_;
  int outputs_;
  std::variant<std::monostate, Eigen::MatrixXd, std::vector<QuantizedWeightVector>> weights_;
  Eigen::MatrixXd dense_weights_;  // cached effective_weights()
};

/// Builds H with rows distributed across OpenMP workers.
HiddenMatrix build_hidden_matrix(const TabNetwork& net, std::span<const double> inputs);

/// Single-threaded reference for build_hidden_matrix.
HiddenMatrix build_hidden_matrix_serial(const TabNetwork& net, std::span<const double> inputs);

}  // namespace tab
