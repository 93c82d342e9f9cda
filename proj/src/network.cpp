#include "tab/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "tab/error.hpp"
#include "tab/parallel.hpp"

namespace tab {

void InputMap::validate() const {
  if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && x_lo < x_hi)) {
    throw InvalidParameter("input map requires x_lo < x_hi");
  }
  if (!(std::isfinite(v_lo) && std::isfinite(v_hi)) || v_lo == v_hi) {
    throw InvalidParameter("input map must have a nonzero voltage swing");
  }
}

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(inputs.size()) != targets.rows()) {
    throw DimensionMismatch("dataset has " + std::to_string(inputs.size()) + " inputs but " +
                            std::to_string(targets.rows()) + " target rows");
  }
  for (double x : inputs) {
    if (std::isnan(x)) throw InvalidParameter("dataset input is NaN");
  }
  if (targets.hasNaN()) throw InvalidParameter("dataset target is NaN");
}

TabNetwork::TabNetwork(std::vector<NeuronParams> population, PhysicalConstants constants,
                       InputMap input_map, double nominal_bias, int outputs)
    : population_(std::move(population)),
      constants_(constants),
      input_map_(input_map),
      nominal_bias_(nominal_bias),
      outputs_(outputs) {
  if (population_.empty()) throw InvalidParameter("network needs at least one hidden neuron");
  if (outputs_ < 1) throw InvalidParameter("network needs at least one output");
  if (!(std::isfinite(nominal_bias_) && nominal_bias_ > 0.0)) {
    throw InvalidParameter("nominal bias current must be positive");
  }
  constants_.validate();
  input_map_.validate();
  for (const auto& p : population_) p.validate();
}

double TabNetwork::input_voltage(double x) const {
  const double v = input_map_(x);
  const double lo = std::min(input_map_.v_lo, input_map_.v_hi) - 1.0;
  const double hi = std::max(input_map_.v_lo, input_map_.v_hi) + 1.0;
  if (!(v >= lo && v <= hi)) {
    throw InvalidParameter("input " + std::to_string(x) + " maps to " + std::to_string(v) +
                           " V, outside the input swing");
  }
  return v;
}

double TabNetwork::activation(double x, std::size_t i) const {
  return neuron_response_unchecked(input_voltage(x), population_.at(i), constants_) /
         nominal_bias_;
}

void TabNetwork::set_weights(Eigen::MatrixXd weights) {
  if (weights.rows() != static_cast<Eigen::Index>(size()) || weights.cols() != outputs_) {
    throw DimensionMismatch("weights must be " + std::to_string(size()) + " x " +
                            std::to_string(outputs_));
  }
  if (!weights.allFinite()) throw InvalidParameter("weights must be finite");
  dense_weights_ = weights;
  weights_ = std::move(weights);
}

void TabNetwork::set_weights(std::vector<QuantizedWeightVector> weights) {
  if (static_cast<int>(weights.size()) != outputs_) {
    throw DimensionMismatch("need one quantized weight vector per output");
  }
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(size()), outputs_);
  for (int k = 0; k < outputs_; ++k) {
    if (weights[k].size() != size()) {
      throw DimensionMismatch("quantized weight vector length " +
                              std::to_string(weights[k].size()) + " != " +
                              std::to_string(size()));
    }
    if (!(weights[k].scale > 0.0)) throw InvalidParameter("weight scale must be positive");
    for (std::size_t i = 0; i < size(); ++i) dense(static_cast<Eigen::Index>(i), k) = weights[k].value(i);
  }
  dense_weights_ = std::move(dense);
  weights_ = std::move(weights);
}

bool TabNetwork::has_weights() const {
  return !std::holds_alternative<std::monostate>(weights_);
}

bool TabNetwork::has_quantized_weights() const {
  return std::holds_alternative<std::vector<QuantizedWeightVector>>(weights_);
}

Eigen::MatrixXd TabNetwork::effective_weights() const {
  if (!has_weights()) throw InvalidParameter("network has no output weights");
  return dense_weights_;
}

Eigen::VectorXd TabNetwork::forward(double x) const {
  if (!has_weights()) throw InvalidParameter("network has no output weights");
  const double v = input_voltage(x);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(outputs_);
  for (std::size_t i = 0; i < size(); ++i) {
    const double h = neuron_response_unchecked(v, population_[i], constants_) / nominal_bias_;
    y += h * dense_weights_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return y;
}

Eigen::MatrixXd TabNetwork::predict(std::span<const double> inputs) const {
  if (!has_weights()) throw InvalidParameter("network has no output weights");
  return build_hidden_matrix(*this, inputs) * dense_weights_;
}

namespace {

void fill_row(const TabNetwork& net, double x, HiddenMatrix& h, Eigen::Index row) {
  const double v = net.input_map()(x);
  const auto& pop = net.population();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    h(row, static_cast<Eigen::Index>(i)) =
        neuron_response_unchecked(v, pop[i], net.constants()) / net.nominal_bias();
  }
}

void check_inputs(const TabNetwork& net, std::span<const double> inputs) {
  for (double x : inputs) net.input_voltage(x);
}

}  // namespace

HiddenMatrix build_hidden_matrix_serial(const TabNetwork& net, std::span<const double> inputs) {
  check_inputs(net, inputs);
  HiddenMatrix h(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(net.size()));
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    fill_row(net, inputs[n], h, static_cast<Eigen::Index>(n));
  }
  return h;
}

HiddenMatrix build_hidden_matrix(const TabNetwork& net, std::span<const double> inputs) {
  check_inputs(net, inputs);
  const auto rows = static_cast<std::int64_t>(inputs.size());
  HiddenMatrix h(rows, static_cast<Eigen::Index>(net.size()));
  const int threads = worker_count();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t n = 0; n < rows; ++n) {
    fill_row(net, inputs[static_cast<std::size_t>(n)], h, n);
  }
  return h;
}

}  // namespace tab
