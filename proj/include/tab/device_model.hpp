#pragma once

// Behavioral model of the hidden-neuron differential pair.
//
// M1/M2 share the tail current I_b. In weak inversion the branch currents are
//
//   I_1 = I_b * exp(V_in/nU_T) / (exp(V_in/nU_T) + exp(V_ref/nU_T))
//   I_2 = I_b * exp(V_ref/nU_T) / (exp(V_in/nU_T) + exp(V_ref/nU_T))
//
// which is I_b * logistic(+-(V_in - V_ref)/(n U_T)). The mirrored I_1 is the
// neuron's activation. In terms of the generic random-projection neuron
// g(w*x + b + o), the circuit supplies
//
//   w = 1/(n U_T)          input weight, random through slope-factor mismatch
//   b = dV_os/(n U_T)      random bias from differential-pair offset
//   o = -V_ref/(n U_T)     systematic offset set by the reference polyline
//
// and g is the logistic scaled by g_mirror * I_b.

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace tab {

struct PhysicalConstants {
  double thermal_voltage = 0.02585;  // U_T at 300 K, volts

  void validate() const;
};

struct NeuronParams {
  double bias_current = 1e-9;  // I_b, amperes
  double slope_factor = 1.3;   // n
  double v_ref = 0.6;          // systematic reference voltage, volts
  double offset_voltage = 0.0;  // dV_os, input-referred mismatch, volts
  double mirror_gain = 1.0;     // g_mirror

  void validate() const;

  bool operator==(const NeuronParams&) const = default;
};

/// Standard deviations of the zero-mean Gaussian mismatch terms.
struct MismatchSpec {
  double sigma_vos = 5e-3;
  double sigma_ib_rel = 0.05;
  double sigma_mirror_rel = 0.02;
  double sigma_n = 0.02;

  static MismatchSpec ideal() { return {0.0, 0.0, 0.0, 0.0}; }
  bool is_ideal() const;
  void validate() const;

  bool operator==(const MismatchSpec&) const = default;
};

struct UniformSpan {
  double v_min;
  double v_max;
  bool operator==(const UniformSpan&) const = default;
};

struct ExplicitList {
  std::vector<double> values;
  bool operator==(const ExplicitList&) const = default;
};

struct ConstantOffset {
  double v;
  bool operator==(const ConstantOffset&) const = default;
};

/// How V_ref is assigned across the population.
using OffsetScheme = std::variant<UniformSpan, ExplicitList, ConstantOffset>;

void validate(const OffsetScheme& scheme);

/// V_ref for each of `count` neurons.
std::vector<double> offsets_for(const OffsetScheme& scheme, std::size_t count);

struct BranchCurrents {
  double i1;
  double i2;
};

struct TuningCurve {
  std::vector<double> v_grid;
  std::vector<double> i_out;
};

/// Numerically stable 1/(1+exp(-z)).
double logistic(double z);

BranchCurrents diff_pair_currents(double v_in, const NeuronParams& p,
                                  const PhysicalConstants& c = {});

/// Mirrored output current g_mirror * I_1.
double neuron_response(double v_in, const NeuronParams& p,
                       const PhysicalConstants& c = {});

/// Same as neuron_response without re-validating parameters; for inner loops
/// over populations that were validated once.
double neuron_response_unchecked(double v_in, const NeuronParams& p,
                                 const PhysicalConstants& c);

/// Draws `count` neurons around `nominal`. Deterministic in all arguments.
std::vector<NeuronParams> sample_population(std::size_t count,
                                            const MismatchSpec& mismatch,
                                            const OffsetScheme& offsets,
                                            const NeuronParams& nominal,
                                            std::uint64_t seed);

TuningCurve tuning_curve(const NeuronParams& p, std::span<const double> v_grid,
                         const PhysicalConstants& c = {});

}  // namespace tab
